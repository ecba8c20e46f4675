#include "glars/data_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace glars {

namespace {

constexpr std::uint64_t kProstateCsvChecksum = 0x37f279a6ceb196e3ULL;
constexpr std::uint64_t kProstateSplitChecksum = 0xa2fa365cd9fcdb9eULL;

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(cell);
    if (!line.empty() && line.back() == delim) out.push_back("");
    return out;
}

double parse_cell(const std::string& cell, int row, int col) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw NonNumericCell(row, col, "'" + cell + "'");
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    if (*end != '\0') throw NonNumericCell(row, col, "'" + cell + "'");
    return v;
}

std::string fmt5(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(5) << v;
    return ss.str();
}

std::string shrinkage_text(const EvaluationResult& r) {
    return r.chosen_shrinkage ? fmt5(*r.chosen_shrinkage) : "--";
}

void write_table_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
    os << "Algorithm,RMSE,k_d,alpha,t,Selected variables\n";
    for (const auto& row : rows) {
        os << row.algorithm << ',' << fmt5(row.result.rmse) << ','
           << shrinkage_text(row.result) << ',' << fmt5(row.result.chosen_alpha) << ','
           << fmt5(row.result.chosen_t) << ',' << row.result.n_selected << '\n';
    }
}

nlohmann::json result_to_json(const EvaluationResult& r) {
    nlohmann::json j;
    j["rmse"] = r.rmse;
    j["alpha"] = r.chosen_alpha;
    if (r.chosen_shrinkage)
        j["shrinkage"] = *r.chosen_shrinkage;
    else
        j["shrinkage"] = nullptr;
    j["t"] = r.chosen_t;
    j["selected"] = r.n_selected;
    return j;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);  // '\n' endings on every platform
    if (!os) throw IoError("cannot open for writing: " + path);
    return os;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

TabularDataset load_csv(const std::string& path, const std::string& response_column,
                        char delimiter) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || line.empty()) throw EmptyFile("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_line(line, delimiter);

    int response_idx = -1;
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == response_column) response_idx = static_cast<int>(j);
    if (response_idx < 0)
        throw MissingColumn("response column '" + response_column + "' not in " + path);

    std::vector<std::vector<double>> rows;
    int row_number = 1;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row_number;
        const std::vector<std::string> cells = split_line(line, delimiter);
        if (cells.size() != header.size())
            throw GlarsError("row " + std::to_string(row_number) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        std::vector<double> parsed(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            parsed[j] = parse_cell(cells[j], row_number, static_cast<int>(j));
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) throw EmptyFile("no data rows in " + path);

    TabularDataset ds;
    ds.response_name = response_column;
    ds.provenance = path;
    const int n = static_cast<int>(rows.size());
    const int p = static_cast<int>(header.size()) - 1;
    ds.x_raw.resize(n, p);
    ds.y_raw.resize(n);
    for (std::size_t j = 0; j < header.size(); ++j)
        if (static_cast<int>(j) != response_idx) ds.column_names.push_back(header[j]);
    for (int i = 0; i < n; ++i) {
        int jj = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (static_cast<int>(j) == response_idx)
                ds.y_raw[i] = rows[i][j];
            else
                ds.x_raw(i, jj++) = rows[i][j];
        }
    }
    return ds;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        for (std::streamsize i = 0; i < is.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!is) break;
    }
    return h;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("GLARS_DATA_DIR")) return env;
#ifdef GLARS_DATA_DIR
    return GLARS_DATA_DIR;
#else
    return "data";
#endif
}

ProstateSplit load_prostate(std::optional<std::uint64_t> split_seed,
                            const std::string& data_dir) {
    const std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
    const std::string csv = join_path(dir, "prostate.csv");
    const std::string split_csv = join_path(dir, "prostate_split.csv");
    if (fnv1a64_file(csv) != kProstateCsvChecksum)
        throw CorruptBundle("checksum mismatch for " + csv);
    if (fnv1a64_file(split_csv) != kProstateSplitChecksum)
        throw CorruptBundle("checksum mismatch for " + split_csv);

    TabularDataset full = load_csv(csv, "lpsa");
    full.provenance = "Stamey et al. (1989) prostate data, bundled copy";
    if (full.n() != 97 || full.p() != 8)
        throw CorruptBundle("unexpected prostate dimensions");

    std::vector<bool> in_train(97, false);
    if (split_seed) {
        std::vector<int> order(97);
        for (int i = 0; i < 97; ++i) order[i] = i;
        Rng rng(*split_seed);
        for (int i = 96; i > 0; --i) {
            const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[i], order[j]);
        }
        for (int i = 0; i < 67; ++i) in_train[order[i]] = true;
    } else {
        std::ifstream is(split_csv);
        std::string line;
        std::getline(is, line);  // header
        int i = 0;
        while (std::getline(is, line) && i < 97) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            in_train[i++] = (line == "1");
        }
        if (i != 97) throw CorruptBundle("split indicator has wrong row count");
    }

    auto subset = [&](bool want_train) {
        TabularDataset ds;
        ds.column_names = full.column_names;
        ds.response_name = full.response_name;
        ds.provenance = full.provenance;
        const int rows = static_cast<int>(
            std::count(in_train.begin(), in_train.end(), want_train));
        ds.x_raw.resize(rows, full.p());
        ds.y_raw.resize(rows);
        int r = 0;
        for (int i = 0; i < 97; ++i) {
            if (in_train[i] != want_train) continue;
            ds.x_raw.row(r) = full.x_raw.row(i);
            ds.y_raw[r] = full.y_raw[i];
            ++r;
        }
        return ds;
    };

    ProstateSplit out;
    out.train = subset(true);
    out.test = subset(false);
    out.full = std::move(full);
    return out;
}

Diagnostics diagnostics(const TabularDataset& dataset) {
    const int n = dataset.n();
    const int p = dataset.p();
    if (n < 3 || p < 1) throw TooFewRows("diagnostics need n >= 3 and p >= 1");
    Diagnostics out;
    out.vif.resize(p);
    for (int j = 0; j < p; ++j) {
        Matrix others(n, p);  // intercept + remaining predictors
        others.col(0).setOnes();
        int c = 1;
        for (int l = 0; l < p; ++l)
            if (l != j) others.col(c++) = dataset.x_raw.col(l);
        const Vector target = dataset.x_raw.col(j);
        const Vector coef = others.colPivHouseholderQr().solve(target);
        const double ss_res = (target - others * coef).squaredNorm();
        const double ss_tot = (target.array() - target.mean()).square().sum();
        if (ss_tot <= 0.0) throw ConstantColumn(j);
        const double r2 = 1.0 - ss_res / ss_tot;
        out.vif[j] = (r2 >= 1.0 - 1e-12) ? std::numeric_limits<double>::infinity()
                                         : 1.0 / (1.0 - r2);
    }

    Matrix z(n, p);
    for (int j = 0; j < p; ++j) {
        const Vector centered =
            dataset.x_raw.col(j).array() - dataset.x_raw.col(j).mean();
        const double sd = std::sqrt(centered.squaredNorm() / n);
        if (sd <= 1e-12) throw ConstantColumn(j);
        z.col(j) = centered / sd;
    }
    const auto sv_ratio = [](const Matrix& m) {
        Eigen::JacobiSVD<Matrix> svd(m);
        const auto& s = svd.singularValues();
        const double smin = s[s.size() - 1];
        return smin > 0.0 ? s[0] / smin : std::numeric_limits<double>::infinity();
    };
    out.condition_number = sv_ratio(z);
    out.condition_number_raw = sv_ratio(dataset.x_raw);
    return out;
}

ReportFiles write_report(const SimulationReport& report, ReportFormat format,
                         const std::string& out_dir, const std::string& prefix) {
    std::filesystem::create_directories(out_dir);
    ReportFiles files;

    if (format != ReportFormat::Json) {
        const std::string medians = join_path(out_dir, prefix + "_medians.csv");
        {
            std::ofstream os = open_out(medians);
            std::vector<ReportRow> rows;
            for (const auto& algo : report.algorithms) {
                EvaluationResult median = algo.median_point;
                median.rmse = algo.median_rmse;
                rows.push_back({algo.name, median});
            }
            write_table_csv(os, rows);
        }
        files.written.push_back(medians);

        const std::string reps = join_path(out_dir, prefix + "_replicates.csv");
        {
            std::ofstream os = open_out(reps);
            os << "algorithm,replicate,rmse\n";
            for (const auto& algo : report.algorithms)
                for (std::size_t r = 0; r < algo.replicates.size(); ++r)
                    os << algo.name << ',' << r << ',' << fmt5(algo.replicates[r].rmse)
                       << '\n';
        }
        files.written.push_back(reps);
    }

    if (format != ReportFormat::Csv) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["config"] = {{"n_total", report.config.n_total},
                       {"n_train", report.config.n_train},
                       {"predictors", report.config.m},
                       {"rho", report.config.rho_collinearity},
                       {"sigma", report.config.sigma},
                       {"replicates", report.config.n_replicates},
                       {"seed", report.config.seed}};
        j["failed_replicates"] = report.failed_replicates;
        j["algorithms"] = nlohmann::json::array();
        for (const auto& algo : report.algorithms) {
            nlohmann::json a;
            a["name"] = algo.name;
            a["median_rmse"] = algo.median_rmse;
            a["median_point"] = result_to_json(algo.median_point);
            a["replicates"] = nlohmann::json::array();
            for (const auto& r : algo.replicates)
                a["replicates"].push_back(result_to_json(r));
            j["algorithms"].push_back(std::move(a));
        }
        const std::string jpath = join_path(out_dir, prefix + ".json");
        std::ofstream os = open_out(jpath);
        os << j.dump(2) << '\n';
        files.written.push_back(jpath);
    }
    return files;
}

ReportFiles write_evaluation_table(const std::vector<ReportRow>& rows,
                                   ReportFormat format, const std::string& out_dir,
                                   const std::string& prefix) {
    std::filesystem::create_directories(out_dir);
    ReportFiles files;
    if (format != ReportFormat::Json) {
        const std::string path = join_path(out_dir, prefix + "_medians.csv");
        std::ofstream os = open_out(path);
        write_table_csv(os, rows);
        files.written.push_back(path);
    }
    if (format != ReportFormat::Csv) {
        nlohmann::json j;
        j["schema_version"] = 1;
        j["algorithms"] = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json a;
            a["name"] = row.algorithm;
            a["result"] = result_to_json(row.result);
            j["algorithms"].push_back(std::move(a));
        }
        const std::string path = join_path(out_dir, prefix + ".json");
        std::ofstream os = open_out(path);
        os << j.dump(2) << '\n';
        files.written.push_back(path);
    }
    return files;
}

std::string write_boxplot_svg(const SimulationReport& report, const std::string& out_dir,
                              const std::string& prefix) {
    std::filesystem::create_directories(out_dir);
    const int k = static_cast<int>(report.algorithms.size());
    const double width = 120.0 * k + 80.0;
    const double height = 420.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::vector<std::vector<double>> data(k);
    for (int a = 0; a < k; ++a) {
        for (const auto& r : report.algorithms[a].replicates)
            data[a].push_back(r.rmse);
        std::sort(data[a].begin(), data[a].end());
        if (!data[a].empty()) {
            lo = std::min(lo, data[a].front());
            hi = std::max(hi, data[a].back());
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    lo -= pad;
    hi += pad;
    const auto ypix = [&](double v) { return 20.0 + (hi - v) / (hi - lo) * 360.0; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    for (int a = 0; a < k; ++a) {
        if (data[a].empty()) continue;
        const double cx = 80.0 + 120.0 * a + 40.0;
        const double q1 = quantile_sorted(data[a], 0.25);
        const double q2 = quantile_sorted(data[a], 0.50);
        const double q3 = quantile_sorted(data[a], 0.75);
        const double iqr = q3 - q1;
        double wlo = q1, whi = q3;
        for (double v : data[a]) {
            if (v >= q1 - 1.5 * iqr) {
                wlo = v;
                break;
            }
        }
        for (auto it = data[a].rbegin(); it != data[a].rend(); ++it) {
            if (*it <= q3 + 1.5 * iqr) {
                whi = *it;
                break;
            }
        }
        svg << "<line x1=\"" << cx << "\" y1=\"" << ypix(wlo) << "\" x2=\"" << cx
            << "\" y2=\"" << ypix(whi) << "\" stroke=\"black\"/>\n";
        svg << "<rect x=\"" << cx - 30 << "\" y=\"" << ypix(q3) << "\" width=\"60\" height=\""
            << ypix(q1) - ypix(q3) << "\" fill=\"none\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << cx - 30 << "\" y1=\"" << ypix(q2) << "\" x2=\"" << cx + 30
            << "\" y2=\"" << ypix(q2) << "\" stroke=\"black\"/>\n";
        for (double v : data[a])
            if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr)
                svg << "<circle cx=\"" << cx << "\" cy=\"" << ypix(v)
                    << "\" r=\"2\" fill=\"black\"/>\n";
        svg << "<text x=\"" << cx << "\" y=\"" << height - 6
            << "\" text-anchor=\"middle\" font-size=\"11\">"
            << report.algorithms[a].name << "</text>\n";
    }
    svg << "</svg>\n";

    const std::string path = join_path(out_dir, prefix + "_boxplot.svg");
    std::ofstream os = open_out(path);
    os << svg.str();
    return path;
}

}  // namespace glars

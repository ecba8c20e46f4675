// Command-line surface for the adaptive GLARS solver: fit a path, hold-out
// cross-validate, run the Monte Carlo study, run the prostate benchmark, and
// print collinearity diagnostics. Exit codes: 0 success, 2 usage/input error,
// 3 computational failure.
#include <CLI11.hpp>

#include "glars/data_io.hpp"
#include "glars/model_selection.hpp"
#include "glars/path.hpp"
#include "glars/simulation.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace glars;

constexpr int kExitUsage = 2;
constexpr int kExitCompute = 3;

std::vector<EstimatorKind> resolve_estimators(const std::string& name) {
    if (name == "all") {
        return {EstimatorKind::Olse, EstimatorKind::Re,  EstimatorKind::Aure,
                EstimatorKind::Le,   EstimatorKind::Aule, EstimatorKind::Pcre,
                EstimatorKind::Rk,   EstimatorKind::Rd};
    }
    if (auto kind = estimator_from_name(name)) return {*kind};
    throw CLI::ValidationError("--estimator", "unknown estimator '" + name +
                                                  "' (see --help for the 8 names)");
}

struct GridFlags {
    std::vector<double> alphas;
    std::vector<double> ks;
    std::vector<double> ds;
    std::optional<int> h;
    std::optional<double> h_threshold;
};

EstimatorSpec base_spec(EstimatorKind kind, const GridFlags& flags) {
    EstimatorSpec spec;
    spec.kind = kind;
    if (flags.h)
        spec.h_rule = HRule::count(*flags.h);
    else if (flags.h_threshold)
        spec.h_rule = HRule::share(*flags.h_threshold);
    return spec;
}

SearchGrid grid_for(EstimatorKind kind, const GridFlags& flags) {
    SearchGrid grid = default_grid(kind);
    if (!flags.alphas.empty()) grid.alphas = flags.alphas;
    EstimatorSpec probe;
    probe.kind = kind;
    if (probe.uses_k() && !flags.ks.empty()) grid.shrinkages = flags.ks;
    if (probe.uses_d() && !flags.ds.empty()) grid.shrinkages = flags.ds;
    return grid;
}

ReportFormat parse_format(const std::string& fmt) {
    if (fmt == "csv") return ReportFormat::Csv;
    if (fmt == "json") return ReportFormat::Json;
    return ReportFormat::Both;
}

std::string fmt5(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(5) << v;
    return ss.str();
}

const char* event_name(PathEventKind k) {
    switch (k) {
        case PathEventKind::Enter: return "enter";
        case PathEventKind::Drop: return "drop";
        case PathEventKind::Terminal: return "terminal";
    }
    return "?";
}

void dump_path(const CoefficientPath& path, const std::vector<std::string>& names,
               const std::string& out_dir, const std::string& prefix) {
    std::filesystem::create_directories(out_dir);
    const auto ppath = std::filesystem::path(out_dir) / (prefix + "_path.csv");
    std::ofstream os(ppath, std::ios::binary);
    if (!os) throw IoError("cannot write " + ppath.string());
    os << "step,event,variable,rho,t,nonzero_coefficients\n";
    for (const auto& step : path.steps) {
        os << step.step_index << ',' << event_name(step.event.kind) << ',';
        if (step.event.variable >= 0)
            os << names[step.event.variable];
        os << ',' << fmt5(step.rho) << ',' << fmt5(step.t_weighted) << ',';
        const Vector beta_adp = step.beta_scaled.cwiseQuotient(path.weights.w);
        bool first = true;
        for (int j = 0; j < beta_adp.size(); ++j) {
            if (beta_adp[j] == 0.0) continue;
            if (!first) os << ' ';
            os << names[j] << '=' << fmt5(beta_adp[j]);
            first = false;
        }
        os << '\n';
    }

    const auto cpath = std::filesystem::path(out_dir) / (prefix + "_coefficients.csv");
    std::ofstream cs(cpath, std::ios::binary);
    if (!cs) throw IoError("cannot write " + cpath.string());
    cs << "variable,coefficient_adaptive,coefficient_original\n";
    cs << "(intercept)," << fmt5(path.standardization.y_mean) << ','
       << fmt5(path.intercept) << '\n';
    for (int j = 0; j < path.final_beta_adaptive.size(); ++j)
        cs << names[j] << ',' << fmt5(path.final_beta_adaptive[j]) << ','
           << fmt5(path.final_beta_original[j]) << '\n';
    std::cout << "wrote " << ppath.string() << " and " << cpath.string() << "\n";
}

SplitData fraction_split(const TabularDataset& ds, double train_frac,
                         std::uint64_t seed) {
    const int n = ds.n();
    const int n_train = std::max(2, static_cast<int>(train_frac * n));
    if (n_train >= n) throw GlarsError("train fraction leaves no test rows");
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }
    SplitData split;
    split.x_train.resize(n_train, ds.p());
    split.y_train.resize(n_train);
    split.x_test.resize(n - n_train, ds.p());
    split.y_test.resize(n - n_train);
    for (int i = 0; i < n; ++i) {
        if (i < n_train) {
            split.x_train.row(i) = ds.x_raw.row(order[i]);
            split.y_train[i] = ds.y_raw[order[i]];
        } else {
            split.x_test.row(i - n_train) = ds.x_raw.row(order[i]);
            split.y_test[i - n_train] = ds.y_raw[order[i]];
        }
    }
    return split;
}

std::vector<ReportRow> evaluate_all(const SplitData& split,
                                    const std::vector<EstimatorKind>& kinds,
                                    const GridFlags& flags,
                                    const SelectionProtocol& protocol) {
    std::vector<ReportRow> rows;
    for (EstimatorKind kind : kinds) {
        const EvaluationResult r = select_and_evaluate(
            split, base_spec(kind, flags), grid_for(kind, flags), protocol, true);
        rows.push_back({estimator_name(kind), r});
    }
    return rows;
}

SelectionProtocol protocol_from_name(const std::string& name) {
    SelectionProtocol p;
    p.mode = name == "best-on-test" ? SelectionProtocol::Mode::BestOnTest
                                    : SelectionProtocol::Mode::CvOnTrain;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive GLARS regularization paths, cross-validation, and "
                 "the Monte Carlo benchmark suite"};
    app.set_help_flag("--help", "print usage");  // frees --h for the component count
    app.fallthrough();  // shared flags may follow the subcommand
    app.require_subcommand(1);

    std::string input, response = "y", estimator = "all", out_dir = "out";
    std::string format = "both";
    GridFlags flags;
    std::uint64_t seed = 20240901;
    double train_frac = 0.7;      // cv subcommand
    double sim_train_frac = 0.5;  // simulate: the study's 50/50 split
    double sigma = 0.35;
    int replicates = 50;
    std::vector<double> rhos{0.5, 0.7, 0.9};
    double fit_alpha = 1.0, fit_k = 0.5, fit_d = 0.5;
    std::string selection = "cv";
    bool emit_svg = false;
    bool use_seed_split = false;

    app.add_option("--estimator", estimator,
                   "adpLARS-LASSO|adpLARS-EN|adpLARS-AURE|adpLARS-LE|adpLARS-AULE|"
                   "adpLARS-PCRE|adpLARS-rk|adpLARS-rd|all");
    app.add_option("--alpha-grid", flags.alphas, "adaptive-weight exponents to search");
    app.add_option("--k-grid", flags.ks, "ridge shrinkage values to search");
    app.add_option("--d-grid", flags.ds, "Liu shrinkage values to search");
    app.add_option("--h", flags.h, "explicit principal-component count");
    app.add_option("--h-threshold", flags.h_threshold,
                   "cumulative eigenvalue share for h (default 0.995)");
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_option("--selection", selection,
                   "hyperparameter choice: cv (K-fold on train) or best-on-test")
        ->check(CLI::IsMember({"cv", "best-on-test"}));

    auto* fit = app.add_subcommand("fit", "trace one adaptive GLARS path on a CSV");
    fit->add_option("--input", input, "input CSV")->required();
    fit->add_option("--response", response, "response column name")->required();
    fit->add_option("--alpha", fit_alpha, "adaptive-weight exponent");
    fit->add_option("--k", fit_k, "ridge shrinkage");
    fit->add_option("--d", fit_d, "Liu shrinkage");

    auto* cv = app.add_subcommand("cv", "two-dimensional cross-validation on a CSV");
    cv->add_option("--input", input, "input CSV")->required();
    cv->add_option("--response", response, "response column name")->required();
    cv->add_option("--train-frac", train_frac, "training fraction of rows");

    auto* sim = app.add_subcommand("simulate", "run the Monte Carlo study");
    sim->add_option("--rho", rhos, "collinearity levels");
    sim->add_option("--replicates", replicates, "number of replicates");
    sim->add_option("--sigma", sigma, "error standard deviation");
    sim->add_option("--train-frac", sim_train_frac, "training fraction (default 0.5)");
    sim->add_flag("--svg", emit_svg, "also write box-plot SVGs");

    auto* pros = app.add_subcommand("prostate", "run the prostate benchmark");
    pros->add_flag("--seeded-split", use_seed_split,
                   "use a seeded 67/30 shuffle instead of the canonical indicator");

    auto* diag = app.add_subcommand("diagnostics", "VIF and condition numbers");
    diag->add_option("--input", input, "input CSV (default: bundled prostate data)");
    diag->add_option("--response", response, "response column name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const std::vector<EstimatorKind> kinds = resolve_estimators(estimator);
        const ReportFormat rformat = parse_format(format);

        if (fit->parsed()) {
            if (kinds.size() != 1) {
                std::cerr << "fit needs a single --estimator, not 'all'\n";
                return kExitUsage;
            }
            TabularDataset ds;
            try {
                ds = load_csv(input, response);
            } catch (const GlarsError& e) {
                std::cerr << "input error: " << e.what() << "\n";
                return kExitUsage;
            }
            EstimatorSpec spec = base_spec(kinds[0], flags);
            spec.k = fit_k;
            spec.d = fit_d;
            const StandardizedDataset std_data = standardize(ds.x_raw, ds.y_raw);
            const CoefficientPath path = run_path(std_data, spec, fit_alpha);
            if (path.hit_step_limit)
                std::cerr << "warning: step limit reached, path is partial\n";
            dump_path(path, ds.column_names, out_dir, "fit");
            return 0;
        }

        if (cv->parsed()) {
            TabularDataset ds;
            try {
                ds = load_csv(input, response);
            } catch (const GlarsError& e) {
                std::cerr << "input error: " << e.what() << "\n";
                return kExitUsage;
            }
            const SplitData split = fraction_split(ds, train_frac, seed);
            const auto rows = evaluate_all(split, kinds, flags, protocol_from_name(selection));
            const auto files = write_evaluation_table(rows, rformat, out_dir, "cv");
            for (const auto& f : files.written) std::cout << "wrote " << f << "\n";
            return 0;
        }

        if (sim->parsed()) {
            for (double rho : rhos) {
                SimulationConfig config;
                config.rho_collinearity = rho;
                config.sigma = sigma;
                config.n_replicates = replicates;
                config.seed = seed;
                config.n_train =
                    std::max(2, static_cast<int>(sim_train_frac * config.n_total));
                std::vector<EstimatorSpec> specs;
                std::vector<SearchGrid> grids;
                for (EstimatorKind kind : kinds) {
                    specs.push_back(base_spec(kind, flags));
                    grids.push_back(grid_for(kind, flags));
                }
                const SimulationReport report = run_replications_parallel(
                    config, specs, grids, protocol_from_name(selection));
                if (report.failed_replicates > 0) {
                    std::cerr << report.failed_replicates
                              << " replicate(s) failed at rho=" << rho << "\n";
                    for (const auto& m : report.failure_messages)
                        std::cerr << "  " << m << "\n";
                    return kExitCompute;
                }
                std::ostringstream prefix;
                prefix << "sim_rho" << std::fixed << std::setprecision(2) << rho;
                const auto files = write_report(report, rformat, out_dir, prefix.str());
                for (const auto& f : files.written) std::cout << "wrote " << f << "\n";
                if (emit_svg)
                    std::cout << "wrote "
                              << write_boxplot_svg(report, out_dir, prefix.str()) << "\n";
            }
            return 0;
        }

        if (pros->parsed()) {
            const ProstateSplit data = use_seed_split ? load_prostate(seed)
                                                      : load_prostate();
            SplitData split{data.train.x_raw, data.train.y_raw, data.test.x_raw,
                            data.test.y_raw};
            const auto rows = evaluate_all(split, kinds, flags, protocol_from_name(selection));
            const auto files = write_evaluation_table(rows, rformat, out_dir, "prostate");
            for (const auto& f : files.written) std::cout << "wrote " << f << "\n";
            return 0;
        }

        if (diag->parsed()) {
            TabularDataset ds;
            if (input.empty()) {
                ds = load_prostate().full;
            } else {
                try {
                    ds = load_csv(input, response);
                } catch (const GlarsError& e) {
                    std::cerr << "input error: " << e.what() << "\n";
                    return kExitUsage;
                }
            }
            const Diagnostics d = diagnostics(ds);
            std::cout << "variable,vif\n";
            for (int j = 0; j < d.vif.size(); ++j)
                std::cout << ds.column_names[j] << ',' << fmt5(d.vif[j]) << "\n";
            std::cout << "condition_number_standardized," << fmt5(d.condition_number)
                      << "\n";
            std::cout << "condition_number_raw_columns," << fmt5(d.condition_number_raw)
                      << "\n";
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return 0;
}

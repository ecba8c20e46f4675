#pragma once

#include "glars/simulation.hpp"
#include "glars/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glars {

struct TabularDataset {
    std::vector<std::string> column_names;  // predictors only
    Matrix x_raw;
    Vector y_raw;
    std::string response_name;
    std::string provenance;
    int n() const { return static_cast<int>(x_raw.rows()); }
    int p() const { return static_cast<int>(x_raw.cols()); }
};

TabularDataset load_csv(const std::string& path, const std::string& response_column,
                        char delimiter = ',');

struct ProstateSplit {
    TabularDataset train;  // 67 rows on the canonical indicator
    TabularDataset test;   // 30 rows
    TabularDataset full;
};

/// Bundled Stamey et al. prostate data. With no seed the canonical train/test
/// indicator shipped beside the CSV is used; a seed draws a deterministic
/// 67/30 shuffle instead. File checksums gate against a damaged bundle.
ProstateSplit load_prostate(std::optional<std::uint64_t> split_seed = std::nullopt,
                            const std::string& data_dir = "");

struct Diagnostics {
    Vector vif;                          // +inf marks perfect collinearity
    double condition_number = 1.0;       // singular-value ratio of standardized X
    double condition_number_raw = 1.0;   // same ratio on the raw columns (the
                                         // convention matching the literature's 243)
};

Diagnostics diagnostics(const TabularDataset& dataset);

/// One row of the paper-style result tables (Tables 2-5 column order).
struct ReportRow {
    std::string algorithm;
    EvaluationResult result;
};

struct ReportFiles {
    std::vector<std::string> written;
};

enum class ReportFormat { Csv, Json, Both };

/// Writes <prefix>_medians.csv (+ <prefix>_replicates.csv when replicate data
/// exists) and/or <prefix>.json under out_dir. Table numbers are printed with
/// 5 decimals; JSON keeps full precision.
ReportFiles write_report(const SimulationReport& report, ReportFormat format,
                         const std::string& out_dir, const std::string& prefix);

ReportFiles write_evaluation_table(const std::vector<ReportRow>& rows,
                                   ReportFormat format, const std::string& out_dir,
                                   const std::string& prefix);

/// Minimal SVG box plot (Tukey 1.5*IQR whiskers) of per-algorithm rmse values.
std::string write_boxplot_svg(const SimulationReport& report, const std::string& out_dir,
                              const std::string& prefix);

std::uint64_t fnv1a64_file(const std::string& path);

/// Directory holding the bundled data (compile-time default, overridable via
/// the GLARS_DATA_DIR environment variable).
std::string default_data_dir();

}  // namespace glars

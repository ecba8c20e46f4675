#pragma once

#include "glars/path.hpp"
#include "glars/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace glars {

/// Root mean squared prediction error on held-out raw-scale data.
double rmse(const Vector& beta, double intercept, const Matrix& x_new,
            const Vector& y_new);

/// How the path point t is chosen: a fixed weighted-L1 budget, or the best
/// candidate (breakpoints plus segment midpoints) on the evaluation data.
struct FixedT {
    double t = 0.0;
};
struct BestOnTest {};
using TRule = std::variant<FixedT, BestOnTest>;

struct EvaluationResult {
    double rmse = 0.0;
    double chosen_alpha = 1.0;
    std::optional<double> chosen_shrinkage;  // k or d; empty for OLSE/PCRE
    double chosen_t = 0.0;
    int n_selected = 0;
    EstimatorSpec estimator;
};

struct SplitData {
    Matrix x_train;
    Vector y_train;
    Matrix x_test;
    Vector y_test;
};

/// Fits the path on the training half (test data standardized implicitly via
/// original-scale coefficients) and reports hold-out RMSE at the chosen t.
EvaluationResult holdout_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                  double alpha, const TRule& t_rule);

struct SearchGrid {
    std::vector<double> alphas;
    std::vector<double> shrinkages;  // k or d values; empty for OLSE/PCRE
    TRule t_rule = BestOnTest{};
};

/// The paper's default two-dimensional grid for a given estimator kind:
/// alpha in {0.1,...,1.0}; k in {0.1,...,1.0}; d in {0.1,...,0.9,0.99}.
SearchGrid default_grid(EstimatorKind kind);

/// Exhaustive search over alphas x shrinkages x t candidates; ties broken by
/// smaller alpha, then smaller shrinkage, then smaller t.
EvaluationResult grid_search_cv(const SplitData& data, const EstimatorSpec& spec,
                                const SearchGrid& grid);

/// OpenMP-parallel variant; bitwise-identical result to grid_search_cv.
EvaluationResult grid_search_cv_parallel(const SplitData& data, const EstimatorSpec& spec,
                                         const SearchGrid& grid);

/// The paper's two-dimensional cross-validation: K-fold CV on the training
/// half chooses (alpha, shrinkage, t as a fraction of the terminal weighted L1
/// norm); the hold-out RMSE is then reported at the chosen point. Folds are
/// assigned round-robin by row index so the protocol is deterministic.
struct CvProtocol {
    int n_folds = 5;
    int n_fractions = 21;  // t/t_max in {0, 1/20, ..., 1}
};

EvaluationResult cv_select_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                    const SearchGrid& grid, const CvProtocol& protocol);

/// OpenMP-parallel variant of cv_select_evaluate (parallel over grid pairs).
EvaluationResult cv_select_evaluate_parallel(const SplitData& data,
                                             const EstimatorSpec& spec,
                                             const SearchGrid& grid,
                                             const CvProtocol& protocol);

/// How hyperparameters are chosen for a train/test evaluation: the paper's
/// protocol (CV on the training half, default) or the exhaustive
/// minimize-on-test search.
struct SelectionProtocol {
    enum class Mode { CvOnTrain, BestOnTest };
    Mode mode = Mode::CvOnTrain;
    CvProtocol cv{};
};

EvaluationResult select_and_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                     const SearchGrid& grid,
                                     const SelectionProtocol& protocol,
                                     bool parallel = false);

/// Thread cap honoring the GLARS_THREADS environment variable.
int effective_thread_count();

}  // namespace glars

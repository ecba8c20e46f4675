#pragma once

#include "glars/estimators.hpp"
#include "glars/types.hpp"

#include <vector>

namespace glars {

/// Predictors scaled to mean 0, sd 1 (population sd, so each scaled column has
/// squared norm n) and the response centered; the statistics needed to undo
/// the transform are kept.
struct StandardizedDataset {
    Matrix x_std;        // n x p
    Vector y_centered;   // n
    Vector col_means;    // p
    Vector col_sds;      // p, all > 0
    double y_mean = 0.0;
    int n = 0;
    int p = 0;
};

StandardizedDataset standardize(const Matrix& x_raw, const Vector& y_raw);

/// w_j = max(|beta_G,j|, clamp_floor)^(-alpha), beta_G from the full-model
/// transform on the standardized data.
struct AdaptiveWeights {
    Vector w;
    double alpha = 1.0;
    double clamp_floor = 1e-8;
    EstimatorSpec source_spec;
};

AdaptiveWeights compute_weights(const StandardizedDataset& std_data,
                                const EstimatorSpec& spec, double alpha);

/// Column rescaling X~_j = X_j / w_j.
Matrix scale_columns(const StandardizedDataset& std_data, const AdaptiveWeights& weights);

/// Selected variable indices in entry order (the columns of E_i).
struct ActiveSet {
    std::vector<int> indices;
    int size() const { return static_cast<int>(indices.size()); }
    bool contains(int j) const;
};

enum class PathEventKind { Enter, Drop, Terminal };

struct PathEvent {
    PathEventKind kind = PathEventKind::Terminal;
    int variable = -1;  // meaningful for Enter/Drop
};

/// One breakpoint of the piecewise-linear path. `rho` is the fraction of the
/// incoming segment that was taken before the event fired (1 on the terminal
/// segment, and by convention on the zero-length initial entry). `active` is
/// the set after applying the event; `beta_scaled` lives in the
/// weighted/standardized problem; `t_weighted` is its plain L1 norm, which
/// equals sum_j |w_j * beta_adaptive_j|.
struct PathStep {
    int step_index = 0;
    ActiveSet active;
    Vector beta_scaled;
    double rho = 1.0;
    Vector direction;
    PathEvent event;
    double t_weighted = 0.0;
};

struct StandardizationSummary {
    Vector col_means;
    Vector col_sds;
    double y_mean = 0.0;
    int n = 0;
    int p = 0;
};

struct CoefficientPath {
    std::vector<PathStep> steps;
    AdaptiveWeights weights;
    StandardizationSummary standardization;
    Vector final_beta_adaptive;   // beta_scaled / w, standardized predictor scale
    Vector final_beta_original;   // raw data scale
    double intercept = 0.0;       // raw data scale
    bool hit_step_limit = false;  // 8p safety cap reached (partial path)
};

/// Direction u = G_E (E'X~'X~E)^-1 E'X~'r; supported on the active set.
Vector compute_direction(const Matrix& x_scaled, const Vector& residual,
                         const ActiveSet& active, const EstimatorSpec& spec);

struct StepResult {
    double rho = 1.0;
    PathEvent event;
};

/// The smallest candidate in (0,1] among the enter candidates
/// (C -+ c_j)/(C -+ a_j) over inactive j and the drop candidates -beta_j/u_j
/// over active j with nonzero coefficient; Terminal with rho = 1 when no
/// candidate interrupts the segment. `max_active` suppresses enter candidates
/// once the active set is full (pass p+1 or less to disable).
StepResult step_length(const Matrix& x_scaled, const Vector& residual,
                       const ActiveSet& active, const Vector& direction,
                       const Vector& beta_current, int max_active);

/// Algorithm steps 1-5 end to end on an already-standardized dataset.
CoefficientPath run_path(const StandardizedDataset& std_data, const EstimatorSpec& spec,
                         double alpha);

/// Coefficients (adaptive scale) at weighted L1 norm `t_target`, by linear
/// interpolation between the bracketing breakpoints.
Vector coefficients_at(const CoefficientPath& path, double t_target);

/// Raw-scale coefficients and intercept for a point on the path.
struct OriginalScaleFit {
    Vector beta;
    double intercept = 0.0;
};
OriginalScaleFit to_original_scale(const CoefficientPath& path, const Vector& beta_adaptive);

}  // namespace glars

#include "glars/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace glars {

namespace {

constexpr double kSdFloor = 1e-12;
constexpr double kCandidateEps = 1e-12;  // candidates must exceed this
constexpr double kTieTol = 1e-12;        // equal-rho tie window
constexpr double kClampFloor = 1e-8;

int argmax_abs_with_ties(const Vector& v) {
    double best = -1.0;
    for (int j = 0; j < v.size(); ++j) best = std::max(best, std::abs(v[j]));
    for (int j = 0; j < v.size(); ++j)
        if (std::abs(v[j]) >= best - kTieTol) return j;
    return 0;
}

}  // namespace

StandardizedDataset standardize(const Matrix& x_raw, const Vector& y_raw) {
    const int n = static_cast<int>(x_raw.rows());
    const int p = static_cast<int>(x_raw.cols());
    if (n < 2) throw TooFewRows("need at least 2 rows to standardize");
    if (y_raw.size() != n) throw DimensionMismatch("y length does not match X rows");

    StandardizedDataset out;
    out.n = n;
    out.p = p;
    out.col_means = x_raw.colwise().mean();
    out.col_sds.resize(p);
    out.x_std.resize(n, p);
    for (int j = 0; j < p; ++j) {
        const Vector centered = x_raw.col(j).array() - out.col_means[j];
        const double sd = std::sqrt(centered.squaredNorm() / n);  // population sd
        if (sd <= kSdFloor) throw ConstantColumn(j);
        out.col_sds[j] = sd;
        out.x_std.col(j) = centered / sd;
    }
    out.y_mean = y_raw.mean();
    out.y_centered = y_raw.array() - out.y_mean;
    return out;
}

AdaptiveWeights compute_weights(const StandardizedDataset& std_data,
                                const EstimatorSpec& spec, double alpha) {
    if (alpha <= 0.0) throw GlarsError("alpha must be positive");
    AdaptiveWeights out;
    out.alpha = alpha;
    out.clamp_floor = kClampFloor;
    out.source_spec = spec;
    const Vector beta_g = fit_biased(std_data.x_std, std_data.y_centered, spec);
    out.w.resize(beta_g.size());
    for (int j = 0; j < beta_g.size(); ++j)
        out.w[j] = std::pow(std::max(std::abs(beta_g[j]), kClampFloor), -alpha);
    return out;
}

Matrix scale_columns(const StandardizedDataset& std_data, const AdaptiveWeights& weights) {
    if (weights.w.size() != std_data.p)
        throw DimensionMismatch("weight vector length does not match p");
    Matrix x = std_data.x_std;
    for (int j = 0; j < std_data.p; ++j) x.col(j) /= weights.w[j];
    return x;
}

bool ActiveSet::contains(int j) const {
    return std::find(indices.begin(), indices.end(), j) != indices.end();
}

Vector compute_direction(const Matrix& x_scaled, const Vector& residual,
                         const ActiveSet& active, const EstimatorSpec& spec) {
    const int q = active.size();
    if (q < 1) throw DimensionMismatch("active set is empty");
    Matrix xa(x_scaled.rows(), q);
    for (int a = 0; a < q; ++a) xa.col(a) = x_scaled.col(active.indices[a]);
    const Matrix gram_active = xa.transpose() * xa;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_active);
    const double largest = eig.eigenvalues().maxCoeff();
    if (largest <= 0.0 || eig.eigenvalues().minCoeff() < 1e-10 * largest)
        throw SingularGram("active-set gram is numerically singular");

    const Vector c_active = xa.transpose() * residual;
    const Vector ls_dir = eig.eigenvectors() *
                          (eig.eigenvectors().transpose() * c_active).cwiseQuotient(
                              eig.eigenvalues());
    const Matrix core = restricted_transform_core(spec, gram_active);
    const Vector u_active = core * ls_dir;

    Vector u = Vector::Zero(x_scaled.cols());
    for (int a = 0; a < q; ++a) u[active.indices[a]] = u_active[a];
    return u;
}

StepResult step_length(const Matrix& x_scaled, const Vector& residual,
                       const ActiveSet& active, const Vector& direction,
                       const Vector& beta_current, int max_active) {
    const int p = static_cast<int>(x_scaled.cols());
    if (direction.cwiseAbs().maxCoeff() == 0.0)
        throw ZeroDirection("direction vector is zero");

    const Vector c = x_scaled.transpose() * residual;
    const Vector a = x_scaled.transpose() * (x_scaled * direction);

    double level = 0.0;  // C: largest |inner product| among active variables
    for (int j : active.indices) level = std::max(level, std::abs(c[j]));

    double best_rho = std::numeric_limits<double>::infinity();
    PathEvent best_event{PathEventKind::Terminal, -1};

    auto consider = [&](double rho, PathEventKind kind, int j) {
        if (!(rho > kCandidateEps) || rho > 1.0 + kTieTol) return;
        rho = std::min(rho, 1.0);
        if (rho < best_rho - kTieTol) {
            best_rho = rho;
            best_event = {kind, j};
        } else if (rho <= best_rho + kTieTol && j < best_event.variable) {
            best_rho = std::min(best_rho, rho);
            best_event = {kind, j};
        }
    };

    if (active.size() < max_active) {
        for (int j = 0; j < p; ++j) {
            if (active.contains(j)) continue;
            for (const double s : {1.0, -1.0}) {
                const double denom = level + s * a[j];
                if (std::abs(denom) < 1e-300) continue;
                consider((level + s * c[j]) / denom, PathEventKind::Enter, j);
            }
        }
    }
    for (int j : active.indices) {
        if (beta_current[j] == 0.0 || direction[j] == 0.0) continue;
        consider(-beta_current[j] / direction[j], PathEventKind::Drop, j);
    }

    if (!std::isfinite(best_rho) || best_rho >= 1.0 - kTieTol)
        return {1.0, {PathEventKind::Terminal, -1}};
    return {best_rho, best_event};
}

CoefficientPath run_path(const StandardizedDataset& std_data, const EstimatorSpec& spec,
                         double alpha) {
    spec.validate();
    const int n = std_data.n;
    const int p = std_data.p;
    const int max_active = std::min(n - 1, p);
    const int max_steps = 8 * p;

    CoefficientPath path;
    path.weights = compute_weights(std_data, spec, alpha);
    path.standardization = {std_data.col_means, std_data.col_sds, std_data.y_mean, n, p};

    const Matrix x = scale_columns(std_data, path.weights);
    Vector residual = std_data.y_centered;
    Vector beta = Vector::Zero(p);
    ActiveSet active;

    // Step 3/4: start at beta = 0, r_0 = y; the most-correlated variable
    // enters at the origin (a zero-length breakpoint).
    const int first = argmax_abs_with_ties(x.transpose() * residual);
    active.indices.push_back(first);
    path.steps.push_back({0, active, beta, 1.0, Vector::Zero(p),
                          {PathEventKind::Enter, first}, 0.0});

    for (int step = 1; step <= max_steps; ++step) {
        // An explicit component count cannot exceed the current active-set
        // size; keep every component until the set grows past it.
        EstimatorSpec step_spec = spec;
        if (step_spec.h_rule.explicit_h)
            step_spec.h_rule.explicit_h =
                std::min(*step_spec.h_rule.explicit_h, active.size());
        Vector u;
        try {
            u = compute_direction(x, residual, active, step_spec);
        } catch (const SingularGram&) {
            // the active columns have become numerically dependent (extreme
            // adaptive weights under heavy collinearity); stop where we stand
            path.steps.push_back({step, active, beta, 1.0, Vector::Zero(p),
                                  {PathEventKind::Terminal, -1},
                                  beta.cwiseAbs().sum()});
            break;
        }

        // A transform can annihilate the least-squares direction (the
        // principal-component family with small h); nothing can move, so the
        // path ends where it stands.
        const double c_scale = std::max(1.0, residual.cwiseAbs().maxCoeff());
        if (u.cwiseAbs().maxCoeff() <= 1e-14 * c_scale) {
            path.steps.push_back({step, active, beta, 1.0, u,
                                  {PathEventKind::Terminal, -1},
                                  beta.cwiseAbs().sum()});
            break;
        }

        const StepResult sr = step_length(x, residual, active, u, beta, max_active);
        beta += sr.rho * u;
        residual -= sr.rho * (x * u);

        if (sr.event.kind == PathEventKind::Drop) {
            beta[sr.event.variable] = 0.0;  // snap the sign change exactly
            auto& idx = active.indices;
            idx.erase(std::find(idx.begin(), idx.end(), sr.event.variable));
        } else if (sr.event.kind == PathEventKind::Enter) {
            active.indices.push_back(sr.event.variable);
        }

        path.steps.push_back({step, active, beta, sr.rho, u, sr.event,
                              beta.cwiseAbs().sum()});
        if (sr.event.kind == PathEventKind::Terminal) break;
        if (step == max_steps) path.hit_step_limit = true;
    }

    path.final_beta_adaptive = path.steps.back().beta_scaled.cwiseQuotient(path.weights.w);
    const OriginalScaleFit fit = to_original_scale(path, path.final_beta_adaptive);
    path.final_beta_original = fit.beta;
    path.intercept = fit.intercept;
    return path;
}

Vector coefficients_at(const CoefficientPath& path, double t_target) {
    if (path.steps.empty()) throw GlarsError("empty path");
    const double t_end = path.steps.back().t_weighted;
    if (t_target < -kTieTol || t_target > t_end + kTieTol)
        throw OutOfRange("t outside [0, terminal t]");
    t_target = std::clamp(t_target, 0.0, t_end);

    const auto& steps = path.steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (t_target == steps[i].t_weighted)
            return steps[i].beta_scaled.cwiseQuotient(path.weights.w);
        if (i + 1 == steps.size()) break;
        const double lo = steps[i].t_weighted;
        const double hi = steps[i + 1].t_weighted;
        const bool inside = (lo < hi) ? (t_target > lo && t_target < hi)
                                      : (t_target < lo && t_target > hi);
        if (inside) {
            const double s = (t_target - lo) / (hi - lo);
            const Vector beta =
                steps[i].beta_scaled + s * (steps[i + 1].beta_scaled - steps[i].beta_scaled);
            return beta.cwiseQuotient(path.weights.w);
        }
    }
    return steps.back().beta_scaled.cwiseQuotient(path.weights.w);
}

OriginalScaleFit to_original_scale(const CoefficientPath& path,
                                   const Vector& beta_adaptive) {
    OriginalScaleFit fit;
    fit.beta = beta_adaptive.cwiseQuotient(path.standardization.col_sds);
    fit.intercept =
        path.standardization.y_mean - fit.beta.dot(path.standardization.col_means);
    return fit;
}

}  // namespace glars

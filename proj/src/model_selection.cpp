#include "glars/model_selection.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace glars {

namespace {

constexpr double kSelectedTol = 1e-10;

int count_selected(const Vector& beta_original) {
    int n = 0;
    for (int j = 0; j < beta_original.size(); ++j)
        if (std::abs(beta_original[j]) > kSelectedTol) ++n;
    return n;
}

struct PathPoint {
    Vector beta_scaled;
    double t = 0.0;
};

// Breakpoints plus segment midpoints. Evaluated as points on the path rather
// than through a t lookup: t need not be monotone for the generalized
// transforms, but each breakpoint and each within-segment midpoint is still a
// well-defined solution.
std::vector<PathPoint> path_candidates(const CoefficientPath& path) {
    std::vector<PathPoint> out;
    out.reserve(2 * path.steps.size());
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        if (i > 0 && path.steps[i - 1].t_weighted != path.steps[i].t_weighted) {
            const Vector mid = 0.5 * (path.steps[i - 1].beta_scaled +
                                      path.steps[i].beta_scaled);
            out.push_back({mid, mid.cwiseAbs().sum()});
        }
        out.push_back({path.steps[i].beta_scaled, path.steps[i].t_weighted});
    }
    return out;
}

EvaluationResult evaluate_path_point(const CoefficientPath& path, const SplitData& data,
                                     const EstimatorSpec& spec, double alpha,
                                     const PathPoint& point) {
    const Vector beta_adaptive = point.beta_scaled.cwiseQuotient(path.weights.w);
    const OriginalScaleFit fit = to_original_scale(path, beta_adaptive);
    EvaluationResult r;
    r.rmse = rmse(fit.beta, fit.intercept, data.x_test, data.y_test);
    r.chosen_alpha = alpha;
    if (spec.uses_k())
        r.chosen_shrinkage = spec.k;
    else if (spec.uses_d())
        r.chosen_shrinkage = spec.d;
    r.chosen_t = point.t;
    r.n_selected = count_selected(fit.beta);
    r.estimator = spec;
    return r;
}

// rmse strictly smaller wins; exact ties fall back to smaller alpha, then
// smaller shrinkage, then smaller t.
bool better(const EvaluationResult& a, const EvaluationResult& b) {
    if (a.rmse != b.rmse) return a.rmse < b.rmse;
    if (a.chosen_alpha != b.chosen_alpha) return a.chosen_alpha < b.chosen_alpha;
    const double sa = a.chosen_shrinkage.value_or(0.0);
    const double sb = b.chosen_shrinkage.value_or(0.0);
    if (sa != sb) return sa < sb;
    return a.chosen_t < b.chosen_t;
}

std::vector<EstimatorSpec> expand_specs(const EstimatorSpec& base,
                                        const SearchGrid& grid) {
    std::vector<EstimatorSpec> specs;
    if (base.uses_k() || base.uses_d()) {
        if (grid.shrinkages.empty())
            throw EmptyGrid("estimator takes a shrinkage parameter but grid has none");
        for (double s : grid.shrinkages) {
            EstimatorSpec e = base;
            if (base.uses_k())
                e.k = s;
            else
                e.d = s;
            specs.push_back(e);
        }
    } else {
        specs.push_back(base);
    }
    return specs;
}

}  // namespace

double rmse(const Vector& beta, double intercept, const Matrix& x_new,
            const Vector& y_new) {
    if (x_new.rows() < 1) throw DimensionMismatch("no evaluation rows");
    if (x_new.cols() != beta.size() || y_new.size() != x_new.rows())
        throw DimensionMismatch("prediction dimensions do not match");
    const Vector resid = y_new - ((x_new * beta).array() + intercept).matrix();
    return std::sqrt(resid.squaredNorm() / static_cast<double>(x_new.rows()));
}

EvaluationResult holdout_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                  double alpha, const TRule& t_rule) {
    if (data.x_train.cols() != data.x_test.cols())
        throw DimensionMismatch("train/test predictor counts differ");
    const StandardizedDataset std_data = standardize(data.x_train, data.y_train);
    const CoefficientPath path = run_path(std_data, spec, alpha);

    if (const auto* fixed = std::get_if<FixedT>(&t_rule)) {
        const Vector beta = coefficients_at(path, fixed->t);
        return evaluate_path_point(
            path, data, spec, alpha,
            {beta.cwiseProduct(path.weights.w), fixed->t});
    }

    std::optional<EvaluationResult> best;
    for (const PathPoint& point : path_candidates(path)) {
        EvaluationResult r = evaluate_path_point(path, data, spec, alpha, point);
        if (!best || better(r, *best)) best = r;
    }
    return *best;
}

SearchGrid default_grid(EstimatorKind kind) {
    SearchGrid grid;
    for (int i = 1; i <= 10; ++i) grid.alphas.push_back(i / 10.0);
    EstimatorSpec probe;
    probe.kind = kind;
    if (probe.uses_k()) {
        for (int i = 1; i <= 10; ++i) grid.shrinkages.push_back(i / 10.0);
    } else if (probe.uses_d()) {
        for (int i = 1; i <= 9; ++i) grid.shrinkages.push_back(i / 10.0);
        grid.shrinkages.push_back(0.99);
    }
    return grid;
}

EvaluationResult grid_search_cv(const SplitData& data, const EstimatorSpec& spec,
                                const SearchGrid& grid) {
    if (grid.alphas.empty()) throw EmptyGrid("alpha grid is empty");
    const std::vector<EstimatorSpec> specs = expand_specs(spec, grid);
    std::optional<EvaluationResult> best;
    for (const EstimatorSpec& e : specs) {
        for (double alpha : grid.alphas) {
            EvaluationResult r = holdout_evaluate(data, e, alpha, grid.t_rule);
            if (!best || better(r, *best)) best = r;
        }
    }
    return *best;
}

EvaluationResult grid_search_cv_parallel(const SplitData& data, const EstimatorSpec& spec,
                                         const SearchGrid& grid) {
    if (grid.alphas.empty()) throw EmptyGrid("alpha grid is empty");
    const std::vector<EstimatorSpec> specs = expand_specs(spec, grid);
    const int n_alpha = static_cast<int>(grid.alphas.size());
    const int total = static_cast<int>(specs.size()) * n_alpha;
    std::vector<EvaluationResult> results(total);
    std::vector<std::string> errors(total);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_thread_count())
#endif
    for (int idx = 0; idx < total; ++idx) {
        try {
            const EstimatorSpec& e = specs[idx / n_alpha];
            const double alpha = grid.alphas[idx % n_alpha];
            results[idx] = holdout_evaluate(data, e, alpha, grid.t_rule);
        } catch (const std::exception& ex) {
            errors[idx] = ex.what();
        }
    }
    for (int idx = 0; idx < total; ++idx)
        if (!errors[idx].empty()) throw GlarsError(errors[idx]);

    // deterministic reduction in grid order, independent of thread schedule
    EvaluationResult best = results[0];
    for (int idx = 1; idx < total; ++idx)
        if (better(results[idx], best)) best = results[idx];
    return best;
}

namespace {

struct CvChoice {
    double score = std::numeric_limits<double>::infinity();
    double alpha = 0.0;
    double shrinkage = 0.0;
    double fraction = 0.0;
};

// Total cross-validation SSE over the fractions grid for one (spec, alpha).
std::vector<double> cv_sse_curve(const SplitData& train_only, const EstimatorSpec& spec,
                                 double alpha, const CvProtocol& protocol) {
    const int n = static_cast<int>(train_only.x_train.rows());
    const int p = static_cast<int>(train_only.x_train.cols());
    const int folds = std::min(protocol.n_folds, n / 2);
    std::vector<double> sse(protocol.n_fractions, 0.0);
    for (int f = 0; f < folds; ++f) {
        int n_in = 0;
        for (int i = 0; i < n; ++i)
            if (i % folds != f) ++n_in;
        Matrix x_in(n_in, p), x_out(n - n_in, p);
        Vector y_in(n_in), y_out(n - n_in);
        int a = 0, b = 0;
        for (int i = 0; i < n; ++i) {
            if (i % folds != f) {
                x_in.row(a) = train_only.x_train.row(i);
                y_in[a++] = train_only.y_train[i];
            } else {
                x_out.row(b) = train_only.x_train.row(i);
                y_out[b++] = train_only.y_train[i];
            }
        }
        const StandardizedDataset s = standardize(x_in, y_in);
        const CoefficientPath path = run_path(s, spec, alpha);
        const double t_max = path.steps.back().t_weighted;
        for (int fi = 0; fi < protocol.n_fractions; ++fi) {
            const double t = t_max * fi / (protocol.n_fractions - 1.0);
            const Vector beta = coefficients_at(path, t);
            const OriginalScaleFit fit = to_original_scale(path, beta);
            const Vector resid =
                y_out - ((x_out * fit.beta).array() + fit.intercept).matrix();
            sse[fi] += resid.squaredNorm();
        }
    }
    return sse;
}

EvaluationResult evaluate_at_choice(const SplitData& data, const EstimatorSpec& spec,
                                    const CvChoice& choice) {
    const StandardizedDataset s = standardize(data.x_train, data.y_train);
    const CoefficientPath path = run_path(s, spec, choice.alpha);
    const double t = choice.fraction * path.steps.back().t_weighted;
    const Vector beta_adaptive = coefficients_at(path, t);
    const OriginalScaleFit fit = to_original_scale(path, beta_adaptive);
    EvaluationResult r;
    r.rmse = rmse(fit.beta, fit.intercept, data.x_test, data.y_test);
    r.chosen_alpha = choice.alpha;
    if (spec.uses_k())
        r.chosen_shrinkage = spec.k;
    else if (spec.uses_d())
        r.chosen_shrinkage = spec.d;
    r.chosen_t = t;
    int selected = 0;
    for (int j = 0; j < fit.beta.size(); ++j)
        if (std::abs(fit.beta[j]) > kSelectedTol) ++selected;
    r.n_selected = selected;
    r.estimator = spec;
    return r;
}

// smaller score wins; exact ties prefer smaller alpha, shrinkage, fraction
bool choice_better(const CvChoice& a, const CvChoice& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.shrinkage != b.shrinkage) return a.shrinkage < b.shrinkage;
    return a.fraction < b.fraction;
}

}  // namespace

EvaluationResult cv_select_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                    const SearchGrid& grid, const CvProtocol& protocol) {
    if (grid.alphas.empty()) throw EmptyGrid("alpha grid is empty");
    if (protocol.n_fractions < 2) throw GlarsError("need at least 2 t fractions");
    const std::vector<EstimatorSpec> specs = expand_specs(spec, grid);

    CvChoice best;
    for (const EstimatorSpec& e : specs) {
        const double shr = e.uses_k() ? e.k : (e.uses_d() ? e.d : 0.0);
        for (double alpha : grid.alphas) {
            const std::vector<double> sse = cv_sse_curve(data, e, alpha, protocol);
            for (std::size_t fi = 0; fi < sse.size(); ++fi) {
                const CvChoice cand{sse[fi], alpha, shr,
                                    fi / (sse.size() - 1.0)};
                if (choice_better(cand, best)) best = cand;
            }
        }
    }
    EstimatorSpec chosen = spec;
    if (chosen.uses_k()) chosen.k = best.shrinkage;
    if (chosen.uses_d()) chosen.d = best.shrinkage;
    return evaluate_at_choice(data, chosen, best);
}

EvaluationResult cv_select_evaluate_parallel(const SplitData& data,
                                             const EstimatorSpec& spec,
                                             const SearchGrid& grid,
                                             const CvProtocol& protocol) {
    if (grid.alphas.empty()) throw EmptyGrid("alpha grid is empty");
    if (protocol.n_fractions < 2) throw GlarsError("need at least 2 t fractions");
    const std::vector<EstimatorSpec> specs = expand_specs(spec, grid);
    const int n_alpha = static_cast<int>(grid.alphas.size());
    const int total = static_cast<int>(specs.size()) * n_alpha;
    std::vector<CvChoice> choices(total);
    std::vector<std::string> errors(total);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_thread_count())
#endif
    for (int idx = 0; idx < total; ++idx) {
        try {
            const EstimatorSpec& e = specs[idx / n_alpha];
            const double alpha = grid.alphas[idx % n_alpha];
            const double shr = e.uses_k() ? e.k : (e.uses_d() ? e.d : 0.0);
            const std::vector<double> sse = cv_sse_curve(data, e, alpha, protocol);
            CvChoice best;
            for (std::size_t fi = 0; fi < sse.size(); ++fi) {
                const CvChoice cand{sse[fi], alpha, shr, fi / (sse.size() - 1.0)};
                if (choice_better(cand, best)) best = cand;
            }
            choices[idx] = best;
        } catch (const std::exception& ex) {
            errors[idx] = ex.what();
        }
    }
    for (int idx = 0; idx < total; ++idx)
        if (!errors[idx].empty()) throw GlarsError(errors[idx]);

    CvChoice best = choices[0];
    for (int idx = 1; idx < total; ++idx)
        if (choice_better(choices[idx], best)) best = choices[idx];
    EstimatorSpec chosen = spec;
    if (chosen.uses_k()) chosen.k = best.shrinkage;
    if (chosen.uses_d()) chosen.d = best.shrinkage;
    return evaluate_at_choice(data, chosen, best);
}

EvaluationResult select_and_evaluate(const SplitData& data, const EstimatorSpec& spec,
                                     const SearchGrid& grid,
                                     const SelectionProtocol& protocol, bool parallel) {
    if (protocol.mode == SelectionProtocol::Mode::BestOnTest)
        return parallel ? grid_search_cv_parallel(data, spec, grid)
                        : grid_search_cv(data, spec, grid);
    return parallel ? cv_select_evaluate_parallel(data, spec, grid, protocol.cv)
                    : cv_select_evaluate(data, spec, grid, protocol.cv);
}

int effective_thread_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("GLARS_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return std::max(1, n);
#else
    return 1;
#endif
}

}  // namespace glars

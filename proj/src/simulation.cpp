#include "glars/simulation.hpp"

#include <Eigen/Eigenvalues>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>

namespace glars {

namespace {

struct ReplicateOutcome {
    std::vector<EvaluationResult> per_estimator;
    bool failed = false;
    std::string error;
};

ReplicateOutcome run_one_replicate(const SimulationConfig& config, int replicate,
                                   const std::vector<EstimatorSpec>& estimators,
                                   const std::vector<SearchGrid>& grids,
                                   const SelectionProtocol& protocol) {
    ReplicateOutcome out;
    try {
        Rng rng(substream_seed(config.seed, static_cast<std::uint64_t>(replicate)));
        const Matrix x = generate_predictors(config, rng);
        const Vector beta = beta_from_largest_eigenvector(x);
        const Vector y = generate_response(x, beta, config.sigma, rng);

        SplitData split;
        split.x_train = x.topRows(config.n_train);
        split.y_train = y.head(config.n_train);
        split.x_test = x.bottomRows(config.n_total - config.n_train);
        split.y_test = y.tail(config.n_total - config.n_train);

        out.per_estimator.reserve(estimators.size());
        for (std::size_t e = 0; e < estimators.size(); ++e)
            out.per_estimator.push_back(
                select_and_evaluate(split, estimators[e], grids[e], protocol));
    } catch (const std::exception& ex) {
        out.failed = true;
        out.error = ex.what();
    }
    return out;
}

SimulationReport aggregate(const SimulationConfig& config,
                           const std::vector<EstimatorSpec>& estimators,
                           const std::vector<ReplicateOutcome>& outcomes) {
    SimulationReport report;
    report.config = config;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (outcomes[r].failed) {
            ++report.failed_replicates;
            report.failure_messages.push_back("replicate " + std::to_string(r) + ": " +
                                              outcomes[r].error);
        }
    }

    for (std::size_t e = 0; e < estimators.size(); ++e) {
        AlgorithmSummary summary;
        summary.name = estimator_name(estimators[e].kind);
        for (const auto& o : outcomes)
            if (!o.failed) summary.replicates.push_back(o.per_estimator[e]);
        if (!summary.replicates.empty()) {
            std::vector<double> rmses;
            rmses.reserve(summary.replicates.size());
            for (const auto& r : summary.replicates) rmses.push_back(r.rmse);
            summary.median_rmse = median_of(rmses);
            // hyperparameters shown beside the median belong to the replicate
            // whose rmse is closest to it (lowest index on ties)
            std::size_t arg = 0;
            double best = std::abs(rmses[0] - summary.median_rmse);
            for (std::size_t i = 1; i < rmses.size(); ++i) {
                const double d = std::abs(rmses[i] - summary.median_rmse);
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
            summary.median_point = summary.replicates[arg];
        }
        report.algorithms.push_back(std::move(summary));
    }
    return report;
}

}  // namespace

Matrix generate_predictors(const SimulationConfig& config, Rng& rng) {
    config.validate();
    const int n = config.n_total;
    const int m = config.m;
    Matrix z(n, m + 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j) z(i, j) = rng.normal();
    const double rho = config.rho_collinearity;
    const double mix = std::sqrt(1.0 - rho * rho);
    Matrix x(n, m);
    for (int j = 0; j < m; ++j) x.col(j) = mix * z.col(j) + rho * z.col(m);
    return x;
}

Vector beta_from_largest_eigenvector(const Matrix& x, bool* degenerate) {
    const Matrix gram = x.transpose() * x;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success)
        throw SingularGram("eigendecomposition failed to converge");
    const int p = static_cast<int>(gram.rows());
    if (degenerate) {
        const double gap = p > 1 ? eig.eigenvalues()[p - 1] - eig.eigenvalues()[p - 2]
                                 : eig.eigenvalues()[p - 1];
        *degenerate = gap <= 1e-12 * std::max(1.0, eig.eigenvalues()[p - 1]);
    }
    Vector beta = eig.eigenvectors().col(p - 1);
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < p; ++i)
        if (std::abs(beta[i]) > best) {
            best = std::abs(beta[i]);
            arg = i;
        }
    if (beta[arg] < 0.0) beta = -beta;
    return beta / beta.norm();
}

Vector generate_response(const Matrix& x, const Vector& beta, double sigma, Rng& rng) {
    if (beta.size() != x.cols()) throw DimensionMismatch("beta length does not match X");
    Vector y = x * beta;
    for (int i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
    return y;
}

double median_of(std::vector<double> values) {
    if (values.empty()) throw GlarsError("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SimulationReport run_replications(const SimulationConfig& config,
                                  const std::vector<EstimatorSpec>& estimators,
                                  const std::vector<SearchGrid>& grids,
                                  const SelectionProtocol& protocol) {
    config.validate();
    if (estimators.size() != grids.size())
        throw DimensionMismatch("one grid per estimator required");
    std::vector<ReplicateOutcome> outcomes(config.n_replicates);
    for (int r = 0; r < config.n_replicates; ++r)
        outcomes[r] = run_one_replicate(config, r, estimators, grids, protocol);
    return aggregate(config, estimators, outcomes);
}

SimulationReport run_replications_parallel(const SimulationConfig& config,
                                           const std::vector<EstimatorSpec>& estimators,
                                           const std::vector<SearchGrid>& grids,
                                           const SelectionProtocol& protocol) {
    config.validate();
    if (estimators.size() != grids.size())
        throw DimensionMismatch("one grid per estimator required");
    std::vector<ReplicateOutcome> outcomes(config.n_replicates);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(effective_thread_count())
#endif
    for (int r = 0; r < config.n_replicates; ++r)
        outcomes[r] = run_one_replicate(config, r, estimators, grids, protocol);
    return aggregate(config, estimators, outcomes);
}

}  // namespace glars

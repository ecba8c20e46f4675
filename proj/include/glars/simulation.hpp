#pragma once

#include "glars/model_selection.hpp"
#include "glars/rng.hpp"
#include "glars/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace glars {

struct SimulationConfig {
    int n_total = 100;
    int n_train = 50;
    int m = 20;                    // predictors
    double rho_collinearity = 0.5; // the generator's rho, not the step length
    double sigma = 0.35;           // error sd; see README on the paper's scale
    int n_replicates = 50;
    std::uint64_t seed = 20240901;

    void validate() const {
        if (n_train >= n_total) throw GlarsError("n_train must be < n_total");
        if (m < 2) throw GlarsError("need at least 2 predictors");
        if (rho_collinearity < 0.0 || rho_collinearity >= 1.0)
            throw GlarsError("rho must be in [0,1)");
        if (sigma <= 0.0) throw GlarsError("sigma must be positive");
        if (n_replicates < 1) throw GlarsError("need at least one replicate");
    }
};

/// McDonald-Galarneau design: x_ij = sqrt(1-rho^2) z_ij + rho z_{i,m+1}.
Matrix generate_predictors(const SimulationConfig& config, Rng& rng);

/// Unit-norm leading eigenvector of X'X, sign-normalized. `degenerate` is set
/// when the top eigenvalue gap is below 1e-12 (the deterministic choice is
/// still returned).
Vector beta_from_largest_eigenvector(const Matrix& x, bool* degenerate = nullptr);

/// y = X beta + sigma * eps with iid standard-normal eps.
Vector generate_response(const Matrix& x, const Vector& beta, double sigma, Rng& rng);

struct AlgorithmSummary {
    std::string name;
    double median_rmse = 0.0;
    EvaluationResult median_point;  // the replicate whose rmse is nearest the median
    std::vector<EvaluationResult> replicates;
};

struct SimulationReport {
    SimulationConfig config;
    std::vector<AlgorithmSummary> algorithms;
    int failed_replicates = 0;
    std::vector<std::string> failure_messages;  // one per failed replicate
};

/// One grid search per (replicate, estimator): generate data, split
/// n_train/rest, search, aggregate medians. Replicate r derives its RNG
/// substream from (seed, r), so results do not depend on the estimator list.
SimulationReport run_replications(const SimulationConfig& config,
                                  const std::vector<EstimatorSpec>& estimators,
                                  const std::vector<SearchGrid>& grids,
                                  const SelectionProtocol& protocol = {});

/// OpenMP-parallel across replicates; byte-identical report to the serial run.
SimulationReport run_replications_parallel(const SimulationConfig& config,
                                           const std::vector<EstimatorSpec>& estimators,
                                           const std::vector<SearchGrid>& grids,
                                           const SelectionProtocol& protocol = {});

double median_of(std::vector<double> values);

}  // namespace glars

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlme/reconstruct.hpp"

namespace mlme {

/// Which POM a synthetic experiment measures.
struct PomSpec {
    enum class Kind { trine, homodyne };
    Kind kind = Kind::homodyne;
    std::vector<QuadratureSetting> settings;  // homodyne only; empty = defaults
    HomodyneMode mode = HomodyneMode::scaled_complement;

    Pom build(Index dim) const;
};

struct ExperimentConfig {
    Index dim_true = 5;
    PomSpec pom_spec;
    std::int64_t copies = 10000;
    int trials = 1;
    std::uint64_t seed = 0;
    double lambda = 1e-4;
    std::vector<Index> recon_dims;      // dimension sweeps
    std::vector<double> lambdas;        // lambda sweeps
    IterationConfig iteration;          // lambda is taken from the fields above
    /// Optional fixed true state; a fresh random one is drawn per seed
    /// otherwise.
    std::optional<DensityMatrix> true_state;

    void validate() const;
};

/// One row of sweep output: averaged diagnostics at one lambda or dimension.
struct SweepRecord {
    double key = 0.0;
    double mean_entropy = 0.0;
    double mean_loglik = 0.0;
    double mean_trace_distance = 0.0;
    double mean_w00 = 0.0;
    /// Trials that contributed to the means.
    int trials = 0;
    int failures = 0;
    std::vector<int> failed_trials;
    /// Dimension sweeps only.
    std::optional<bool> complete;
    std::optional<double> truncation_bias;
};

/// rho = G G^dagger / tr(G G^dagger) with G a dim x dim matrix of independent
/// standard complex normal entries; full rank with probability 1 and
/// bit-reproducible per seed.
DensityMatrix random_density(Index dim, std::uint64_t seed);

/// One multinomial draw of `copies` outcomes from the Born distribution.
CountData sample_counts(const DensityMatrix& rho, const Pom& pom, std::int64_t copies,
                        std::uint64_t seed);

/// Stream-split seed for trial `index`, so trials are order-independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// One reconstruction per lambda on the same per-trial data set; records the
/// estimator's entropy, normalized log-likelihood, trace distance to the true
/// state and W00, averaged over trials.
std::vector<SweepRecord> lambda_sweep(const ExperimentConfig& config,
                                      const std::vector<double>& lambdas);

/// For each reconstruction dimension: compress the POM, decide ML vs MLME by
/// informational completeness, reconstruct every trial's data in that
/// subspace and compare against the true state via zero-padded embedding.
std::vector<SweepRecord> dimension_sweep(const ExperimentConfig& config);

}  // namespace mlme

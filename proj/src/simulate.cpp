#include "mlme/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mlme {

namespace {

// SplitMix64: tiny, seedable, bit-reproducible across platforms; also used
// to derive independent per-trial streams.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

ComplexMatrix embed(const ComplexMatrix& m, Index dim) {
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 rng(seed ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return rng.next();
}

DensityMatrix random_density(Index dim, std::uint64_t seed) {
    if (dim < 1) {
        throw InvalidInput("random_density: dim must be >= 1");
    }
    SplitMix64 rng(seed);
    ComplexMatrix g(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(HermitianOperator(std::move(rho), 1e-8));
}

CountData sample_counts(const DensityMatrix& rho, const Pom& pom, std::int64_t copies,
                        std::uint64_t seed) {
    if (copies < 1) {
        throw InvalidInput("sample_counts: copies must be >= 1");
    }
    const Probabilities probs = born_probabilities(rho, pom);
    std::vector<double> cumulative(probs.values.size());
    double acc = 0.0;
    for (size_t j = 0; j < probs.values.size(); ++j) {
        acc += probs.values[j];
        cumulative[j] = acc;
    }
    SplitMix64 rng(seed);
    std::vector<std::int64_t> counts(probs.values.size(), 0);
    for (std::int64_t n = 0; n < copies; ++n) {
        const double u = rng.uniform01() * acc;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const size_t j = std::min(static_cast<size_t>(it - cumulative.begin()),
                                  counts.size() - 1);
        ++counts[j];
    }
    return CountData::from_counts(counts);
}

Pom PomSpec::build(Index dim) const {
    if (kind == Kind::trine) {
        if (dim != 2) {
            throw InvalidInput("trine POM requires dimension 2");
        }
        return trine_pom();
    }
    return homodyne_pom(settings.empty() ? default_homodyne_settings() : settings, dim, mode);
}

void ExperimentConfig::validate() const {
    if (dim_true < 1) {
        throw InvalidInput("experiment config: dim_true must be >= 1");
    }
    if (copies < 1) {
        throw InvalidInput("experiment config: copies must be >= 1");
    }
    if (trials < 1) {
        throw InvalidInput("experiment config: trials must be >= 1");
    }
    if (true_state && true_state->dim() != dim_true) {
        throw InvalidInput("experiment config: true state dimension does not match dim_true");
    }
    iteration.validate();
}

namespace {

DensityMatrix resolve_true_state(const ExperimentConfig& config) {
    if (config.true_state) {
        return *config.true_state;
    }
    return random_density(config.dim_true, derive_seed(config.seed, 0));
}

std::vector<CountData> sample_all_trials(const ExperimentConfig& config,
                                         const DensityMatrix& rho_true, const Pom& pom) {
    std::vector<CountData> data;
    data.reserve(static_cast<size_t>(config.trials));
    for (int t = 0; t < config.trials; ++t) {
        data.push_back(sample_counts(rho_true, pom, config.copies,
                                     derive_seed(config.seed, static_cast<std::uint64_t>(t) + 1)));
    }
    return data;
}

struct Accumulator {
    double entropy = 0.0;
    double loglik = 0.0;
    double distance = 0.0;
    double w00 = 0.0;
    int n = 0;

    void add(double s, double l, double d, double w) {
        entropy += s;
        loglik += l;
        distance += d;
        w00 += w;
        ++n;
    }

    void fill(SweepRecord& rec) const {
        rec.trials = n;
        if (n > 0) {
            rec.mean_entropy = entropy / n;
            rec.mean_loglik = loglik / n;
            rec.mean_trace_distance = distance / n;
            rec.mean_w00 = w00 / n;
        }
    }
};

}  // namespace

std::vector<SweepRecord> lambda_sweep(const ExperimentConfig& config,
                                      const std::vector<double>& lambdas) {
    config.validate();
    if (lambdas.empty()) {
        throw InvalidInput("lambda_sweep: lambda grid is empty");
    }
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) {
            throw InvalidInput("lambda_sweep: lambdas must be positive");
        }
        if (i > 0 && lambdas[i] < lambdas[i - 1]) {
            throw InvalidInput("lambda_sweep: lambdas must be sorted ascending");
        }
    }

    const Pom pom = config.pom_spec.build(config.dim_true);
    const DensityMatrix rho_true = resolve_true_state(config);
    const std::vector<CountData> trial_data = sample_all_trials(config, rho_true, pom);

    std::vector<SweepRecord> records;
    for (double lambda : lambdas) {
        SweepRecord rec;
        rec.key = lambda;
        Accumulator acc;
        for (int t = 0; t < config.trials; ++t) {
            try {
                IterationConfig it = config.iteration;
                it.lambda = lambda;
                const ReconstructionResult res =
                    mlme_reconstruct(trial_data[static_cast<size_t>(t)], pom, it);
                acc.add(von_neumann_entropy(res.estimator),
                        normalized_log_likelihood(
                            trial_data[static_cast<size_t>(t)],
                            born_probabilities(res.estimator, pom)),
                        trace_distance(res.estimator, rho_true),
                        wigner_origin(res.estimator));
            } catch (const Error&) {
                ++rec.failures;
                rec.failed_trials.push_back(t);
            }
        }
        acc.fill(rec);
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<SweepRecord> dimension_sweep(const ExperimentConfig& config) {
    config.validate();
    if (config.recon_dims.empty()) {
        throw InvalidInput("dimension_sweep: recon_dims is empty");
    }
    for (Index d : config.recon_dims) {
        if (d < 2 || d > config.dim_true) {
            throw InvalidInput("dimension_sweep: recon_dims must lie in [2, dim_true]");
        }
    }

    const Pom pom_full = config.pom_spec.build(config.dim_true);
    const DensityMatrix rho_true = resolve_true_state(config);
    const std::vector<CountData> trial_data = sample_all_trials(config, rho_true, pom_full);

    std::vector<SweepRecord> records;
    for (Index d : config.recon_dims) {
        SweepRecord rec;
        rec.key = static_cast<double>(d);

        const Pom pom_d = project_pom(pom_full, d);
        const GramAnalysis analysis = gram_analysis(pom_d);
        const bool complete = analysis.complete(d);
        rec.complete = complete;

        // Distance of the true state to its own compression: the part of the
        // error no reconstruction in this subspace can remove.
        rec.truncation_bias =
            0.5 * trace_norm(HermitianOperator(
                      rho_true.matrix()
                      - embed(rho_true.matrix().topLeftCorner(d, d), config.dim_true)));

        Accumulator acc;
        for (int t = 0; t < config.trials; ++t) {
            try {
                const CountData& counts = trial_data[static_cast<size_t>(t)];
                // Counts from the full-space measurement may not align with
                // a projected POM that needed a deficit outcome appended.
                CountData recon_counts = counts;
                if (pom_d.size() == counts.size() + 1) {
                    std::vector<double> freqs = counts.frequencies();
                    freqs.push_back(0.0);
                    recon_counts = CountData::from_frequencies(std::move(freqs),
                                                               counts.total());
                }
                IterationConfig it = config.iteration;
                it.lambda = complete ? 0.0 : config.lambda;
                const ReconstructionResult res =
                    mlme_reconstruct(recon_counts, pom_d, it);

                const DensityMatrix embedded = DensityMatrix(
                    HermitianOperator(embed(res.estimator.matrix(), config.dim_true)));
                acc.add(von_neumann_entropy(res.estimator),
                        normalized_log_likelihood(recon_counts,
                                                  born_probabilities(res.estimator, pom_d)),
                        trace_distance(embedded, rho_true),
                        wigner_origin(res.estimator));
            } catch (const Error&) {
                ++rec.failures;
                rec.failed_trials.push_back(t);
            }
        }
        acc.fill(rec);
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace mlme

#pragma once

#include <cstdint>
#include <vector>

#include "mlme/linalg.hpp"
#include "mlme/pom.hpp"

namespace mlme {

/// Outcome occurrences n_j with total N and derived frequencies f_j = n_j/N.
/// Real-valued counts are allowed so idealized (noiseless) frequency data can
/// be represented; from_counts enforces integral non-negative values.
class CountData {
public:
    static CountData from_counts(const std::vector<std::int64_t>& counts);
    /// Frequencies must be non-negative and sum to 1 within 1e-12; `total`
    /// is the nominal number of copies they stand for.
    static CountData from_frequencies(std::vector<double> frequencies, double total = 1.0);

    Index size() const { return static_cast<Index>(frequencies_.size()); }
    const std::vector<double>& frequencies() const { return frequencies_; }
    double frequency(Index j) const { return frequencies_[static_cast<size_t>(j)]; }
    std::vector<double> counts() const;
    double total() const { return total_; }

private:
    CountData() = default;
    std::vector<double> frequencies_;
    double total_ = 0.0;
};

/// Born-rule outcome distribution p_j = tr(rho effect_j).
struct Probabilities {
    std::vector<double> values;

    Index size() const { return static_cast<Index>(values.size()); }
    double operator[](Index j) const { return values[static_cast<size_t>(j)]; }
};

/// p_j = tr(rho effect_j), clamped to [0, 1] after checking p_j >= -1e-12.
Probabilities born_probabilities(const DensityMatrix& rho, const Pom& pom);

/// (1/N) log L = sum_j f_j log p_j. Terms with f_j = 0 contribute nothing;
/// returns -infinity when some f_j > 0 meets p_j = 0.
double normalized_log_likelihood(const CountData& data, const Probabilities& probs);

/// -tr(rho log rho), natural logarithm, 0 log 0 = 0.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const RealVector& eigenvalues);

/// sum_j f_j log(f_j / p_j) >= 0; +infinity when f_j > 0 meets p_j = 0.
double relative_entropy(const CountData& data, const Probabilities& probs);

/// The weighted objective lambda * S(rho) + (1/N) log L(rho). The additive
/// constant sum f log f that would turn the likelihood term into a negative
/// relative entropy is deliberately not included.
double objective(double lambda, const DensityMatrix& rho, const CountData& data,
                 const Pom& pom);

/// R = sum_j (f_j / p_j) effect_j; throws ZeroProbabilityOutcome when some
/// f_j > 0 has p_j below the probability clamp.
HermitianOperator r_operator(const DensityMatrix& rho, const CountData& data, const Pom& pom);

/// T = R - 1 - lambda (log rho - tr(rho log rho)); tr(T rho) = 0.
HermitianOperator t_operator(const DensityMatrix& rho, const CountData& data, const Pom& pom,
                             double lambda,
                             double log_floor = Tolerances::defaults().log_floor);

/// diag((-1)^n) in the Fock basis.
HermitianOperator parity_operator(Index dim);

/// Wigner function at the phase-space origin, W00 = 2 tr(rho P); in [-2, 2].
/// Negative values certify a non-classical state.
double wigner_origin(const DensityMatrix& rho);

}  // namespace mlme

#pragma once

#include <string>
#include <vector>

#include "mlme/linalg.hpp"

namespace mlme {

/// Probability operator measurement: K positive effects resolving the
/// identity. Construction validates effect positivity (min eigenvalue
/// >= -positivity tol) and closure |sum effects - 1|_F <= pom_closure tol.
class Pom {
public:
    Pom(Index dim, std::vector<HermitianOperator> effects, std::vector<std::string> labels,
        const Tolerances& tol = Tolerances::defaults());

    Index dim() const { return dim_; }
    Index size() const { return static_cast<Index>(effects_.size()); }
    const std::vector<HermitianOperator>& effects() const { return effects_; }
    const HermitianOperator& effect(Index j) const { return effects_[static_cast<size_t>(j)]; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// |sum_j effects_j - 1|_F, recorded at construction.
    double closure_residual() const { return closure_residual_; }

private:
    Index dim_ = 0;
    std::vector<HermitianOperator> effects_;
    std::vector<std::string> labels_;
    double closure_residual_ = 0.0;
};

/// Three symmetric qubit effects at 120 degrees in the x-z Bloch plane:
/// (1 + sigma_z)/3 and (1 +- sqrt(3) sigma_x / 2 - sigma_z / 2)/3.
Pom trine_pom();

/// Six-outcome qubit POM from the +-x, +-y, +-z projectors, each weighted
/// 1/3; informationally complete.
Pom pauli_6_pom();

/// Harmonic-oscillator eigenfunction psi_n(x), computed by the stable upward
/// recurrence psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}
/// with psi_0 = pi^{-1/4} exp(-x^2/2).
double hermite_function(int n, double x);

/// All of psi_0(x) .. psi_{dim-1}(x) in one recurrence pass.
RealVector hermite_functions(Index dim, double x);

/// One quadrature phase setting and the x values sampled at that phase.
struct QuadratureSetting {
    double theta = 0.0;
    std::vector<double> xs;
};

/// Rank-one projector onto the quadrature eigenstate |x_theta> truncated to
/// the first `dim` Fock states: entries exp(i theta (m-n)) psi_m(x) psi_n(x).
HermitianOperator quadrature_projector(double theta, double x, Index dim);

enum class HomodyneMode {
    /// Scale all projectors by 1/lambda_max(sum) and add one complement
    /// effect 1 - s * sum; K = #projectors + 1.
    scaled_complement,
    /// Integrate |x_theta><x_theta| over a bin partition of the real line
    /// around the x values (outer bins to +-infinity), weighted by
    /// 1/#settings; closes to the identity by construction; K = #projectors.
    binned,
};

/// The grid used throughout the simulations: theta_k = k pi / 4 for
/// k = 0..3, xs = {-2, -1, 0, 1, 2} (20 projectors).
std::vector<QuadratureSetting> default_homodyne_settings();

Pom homodyne_pom(const std::vector<QuadratureSetting>& settings, Index dim,
                 HomodyneMode mode = HomodyneMode::scaled_complement);

/// Compress every effect to the leading `dim`-dimensional Fock subspace.
/// Closure survives compression for a valid Pom; if the compressed effects
/// leave a deficit beyond the closure tolerance it is appended as an extra
/// outcome labeled "deficit".
Pom project_pom(const Pom& pom, Index dim);

/// Gram matrix M_jk = tr(effect_j effect_k) and the count of its eigenvalues
/// above the rank tolerance, i.e. the number of linearly independent effects.
struct GramAnalysis {
    RealMatrix gram;
    RealVector eigenvalues;  // descending
    double rank_tolerance = 0.0;
    Index informational_rank = 0;

    bool complete(Index dim) const { return informational_rank == dim * dim; }
};

/// `tol` <= 0 selects the default K * machine-epsilon * largest eigenvalue.
GramAnalysis gram_analysis(const Pom& pom, double tol = 0.0);
GramAnalysis gram_analysis(const std::vector<HermitianOperator>& effects, double tol = 0.0);

/// Trace-orthonormal Hermitian operator basis split into the span of the
/// effects (measurement) and its orthogonal complement; `expansion` holds the
/// real coefficients a_jk with effect_j = sum_k a_jk measurement_k.
struct OperatorBasis {
    Index dim = 0;
    std::vector<HermitianOperator> measurement;
    std::vector<HermitianOperator> complement;
    RealMatrix expansion;  // K x n_meas
};

/// Builds the measurement basis from Gram eigenvector combinations of the
/// effects, so its rank decision matches `analysis` exactly; throws
/// RankDeficiencyMismatch if the resulting basis fails orthonormality or
/// no longer reproduces the effects (a symptom of an unsuitable tolerance).
OperatorBasis build_operator_basis(const Pom& pom, const GramAnalysis& analysis);

/// rho split along the basis: ml_part in the measurement subspace (fixed by
/// the Born probabilities), me_part in the complement (invisible to them).
struct StateDecomposition {
    std::vector<double> ml_coeffs;
    std::vector<double> me_coeffs;
    HermitianOperator ml_part;
    HermitianOperator me_part;
};

StateDecomposition decompose_state(const DensityMatrix& rho, const OperatorBasis& basis);

}  // namespace mlme

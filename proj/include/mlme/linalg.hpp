#pragma once

#include <Eigen/Dense>

#include <complex>

#include "mlme/errors.hpp"
#include "mlme/tolerances.hpp"

namespace mlme {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Dense D x D complex Hermitian matrix, the carrier for effects, iteration
/// operators and basis elements. Construction rejects matrices farther than
/// `tol` from Hermitian and stores the Hermitian part, so stored entries
/// satisfy entries(i,j) == conj(entries(j,i)) exactly.
class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(ComplexMatrix m,
                               double tol = Tolerances::defaults().hermiticity);

    static HermitianOperator identity(Index dim);
    static HermitianOperator zero(Index dim);

    Index dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }

    double trace() const { return mat_.trace().real(); }
    double frobenius_norm() const { return mat_.norm(); }

private:
    ComplexMatrix mat_;
};

/// Real Hilbert-Schmidt inner product tr(A B) of two Hermitian operators.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

/// Eigensystem of a Hermitian operator. Eigenvalues are sorted descending and
/// each eigenvector's first significant component is phase-rotated to the
/// positive real axis, so repeated decompositions of equal inputs agree.
struct Spectrum {
    RealVector eigenvalues;      // descending
    ComplexMatrix eigenvectors;  // orthonormal columns, same order

    /// V diag(w) V^dagger.
    ComplexMatrix reconstruct() const;

    /// V diag(f(w)) V^dagger for a scalar function applied to the eigenvalues.
    template <typename F>
    ComplexMatrix map_eigenvalues(F&& f) const {
        RealVector mapped(eigenvalues.size());
        for (Index i = 0; i < eigenvalues.size(); ++i) {
            mapped[i] = f(eigenvalues[i]);
        }
        return eigenvectors * mapped.asDiagonal() * eigenvectors.adjoint();
    }
};

/// Positive unit-trace Hermitian operator. Validated on construction.
class DensityMatrix {
public:
    /// Empty placeholder (dim 0); only valid as an assignment target.
    DensityMatrix() = default;

    explicit DensityMatrix(HermitianOperator op,
                           const Tolerances& tol = Tolerances::defaults());

    static DensityMatrix maximally_mixed(Index dim);
    static DensityMatrix from_matrix(ComplexMatrix m,
                                     const Tolerances& tol = Tolerances::defaults());
    /// |psi><psi| / <psi|psi>.
    static DensityMatrix pure(const ComplexVector& psi);

    Index dim() const { return op_.dim(); }
    const HermitianOperator& op() const { return op_; }
    const ComplexMatrix& matrix() const { return op_.matrix(); }

private:
    HermitianOperator op_;
};

Spectrum spectral_decompose(const HermitianOperator& h);

/// Raw-matrix entry point; throws NonHermitianInput if the asymmetry exceeds `tol`.
Spectrum spectral_decompose(const ComplexMatrix& m,
                            double tol = Tolerances::defaults().hermiticity);

/// log(rho) with eigenvalues clamped to `floor` first, so rank-deficient
/// states near the boundary stay finite (matches the 0 log 0 = 0 convention).
HermitianOperator matrix_log_on_support(const DensityMatrix& rho,
                                        double floor = Tolerances::defaults().log_floor);
HermitianOperator matrix_log_on_support(const Spectrum& spec,
                                        double floor = Tolerances::defaults().log_floor);

HermitianOperator matrix_exp(const HermitianOperator& h);

/// Sum of absolute eigenvalues.
double trace_norm(const HermitianOperator& h);

/// (1/2) sum |eigenvalues of rho - sigma|; in [0, 1].
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Qubit conveniences.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// (tr(rho sigma_x), tr(rho sigma_y), tr(rho sigma_z)); requires dim 2.
Eigen::Vector3d bloch_vector(const DensityMatrix& rho);

}  // namespace mlme

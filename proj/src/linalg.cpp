#include "mlme/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace mlme {

const Tolerances& Tolerances::defaults() {
    static const Tolerances tol{};
    return tol;
}

HermitianOperator::HermitianOperator(ComplexMatrix m, double tol) {
    if (m.rows() != m.cols()) {
        std::ostringstream msg;
        msg << "operator must be square, got " << m.rows() << "x" << m.cols();
        throw InvalidInput(msg.str());
    }
    const double asymmetry = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asymmetry > tol) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: max |H - H^+| = " << asymmetry
            << " exceeds " << tol;
        throw NonHermitianInput(msg.str());
    }
    mat_ = 0.5 * (m + m.adjoint().eval());
}

HermitianOperator HermitianOperator::identity(Index dim) {
    HermitianOperator h;
    h.mat_ = ComplexMatrix::Identity(dim, dim);
    return h;
}

HermitianOperator HermitianOperator::zero(Index dim) {
    HermitianOperator h;
    h.mat_ = ComplexMatrix::Zero(dim, dim);
    return h;
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("hs_inner: operands have different dimensions");
    }
    return (a.matrix() * b.matrix()).trace().real();
}

ComplexMatrix Spectrum::reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
}

namespace {

// Rotate each eigenvector so its first significant component is real and
// positive; with the descending sort this pins the output representation.
void canonicalize_phases(ComplexMatrix& vectors) {
    for (Index c = 0; c < vectors.cols(); ++c) {
        auto col = vectors.col(c);
        const double scale = col.cwiseAbs().maxCoeff();
        if (scale == 0.0) {
            continue;
        }
        for (Index r = 0; r < col.size(); ++r) {
            const double a = std::abs(col[r]);
            if (a > 1e-6 * scale) {
                col *= std::conj(col[r]) / a;
                break;
            }
        }
    }
}

Spectrum decompose_hermitian_part(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition failed to converge");
    }
    Spectrum spec;
    // Eigen sorts ascending; flip to descending.
    spec.eigenvalues = solver.eigenvalues().reverse();
    spec.eigenvectors = solver.eigenvectors().rowwise().reverse();
    canonicalize_phases(spec.eigenvectors);
    return spec;
}

}  // namespace

Spectrum spectral_decompose(const HermitianOperator& h) {
    return decompose_hermitian_part(h.matrix());
}

Spectrum spectral_decompose(const ComplexMatrix& m, double tol) {
    HermitianOperator h(m, tol);
    return decompose_hermitian_part(h.matrix());
}

DensityMatrix::DensityMatrix(HermitianOperator op, const Tolerances& tol) : op_(std::move(op)) {
    const double trace_error = std::abs(op_.trace() - 1.0);
    if (trace_error > tol.unit_trace) {
        std::ostringstream msg;
        msg << "density matrix trace deviates from 1 by " << trace_error;
        throw InvalidInput(msg.str());
    }
    const Spectrum spec = spectral_decompose(op_);
    const double min_eig = spec.eigenvalues[spec.eigenvalues.size() - 1];
    if (min_eig < -tol.positivity) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << min_eig;
        throw InvalidInput(msg.str());
    }
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    return DensityMatrix(HermitianOperator(
        ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim)));
}

DensityMatrix DensityMatrix::from_matrix(ComplexMatrix m, const Tolerances& tol) {
    return DensityMatrix(HermitianOperator(std::move(m), tol.hermiticity), tol);
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double norm2 = psi.squaredNorm();
    if (norm2 <= 0.0) {
        throw InvalidInput("pure state vector must be nonzero");
    }
    return DensityMatrix(HermitianOperator((psi * psi.adjoint()) / norm2));
}

HermitianOperator matrix_log_on_support(const Spectrum& spec, double floor) {
    if (floor <= 0.0) {
        throw InvalidInput("log floor must be positive");
    }
    return HermitianOperator(spec.map_eigenvalues(
        [floor](double w) { return std::log(std::max(w, floor)); }));
}

HermitianOperator matrix_log_on_support(const DensityMatrix& rho, double floor) {
    return matrix_log_on_support(spectral_decompose(rho.op()), floor);
}

HermitianOperator matrix_exp(const HermitianOperator& h) {
    const Spectrum spec = spectral_decompose(h);
    return HermitianOperator(spec.map_eigenvalues([](double w) { return std::exp(w); }));
}

double trace_norm(const HermitianOperator& h) {
    return spectral_decompose(h).eigenvalues.cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionMismatch("trace_distance: states have different dimensions");
    }
    return 0.5 * trace_norm(HermitianOperator(rho.matrix() - sigma.matrix()));
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Eigen::Vector3d bloch_vector(const DensityMatrix& rho) {
    if (rho.dim() != 2) {
        throw DimensionMismatch("bloch_vector requires a qubit state");
    }
    Eigen::Vector3d r;
    r[0] = (rho.matrix() * pauli_x()).trace().real();
    r[1] = (rho.matrix() * pauli_y()).trace().real();
    r[2] = (rho.matrix() * pauli_z()).trace().real();
    return r;
}

}  // namespace mlme

#pragma once

namespace mlme {

/// Central record of the numerical tolerances used across the library.
/// Operations take individual values from here by default; callers with
/// special needs can pass their own.
struct Tolerances {
    /// Max allowed |H - H'| entry before a matrix is rejected as non-Hermitian.
    double hermiticity = 1e-8;
    /// Allowed |tr(rho) - 1| for a density matrix.
    double unit_trace = 1e-10;
    /// Most negative eigenvalue a density matrix or POM effect may carry.
    double positivity = 1e-10;
    /// Eigenvalue floor used when taking matrix logarithms on the support.
    double log_floor = 1e-12;
    /// Frobenius tolerance on sum(effects) == identity for a POM.
    double pom_closure = 1e-8;
    /// Trace-orthonormality tolerance for operator bases.
    double orthonormality = 1e-10;
    /// Probabilities below this with nonzero frequency are treated as a
    /// genuine boundary pathology rather than rounding.
    double probability_clamp = 1e-14;

    static const Tolerances& defaults();
};

}  // namespace mlme

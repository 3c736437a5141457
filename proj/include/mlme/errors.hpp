#pragma once

#include <stdexcept>
#include <string>

namespace mlme {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix handed in as Hermitian deviates from its adjoint beyond tolerance.
struct NonHermitianInput : Error {
    using Error::Error;
};

/// Operands live in different Hilbert-space dimensions.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// An outcome with nonzero observed frequency has (numerically) zero
/// predicted probability, so the likelihood gradient is undefined.
struct ZeroProbabilityOutcome : Error {
    using Error::Error;
};

/// Basis orthogonalization found a different numerical rank than the
/// preceding Gram analysis; the rank tolerance is unsuitable.
struct RankDeficiencyMismatch : Error {
    using Error::Error;
};

/// Malformed quadrature settings (empty x grids, non-increasing values, ...).
struct InvalidSettings : Error {
    using Error::Error;
};

/// Generic validation failure on constructed values or parsed input.
struct InvalidInput : Error {
    using Error::Error;
};

}  // namespace mlme

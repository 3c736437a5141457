#pragma once

#include <optional>
#include <vector>

#include "mlme/functionals.hpp"

namespace mlme {

/// Controls for the fixed-point iteration rho <- (1 + eps T) rho (1 + eps T),
/// normalized, with T = R - 1 - lambda (log rho - tr(rho log rho)).
struct IterationConfig {
    double lambda = 1e-4;
    /// Initial step size; halved whenever a step would decrease the
    /// objective, doubled (capped at 0.5) after 5 consecutive accepted steps.
    double epsilon = 0.1;
    int max_iters = 50000;
    /// Convergence threshold on |T rho|_F.
    double residual_tol = 1e-8;
    /// Stall detector: relative objective change over a 10-iteration window
    /// below this, with the residual no longer improving, stops the run.
    double objective_tol = 1e-12;
    double log_floor = 1e-12;
    /// Testing hook: start from this state instead of the maximally mixed one.
    std::optional<DensityMatrix> initial_state;

    void validate() const;
};

struct ReconstructionResult {
    DensityMatrix estimator;
    int iterations = 0;
    /// |T rho|_F at the returned estimator.
    double residual = 0.0;
    /// Objective value at the start and after each accepted step.
    std::vector<double> objective_trace;
    bool converged = false;
    /// Most negative iterate eigenvalue seen across the run.
    double min_eigenvalue_seen = 0.0;
    /// Largest |tr(iterate) - 1| seen across the run.
    double max_trace_deviation = 0.0;
};

/// Run the iteration from the maximally mixed state until |T rho|_F falls
/// below residual_tol, the objective stalls, or max_iters is reached; the
/// last (best) iterate is returned either way, with `converged` reporting
/// whether the residual criterion was met.
ReconstructionResult mlme_reconstruct(const CountData& data, const Pom& pom,
                                      const IterationConfig& config = {});

/// The lambda = 0 specialization: plain maximum-likelihood iteration.
ReconstructionResult ml_reconstruct(const CountData& data, const Pom& pom,
                                    IterationConfig config = {});

/// |T rho|_F; zero exactly at states satisfying the extremal equations.
double extremal_residual(const DensityMatrix& rho, const CountData& data, const Pom& pom,
                         double lambda,
                         double log_floor = Tolerances::defaults().log_floor);

/// Lagrange multipliers of the exponential-family state exp(sum mu_j Pi_j),
/// normalized.
struct MaxEntParams {
    std::vector<double> mus;
};

enum class MaxEntStatus {
    converged,
    /// The multipliers diverged while the probability residual stayed above
    /// tolerance: no state has the requested frequencies as probabilities.
    infeasible,
    max_iters,
};

struct MaxEntResult {
    MaxEntStatus status = MaxEntStatus::max_iters;
    MaxEntParams params;
    DensityMatrix state;
    /// Best achieved max_j |p_j(mu) - f_j|.
    double residual = 0.0;
    int iterations = 0;

    bool feasible() const { return status == MaxEntStatus::converged; }
};

/// Standard maximum-entropy inference: seek mu with Born probabilities of
/// the exponential state equal to the observed frequencies, by monotone
/// gradient descent on the dual log tr exp(sum mu_j Pi_j) - mu . f.
/// Declares infeasibility once |mu|_inf exceeds `mu_bound` with the residual
/// still above `tol`.
MaxEntResult standard_me_solve(const CountData& data, const Pom& pom, int max_iters = 20000,
                               double tol = 1e-8, double mu_bound = 1e3);

/// Exact state of the exponential family at the given multipliers.
DensityMatrix max_ent_state(const MaxEntParams& params, const Pom& pom);

}  // namespace mlme

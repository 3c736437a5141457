#include "mlme/reconstruct.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mlme {

void IterationConfig::validate() const {
    if (lambda < 0.0) {
        throw InvalidInput("iteration config: lambda must be >= 0");
    }
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw InvalidInput("iteration config: epsilon must be in (0, 1]");
    }
    if (max_iters < 0) {
        throw InvalidInput("iteration config: max_iters must be >= 0");
    }
    if (!(residual_tol > 0.0) || !(objective_tol > 0.0) || !(log_floor > 0.0)) {
        throw InvalidInput("iteration config: tolerances must be positive");
    }
}

namespace {

constexpr double kMinEpsilon = 1e-14;
constexpr int kStallWindow = 10;
constexpr int kGrowStreak = 5;
constexpr double kMaxEpsilon = 0.5;

struct IterateState {
    ComplexMatrix rho;
    Spectrum spec;
    std::vector<double> probs;
    // Extended precision: step acceptance compares objectives whose per-step
    // differences scale like eps * residual^2, which falls below double
    // resolution right around the target residual of 1e-8.
    long double objective = 0.0L;
};

std::vector<double> born_from_matrix(const ComplexMatrix& rho, const Pom& pom) {
    std::vector<double> probs;
    probs.reserve(static_cast<size_t>(pom.size()));
    for (const auto& effect : pom.effects()) {
        const double p = (rho * effect.matrix()).trace().real();
        probs.push_back(std::clamp(p, 0.0, 1.0));
    }
    return probs;
}

long double log_likelihood_at(const CountData& data, const std::vector<double>& probs) {
    long double value = 0.0L;
    for (Index j = 0; j < data.size(); ++j) {
        const double f = data.frequency(j);
        if (f == 0.0) {
            continue;
        }
        const double p = probs[static_cast<size_t>(j)];
        if (p <= 0.0) {
            return -std::numeric_limits<long double>::infinity();
        }
        value += static_cast<long double>(f) * std::log(static_cast<long double>(p));
    }
    return value;
}

IterateState evaluate(ComplexMatrix rho, const CountData& data, const Pom& pom,
                      double lambda) {
    IterateState state;
    state.rho = std::move(rho);
    state.spec = spectral_decompose(HermitianOperator(state.rho, 1e-6));
    state.probs = born_from_matrix(state.rho, pom);
    long double entropy = 0.0L;
    for (Index i = 0; i < state.spec.eigenvalues.size(); ++i) {
        const long double w = state.spec.eigenvalues[i];
        if (w > 0.0L) {
            entropy -= w * std::log(w);
        }
    }
    state.objective = static_cast<long double>(lambda) * entropy
                      + log_likelihood_at(data, state.probs);
    return state;
}

// T = R - 1 - lambda (log rho - tr(rho log rho)), built from the iterate's
// cached spectrum and probabilities.
ComplexMatrix t_from_state(const IterateState& state, const CountData& data, const Pom& pom,
                           double lambda, double log_floor) {
    const Index d = state.rho.rows();
    ComplexMatrix t = -ComplexMatrix::Identity(d, d);
    for (Index j = 0; j < pom.size(); ++j) {
        const double f = data.frequency(j);
        if (f == 0.0) {
            continue;
        }
        const double p = state.probs[static_cast<size_t>(j)];
        if (p < Tolerances::defaults().probability_clamp) {
            std::ostringstream msg;
            msg << "outcome " << j << " (" << pom.labels()[static_cast<size_t>(j)]
                << ") has frequency " << f << " but probability " << p;
            throw ZeroProbabilityOutcome(msg.str());
        }
        t += (f / p) * pom.effect(j).matrix();
    }
    if (lambda != 0.0) {
        const auto& w = state.spec.eigenvalues;
        double mean_log = 0.0;
        RealVector logw(w.size());
        for (Index i = 0; i < w.size(); ++i) {
            logw[i] = std::log(std::max(w[i], log_floor));
            mean_log += std::max(w[i], 0.0) * logw[i];
        }
        t -= lambda
             * (state.spec.eigenvectors * logw.asDiagonal()
                    * state.spec.eigenvectors.adjoint()
                - mean_log * ComplexMatrix::Identity(d, d));
    }
    return t;
}

ReconstructionResult run_iteration(const CountData& data, const Pom& pom,
                                   const IterationConfig& config) {
    config.validate();
    if (data.size() != pom.size()) {
        throw DimensionMismatch("reconstruct: count length does not match POM size");
    }
    const Index d = pom.dim();

    ComplexMatrix start = config.initial_state
                              ? config.initial_state->matrix()
                              : ComplexMatrix(ComplexMatrix::Identity(d, d)
                                              / static_cast<double>(d));
    if (start.rows() != d) {
        throw DimensionMismatch("reconstruct: initial state dimension does not match POM");
    }

    IterateState cur = evaluate(std::move(start), data, pom, config.lambda);

    ReconstructionResult result;
    result.min_eigenvalue_seen = cur.spec.eigenvalues[d - 1];
    result.max_trace_deviation = std::abs(cur.rho.trace().real() - 1.0);
    result.objective_trace.push_back(static_cast<double>(cur.objective));

    std::vector<double> residual_trace;
    double epsilon = config.epsilon;
    int streak = 0;
    double residual = 0.0;

    for (int iter = 0;; ++iter) {
        const ComplexMatrix t = t_from_state(cur, data, pom, config.lambda, config.log_floor);
        residual = (t * cur.rho).norm();
        residual_trace.push_back(residual);

        if (residual <= config.residual_tol) {
            result.converged = true;
            break;
        }
        if (iter >= config.max_iters) {
            break;
        }
        // Stall: objective flat over the window and the residual no longer
        // shrinking. The residual condition matters twice over: near the
        // optimum the objective increments drop below machine resolution
        // while the residual still contracts geometrically, and at small
        // lambda that contraction can be as slow as 1 - O(eps lambda) per
        // step, so only an essentially flat residual counts as a stall.
        if (static_cast<int>(residual_trace.size()) > kStallWindow) {
            const size_t n = residual_trace.size();
            const double prev_obj = result.objective_trace[n - 1 - kStallWindow];
            const double obj_change =
                std::abs(static_cast<double>(cur.objective) - prev_obj)
                / std::max(1.0, std::abs(static_cast<double>(cur.objective)));
            const double prev_res = residual_trace[n - 1 - kStallWindow];
            if (obj_change < config.objective_tol && residual >= (1.0 - 1e-6) * prev_res) {
                break;
            }
        }

        // Monotone step with halving.
        bool accepted = false;
        IterateState cand;
        while (epsilon >= kMinEpsilon) {
            const ComplexMatrix a =
                ComplexMatrix::Identity(d, d) + epsilon * t;
            ComplexMatrix next = a * cur.rho * a;
            next /= next.trace().real();
            next = 0.5 * (next + next.adjoint().eval());
            cand = evaluate(std::move(next), data, pom, config.lambda);
            if (cand.objective >= cur.objective) {
                accepted = true;
                break;
            }
            epsilon *= 0.5;
            streak = 0;
        }
        if (!accepted) {
            break;  // no direction of ascent at representable step sizes
        }

        cur = std::move(cand);
        result.iterations = iter + 1;
        result.objective_trace.push_back(static_cast<double>(cur.objective));
        result.min_eigenvalue_seen =
            std::min(result.min_eigenvalue_seen, cur.spec.eigenvalues[d - 1]);
        result.max_trace_deviation = std::max(
            result.max_trace_deviation, std::abs(cur.rho.trace().real() - 1.0));

        if (++streak >= kGrowStreak) {
            epsilon = std::min(2.0 * epsilon, kMaxEpsilon);
            streak = 0;
        }
    }

    result.residual = residual;
    result.estimator = DensityMatrix(HermitianOperator(cur.rho, 1e-6));
    return result;
}

}  // namespace

ReconstructionResult mlme_reconstruct(const CountData& data, const Pom& pom,
                                      const IterationConfig& config) {
    return run_iteration(data, pom, config);
}

ReconstructionResult ml_reconstruct(const CountData& data, const Pom& pom,
                                    IterationConfig config) {
    config.lambda = 0.0;
    return run_iteration(data, pom, config);
}

double extremal_residual(const DensityMatrix& rho, const CountData& data, const Pom& pom,
                         double lambda, double log_floor) {
    const HermitianOperator t = t_operator(rho, data, pom, lambda, log_floor);
    return (t.matrix() * rho.matrix()).norm();
}

DensityMatrix max_ent_state(const MaxEntParams& params, const Pom& pom) {
    if (static_cast<Index>(params.mus.size()) != pom.size()) {
        throw DimensionMismatch("max_ent_state: multiplier count does not match POM size");
    }
    const Index d = pom.dim();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (Index j = 0; j < pom.size(); ++j) {
        h += params.mus[static_cast<size_t>(j)] * pom.effect(j).matrix();
    }
    const Spectrum spec = spectral_decompose(HermitianOperator(h));
    const double shift = spec.eigenvalues[0];
    RealVector weights(d);
    for (Index i = 0; i < d; ++i) {
        weights[i] = std::exp(spec.eigenvalues[i] - shift);
    }
    weights /= weights.sum();
    return DensityMatrix(HermitianOperator(
        spec.eigenvectors * weights.asDiagonal() * spec.eigenvectors.adjoint()));
}

namespace {

struct DualPoint {
    RealVector mu;
    // log tr exp(H) - mu . f, in extended precision: near the optimum the
    // backtracking comparisons involve differences of order residual^2.
    long double dual = 0.0L;
    ComplexMatrix state;
    RealVector probs;
    double residual = 0.0;       // max_j |p_j - f_j|
};

DualPoint eval_dual(RealVector mu, const CountData& data, const Pom& pom) {
    const Index d = pom.dim();
    const Index k = pom.size();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (Index j = 0; j < k; ++j) {
        h += mu[j] * pom.effect(j).matrix();
    }
    const Spectrum spec = spectral_decompose(HermitianOperator(h, 1e-6));
    const double shift = spec.eigenvalues[0];
    long double z = 0.0L;
    RealVector weights(d);
    for (Index i = 0; i < d; ++i) {
        weights[i] = std::exp(spec.eigenvalues[i] - shift);
        z += std::exp(static_cast<long double>(spec.eigenvalues[i] - shift));
    }
    DualPoint point;
    point.mu = std::move(mu);
    point.state = spec.eigenvectors * (weights / static_cast<double>(z)).asDiagonal()
                  * spec.eigenvectors.adjoint();
    point.dual = static_cast<long double>(shift) + std::log(z);
    point.probs.resize(k);
    point.residual = 0.0;
    for (Index j = 0; j < k; ++j) {
        point.dual -= static_cast<long double>(point.mu[j])
                      * static_cast<long double>(data.frequency(j));
        point.probs[j] = (point.state * pom.effect(j).matrix()).trace().real();
        point.residual = std::max(point.residual,
                                  std::abs(point.probs[j] - data.frequency(j)));
    }
    return point;
}

}  // namespace

MaxEntResult standard_me_solve(const CountData& data, const Pom& pom, int max_iters,
                               double tol, double mu_bound) {
    if (data.size() != pom.size()) {
        throw DimensionMismatch("standard_me_solve: count length does not match POM size");
    }
    if (!(tol > 0.0) || !(mu_bound > 0.0)) {
        throw InvalidInput("standard_me_solve: tol and mu_bound must be positive");
    }
    const Index k = pom.size();

    DualPoint cur = eval_dual(RealVector::Zero(k), data, pom);
    double eta = 1.0;

    MaxEntResult result;
    result.status = MaxEntStatus::max_iters;
    for (int iter = 0;; ++iter) {
        result.iterations = iter;
        if (cur.residual <= tol) {
            result.status = MaxEntStatus::converged;
            break;
        }
        if (cur.mu.cwiseAbs().maxCoeff() > mu_bound) {
            result.status = MaxEntStatus::infeasible;
            break;
        }
        if (iter >= max_iters) {
            break;
        }

        RealVector grad(k);
        for (Index j = 0; j < k; ++j) {
            grad[j] = cur.probs[j] - data.frequency(j);
        }
        const double grad_norm2 = grad.squaredNorm();

        bool accepted = false;
        DualPoint cand;
        while (eta >= 1e-16) {
            cand = eval_dual(cur.mu - eta * grad, data, pom);
            if (cand.dual <= cur.dual
                              - static_cast<long double>(1e-4 * eta * grad_norm2)) {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) {
            break;  // dual cannot be decreased further
        }
        cur = std::move(cand);
        eta = std::min(2.0 * eta, 1e4);
    }

    result.params.mus.assign(cur.mu.data(), cur.mu.data() + cur.mu.size());
    result.residual = cur.residual;
    result.state = DensityMatrix(HermitianOperator(cur.state, 1e-6));
    return result;
}

}  // namespace mlme

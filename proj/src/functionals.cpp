#include "mlme/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mlme {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CountData CountData::from_counts(const std::vector<std::int64_t>& counts) {
    if (counts.empty()) {
        throw InvalidInput("count data must be nonempty");
    }
    double total = 0.0;
    for (auto n : counts) {
        if (n < 0) {
            throw InvalidInput("counts must be non-negative");
        }
        total += static_cast<double>(n);
    }
    if (total <= 0.0) {
        throw InvalidInput("total count must be positive");
    }
    CountData data;
    data.total_ = total;
    data.frequencies_.reserve(counts.size());
    for (auto n : counts) {
        data.frequencies_.push_back(static_cast<double>(n) / total);
    }
    return data;
}

CountData CountData::from_frequencies(std::vector<double> frequencies, double total) {
    if (frequencies.empty()) {
        throw InvalidInput("frequency data must be nonempty");
    }
    if (total <= 0.0) {
        throw InvalidInput("total must be positive");
    }
    double sum = 0.0;
    for (double f : frequencies) {
        if (f < 0.0) {
            throw InvalidInput("frequencies must be non-negative");
        }
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "frequencies sum to " << sum << ", expected 1";
        throw InvalidInput(msg.str());
    }
    CountData data;
    data.total_ = total;
    data.frequencies_ = std::move(frequencies);
    return data;
}

std::vector<double> CountData::counts() const {
    std::vector<double> out;
    out.reserve(frequencies_.size());
    for (double f : frequencies_) {
        out.push_back(f * total_);
    }
    return out;
}

Probabilities born_probabilities(const DensityMatrix& rho, const Pom& pom) {
    if (rho.dim() != pom.dim()) {
        throw DimensionMismatch("born_probabilities: state and POM dimensions differ");
    }
    Probabilities probs;
    probs.values.reserve(static_cast<size_t>(pom.size()));
    for (const auto& effect : pom.effects()) {
        const double p = hs_inner(rho.op(), effect);
        if (p < -1e-12) {
            std::ostringstream msg;
            msg << "Born probability " << p << " below tolerance";
            throw InvalidInput(msg.str());
        }
        probs.values.push_back(std::clamp(p, 0.0, 1.0));
    }
    return probs;
}

double normalized_log_likelihood(const CountData& data, const Probabilities& probs) {
    if (data.size() != probs.size()) {
        throw DimensionMismatch("normalized_log_likelihood: length mismatch");
    }
    double value = 0.0;
    for (Index j = 0; j < data.size(); ++j) {
        const double f = data.frequency(j);
        if (f == 0.0) {
            continue;
        }
        const double p = probs[j];
        if (p <= 0.0) {
            return -kInf;
        }
        value += f * std::log(p);
    }
    return value;
}

double von_neumann_entropy(const RealVector& eigenvalues) {
    double s = 0.0;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const double w = eigenvalues[i];
        if (w > 0.0) {
            s -= w * std::log(w);
        }
    }
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    return von_neumann_entropy(spectral_decompose(rho.op()).eigenvalues);
}

double relative_entropy(const CountData& data, const Probabilities& probs) {
    if (data.size() != probs.size()) {
        throw DimensionMismatch("relative_entropy: length mismatch");
    }
    double value = 0.0;
    for (Index j = 0; j < data.size(); ++j) {
        const double f = data.frequency(j);
        if (f == 0.0) {
            continue;
        }
        const double p = probs[j];
        if (p <= 0.0) {
            return kInf;
        }
        value += f * std::log(f / p);
    }
    return value;
}

double objective(double lambda, const DensityMatrix& rho, const CountData& data,
                 const Pom& pom) {
    if (lambda < 0.0) {
        throw InvalidInput("objective: lambda must be non-negative");
    }
    return lambda * von_neumann_entropy(rho)
           + normalized_log_likelihood(data, born_probabilities(rho, pom));
}

HermitianOperator r_operator(const DensityMatrix& rho, const CountData& data, const Pom& pom) {
    if (data.size() != pom.size()) {
        throw DimensionMismatch("r_operator: count length does not match POM size");
    }
    const Probabilities probs = born_probabilities(rho, pom);
    ComplexMatrix r = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (Index j = 0; j < pom.size(); ++j) {
        const double f = data.frequency(j);
        if (f == 0.0) {
            continue;
        }
        const double p = probs[j];
        if (p < Tolerances::defaults().probability_clamp) {
            std::ostringstream msg;
            msg << "outcome " << j << " (" << pom.labels()[static_cast<size_t>(j)]
                << ") has frequency " << f << " but probability " << p;
            throw ZeroProbabilityOutcome(msg.str());
        }
        r += (f / p) * pom.effect(j).matrix();
    }
    return HermitianOperator(std::move(r));
}

HermitianOperator t_operator(const DensityMatrix& rho, const CountData& data, const Pom& pom,
                             double lambda, double log_floor) {
    const HermitianOperator r = r_operator(rho, data, pom);
    ComplexMatrix t = r.matrix() - ComplexMatrix::Identity(rho.dim(), rho.dim());
    if (lambda != 0.0) {
        const HermitianOperator log_rho = matrix_log_on_support(rho, log_floor);
        const double mean_log = (rho.matrix() * log_rho.matrix()).trace().real();
        t -= lambda
             * (log_rho.matrix()
                - mean_log * ComplexMatrix::Identity(rho.dim(), rho.dim()));
    }
    return HermitianOperator(std::move(t));
}

HermitianOperator parity_operator(Index dim) {
    if (dim < 1) {
        throw InvalidInput("parity_operator: dim must be >= 1");
    }
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (Index n = 0; n < dim; ++n) {
        p(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    }
    return HermitianOperator(std::move(p));
}

double wigner_origin(const DensityMatrix& rho) {
    return 2.0 * (rho.matrix() * parity_operator(rho.dim()).matrix()).trace().real();
}

}  // namespace mlme

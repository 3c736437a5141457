#include "mlme/pom.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

namespace mlme {

Pom::Pom(Index dim, std::vector<HermitianOperator> effects, std::vector<std::string> labels,
         const Tolerances& tol)
    : dim_(dim), effects_(std::move(effects)), labels_(std::move(labels)) {
    if (dim_ < 1) {
        throw InvalidInput("POM dimension must be >= 1");
    }
    if (effects_.empty()) {
        throw InvalidInput("POM needs at least one effect");
    }
    if (labels_.empty()) {
        labels_.reserve(effects_.size());
        for (size_t j = 0; j < effects_.size(); ++j) {
            labels_.push_back(std::to_string(j));
        }
    }
    if (labels_.size() != effects_.size()) {
        throw InvalidInput("POM label count does not match effect count");
    }
    ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
    for (size_t j = 0; j < effects_.size(); ++j) {
        const auto& e = effects_[j];
        if (e.dim() != dim_) {
            std::ostringstream msg;
            msg << "effect " << j << " has dimension " << e.dim() << ", expected " << dim_;
            throw DimensionMismatch(msg.str());
        }
        const Spectrum spec = spectral_decompose(e);
        const double min_eig = spec.eigenvalues[spec.eigenvalues.size() - 1];
        if (min_eig < -tol.positivity) {
            std::ostringstream msg;
            msg << "effect " << j << " (" << labels_[j] << ") has negative eigenvalue "
                << min_eig;
            throw InvalidInput(msg.str());
        }
        sum += e.matrix();
    }
    closure_residual_ = (sum - ComplexMatrix::Identity(dim_, dim_)).norm();
    if (closure_residual_ > tol.pom_closure) {
        std::ostringstream msg;
        msg << "POM effects do not resolve the identity: |sum - 1|_F = "
            << closure_residual_;
        throw InvalidInput(msg.str());
    }
}

Pom trine_pom() {
    const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
    const double s3h = std::sqrt(3.0) / 2.0;
    std::vector<HermitianOperator> effects;
    effects.emplace_back((one + pauli_z()) / 3.0);
    effects.emplace_back((one + s3h * pauli_x() - 0.5 * pauli_z()) / 3.0);
    effects.emplace_back((one - s3h * pauli_x() - 0.5 * pauli_z()) / 3.0);
    return Pom(2, std::move(effects), {"0", "+", "-"});
}

Pom pauli_6_pom() {
    const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
    std::vector<HermitianOperator> effects;
    std::vector<std::string> labels;
    const std::pair<ComplexMatrix, std::string> axes[] = {
        {pauli_x(), "x"}, {pauli_y(), "y"}, {pauli_z(), "z"}};
    for (const auto& [sigma, name] : axes) {
        effects.emplace_back((one + sigma) / 6.0);
        labels.push_back("+" + name);
        effects.emplace_back((one - sigma) / 6.0);
        labels.push_back("-" + name);
    }
    return Pom(2, std::move(effects), std::move(labels));
}

RealVector hermite_functions(Index dim, double x) {
    if (dim < 1) {
        throw InvalidInput("hermite_functions: dim must be >= 1");
    }
    RealVector psi(dim);
    psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    if (dim > 1) {
        psi[1] = x * std::sqrt(2.0) * psi[0];
    }
    for (Index n = 1; n + 1 < dim; ++n) {
        psi[n + 1] = x * std::sqrt(2.0 / (n + 1.0)) * psi[n]
                     - std::sqrt(n / (n + 1.0)) * psi[n - 1];
    }
    return psi;
}

double hermite_function(int n, double x) {
    if (n < 0) {
        throw InvalidInput("hermite_function: order must be non-negative");
    }
    return hermite_functions(n + 1, x)[n];
}

namespace {

ComplexVector quadrature_state(double theta, double x, Index dim) {
    const RealVector psi = hermite_functions(dim, x);
    ComplexVector v(dim);
    for (Index m = 0; m < dim; ++m) {
        v[m] = psi[m] * std::exp(Complex(0.0, theta * static_cast<double>(m)));
    }
    return v;
}

}  // namespace

HermitianOperator quadrature_projector(double theta, double x, Index dim) {
    const ComplexVector v = quadrature_state(theta, x, dim);
    return HermitianOperator(v * v.adjoint());
}

std::vector<QuadratureSetting> default_homodyne_settings() {
    // The x grid must avoid +-x pairs and 0: Hermite-function products have
    // definite parity, so a sign-symmetric grid samples too few independent
    // profiles and the 20 projectors stop spanning the d = 4 operator space.
    std::vector<QuadratureSetting> settings;
    for (int k = 0; k < 4; ++k) {
        settings.push_back({k * std::numbers::pi / 4.0, {-2.2, -1.1, 0.3, 1.2, 2.1}});
    }
    return settings;
}

namespace {

void validate_settings(const std::vector<QuadratureSetting>& settings) {
    if (settings.empty()) {
        throw InvalidSettings("homodyne settings must be nonempty");
    }
    for (const auto& s : settings) {
        if (s.xs.empty()) {
            throw InvalidSettings("quadrature setting has no x values");
        }
        for (size_t i = 1; i < s.xs.size(); ++i) {
            if (!(s.xs[i] > s.xs[i - 1])) {
                throw InvalidSettings("quadrature x values must be strictly increasing");
            }
        }
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Adaptive Simpson on a matrix-valued integrand, max-entry error control.
class MatrixQuadrature {
public:
    using Fn = std::function<RealMatrix(double)>;

    MatrixQuadrature(Fn f, double abs_tol) : f_(std::move(f)), tol_(abs_tol) {}

    RealMatrix integrate(double a, double b) const {
        const RealMatrix fa = f_(a);
        const RealMatrix fm = f_(0.5 * (a + b));
        const RealMatrix fb = f_(b);
        const RealMatrix s = simpson(a, b, fa, fm, fb);
        return refine(a, b, fa, fm, fb, s, tol_, 0);
    }

private:
    static RealMatrix simpson(double a, double b, const RealMatrix& fa, const RealMatrix& fm,
                              const RealMatrix& fb) {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    RealMatrix refine(double a, double b, const RealMatrix& fa, const RealMatrix& fm,
                      const RealMatrix& fb, const RealMatrix& whole, double tol,
                      int depth) const {
        const double m = 0.5 * (a + b);
        const RealMatrix flm = f_(0.5 * (a + m));
        const RealMatrix frm = f_(0.5 * (m + b));
        const RealMatrix left = simpson(a, m, fa, flm, fm);
        const RealMatrix right = simpson(m, b, fm, frm, fb);
        const RealMatrix err = left + right - whole;
        if (depth >= max_depth_ || err.cwiseAbs().maxCoeff() <= 15.0 * tol) {
            return left + right + err / 15.0;
        }
        return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
               + refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    Fn f_;
    double tol_;
    static constexpr int max_depth_ = 40;
};

// Beyond this the Fock-truncated wavefunctions are numerically zero.
double tail_cutoff(Index dim) {
    return std::sqrt(2.0 * static_cast<double>(dim) + 1.0) + 8.0;
}

HermitianOperator binned_effect(double theta, double lo, double hi, Index dim, double weight) {
    const double cutoff = tail_cutoff(dim);
    const double a = std::isinf(lo) ? -cutoff : lo;
    const double b = std::isinf(hi) ? cutoff : hi;
    MatrixQuadrature quad(
        [dim](double x) {
            const RealVector psi = hermite_functions(dim, x);
            return RealMatrix(psi * psi.transpose());
        },
        1e-12);
    const RealMatrix block = quad.integrate(a, b);
    ComplexMatrix effect(dim, dim);
    for (Index m = 0; m < dim; ++m) {
        for (Index n = 0; n < dim; ++n) {
            effect(m, n) = weight * block(m, n)
                           * std::exp(Complex(0.0, theta * static_cast<double>(m - n)));
        }
    }
    return HermitianOperator(effect);
}

}  // namespace

Pom homodyne_pom(const std::vector<QuadratureSetting>& settings, Index dim, HomodyneMode mode) {
    validate_settings(settings);
    if (dim < 2) {
        throw InvalidInput("homodyne_pom: dimension must be >= 2");
    }

    std::vector<HermitianOperator> effects;
    std::vector<std::string> labels;

    if (mode == HomodyneMode::scaled_complement) {
        ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
        for (const auto& s : settings) {
            for (double x : s.xs) {
                const HermitianOperator q = quadrature_projector(s.theta, x, dim);
                sum += q.matrix();
                effects.push_back(q);
                labels.push_back("theta=" + format_double(s.theta) + " x=" + format_double(x));
            }
        }
        const Spectrum spec = spectral_decompose(HermitianOperator(sum));
        const double scale = 1.0 / spec.eigenvalues[0];
        for (auto& e : effects) {
            e = HermitianOperator(scale * e.matrix());
        }
        effects.emplace_back(ComplexMatrix::Identity(dim, dim) - scale * sum);
        labels.push_back("complement");
    } else {
        const double inf = std::numeric_limits<double>::infinity();
        const double weight = 1.0 / static_cast<double>(settings.size());
        for (const auto& s : settings) {
            std::vector<double> edges{-inf};
            for (size_t i = 1; i < s.xs.size(); ++i) {
                edges.push_back(0.5 * (s.xs[i - 1] + s.xs[i]));
            }
            edges.push_back(inf);
            for (size_t i = 0; i < s.xs.size(); ++i) {
                effects.push_back(binned_effect(s.theta, edges[i], edges[i + 1], dim, weight));
                labels.push_back("theta=" + format_double(s.theta) + " bin["
                                 + format_double(edges[i]) + ","
                                 + format_double(edges[i + 1]) + "]");
            }
        }
    }
    return Pom(dim, std::move(effects), std::move(labels));
}

Pom project_pom(const Pom& pom, Index dim) {
    if (dim < 1 || dim > pom.dim()) {
        throw InvalidInput("project_pom: target dimension out of range");
    }
    std::vector<HermitianOperator> effects;
    std::vector<std::string> labels = pom.labels();
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    for (const auto& e : pom.effects()) {
        ComplexMatrix block = e.matrix().topLeftCorner(dim, dim);
        sum += block;
        effects.emplace_back(std::move(block));
    }
    const ComplexMatrix deficit = ComplexMatrix::Identity(dim, dim) - sum;
    if (deficit.norm() > Tolerances::defaults().pom_closure) {
        effects.emplace_back(deficit);
        labels.push_back("deficit");
    }
    return Pom(dim, std::move(effects), std::move(labels));
}

GramAnalysis gram_analysis(const std::vector<HermitianOperator>& effects, double tol) {
    if (effects.empty()) {
        throw InvalidInput("gram_analysis: no effects");
    }
    const Index k = static_cast<Index>(effects.size());
    RealMatrix gram(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = i; j < k; ++j) {
            gram(i, j) = gram(j, i) = hs_inner(effects[static_cast<size_t>(i)],
                                               effects[static_cast<size_t>(j)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(gram);
    if (solver.info() != Eigen::Success) {
        throw Error("gram_analysis: eigendecomposition failed");
    }
    GramAnalysis analysis;
    analysis.gram = std::move(gram);
    analysis.eigenvalues = solver.eigenvalues().reverse();
    if (tol <= 0.0) {
        tol = static_cast<double>(k) * std::numeric_limits<double>::epsilon()
              * std::max(analysis.eigenvalues[0], 0.0);
    }
    analysis.rank_tolerance = tol;
    analysis.informational_rank =
        (analysis.eigenvalues.array() > tol).count();
    return analysis;
}

GramAnalysis gram_analysis(const Pom& pom, double tol) {
    return gram_analysis(pom.effects(), tol);
}

namespace {

// Coordinates of a Hermitian matrix in the canonical trace-orthonormal basis
// (diagonal units, then sqrt(2)-scaled real/imag off-diagonal pairs); an
// isometry, so tr(A B) equals the dot product of coordinate vectors.
RealVector hermitian_to_coords(const ComplexMatrix& h) {
    const Index d = h.rows();
    RealVector v(d * d);
    Index at = 0;
    for (Index i = 0; i < d; ++i) {
        v[at++] = h(i, i).real();
    }
    const double s2 = std::sqrt(2.0);
    for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) {
            v[at++] = s2 * h(i, j).real();
            v[at++] = s2 * h(i, j).imag();
        }
    }
    return v;
}

ComplexMatrix coords_to_hermitian(const RealVector& v, Index d) {
    ComplexMatrix h(d, d);
    Index at = 0;
    for (Index i = 0; i < d; ++i) {
        h(i, i) = v[at++];
    }
    const double inv_s2 = 1.0 / std::sqrt(2.0);
    for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) {
            const double re = v[at++] * inv_s2;
            const double im = v[at++] * inv_s2;
            h(i, j) = Complex(re, im);
            h(j, i) = Complex(re, -im);
        }
    }
    return h;
}

}  // namespace

OperatorBasis build_operator_basis(const Pom& pom, const GramAnalysis& analysis) {
    const Index k = pom.size();
    const Index d = pom.dim();
    const Index n_meas = analysis.informational_rank;
    if (analysis.gram.rows() != k) {
        throw DimensionMismatch("build_operator_basis: analysis does not match POM size");
    }

    // Gram eigenpairs, descending to mirror the analysis rank decision.
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(analysis.gram);
    const RealVector evals = solver.eigenvalues().reverse();
    const RealMatrix evecs = solver.eigenvectors().rowwise().reverse();

    OperatorBasis basis;
    basis.dim = d;
    basis.expansion.resize(k, n_meas);
    for (Index a = 0; a < n_meas; ++a) {
        const double sigma = evals[a];
        if (!(sigma > 0.0)) {
            throw RankDeficiencyMismatch(
                "build_operator_basis: non-positive Gram eigenvalue inside the measurement rank");
        }
        ComplexMatrix gamma = ComplexMatrix::Zero(d, d);
        for (Index j = 0; j < k; ++j) {
            gamma += evecs(j, a) * pom.effect(j).matrix();
        }
        gamma /= std::sqrt(sigma);
        basis.measurement.emplace_back(std::move(gamma));
        basis.expansion.col(a) = std::sqrt(sigma) * evecs.col(a);
    }

    // Complete to D^2 operators: orthonormal complement of the measurement
    // span in canonical coordinates via a Householder QR.
    if (n_meas < d * d) {
        RealMatrix g(d * d, n_meas);
        for (Index a = 0; a < n_meas; ++a) {
            g.col(a) = hermitian_to_coords(basis.measurement[static_cast<size_t>(a)].matrix());
        }
        Eigen::HouseholderQR<RealMatrix> qr(g);
        const RealMatrix q = qr.householderQ();
        for (Index c = n_meas; c < d * d; ++c) {
            basis.complement.emplace_back(coords_to_hermitian(q.col(c), d));
        }
    }

    // Consistency gates: trace-orthonormality of the full set and exact
    // reproduction of every effect. Failure means the rank tolerance cut the
    // spectrum in the wrong place.
    const Tolerances& tol = Tolerances::defaults();
    std::vector<const HermitianOperator*> all;
    for (const auto& op : basis.measurement) all.push_back(&op);
    for (const auto& op : basis.complement) all.push_back(&op);
    for (size_t i = 0; i < all.size(); ++i) {
        for (size_t j = i; j < all.size(); ++j) {
            const double want = i == j ? 1.0 : 0.0;
            if (std::abs(hs_inner(*all[i], *all[j]) - want) > tol.orthonormality) {
                throw RankDeficiencyMismatch(
                    "build_operator_basis: basis failed trace-orthonormality; "
                    "rank tolerance is unsuitable");
            }
        }
    }
    for (Index j = 0; j < k; ++j) {
        ComplexMatrix recon = ComplexMatrix::Zero(d, d);
        for (Index a = 0; a < n_meas; ++a) {
            recon += basis.expansion(j, a) * basis.measurement[static_cast<size_t>(a)].matrix();
        }
        if ((recon - pom.effect(j).matrix()).norm() > tol.orthonormality) {
            throw RankDeficiencyMismatch(
                "build_operator_basis: effect not reproduced by the measurement basis; "
                "rank tolerance is unsuitable");
        }
    }
    return basis;
}

StateDecomposition decompose_state(const DensityMatrix& rho, const OperatorBasis& basis) {
    if (rho.dim() != basis.dim) {
        throw DimensionMismatch("decompose_state: state and basis dimensions differ");
    }
    StateDecomposition dec;
    ComplexMatrix ml = ComplexMatrix::Zero(basis.dim, basis.dim);
    for (const auto& gamma : basis.measurement) {
        const double c = hs_inner(rho.op(), gamma);
        dec.ml_coeffs.push_back(c);
        ml += c * gamma.matrix();
    }
    ComplexMatrix me = ComplexMatrix::Zero(basis.dim, basis.dim);
    for (const auto& gamma : basis.complement) {
        const double c = hs_inner(rho.op(), gamma);
        dec.me_coeffs.push_back(c);
        me += c * gamma.matrix();
    }
    dec.ml_part = HermitianOperator(std::move(ml));
    dec.me_part = HermitianOperator(std::move(me));
    return dec;
}

}  // namespace mlme

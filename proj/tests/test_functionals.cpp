#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "mlme/functionals.hpp"
#include "test_support.hpp"

using namespace mlme;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2 * panels);
    double sum = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) {
        sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}
}  // namespace

TEST_CASE("count data") {
    const CountData data = CountData::from_counts({6, 2, 1});
    CHECK(data.total() == doctest::Approx(9.0));
    CHECK(data.frequency(0) == doctest::Approx(2.0 / 3.0));
    CHECK(data.frequency(1) == doctest::Approx(2.0 / 9.0));
    CHECK(data.frequency(2) == doctest::Approx(1.0 / 9.0));

    CHECK_THROWS_AS(CountData::from_counts({}), InvalidInput);
    CHECK_THROWS_AS(CountData::from_counts({1, -1}), InvalidInput);
    CHECK_THROWS_AS(CountData::from_counts({0, 0}), InvalidInput);
    CHECK_THROWS_AS(CountData::from_frequencies({0.5, 0.6}), InvalidInput);
    CHECK_NOTHROW(CountData::from_frequencies({0.5, 0.5}, 100.0));
}

TEST_CASE("born probabilities") {
    const Pom trine = trine_pom();
    SUBCASE("maximally mixed is uniform on the trine") {
        const Probabilities p = born_probabilities(DensityMatrix::maximally_mixed(2), trine);
        for (Index j = 0; j < 3; ++j) {
            CHECK(p[j] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        }
    }
    SUBCASE("|0><0| sees effect 0 with probability 2/3") {
        ComplexMatrix m = ComplexMatrix::Zero(2, 2);
        m(0, 0) = 1.0;
        const Probabilities p = born_probabilities(DensityMatrix::from_matrix(m), trine);
        CHECK(p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("single-outcome POM is certain") {
        const Pom single(2, {HermitianOperator::identity(2)}, {"all"});
        std::mt19937_64 rng(3);
        const Probabilities p = born_probabilities(test::random_state(2, rng), single);
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(born_probabilities(DensityMatrix::maximally_mixed(3), trine),
                        DimensionMismatch);
    }
}

TEST_CASE("normalized log-likelihood") {
    const CountData half = CountData::from_frequencies({0.5, 0.5});
    CHECK(normalized_log_likelihood(half, {{0.5, 0.5}})
          == doctest::Approx(std::log(0.5)).epsilon(1e-14));

    const CountData certain = CountData::from_frequencies({1.0, 0.0});
    CHECK(normalized_log_likelihood(certain, {{0.5, 0.5}})
          == doctest::Approx(std::log(0.5)).epsilon(1e-14));

    // Direct evaluation of sum f log f for f = (2/3, 2/9, 1/9).
    const CountData trine_counts = CountData::from_counts({6, 2, 1});
    const Probabilities same{{2.0 / 3.0, 2.0 / 9.0, 1.0 / 9.0}};
    CHECK(normalized_log_likelihood(trine_counts, same)
          == doctest::Approx(-0.8486855577264171).epsilon(1e-12));

    CHECK(normalized_log_likelihood(certain, {{0.0, 1.0}}) == -kInf);
    CHECK_THROWS_AS(normalized_log_likelihood(half, {{1.0}}), DimensionMismatch);
}

TEST_CASE("von Neumann entropy") {
    ComplexMatrix pure = ComplexMatrix::Zero(2, 2);
    pure(0, 0) = 1.0;
    CHECK(von_neumann_entropy(DensityMatrix::from_matrix(pure)) == doctest::Approx(0.0));
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(5))
          == doctest::Approx(std::log(5.0)).epsilon(1e-14));

    ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
    diag(0, 0) = 0.75;
    diag(1, 1) = 0.25;
    CHECK(von_neumann_entropy(DensityMatrix::from_matrix(diag))
          == doctest::Approx(0.56233514461880).epsilon(1e-12));
}

TEST_CASE("relative entropy") {
    const CountData f = CountData::from_frequencies({1.0, 0.0});
    CHECK(relative_entropy(f, {{1.0, 0.0}}) == doctest::Approx(0.0));
    CHECK(relative_entropy(f, {{0.5, 0.5}}) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(relative_entropy(CountData::from_frequencies({0.5, 0.5}), {{0.0, 1.0}}) == kInf);
}

TEST_CASE("identity: relative entropy + log-likelihood = sum f log f") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> f{u(rng), u(rng), u(rng), u(rng)};
        std::vector<double> p{u(rng), u(rng), u(rng), u(rng)};
        double fs = 0.0;
        double ps = 0.0;
        for (int i = 0; i < 4; ++i) {
            fs += f[i];
            ps += p[i];
        }
        double f_log_f = 0.0;
        for (int i = 0; i < 4; ++i) {
            f[i] /= fs;
            p[i] /= ps;
            f_log_f += f[i] * std::log(f[i]);
        }
        const CountData data = CountData::from_frequencies(f);
        const Probabilities probs{p};
        CHECK(relative_entropy(data, probs) + normalized_log_likelihood(data, probs)
              == doctest::Approx(f_log_f).epsilon(1e-12));
        // Gibbs: the likelihood is maximized at p = f.
        CHECK(normalized_log_likelihood(data, probs) <= f_log_f + 1e-12);
    }
}

TEST_CASE("objective functional") {
    const Pom trine = trine_pom();
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
    const CountData uniform = CountData::from_frequencies({1.0 / 3, 1.0 / 3, 1.0 / 3});

    CHECK(objective(0.0, mixed, uniform, trine)
          == doctest::Approx(normalized_log_likelihood(
                 uniform, born_probabilities(mixed, trine))));
    CHECK(objective(1.0, mixed, uniform, trine)
          == doctest::Approx(std::log(2.0) + std::log(1.0 / 3.0)).epsilon(1e-13));

    // Linearity in lambda.
    std::mt19937_64 rng(5);
    const DensityMatrix rho = test::random_state(2, rng);
    const double s = von_neumann_entropy(rho);
    for (double lambda : {0.3, 2.0}) {
        CHECK(objective(lambda, rho, uniform, trine) - objective(0.0, rho, uniform, trine)
              == doctest::Approx(lambda * s).epsilon(1e-12));
    }
    CHECK_THROWS_AS(objective(-1.0, mixed, uniform, trine), InvalidInput);
}

TEST_CASE("R operator") {
    const Pom trine = trine_pom();
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);

    SUBCASE("f = p gives the identity") {
        const CountData uniform = CountData::from_frequencies({1.0 / 3, 1.0 / 3, 1.0 / 3});
        const HermitianOperator r = r_operator(mixed, uniform, trine);
        CHECK((r.matrix() - ComplexMatrix::Identity(2, 2)).norm() <= 1e-12);
    }
    SUBCASE("weights f_j / p_j") {
        const CountData data = CountData::from_counts({6, 2, 1});
        const HermitianOperator r = r_operator(mixed, data, trine);
        const ComplexMatrix want = 2.0 * trine.effect(0).matrix()
                                   + (2.0 / 3.0) * trine.effect(1).matrix()
                                   + (1.0 / 3.0) * trine.effect(2).matrix();
        CHECK((r.matrix() - want).norm() <= 1e-12);
    }
    SUBCASE("tr(R rho) = 1 on random inputs") {
        std::mt19937_64 rng(43);
        for (int rep = 0; rep < 10; ++rep) {
            const DensityMatrix rho = test::random_state(2, rng);
            std::vector<double> f{0.2, 0.5, 0.3};
            const CountData data = CountData::from_frequencies(f);
            const HermitianOperator r = r_operator(rho, data, trine);
            CHECK((r.matrix() * rho.matrix()).trace().real()
                  == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("zero probability with nonzero frequency") {
        ComplexMatrix pure = ComplexMatrix::Zero(2, 2);
        pure(1, 1) = 1.0;  // orthogonal to effect 0's support direction? use projective POM
        ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
        p0(0, 0) = 1.0;
        ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
        p1(1, 1) = 1.0;
        const Pom projective(2, {HermitianOperator(p0), HermitianOperator(p1)}, {"0", "1"});
        const CountData data = CountData::from_counts({5, 5});
        CHECK_THROWS_AS(
            r_operator(DensityMatrix::from_matrix(pure), data, projective),
            ZeroProbabilityOutcome);
    }
}

TEST_CASE("T operator") {
    const Pom trine = trine_pom();
    const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
    const CountData uniform = CountData::from_frequencies({1.0 / 3, 1.0 / 3, 1.0 / 3});

    SUBCASE("lambda = 0 with f = p vanishes") {
        CHECK(t_operator(mixed, uniform, trine, 0.0).frobenius_norm() <= 1e-12);
    }
    SUBCASE("maximally mixed state kills the entropy term") {
        const CountData data = CountData::from_counts({6, 2, 1});
        const ComplexMatrix t5 = t_operator(mixed, data, trine, 5.0).matrix();
        const ComplexMatrix r_minus_one =
            r_operator(mixed, data, trine).matrix() - ComplexMatrix::Identity(2, 2);
        CHECK((t5 - r_minus_one).norm() <= 1e-12);
    }
    SUBCASE("tr(T rho) = 0 on random inputs") {
        std::mt19937_64 rng(47);
        for (int rep = 0; rep < 10; ++rep) {
            const DensityMatrix rho = test::random_state(2, rng);
            const CountData data = CountData::from_counts({3, 4, 5});
            const HermitianOperator t = t_operator(rho, data, trine, 0.7);
            CHECK(std::abs((t.matrix() * rho.matrix()).trace().real()) <= 1e-9);
        }
    }
}

TEST_CASE("directional derivative of the objective matches the T-gradient form") {
    // d/dt I(lambda; rho + t Delta) = tr(Delta (R - 1 - lambda(log rho - tr(rho log rho))))
    // for traceless Delta.
    const Pom trine = trine_pom();
    std::mt19937_64 rng(53);
    const CountData data = CountData::from_counts({4, 3, 3});
    for (double lambda : {0.0, 0.1, 1.0}) {
        for (int rep = 0; rep < 7; ++rep) {
            // Full-rank state away from the boundary.
            const ComplexMatrix base = 0.6 * DensityMatrix::maximally_mixed(2).matrix()
                                       + 0.4 * test::random_state(2, rng).matrix();
            const DensityMatrix rho = DensityMatrix::from_matrix(base);
            ComplexMatrix delta = test::random_traceless_hermitian(2, rng);
            delta /= delta.norm();

            const double t = 1e-6;
            const DensityMatrix plus = DensityMatrix::from_matrix(base + t * delta);
            const DensityMatrix minus = DensityMatrix::from_matrix(base - t * delta);
            const double fd = (objective(lambda, plus, data, trine)
                               - objective(lambda, minus, data, trine))
                              / (2.0 * t);

            const HermitianOperator grad = t_operator(rho, data, trine, lambda);
            const double analytic = (delta * grad.matrix()).trace().real();
            CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
        }
    }
}

TEST_CASE("parity operator") {
    SUBCASE("diagonal signs") {
        const HermitianOperator p = parity_operator(3);
        CHECK(p.matrix()(0, 0).real() == doctest::Approx(1.0));
        CHECK(p.matrix()(1, 1).real() == doctest::Approx(-1.0));
        CHECK(p.matrix()(2, 2).real() == doctest::Approx(1.0));
    }
    SUBCASE("vacuum only") {
        CHECK(parity_operator(1).matrix()(0, 0).real() == doctest::Approx(1.0));
    }
    SUBCASE("involution") {
        const ComplexMatrix p = parity_operator(4).matrix();
        CHECK((p * p - ComplexMatrix::Identity(4, 4)).norm() <= 1e-15);
    }
    SUBCASE("matches the quadrature-integral oracle") {
        // P_mn = int dx psi_m(x) psi_n(-x) at theta = 0.
        const Index dim = 3;
        const ComplexMatrix p = parity_operator(dim).matrix();
        for (Index m = 0; m < dim; ++m) {
            for (Index n = 0; n < dim; ++n) {
                const double integral = simpson(
                    [&](double x) {
                        return hermite_function(static_cast<int>(m), x)
                               * hermite_function(static_cast<int>(n), -x);
                    },
                    -10.0, 10.0, 2000);
                CHECK(p(m, n).real() == doctest::Approx(integral).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("Wigner function at the origin") {
    ComplexMatrix vac = ComplexMatrix::Zero(2, 2);
    vac(0, 0) = 1.0;
    CHECK(wigner_origin(DensityMatrix::from_matrix(vac)) == doctest::Approx(2.0));

    ComplexMatrix one_photon = ComplexMatrix::Zero(2, 2);
    one_photon(1, 1) = 1.0;
    CHECK(wigner_origin(DensityMatrix::from_matrix(one_photon)) == doctest::Approx(-2.0));

    CHECK(wigner_origin(DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.0));

    SUBCASE("linear in the state and bounded by +-2") {
        std::mt19937_64 rng(59);
        const DensityMatrix a = test::random_state(4, rng);
        const DensityMatrix b = test::random_state(4, rng);
        const double wa = wigner_origin(a);
        const double wb = wigner_origin(b);
        CHECK(std::abs(wa) <= 2.0 + 1e-12);
        CHECK(std::abs(wb) <= 2.0 + 1e-12);
        const DensityMatrix mix =
            DensityMatrix::from_matrix(0.25 * a.matrix() + 0.75 * b.matrix());
        CHECK(wigner_origin(mix) == doctest::Approx(0.25 * wa + 0.75 * wb).epsilon(1e-12));
    }
}

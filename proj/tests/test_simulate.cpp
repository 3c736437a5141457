#include <doctest.h>

#include <cmath>

#include "mlme/simulate.hpp"

using namespace mlme;

TEST_CASE("random_density") {
    SUBCASE("valid, full rank, deterministic per seed") {
        const DensityMatrix a = random_density(4, 12345);
        const DensityMatrix b = random_density(4, 12345);
        CHECK((a.matrix() - b.matrix()).norm() == 0.0);
        CHECK(a.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-14));
        const Spectrum s = spectral_decompose(a.op());
        CHECK(s.eigenvalues[3] > 0.0);

        const DensityMatrix c = random_density(4, 12346);
        CHECK((a.matrix() - c.matrix()).norm() > 1e-3);
    }
    SUBCASE("dimension one has a single state") {
        const DensityMatrix one = random_density(1, 7);
        CHECK(one.matrix()(0, 0).real() == doctest::Approx(1.0));
    }
}

TEST_CASE("sample_counts") {
    const Pom trine = trine_pom();
    SUBCASE("multinomial closure") {
        const CountData data = sample_counts(random_density(2, 5), trine, 9, 99);
        double total = 0.0;
        for (double c : data.counts()) {
            total += c;
            CHECK(c == doctest::Approx(std::round(c)));  // integral counts
        }
        CHECK(total == doctest::Approx(9.0));
    }
    SUBCASE("degenerate distribution lands in one bin") {
        ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
        p0(0, 0) = 1.0;
        ComplexMatrix p1 = ComplexMatrix::Zero(2, 2);
        p1(1, 1) = 1.0;
        const Pom projective(2, {HermitianOperator(p0), HermitianOperator(p1)}, {"0", "1"});
        const CountData data =
            sample_counts(DensityMatrix::from_matrix(p0), projective, 1000, 3);
        CHECK(data.counts()[0] == doctest::Approx(1000.0));
        CHECK(data.counts()[1] == doctest::Approx(0.0));
    }
    SUBCASE("empirical frequencies approach the Born distribution") {
        const DensityMatrix rho = random_density(2, 17);
        const Probabilities p = born_probabilities(rho, trine);
        const std::int64_t n = 1000000;
        const CountData data = sample_counts(rho, trine, n, 2024);
        for (Index j = 0; j < 3; ++j) {
            const double se = std::sqrt(p[j] * (1.0 - p[j]) / static_cast<double>(n));
            CHECK(std::abs(data.frequency(j) - p[j]) <= 3.0 * se);
        }
    }
    SUBCASE("identical seeds give identical draws") {
        const DensityMatrix rho = random_density(2, 21);
        const CountData a = sample_counts(rho, trine, 1000, 77);
        const CountData b = sample_counts(rho, trine, 1000, 77);
        CHECK(a.counts() == b.counts());
    }
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("lambda_sweep") {
    ExperimentConfig config;
    config.dim_true = 3;
    config.copies = 2000;
    config.trials = 2;
    config.seed = 11;

    SUBCASE("structure, determinism and trend") {
        const std::vector<double> lambdas{1e-3, 1e-1, 10.0};
        const auto records = lambda_sweep(config, lambdas);
        REQUIRE(records.size() == 3);
        for (size_t i = 0; i < 3; ++i) {
            CHECK(records[i].key == lambdas[i]);
            CHECK(records[i].trials == 2);
            CHECK(records[i].failures == 0);
            CHECK_FALSE(records[i].complete.has_value());
        }
        // S grows, logL falls with lambda.
        CHECK(records[0].mean_entropy <= records[1].mean_entropy + 1e-9);
        CHECK(records[1].mean_entropy <= records[2].mean_entropy + 1e-9);
        CHECK(records[0].mean_loglik >= records[1].mean_loglik - 1e-9);
        CHECK(records[1].mean_loglik >= records[2].mean_loglik - 1e-9);
        // S at a huge weight approaches log(dim).
        CHECK(records[2].mean_entropy == doctest::Approx(std::log(3.0)).epsilon(1e-2));

        const auto again = lambda_sweep(config, lambdas);
        for (size_t i = 0; i < 3; ++i) {
            CHECK(records[i].mean_entropy == again[i].mean_entropy);
            CHECK(records[i].mean_trace_distance == again[i].mean_trace_distance);
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(lambda_sweep(config, {}), InvalidInput);
        CHECK_THROWS_AS(lambda_sweep(config, {0.0, 1.0}), InvalidInput);
        CHECK_THROWS_AS(lambda_sweep(config, {1.0, 0.5}), InvalidInput);
        config.trials = 0;
        CHECK_THROWS_AS(lambda_sweep(config, {1.0}), InvalidInput);
    }
}

TEST_CASE("dimension_sweep") {
    ExperimentConfig config;
    config.dim_true = 5;
    config.copies = 2000;
    config.trials = 2;
    config.seed = 13;
    config.recon_dims = {2, 3, 4, 5};

    SUBCASE("completeness boundary and record structure") {
        const auto records = dimension_sweep(config);
        REQUIRE(records.size() == 4);
        for (size_t i = 0; i < records.size(); ++i) {
            const auto& rec = records[i];
            CHECK(rec.key == doctest::Approx(static_cast<double>(config.recon_dims[i])));
            CHECK(rec.trials == 2);
            REQUIRE(rec.complete.has_value());
            REQUIRE(rec.truncation_bias.has_value());
            // Complete exactly in the 2-, 3-, 4-dimensional subspaces.
            CHECK(*rec.complete == (config.recon_dims[i] <= 4));
        }
        // Bias vanishes only at the full dimension.
        CHECK(*records[3].truncation_bias <= 1e-12);
        for (size_t i = 0; i + 1 < records.size(); ++i) {
            CHECK(*records[i].truncation_bias > 1e-4);
            CHECK(*records[i].truncation_bias >= *records[i + 1].truncation_bias - 1e-12);
        }
    }
    SUBCASE("validation") {
        config.recon_dims = {};
        CHECK_THROWS_AS(dimension_sweep(config), InvalidInput);
        config.recon_dims = {1};
        CHECK_THROWS_AS(dimension_sweep(config), InvalidInput);
        config.recon_dims = {6};
        CHECK_THROWS_AS(dimension_sweep(config), InvalidInput);
    }
}

TEST_CASE("likelihood plateau under small entropy weights") {
    // Converged runs at D = 5, N = 1e4: the log-likelihood is flat across the
    // small-lambda decades, while the entropy still moves (its plateau sets
    // in orders of magnitude lower); the entropy change per decade shrinks
    // toward lambda -> 0.
    const Index dim = 5;
    const Pom pom = homodyne_pom(default_homodyne_settings(), dim);
    const DensityMatrix truth = random_density(dim, derive_seed(42, 0));
    const CountData data = sample_counts(truth, pom, 10000, derive_seed(42, 1));

    IterationConfig it;
    it.max_iters = 400000;
    std::vector<double> entropy;
    std::vector<double> loglik;
    for (double lambda : {1e-6, 1e-5, 1e-4}) {
        IterationConfig cfg = it;
        cfg.lambda = lambda;
        const ReconstructionResult res = mlme_reconstruct(data, pom, cfg);
        CHECK(res.converged);
        entropy.push_back(von_neumann_entropy(res.estimator));
        loglik.push_back(
            normalized_log_likelihood(data, born_probabilities(res.estimator, pom)));
    }
    CHECK(std::abs(loglik[2] - loglik[1]) <= 1e-3);
    CHECK(std::abs(loglik[1] - loglik[0]) <= 1e-3);
    CHECK(std::abs(entropy[2] - entropy[1]) <= 0.2);
    CHECK(entropy[1] - entropy[0] < entropy[2] - entropy[1]);
}

TEST_CASE("reconstruction at the true dimension from noiseless frequencies is consistent") {
    // The dimension-sweep consistency oracle, run on the direct path: exact
    // Born frequencies at d = dim_true must reproduce the true state.
    const Index dim = 4;
    const Pom pom = homodyne_pom(default_homodyne_settings(), dim);
    const DensityMatrix truth = random_density(dim, 4242);
    const Probabilities p = born_probabilities(truth, pom);

    IterationConfig it;
    it.lambda = 1e-6;
    it.max_iters = 200000;
    const ReconstructionResult res =
        mlme_reconstruct(CountData::from_frequencies(p.values), pom, it);
    CHECK(trace_distance(res.estimator, truth) <= 1e-3);
}

TEST_CASE("a fixed true state overrides the seeded draw") {
    ExperimentConfig config;
    config.dim_true = 2;
    config.pom_spec.kind = PomSpec::Kind::trine;
    config.copies = 500;
    config.trials = 1;
    config.seed = 3;
    config.true_state = DensityMatrix::maximally_mixed(2);

    const auto records = lambda_sweep(config, {1e-2});
    REQUIRE(records.size() == 1);
    // Reconstructing near-uniform counts stays near the mixed state.
    CHECK(records[0].mean_trace_distance <= 0.1);

    config.true_state = DensityMatrix::maximally_mixed(3);
    CHECK_THROWS_AS(lambda_sweep(config, {1e-2}), InvalidInput);
}

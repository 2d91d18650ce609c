#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qml/families.hpp"
#include "qml/metrics.hpp"
#include "qml/oracle.hpp"

using namespace qml;

namespace {

ClassicalChannel small_channel(double alpha, std::uint64_t seed = 13)
{
    const CircuitFamily family = make_cond_phase_family(2, 3);
    const MeasurementDesign design = build_design(2, 4, DesignConstruction::haar_random, seed);
    return ClassicalChannel(family, design, alpha);
}

} // namespace

TEST_CASE("observation batches count outcomes and digest their content")
{
    ObservationBatch batch(3);
    CHECK(batch.alphabet_size() == 8);
    CHECK(batch.total() == 0);
    batch.add(5);
    batch.add(5);
    batch.add(1, 3);
    CHECK(batch.total() == 5);
    CHECK(batch.counts()[5] == 2);
    CHECK(batch.to_codes() == std::vector<std::uint64_t>{1, 1, 1, 5, 5});
    CHECK_THROWS_AS(batch.add(8), InvalidParameter);

    const std::vector<std::uint64_t> codes{1, 5, 1, 5, 1};
    const ObservationBatch same = ObservationBatch::from_codes(3, codes);
    CHECK(same.digest() == batch.digest()); // order never matters

    ObservationBatch other(3);
    other.add(1, 3);
    other.add(4, 2);
    CHECK(other.digest() != batch.digest());
}

TEST_CASE("fully mixed channel is uniform for every key and outcome")
{
    const ClassicalChannel channel = small_channel(1.0);
    const double uniform = 1.0 / static_cast<double>(channel.alphabet_size());
    for (std::uint64_t v = 0; v < channel.num_keys(); ++v)
        for (std::uint64_t z = 0; z < channel.alphabet_size(); ++z)
            CHECK(channel.exact_probability(Key{v, 3}, z) == doctest::Approx(uniform));
}

TEST_CASE("half-mixed single-qubit hadamard channel gives 1/2 on both outcomes")
{
    // Family output |0>, one Haar unitary, alpha = 1/2: whatever |<y|U|0>|^2
    // is, mixing with uniform gives p = (1/2) q + 1/4 and p0 + p1 = 1.
    // Pin the fully computable case instead: a K=1 design on one qubit where
    // the rotated distribution is (1/2, 1/2) after a Hadamard-like unitary.
    CircuitFamily family = make_constant_family(1, 1);
    family.gates.push_back({GateKind::H, 0, -1, 0.0, -1}); // |+> for every key
    const MeasurementDesign design = build_design(1, 1, DesignConstruction::haar_random, 4);
    // Probabilities under the design for |+> and alpha = 1/2 must obey
    // p_alpha = q/2 + 1/4 exactly.
    const ClassicalChannel mixed(family, design, 0.5);
    const ClassicalChannel unmixed(family, design, 0.0);
    for (std::uint64_t z = 0; z < 2; ++z) {
        const double q = unmixed.exact_probability(Key{0, 1}, z);
        CHECK(mixed.exact_probability(Key{0, 1}, z) ==
              doctest::Approx(0.5 * q + 0.25).epsilon(1e-12));
    }
}

TEST_CASE("channel distributions normalize for every key, exhaustively")
{
    const CircuitFamily family = make_rotor_family(2, 6);
    const MeasurementDesign design =
        build_design(2, 4, DesignConstruction::random_clifford_circuit, 77);
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
        const ClassicalChannel channel(family, design, alpha);
        REQUIRE(channel.alphabet_size() <= 1024);
        for (std::uint64_t v = 0; v < channel.num_keys(); ++v) {
            const std::vector<double>& p = channel.distribution(Key{v, 6});
            double sum = 0.0;
            for (double x : p)
                sum += x;
            REQUIRE(std::abs(sum - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("mixing identity: tv at alpha is (1-alpha) times tv at zero")
{
    const CircuitFamily family = make_ghz_twist_family(3, 4);
    const MeasurementDesign design = build_design(3, 8, DesignConstruction::haar_random, 19);
    const ClassicalChannel base(family, design, 0.0);
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
        const ClassicalChannel channel(family, design, alpha);
        for (std::uint64_t x = 0; x < channel.num_keys(); ++x) {
            for (std::uint64_t y = x + 1; y < channel.num_keys(); ++y) {
                const double tv_alpha = total_variation(channel.distribution(Key{x, 4}),
                                                        channel.distribution(Key{y, 4}));
                const double tv_zero = total_variation(base.distribution(Key{x, 4}),
                                                       base.distribution(Key{y, 4}));
                REQUIRE(std::abs(tv_alpha - (1.0 - alpha) * tv_zero) <= 1e-9);
            }
        }
    }
}

TEST_CASE("batch log-likelihood basics")
{
    const ClassicalChannel channel = small_channel(0.5);
    const Key key{5, 3};

    const ObservationBatch empty(channel.outcome_bits());
    CHECK(channel.batch_log_likelihood(key, empty) == doctest::Approx(0.0));

    ObservationBatch one(channel.outcome_bits());
    one.add(3);
    CHECK(channel.batch_log_likelihood(key, one) ==
          doctest::Approx(std::log(channel.exact_probability(key, 3))).epsilon(1e-12));

    // Product route on a 5-outcome batch.
    ObservationBatch batch(channel.outcome_bits());
    double product = 1.0;
    for (std::uint64_t z : {1ull, 3ull, 3ull, 7ull, 12ull}) {
        batch.add(z);
        product *= channel.exact_probability(key, z);
    }
    CHECK(std::exp(channel.batch_log_likelihood(key, batch)) ==
          doctest::Approx(product).epsilon(1e-9));
}

TEST_CASE("dead codes of a non-power-of-two K carry only uniform mass")
{
    const CircuitFamily family = make_constant_family(1, 1);
    const MeasurementDesign design = build_design(1, 3, DesignConstruction::haar_random, 8);
    REQUIRE(design.outcome_bits() == 3); // ceil(log2 3) + 1
    const ClassicalChannel unmixed(family, design, 0.0);
    const ClassicalChannel mixed(family, design, 0.5);
    for (std::uint64_t code = design.num_outcomes(); code < mixed.alphabet_size(); ++code) {
        CHECK(unmixed.exact_probability(Key{0, 1}, code) == 0.0);
        CHECK(mixed.exact_probability(Key{0, 1}, code) == doctest::Approx(0.5 / 8.0));
    }
    ObservationBatch batch(unmixed.outcome_bits());
    batch.add(design.num_outcomes()); // a dead code
    CHECK(std::isinf(unmixed.batch_log_likelihood(Key{0, 1}, batch)));
}

TEST_CASE("prefix marginals match brute-force enumeration at every length")
{
    const ClassicalChannel channel = small_channel(0.5);
    Rng rng(404);
    ObservationBatch batch(channel.outcome_bits());
    for (int i = 0; i < 6; ++i)
        batch.add(rng.below(channel.alphabet_size()));

    // Independent enumeration oracle.
    const auto brute = [&](const Key& prefix) {
        double sum = 0.0;
        for (std::uint64_t v = 0; v < channel.num_keys(); ++v) {
            const Key key{v, 3};
            bool matches = true;
            for (int i = 0; i < prefix.length; ++i)
                matches = matches && key.bit(i) == prefix.bit(i);
            if (!matches)
                continue;
            double w = 1.0 / static_cast<double>(channel.num_keys());
            for (std::uint64_t z = 0; z < batch.counts().size(); ++z)
                for (std::uint64_t c = 0; c < batch.counts()[z]; ++c)
                    w *= channel.exact_probability(key, z);
            sum += w;
        }
        return sum;
    };

    for (int len = 0; len <= 3; ++len) {
        for (std::uint64_t v = 0; v < (1ull << len); ++v) {
            const Key prefix{v, len};
            const double got = channel.prefix_marginal(prefix, batch);
            const double expected = brute(prefix);
            REQUIRE(got == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    CHECK_THROWS_AS(channel.prefix_marginal(Key{0, 4}, batch), InvalidParameter);
}

TEST_CASE("prefix marginals are tree-consistent for ell <= 6")
{
    const CircuitFamily family = make_cond_phase_family(2, 6);
    const MeasurementDesign design = build_design(2, 4, DesignConstruction::haar_random, 3);
    const ClassicalChannel channel(family, design, 0.5);
    Rng rng(11);
    ObservationBatch batch(channel.outcome_bits());
    for (int i = 0; i < 10; ++i)
        batch.add(rng.below(channel.alphabet_size()));

    for (int len = 0; len < 6; ++len) {
        for (std::uint64_t v = 0; v < (1ull << len); ++v) {
            const Key prefix{v, len};
            const double whole = channel.prefix_marginal(prefix, batch);
            const double split = channel.prefix_marginal(prefix.child(0), batch) +
                                 channel.prefix_marginal(prefix.child(1), batch);
            REQUIRE(whole == doctest::Approx(split).epsilon(1e-9));
        }
    }
}

TEST_CASE("memoized and fresh evaluations are bit-identical")
{
    const ClassicalChannel warm = small_channel(0.5);
    ObservationBatch batch(warm.outcome_bits());
    batch.add(2, 4);
    batch.add(9, 1);
    const Key key{6, 3};
    const double first = warm.batch_log_likelihood(key, batch);  // computes
    const double second = warm.batch_log_likelihood(key, batch); // cache hit
    const ClassicalChannel cold = small_channel(0.5);
    const double fresh = cold.batch_log_likelihood(key, batch);
    CHECK(first == second);
    CHECK(first == fresh);
}

TEST_CASE("channel rejects mismatched inputs")
{
    const ClassicalChannel channel = small_channel(0.5);
    CHECK_THROWS_AS(channel.exact_probability(Key{0, 3}, channel.alphabet_size()),
                    InvalidParameter);
    CHECK_THROWS_AS(channel.distribution(Key{0, 2}), InvalidKey);
    const ObservationBatch wrong(channel.outcome_bits() + 1);
    CHECK_THROWS_AS(channel.batch_log_likelihood(Key{0, 3}, wrong), DimensionError);

    const CircuitFamily family = make_cond_phase_family(2, 3);
    const MeasurementDesign other = build_design(3, 4, DesignConstruction::haar_random, 5);
    CHECK_THROWS_AS(ClassicalChannel(family, other, 0.5), DimensionError);
    const MeasurementDesign ok = build_design(2, 4, DesignConstruction::haar_random, 5);
    CHECK_THROWS_AS(ClassicalChannel(family, ok, 1.5), InvalidParameter);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qml/families.hpp"
#include "qml/metrics.hpp"
#include "qml/qmlh.hpp"
#include "qml/stats.hpp"

using namespace qml;

namespace {

/// w(x) / sum w for every key, computed directly from exact probabilities --
/// the enumeration oracle the sampler is judged against.
std::vector<double> normalized_weights(const ClassicalChannel& channel,
                                       const ObservationBatch& batch)
{
    std::vector<double> w(channel.num_keys(), 1.0);
    double sum = 0.0;
    for (std::uint64_t v = 0; v < channel.num_keys(); ++v) {
        for (std::uint64_t z = 0; z < batch.counts().size(); ++z) {
            if (batch.counts()[z] == 0)
                continue;
            w[v] *= std::pow(channel.exact_probability(Key{v, channel.key_bits()}, z),
                             static_cast<double>(batch.counts()[z]));
        }
        sum += w[v];
    }
    for (double& x : w)
        x /= sum;
    return w;
}

ObservationBatch random_batch(const ClassicalChannel& channel, int size, Rng& rng)
{
    ObservationBatch batch(channel.outcome_bits());
    for (int i = 0; i < size; ++i)
        batch.add(rng.below(channel.alphabet_size()));
    return batch;
}

} // namespace

TEST_CASE("required T matches the pinned formula values")
{
    CHECK(qmlh_required_T(1.0, 1.0, 1) == 2);
    CHECK(qmlh_required_T(4.0, 10.0, 8) == 56);
    CHECK(qmlh_required_T(4.0, 7.0, 8) == 47);
    CHECK_THROWS_AS(qmlh_required_T(0.0, 1.0, 1), InvalidParameter);
    CHECK_THROWS_AS(qmlh_required_T(1.0, 0.0, 1), InvalidParameter);
}

TEST_CASE("required T satisfies its defining inequality on a parameter grid")
{
    for (double eps : {0.5, 1.0, 2.0, 4.0, 9.0}) {
        for (double delta : {0.5, 1.0, 3.0, 7.0, 12.0}) {
            for (int ell : {1, 2, 4, 8}) {
                const std::uint64_t T = qmlh_required_T(eps, delta, ell);
                const double lhs =
                    ell - static_cast<double>(T) * std::log2(1.0 + 1.0 / eps);
                REQUIRE(lhs <= -delta + 1e-12);
                // minimality: T - 1 must violate it (up to float slack)
                if (T > 1) {
                    const double prev =
                        ell - static_cast<double>(T - 1) * std::log2(1.0 + 1.0 / eps);
                    REQUIRE(prev > -delta - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("single supported key is always returned")
{
    // ell = 1 with weights (w, 0): a basis-aligned Clifford design measures
    // |0> and |1> to disjoint point masses. Scan seeds for such a design
    // (about half of the single-qubit Clifford words are basis-aligned).
    const CircuitFamily family = make_basis_family(1);
    for (std::uint64_t seed = 1;; ++seed) {
        REQUIRE(seed < 64);
        const MeasurementDesign design =
            build_design(1, 1, DesignConstruction::random_clifford_circuit, seed);
        const ClassicalChannel channel(family, design, 0.0);
        const std::vector<double>& p0 = channel.distribution(Key{0, 1});
        if (std::abs(p0[0] - p0[1]) < 0.5)
            continue; // basis got rotated into a superposition; next seed
        const std::uint64_t exclusive = p0[0] > 0.5 ? 0 : 1;
        REQUIRE(channel.exact_probability(Key{1, 1}, exclusive) ==
                doctest::Approx(0.0).epsilon(1e-12));
        ObservationBatch batch(channel.outcome_bits());
        batch.add(exclusive);
        Rng rng(7);
        for (int i = 0; i < 20; ++i)
            CHECK(qmlh_sample(channel, batch, rng) == Key{0, 1});
        break;
    }
}

TEST_CASE("sampler is uniform when every key has equal weight")
{
    const CircuitFamily family = make_constant_family(2, 2); // all keys same state
    const MeasurementDesign design = build_design(2, 4, DesignConstruction::haar_random, 2);
    const ClassicalChannel channel(family, design, 0.5);
    Rng rng(123);
    const ObservationBatch batch = random_batch(channel, 5, rng);

    const std::uint64_t draws = 100000;
    std::vector<double> freq(4, 0.0);
    for (std::uint64_t i = 0; i < draws; ++i)
        freq[qmlh_sample(channel, batch, rng).value] += 1.0;
    double stat = 0.0;
    for (double f : freq)
        stat += (f - draws / 4.0) * (f - draws / 4.0) / (draws / 4.0);
    CHECK(stat <= chi_squared_quantile(3, 0.999));
}

TEST_CASE("empty and unsupported batches are rejected")
{
    const CircuitFamily family = make_basis_family(2);
    const MeasurementDesign design =
        build_design(2, 3, DesignConstruction::haar_random, 21);
    const ClassicalChannel channel(family, design, 0.0);
    Rng rng(5);
    const ObservationBatch empty(channel.outcome_bits());
    CHECK_THROWS_AS(qmlh_sample(channel, empty, rng), InvalidParameter);

    // K = 3 leaves dead codes; a dead-code observation has zero likelihood
    // under every key.
    ObservationBatch dead(channel.outcome_bits());
    dead.add(channel.alphabet_size() - 1);
    CHECK_THROWS_AS(qmlh_sample(channel, dead, rng), NoSupport);
}

TEST_CASE("analytic sampler law equals normalized weights for ell <= 4")
{
    Rng rng(900);
    const std::vector<CircuitFamily> families = {
        make_cond_phase_family(2, 3), make_ghz_twist_family(2, 4), make_rotor_family(1, 2)};
    for (const CircuitFamily& family : families) {
        const MeasurementDesign design =
            build_design(family.num_qubits, 4, DesignConstruction::haar_random,
                         1000 + family.key_bits);
        const ClassicalChannel channel(family, design, 0.5);
        for (int rep = 0; rep < 4; ++rep) {
            const ObservationBatch batch = random_batch(channel, 3 + rep, rng);
            const std::vector<double> law = qmlh_sampler_law(channel, batch);
            const std::vector<double> expected = normalized_weights(channel, batch);
            for (std::uint64_t v = 0; v < law.size(); ++v)
                REQUIRE(std::abs(law[v] - expected[v]) <= 1e-9);
        }
    }
}

TEST_CASE("monte-carlo frequencies match the enumeration oracle")
{
    const CircuitFamily family = make_cond_phase_family(2, 3);
    const MeasurementDesign design = build_design(2, 4, DesignConstruction::haar_random, 31);
    const ClassicalChannel channel(family, design, 0.5);
    Rng rng(6000);
    const ObservationBatch batch = random_batch(channel, 6, rng);
    const std::vector<double> expected = normalized_weights(channel, batch);

    const std::uint64_t draws = 100000;
    std::vector<double> freq(channel.num_keys(), 0.0);
    for (std::uint64_t i = 0; i < draws; ++i)
        freq[qmlh_sample(channel, batch, rng).value] += 1.0 / static_cast<double>(draws);
    CHECK(total_variation(freq, expected) <= 0.02);
}

TEST_CASE("brute-force argmax breaks ties to the lexicographically smallest key")
{
    const CircuitFamily family = make_constant_family(2, 3); // every key ties
    const MeasurementDesign design = build_design(2, 2, DesignConstruction::haar_random, 9);
    const ClassicalChannel channel(family, design, 0.5);
    Rng rng(77);
    const ObservationBatch batch = random_batch(channel, 4, rng);
    const auto [key, logw] = qmlh_argmax_bruteforce(channel, batch);
    CHECK(key == Key{0, 3});
    CHECK(logw == channel.batch_log_likelihood(Key{0, 3}, batch));

    // Order independence: reversed manual scan lands on the same maximum and
    // the same lex-smallest argmax set member.
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t arg = 0;
    for (std::uint64_t v = channel.num_keys(); v-- > 0;) {
        const double w = channel.batch_log_likelihood(Key{v, 3}, batch);
        if (w >= best) { // >= going backwards keeps the smallest index
            best = w;
            arg = v;
        }
    }
    CHECK(arg == key.value);
    CHECK(best == logw);
}

TEST_CASE("argmax guards the enumeration bound")
{
    const CircuitFamily family = make_constant_family(1, 21);
    const MeasurementDesign design = build_design(1, 1, DesignConstruction::haar_random, 1);
    const ClassicalChannel channel(family, design, 0.5);
    ObservationBatch batch(channel.outcome_bits());
    batch.add(0);
    CHECK_THROWS_AS(qmlh_argmax_bruteforce(channel, batch), TooLarge);
}

TEST_CASE("failure rate is zero on point-mass posteriors")
{
    const CircuitFamily family = make_basis_family(2);
    const MeasurementDesign design =
        build_design(2, 1, DesignConstruction::random_clifford_circuit, 40);
    const ClassicalChannel channel(family, design, 0.0);
    const ClassicalChannel sampling_channel(family, design, 0.5);
    Rng rng(31);
    // Batches of one definite measured outcome: the posterior mass sits on
    // the compatible keys only, all with equal weight -> never a bad draw.
    const BatchGenerator gen = [&](Rng& r) {
        const Key key{r.below(4), 2};
        ObservationBatch batch(channel.outcome_bits());
        const CategoricalSampler sampler(channel.distribution(key));
        batch.add(sampler.draw(r));
        return batch;
    };
    const FailureRateResult result = qmlh_failure_rate(channel, gen, 4.0, 200, rng);
    CHECK(result.bad == 0);
    CHECK(result.rate == 0.0);
}

TEST_CASE("two-key adversarial posterior matches its analytic bad rate")
{
    // One qubit, keys |0> and RY(theta)|0>; batch = T copies of the same
    // measured code. The bad rate equals the bad keys' posterior mass, which
    // is computable in closed form from the channel.
    CircuitFamily family = make_constant_family(1, 1);
    family.gates.push_back({GateKind::RY, 0, -1, 1.7013707893443184, 0});
    const MeasurementDesign design = build_design(1, 1, DesignConstruction::haar_random, 64);
    const ClassicalChannel channel(family, design, 0.0);

    const double eps = 1.0;
    const std::uint64_t copies = 5;
    // Pick the code maximizing the weight gap between the two keys.
    const std::vector<double>& p0 = channel.distribution(Key{0, 1});
    const std::vector<double>& p1 = channel.distribution(Key{1, 1});
    std::uint64_t code = p0[0] > p1[0] ? 0 : 1;

    const double w0 = std::pow(p0[code], static_cast<double>(copies));
    const double w1 = std::pow(p1[code], static_cast<double>(copies));
    const double wmax = std::max(w0, w1);
    const double wmin = std::min(w0, w1);
    const bool min_is_bad =
        wmin < wmax / std::pow(1.0 + 1.0 / eps, static_cast<double>(copies));
    const double predicted = min_is_bad ? wmin / (w0 + w1) : 0.0;

    const BatchGenerator gen = [&](Rng&) {
        ObservationBatch batch(channel.outcome_bits());
        batch.add(code, copies);
        return batch;
    };
    Rng rng(606);
    const std::uint64_t trials = 20000;
    const FailureRateResult result = qmlh_failure_rate(channel, gen, eps, trials, rng);
    const double sigma =
        std::sqrt(std::max(predicted, 1e-9) * (1.0 - predicted) / static_cast<double>(trials));
    CHECK(result.rate <= predicted + 3.0 * sigma);
    CHECK(result.rate >= predicted - 3.0 * sigma);
}

TEST_CASE("failure rate honors the 2^-delta bound at the required T")
{
    // Small version of the acceptance run: ell = 4 family, identical-z
    // batches, T from the formula.
    const CircuitFamily family = make_cond_phase_family(2, 4);
    const MeasurementDesign design = build_design(2, 16, DesignConstruction::haar_random, 50);
    const ClassicalChannel channel(family, design, 0.5);
    const double eps = 4.0;
    const double delta_bits = 5.0;
    const std::uint64_t T = qmlh_required_T(eps, delta_bits, family.key_bits);

    const BatchGenerator gen = [&](Rng& r) {
        const Key x{r.below(channel.num_keys()), family.key_bits};
        const CategoricalSampler sampler(channel.distribution(x));
        ObservationBatch batch(channel.outcome_bits());
        batch.add(sampler.draw(r), T);
        return batch;
    };
    Rng rng(112);
    const std::uint64_t trials = 800;
    const FailureRateResult result = qmlh_failure_rate(channel, gen, eps, trials, rng);
    const double bound = std::exp2(-delta_bits);
    const double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
    CHECK(result.rate <= bound + 3.0 * sigma);
}

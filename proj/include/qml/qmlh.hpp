#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qml/oracle.hpp"
#include "qml/rng.hpp"

namespace qml {

/// Samples a key h with probability w(h) / sum_x w(x), where
/// w(x) = prod_i p_alpha(Z_i|x), by drawing bits sequentially with the
/// conditional ratio prefix_weight(prefix||b) / prefix_weight(prefix).
/// Throws NoSupport when every key has zero likelihood.
Key qmlh_sample(const ClassicalChannel& channel, const ObservationBatch& batch, Rng& rng);

/// The sampler's analytic law (product of conditional ratios per key),
/// computed without sampling. Ascending key order.
std::vector<double> qmlh_sampler_law(const ClassicalChannel& channel,
                                     const ObservationBatch& batch);

/// Exhaustive argmax of the batch log-likelihood; ties break to the
/// lexicographically smallest key. Guarded at key_bits <= 20.
std::pair<Key, double> qmlh_argmax_bruteforce(const ClassicalChannel& channel,
                                              const ObservationBatch& batch);

/// Smallest T with 2^key_bits * (1 + 1/epsilon)^-T <= 2^-delta_bits,
/// i.e. ceil((delta_bits + key_bits) / log2(1 + 1/epsilon)).
std::uint64_t qmlh_required_T(double epsilon, double delta_bits, int key_bits);

using BatchGenerator = std::function<ObservationBatch(Rng&)>;

struct FailureRateResult {
    double rate = 0.0;
    std::uint64_t bad = 0;
    std::uint64_t trials = 0;
};

/// Fraction of sampled keys h failing the multiplicative-gap test
/// w(h) >= max_x w(x) / (1 + 1/epsilon)^T against the brute-force maximum,
/// where T is the batch size (the gap is per observation).
FailureRateResult qmlh_failure_rate(const ClassicalChannel& channel,
                                    const BatchGenerator& batch_generator, double epsilon,
                                    std::uint64_t trials, Rng& rng);

} // namespace qml

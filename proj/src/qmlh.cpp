#include "qml/qmlh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qml {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Subtree log-masses: level[i] has 2^i nodes; level[i][p] is the log-sum of
// key log-weights below prefix p. level[0][0] is the full posterior mass.
std::vector<std::vector<double>> build_prefix_tree(std::vector<double> logw, int key_bits)
{
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(key_bits) + 1);
    levels[static_cast<std::size_t>(key_bits)] = std::move(logw);
    for (int level = key_bits - 1; level >= 0; --level) {
        const auto& below = levels[static_cast<std::size_t>(level) + 1];
        std::vector<double> cur(1ull << level);
        for (std::size_t p = 0; p < cur.size(); ++p) {
            const double pair[2] = {below[2 * p], below[2 * p + 1]};
            cur[p] = log_sum_exp(pair);
        }
        levels[static_cast<std::size_t>(level)] = std::move(cur);
    }
    return levels;
}

// P(next bit = 1 | prefix) from two child log-masses, clamped to [0,1].
double conditional_one(double log_m0, double log_m1)
{
    if (log_m1 == kNegInf)
        return 0.0;
    if (log_m0 == kNegInf)
        return 1.0;
    const double pair[2] = {log_m0, log_m1};
    const double p1 = std::exp(log_m1 - log_sum_exp(pair));
    return std::clamp(p1, 0.0, 1.0);
}

} // namespace

Key qmlh_sample(const ClassicalChannel& channel, const ObservationBatch& batch, Rng& rng)
{
    if (batch.total() == 0)
        throw InvalidParameter("qmlh_sample: batch is empty");
    const int key_bits = channel.key_bits();
    const auto levels = build_prefix_tree(channel.all_log_likelihoods(batch), key_bits);
    if (levels[0][0] == kNegInf)
        throw NoSupport("qmlh_sample: every key has zero likelihood");
    std::uint64_t prefix = 0;
    for (int i = 1; i <= key_bits; ++i) {
        const auto& level = levels[static_cast<std::size_t>(i)];
        const double p1 = conditional_one(level[2 * prefix], level[2 * prefix + 1]);
        const int b = rng.uniform() < p1 ? 1 : 0;
        prefix = 2 * prefix + static_cast<std::uint64_t>(b);
    }
    return Key{prefix, key_bits};
}

std::vector<double> qmlh_sampler_law(const ClassicalChannel& channel,
                                     const ObservationBatch& batch)
{
    const int key_bits = channel.key_bits();
    const auto levels = build_prefix_tree(channel.all_log_likelihoods(batch), key_bits);
    if (levels[0][0] == kNegInf)
        throw NoSupport("qmlh_sampler_law: every key has zero likelihood");
    std::vector<double> law(channel.num_keys(), 1.0);
    for (std::uint64_t v = 0; v < law.size(); ++v) {
        double prob = 1.0;
        std::uint64_t prefix = 0;
        for (int i = 1; i <= key_bits; ++i) {
            const auto& level = levels[static_cast<std::size_t>(i)];
            const double p1 = conditional_one(level[2 * prefix], level[2 * prefix + 1]);
            const int b = static_cast<int>((v >> (key_bits - i)) & 1ull);
            prob *= b ? p1 : 1.0 - p1;
            prefix = 2 * prefix + static_cast<std::uint64_t>(b);
        }
        law[v] = prob;
    }
    return law;
}

std::pair<Key, double> qmlh_argmax_bruteforce(const ClassicalChannel& channel,
                                              const ObservationBatch& batch)
{
    if (channel.key_bits() > 20)
        throw TooLarge("qmlh_argmax_bruteforce: key space above 2^20");
    Key best{0, channel.key_bits()};
    double best_logw = kNegInf;
    for (std::uint64_t v = 0; v < channel.num_keys(); ++v) {
        const Key key{v, channel.key_bits()};
        const double logw = channel.batch_log_likelihood(key, batch);
        if (logw > best_logw) { // strict: first (lex-smallest) key wins ties
            best_logw = logw;
            best = key;
        }
    }
    return {best, best_logw};
}

std::uint64_t qmlh_required_T(double epsilon, double delta_bits, int key_bits)
{
    if (!(epsilon > 0.0) || !(delta_bits > 0.0) || key_bits < 0)
        throw InvalidParameter("qmlh_required_T: parameters must be positive");
    const double rate = std::log2(1.0 + 1.0 / epsilon);
    std::uint64_t t = static_cast<std::uint64_t>(
        std::ceil((delta_bits + static_cast<double>(key_bits)) / rate));
    // Ceil can land a hair under the defining inequality on exact boundaries.
    while (static_cast<double>(key_bits) - static_cast<double>(t) * rate > -delta_bits)
        ++t;
    return t;
}

FailureRateResult qmlh_failure_rate(const ClassicalChannel& channel,
                                    const BatchGenerator& batch_generator, double epsilon,
                                    std::uint64_t trials, Rng& rng)
{
    if (trials < 1)
        throw InvalidParameter("qmlh_failure_rate: trials must be >= 1");
    if (!(epsilon > 0.0))
        throw InvalidParameter("qmlh_failure_rate: epsilon must be positive");
    // The (1 + 1/epsilon) gap applies per observation: a key is bad when
    // w(h) < max_x w(x) / (1 + 1/eps)^T. The posterior mass of that set is
    // below |X| (1 + 1/eps)^-T, which qmlh_required_T pushes under 2^-delta.
    const double per_copy_gap = std::log(1.0 + 1.0 / epsilon);
    FailureRateResult result;
    result.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const ObservationBatch batch = batch_generator(rng);
        const Key h = qmlh_sample(channel, batch, rng);
        const double logw_h = channel.batch_log_likelihood(h, batch);
        const auto [best, logw_max] = qmlh_argmax_bruteforce(channel, batch);
        const double log_gap = per_copy_gap * static_cast<double>(batch.total());
        if (logw_h < logw_max - log_gap - 1e-12)
            ++result.bad;
    }
    result.rate = static_cast<double>(result.bad) / static_cast<double>(trials);
    return result;
}

} // namespace qml

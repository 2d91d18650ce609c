#include "qml/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qml/rng.hpp"

namespace qml {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxOutcomeBits = 26;
constexpr int kMaxCachedKeyBits = 14; // above this, skip per-key memo tables
} // namespace

ObservationBatch::ObservationBatch(int outcome_bits) : outcome_bits_(outcome_bits)
{
    if (outcome_bits < 1 || outcome_bits > kMaxOutcomeBits)
        throw InvalidParameter("ObservationBatch: outcome_bits out of range");
    counts_.assign(1ull << outcome_bits, 0);
}

ObservationBatch ObservationBatch::from_codes(int outcome_bits,
                                              std::span<const std::uint64_t> codes)
{
    ObservationBatch batch(outcome_bits);
    for (std::uint64_t c : codes)
        batch.add(c);
    return batch;
}

void ObservationBatch::add(std::uint64_t code, std::uint64_t count)
{
    if (code >= counts_.size())
        throw InvalidParameter("ObservationBatch: code outside alphabet");
    counts_[code] += count;
    total_ += count;
}

std::vector<std::uint64_t> ObservationBatch::to_codes() const
{
    std::vector<std::uint64_t> codes;
    codes.reserve(total_);
    for (std::uint64_t code = 0; code < counts_.size(); ++code)
        for (std::uint64_t i = 0; i < counts_[code]; ++i)
            codes.push_back(code);
    return codes;
}

std::uint64_t ObservationBatch::digest() const
{
    std::uint64_t h = fnv1a_value(outcome_bits_);
    h = fnv1a_value(total_, h);
    for (std::uint64_t code = 0; code < counts_.size(); ++code) {
        if (counts_[code] == 0)
            continue;
        h = fnv1a_value(code, h);
        h = fnv1a_value(counts_[code], h);
    }
    return h;
}

ClassicalChannel::ClassicalChannel(CircuitFamily family, MeasurementDesign design,
                                   double mix_alpha)
    : family_(std::move(family)), design_(std::move(design)), mix_alpha_(mix_alpha)
{
    family_.validate();
    if (family_.num_qubits != design_.num_qubits())
        throw DimensionError("ClassicalChannel: family and design qubit counts differ");
    if (!(mix_alpha >= 0.0 && mix_alpha <= 1.0))
        throw InvalidParameter("ClassicalChannel: mix_alpha must be in [0, 1]");
    if (design_.outcome_bits() > kMaxOutcomeBits)
        throw TooLarge("ClassicalChannel: outcome alphabet too large");

    std::uint64_t h = fnv1a_value(family_.num_qubits);
    h = fnv1a_value(family_.key_bits, h);
    for (const GateOp& g : family_.gates) {
        h = fnv1a_value(static_cast<int>(g.kind), h);
        h = fnv1a_value(g.target, h);
        h = fnv1a_value(g.control, h);
        h = fnv1a_value(g.angle, h);
        h = fnv1a_value(g.cond_key_bit, h);
    }
    h = fnv1a_value(design_.num_qubits(), h);
    h = fnv1a_value(design_.num_unitaries(), h);
    h = fnv1a_value(static_cast<int>(design_.construction()), h);
    h = fnv1a_value(design_.seed(), h);
    h = fnv1a_value(mix_alpha_, h);
    digest_ = h;
}

const std::vector<double>& ClassicalChannel::distribution(const Key& key) const
{
    if (key.length != family_.key_bits)
        throw InvalidKey("ClassicalChannel: key length mismatch");
    {
        std::lock_guard lock(mutex_);
        auto it = distributions_.find(key.value);
        if (it != distributions_.end())
            return it->second;
    }
    // Compute outside the lock; worst case two threads race on the same key
    // and one insert wins with an identical value.
    const std::vector<double> design_p =
        outcome_distribution(design_, generate_state(family_, key));
    std::vector<double> p(alphabet_size(), 0.0);
    const double uniform = mix_alpha_ / static_cast<double>(alphabet_size());
    for (std::size_t z = 0; z < p.size(); ++z) {
        const double pm = z < design_p.size() ? design_p[z] : 0.0;
        p[z] = (1.0 - mix_alpha_) * pm + uniform;
    }
    std::lock_guard lock(mutex_);
    return distributions_.emplace(key.value, std::move(p)).first->second;
}

double ClassicalChannel::exact_probability(const Key& key, std::uint64_t code) const
{
    if (code >= alphabet_size())
        throw InvalidParameter("exact_probability: code outside alphabet");
    return distribution(key)[code];
}

void ClassicalChannel::check_batch(const ObservationBatch& batch) const
{
    if (batch.outcome_bits() != outcome_bits())
        throw DimensionError("ClassicalChannel: batch outcome_bits mismatch");
}

double ClassicalChannel::log_likelihood_uncached(const Key& key,
                                                 const ObservationBatch& batch) const
{
    const std::vector<double>& p = distribution(key);
    double sum = 0.0;
    for (std::uint64_t code = 0; code < batch.counts().size(); ++code) {
        const std::uint64_t c = batch.counts()[code];
        if (c == 0)
            continue;
        if (p[code] <= 0.0)
            return kNegInf;
        sum += static_cast<double>(c) * std::log(p[code]);
    }
    return sum;
}

double ClassicalChannel::batch_log_likelihood(const Key& key,
                                              const ObservationBatch& batch) const
{
    if (key.length != family_.key_bits)
        throw InvalidKey("batch_log_likelihood: key length mismatch");
    check_batch(batch);
    if (family_.key_bits > kMaxCachedKeyBits)
        return log_likelihood_uncached(key, batch);

    const std::uint64_t memo_key = mix_seed(batch.digest(), key.value);
    {
        std::lock_guard lock(mutex_);
        auto it = log_likelihoods_.find(memo_key);
        if (it != log_likelihoods_.end())
            return it->second;
    }
    const double value = log_likelihood_uncached(key, batch);
    std::lock_guard lock(mutex_);
    log_likelihoods_.emplace(memo_key, value);
    return value;
}

std::vector<double> ClassicalChannel::all_log_likelihoods(const ObservationBatch& batch) const
{
    std::vector<double> logw(num_keys());
    for (std::uint64_t v = 0; v < num_keys(); ++v)
        logw[v] = batch_log_likelihood(Key{v, family_.key_bits}, batch);
    return logw;
}

double ClassicalChannel::prefix_marginal(const Key& prefix, const ObservationBatch& batch) const
{
    if (prefix.length < 0 || prefix.length > family_.key_bits)
        throw InvalidParameter("prefix_marginal: prefix longer than key length");
    check_batch(batch);
    const int suffix_bits = family_.key_bits - prefix.length;
    const std::uint64_t first = prefix.value << suffix_bits;
    const std::uint64_t count = 1ull << suffix_bits;
    std::vector<double> logs(count);
    for (std::uint64_t i = 0; i < count; ++i)
        logs[i] = batch_log_likelihood(Key{first + i, family_.key_bits}, batch);
    const double lse = log_sum_exp(logs);
    if (lse == kNegInf)
        return 0.0;
    return std::exp(lse - static_cast<double>(family_.key_bits) * std::log(2.0));
}

std::uint64_t ClassicalChannel::digest() const { return digest_; }

double log_sum_exp(std::span<const double> v)
{
    double m = kNegInf;
    for (double x : v)
        m = std::max(m, x);
    if (m == kNegInf)
        return kNegInf;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace qml

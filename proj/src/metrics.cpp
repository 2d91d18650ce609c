#include "qml/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qml {

namespace {

void check_distribution(std::span<const double> p, const char* who)
{
    double sum = 0.0;
    for (double x : p) {
        if (x < -1e-12 || !std::isfinite(x))
            throw InvalidDistribution(std::string(who) + ": negative or non-finite entry");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidDistribution(std::string(who) + ": entries do not sum to 1");
}

} // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw InvalidDistribution("kl_divergence: lengths differ");
    check_distribution(p, "kl_divergence");
    check_distribution(q, "kl_divergence");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0)
            continue; // 0 * log(0/q) = 0
        if (q[i] <= 0.0)
            return std::numeric_limits<double>::infinity();
        sum += p[i] * std::log2(p[i] / q[i]);
    }
    return std::max(0.0, sum);
}

PinskerCheck pinsker_check(std::span<const double> p, std::span<const double> q)
{
    PinskerCheck result;
    result.tv = total_variation(p, q);
    const double kl = kl_divergence(p, q);
    result.bound = std::isinf(kl) ? std::numeric_limits<double>::infinity()
                                  : std::sqrt(0.5 * kl * std::numbers::ln2);
    result.holds = result.tv <= result.bound + 1e-12;
    return result;
}

std::uint64_t hoeffding_T(double range_bound, double epsilon, std::uint64_t family_size,
                          double delta_bits)
{
    if (!(range_bound > 0.0) || !(epsilon > 0.0) || family_size < 1 || delta_bits < 0.0)
        throw InvalidParameter("hoeffding_T: parameters out of range");
    const double t = (range_bound * range_bound) / (epsilon * epsilon) *
                     (std::log2(static_cast<double>(family_size)) + delta_bits);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(t)));
}

double empirical_tv(std::span<const std::uint64_t> samples_a,
                    std::span<const std::uint64_t> samples_b, std::size_t alphabet_size)
{
    if (samples_a.empty() || samples_b.empty())
        throw InvalidParameter("empirical_tv: sample lists must be non-empty");
    std::vector<double> pa(alphabet_size, 0.0);
    std::vector<double> pb(alphabet_size, 0.0);
    for (std::uint64_t s : samples_a) {
        if (s >= alphabet_size)
            throw InvalidParameter("empirical_tv: sample outside alphabet");
        pa[s] += 1.0 / static_cast<double>(samples_a.size());
    }
    for (std::uint64_t s : samples_b) {
        if (s >= alphabet_size)
            throw InvalidParameter("empirical_tv: sample outside alphabet");
        pb[s] += 1.0 / static_cast<double>(samples_b.size());
    }
    return total_variation(pa, pb);
}

double total_variation(std::span<const double> p, std::span<const double> q)
{
    if (p.size() != q.size())
        throw InvalidDistribution("total_variation: lengths differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        sum += std::abs(p[i] - q[i]);
    return 0.5 * sum;
}

} // namespace qml

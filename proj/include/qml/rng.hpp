#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include "qml/errors.hpp"

namespace qml {

/// splitmix64 step; used for seed derivation and cheap hashing.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Order-sensitive combine of two 64-bit words into a fresh seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s) ^ b;
    return splitmix64(h);
}

/// FNV-1a over raw bytes; digests only need equality semantics.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                           std::uint64_t h = 0xcbf29ce484222325ull)
{
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

template <class T>
std::uint64_t fnv1a_value(const T& v, std::uint64_t h = 0xcbf29ce484222325ull)
{
    static_assert(std::is_trivially_copyable_v<T>);
    return fnv1a({reinterpret_cast<const unsigned char*>(&v), sizeof(T)}, h);
}

// Deterministic RNG. mt19937_64 output is fully specified by the standard;
// all value transforms live here so streams do not depend on the stdlib's
// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (cosine branch only).
    double normal()
    {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Unbiased uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw InvalidParameter("Rng::below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 eng_;
};

// Stream tags keep per-purpose substreams of one master seed disjoint.
enum : std::uint64_t {
    kStreamTrial = 0x747269616cull,       // experiment trials
    kStreamCalibration = 0x63616c6962ull, // design calibration pairs
    kStreamBatch = 0x6261746368ull,       // batch generators
    kStreamGame = 0x67616d65ull,          // security-game trials
};

inline Rng derive_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0)
{
    return Rng(mix_seed(mix_seed(master, stream), index));
}

/// Precomputed CDF for repeated categorical draws.
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> pmf)
    {
        cdf_.reserve(pmf.size());
        double acc = 0.0;
        for (double p : pmf) {
            acc += p;
            cdf_.push_back(acc);
        }
        if (cdf_.empty() || acc <= 0.0)
            throw InvalidDistribution("CategoricalSampler: empty or zero-mass pmf");
        cdf_.back() = acc; // draws clamp to the last cell, so acc != 1 exactly is fine
    }

    std::size_t draw(Rng& rng) const
    {
        const double u = rng.uniform() * cdf_.back();
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end())
            --it;
        return static_cast<std::size_t>(it - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
};

/// Exact multinomial sample via chained binomials. Same law as `total`
/// independent categorical draws from `pmf`.
inline std::vector<std::uint64_t> multinomial_sample(std::span<const double> pmf,
                                                     std::uint64_t total, Rng& rng)
{
    std::vector<std::uint64_t> counts(pmf.size(), 0);
    double mass_left = 0.0;
    for (double p : pmf)
        mass_left += p;
    std::uint64_t left = total;
    for (std::size_t i = 0; i + 1 < pmf.size() && left > 0; ++i) {
        const double p = mass_left > 0.0 ? std::min(1.0, std::max(0.0, pmf[i] / mass_left)) : 0.0;
        std::binomial_distribution<std::uint64_t> bin(left, p);
        struct Adapter { // minimal UniformRandomBitGenerator over Rng
            Rng* r;
            using result_type = std::uint64_t;
            static constexpr result_type min() { return 0; }
            static constexpr result_type max() { return UINT64_MAX; }
            result_type operator()() { return r->next_u64(); }
        } gen{&rng};
        const std::uint64_t c = bin(gen);
        counts[i] = c;
        left -= c;
        mass_left -= pmf[i];
    }
    if (!counts.empty())
        counts.back() += left;
    return counts;
}

} // namespace qml

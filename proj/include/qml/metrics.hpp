#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qml/errors.hpp"

namespace qml {

/// D_KL(p || q) in bits: sum_{p_z > 0} p_z log2(p_z / q_z); +inf when some
/// p_z > 0 has q_z = 0. Inputs must be normalized within 1e-9.
double kl_divergence(std::span<const double> p, std::span<const double> q);

struct PinskerCheck {
    double tv = 0.0;    // (1/2) sum |p - q|
    double bound = 0.0; // sqrt((1/2) * D_KL * ln 2), D_KL in bits
    bool holds = false; // tv <= bound + 1e-12
};

PinskerCheck pinsker_check(std::span<const double> p, std::span<const double> q);

/// ceil((M^2 / epsilon^2) * (log2(family_size) + delta_bits)), at least 1.
std::uint64_t hoeffding_T(double range_bound, double epsilon, std::uint64_t family_size,
                          double delta_bits);

/// Total variation between the empirical histograms of two sample lists.
double empirical_tv(std::span<const std::uint64_t> samples_a,
                    std::span<const std::uint64_t> samples_b, std::size_t alphabet_size);

/// Total variation (1/2) sum |p - q| between two explicit distributions.
double total_variation(std::span<const double> p, std::span<const double> q);

} // namespace qml

#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "qml/measure.hpp"
#include "qml/qcore.hpp"

namespace qml {

/// Multiset of encoded outcomes Z_1..Z_T over the 2^outcome_bits alphabet,
/// stored as per-code counts. Likelihoods and marginals only depend on the
/// counts, so order is never kept.
class ObservationBatch {
public:
    explicit ObservationBatch(int outcome_bits);

    static ObservationBatch from_codes(int outcome_bits, std::span<const std::uint64_t> codes);

    int outcome_bits() const { return outcome_bits_; }
    std::size_t alphabet_size() const { return counts_.size(); }
    std::uint64_t total() const { return total_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }

    void add(std::uint64_t code, std::uint64_t count = 1);

    /// Canonical expansion: codes ascending, repeated by multiplicity.
    std::vector<std::uint64_t> to_codes() const;

    /// Content digest over (outcome_bits, total, nonzero cells).
    std::uint64_t digest() const;

private:
    int outcome_bits_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// The classical channel x -> z induced by measuring the family's state with
/// the design, mixed with the uniform distribution at rate alpha:
///   p_alpha(z|x) = (1-alpha) p_M(z|x) + alpha / 2^ell_z.
/// Exact output probabilities are computed by state-vector simulation; this
/// is the desk-scale substitute for the probability oracle.
class ClassicalChannel {
public:
    ClassicalChannel(CircuitFamily family, MeasurementDesign design, double mix_alpha);

    const CircuitFamily& family() const { return family_; }
    const MeasurementDesign& design() const { return design_; }
    double mix_alpha() const { return mix_alpha_; }
    int key_bits() const { return family_.key_bits; }
    std::uint64_t num_keys() const { return family_.num_keys(); }
    int outcome_bits() const { return design_.outcome_bits(); }
    std::size_t alphabet_size() const { return 1ull << design_.outcome_bits(); }

    /// p_alpha(.|key) over the full 2^ell_z alphabet; cached per key.
    const std::vector<double>& distribution(const Key& key) const;

    /// p_alpha(z|key), exact to double precision.
    double exact_probability(const Key& key, std::uint64_t code) const;

    /// sum_i ln p_alpha(Z_i|key); -inf when any factor is zero. Memoized per
    /// (key, batch digest); cached and uncached paths are the same code.
    double batch_log_likelihood(const Key& key, const ObservationBatch& batch) const;

    /// ln-weights for all keys in ascending key order.
    std::vector<double> all_log_likelihoods(const ObservationBatch& batch) const;

    /// Unnormalized post-selection weight of a key prefix:
    ///   (1/|X|) sum_{suffix} prod_i p_alpha(Z_i | prefix||suffix).
    double prefix_marginal(const Key& prefix, const ObservationBatch& batch) const;

    /// Content digest of (family, design params, alpha).
    std::uint64_t digest() const;

private:
    double log_likelihood_uncached(const Key& key, const ObservationBatch& batch) const;
    void check_batch(const ObservationBatch& batch) const;

    CircuitFamily family_;
    MeasurementDesign design_;
    double mix_alpha_;
    std::uint64_t digest_;

    mutable std::mutex mutex_;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> distributions_;
    mutable std::unordered_map<std::uint64_t, double> log_likelihoods_;
};

/// log(sum exp(v)) over a span; -inf for empty or all -inf input.
double log_sum_exp(std::span<const double> v);

} // namespace qml

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qml/oracle.hpp"
#include "qml/qmlh.hpp"
#include "qml/stats.hpp"

namespace qml {

struct LearnerParams {
    double epsilon = 4.0;    // target trace distance 1/epsilon
    double delta_bits = 3.0; // failure probability <= 2^-delta_bits
    double mix_alpha = 0.5;
    std::optional<std::uint64_t> T_override;
    std::optional<double> b_hat; // required when T is not overridden
};

/// Per-trial record of the proof-chain quantities. Distribution l1 uses
/// sum|p-q| (orthogonal pure pair -> 2); tv is half of that.
struct ChainDiagnostics {
    double kl_bits = 0.0;       // D_KL(C*_a(x) || C*_a(h)) in bits
    double tv_mixed = 0.0;      // (1/2)||C*_a(x) - C*_a(h)||_1
    double l1_unmixed = 0.0;    // ||C*_0(x) - C*_0(h)||_1
    double pinsker_bound = 0.0; // sqrt(kl_bits / 2)
    bool pinsker_ok = true;
    bool mixing_ok = true;      // l1 at alpha equals (1-alpha) * l1 at 0
    double frobenius = 0.0;     // ||rho_x - rho_h||_F
    double state_bound = 0.0;   // l1_unmixed / (b_hat * sqrt 2) + 1e-6
    bool state_checked = false; // only when b_hat known and frobenius >= 0.1
    bool state_ok = true;
};

struct LearnResult {
    Key hypothesis;
    double trace_distance = 0.0; // TD(psi_x, psi_h), scored by the harness
    std::uint64_t T = 0;
    std::uint64_t batch_digest = 0;
    ChainDiagnostics diag;
    double elapsed_seconds = 0.0; // in-memory only; never serialized
};

/// T = ceil(eps*^2 (ell_z+1)^2 (key_bits + delta_bits + 3)) with
/// eps* = 4 epsilon^2 / b_hat^2.
std::uint64_t learning_sample_count(double epsilon, double delta_bits, int ell_z,
                                    int key_bits, double b_hat);

/// T observations of the key's state: measured with the design, replaced by a
/// uniform code with probability mix_alpha. Each entry is distributed as
/// p_alpha(.|key).
ObservationBatch measure_and_mix(const CircuitFamily& family, const Key& key,
                                 const MeasurementDesign& design, std::uint64_t T,
                                 double mix_alpha, Rng& rng);

/// The algorithmic path: everything the learner knows about the unknown key
/// is the batch.
Key learn_from_batch(const ClassicalChannel& channel, const ObservationBatch& batch,
                     Rng& rng);

/// Full pipeline against a hidden key. `mixed` carries the learner's
/// mix_alpha, `unmixed` is the alpha = 0 companion used for diagnostics only.
LearnResult learn_with_channels(const ClassicalChannel& mixed,
                                const ClassicalChannel& unmixed, const Key& unknown_key,
                                const LearnerParams& params, Rng& rng);

/// Convenience wrapper that builds both channels.
LearnResult learn(const CircuitFamily& family, const MeasurementDesign& design,
                  const Key& unknown_key, const LearnerParams& params, Rng& rng);

struct KeyDistribution {
    bool uniform = true;
    std::vector<double> weights; // over ascending keys when !uniform

    void validate(int key_bits) const;
    Key sample(int key_bits, Rng& rng) const;
    double probability(const Key& key) const;
};

enum class ExperimentMode { worst, average };

struct DesignSpec {
    int K = 1;
    DesignConstruction construction = DesignConstruction::haar_random;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    CircuitFamily family;
    DesignSpec design;
    ExperimentMode mode = ExperimentMode::worst;
    KeyDistribution key_distribution; // average mode only
    double epsilon = 4.0;
    double delta_bits = 3.0;
    double mix_alpha = 0.5;
    std::uint64_t trials = 200; // per key in worst mode, total in average mode
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> T_override;
    int calibration_pairs = 200;

    /// Empty when valid; one message per offending field.
    std::vector<std::string> validation_errors() const;
};

struct TrialRecord {
    std::uint64_t index = 0;
    Key key;
    LearnResult result;
    bool success = false; // TD <= 1/epsilon
};

struct KeyAggregate {
    Key key;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    Interval ci;
    double mean_td = 0.0;
    double max_td = 0.0;
};

struct LearnExperimentReport {
    ExperimentConfig config;
    double b_hat = 0.0;
    double worst_ratio = 0.0;
    std::uint64_t T = 0;
    std::vector<TrialRecord> trials;
    std::vector<KeyAggregate> per_key; // worst mode
    std::uint64_t total_trials = 0;
    std::uint64_t total_successes = 0;
    double success_rate = 0.0;
    Interval ci;
    double failure_bound = 0.0; // 2^-delta_bits
    bool all_pinsker_ok = true;
    bool all_mixing_ok = true;
    bool all_state_ok = true;
};

/// Runs the configured experiment. Worst mode enumerates every key once per
/// round; average mode draws keys from the configured distribution. Each
/// trial derives its RNG from (master_seed, trial index), so reports do not
/// depend on the thread count.
LearnExperimentReport run_learning_experiment(const ExperimentConfig& config,
                                              int threads = 1);

} // namespace qml

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qml/learner.hpp"

namespace qml {

/// (KeyGen, StateGen): keys from a configured distribution, states from a
/// circuit family.
struct OwsgScheme {
    CircuitFamily stategen;
    KeyDistribution keygen;
};

/// What an adversary sees in one trial: the public scheme description, a copy
/// budget, and measurement access to the hidden key's copies. There is no
/// path from here to the key itself.
class AdversaryView {
public:
    AdversaryView(const CircuitFamily& family, std::uint64_t copy_budget,
                  std::function<ObservationBatch(const MeasurementDesign&, std::uint64_t,
                                                 double, Rng&)>
                      measure);

    const CircuitFamily& family() const { return family_; }
    std::uint64_t copy_budget() const { return copy_budget_; }
    std::uint64_t copies_left() const { return copies_left_; }

    /// Consumes `count` copies: each is measured with `design` and mixed with
    /// a uniform code at rate mix_alpha. Throws InvalidParameter past budget.
    ObservationBatch measure_copies(const MeasurementDesign& design, std::uint64_t count,
                                    double mix_alpha, Rng& rng);

private:
    const CircuitFamily& family_;
    std::uint64_t copy_budget_;
    std::uint64_t copies_left_;
    std::function<ObservationBatch(const MeasurementDesign&, std::uint64_t, double, Rng&)>
        measure_;
};

using Adversary = std::function<Key(AdversaryView&, Rng&)>;

struct OwsgTrialRecord {
    std::uint64_t index = 0;
    Key key;
    Key guess;
    double fidelity = 0.0; // challenger acceptance probability
    bool success = false;  // one Bernoulli(fidelity) coin
};

struct OwsgExperimentResult {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double success_rate = 0.0;
    Interval ci;
    double mean_fidelity = 0.0; // conditional success probability given the guesses
    std::vector<OwsgTrialRecord> records;
};

/// The security experiment: k <- KeyGen, adversary gets T copies of |psi_k>
/// through its view, answers k*, and the challenger accepts with probability
/// |<psi_k|psi_k*>|^2 (exact fidelity plus one coin; same law as the
/// projective test).
OwsgExperimentResult owsg_experiment(const OwsgScheme& scheme, const Adversary& adversary,
                                     std::uint64_t trials, std::uint64_t copies_T,
                                     std::uint64_t master_seed, int threads = 1);

/// Split of the mean-fidelity estimate by a good-set predicate; the two
/// contributions sum to the estimate exactly.
struct GoodBadSplit {
    std::uint64_t good_count = 0;
    double good_rate = 0.0;
    double good_contribution = 0.0;
    double bad_contribution = 0.0;
    double min_good_fidelity = 1.0;
    double max_good_infidelity = 0.0; // max (1 - fidelity) over good trials
};

GoodBadSplit split_by_fidelity(const OwsgExperimentResult& result, double threshold,
                               bool strict);

struct BreakerParams {
    DesignSpec design;
    LearnerParams learner;
};

/// Wraps the learning pipeline as a key-recovery adversary. The returned
/// closure is re-entrant; per-trial state lives in the view and RNG.
Adversary learner_to_breaker(const CircuitFamily& family, const BreakerParams& params);

/// Guesses a key from the keygen distribution without touching any copies.
Adversary random_guess_adversary(const KeyDistribution& keygen);

struct BreakerToLearnerResult {
    double p_hat = 0.0;            // adversary success estimate
    Interval p_ci;
    bool vacuous = false;          // p_hat <= 1/epsilon
    double bound = 0.0;            // (p_hat - 1/eps) / (1 - 1/eps)
    double good_rate = 0.0;        // fraction with fidelity > 1/epsilon
    bool bound_met = false;        // good_rate >= bound - CI slack
    OwsgExperimentResult experiment;
};

/// Reinterprets a key-recovery adversary as an average-case learner and
/// checks the derived lower bound on its high-fidelity success rate.
BreakerToLearnerResult breaker_to_learner(const OwsgScheme& scheme,
                                          const Adversary& adversary,
                                          double fidelity_threshold_epsilon,
                                          std::uint64_t trials, std::uint64_t copies_T,
                                          std::uint64_t master_seed, int threads = 1);

/// Exact success probability sum_k Pr[k] sum_g R(k -> g) |<psi_k|psi_g>|^2 for
/// an enumerable response law.
double exact_success_probability(
    const OwsgScheme& scheme,
    const std::function<std::vector<double>(const Key&)>& response_law);

} // namespace qml

#include "qml/owsg.hpp"

#include <cmath>

#include "qml/parallel.hpp"

namespace qml {

AdversaryView::AdversaryView(
    const CircuitFamily& family, std::uint64_t copy_budget,
    std::function<ObservationBatch(const MeasurementDesign&, std::uint64_t, double, Rng&)>
        measure)
    : family_(family), copy_budget_(copy_budget), copies_left_(copy_budget),
      measure_(std::move(measure))
{
}

ObservationBatch AdversaryView::measure_copies(const MeasurementDesign& design,
                                               std::uint64_t count, double mix_alpha,
                                               Rng& rng)
{
    if (count == 0)
        throw InvalidParameter("AdversaryView: count must be >= 1");
    if (count > copies_left_)
        throw InvalidParameter("AdversaryView: copy budget exceeded");
    copies_left_ -= count;
    return measure_(design, count, mix_alpha, rng);
}

OwsgExperimentResult owsg_experiment(const OwsgScheme& scheme, const Adversary& adversary,
                                     std::uint64_t trials, std::uint64_t copies_T,
                                     std::uint64_t master_seed, int threads)
{
    if (trials < 1)
        throw InvalidParameter("owsg_experiment: trials must be >= 1");
    scheme.stategen.validate();
    scheme.keygen.validate(scheme.stategen.key_bits);

    OwsgExperimentResult result;
    result.trials = trials;
    result.records.resize(trials);

    parallel_for(trials, threads, [&](std::uint64_t i) {
        Rng rng = derive_rng(master_seed, kStreamGame, i);
        const Key k = scheme.keygen.sample(scheme.stategen.key_bits, rng);
        AdversaryView view(
            scheme.stategen, copies_T,
            [&scheme, &k](const MeasurementDesign& design, std::uint64_t count,
                          double mix_alpha, Rng& r) {
                return measure_and_mix(scheme.stategen, k, design, count, mix_alpha, r);
            });
        const Key guess = adversary(view, rng);
        OwsgTrialRecord rec;
        rec.index = i;
        rec.key = k;
        rec.guess = guess;
        rec.fidelity = fidelity(generate_state(scheme.stategen, k),
                                generate_state(scheme.stategen, guess));
        rec.success = rng.uniform() < rec.fidelity;
        result.records[i] = rec;
    });

    double fid_sum = 0.0;
    for (const OwsgTrialRecord& rec : result.records) {
        result.successes += rec.success ? 1 : 0;
        fid_sum += rec.fidelity;
    }
    result.success_rate = static_cast<double>(result.successes) / static_cast<double>(trials);
    result.ci = clopper_pearson(result.successes, trials);
    result.mean_fidelity = fid_sum / static_cast<double>(trials);
    return result;
}

GoodBadSplit split_by_fidelity(const OwsgExperimentResult& result, double threshold,
                               bool strict)
{
    GoodBadSplit split;
    double good_sum = 0.0;
    double bad_sum = 0.0;
    for (const OwsgTrialRecord& rec : result.records) {
        const bool good = strict ? rec.fidelity > threshold : rec.fidelity >= threshold;
        if (good) {
            ++split.good_count;
            good_sum += rec.fidelity;
            split.min_good_fidelity = std::min(split.min_good_fidelity, rec.fidelity);
            split.max_good_infidelity =
                std::max(split.max_good_infidelity, 1.0 - rec.fidelity);
        } else {
            bad_sum += rec.fidelity;
        }
    }
    const double n = static_cast<double>(result.records.size());
    split.good_rate = static_cast<double>(split.good_count) / n;
    split.good_contribution = good_sum / n;
    split.bad_contribution = bad_sum / n;
    return split;
}

Adversary learner_to_breaker(const CircuitFamily& family, const BreakerParams& params)
{
    struct Shared {
        MeasurementDesign design;
        ClassicalChannel mixed; // constructed from `design` above it
        std::uint64_t T;

        Shared(MeasurementDesign d, const CircuitFamily& fam, double alpha, std::uint64_t t)
            : design(std::move(d)), mixed(fam, design, alpha), T(t)
        {
        }
    };
    MeasurementDesign design = build_design(family.num_qubits, params.design.K,
                                            params.design.construction, params.design.seed);
    std::uint64_t T;
    if (params.learner.T_override) {
        T = *params.learner.T_override;
    } else {
        if (!params.learner.b_hat)
            throw InvalidParameter("learner_to_breaker: b_hat required without T_override");
        T = learning_sample_count(params.learner.epsilon, params.learner.delta_bits,
                                  design.outcome_bits(), family.key_bits,
                                  *params.learner.b_hat);
    }
    auto shared =
        std::make_shared<Shared>(std::move(design), family, params.learner.mix_alpha, T);
    const double mix_alpha = params.learner.mix_alpha;
    return [shared, mix_alpha](AdversaryView& view, Rng& rng) {
        const ObservationBatch batch =
            view.measure_copies(shared->design, shared->T, mix_alpha, rng);
        return learn_from_batch(shared->mixed, batch, rng);
    };
}

Adversary random_guess_adversary(const KeyDistribution& keygen)
{
    return [keygen](AdversaryView& view, Rng& rng) {
        return keygen.sample(view.family().key_bits, rng);
    };
}

BreakerToLearnerResult breaker_to_learner(const OwsgScheme& scheme,
                                          const Adversary& adversary,
                                          double fidelity_threshold_epsilon,
                                          std::uint64_t trials, std::uint64_t copies_T,
                                          std::uint64_t master_seed, int threads)
{
    if (!(fidelity_threshold_epsilon > 1.0))
        throw InvalidParameter("breaker_to_learner: epsilon must exceed 1");
    BreakerToLearnerResult result;
    result.experiment =
        owsg_experiment(scheme, adversary, trials, copies_T, master_seed, threads);
    result.p_hat = result.experiment.success_rate;
    result.p_ci = result.experiment.ci;
    const double inv_eps = 1.0 / fidelity_threshold_epsilon;
    const GoodBadSplit split = split_by_fidelity(result.experiment, inv_eps, true);
    result.good_rate = split.good_rate;
    if (result.p_hat <= inv_eps) {
        result.vacuous = true; // reported, not failed
        return result;
    }
    result.bound = (result.p_hat - inv_eps) / (1.0 - inv_eps);
    const double ci_slack = result.p_ci.hi - result.p_ci.lo;
    result.bound_met = result.good_rate >= result.bound - ci_slack;
    return result;
}

double exact_success_probability(
    const OwsgScheme& scheme,
    const std::function<std::vector<double>(const Key&)>& response_law)
{
    scheme.stategen.validate();
    const std::uint64_t n = scheme.stategen.num_keys();
    std::vector<PureState> states;
    states.reserve(n);
    for (std::uint64_t v = 0; v < n; ++v)
        states.push_back(generate_state(scheme.stategen, Key{v, scheme.stategen.key_bits}));
    double total = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const Key key{k, scheme.stategen.key_bits};
        const std::vector<double> law = response_law(key);
        if (law.size() != n)
            throw InvalidDistribution("exact_success_probability: response law size");
        double inner = 0.0;
        for (std::uint64_t g = 0; g < n; ++g)
            inner += law[g] * fidelity(states[k], states[g]);
        total += scheme.keygen.probability(key) * inner;
    }
    return total;
}

} // namespace qml

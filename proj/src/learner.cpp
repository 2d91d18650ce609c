#include "qml/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "qml/metrics.hpp"
#include "qml/parallel.hpp"

namespace qml {

namespace {

constexpr std::uint64_t kMultinomialCutoff = 50000;

ChainDiagnostics chain_diagnostics(const ClassicalChannel& mixed,
                                   const ClassicalChannel& unmixed, const Key& x,
                                   const Key& h, double trace_distance,
                                   std::optional<double> b_hat)
{
    ChainDiagnostics d;
    const std::vector<double>& px = mixed.distribution(x);
    const std::vector<double>& ph = mixed.distribution(h);
    d.kl_bits = kl_divergence(px, ph);
    d.tv_mixed = total_variation(px, ph);
    d.l1_unmixed = l1_distance(unmixed.distribution(x), unmixed.distribution(h));
    d.pinsker_bound = std::isinf(d.kl_bits) ? std::numeric_limits<double>::infinity()
                                            : std::sqrt(0.5 * d.kl_bits);
    d.pinsker_ok = d.tv_mixed <= d.pinsker_bound + 1e-9;
    // l1 at alpha = (1 - alpha) * l1 at 0, exact on full distributions.
    d.mixing_ok =
        std::abs(2.0 * d.tv_mixed - (1.0 - mixed.mix_alpha()) * d.l1_unmixed) <= 1e-9;
    const PureState psi_x = generate_state(mixed.family(), x);
    const PureState psi_h = generate_state(mixed.family(), h);
    d.frobenius =
        frobenius_distance(DensityMatrix::from_pure(psi_x), DensityMatrix::from_pure(psi_h));
    if (b_hat && d.frobenius >= 0.1) {
        d.state_checked = true;
        d.state_bound = d.l1_unmixed / (*b_hat * std::numbers::sqrt2) + 1e-6;
        d.state_ok = trace_distance <= d.state_bound;
    }
    return d;
}

} // namespace

std::uint64_t learning_sample_count(double epsilon, double delta_bits, int ell_z,
                                    int key_bits, double b_hat)
{
    if (!(epsilon > 0.0) || !(b_hat > 0.0) || ell_z < 1 || key_bits < 0 || delta_bits < 0.0)
        throw InvalidParameter("learning_sample_count: parameters out of range");
    const double eps_star = 4.0 * epsilon * epsilon / (b_hat * b_hat);
    const double t = eps_star * eps_star * (ell_z + 1.0) * (ell_z + 1.0) *
                     (static_cast<double>(key_bits) + delta_bits + 3.0);
    if (!(t < 9e15))
        throw TooLarge("learning_sample_count: T exceeds 9e15");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(t)));
}

ObservationBatch measure_and_mix(const CircuitFamily& family, const Key& key,
                                 const MeasurementDesign& design, std::uint64_t T,
                                 double mix_alpha, Rng& rng)
{
    if (T < 1)
        throw InvalidParameter("measure_and_mix: T must be >= 1");
    if (!(mix_alpha >= 0.0 && mix_alpha <= 1.0))
        throw InvalidParameter("measure_and_mix: mix_alpha must be in [0, 1]");
    const PureState psi = generate_state(family, key);
    const std::vector<double> design_p = outcome_distribution(design, psi);
    const int bits = design.outcome_bits();
    const std::uint64_t alphabet = 1ull << bits;
    ObservationBatch batch(bits);

    if (T >= kMultinomialCutoff) {
        // One exact multinomial draw over the mixed per-copy law; same
        // distribution as T independent copies.
        std::vector<double> mixed(alphabet, mix_alpha / static_cast<double>(alphabet));
        for (std::size_t z = 0; z < design_p.size(); ++z)
            mixed[z] += (1.0 - mix_alpha) * design_p[z];
        const std::vector<std::uint64_t> counts = multinomial_sample(mixed, T, rng);
        for (std::uint64_t code = 0; code < alphabet; ++code)
            if (counts[code] > 0)
                batch.add(code, counts[code]);
        return batch;
    }

    const CategoricalSampler measured(design_p);
    for (std::uint64_t i = 0; i < T; ++i) {
        if (rng.uniform() < mix_alpha)
            batch.add(rng.below(alphabet));
        else
            batch.add(measured.draw(rng));
    }
    return batch;
}

Key learn_from_batch(const ClassicalChannel& channel, const ObservationBatch& batch,
                     Rng& rng)
{
    return qmlh_sample(channel, batch, rng);
}

LearnResult learn_with_channels(const ClassicalChannel& mixed,
                                const ClassicalChannel& unmixed, const Key& unknown_key,
                                const LearnerParams& params, Rng& rng)
{
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t T;
    if (params.T_override) {
        T = *params.T_override;
        if (T < 1)
            throw InvalidParameter("learn: T_override must be >= 1");
    } else {
        if (!params.b_hat)
            throw InvalidParameter("learn: b_hat required when T is not overridden");
        T = learning_sample_count(params.epsilon, params.delta_bits,
                                  mixed.outcome_bits(), mixed.key_bits(), *params.b_hat);
    }

    const ObservationBatch batch = measure_and_mix(mixed.family(), unknown_key,
                                                   mixed.design(), T, params.mix_alpha, rng);
    const Key h = learn_from_batch(mixed, batch, rng);

    LearnResult result;
    result.hypothesis = h;
    result.T = T;
    result.batch_digest = batch.digest();
    result.trace_distance = trace_distance_pure(generate_state(mixed.family(), unknown_key),
                                                generate_state(mixed.family(), h));
    result.diag =
        chain_diagnostics(mixed, unmixed, unknown_key, h, result.trace_distance, params.b_hat);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

LearnResult learn(const CircuitFamily& family, const MeasurementDesign& design,
                  const Key& unknown_key, const LearnerParams& params, Rng& rng)
{
    const ClassicalChannel mixed(family, design, params.mix_alpha);
    const ClassicalChannel unmixed(family, design, 0.0);
    return learn_with_channels(mixed, unmixed, unknown_key, params, rng);
}

void KeyDistribution::validate(int key_bits) const
{
    if (uniform)
        return;
    if (weights.size() != (1ull << key_bits))
        throw InvalidDistribution("KeyDistribution: weight count is not 2^key_bits");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw InvalidDistribution("KeyDistribution: negative or non-finite weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidDistribution("KeyDistribution: weights do not sum to 1");
}

Key KeyDistribution::sample(int key_bits, Rng& rng) const
{
    if (uniform)
        return Key{rng.below(1ull << key_bits), key_bits};
    validate(key_bits);
    const CategoricalSampler sampler(weights);
    return Key{sampler.draw(rng), key_bits};
}

double KeyDistribution::probability(const Key& key) const
{
    if (uniform)
        return 1.0 / static_cast<double>(1ull << key.length);
    return weights.at(key.value);
}

std::vector<std::string> ExperimentConfig::validation_errors() const
{
    std::vector<std::string> errors;
    try {
        family.validate();
    } catch (const Error& e) {
        errors.emplace_back(std::string("family: ") + e.what());
    }
    if (design.K < 1)
        errors.emplace_back("design.K: must be >= 1");
    if (!(epsilon > 0.0))
        errors.emplace_back("epsilon: must be positive");
    if (delta_bits < 0.0)
        errors.emplace_back("delta_bits: must be >= 0");
    if (!(mix_alpha >= 0.0 && mix_alpha <= 1.0))
        errors.emplace_back("mix_alpha: must be in [0, 1]");
    if (T_override && *T_override < 1)
        errors.emplace_back("T_override: must be >= 1");
    if (calibration_pairs < 1)
        errors.emplace_back("calibration_pairs: must be >= 1");
    if (mode == ExperimentMode::average) {
        try {
            key_distribution.validate(family.key_bits);
        } catch (const Error& e) {
            errors.emplace_back(std::string("key_distribution: ") + e.what());
        }
    }
    return errors;
}

LearnExperimentReport run_learning_experiment(const ExperimentConfig& config, int threads)
{
    {
        const auto errors = config.validation_errors();
        if (!errors.empty())
            throw InvalidParameter("run_learning_experiment: invalid config: " + errors.front());
    }

    LearnExperimentReport report;
    report.config = config;

    const MeasurementDesign design = build_design(
        config.family.num_qubits, config.design.K, config.design.construction,
        config.design.seed);
    const ClassicalChannel mixed(config.family, design, config.mix_alpha);
    const ClassicalChannel unmixed(config.family, design, 0.0);

    Rng calib_rng = derive_rng(config.master_seed, kStreamCalibration);
    const DistortionCalibration calib =
        calibrate_distortion(design, config.calibration_pairs, calib_rng);
    report.b_hat = calib.b_hat;
    report.worst_ratio = calib.worst_ratio;

    LearnerParams params;
    params.epsilon = config.epsilon;
    params.delta_bits = config.delta_bits;
    params.mix_alpha = config.mix_alpha;
    params.T_override = config.T_override;
    params.b_hat = calib.b_hat;
    report.T = config.T_override
                   ? *config.T_override
                   : learning_sample_count(config.epsilon, config.delta_bits,
                                           design.outcome_bits(), config.family.key_bits,
                                           calib.b_hat);
    params.T_override = report.T; // freeze: every trial uses the same T

    const std::uint64_t num_keys = config.family.num_keys();
    const std::uint64_t total = config.mode == ExperimentMode::worst
                                    ? config.trials * num_keys
                                    : config.trials;
    report.trials.resize(total);
    const double success_td = 1.0 / config.epsilon;

    parallel_for(total, threads, [&](std::uint64_t i) {
        Rng rng = derive_rng(config.master_seed, kStreamTrial, i);
        Key key{0, config.family.key_bits};
        if (config.mode == ExperimentMode::worst)
            key = Key{i % num_keys, config.family.key_bits};
        else
            key = config.key_distribution.sample(config.family.key_bits, rng);
        TrialRecord rec;
        rec.index = i;
        rec.key = key;
        rec.result = learn_with_channels(mixed, unmixed, key, params, rng);
        rec.success = rec.result.trace_distance <= success_td;
        report.trials[i] = std::move(rec);
    });

    report.total_trials = total;
    for (const TrialRecord& rec : report.trials) {
        report.total_successes += rec.success ? 1 : 0;
        report.all_pinsker_ok = report.all_pinsker_ok && rec.result.diag.pinsker_ok;
        report.all_mixing_ok = report.all_mixing_ok && rec.result.diag.mixing_ok;
        report.all_state_ok = report.all_state_ok && rec.result.diag.state_ok;
    }
    report.success_rate =
        total > 0 ? static_cast<double>(report.total_successes) / static_cast<double>(total)
                  : 0.0;
    report.ci = total > 0 ? clopper_pearson(report.total_successes, total) : Interval{0.0, 1.0};
    report.failure_bound = std::exp2(-config.delta_bits);

    if (config.mode == ExperimentMode::worst && total > 0) {
        report.per_key.resize(num_keys);
        for (std::uint64_t v = 0; v < num_keys; ++v) {
            report.per_key[v].key = Key{v, config.family.key_bits};
            report.per_key[v].max_td = 0.0;
        }
        for (const TrialRecord& rec : report.trials) {
            KeyAggregate& agg = report.per_key[rec.key.value];
            agg.trials += 1;
            agg.successes += rec.success ? 1 : 0;
            agg.mean_td += rec.result.trace_distance;
            agg.max_td = std::max(agg.max_td, rec.result.trace_distance);
        }
        for (KeyAggregate& agg : report.per_key) {
            if (agg.trials > 0) {
                agg.mean_td /= static_cast<double>(agg.trials);
                agg.ci = clopper_pearson(agg.successes, agg.trials);
            }
        }
    }
    return report;
}

} // namespace qml

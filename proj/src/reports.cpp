#include "qml/reports.hpp"

#include <cmath>
#include <sstream>

#include "qml/families.hpp"
#include "qml/owsg.hpp"

namespace qml {

namespace {

void require_fields(const Json& j, std::initializer_list<const char*> fields)
{
    std::string missing;
    for (const char* f : fields) {
        if (!j.contains(f))
            missing += missing.empty() ? std::string(f) : std::string(", ") + f;
    }
    if (!missing.empty())
        throw InvalidParameter("config: missing field(s): " + missing);
}

std::string csv_number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

Json envelope(const char* game, std::uint64_t master_seed, Json config)
{
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["game"] = game;
    j["master_seed"] = master_seed;
    j["config"] = std::move(config);
    return j;
}

} // namespace

CircuitFamily family_from_json_or_preset(const Json& j)
{
    if (!j.contains("preset"))
        return family_from_json(j);
    const std::string preset = j.at("preset").get<std::string>();
    const int n = j.value("num_qubits", 3);
    const int kb = j.value("key_bits", 4);
    if (preset == "cond_phase")
        return make_cond_phase_family(n, kb);
    if (preset == "ghz_twist")
        return make_ghz_twist_family(n, kb);
    if (preset == "rotor")
        return make_rotor_family(n, kb);
    if (preset == "basis")
        return make_basis_family(n);
    if (preset == "constant")
        return make_constant_family(n, kb);
    throw InvalidParameter("family: unknown preset '" + preset + "'");
}

CommandOutput run_calibrate_command(const Json& config, int threads,
                                    std::optional<std::uint64_t> seed_override)
{
    (void)threads; // calibration pairs share one derived stream
    require_fields(config, {"design", "trial_pairs", "master_seed"});
    int num_qubits = 0;
    const DesignSpec spec = design_from_json(config.at("design"), &num_qubits);
    if (num_qubits < 1)
        throw InvalidParameter("design.num_qubits: missing or not positive");
    const int trial_pairs = config.at("trial_pairs").get<int>();
    const std::uint64_t master_seed =
        seed_override.value_or(config.at("master_seed").get<std::uint64_t>());

    const MeasurementDesign design =
        build_design(num_qubits, spec.K, spec.construction, spec.seed);
    Rng rng = derive_rng(master_seed, kStreamCalibration);
    const DistortionCalibration calib = calibrate_distortion(design, trial_pairs, rng);

    Json config_echo = config;
    config_echo["master_seed"] = master_seed;
    CommandOutput out;
    out.report = envelope("calibrate", master_seed, std::move(config_echo));
    Json aggregate;
    aggregate["b_hat"] = calib.b_hat;
    aggregate["worst_ratio"] = calib.worst_ratio;
    aggregate["pairs_used"] = calib.pairs_used;
    aggregate["pairs_skipped"] = calib.pairs_skipped;
    out.report["aggregate"] = std::move(aggregate);
    out.report["ratios"] = calib.ratios;

    std::ostringstream csv;
    csv << "pair_index,ratio\n";
    for (std::size_t i = 0; i < calib.ratios.size(); ++i)
        csv << i << ',' << csv_number(calib.ratios[i]) << '\n';
    out.csv = csv.str();
    out.csv_name = "calibrate_series";
    return out;
}

CommandOutput run_learn_command(const Json& config, int threads,
                                std::optional<std::uint64_t> seed_override)
{
    Json patched = config;
    if (patched.contains("family"))
        patched["family"] = family_to_json(family_from_json_or_preset(patched.at("family")));
    if (seed_override)
        patched["master_seed"] = *seed_override;
    {
        const auto errors = experiment_config_errors(patched);
        if (!errors.empty()) {
            std::string all;
            for (const auto& e : errors)
                all += all.empty() ? e : "; " + e;
            throw InvalidParameter("config: " + all);
        }
    }
    const ExperimentConfig base = experiment_config_from_json(patched);
    const LearnExperimentReport report = run_learning_experiment(base, threads);

    CommandOutput out;
    out.report = learn_report_to_json(report);

    std::ostringstream csv;
    csv << "trial_index,td\n";
    for (const TrialRecord& rec : report.trials)
        csv << rec.index << ',' << csv_number(rec.result.trace_distance) << '\n';
    out.csv = csv.str();
    out.csv_name = "learn_series";

    if (config.contains("delta_bits_sweep")) {
        Json sweep = Json::array();
        std::ostringstream sweep_csv;
        sweep_csv << "delta_bits,T,success_rate,ci_lo,ci_hi\n";
        for (double delta : config.at("delta_bits_sweep").get<std::vector<double>>()) {
            ExperimentConfig cfg = base;
            cfg.delta_bits = delta;
            const LearnExperimentReport r = run_learning_experiment(cfg, threads);
            Json row;
            row["delta_bits"] = delta;
            row["T"] = r.T;
            row["success_rate"] = r.success_rate;
            row["ci_lo"] = r.ci.lo;
            row["ci_hi"] = r.ci.hi;
            sweep.push_back(std::move(row));
            sweep_csv << csv_number(delta) << ',' << r.T << ',' << csv_number(r.success_rate)
                      << ',' << csv_number(r.ci.lo) << ',' << csv_number(r.ci.hi) << '\n';
        }
        out.report["sweep"] = std::move(sweep);
        out.csv += sweep_csv.str();
    }
    return out;
}

CommandOutput run_qmlh_command(const Json& config, int threads,
                               std::optional<std::uint64_t> seed_override)
{
    (void)threads; // the gap-test loop is sequential by construction
    require_fields(config, {"family", "design", "epsilon", "delta_bits", "trials",
                            "master_seed"});
    const CircuitFamily family = family_from_json_or_preset(config.at("family"));
    const DesignSpec spec = design_from_json(config.at("design"));
    const double epsilon = config.at("epsilon").get<double>();
    const double delta_bits = config.at("delta_bits").get<double>();
    const double mix_alpha = config.value("mix_alpha", 0.5);
    const std::uint64_t trials = config.at("trials").get<std::uint64_t>();
    const std::uint64_t master_seed =
        seed_override.value_or(config.at("master_seed").get<std::uint64_t>());
    if (!(epsilon > 0.0) || !(delta_bits > 0.0) || trials < 1)
        throw InvalidParameter("config: epsilon, delta_bits and trials must be positive");

    const MeasurementDesign design =
        build_design(family.num_qubits, spec.K, spec.construction, spec.seed);
    const ClassicalChannel channel(family, design, mix_alpha);

    const auto run_at = [&](std::uint64_t T) {
        const BatchGenerator gen = [&channel, &family, T](Rng& r) {
            const Key x{r.below(channel.num_keys()), family.key_bits};
            const CategoricalSampler sampler(channel.distribution(x));
            ObservationBatch batch(channel.outcome_bits());
            batch.add(sampler.draw(r), T);
            return batch;
        };
        Rng rng = derive_rng(master_seed, kStreamBatch, T);
        return qmlh_failure_rate(channel, gen, epsilon, trials, rng);
    };

    const std::uint64_t T = config.contains("T_override")
                                ? config.at("T_override").get<std::uint64_t>()
                                : qmlh_required_T(epsilon, delta_bits, family.key_bits);
    const FailureRateResult result = run_at(T);
    const double bound = std::exp2(-delta_bits);
    const double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));

    Json config_echo = config;
    config_echo["family"] = family_to_json(family);
    config_echo["master_seed"] = master_seed;
    CommandOutput out;
    out.report = envelope("qmlh", master_seed, std::move(config_echo));
    Json aggregate;
    aggregate["T"] = T;
    aggregate["trials"] = result.trials;
    aggregate["bad"] = result.bad;
    aggregate["bad_rate"] = result.rate;
    aggregate["bound"] = bound;
    aggregate["bound_plus_slack"] = bound + 3.0 * sigma;
    aggregate["bound_met"] = result.rate <= bound + 3.0 * sigma;
    out.report["aggregate"] = std::move(aggregate);

    std::ostringstream csv;
    csv << "T,bad_rate\n";
    csv << T << ',' << csv_number(result.rate) << '\n';
    if (config.contains("T_sweep")) {
        Json sweep = Json::array();
        for (std::uint64_t t : config.at("T_sweep").get<std::vector<std::uint64_t>>()) {
            const FailureRateResult r = run_at(t);
            Json row;
            row["T"] = t;
            row["bad_rate"] = r.rate;
            sweep.push_back(std::move(row));
            csv << t << ',' << csv_number(r.rate) << '\n';
        }
        out.report["sweep"] = std::move(sweep);
    }
    out.csv = csv.str();
    out.csv_name = "qmlh_series";
    return out;
}

CommandOutput run_owsg_command(const Json& config, int threads,
                               std::optional<std::uint64_t> seed_override)
{
    require_fields(config, {"family", "adversary", "trials", "copies_T", "epsilon_fid",
                            "master_seed"});
    OwsgScheme scheme;
    scheme.stategen = family_from_json_or_preset(config.at("family"));
    if (config.contains("keygen")) {
        scheme.keygen.uniform = false;
        scheme.keygen.weights = config.at("keygen").get<std::vector<double>>();
    }
    scheme.keygen.validate(scheme.stategen.key_bits);

    const std::uint64_t trials = config.at("trials").get<std::uint64_t>();
    const std::uint64_t copies_T = config.at("copies_T").get<std::uint64_t>();
    const double epsilon_fid = config.at("epsilon_fid").get<double>();
    const std::uint64_t master_seed =
        seed_override.value_or(config.at("master_seed").get<std::uint64_t>());
    if (trials < 1 || !(epsilon_fid > 1.0))
        throw InvalidParameter("config: trials must be >= 1 and epsilon_fid > 1");

    const Json& adv = config.at("adversary");
    const std::string type = adv.at("type").get<std::string>();
    Adversary adversary;
    if (type == "random_guess") {
        adversary = random_guess_adversary(scheme.keygen);
    } else if (type == "learner") {
        BreakerParams params;
        params.design = design_from_json(adv.at("design"));
        params.learner.epsilon = adv.value("epsilon", epsilon_fid);
        params.learner.delta_bits = adv.value("delta_bits", 3.0);
        params.learner.mix_alpha = adv.value("mix_alpha", 0.5);
        if (adv.contains("T_override")) {
            params.learner.T_override = adv.at("T_override").get<std::uint64_t>();
        } else {
            const MeasurementDesign design =
                build_design(scheme.stategen.num_qubits, params.design.K,
                             params.design.construction, params.design.seed);
            Rng rng = derive_rng(master_seed, kStreamCalibration);
            params.learner.b_hat = calibrate_distortion(design, 200, rng).b_hat;
        }
        adversary = learner_to_breaker(scheme.stategen, params);
    } else {
        throw InvalidParameter("adversary.type: must be \"learner\" or \"random_guess\"");
    }

    const OwsgExperimentResult result =
        owsg_experiment(scheme, adversary, trials, copies_T, master_seed, threads);
    const GoodBadSplit split = split_by_fidelity(result, 1.0 - 1.0 / epsilon_fid, false);

    Json config_echo = config;
    config_echo["family"] = family_to_json(scheme.stategen);
    config_echo["master_seed"] = master_seed;
    CommandOutput out;
    out.report = envelope("owsg", master_seed, std::move(config_echo));
    Json aggregate;
    aggregate["trials"] = result.trials;
    aggregate["successes"] = result.successes;
    aggregate["ci_lo"] = result.ci.lo;
    aggregate["success_rate"] = result.success_rate;
    aggregate["ci_hi"] = result.ci.hi;
    aggregate["mean_fidelity"] = result.mean_fidelity;
    aggregate["good_threshold"] = 1.0 - 1.0 / epsilon_fid;
    aggregate["good_rate"] = split.good_rate;
    aggregate["min_good_fidelity"] = split.min_good_fidelity;
    aggregate["max_good_infidelity"] = split.max_good_infidelity;
    aggregate["good_contribution"] = split.good_contribution;
    aggregate["bad_contribution"] = split.bad_contribution;
    out.report["aggregate"] = std::move(aggregate);

    Json records = Json::array();
    std::ostringstream csv;
    csv << "trial_index,key,guess,fidelity,success\n";
    for (const OwsgTrialRecord& rec : result.records) {
        Json jr;
        jr["index"] = rec.index;
        jr["key"] = rec.key.to_string();
        jr["guess"] = rec.guess.to_string();
        jr["fidelity"] = rec.fidelity;
        jr["success"] = rec.success;
        jr["good"] = rec.fidelity >= 1.0 - 1.0 / epsilon_fid;
        records.push_back(std::move(jr));
        csv << rec.index << ',' << rec.key.to_string() << ',' << rec.guess.to_string() << ','
            << csv_number(rec.fidelity) << ',' << (rec.success ? 1 : 0) << '\n';
    }
    out.report["trials"] = std::move(records);
    out.csv = csv.str();
    out.csv_name = "owsg_series";
    return out;
}

} // namespace qml

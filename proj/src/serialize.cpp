#include "qml/serialize.hpp"

#include <charconv>
#include <cmath>

namespace qml {

namespace {

// JSON has no infinities; diag fields that can be infinite round-trip as
// "inf"/"-inf" strings.
Json number_or_string(double v)
{
    if (std::isinf(v))
        return v > 0 ? Json("inf") : Json("-inf");
    return Json(v);
}

} // namespace

Json family_to_json(const CircuitFamily& family)
{
    Json gates = Json::array();
    for (const GateOp& g : family.gates) {
        Json jg;
        jg["kind"] = gate_kind_name(g.kind);
        jg["target"] = g.target;
        if (gate_kind_has_control(g.kind))
            jg["control"] = g.control;
        if (gate_kind_has_angle(g.kind))
            jg["angle"] = g.angle;
        if (g.cond_key_bit >= 0)
            jg["cond_key_bit"] = g.cond_key_bit;
        gates.push_back(std::move(jg));
    }
    Json j;
    j["num_qubits"] = family.num_qubits;
    j["key_bits"] = family.key_bits;
    j["gates"] = std::move(gates);
    return j;
}

CircuitFamily family_from_json(const Json& j)
{
    CircuitFamily family;
    family.num_qubits = j.at("num_qubits").get<int>();
    family.key_bits = j.at("key_bits").get<int>();
    for (const Json& jg : j.at("gates")) {
        GateOp g;
        const auto kind = gate_kind_from_name(jg.at("kind").get<std::string>());
        if (!kind)
            throw InvalidParameter("family: unknown gate kind '" +
                                   jg.at("kind").get<std::string>() + "'");
        g.kind = *kind;
        g.target = jg.at("target").get<int>();
        if (jg.contains("control"))
            g.control = jg.at("control").get<int>();
        if (jg.contains("angle"))
            g.angle = jg.at("angle").get<double>();
        if (jg.contains("cond_key_bit"))
            g.cond_key_bit = jg.at("cond_key_bit").get<int>();
        family.gates.push_back(g);
    }
    family.validate();
    return family;
}

Json design_to_json(int num_qubits, const DesignSpec& spec)
{
    Json j;
    j["num_qubits"] = num_qubits;
    j["K"] = spec.K;
    j["construction"] = design_construction_name(spec.construction);
    j["seed"] = spec.seed;
    return j;
}

DesignSpec design_from_json(const Json& j, int* num_qubits)
{
    DesignSpec spec;
    if (num_qubits && j.contains("num_qubits"))
        *num_qubits = j.at("num_qubits").get<int>();
    spec.K = j.at("K").get<int>();
    const std::string name = j.at("construction").get<std::string>();
    const auto construction = design_construction_from_name(name);
    if (!construction)
        throw InvalidParameter("design: unknown construction '" + name + "'");
    spec.construction = *construction;
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

std::string outcome_code_to_hex(std::uint64_t code, int outcome_bits)
{
    const int nibbles = (outcome_bits + 3) / 4;
    std::string s(static_cast<std::size_t>(nibbles), '0');
    for (int i = nibbles - 1; i >= 0; --i) {
        const auto nib = static_cast<unsigned>(code & 0xf);
        s[static_cast<std::size_t>(i)] =
            static_cast<char>(nib < 10 ? '0' + nib : 'a' + (nib - 10));
        code >>= 4;
    }
    return s;
}

std::uint64_t outcome_code_from_hex(const std::string& hex, int outcome_bits)
{
    std::uint64_t code = 0;
    const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), code, 16);
    if (ec != std::errc() || ptr != hex.data() + hex.size())
        throw InvalidParameter("batch: bad hex outcome '" + hex + "'");
    if (code >= (1ull << outcome_bits))
        throw InvalidParameter("batch: outcome outside the alphabet");
    return code;
}

Json batch_to_json(const ObservationBatch& batch, std::uint64_t channel_digest)
{
    Json j;
    j["T"] = batch.total();
    j["ell_z"] = batch.outcome_bits();
    j["channel_digest"] = outcome_code_to_hex(channel_digest, 64);
    Json outcomes = Json::array();
    for (std::uint64_t code : batch.to_codes())
        outcomes.push_back(outcome_code_to_hex(code, batch.outcome_bits()));
    j["outcomes"] = std::move(outcomes);
    return j;
}

ObservationBatch batch_from_json(const Json& j, std::uint64_t* channel_digest)
{
    const int bits = j.at("ell_z").get<int>();
    ObservationBatch batch(bits);
    for (const Json& o : j.at("outcomes"))
        batch.add(outcome_code_from_hex(o.get<std::string>(), bits));
    if (batch.total() != j.at("T").get<std::uint64_t>())
        throw InvalidParameter("batch: T does not match the outcome list");
    if (channel_digest)
        *channel_digest = outcome_code_from_hex(
            j.at("channel_digest").get<std::string>(), 64);
    return batch;
}

Json experiment_config_to_json(const ExperimentConfig& config)
{
    Json j;
    j["family"] = family_to_json(config.family);
    Json design;
    design["K"] = config.design.K;
    design["construction"] = design_construction_name(config.design.construction);
    design["seed"] = config.design.seed;
    j["design"] = std::move(design);
    j["mode"] = config.mode == ExperimentMode::worst ? "worst" : "average";
    if (!config.key_distribution.uniform)
        j["key_distribution"] = config.key_distribution.weights;
    j["epsilon"] = config.epsilon;
    j["delta_bits"] = config.delta_bits;
    j["mix_alpha"] = config.mix_alpha;
    j["trials"] = config.trials;
    j["master_seed"] = config.master_seed;
    if (config.T_override)
        j["T_override"] = *config.T_override;
    j["calibration_pairs"] = config.calibration_pairs;
    return j;
}

ExperimentConfig experiment_config_from_json(const Json& j)
{
    ExperimentConfig config;
    config.family = family_from_json(j.at("family"));
    config.design = design_from_json(j.at("design"));
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "worst")
        config.mode = ExperimentMode::worst;
    else if (mode == "average")
        config.mode = ExperimentMode::average;
    else
        throw InvalidParameter("config: mode must be \"worst\" or \"average\"");
    if (j.contains("key_distribution")) {
        config.key_distribution.uniform = false;
        config.key_distribution.weights = j.at("key_distribution").get<std::vector<double>>();
    }
    config.epsilon = j.at("epsilon").get<double>();
    config.delta_bits = j.at("delta_bits").get<double>();
    config.mix_alpha = j.value("mix_alpha", 0.5);
    config.trials = j.at("trials").get<std::uint64_t>();
    config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("T_override"))
        config.T_override = j.at("T_override").get<std::uint64_t>();
    config.calibration_pairs = j.value("calibration_pairs", 200);
    return config;
}

std::vector<std::string> experiment_config_errors(const Json& j)
{
    std::vector<std::string> errors;
    for (const char* field : {"family", "design", "mode", "epsilon", "delta_bits", "trials",
                              "master_seed"}) {
        if (!j.contains(field))
            errors.emplace_back(std::string(field) + ": missing");
    }
    if (!errors.empty())
        return errors;
    try {
        const ExperimentConfig config = experiment_config_from_json(j);
        auto semantic = config.validation_errors();
        errors.insert(errors.end(), semantic.begin(), semantic.end());
    } catch (const std::exception& e) {
        errors.emplace_back(e.what());
    }
    return errors;
}

Json learn_report_to_json(const LearnExperimentReport& report)
{
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["game"] = "learn";
    j["master_seed"] = report.config.master_seed;
    j["config"] = experiment_config_to_json(report.config);

    Json aggregate;
    aggregate["b_hat"] = report.b_hat;
    aggregate["worst_ratio"] = report.worst_ratio;
    aggregate["T"] = report.T;
    aggregate["total_trials"] = report.total_trials;
    aggregate["total_successes"] = report.total_successes;
    aggregate["success_rate"] = report.success_rate;
    aggregate["ci_lo"] = report.ci.lo;
    aggregate["ci_hi"] = report.ci.hi;
    aggregate["failure_bound"] = report.failure_bound;
    aggregate["all_pinsker_ok"] = report.all_pinsker_ok;
    aggregate["all_mixing_ok"] = report.all_mixing_ok;
    aggregate["all_state_ok"] = report.all_state_ok;
    j["aggregate"] = std::move(aggregate);

    Json per_key = Json::array();
    for (const KeyAggregate& agg : report.per_key) {
        Json ja;
        ja["key"] = agg.key.to_string();
        ja["trials"] = agg.trials;
        ja["successes"] = agg.successes;
        ja["ci_lo"] = agg.ci.lo;
        ja["ci_hi"] = agg.ci.hi;
        ja["mean_td"] = agg.mean_td;
        ja["max_td"] = agg.max_td;
        per_key.push_back(std::move(ja));
    }
    j["per_key"] = std::move(per_key);

    Json trials = Json::array();
    for (const TrialRecord& rec : report.trials) {
        Json jt;
        jt["index"] = rec.index;
        jt["key"] = rec.key.to_string();
        jt["hypothesis"] = rec.result.hypothesis.to_string();
        jt["td"] = rec.result.trace_distance;
        jt["success"] = rec.success;
        jt["T"] = rec.result.T;
        jt["batch_digest"] = outcome_code_to_hex(rec.result.batch_digest, 64);
        Json diag;
        diag["kl_bits"] = number_or_string(rec.result.diag.kl_bits);
        diag["tv_mixed"] = rec.result.diag.tv_mixed;
        diag["l1_unmixed"] = rec.result.diag.l1_unmixed;
        diag["pinsker_bound"] = number_or_string(rec.result.diag.pinsker_bound);
        diag["pinsker_ok"] = rec.result.diag.pinsker_ok;
        diag["mixing_ok"] = rec.result.diag.mixing_ok;
        diag["frobenius"] = rec.result.diag.frobenius;
        diag["state_bound"] = rec.result.diag.state_bound;
        diag["state_checked"] = rec.result.diag.state_checked;
        diag["state_ok"] = rec.result.diag.state_ok;
        jt["diag"] = std::move(diag);
        trials.push_back(std::move(jt));
    }
    j["trials"] = std::move(trials);
    return j;
}

std::vector<std::string> validate_report(const Json& report)
{
    std::vector<std::string> errors;
    if (!report.contains("schema_version") ||
        !report.at("schema_version").is_number_integer())
        errors.emplace_back("schema_version: missing or not an integer");
    else if (report.at("schema_version").get<int>() != kReportSchemaVersion)
        errors.emplace_back("schema_version: unsupported");
    if (!report.contains("game") || !report.at("game").is_string())
        errors.emplace_back("game: missing or not a string");
    else {
        const std::string game = report.at("game").get<std::string>();
        if (game != "learn" && game != "calibrate" && game != "qmlh" && game != "owsg")
            errors.emplace_back("game: unknown value '" + game + "'");
    }
    if (!report.contains("master_seed") || !report.at("master_seed").is_number())
        errors.emplace_back("master_seed: missing or not a number");
    if (!report.contains("aggregate") || !report.at("aggregate").is_object())
        errors.emplace_back("aggregate: missing or not an object");
    if (report.contains("game") && report.at("game").is_string() &&
        report.at("game").get<std::string>() == "owsg" && report.contains("aggregate") &&
        report.at("aggregate").is_object()) {
        const Json& agg = report.at("aggregate");
        for (const char* field : {"ci_lo", "success_rate", "ci_hi"})
            if (!agg.contains(field))
                errors.emplace_back(std::string("aggregate.") + field + ": missing");
        if (errors.empty()) {
            const double lo = agg.at("ci_lo").get<double>();
            const double mean = agg.at("success_rate").get<double>();
            const double hi = agg.at("ci_hi").get<double>();
            if (!(lo <= mean && mean <= hi))
                errors.emplace_back("aggregate: CI not ordered lo <= mean <= hi");
        }
    }
    return errors;
}

} // namespace qml

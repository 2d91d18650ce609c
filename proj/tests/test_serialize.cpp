#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qml/families.hpp"
#include "qml/reports.hpp"
#include "qml/serialize.hpp"
#include "test_util.hpp"

using namespace qml;

TEST_CASE("family serialization round-trips bit-exactly")
{
    Rng rng(3333);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + static_cast<int>(rng.below(3));
        const int kb = static_cast<int>(rng.below(5));
        const CircuitFamily family = testutil::random_family(n, kb, 10, rng);
        const Json j = family_to_json(family);
        const CircuitFamily back = family_from_json(j);
        REQUIRE(back.num_qubits == family.num_qubits);
        REQUIRE(back.key_bits == family.key_bits);
        REQUIRE(back.gates.size() == family.gates.size());
        for (std::size_t i = 0; i < family.gates.size(); ++i) {
            CHECK(back.gates[i].kind == family.gates[i].kind);
            CHECK(back.gates[i].target == family.gates[i].target);
            CHECK(back.gates[i].control == family.gates[i].control);
            CHECK(back.gates[i].angle == family.gates[i].angle); // bit-exact doubles
            CHECK(back.gates[i].cond_key_bit == family.gates[i].cond_key_bit);
        }
        CHECK(family_to_json(back).dump() == j.dump());
    }
}

TEST_CASE("family deserialization rejects malformed input")
{
    Json j = family_to_json(make_cond_phase_family(2, 2));
    j["gates"][0]["kind"] = "SWAP";
    CHECK_THROWS_AS(family_from_json(j), InvalidParameter);

    Json bad = family_to_json(make_cond_phase_family(2, 2));
    bad["gates"][2]["cond_key_bit"] = 9;
    CHECK_THROWS_AS(family_from_json(bad), InvalidParameter);
}

TEST_CASE("designs are regenerated identically from their serialized seed")
{
    const DesignSpec spec{8, DesignConstruction::random_clifford_circuit, 314};
    const Json j = design_to_json(2, spec);
    int num_qubits = 0;
    const DesignSpec back = design_from_json(j, &num_qubits);
    CHECK(num_qubits == 2);
    CHECK(back.K == spec.K);
    CHECK(back.construction == spec.construction);
    CHECK(back.seed == spec.seed);
    const MeasurementDesign a = build_design(2, spec.K, spec.construction, spec.seed);
    const MeasurementDesign b = build_design(num_qubits, back.K, back.construction, back.seed);
    for (int k = 0; k < a.num_unitaries(); ++k)
        CHECK(a.unitary(k) == b.unitary(k));
}

TEST_CASE("outcome hex codes round-trip")
{
    CHECK(outcome_code_to_hex(0x1a, 8) == "1a");
    CHECK(outcome_code_to_hex(0x5, 3) == "5");
    CHECK(outcome_code_to_hex(0x123, 12) == "123");
    CHECK(outcome_code_from_hex("1a", 8) == 0x1a);
    CHECK_THROWS_AS(outcome_code_from_hex("zz", 8), InvalidParameter);
    CHECK_THROWS_AS(outcome_code_from_hex("100", 8), InvalidParameter); // outside alphabet
}

TEST_CASE("batches round-trip through their hex list form")
{
    ObservationBatch batch(6);
    batch.add(3, 2);
    batch.add(40, 1);
    batch.add(0, 5);
    const Json j = batch_to_json(batch, 0xdeadbeef);
    CHECK(j.at("T").get<std::uint64_t>() == 8);
    CHECK(j.at("ell_z").get<int>() == 6);
    std::uint64_t digest = 0;
    const ObservationBatch back = batch_from_json(j, &digest);
    CHECK(digest == 0xdeadbeef);
    CHECK(back.counts() == batch.counts());
    CHECK(back.digest() == batch.digest());

    Json truncated = j;
    truncated["T"] = 7;
    CHECK_THROWS_AS(batch_from_json(truncated), InvalidParameter);
}

TEST_CASE("experiment configs round-trip")
{
    ExperimentConfig config;
    config.family = make_ghz_twist_family(3, 4);
    config.design = {32, DesignConstruction::haar_random, 555};
    config.mode = ExperimentMode::average;
    config.key_distribution.uniform = false;
    config.key_distribution.weights.assign(16, 1.0 / 16.0);
    config.epsilon = 3.5;
    config.delta_bits = 2.0;
    config.mix_alpha = 0.25;
    config.trials = 17;
    config.master_seed = 909;
    config.T_override = 1234;
    const Json j = experiment_config_to_json(config);
    const ExperimentConfig back = experiment_config_from_json(j);
    CHECK(experiment_config_to_json(back).dump() == j.dump());
    CHECK(experiment_config_errors(j).empty());
}

TEST_CASE("config errors are reported per field")
{
    Json j;
    j["epsilon"] = 1.0;
    const auto errors = experiment_config_errors(j);
    REQUIRE(errors.size() >= 5);
    bool has_family = false, has_trials = false;
    for (const auto& e : errors) {
        has_family = has_family || e.rfind("family", 0) == 0;
        has_trials = has_trials || e.rfind("trials", 0) == 0;
    }
    CHECK(has_family);
    CHECK(has_trials);
}

TEST_CASE("presets expand to explicit families")
{
    Json j;
    j["preset"] = "basis";
    j["num_qubits"] = 3;
    const CircuitFamily family = family_from_json_or_preset(j);
    CHECK(family.key_bits == 3);
    CHECK(family.gates.size() == 3);
    j["preset"] = "nope";
    CHECK_THROWS_AS(family_from_json_or_preset(j), InvalidParameter);
}

TEST_CASE("report validator checks the envelope and owsg CI ordering")
{
    Json report;
    report["schema_version"] = kReportSchemaVersion;
    report["game"] = "owsg";
    report["master_seed"] = 5;
    Json aggregate;
    aggregate["ci_lo"] = 0.2;
    aggregate["success_rate"] = 0.5;
    aggregate["ci_hi"] = 0.7;
    report["aggregate"] = aggregate;
    CHECK(validate_report(report).empty());

    report["aggregate"]["ci_hi"] = 0.3;
    CHECK(!validate_report(report).empty());

    report["aggregate"]["ci_hi"] = 0.7;
    report["game"] = "unknown";
    CHECK(!validate_report(report).empty());

    report.erase("schema_version");
    report["game"] = "learn";
    CHECK(!validate_report(report).empty());
}

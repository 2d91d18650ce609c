#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "qml/learner.hpp"
#include "qml/oracle.hpp"

namespace qml {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// CircuitFamily <-> {num_qubits, key_bits, gates:[{kind, target, control?,
// angle?, cond_key_bit?}]}; round-trips bit-exactly (angles use
// shortest-round-trip doubles).
Json family_to_json(const CircuitFamily& family);
CircuitFamily family_from_json(const Json& j);

// DesignSpec <-> {num_qubits, K, construction, seed}; unitaries are always
// regenerated from the seed.
Json design_to_json(int num_qubits, const DesignSpec& spec);
DesignSpec design_from_json(const Json& j, int* num_qubits = nullptr);

// ObservationBatch <-> {T, ell_z, channel_digest, outcomes:[hex...]} with the
// canonical (ascending) outcome order.
Json batch_to_json(const ObservationBatch& batch, std::uint64_t channel_digest);
ObservationBatch batch_from_json(const Json& j, std::uint64_t* channel_digest = nullptr);

Json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const Json& j);

/// Per-field schema problems; empty means the config parses and validates.
std::vector<std::string> experiment_config_errors(const Json& j);

Json learn_report_to_json(const LearnExperimentReport& report);

/// Common envelope checks for every emitted report (schema_version, game,
/// master_seed, aggregate). Returns one message per violation.
std::vector<std::string> validate_report(const Json& report);

std::string outcome_code_to_hex(std::uint64_t code, int outcome_bits);
std::uint64_t outcome_code_from_hex(const std::string& hex, int outcome_bits);

} // namespace qml

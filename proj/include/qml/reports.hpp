#pragma once

#include <string>

#include "qml/serialize.hpp"

namespace qml {

/// One emitted artifact set: the JSON report plus plot-ready CSV series.
struct CommandOutput {
    Json report;
    std::string csv;
    std::string csv_name; // suggested file stem, e.g. "learn_series"
};

// Each command takes its config (already parsed JSON), validates it (throws
// InvalidParameter with per-field messages), runs the experiment and builds
// the report envelope {schema_version, game, master_seed, config, aggregate,
// ...}. `seed_override` replaces the config master_seed when set.

CommandOutput run_calibrate_command(const Json& config, int threads,
                                    std::optional<std::uint64_t> seed_override = {});
CommandOutput run_learn_command(const Json& config, int threads,
                                std::optional<std::uint64_t> seed_override = {});
CommandOutput run_qmlh_command(const Json& config, int threads,
                               std::optional<std::uint64_t> seed_override = {});
CommandOutput run_owsg_command(const Json& config, int threads,
                               std::optional<std::uint64_t> seed_override = {});

/// Family either inline (num_qubits/key_bits/gates) or as a named preset
/// {"preset": "cond_phase"|"ghz_twist"|"rotor"|"basis"|"constant", ...}.
CircuitFamily family_from_json_or_preset(const Json& j);

} // namespace qml

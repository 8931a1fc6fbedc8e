#pragma once

#include <string>

#include "json.hpp"

#include "config.hpp"

namespace qcrlab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Runs every task of the config over the sampled points, spreading points over
// `threads` workers. Task failures are recorded per point.
Json run(const RunConfig& cfg, int threads);

// Whether every task in the report passed.
bool all_passed(const Json& report);

// JSON text with numbers printed as %.17g and non-finite numbers as null.
std::string serialize(const Json& j, int indent = 2);

// CRC-32 (hex) of the serialized tasks and summary, excluding meta.
std::string determinism_hash(const Json& report);

// Worker count from QCRLAB_THREADS, capped by the hardware; at least 1.
int thread_budget();

}  // namespace qcrlab

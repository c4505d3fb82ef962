#pragma once

#include <string>

#include <json.hpp>

#include "backoff/balls_bins.hpp"
#include "backoff/experiments.hpp"
#include "backoff/protocol.hpp"

namespace backoff {

// All reports serialize through ordered_json so key order (and therefore the
// byte stream) is identical run to run. No timestamps or environment data.

nlohmann::ordered_json to_json(const MakespanStats& s);
nlohmann::ordered_json to_json(const ConcentrationReport& r);
nlohmann::ordered_json to_json(const LastWindowReport& r);
nlohmann::ordered_json to_json(const ProtocolTrace& t);
nlohmann::ordered_json to_json(const SampleStats& s, uint64_t n_balls, uint64_t n_bins,
                               uint64_t seed);
nlohmann::ordered_json to_json(const RecursionAudit& a);

/// One row per trial: trial_index, makespan_slots, windows_used, truncated.
std::string to_csv(const MakespanStats& s);

/// One row per window: window_index, window_size, packets_at_start, successes.
std::string to_csv(const ProtocolTrace& t);

/// One row per trial: trial_index, singletons.
std::string to_csv(const SampleStats& s);

/// One row per audit entry.
std::string to_csv(const RecursionAudit& a);

}  // namespace backoff

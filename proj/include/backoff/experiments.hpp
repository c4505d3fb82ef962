#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "backoff/analytic.hpp"
#include "backoff/audit.hpp"
#include "backoff/calibration.hpp"
#include "backoff/protocol.hpp"

namespace backoff {

/// One named pass/fail check attached to an experiment report.
struct Verdict {
    std::string name;
    double bound = 0.0;
    double observed = 0.0;
    bool pass = false;
};

struct ExperimentOptions {
    uint64_t slot_cap = kDefaultSlotCap;
    unsigned workers = 1;  // 0 = hardware concurrency

    // schedule parameters; fb_window defaults to n + ceil(sqrt(n))
    std::optional<uint64_t> fb_window;
    uint64_t llb_initial = 2;
    uint64_t stb_initial = 2;
    std::vector<uint64_t> custom_sizes;

    // verdict constants
    double beb_linear_term = 0.0;  // c in makespan <= 512 n lg n + c n
    double stb_constant = calibration::kStbMakespanPerPacket;
    double llb_constant = calibration::kLlbMakespanFactor;
    double audit_midrange_constant = 4.0;
    double audit_envelope_slack = 10.0;  // multiplier on the (i+1)/n^2 envelope
};

/// Aggregated audit outcomes for one (case, window) cell across trials.
struct AuditCell {
    uint64_t applicable = 0;
    uint64_t violations = 0;
    double envelope = 0.0;  // allowed violation rate at this window index
};

struct MakespanStats {
    ProtocolKind kind = ProtocolKind::fb;
    uint64_t n_packets = 0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    uint64_t slot_cap = 0;

    std::vector<uint64_t> makespans;  // 0 stands in for a truncated trial
    std::vector<uint32_t> windows_used;
    std::vector<uint8_t> truncated;
    uint64_t truncated_trials = 0;

    double mean = 0.0;
    uint64_t min = 0;
    uint64_t max = 0;

    std::vector<Verdict> verdicts;
    /// Audit cells keyed by case name, indexed by re-anchored window.
    std::map<std::string, std::vector<AuditCell>> audit;

    bool all_pass() const;
};

/// Runs `trials` independent executions (trial t uses stream (seed, t)) and
/// attaches the protocol-specific bound verdicts plus the aggregated
/// per-window audit. Results are byte-stable across worker counts.
MakespanStats makespan_experiment(ProtocolKind kind, uint64_t n_packets, uint64_t trials,
                                  uint64_t seed, const ExperimentOptions& opts = {});

struct ConcentrationReport {
    uint64_t n_balls = 0;
    uint64_t n_bins = 0;
    double epsilon = 0.0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    SingletonBounds bounds;
    uint64_t lower_violations = 0;
    uint64_t upper_violations = 0;
    double rate_lower = 0.0;
    double rate_upper = 0.0;
    std::vector<Verdict> verdicts;
    bool pass = false;
};

/// Measures how often the singleton count escapes the concentration
/// thresholds; passes iff each empirical rate stays within its analytic
/// failure probability plus 3 binomial standard deviations.
ConcentrationReport concentration_experiment(uint64_t n_balls, uint64_t n_bins, double epsilon,
                                             uint64_t trials, uint64_t seed,
                                             unsigned workers = 1);

struct LastWindowReport {
    uint64_t packets = 0;
    uint64_t window = 0;
    uint64_t trials = 0;
    uint64_t seed = 0;
    double bound = 0.0;  // 1 - m^2 / w
    uint64_t all_succeed_count = 0;
    double rate = 0.0;
    std::vector<Verdict> verdicts;
    bool pass = false;
};

/// Measures how often all m packets land in distinct slots of one window
/// with w > 2m; passes iff the rate is at least 1 - m^2/w minus 3 binomial
/// standard deviations. Throws PreconditionError when w <= 2m.
LastWindowReport last_window_experiment(uint64_t packets, uint64_t window, uint64_t trials,
                                        uint64_t seed, unsigned workers = 1);

}  // namespace backoff

#pragma once

#include <cstdint>
#include <vector>

#include "backoff/protocol.hpp"

namespace backoff {

/// Which per-window inequality an audit entry checked.
enum class AuditCase {
    quadratic_drop,     // m' < (5/4) m^2 / n            (w >= n + sqrt(n), m >= n^0.7)
    midrange_cap,       // m' <= K n^0.4                 (w >= n + sqrt(n), n^0.4 <= m < n^0.7)
    monotone_run_cap,   // m' <= (4/5) m0 / (5/4)^(2^i)         (monotone schedules)
    sawtooth_run_cap,   // m' <= (4/5) m0 / (2^i (5/4)^(2^i))   (sawtooth runs)
    sawtooth_base,      // m1 <= n/3 at the first sawtooth window of size >= 4n
    wide_window_clear,  // all packets clear a window with w > 2m, w.p. >= 1 - m^2/w
};

const char* to_string(AuditCase c);

struct AuditEntry {
    uint64_t window_index = 0;  // re-anchored index i (0 = anchor window)
    uint64_t m_at_start = 0;
    uint64_t window_size = 0;
    AuditCase audit_case = AuditCase::quadratic_drop;
    /// For the inequality cases: the cap on the next packet count. For
    /// wide_window_clear: the all-clear probability 1 - m^2/w.
    double predicted = 0.0;
    bool pass = false;
};

struct RecursionAudit {
    bool applicable = false;  // false when no window reaches the anchor size
    uint64_t anchor_record = 0;  // index into trace.records of window 0
    std::vector<AuditEntry> entries;
};

struct AuditOptions {
    double midrange_constant = 4.0;  // K in m' <= K n^0.4
};

/// Audits one trace against the per-window recursion inequalities. Window 0
/// is re-anchored by protocol: the first window for fb, the first window of
/// size >= n + sqrt(n) for beb/llb/custom, and the first window of size
/// >= 4n for stb. Every inequality is evaluated only where its preconditions
/// hold.
RecursionAudit recursion_audit(const ProtocolTrace& trace, uint64_t n, ProtocolKind kind,
                               const AuditOptions& opts = {});

}  // namespace backoff

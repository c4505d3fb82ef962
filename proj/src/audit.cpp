#include "backoff/audit.hpp"

#include <cmath>

#include "backoff/intmath.hpp"

namespace backoff {

const char* to_string(AuditCase c) {
    switch (c) {
        case AuditCase::quadratic_drop: return "quadratic_drop";
        case AuditCase::midrange_cap: return "midrange_cap";
        case AuditCase::monotone_run_cap: return "monotone_run_cap";
        case AuditCase::sawtooth_run_cap: return "sawtooth_run_cap";
        case AuditCase::sawtooth_base: return "sawtooth_base";
        case AuditCase::wide_window_clear: return "wide_window_clear";
    }
    return "?";
}

namespace {

// (4/5) m0 / 2^(2^i lg(5/4)), i.e. 0.8 m0 (4/5)^(2^i). Underflows to 0 for
// large i, by which point the preconditions have long stopped holding.
double doubling_cap(uint64_t m0, uint64_t i, bool halve_per_window) {
    double log2_cap = std::log2(0.8 * static_cast<double>(m0)) -
                      std::exp2(static_cast<double>(i)) * std::log2(1.25);
    if (halve_per_window) log2_cap -= static_cast<double>(i);
    return std::exp2(log2_cap);
}

bool window_at_least_run_floor(uint64_t w, uint64_t i, uint64_t n) {
    // w >= 4n / 2^i, evaluated as w * 2^i >= 4n without overflow
    if (i >= 63) return true;
    const unsigned __int128 lhs = static_cast<unsigned __int128>(w) << i;
    return lhs >= static_cast<unsigned __int128>(4) * n;
}

}  // namespace

RecursionAudit recursion_audit(const ProtocolTrace& trace, uint64_t n, ProtocolKind kind,
                               const AuditOptions& opts) {
    RecursionAudit audit;

    // Window 0 is where packets start succeeding in large numbers.
    size_t anchor = trace.records.size();
    for (size_t r = 0; r < trace.records.size(); ++r) {
        const uint64_t w = trace.records[r].window_size;
        const bool reached = kind == ProtocolKind::fb ? r == 0
                             : kind == ProtocolKind::stb
                                 ? w >= 4 * n
                                 : at_least_n_plus_sqrt(w, n);
        if (reached) {
            anchor = r;
            break;
        }
    }
    if (anchor == trace.records.size()) return audit;  // never reached: not applicable
    audit.applicable = true;
    audit.anchor_record = anchor;

    const double n07 = std::pow(static_cast<double>(n), 0.7);
    const double n04 = std::pow(static_cast<double>(n), 0.4);
    const uint64_t m0 = trace.records[anchor].packets_at_start;

    bool monotone_chain = true;  // w_j >= m0 + sqrt(m0) and m_j >= n^0.7 so far
    bool sawtooth_chain = true;  // w_j >= m_j + sqrt(m_j), w_j >= 4n/2^j, m_j >= n^0.7 so far

    for (size_t r = anchor; r < trace.records.size(); ++r) {
        const WindowRecord& rec = trace.records[r];
        const uint64_t i = static_cast<uint64_t>(r - anchor);
        const uint64_t m = rec.packets_at_start;
        const uint64_t w = rec.window_size;
        const uint64_t m_next = m - rec.successes;
        const double md = static_cast<double>(m);
        const double m_nextd = static_cast<double>(m_next);

        if (at_least_n_plus_sqrt(w, n)) {
            if (md >= n07) {
                const double cap = 1.25 * md * md / static_cast<double>(n);
                audit.entries.push_back({i, m, w, AuditCase::quadratic_drop, cap, m_nextd < cap});
            } else if (md >= n04) {
                const double cap = opts.midrange_constant * n04;
                audit.entries.push_back({i, m, w, AuditCase::midrange_cap, cap, m_nextd <= cap});
            }
        }

        if (kind == ProtocolKind::stb) {
            if (i == 0)
                audit.entries.push_back({i, m, w, AuditCase::sawtooth_base,
                                         static_cast<double>(n) / 3.0,
                                         m_nextd <= static_cast<double>(n) / 3.0});
            sawtooth_chain = sawtooth_chain && at_least_n_plus_sqrt(w, m) &&
                             window_at_least_run_floor(w, i, n) && md >= n07;
            if (sawtooth_chain) {
                const double cap = doubling_cap(m0, i, /*halve_per_window=*/true);
                audit.entries.push_back({i, m, w, AuditCase::sawtooth_run_cap, cap, m_nextd <= cap});
            }
        } else {
            monotone_chain = monotone_chain && at_least_n_plus_sqrt(w, m0) && md >= n07;
            if (monotone_chain) {
                const double cap = doubling_cap(m0, i, /*halve_per_window=*/false);
                audit.entries.push_back({i, m, w, AuditCase::monotone_run_cap, cap, m_nextd <= cap});
            }
        }

        if (m >= 1 && w > 2 * m) {
            const double all_clear = 1.0 - md * md / static_cast<double>(w);
            audit.entries.push_back(
                {i, m, w, AuditCase::wide_window_clear, all_clear, rec.successes == m});
        }
    }
    return audit;
}

}  // namespace backoff

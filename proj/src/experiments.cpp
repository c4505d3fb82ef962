#include "backoff/experiments.hpp"

#include <array>
#include <cmath>

#include "backoff/balls_bins.hpp"
#include "backoff/detail/parallel.hpp"
#include "backoff/errors.hpp"
#include "backoff/intmath.hpp"

namespace backoff {

namespace {

WindowSchedule make_schedule(ProtocolKind kind, uint64_t n, const ExperimentOptions& opts) {
    switch (kind) {
        case ProtocolKind::fb:
            return WindowSchedule::fixed(opts.fb_window.value_or(n + ceil_sqrt(n)));
        case ProtocolKind::beb: return WindowSchedule::binary_exponential();
        case ProtocolKind::llb: return WindowSchedule::log_log(opts.llb_initial);
        case ProtocolKind::stb: return WindowSchedule::sawtooth(opts.stb_initial);
        case ProtocolKind::custom: return WindowSchedule::custom(opts.custom_sizes);
    }
    throw DomainError("invalid protocol kind");
}

constexpr size_t kAuditCaseCount = 6;

constexpr std::array<AuditCase, kAuditCaseCount> kAuditCases = {
    AuditCase::quadratic_drop, AuditCase::midrange_cap,    AuditCase::monotone_run_cap,
    AuditCase::sawtooth_run_cap,     AuditCase::sawtooth_base, AuditCase::wide_window_clear,
};

struct AuditTally {
    std::array<std::vector<AuditCell>, kAuditCaseCount> cells;

    void add(const RecursionAudit& audit) {
        for (const AuditEntry& e : audit.entries) {
            auto& vec = cells[static_cast<size_t>(e.audit_case)];
            if (vec.size() <= e.window_index) vec.resize(e.window_index + 1);
            AuditCell& cell = vec[e.window_index];
            ++cell.applicable;
            cell.violations += e.pass ? 0 : 1;
        }
    }

    void merge(const AuditTally& other) {
        for (size_t c = 0; c < kAuditCaseCount; ++c) {
            auto& dst = cells[c];
            const auto& src = other.cells[c];
            if (dst.size() < src.size()) dst.resize(src.size());
            for (size_t i = 0; i < src.size(); ++i) {
                dst[i].applicable += src[i].applicable;
                dst[i].violations += src[i].violations;
            }
        }
    }
};

double binomial_sigma(double p, uint64_t trials) {
    p = std::clamp(p, 0.0, 1.0);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace

bool MakespanStats::all_pass() const {
    for (const Verdict& v : verdicts)
        if (!v.pass) return false;
    return true;
}

MakespanStats makespan_experiment(ProtocolKind kind, uint64_t n_packets, uint64_t trials,
                                  uint64_t seed, const ExperimentOptions& opts) {
    if (n_packets < 1) throw DomainError("n_packets must be >= 1");
    if (trials < 1) throw DomainError("trials must be >= 1");
    const WindowSchedule pristine = make_schedule(kind, n_packets, opts);

    MakespanStats stats;
    stats.kind = kind;
    stats.n_packets = n_packets;
    stats.trials = trials;
    stats.seed = seed;
    stats.slot_cap = opts.slot_cap;
    stats.makespans.assign(trials, 0);
    stats.windows_used.assign(trials, 0);
    stats.truncated.assign(trials, 0);

    const unsigned workers = detail::resolve_workers(opts.workers, trials);
    std::vector<AuditTally> tallies(workers);
    std::vector<uint32_t> windows_after_threshold(trials, 0);
    const AuditOptions audit_opts{opts.audit_midrange_constant};

    detail::for_each_chunk(trials, workers, [&](unsigned worker, uint64_t lo, uint64_t hi) {
        for (uint64_t t = lo; t < hi; ++t) {
            const ProtocolTrace trace =
                run_protocol(n_packets, pristine, RngStream{seed, t}, opts.slot_cap);
            stats.makespans[t] = trace.makespan_slots.value_or(0);
            stats.windows_used[t] = static_cast<uint32_t>(trace.records.size());
            stats.truncated[t] = trace.truncated ? 1 : 0;
            tallies[worker].add(recursion_audit(trace, n_packets, kind, audit_opts));

            // windows strictly after the first one of size >= n + sqrt(n)
            for (size_t r = 0; r < trace.records.size(); ++r) {
                if (at_least_n_plus_sqrt(trace.records[r].window_size, n_packets)) {
                    windows_after_threshold[t] =
                        static_cast<uint32_t>(trace.records.size() - r - 1);
                    break;
                }
            }
        }
    });

    AuditTally tally;
    for (const AuditTally& t : tallies) tally.merge(t);

    uint64_t finished = 0, sum = 0;
    uint64_t max_windows = 0, max_after_threshold = 0;
    for (uint64_t t = 0; t < trials; ++t) {
        max_windows = std::max<uint64_t>(max_windows, stats.windows_used[t]);
        max_after_threshold = std::max<uint64_t>(max_after_threshold, windows_after_threshold[t]);
        if (stats.truncated[t]) {
            ++stats.truncated_trials;
            continue;
        }
        const uint64_t ms = stats.makespans[t];
        if (finished == 0) {
            stats.min = ms;
            stats.max = ms;
        }
        stats.min = std::min(stats.min, ms);
        stats.max = std::max(stats.max, ms);
        sum += ms;
        ++finished;
    }
    if (finished > 0) stats.mean = static_cast<double>(sum) / static_cast<double>(finished);

    const bool all_finished = stats.truncated_trials == 0;
    stats.verdicts.push_back({"all_finished", 1.0,
                              static_cast<double>(finished) / static_cast<double>(trials),
                              all_finished});

    const double n = static_cast<double>(n_packets);
    const uint64_t window_budget = ceil_lg_lg(n_packets) + 7;

    switch (kind) {
        case ProtocolKind::fb: {
            const uint64_t window = opts.fb_window.value_or(n_packets + ceil_sqrt(n_packets));
            if (at_least_n_plus_sqrt(window, n_packets)) {
                stats.verdicts.push_back({"fb_window_count", static_cast<double>(window_budget),
                                          static_cast<double>(max_windows),
                                          all_finished && max_windows <= window_budget});
                const double slot_bound = static_cast<double>(window_budget * window);
                stats.verdicts.push_back({"fb_makespan", slot_bound,
                                          static_cast<double>(stats.max),
                                          all_finished && static_cast<double>(stats.max) <= slot_bound});
            }
            break;
        }
        case ProtocolKind::beb: {
            stats.verdicts.push_back({"beb_windows_after_threshold",
                                      static_cast<double>(window_budget),
                                      static_cast<double>(max_after_threshold),
                                      all_finished && max_after_threshold <= window_budget});
            if (n_packets >= 2) {  // lg 1 = 0 degenerates the slot bound
                const double slot_bound = 512.0 * n * std::log2(n) + opts.beb_linear_term * n;
                stats.verdicts.push_back(
                    {"beb_makespan", slot_bound, static_cast<double>(stats.max),
                     all_finished && static_cast<double>(stats.max) <= slot_bound});
            }
            break;
        }
        case ProtocolKind::stb: {
            const double ratio = stats.mean / n;
            stats.verdicts.push_back(
                {"stb_makespan_per_packet", opts.stb_constant, ratio,
                 all_finished && ratio <= opts.stb_constant});
            break;
        }
        case ProtocolKind::llb: {
            const double lglg = std::log2(std::log2(n));
            const double lglglg = std::log2(lglg);
            if (lglglg > 0.0) {
                const double factor = stats.mean / (n * lglg / lglglg);
                stats.verdicts.push_back({"llb_makespan_factor", opts.llb_constant, factor,
                                          all_finished && factor <= opts.llb_constant});
            }
            break;
        }
        case ProtocolKind::custom: break;  // no closed-form bound to assert
    }

    // Per-window audit envelope: violation rate at re-anchored window i may
    // not exceed slack * (i+1)/n^2 for the recursion inequalities. The
    // wide_window_clear cells are informational (their allowed failure rate is
    // the per-trial m^2/w, checked by last_window_experiment instead).
    for (size_t c = 0; c < kAuditCaseCount; ++c) {
        const AuditCase ac = kAuditCases[c];
        auto& cells = tally.cells[static_cast<size_t>(ac)];
        if (cells.empty()) continue;
        double worst = 0.0;
        for (size_t i = 0; i < cells.size(); ++i) {
            cells[i].envelope =
                ac == AuditCase::wide_window_clear
                    ? 1.0
                    : std::min(1.0, opts.audit_envelope_slack * static_cast<double>(i + 1) / (n * n));
            if (ac != AuditCase::wide_window_clear && cells[i].applicable > 0) {
                const double rate = static_cast<double>(cells[i].violations) /
                                    static_cast<double>(cells[i].applicable);
                worst = std::max(worst, rate / cells[i].envelope);
            }
        }
        stats.audit[to_string(ac)] = cells;
        if (ac != AuditCase::wide_window_clear)
            stats.verdicts.push_back(
                {std::string("audit_") + to_string(ac), 1.0, worst, worst <= 1.0});
    }

    return stats;
}

ConcentrationReport concentration_experiment(uint64_t n_balls, uint64_t n_bins, double epsilon,
                                             uint64_t trials, uint64_t seed, unsigned workers) {
    const SingletonBounds bounds = singleton_bounds({n_balls, n_bins}, epsilon);

    SimulateOptions sopts;
    sopts.workers = workers;
    sopts.keep_per_trial = true;
    const SampleStats samples = simulate_singletons(n_balls, n_bins, trials, seed, sopts);

    ConcentrationReport rep;
    rep.n_balls = n_balls;
    rep.n_bins = n_bins;
    rep.epsilon = epsilon;
    rep.trials = trials;
    rep.seed = seed;
    rep.bounds = bounds;
    for (uint32_t count : samples.per_trial) {
        if (static_cast<double>(count) < bounds.lower.threshold) ++rep.lower_violations;
        if (static_cast<double>(count) > bounds.upper.threshold) ++rep.upper_violations;
    }
    rep.rate_lower = static_cast<double>(rep.lower_violations) / static_cast<double>(trials);
    rep.rate_upper = static_cast<double>(rep.upper_violations) / static_cast<double>(trials);

    const double allow_lower =
        std::min(1.0, bounds.lower.failure_prob + 3.0 * binomial_sigma(bounds.lower.failure_prob, trials));
    const double allow_upper =
        std::min(1.0, bounds.upper.failure_prob + 3.0 * binomial_sigma(bounds.upper.failure_prob, trials));
    rep.verdicts.push_back({"lower_violation_rate", allow_lower, rep.rate_lower,
                            rep.rate_lower <= allow_lower});
    rep.verdicts.push_back({"upper_violation_rate", allow_upper, rep.rate_upper,
                            rep.rate_upper <= allow_upper});
    rep.pass = rep.verdicts[0].pass && rep.verdicts[1].pass;
    return rep;
}

LastWindowReport last_window_experiment(uint64_t packets, uint64_t window, uint64_t trials,
                                        uint64_t seed, unsigned workers) {
    if (packets < 1) throw DomainError("packets must be >= 1");
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (window <= 2 * packets)
        throw PreconditionError("last-window bound needs w > 2m (got w = " +
                                std::to_string(window) + ", m = " + std::to_string(packets) + ")");

    std::vector<uint8_t> clear(trials, 0);
    detail::for_each_chunk(trials, workers, [&](unsigned, uint64_t lo, uint64_t hi) {
        WindowScratch scratch;
        for (uint64_t t = lo; t < hi; ++t) {
            Rng rng(seed, t);
            clear[t] = run_window(packets, window, rng, scratch).successes == packets;
        }
    });

    LastWindowReport rep;
    rep.packets = packets;
    rep.window = window;
    rep.trials = trials;
    rep.seed = seed;
    const double m = static_cast<double>(packets);
    rep.bound = 1.0 - m * m / static_cast<double>(window);
    for (uint8_t c : clear) rep.all_succeed_count += c;
    rep.rate = static_cast<double>(rep.all_succeed_count) / static_cast<double>(trials);

    const double floor_rate = std::max(0.0, rep.bound - 3.0 * binomial_sigma(rep.bound, trials));
    rep.pass = rep.rate >= floor_rate;
    rep.verdicts.push_back({"all_succeed_rate", floor_rate, rep.rate, rep.pass});
    return rep;
}

}  // namespace backoff

// Acceptance suite: runs every release criterion end to end and prints one
// pass/fail line per criterion. Exit code 0 iff all pass.
//
// Usage: acceptance_tests [criterion-number ...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "backoff/analytic.hpp"
#include "backoff/balls_bins.hpp"
#include "backoff/experiments.hpp"
#include "backoff/intmath.hpp"
#include "backoff/report.hpp"
#include "oracle.hpp"

using namespace backoff;

namespace {

struct Check {
    std::vector<std::string> failures;

    void require(bool cond, const std::string& what) {
        if (!cond) failures.push_back(what);
    }
};

std::string run_command(const std::string& args, int& exit_code) {
    const std::string cmd = std::string(BACKOFFSIM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return "";
    }
    std::string out;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

// stashed experiment results so the audit criterion can reuse them
std::optional<MakespanStats> g_fb_run;
std::vector<MakespanStats> g_stb_runs;

// 1. Exact subset-product verification on the small grid, including the
//    2-balls/2-bins counterexample.
void criterion_property1(Check& c) {
    for (uint64_t n = 2; n <= 6; ++n) {
        for (uint64_t b = n + ceil_sqrt(n); b <= 9; ++b) {
            const auto checks = check_property1({n, b}, n);
            for (const auto& pc : checks)
                c.require(pc.holds, "subset-product violated at N=" + std::to_string(n) +
                                        " B=" + std::to_string(b) +
                                        " s=" + std::to_string(pc.subset_size));
            for (uint64_t s = 1; s <= n; ++s) {
                std::vector<uint64_t> subset;
                for (uint64_t j = 0; j < s; ++j) subset.push_back(j);
                const Rational closed = joint_singleton_prob_closed({n, b}, s);
                c.require(enumerate_joint_singleton_prob(n, b, subset) == closed,
                          "enumeration != closed form at N=" + std::to_string(n) +
                              " B=" + std::to_string(b) + " s=" + std::to_string(s));
                const uint64_t raw = oracle::count_joint_singleton(n, b, subset);
                c.require(closed == Rational(mpz_class(static_cast<unsigned long>(raw)),
                                             ipow(b, n)),
                          "raw placement count differs at N=" + std::to_string(n) +
                              " B=" + std::to_string(b) + " s=" + std::to_string(s));
            }
        }
    }
    const auto counter = check_property1({2, 2}, 2);
    c.require(counter.size() == 2 && !counter[1].holds, "missing the (2,2,2) violation");
    c.require(counter[1].joint == Rational(1, 2) && counter[1].product_bound == Rational(1, 4),
              "(2,2,2) must report 1/2 > 1/4");
}

// 2. Monotone conditional probabilities over both workable bands.
void criterion_monotone_grid(Check& c) {
    for (uint64_t n = 2; n <= 200; ++n) {
        for (uint64_t b = 2; b <= 3 * n; ++b) {
            if (classify_regime({n, b}) == Regime::gap) continue;
            const MonotoneVerdict v = check_pj_monotone({n, b});
            c.require(v.monotone, "monotonicity violated at N=" + std::to_string(n) +
                                      " B=" + std::to_string(b) +
                                      " j=" + std::to_string(v.violated_at));
        }
    }
}

// 3. The algebraic ratio expansion agrees with the direct ratio to 1e-9
//    relative over a grid of at least 10^4 points.
void criterion_ratio_expansion(Check& c) {
    uint64_t points = 0;
    for (uint64_t n = 2; n <= 500; n += 7) {
        std::vector<int64_t> offsets = {-120, -60, -23, -11, -5, -2, 0, 2, 5, 11, 23, 60, 120};
        offsets.push_back(static_cast<int64_t>(n));      // B = 2N
        offsets.push_back(2 * static_cast<int64_t>(n));  // B = 3N
        offsets.push_back(-static_cast<int64_t>(n / 2));
        for (int64_t off : offsets) {
            const int64_t b_signed = static_cast<int64_t>(n) + off;
            if (b_signed < 2) continue;
            const uint64_t b = static_cast<uint64_t>(b_signed);
            const uint64_t hi = std::min(n, b);
            if (hi < 2) continue;
            for (uint64_t j = 0; j + 2 <= hi; j += (hi > 40 ? 5 : 1)) {
                if (n - j < 2) continue;
                if (b - j == 2 && n - j >= 3) continue;  // ratio undefined
                const double direct = pj_ratio_direct({n, b}, j);
                const double expansion = pj_ratio_expansion({n, b}, j);
                ++points;
                if (std::abs(expansion - direct) > 1e-9 * std::abs(direct)) {
                    c.require(false, "expansion mismatch at N=" + std::to_string(n) +
                                         " B=" + std::to_string(b) + " j=" + std::to_string(j));
                    return;
                }
            }
        }
    }
    c.require(points >= 10000, "grid too small: " + std::to_string(points) + " points");
}

// 4. Product inequality for the moment generating function: ordered on the
//    workable side, and strictly reversed for 2 balls in 2 bins.
void criterion_mgf(Check& c) {
    const std::vector<double> lambdas = {0.1, 0.5, 1.0, 2.0};
    for (uint64_t n = 1; n <= 5; ++n) {
        for (uint64_t b = n + ceil_sqrt(n); b <= 16; ++b) {
            for (double lambda : lambdas) {
                const MgfSides sides = enumerate_mgf_sides(n, b, lambda);
                c.require(sides.lhs <= sides.rhs + 1e-12,
                          "lhs > rhs at N=" + std::to_string(n) + " B=" + std::to_string(b) +
                              " lambda=" + std::to_string(lambda));
            }
        }
    }
    const MgfSides counter = enumerate_mgf_sides(2, 2, 1.0);
    c.require(counter.lhs > counter.rhs, "(2,2,lambda=1) should reverse the inequality");
}

// 5. Singleton concentration at scale and at moderate size.
void criterion_concentration(Check& c) {
    const uint64_t n = 100000;
    const uint64_t b = n + ceil_sqrt(n);
    const SingletonBounds bounds = singleton_bounds({n, b}, 0.1);
    c.require(bounds.lower.failure_prob < 1e-50,
              "analytic failure bound not < 1e-50: " + std::to_string(bounds.lower.failure_prob));
    const ConcentrationReport big = concentration_experiment(n, b, 0.1, 1000, 20250, 0);
    c.require(big.lower_violations == 0, "lower-bound violations at N=1e5: " +
                                             std::to_string(big.lower_violations));
    const ConcentrationReport mid = concentration_experiment(100, 120, 0.3, 10000, 20251, 0);
    c.require(mid.pass, "empirical rates exceeded bounds + 3 sigma at N=100, B=120");
}

// 6. All-distinct rate of a wide window, Monte Carlo and exact.
void criterion_last_window(Check& c) {
    const LastWindowReport rep = last_window_experiment(100, 20000, 10000, 20252, 0);
    c.require(rep.rate >= 0.5, "all-distinct rate below 1 - m^2/w: " + std::to_string(rep.rate));
    c.require(rep.pass, "last-window verdict failed");

    const auto dist = singleton_count_distribution(2, 5);
    c.require(dist[2] == 20, "exact all-distinct count for m=2, w=5 is not 20");
    const uint64_t raw = oracle::count_all_distinct(2, 5);
    c.require(raw == 20, "raw all-distinct count for m=2, w=5 is not 20");
}

// 7. Fixed windows of n + ceil(sqrt(n)) finish inside the window budget.
void criterion_fixed_backoff(Check& c) {
    const uint64_t n = 100000;
    ExperimentOptions opts;
    opts.workers = 0;
    const MakespanStats stats = makespan_experiment(ProtocolKind::fb, n, 100, 20253, opts);
    g_fb_run = stats;
    const uint64_t budget = ceil_lg_lg(n) + 7;
    c.require(budget == 12, "window budget for n=1e5 should be 12");
    c.require(stats.truncated_trials == 0, "trials truncated");
    uint64_t max_windows = 0;
    for (uint32_t w : stats.windows_used) max_windows = std::max<uint64_t>(max_windows, w);
    c.require(max_windows <= budget,
              "trial used " + std::to_string(max_windows) + " windows (budget 12)");
    const uint64_t window = n + ceil_sqrt(n);
    c.require(stats.max <= budget * window, "makespan above 12 (n + sqrt n)");
    for (const Verdict& v : stats.verdicts)
        c.require(v.pass, "verdict failed: " + v.name);
}

// 8. Binary exponential backoff: all trials finish, the window count after
//    reaching n + sqrt(n) stays within budget, and the slack slot bound holds.
void criterion_binary_exponential(Check& c) {
    const uint64_t n = 10000;
    ExperimentOptions opts;
    opts.workers = 0;
    const MakespanStats stats = makespan_experiment(ProtocolKind::beb, n, 100, 20254, opts);
    c.require(stats.truncated_trials == 0, "trials truncated");
    bool window_verdict = false, makespan_verdict = false;
    for (const Verdict& v : stats.verdicts) {
        if (v.name == "beb_windows_after_threshold") {
            window_verdict = true;
            c.require(v.bound == static_cast<double>(ceil_lg_lg(n) + 7), "wrong window budget");
            c.require(v.pass, "window count after threshold exceeded the budget");
        }
        if (v.name == "beb_makespan") {
            makespan_verdict = true;
            c.require(v.bound == 512.0 * n * std::log2(static_cast<double>(n)),
                      "wrong slot bound");
            c.require(v.pass, "makespan above 512 n lg n");
        }
    }
    c.require(window_verdict && makespan_verdict, "missing a verdict");
}

// 9. Sawtooth: linear makespan with a calibrated constant and a flat ratio
//    across a geometric grid of batch sizes.
void criterion_sawtooth(Check& c) {
    double min_ratio = 1e300, max_ratio = 0.0;
    for (uint64_t n : {uint64_t{1} << 10, uint64_t{1} << 12, uint64_t{1} << 14, uint64_t{1} << 16}) {
        ExperimentOptions opts;
        opts.workers = 0;
        const MakespanStats stats = makespan_experiment(ProtocolKind::stb, n, 50, 20255, opts);
        g_stb_runs.push_back(stats);
        c.require(stats.truncated_trials == 0, "trials truncated at n=" + std::to_string(n));
        const double ratio = stats.mean / static_cast<double>(n);
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
        c.require(ratio <= calibration::kStbMakespanPerPacket,
                  "mean makespan/n = " + std::to_string(ratio) + " above the calibrated bound at n=" +
                      std::to_string(n));
    }
    c.require(max_ratio / min_ratio <= 4.0,
              "makespan/n drifts by more than 4x across the grid");
}

// 10. Log-log backoff: makespan within the calibrated factor of
//     n lglg n / lglglg n, flat across the grid.
void criterion_loglog(Check& c) {
    double min_ratio = 1e300, max_ratio = 0.0;
    for (uint64_t n : {uint64_t{1} << 12, uint64_t{1} << 14, uint64_t{1} << 16}) {
        ExperimentOptions opts;
        opts.workers = 0;
        const MakespanStats stats = makespan_experiment(ProtocolKind::llb, n, 50, 20256, opts);
        c.require(stats.truncated_trials == 0, "trials truncated at n=" + std::to_string(n));
        const double nn = static_cast<double>(n);
        const double scale = nn * std::log2(std::log2(nn)) / std::log2(std::log2(std::log2(nn)));
        const double ratio = stats.mean / scale;
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
        c.require(ratio <= calibration::kLlbMakespanFactor,
                  "mean makespan factor " + std::to_string(ratio) + " above the calibrated bound at n=" +
                      std::to_string(n));
    }
    c.require(max_ratio / min_ratio <= 4.0, "makespan factor drifts by more than 4x");
}

// 11. Per-window recursion audits across the fixed-window and sawtooth runs:
//     violation rates stay within 10x the (i+1)/n^2 envelope.
void criterion_audit_envelope(Check& c) {
    c.require(g_fb_run.has_value() && !g_stb_runs.empty(),
              "criteria 7 and 9 must run before the audit check");
    if (!g_fb_run || g_stb_runs.empty()) return;

    bool fb_audited = false;
    for (const Verdict& v : g_fb_run->verdicts) {
        if (v.name.rfind("audit_", 0) == 0) {
            fb_audited = true;
            c.require(v.pass, "fb: " + v.name + " exceeded the envelope");
        }
    }
    c.require(fb_audited, "fb: no audit verdicts attached");

    // Sawtooth executions clear every packet before any window reaches the
    // 4n anchor, so their audit is vacuous: no qualifying window may exist,
    // and any attached verdict must still pass.
    for (const MakespanStats& s : g_stb_runs)
        for (const Verdict& v : s.verdicts)
            if (v.name.rfind("audit_", 0) == 0)
                c.require(v.pass, "stb n=" + std::to_string(s.n_packets) + ": " + v.name);

    // To exercise the run inequalities on real draws, audit a halving run
    // that starts at 4n, the regime those inequalities describe.
    const uint64_t n = 4096;
    std::vector<uint64_t> sizes;
    for (uint64_t w = 4 * n; w >= 1; w /= 2) sizes.push_back(w);
    sizes.push_back(4 * n);  // repeated tail so stragglers always finish

    std::map<std::pair<AuditCase, uint64_t>, std::pair<uint64_t, uint64_t>> cells;
    const uint64_t trials = 100;
    for (uint64_t t = 0; t < trials; ++t) {
        const ProtocolTrace trace =
            run_protocol(n, WindowSchedule::custom(sizes), {20257, t});
        c.require(!trace.truncated, "halving-run trial truncated");
        const RecursionAudit audit = recursion_audit(trace, n, ProtocolKind::stb);
        c.require(audit.applicable, "halving-run audit must anchor at 4n");
        for (const AuditEntry& e : audit.entries) {
            if (e.audit_case == AuditCase::wide_window_clear) continue;
            auto& cell = cells[{e.audit_case, e.window_index}];
            ++cell.first;
            cell.second += e.pass ? 0 : 1;
        }
    }
    bool saw_base = false, saw_run_cap = false;
    for (const auto& [key, counts] : cells) {
        saw_base |= key.first == AuditCase::sawtooth_base;
        saw_run_cap |= key.first == AuditCase::sawtooth_run_cap;
        const double envelope = std::min(
            1.0, 10.0 * static_cast<double>(key.second + 1) / (static_cast<double>(n) * n));
        const double rate =
            static_cast<double>(counts.second) / static_cast<double>(counts.first);
        c.require(rate <= envelope,
                  std::string("halving run: ") + to_string(key.first) + " window " +
                      std::to_string(key.second) + " rate " + std::to_string(rate));
    }
    c.require(saw_base, "halving run never checked the base-case contraction");
    c.require(saw_run_cap, "halving run never checked the run caps");
}

// 12. Byte-identical JSON from the command line regardless of worker count.
void criterion_determinism(Check& c) {
    const std::vector<std::string> commands = {
        "experiment makespan --protocol beb --n 4096 --trials 10 --seed 42 --format json --workers ",
        "experiment concentration --n 500 --b 600 --eps 0.2 --trials 400 --seed 42 --format json --workers ",
    };
    for (const std::string& base : commands) {
        int rc1 = 0, rc2 = 0, rc4 = 0;
        const std::string one = run_command(base + "1", rc1);
        const std::string two = run_command(base + "2", rc2);
        const std::string four = run_command(base + "4", rc4);
        c.require(rc1 == 0 && rc2 == 0 && rc4 == 0, "command failed: " + base);
        c.require(one == two && two == four, "output differs across worker counts: " + base);
        c.require(!one.empty(), "empty output: " + base);
    }
    // repeated runs must also be identical
    int rc = 0;
    const std::string again = run_command(commands[0] + "2", rc);
    const std::string before = run_command(commands[0] + "2", rc);
    c.require(again == before, "repeated run differs");
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<void(Check&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "exact subset-product verification", 5, criterion_property1},
        {2, "conditional probability monotone on both bands", 30, criterion_monotone_grid},
        {3, "ratio expansion identity", 30, criterion_ratio_expansion},
        {4, "mgf product inequality", 10, criterion_mgf},
        {5, "singleton concentration", 60, criterion_concentration},
        {6, "wide-window all-distinct rate", 10, criterion_last_window},
        {7, "fixed backoff window budget", 60, criterion_fixed_backoff},
        {8, "binary exponential backoff bounds", 60, criterion_binary_exponential},
        {9, "sawtooth linear makespan", 300, criterion_sawtooth},
        {10, "log-log makespan factor", 300, criterion_loglog},
        {11, "recursion audit envelope", 300, criterion_audit_envelope},
        {12, "deterministic output across workers", 10, criterion_determinism},
    };

    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const Criterion& cr : criteria) {
        if (!wanted.empty() && !wanted.count(cr.id)) continue;
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.fn(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > cr.budget_seconds)
            check.failures.push_back("runtime " + std::to_string(elapsed) + "s over the " +
                                     std::to_string(cr.budget_seconds) + "s budget");
        const bool pass = check.failures.empty();
        failed += !pass;
        std::printf("[%2d] %-48s %s (%.2fs)\n", cr.id, cr.name, pass ? "PASS" : "FAIL", elapsed);
        for (const std::string& f : check.failures) std::printf("     - %s\n", f.c_str());
    }
    return failed == 0 ? 0 : 1;
}

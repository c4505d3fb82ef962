// backoffsim: command-line front end for the windowed-backoff toolkit.
// Exit codes: 0 success / all verdicts pass, 1 verdict failure,
//             2 usage or argument error, 3 slot-cap truncation.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "backoff/analytic.hpp"
#include "backoff/intmath.hpp"
#include "backoff/balls_bins.hpp"
#include "backoff/errors.hpp"
#include "backoff/experiments.hpp"
#include "backoff/report.hpp"

namespace {

using backoff::Verdict;
using nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitTruncated = 3;

struct Output {
    std::string format = "table";
    std::string path;  // empty = stdout

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            if (text.empty() || text.back() != '\n') std::cout << '\n';
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw backoff::Error("cannot open output file '" + path + "'");
        out << text;
        if (text.empty() || text.back() != '\n') out << '\n';
    }

    void emit_json(const ordered_json& j) const { emit(j.dump(2)); }
};

void add_output_flags(CLI::App* cmd, Output& out) {
    cmd->add_option("--format", out.format, "Output format")
        ->transform(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    cmd->add_option("--out", out.path, "Write output to a file instead of stdout");
}

std::string real12(double v) {
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::string csv = "key,value\n";
    for (const auto& [k, v] : rows) csv += k + "," + v + "\n";
    return csv;
}

// Renders a scalar analytic result in the requested format.
void emit_scalar(const Output& out, const std::string& name, double value) {
    if (out.format == "json")
        out.emit_json({{name, value}});
    else if (out.format == "csv")
        out.emit(key_value_csv({{name, real12(value)}}));
    else
        out.emit(real12(value));
}

std::string verdict_line(const Verdict& v) {
    return "VERDICT " + v.name + " observed=" + real12(v.observed) +
           " bound=" + real12(v.bound) + (v.pass ? " PASS" : " FAIL");
}

int verdict_exit(const std::vector<Verdict>& verdicts, uint64_t truncated_trials) {
    if (truncated_trials > 0) return kExitTruncated;
    for (const Verdict& v : verdicts)
        if (!v.pass) return kExitVerdictFailure;
    return kExitPass;
}

// ---------------------------------------------------------------- analytic

struct AnalyticArgs {
    uint64_t n = 0, b = 0, j = 0, max_s = 0;
    double eps = 0.0;
    bool expansion = false;
    Output out;
};

int run_analytic_pj(const AnalyticArgs& a) {
    emit_scalar(a.out, "pj", backoff::cond_prob_pj({a.n, a.b}, a.j));
    return kExitPass;
}

int run_analytic_ratio(const AnalyticArgs& a) {
    const double v = a.expansion ? backoff::pj_ratio_expansion({a.n, a.b}, a.j)
                                 : backoff::pj_ratio_direct({a.n, a.b}, a.j);
    emit_scalar(a.out, a.expansion ? "ratio_expansion" : "ratio_direct", v);
    return kExitPass;
}

int run_analytic_expected(const AnalyticArgs& a) {
    emit_scalar(a.out, "expected_singletons", backoff::expected_singletons({a.n, a.b}));
    return kExitPass;
}

int run_analytic_regime(const AnalyticArgs& a) {
    const char* r = backoff::to_string(backoff::classify_regime({a.n, a.b}));
    if (a.out.format == "json")
        a.out.emit_json({{"regime", r}});
    else if (a.out.format == "csv")
        a.out.emit(key_value_csv({{"regime", r}}));
    else
        a.out.emit(r);
    return kExitPass;
}

int run_analytic_bounds(const AnalyticArgs& a) {
    const backoff::SingletonBounds b = backoff::singleton_bounds({a.n, a.b}, a.eps);
    if (a.out.format == "json") {
        a.out.emit_json({{"lower",
                          {{"threshold", b.lower.threshold}, {"failure_prob", b.lower.failure_prob}}},
                         {"upper",
                          {{"threshold", b.upper.threshold}, {"failure_prob", b.upper.failure_prob}}}});
    } else if (a.out.format == "csv") {
        a.out.emit(key_value_csv({{"lower_threshold", real12(b.lower.threshold)},
                                  {"lower_failure_prob", real12(b.lower.failure_prob)},
                                  {"upper_threshold", real12(b.upper.threshold)},
                                  {"upper_failure_prob", real12(b.upper.failure_prob)}}));
    } else {
        a.out.emit("lower threshold=" + real12(b.lower.threshold) +
                   " failure_prob=" + real12(b.lower.failure_prob) + "\n" +
                   "upper threshold=" + real12(b.upper.threshold) +
                   " failure_prob=" + real12(b.upper.failure_prob));
    }
    return kExitPass;
}

int run_analytic_property1(const AnalyticArgs& a) {
    const auto checks = backoff::check_property1({a.n, a.b}, a.max_s);
    if (a.out.format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& c : checks)
            arr.push_back({{"s", c.subset_size},
                           {"joint", c.joint.str()},
                           {"bound", c.product_bound.str()},
                           {"holds", c.holds}});
        a.out.emit_json({{"n", a.n}, {"b", a.b}, {"checks", arr}});
    } else if (a.out.format == "csv") {
        std::string csv = "s,joint,bound,holds\n";
        for (const auto& c : checks)
            csv += std::to_string(c.subset_size) + "," + c.joint.str() + "," +
                   c.product_bound.str() + "," + (c.holds ? "1" : "0") + "\n";
        a.out.emit(csv);
    } else {
        std::string text;
        for (const auto& c : checks) {
            text += "s=" + std::to_string(c.subset_size);
            text += c.holds ? " HOLDS " + c.joint.str() + " <= " + c.product_bound.str()
                            : " VIOLATED " + c.joint.str() + " > " + c.product_bound.str();
            text += "\n";
        }
        a.out.emit(text);
    }
    return kExitPass;
}

// ------------------------------------------------------- simulate / experiment

struct ProtocolArgs {
    std::string protocol;
    uint64_t n = 0;
    uint64_t seed = 0;
    uint64_t trials = 1;
    uint64_t slot_cap = backoff::kDefaultSlotCap;
    unsigned workers = 0;  // 0 = hardware concurrency
    std::optional<uint64_t> fb_window;
    uint64_t llb_initial = 2;
    uint64_t stb_initial = 2;
    std::string schedule_file;
    double stb_constant = backoff::calibration::kStbMakespanPerPacket;
    double llb_constant = backoff::calibration::kLlbMakespanFactor;
    double beb_linear_term = 0.0;
    double midrange_constant = 4.0;
    uint64_t trial_index = 0;
    Output out;
};

void add_schedule_flags(CLI::App* cmd, ProtocolArgs& a) {
    cmd->add_option("--protocol", a.protocol, "fb, beb, llb, stb or custom")->required();
    cmd->add_option("--window", a.fb_window, "fb window size (default n + ceil(sqrt(n)))");
    cmd->add_option("--llb-initial", a.llb_initial, "llb initial window size")
        ->capture_default_str();
    cmd->add_option("--stb-initial", a.stb_initial, "stb initial outer window size")
        ->capture_default_str();
    cmd->add_option("--schedule-file", a.schedule_file,
                    "custom schedule: text file with one window size per line");
    cmd->add_option("--slot-cap", a.slot_cap, "stop once total slots would exceed this")
        ->capture_default_str();
}

backoff::ExperimentOptions experiment_options(const ProtocolArgs& a) {
    backoff::ExperimentOptions opts;
    opts.slot_cap = a.slot_cap;
    opts.workers = a.workers;
    opts.fb_window = a.fb_window;
    opts.llb_initial = a.llb_initial;
    opts.stb_initial = a.stb_initial;
    opts.stb_constant = a.stb_constant;
    opts.llb_constant = a.llb_constant;
    opts.beb_linear_term = a.beb_linear_term;
    opts.audit_midrange_constant = a.midrange_constant;
    if (!a.schedule_file.empty()) {
        // reuse the file parser, then hand the sizes to the experiment
        backoff::WindowSchedule sched = backoff::WindowSchedule::from_file(a.schedule_file);
        std::vector<uint64_t> sizes;
        for (int i = 0; i < 4096; ++i) sizes.push_back(sched.next());
        opts.custom_sizes = std::move(sizes);
    }
    return opts;
}

backoff::WindowSchedule make_cli_schedule(backoff::ProtocolKind kind, const ProtocolArgs& a) {
    using backoff::WindowSchedule;
    switch (kind) {
        case backoff::ProtocolKind::fb:
            return WindowSchedule::fixed(
                a.fb_window.value_or(a.n + backoff::ceil_sqrt(a.n)));
        case backoff::ProtocolKind::beb: return WindowSchedule::binary_exponential();
        case backoff::ProtocolKind::llb: return WindowSchedule::log_log(a.llb_initial);
        case backoff::ProtocolKind::stb: return WindowSchedule::sawtooth(a.stb_initial);
        case backoff::ProtocolKind::custom:
            if (a.schedule_file.empty())
                throw backoff::DomainError("custom protocol needs --schedule-file");
            return WindowSchedule::from_file(a.schedule_file);
    }
    throw backoff::DomainError("invalid protocol");
}

int run_simulate_trace(const ProtocolArgs& a) {
    const backoff::ProtocolKind kind = backoff::protocol_kind_from_string(a.protocol);
    const backoff::ProtocolTrace trace =
        backoff::run_protocol(a.n, make_cli_schedule(kind, a), {a.seed, a.trial_index}, a.slot_cap);
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(trace));
    else if (a.out.format == "csv")
        a.out.emit(backoff::to_csv(trace));
    else {
        std::string text;
        for (const auto& r : trace.records)
            text += "i=" + std::to_string(r.window_index) + " w=" + std::to_string(r.window_size) +
                    " m=" + std::to_string(r.packets_at_start) +
                    " successes=" + std::to_string(r.successes) + "\n";
        text += trace.makespan_slots
                    ? "makespan=" + std::to_string(*trace.makespan_slots)
                    : std::string("TRUNCATED at slot cap ") + std::to_string(a.slot_cap);
        a.out.emit(text);
    }
    return trace.truncated ? kExitTruncated : kExitPass;
}

int run_simulate_singletons(const ProtocolArgs& a, uint64_t n_bins) {
    backoff::SimulateOptions opts;
    opts.workers = a.workers;
    const backoff::SampleStats stats =
        backoff::simulate_singletons(a.n, n_bins, a.trials, a.seed, opts);
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(stats, a.n, n_bins, a.seed));
    else if (a.out.format == "csv")
        a.out.emit(backoff::to_csv(stats));
    else
        a.out.emit("trials=" + std::to_string(stats.trials) + " mean=" + real12(stats.mean) +
                   " min=" + std::to_string(stats.min) + " max=" + std::to_string(stats.max));
    return kExitPass;
}

int run_experiment_makespan(const ProtocolArgs& a) {
    const backoff::ProtocolKind kind = backoff::protocol_kind_from_string(a.protocol);
    const backoff::MakespanStats stats =
        backoff::makespan_experiment(kind, a.n, a.trials, a.seed, experiment_options(a));
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(stats));
    else if (a.out.format == "csv")
        a.out.emit(backoff::to_csv(stats));
    else {
        std::string text = "protocol=" + std::string(backoff::to_string(stats.kind)) +
                           " n=" + std::to_string(stats.n_packets) +
                           " trials=" + std::to_string(stats.trials) +
                           " mean=" + real12(stats.mean) + " min=" + std::to_string(stats.min) +
                           " max=" + std::to_string(stats.max) +
                           " truncated=" + std::to_string(stats.truncated_trials) + "\n";
        for (const Verdict& v : stats.verdicts) text += verdict_line(v) + "\n";
        a.out.emit(text);
    }
    return verdict_exit(stats.verdicts, stats.truncated_trials);
}

int run_experiment_concentration(const ProtocolArgs& a, uint64_t n_bins, double eps) {
    const backoff::ConcentrationReport rep =
        backoff::concentration_experiment(a.n, n_bins, eps, a.trials, a.seed, a.workers);
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(rep));
    else if (a.out.format == "csv") {
        std::string csv = "name,bound,observed,pass\n";
        for (const Verdict& v : rep.verdicts)
            csv += v.name + "," + real12(v.bound) + "," + real12(v.observed) + "," +
                   (v.pass ? "1" : "0") + "\n";
        a.out.emit(csv);
    } else {
        std::string text;
        for (const Verdict& v : rep.verdicts) text += verdict_line(v) + "\n";
        a.out.emit(text);
    }
    return verdict_exit(rep.verdicts, 0);
}

int run_experiment_lastwindow(const ProtocolArgs& a, uint64_t m, uint64_t w) {
    const backoff::LastWindowReport rep =
        backoff::last_window_experiment(m, w, a.trials, a.seed, a.workers);
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(rep));
    else if (a.out.format == "csv") {
        std::string csv = "name,bound,observed,pass\n";
        for (const Verdict& v : rep.verdicts)
            csv += v.name + "," + real12(v.bound) + "," + real12(v.observed) + "," +
                   (v.pass ? "1" : "0") + "\n";
        a.out.emit(csv);
    } else {
        std::string text = "bound=" + real12(rep.bound) + " rate=" + real12(rep.rate) + "\n";
        for (const Verdict& v : rep.verdicts) text += verdict_line(v) + "\n";
        a.out.emit(text);
    }
    return verdict_exit(rep.verdicts, 0);
}

int run_experiment_audit(const ProtocolArgs& a) {
    const backoff::ProtocolKind kind = backoff::protocol_kind_from_string(a.protocol);
    const backoff::ProtocolTrace trace =
        backoff::run_protocol(a.n, make_cli_schedule(kind, a), {a.seed, a.trial_index}, a.slot_cap);
    const backoff::RecursionAudit audit =
        backoff::recursion_audit(trace, a.n, kind, {a.midrange_constant});
    if (a.out.format == "json")
        a.out.emit_json(backoff::to_json(audit));
    else if (a.out.format == "csv")
        a.out.emit(backoff::to_csv(audit));
    else {
        if (!audit.applicable) {
            a.out.emit("audit not applicable: no window reached the anchor size");
        } else {
            std::string text;
            for (const auto& e : audit.entries)
                text += "i=" + std::to_string(e.window_index) + " m=" + std::to_string(e.m_at_start) +
                        " w=" + std::to_string(e.window_size) + " case=" +
                        backoff::to_string(e.audit_case) + " predicted=" + real12(e.predicted) +
                        (e.pass ? " PASS" : " FAIL") + "\n";
            a.out.emit(text);
        }
    }
    if (trace.truncated) return kExitTruncated;
    for (const auto& e : audit.entries)
        if (!e.pass && e.audit_case != backoff::AuditCase::wide_window_clear)
            return kExitVerdictFailure;
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification toolkit for windowed backoff under batched arrivals"};
    app.require_subcommand(1);

    int rc = kExitPass;
    AnalyticArgs an;
    ProtocolArgs pr;
    uint64_t n_bins = 0, lw_m = 0, lw_w = 0;
    double eps = 0.0;

    // analytic ------------------------------------------------------------
    CLI::App* analytic = app.add_subcommand("analytic", "Closed-form probabilities and bounds");
    analytic->require_subcommand(1);

    auto add_nb = [&](CLI::App* cmd) {
        cmd->add_option("--n", an.n, "number of balls (packets)")->required();
        cmd->add_option("--b", an.b, "number of bins (slots)")->required();
        add_output_flags(cmd, an.out);
    };

    CLI::App* pj = analytic->add_subcommand("pj", "Conditional singleton probability P_j");
    add_nb(pj);
    pj->add_option("--j", an.j, "index j")->required();
    pj->callback([&] { rc = run_analytic_pj(an); });

    CLI::App* ratio = analytic->add_subcommand("ratio", "Ratio P_j / P_(j+1)");
    add_nb(ratio);
    ratio->add_option("--j", an.j, "index j")->required();
    ratio->add_flag("--expansion", an.expansion, "evaluate the algebraic expansion instead");
    ratio->callback([&] { rc = run_analytic_ratio(an); });

    CLI::App* expected = analytic->add_subcommand("expected", "Expected singleton count");
    add_nb(expected);
    expected->callback([&] { rc = run_analytic_expected(an); });

    CLI::App* regime = analytic->add_subcommand("regime", "Classify (N, B): above, below or gap");
    add_nb(regime);
    regime->callback([&] { rc = run_analytic_regime(an); });

    CLI::App* bounds = analytic->add_subcommand("bounds", "Singleton concentration bounds");
    add_nb(bounds);
    bounds->add_option("--eps", an.eps, "epsilon in (0,1)")->required();
    bounds->callback([&] { rc = run_analytic_bounds(an); });

    CLI::App* property1 = analytic->add_subcommand("property1", "Exact subset-product checks");
    add_nb(property1);
    property1->add_option("--max-s", an.max_s, "largest subset size to check")->required();
    property1->callback([&] { rc = run_analytic_property1(an); });

    // simulate ------------------------------------------------------------
    CLI::App* simulate = app.add_subcommand("simulate", "Single traces and singleton sampling");
    simulate->require_subcommand(1);

    CLI::App* trace = simulate->add_subcommand("trace", "One protocol execution, window by window");
    trace->add_option("--n", pr.n, "batch size")->required();
    trace->add_option("--seed", pr.seed, "stream seed")->required();
    trace->add_option("--trial", pr.trial_index, "stream id within the seed")
        ->capture_default_str();
    add_schedule_flags(trace, pr);
    add_output_flags(trace, pr.out);
    trace->callback([&] { rc = run_simulate_trace(pr); });

    CLI::App* singletons = simulate->add_subcommand("singletons", "Singleton counts over trials");
    singletons->add_option("--n", pr.n, "number of balls")->required();
    singletons->add_option("--b", n_bins, "number of bins")->required();
    singletons->add_option("--trials", pr.trials, "number of trials")->required();
    singletons->add_option("--seed", pr.seed, "stream seed")->required();
    singletons->add_option("--workers", pr.workers, "worker threads (0 = all cores)");
    add_output_flags(singletons, pr.out);
    singletons->callback([&] { rc = run_simulate_singletons(pr, n_bins); });

    // experiment ----------------------------------------------------------
    CLI::App* experiment = app.add_subcommand("experiment", "Verdict-bearing experiments");
    experiment->require_subcommand(1);

    CLI::App* makespan = experiment->add_subcommand("makespan", "Makespan statistics and bounds");
    makespan->add_option("--n", pr.n, "batch size")->required();
    makespan->add_option("--trials", pr.trials, "number of trials")->required();
    makespan->add_option("--seed", pr.seed, "stream seed")->required();
    makespan->add_option("--workers", pr.workers, "worker threads (0 = all cores)");
    makespan->add_option("--stb-constant", pr.stb_constant, "slots-per-packet bound for stb")
        ->capture_default_str();
    makespan->add_option("--llb-constant", pr.llb_constant, "makespan factor bound for llb")
        ->capture_default_str();
    makespan->add_option("--beb-c", pr.beb_linear_term, "linear term c in the beb bound")
        ->capture_default_str();
    makespan->add_option("--midrange-k", pr.midrange_constant, "audit constant K")
        ->capture_default_str();
    add_schedule_flags(makespan, pr);
    add_output_flags(makespan, pr.out);
    makespan->callback([&] { rc = run_experiment_makespan(pr); });

    CLI::App* concentration =
        experiment->add_subcommand("concentration", "Singleton concentration across trials");
    concentration->add_option("--n", pr.n, "number of balls")->required();
    concentration->add_option("--b", n_bins, "number of bins")->required();
    concentration->add_option("--eps", eps, "epsilon in (0,1)")->required();
    concentration->add_option("--trials", pr.trials, "number of trials")->required();
    concentration->add_option("--seed", pr.seed, "stream seed")->required();
    concentration->add_option("--workers", pr.workers, "worker threads (0 = all cores)");
    add_output_flags(concentration, pr.out);
    concentration->callback(
        [&] { rc = run_experiment_concentration(pr, n_bins, eps); });

    CLI::App* lastwindow =
        experiment->add_subcommand("lastwindow", "All-distinct rate for one wide window");
    lastwindow->add_option("--m", lw_m, "packets")->required();
    lastwindow->add_option("--w", lw_w, "window size (must exceed 2m)")->required();
    lastwindow->add_option("--trials", pr.trials, "number of trials")->required();
    lastwindow->add_option("--seed", pr.seed, "stream seed")->required();
    lastwindow->add_option("--workers", pr.workers, "worker threads (0 = all cores)");
    add_output_flags(lastwindow, pr.out);
    lastwindow->callback([&] { rc = run_experiment_lastwindow(pr, lw_m, lw_w); });

    CLI::App* audit = experiment->add_subcommand("audit", "Per-window recursion audit of one trace");
    audit->add_option("--n", pr.n, "batch size")->required();
    audit->add_option("--seed", pr.seed, "stream seed")->required();
    audit->add_option("--trial", pr.trial_index, "stream id within the seed")
        ->capture_default_str();
    audit->add_option("--midrange-k", pr.midrange_constant, "audit constant K")->capture_default_str();
    add_schedule_flags(audit, pr);
    add_output_flags(audit, pr.out);
    audit->callback([&] { rc = run_experiment_audit(pr); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const backoff::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return rc;
}

#include "backoff/report.hpp"

#include <sstream>

namespace backoff {

namespace {

using nlohmann::ordered_json;

ordered_json verdicts_json(const std::vector<Verdict>& verdicts) {
    ordered_json arr = ordered_json::array();
    for (const Verdict& v : verdicts)
        arr.push_back({{"name", v.name}, {"bound", v.bound}, {"observed", v.observed}, {"pass", v.pass}});
    return arr;
}

ordered_json audit_json(const std::map<std::string, std::vector<AuditCell>>& audit) {
    ordered_json out = ordered_json::object();
    for (const auto& [name, cells] : audit) {
        ordered_json arr = ordered_json::array();
        for (size_t i = 0; i < cells.size(); ++i)
            arr.push_back({{"window", i},
                           {"applicable", cells[i].applicable},
                           {"violations", cells[i].violations},
                           {"envelope", cells[i].envelope}});
        out[name] = std::move(arr);
    }
    return out;
}

}  // namespace

ordered_json to_json(const MakespanStats& s) {
    ordered_json j;
    j["protocol"] = to_string(s.kind);
    j["params"] = {{"slot_cap", s.slot_cap}};
    j["n"] = s.n_packets;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["makespans"] = s.makespans;
    j["verdicts"] = verdicts_json(s.verdicts);
    j["windows_used"] = s.windows_used;
    j["truncated_trials"] = s.truncated_trials;
    j["summary"] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max}};
    j["audit"] = audit_json(s.audit);
    return j;
}

ordered_json to_json(const ConcentrationReport& r) {
    ordered_json j;
    j["protocol"] = "concentration";
    j["params"] = {{"n_bins", r.n_bins}, {"epsilon", r.epsilon}};
    j["n"] = r.n_balls;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["makespans"] = ordered_json::array();
    j["verdicts"] = verdicts_json(r.verdicts);
    j["bounds"] = {{"lower",
                    {{"threshold", r.bounds.lower.threshold},
                     {"failure_prob", r.bounds.lower.failure_prob}}},
                   {"upper",
                    {{"threshold", r.bounds.upper.threshold},
                     {"failure_prob", r.bounds.upper.failure_prob}}}};
    j["violations"] = {{"lower", r.lower_violations}, {"upper", r.upper_violations}};
    j["pass"] = r.pass;
    return j;
}

ordered_json to_json(const LastWindowReport& r) {
    ordered_json j;
    j["protocol"] = "lastwindow";
    j["params"] = {{"m", r.packets}, {"w", r.window}};
    j["n"] = r.packets;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["makespans"] = ordered_json::array();
    j["verdicts"] = verdicts_json(r.verdicts);
    j["bound"] = r.bound;
    j["all_succeed_count"] = r.all_succeed_count;
    j["rate"] = r.rate;
    j["pass"] = r.pass;
    return j;
}

ordered_json to_json(const ProtocolTrace& t) {
    ordered_json j;
    j["n"] = t.n_packets;
    j["windows"] = ordered_json::array();
    for (const WindowRecord& r : t.records)
        j["windows"].push_back({{"window_index", r.window_index},
                                {"window_size", r.window_size},
                                {"packets_at_start", r.packets_at_start},
                                {"successes", r.successes},
                                {"slots_elapsed_total", r.slots_elapsed_total}});
    if (t.makespan_slots)
        j["makespan_slots"] = *t.makespan_slots;
    else
        j["makespan_slots"] = nullptr;
    j["truncated"] = t.truncated;
    return j;
}

ordered_json to_json(const SampleStats& s, uint64_t n_balls, uint64_t n_bins, uint64_t seed) {
    ordered_json j;
    j["n_balls"] = n_balls;
    j["n_bins"] = n_bins;
    j["trials"] = s.trials;
    j["seed"] = seed;
    j["mean"] = s.mean;
    j["min"] = s.min;
    j["max"] = s.max;
    j["per_trial"] = s.per_trial;
    return j;
}

ordered_json to_json(const RecursionAudit& a) {
    ordered_json j;
    j["applicable"] = a.applicable;
    j["anchor_record"] = a.anchor_record;
    ordered_json entries = ordered_json::array();
    for (const AuditEntry& e : a.entries)
        entries.push_back({{"window", e.window_index},
                           {"m", e.m_at_start},
                           {"w", e.window_size},
                           {"case", to_string(e.audit_case)},
                           {"predicted", e.predicted},
                           {"pass", e.pass}});
    j["entries"] = std::move(entries);
    return j;
}

std::string to_csv(const MakespanStats& s) {
    std::ostringstream out;
    out << "trial_index,makespan_slots,windows_used,truncated\n";
    for (uint64_t t = 0; t < s.trials; ++t)
        out << t << ',' << s.makespans[t] << ',' << s.windows_used[t] << ','
            << (s.truncated[t] ? 1 : 0) << '\n';
    return out.str();
}

std::string to_csv(const ProtocolTrace& t) {
    std::ostringstream out;
    out << "window_index,window_size,packets_at_start,successes\n";
    for (const WindowRecord& r : t.records)
        out << r.window_index << ',' << r.window_size << ',' << r.packets_at_start << ','
            << r.successes << '\n';
    return out.str();
}

std::string to_csv(const SampleStats& s) {
    std::ostringstream out;
    out << "trial_index,singletons\n";
    for (uint64_t t = 0; t < s.per_trial.size(); ++t) out << t << ',' << s.per_trial[t] << '\n';
    return out.str();
}

std::string to_csv(const RecursionAudit& a) {
    std::ostringstream out;
    out << "window_index,m,w,case,predicted,pass\n";
    for (const AuditEntry& e : a.entries)
        out << e.window_index << ',' << e.m_at_start << ',' << e.window_size << ','
            << to_string(e.audit_case) << ',' << e.predicted << ',' << (e.pass ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace backoff

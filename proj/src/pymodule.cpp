#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "backoff/analytic.hpp"
#include "backoff/audit.hpp"
#include "backoff/balls_bins.hpp"
#include "backoff/errors.hpp"
#include "backoff/experiments.hpp"
#include "backoff/intmath.hpp"
#include "backoff/report.hpp"

namespace py = pybind11;

namespace {

using backoff::ProtocolKind;
using backoff::WindowSchedule;
using nlohmann::ordered_json;

py::object json_to_py(const ordered_json& j) {
    switch (j.type()) {
        case ordered_json::value_t::null: return py::none();
        case ordered_json::value_t::boolean: return py::bool_(j.get<bool>());
        case ordered_json::value_t::number_integer: return py::int_(j.get<int64_t>());
        case ordered_json::value_t::number_unsigned: return py::int_(j.get<uint64_t>());
        case ordered_json::value_t::number_float: return py::float_(j.get<double>());
        case ordered_json::value_t::string: return py::str(j.get<std::string>());
        case ordered_json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case ordered_json::value_t::object: {
            py::dict out;
            for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
            return out;
        }
        default: return py::none();
    }
}

py::dict rational_dict(const backoff::Rational& r) {
    py::dict d;
    d["fraction"] = r.str();
    d["value"] = r.to_double();
    return d;
}

WindowSchedule schedule_for(const std::string& protocol, uint64_t n, uint64_t fb_window,
                            uint64_t llb_initial, uint64_t stb_initial,
                            const std::vector<uint64_t>& custom_sizes) {
    const ProtocolKind kind = backoff::protocol_kind_from_string(protocol);
    switch (kind) {
        case ProtocolKind::fb:
            return WindowSchedule::fixed(fb_window ? fb_window : n + backoff::ceil_sqrt(n));
        case ProtocolKind::beb: return WindowSchedule::binary_exponential();
        case ProtocolKind::llb: return WindowSchedule::log_log(llb_initial);
        case ProtocolKind::stb: return WindowSchedule::sawtooth(stb_initial);
        case ProtocolKind::custom: return WindowSchedule::custom(custom_sizes);
    }
    throw backoff::DomainError("invalid protocol");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Windowed backoff under batched arrivals: simulation and verification toolkit";

    py::register_exception<backoff::DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<backoff::RegimeError>(m, "RegimeError", PyExc_ValueError);
    py::register_exception<backoff::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<backoff::CapExceededError>(m, "CapExceededError", PyExc_RuntimeError);
    py::register_exception<backoff::ResourceError>(m, "ResourceError", PyExc_RuntimeError);
    py::register_exception<backoff::DegenerateRatioError>(m, "DegenerateRatioError",
                                                          PyExc_ZeroDivisionError);

    // balls into bins -------------------------------------------------------
    m.def(
        "place_balls",
        [](uint64_t n_balls, uint64_t n_bins, uint64_t seed, uint64_t stream) {
            return backoff::place_balls(n_balls, n_bins, {seed, stream}).bin_counts;
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("seed"), py::arg("stream") = 0,
        "Drop n_balls into n_bins uniformly at random; returns the per-bin counts.");

    m.def(
        "simulate_singletons",
        [](uint64_t n_balls, uint64_t n_bins, uint64_t trials, uint64_t seed, unsigned workers) {
            backoff::SimulateOptions opts;
            opts.workers = workers;
            const auto stats = backoff::simulate_singletons(n_balls, n_bins, trials, seed, opts);
            return json_to_py(backoff::to_json(stats, n_balls, n_bins, seed));
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1);

    m.def(
        "enumerate_joint_singleton_prob",
        [](uint64_t n_balls, uint64_t n_bins, const std::vector<uint64_t>& bins, uint64_t cap) {
            return rational_dict(backoff::enumerate_joint_singleton_prob(n_balls, n_bins, bins, cap));
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("bins"),
        py::arg("cap") = backoff::kDefaultEnumerationCap,
        "Exact joint singleton probability by exhaustive counting.");

    m.def(
        "enumerate_mgf_sides",
        [](uint64_t n_balls, uint64_t n_bins, double lambda, uint64_t cap) {
            const auto sides = backoff::enumerate_mgf_sides(n_balls, n_bins, lambda, cap);
            return py::make_tuple(sides.lhs, sides.rhs);
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("lambda_"),
        py::arg("cap") = backoff::kDefaultEnumerationCap);

    // closed forms ----------------------------------------------------------
    m.def(
        "cond_prob_pj",
        [](uint64_t n, uint64_t b, uint64_t j) { return backoff::cond_prob_pj({n, b}, j); },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("j"));
    m.def(
        "pj_ratio_direct",
        [](uint64_t n, uint64_t b, uint64_t j) { return backoff::pj_ratio_direct({n, b}, j); },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("j"));
    m.def(
        "pj_ratio_expansion",
        [](uint64_t n, uint64_t b, uint64_t j) { return backoff::pj_ratio_expansion({n, b}, j); },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("j"));
    m.def(
        "classify_regime",
        [](uint64_t n, uint64_t b) { return std::string(to_string(backoff::classify_regime({n, b}))); },
        py::arg("n_balls"), py::arg("n_bins"));
    m.def(
        "check_pj_monotone",
        [](uint64_t n, uint64_t b) {
            const auto v = backoff::check_pj_monotone({n, b});
            py::dict d;
            d["monotone"] = v.monotone;
            if (!v.monotone) d["violated_at"] = v.violated_at;
            return d;
        },
        py::arg("n_balls"), py::arg("n_bins"));
    m.def(
        "joint_singleton_prob_closed",
        [](uint64_t n, uint64_t b, uint64_t s) {
            return rational_dict(backoff::joint_singleton_prob_closed({n, b}, s));
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("subset_size"));
    m.def(
        "check_property1",
        [](uint64_t n, uint64_t b, uint64_t max_s) {
            py::list out;
            for (const auto& c : backoff::check_property1({n, b}, max_s)) {
                py::dict d;
                d["s"] = c.subset_size;
                d["joint"] = c.joint.str();
                d["bound"] = c.product_bound.str();
                d["holds"] = c.holds;
                out.append(d);
            }
            return out;
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("max_s"));
    m.def(
        "expected_singletons",
        [](uint64_t n, uint64_t b) { return backoff::expected_singletons({n, b}); },
        py::arg("n_balls"), py::arg("n_bins"));
    m.def("chernoff_upper_tail", &backoff::chernoff_upper_tail, py::arg("epsilon"), py::arg("mean"));
    m.def("chernoff_lower_tail", &backoff::chernoff_lower_tail, py::arg("epsilon"), py::arg("mean"));
    m.def(
        "singleton_bounds",
        [](uint64_t n, uint64_t b, double epsilon) {
            const auto bounds = backoff::singleton_bounds({n, b}, epsilon);
            py::dict lower, upper, d;
            lower["threshold"] = bounds.lower.threshold;
            lower["failure_prob"] = bounds.lower.failure_prob;
            upper["threshold"] = bounds.upper.threshold;
            upper["failure_prob"] = bounds.upper.failure_prob;
            d["lower"] = lower;
            d["upper"] = upper;
            return d;
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("epsilon"));

    // protocols ---------------------------------------------------------------
    m.def(
        "window_sizes",
        [](const std::string& protocol, size_t count, uint64_t n, uint64_t fb_window,
           uint64_t llb_initial, uint64_t stb_initial, const std::vector<uint64_t>& custom_sizes) {
            WindowSchedule s =
                schedule_for(protocol, n, fb_window, llb_initial, stb_initial, custom_sizes);
            std::vector<uint64_t> out;
            out.reserve(count);
            for (size_t i = 0; i < count; ++i) out.push_back(s.next());
            return out;
        },
        py::arg("protocol"), py::arg("count"), py::arg("n") = 1, py::arg("fb_window") = 0,
        py::arg("llb_initial") = 2, py::arg("stb_initial") = 2,
        py::arg("custom_sizes") = std::vector<uint64_t>{},
        "First `count` window sizes a schedule emits.");

    m.def(
        "run_protocol",
        [](const std::string& protocol, uint64_t n, uint64_t seed, uint64_t stream,
           uint64_t slot_cap, uint64_t fb_window, uint64_t llb_initial, uint64_t stb_initial,
           const std::vector<uint64_t>& custom_sizes) {
            const auto trace = backoff::run_protocol(
                n, schedule_for(protocol, n, fb_window, llb_initial, stb_initial, custom_sizes),
                {seed, stream}, slot_cap);
            return json_to_py(backoff::to_json(trace));
        },
        py::arg("protocol"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0,
        py::arg("slot_cap") = backoff::kDefaultSlotCap, py::arg("fb_window") = 0,
        py::arg("llb_initial") = 2, py::arg("stb_initial") = 2,
        py::arg("custom_sizes") = std::vector<uint64_t>{});

    // experiments -------------------------------------------------------------
    m.def(
        "makespan_experiment",
        [](const std::string& protocol, uint64_t n, uint64_t trials, uint64_t seed,
           unsigned workers, uint64_t slot_cap, uint64_t fb_window) {
            backoff::ExperimentOptions opts;
            opts.workers = workers;
            opts.slot_cap = slot_cap;
            if (fb_window) opts.fb_window = fb_window;
            const auto stats = backoff::makespan_experiment(
                backoff::protocol_kind_from_string(protocol), n, trials, seed, opts);
            return json_to_py(backoff::to_json(stats));
        },
        py::arg("protocol"), py::arg("n"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1, py::arg("slot_cap") = backoff::kDefaultSlotCap,
        py::arg("fb_window") = 0);

    m.def(
        "concentration_experiment",
        [](uint64_t n, uint64_t b, double epsilon, uint64_t trials, uint64_t seed,
           unsigned workers) {
            return json_to_py(
                backoff::to_json(backoff::concentration_experiment(n, b, epsilon, trials, seed, workers)));
        },
        py::arg("n_balls"), py::arg("n_bins"), py::arg("epsilon"), py::arg("trials"),
        py::arg("seed"), py::arg("workers") = 1);

    m.def(
        "last_window_experiment",
        [](uint64_t m_packets, uint64_t window, uint64_t trials, uint64_t seed, unsigned workers) {
            return json_to_py(backoff::to_json(
                backoff::last_window_experiment(m_packets, window, trials, seed, workers)));
        },
        py::arg("packets"), py::arg("window"), py::arg("trials"), py::arg("seed"),
        py::arg("workers") = 1);

    m.def(
        "recursion_audit",
        [](const std::string& protocol, uint64_t n, uint64_t seed, uint64_t stream,
           uint64_t slot_cap, double midrange_constant) {
            const auto kind = backoff::protocol_kind_from_string(protocol);
            backoff::ExperimentOptions opts;
            const auto trace = backoff::run_protocol(
                n, schedule_for(protocol, n, 0, opts.llb_initial, opts.stb_initial, {}),
                {seed, stream}, slot_cap);
            return json_to_py(
                backoff::to_json(backoff::recursion_audit(trace, n, kind, {midrange_constant})));
        },
        py::arg("protocol"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0,
        py::arg("slot_cap") = backoff::kDefaultSlotCap, py::arg("midrange_constant") = 4.0);

    m.attr("__version__") = "0.1.0";
}

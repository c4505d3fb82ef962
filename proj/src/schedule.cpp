#include "backoff/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "backoff/errors.hpp"
#include "backoff/intmath.hpp"

namespace backoff {

const char* to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::fb: return "fb";
        case ProtocolKind::beb: return "beb";
        case ProtocolKind::llb: return "llb";
        case ProtocolKind::stb: return "stb";
        case ProtocolKind::custom: return "custom";
    }
    return "?";
}

ProtocolKind protocol_kind_from_string(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "fb") return ProtocolKind::fb;
    if (t == "beb") return ProtocolKind::beb;
    if (t == "llb") return ProtocolKind::llb;
    if (t == "stb") return ProtocolKind::stb;
    if (t == "custom") return ProtocolKind::custom;
    throw DomainError("unknown protocol '" + s + "' (expected fb, beb, llb, stb or custom)");
}

namespace {
// Plateau length for a log-log schedule: ceil(lg lg w) windows of size w, and
// never fewer than one (w = 2 would otherwise get zero windows).
uint64_t plateau_length(uint64_t w) {
    return std::max<uint64_t>(1, ceil_lg_lg(w));
}
}  // namespace

WindowSchedule WindowSchedule::fixed(uint64_t window_size) {
    if (window_size < 1) throw DomainError("window size must be >= 1");
    WindowSchedule s;
    s.kind_ = ProtocolKind::fb;
    s.fixed_size_ = window_size;
    return s;
}

WindowSchedule WindowSchedule::binary_exponential() {
    WindowSchedule s;
    s.kind_ = ProtocolKind::beb;
    s.current_ = 1;
    return s;
}

WindowSchedule WindowSchedule::log_log(uint64_t initial_size) {
    if (initial_size < 2) throw DomainError("log-log initial window size must be >= 2");
    WindowSchedule s;
    s.kind_ = ProtocolKind::llb;
    s.current_ = initial_size;
    s.plateau_left_ = plateau_length(initial_size);
    return s;
}

WindowSchedule WindowSchedule::sawtooth(uint64_t initial_outer) {
    if (initial_outer < 1) throw DomainError("sawtooth initial outer window must be >= 1");
    WindowSchedule s;
    s.kind_ = ProtocolKind::stb;
    s.outer_ = initial_outer;
    s.current_ = initial_outer;
    return s;
}

WindowSchedule WindowSchedule::custom(std::vector<uint64_t> sizes) {
    if (sizes.empty()) throw DomainError("custom schedule needs at least one window size");
    if (std::any_of(sizes.begin(), sizes.end(), [](uint64_t w) { return w < 1; }))
        throw DomainError("custom schedule window sizes must be >= 1");
    WindowSchedule s;
    s.kind_ = ProtocolKind::custom;
    s.sizes_ = std::move(sizes);
    return s;
}

WindowSchedule WindowSchedule::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open schedule file '" + path + "'");
    std::vector<uint64_t> sizes;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            size_t used = 0;
            const unsigned long long v = std::stoull(line.substr(first), &used);
            const auto rest = line.find_first_not_of(" \t\r", first + used);
            if (rest != std::string::npos) throw std::invalid_argument("trailing text");
            sizes.push_back(v);
        } catch (const std::exception&) {
            throw DomainError("schedule file '" + path + "' line " + std::to_string(lineno) +
                              ": expected one integer window size");
        }
    }
    return custom(std::move(sizes));
}

uint64_t WindowSchedule::next() {
    ++emitted_;
    switch (kind_) {
        case ProtocolKind::fb:
            return fixed_size_;
        case ProtocolKind::beb: {
            const uint64_t w = current_;
            current_ *= 2;
            return w;
        }
        case ProtocolKind::llb: {
            if (plateau_left_ == 0) {
                current_ *= 2;
                plateau_left_ = plateau_length(current_);
            }
            --plateau_left_;
            return current_;
        }
        case ProtocolKind::stb: {
            const uint64_t w = current_;
            if (current_ == 1) {
                outer_ *= 2;
                current_ = outer_;
            } else {
                current_ /= 2;
            }
            return w;
        }
        case ProtocolKind::custom: {
            const uint64_t i = emitted_ - 1;
            return i < sizes_.size() ? sizes_[i] : sizes_.back();
        }
    }
    throw DomainError("invalid schedule kind");
}

}  // namespace backoff

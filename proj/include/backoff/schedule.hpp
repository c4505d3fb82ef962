#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace backoff {

enum class ProtocolKind { fb, beb, llb, stb, custom };

const char* to_string(ProtocolKind k);

/// Parses "fb", "beb", "llb", "stb" or "custom" (case-insensitive).
ProtocolKind protocol_kind_from_string(const std::string& s);

/// Generator of window sizes for one protocol execution. A schedule is a
/// single-trial cursor: copy a pristine instance per trial rather than
/// sharing one across trials.
///
/// Emission rules:
///   fb      constant window_size
///   beb     1, 2, 4, 8, ...
///   llb     starts at initial_size; emits max(1, ceil(lg lg w)) windows of
///           size w (a plateau), then doubles
///   stb     for each outer size w (doubling from initial_outer): the run
///           w, w/2, w/4, ..., 1
///   custom  an explicit list; once exhausted, the last size repeats forever
///           so every schedule stays unbounded
class WindowSchedule {
public:
    static WindowSchedule fixed(uint64_t window_size);
    static WindowSchedule binary_exponential();
    static WindowSchedule log_log(uint64_t initial_size = 2);
    static WindowSchedule sawtooth(uint64_t initial_outer = 2);
    static WindowSchedule custom(std::vector<uint64_t> sizes);

    /// Loads a custom schedule from a plain-text file, one integer window
    /// size per line (blank lines and lines starting with '#' are skipped).
    static WindowSchedule from_file(const std::string& path);

    /// Emits the next window size and advances the cursor.
    uint64_t next();

    ProtocolKind kind() const { return kind_; }
    uint64_t windows_emitted() const { return emitted_; }

private:
    WindowSchedule() = default;

    ProtocolKind kind_ = ProtocolKind::fb;
    uint64_t fixed_size_ = 1;
    std::vector<uint64_t> sizes_;  // custom only

    // cursor state
    uint64_t emitted_ = 0;
    uint64_t current_ = 1;       // beb / llb / stb inner
    uint64_t plateau_left_ = 0;  // llb
    uint64_t outer_ = 1;         // stb
};

}  // namespace backoff

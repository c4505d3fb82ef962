#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "backoff/rng.hpp"
#include "backoff/schedule.hpp"

namespace backoff {

struct WindowResult {
    uint64_t successes = 0;
    /// 1-based slot index of the last success within the window; 0 if none.
    uint64_t last_success_slot = 0;
};

/// How run_window counts singletons among the drawn slots. Both strategies
/// produce identical results; `automatic` picks by window size.
enum class CountStrategy { automatic, counts_array, sort_scan };

/// Scratch buffers reused across windows of one trial.
struct WindowScratch {
    std::vector<uint64_t> slots;
    std::vector<uint32_t> counts;
};

/// One contention window: each of `packets` pending packets picks a slot
/// uniformly at random; a packet succeeds iff its slot holds exactly one
/// packet. Returns the number of successes (the singleton count of the
/// induced placement).
WindowResult run_window(uint64_t packets, uint64_t window_size, Rng& rng, WindowScratch& scratch,
                        CountStrategy strategy = CountStrategy::automatic);

/// Convenience overload with a fresh stream and scratch.
WindowResult run_window(uint64_t packets, uint64_t window_size, RngStream stream);

struct WindowRecord {
    uint64_t window_index = 0;
    uint64_t window_size = 0;
    uint64_t packets_at_start = 0;
    uint64_t successes = 0;
    uint64_t slots_elapsed_total = 0;  // through the end of this window
};

struct ProtocolTrace {
    uint64_t n_packets = 0;
    std::vector<WindowRecord> records;
    /// Slots up to and including the slot of the final success; empty if the
    /// slot cap was reached first.
    std::optional<uint64_t> makespan_slots;
    bool truncated = false;
};

inline constexpr uint64_t kDefaultSlotCap = 1'000'000'000;

/// Runs the windowed backoff execution until every packet has succeeded or
/// the next window would push the total past slot_cap (reported in-band via
/// `truncated`, not as an error).
ProtocolTrace run_protocol(uint64_t n_packets, WindowSchedule schedule, RngStream stream,
                           uint64_t slot_cap = kDefaultSlotCap);

}  // namespace backoff

#include "backoff/protocol.hpp"

#include <algorithm>

#include "backoff/errors.hpp"

namespace backoff {

namespace {

// Counting by occupancy array; used when the window is not much larger than
// the packet count, so the O(w) reset stays proportional to the work.
WindowResult count_by_array(const std::vector<uint64_t>& slots, uint64_t window_size,
                            std::vector<uint32_t>& counts) {
    counts.assign(window_size, 0);
    for (uint64_t s : slots) ++counts[s];
    WindowResult r;
    for (uint64_t s : slots) {
        if (counts[s] == 1) {
            ++r.successes;
            r.last_success_slot = std::max(r.last_success_slot, s + 1);
        }
    }
    return r;
}

// Counting by sorting the drawn slots; O(m log m) regardless of window size.
WindowResult count_by_sort(std::vector<uint64_t>& slots) {
    std::sort(slots.begin(), slots.end());
    WindowResult r;
    const size_t m = slots.size();
    for (size_t i = 0; i < m;) {
        size_t j = i + 1;
        while (j < m && slots[j] == slots[i]) ++j;
        if (j - i == 1) {
            ++r.successes;
            r.last_success_slot = slots[i] + 1;  // sorted, so the last single wins
        }
        i = j;
    }
    return r;
}

}  // namespace

WindowResult run_window(uint64_t packets, uint64_t window_size, Rng& rng, WindowScratch& scratch,
                        CountStrategy strategy) {
    if (window_size < 1) throw DomainError("window size must be >= 1");
    if (packets == 0) return {};

    scratch.slots.resize(packets);
    for (uint64_t i = 0; i < packets; ++i) scratch.slots[i] = rng.below(window_size);

    if (strategy == CountStrategy::automatic)
        strategy = window_size <= 4 * packets ? CountStrategy::counts_array
                                              : CountStrategy::sort_scan;
    return strategy == CountStrategy::counts_array
               ? count_by_array(scratch.slots, window_size, scratch.counts)
               : count_by_sort(scratch.slots);
}

WindowResult run_window(uint64_t packets, uint64_t window_size, RngStream stream) {
    Rng rng(stream);
    WindowScratch scratch;
    return run_window(packets, window_size, rng, scratch);
}

ProtocolTrace run_protocol(uint64_t n_packets, WindowSchedule schedule, RngStream stream,
                           uint64_t slot_cap) {
    if (n_packets < 1) throw DomainError("n_packets must be >= 1");
    if (slot_cap < 1) throw DomainError("slot_cap must be >= 1");

    ProtocolTrace trace;
    trace.n_packets = n_packets;

    Rng rng(stream);
    WindowScratch scratch;
    uint64_t remaining = n_packets;
    uint64_t slots_elapsed = 0;
    uint64_t index = 0;
    while (remaining > 0) {
        const uint64_t w = schedule.next();
        if (w > slot_cap - slots_elapsed) {
            trace.truncated = true;
            break;
        }
        const WindowResult res = run_window(remaining, w, rng, scratch);
        trace.records.push_back({index, w, remaining, res.successes, slots_elapsed + w});
        remaining -= res.successes;
        if (remaining == 0) trace.makespan_slots = slots_elapsed + res.last_success_slot;
        slots_elapsed += w;
        ++index;
    }
    return trace;
}

}  // namespace backoff

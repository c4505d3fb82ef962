#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "backoff/balls_bins.hpp"
#include "backoff/errors.hpp"
#include "backoff/protocol.hpp"
#include "backoff/schedule.hpp"

using namespace backoff;

namespace {
std::vector<uint64_t> first_sizes(WindowSchedule s, size_t k) {
    std::vector<uint64_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) out.push_back(s.next());
    return out;
}
}  // namespace

TEST_CASE("binary exponential schedule doubles from 1") {
    CHECK(first_sizes(WindowSchedule::binary_exponential(), 5) ==
          std::vector<uint64_t>{1, 2, 4, 8, 16});
}

TEST_CASE("fixed schedule repeats its window") {
    CHECK(first_sizes(WindowSchedule::fixed(12), 4) == std::vector<uint64_t>{12, 12, 12, 12});
    CHECK_THROWS_AS(WindowSchedule::fixed(0), DomainError);
}

TEST_CASE("sawtooth schedule runs down then doubles the outer window") {
    CHECK(first_sizes(WindowSchedule::sawtooth(2), 10) ==
          std::vector<uint64_t>{2, 1, 4, 2, 1, 8, 4, 2, 1, 16});
}

TEST_CASE("log-log schedule plateau lengths") {
    // plateau of max(1, ceil(lg lg w)) windows per size
    CHECK(first_sizes(WindowSchedule::log_log(2), 9) ==
          std::vector<uint64_t>{2, 4, 8, 8, 16, 16, 32, 32, 32});
    CHECK_THROWS_AS(WindowSchedule::log_log(1), DomainError);
}

TEST_CASE("custom schedule repeats its last size once exhausted") {
    CHECK(first_sizes(WindowSchedule::custom({5, 3, 9}), 5) ==
          std::vector<uint64_t>{5, 3, 9, 9, 9});
    CHECK_THROWS_AS(WindowSchedule::custom({}), DomainError);
    CHECK_THROWS_AS(WindowSchedule::custom({4, 0}), DomainError);
}

TEST_CASE("custom schedule loads from a plain-text file") {
    const char* path = "schedule_test_tmp.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n8\n\n  4\n2\n";
    }
    CHECK(first_sizes(WindowSchedule::from_file(path), 4) == std::vector<uint64_t>{8, 4, 2, 2});
    {
        std::ofstream out(path);
        out << "8\nnot-a-number\n";
    }
    CHECK_THROWS_AS(WindowSchedule::from_file(path), DomainError);
    CHECK_THROWS_AS(WindowSchedule::from_file("no_such_file.txt"), DomainError);
    std::remove(path);
}

TEST_CASE("monotone schedules never shrink") {
    for (auto s : {WindowSchedule::binary_exponential(), WindowSchedule::fixed(7),
                   WindowSchedule::log_log(2)}) {
        uint64_t prev = 0;
        for (int i = 0; i < 40; ++i) {
            const uint64_t w = s.next();
            CHECK(w >= prev);
            prev = w;
        }
    }
}

TEST_CASE("sawtooth structure: halving runs, doubling outers") {
    WindowSchedule s = WindowSchedule::sawtooth(2);
    uint64_t prev_outer = 0;
    for (int run = 0; run < 8; ++run) {
        uint64_t w = s.next();
        CHECK(w == (prev_outer == 0 ? 2 : prev_outer * 2));
        prev_outer = w;
        while (w > 1) {
            const uint64_t next = s.next();
            CHECK(next == w / 2);
            w = next;
        }
    }
}

TEST_CASE("run_window basics") {
    CHECK(run_window(0, 9, {1, 0}).successes == 0);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const WindowResult r = run_window(1, 7, {seed, 0});
        CHECK(r.successes == 1);  // a lone packet always succeeds
        CHECK(r.last_success_slot >= 1);
        CHECK(r.last_success_slot <= 7);
    }
    CHECK_THROWS_AS(run_window(2, 0, {1, 0}), DomainError);
}

TEST_CASE("two packets in two slots succeed together or not at all") {
    uint64_t total = 0;
    const uint64_t trials = 100000;
    for (uint64_t t = 0; t < trials; ++t) {
        const uint64_t s = run_window(2, 2, {7, t}).successes;
        CHECK((s == 0 || s == 2));
        total += s;
    }
    CHECK(std::abs(static_cast<double>(total) / trials - 1.0) < 0.02);
}

TEST_CASE("both counting strategies agree") {
    for (uint64_t m : {1, 2, 5, 40, 257}) {
        for (uint64_t w : {1, 2, 3, 17, 64, 1000}) {
            for (uint64_t seed = 0; seed < 5; ++seed) {
                Rng r1(seed, m * w);
                Rng r2(seed, m * w);
                WindowScratch s1, s2;
                const WindowResult a = run_window(m, w, r1, s1, CountStrategy::counts_array);
                const WindowResult b = run_window(m, w, r2, s2, CountStrategy::sort_scan);
                CHECK(a.successes == b.successes);
                CHECK(a.last_success_slot == b.last_success_slot);
            }
        }
    }
}

TEST_CASE("a window is the same placement as balls into bins") {
    for (uint64_t m : {1, 3, 10, 100}) {
        for (uint64_t w : {1, 4, 16, 300}) {
            for (uint64_t seed = 0; seed < 8; ++seed) {
                const RngStream stream{seed, 31};
                const uint64_t wins = run_window(m, w, stream).successes;
                CHECK(wins == singleton_indicators(place_balls(m, w, stream)).count);
            }
        }
    }
}

TEST_CASE("single packet finishes in the first window") {
    const ProtocolTrace t = run_protocol(1, WindowSchedule::binary_exponential(), {7, 0});
    REQUIRE(t.makespan_slots.has_value());
    CHECK(*t.makespan_slots == 1);
    CHECK(t.records.size() == 1);
    CHECK_FALSE(t.truncated);
}

TEST_CASE("traces conserve packets and finish") {
    for (uint64_t seed = 0; seed < 30; ++seed) {
        const ProtocolTrace t = run_protocol(2, WindowSchedule::fixed(4), {seed, 0});
        REQUIRE(t.makespan_slots.has_value());
        uint64_t done = 0;
        uint64_t expect = 2;
        for (const WindowRecord& r : t.records) {
            CHECK(r.packets_at_start == expect);
            CHECK(r.successes <= r.packets_at_start);
            CHECK(r.successes <= r.window_size);
            expect -= r.successes;
            done += r.successes;
        }
        CHECK(done == 2);
        CHECK(*t.makespan_slots <= t.records.back().slots_elapsed_total);
    }
}

TEST_CASE("makespan stops at the final success, not the window end") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const RngStream stream{seed, 5};
        const WindowResult r = run_window(1, 64, stream);
        const ProtocolTrace t = run_protocol(1, WindowSchedule::fixed(64), stream);
        REQUIRE(t.makespan_slots.has_value());
        CHECK(*t.makespan_slots == r.last_success_slot);
    }
}

TEST_CASE("identical inputs give identical traces") {
    const ProtocolTrace a = run_protocol(50, WindowSchedule::sawtooth(2), {11, 3});
    const ProtocolTrace b = run_protocol(50, WindowSchedule::sawtooth(2), {11, 3});
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].window_size == b.records[i].window_size);
        CHECK(a.records[i].successes == b.records[i].successes);
    }
    CHECK(a.makespan_slots == b.makespan_slots);
}

TEST_CASE("slot cap truncates in-band") {
    const ProtocolTrace t = run_protocol(64, WindowSchedule::fixed(3), {1, 0}, 10);
    CHECK(t.truncated);
    CHECK_FALSE(t.makespan_slots.has_value());
    CHECK(t.records.size() == 3);  // 3 windows of 3 slots fit under the cap of 10
}

TEST_CASE("moderate sawtooth run finishes well under the cap") {
    const ProtocolTrace t = run_protocol(256, WindowSchedule::sawtooth(2), {5, 0});
    REQUIRE(t.makespan_slots.has_value());
    uint64_t done = 0;
    for (const WindowRecord& r : t.records) done += r.successes;
    CHECK(done == 256);
}

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace dfa {

// Bad parameters or mismatched configuration (CLI exit code 1).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unreadable or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Calendar days (UTC)
// ---------------------------------------------------------------------------

using Day = std::chrono::sys_days;

inline constexpr std::int64_t kSecondsPerDay = 86400;

inline Day day_of(std::int64_t unix_seconds) {
    auto d = unix_seconds / kSecondsPerDay;
    if (unix_seconds % kSecondsPerDay < 0) --d;
    return Day{std::chrono::days{d}};
}

inline std::int64_t day_start_seconds(Day d) {
    return static_cast<std::int64_t>(d.time_since_epoch().count()) * kSecondsPerDay;
}

inline std::string format_day(Day d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline Day parse_day(std::string_view s) {
    int y = 0;
    unsigned m = 0, d = 0;
    auto bad = [&] { return DataError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
    auto num = [&](std::string_view part, auto& out) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc{} || p != part.data() + part.size()) throw bad();
    };
    num(s.substr(0, 4), y);
    num(s.substr(5, 2), m);
    num(s.substr(8, 2), d);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw bad();
    return Day{ymd};
}

// ---------------------------------------------------------------------------
// Deterministic random numbers
// ---------------------------------------------------------------------------

// std::mt19937_64 is bit-specified by the standard; the mapping helpers below
// avoid the implementation-defined std::*_distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, bound) by rejection sampling.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Metric values with an explicit "undefined" state
// ---------------------------------------------------------------------------

struct Metric {
    double value = 0.0;
    bool defined = false;

    static Metric of(double v) { return {v, true}; }
    static Metric undefined() { return {}; }
};

// Fixed-point formatting used for every byte-stable text output.
inline std::string fixed(double v, int decimals = 4) {
    if (v == 0.0) v = 0.0;  // no "-0.0000"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
    return s;
}

// ---------------------------------------------------------------------------
// Parallelism
// ---------------------------------------------------------------------------

// Worker count: hardware concurrency capped by DFA_THREADS when set.
inline unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DFA_THREADS")) {
        unsigned cap = 0;
        std::string_view sv(env);
        auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
        if (ec == std::errc{} && cap > 0) n = std::min(n, cap);
    }
    return n;
}

// Runs fn(i) for i in [0, count). Each index is handled by exactly one worker,
// so writing to slot i of a pre-sized vector is race-free.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dfa

// Benchmark harness: times each (engine, n) pair, gates the results on
// cross-engine agreement, derives speedups relative to the hybrid engine, and
// serializes both tables as CSV.
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <ratio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hsieve/sieve.hpp"

namespace hsieve {

struct BenchRecord {
    Engine engine = Engine::hybrid;
    std::uint64_t n = 0;
    std::uint64_t repeats = 0;
    double seconds_median = 0.0;
    double seconds_min = 0.0;
    std::uint64_t prime_count = 0;
    std::uint64_t checksum = 0;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct SpeedupRecord {
    std::uint64_t n = 0;
    Engine baseline = Engine::classical;
    double ratio = 0.0;

    friend bool operator==(const SpeedupRecord&, const SpeedupRecord&) = default;
};

// Raised when engines disagree on prime_count or checksum for the same n.
class CorrectnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tally {
    std::uint64_t count = 0;
    std::uint64_t checksum = 0;
};

struct BenchOptions {
    std::uint64_t repeats = 5;
    // Test hook: may alter an engine's tally before the correctness gate.
    std::function<void(Engine, std::uint64_t n, Tally&)> tamper;
};

using BenchClock = std::chrono::steady_clock;
static_assert(BenchClock::is_steady);
static_assert(std::ratio_less_equal_v<BenchClock::period, std::micro>,
              "benchmark clock must resolve at least 1 microsecond");

namespace detail {

inline double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2.0;
}

inline Tally timed_run(Engine engine, const SieveConfig& config, double& seconds) {
    ChecksumSink sink;
    const auto t0 = BenchClock::now();
    run_engine(engine, config, sink);
    const auto t1 = BenchClock::now();
    seconds = std::chrono::duration<double>(t1 - t0).count();
    return {sink.count, sink.checksum};
}

}  // namespace detail

// Engine order, then n ascending.
inline void sort_records(std::vector<BenchRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
        if (a.engine != b.engine) return a.engine < b.engine;
        return a.n < b.n;
    });
}

// Throws CorrectnessError naming the first pair of engines that disagree.
inline void check_agreement(const std::vector<BenchRecord>& records) {
    for (std::size_t i = 0; i < records.size(); ++i)
        for (std::size_t j = i + 1; j < records.size(); ++j) {
            const auto& a = records[i];
            const auto& b = records[j];
            if (a.n != b.n) continue;
            if (a.prime_count != b.prime_count || a.checksum != b.checksum) {
                std::ostringstream msg;
                msg << "engines disagree at n=" << a.n << ": " << engine_name(a.engine)
                    << " (count " << a.prime_count << ", checksum " << a.checksum << ") vs "
                    << engine_name(b.engine) << " (count " << b.prime_count << ", checksum "
                    << b.checksum << ")";
                throw CorrectnessError(msg.str());
            }
        }
}

// Runs every engine at every n, sequentially: one untimed warm-up, then
// options.repeats timed runs. Records come back sorted by engine then n.
inline std::vector<BenchRecord> run_bench(const std::vector<Engine>& engines,
                                          const std::vector<std::uint64_t>& ns,
                                          const SieveConfig& config, const BenchOptions& options = {}) {
    if (options.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    for (std::uint64_t n : ns)
        if (n < 2) throw std::invalid_argument("benchmark limits must be >= 2, got " + std::to_string(n));

    std::vector<BenchRecord> records;
    for (std::uint64_t n : ns) {
        SieveConfig cfg = config;
        cfg.n = n;
        for (Engine engine : engines) {
            double seconds = 0.0;
            Tally tally = detail::timed_run(engine, cfg, seconds);  // warm-up
            std::vector<double> samples;
            samples.reserve(options.repeats);
            for (std::uint64_t r = 0; r < options.repeats; ++r) {
                const Tally t = detail::timed_run(engine, cfg, seconds);
                if (t.count != tally.count || t.checksum != tally.checksum)
                    throw CorrectnessError(std::string(engine_name(engine)) +
                                           " is not deterministic at n=" + std::to_string(n));
                samples.push_back(seconds);
            }
            if (options.tamper) options.tamper(engine, n, tally);

            BenchRecord rec;
            rec.engine = engine;
            rec.n = n;
            rec.repeats = options.repeats;
            rec.seconds_min = *std::min_element(samples.begin(), samples.end());
            rec.seconds_median = detail::median_of(std::move(samples));
            rec.prime_count = tally.count;
            rec.checksum = tally.checksum;
            records.push_back(rec);
        }
    }
    check_agreement(records);
    sort_records(records);
    return records;
}

inline std::vector<BenchRecord> run_bench(const std::vector<Engine>& engines,
                                          const std::vector<std::uint64_t>& ns, std::uint64_t repeats,
                                          const SieveConfig& config) {
    BenchOptions options;
    options.repeats = repeats;
    return run_bench(engines, ns, config, options);
}

// Baseline median runtime over hybrid median runtime at n.
inline SpeedupRecord speedup(const std::vector<BenchRecord>& records, std::uint64_t n, Engine baseline) {
    auto find = [&](Engine e) -> const BenchRecord* {
        for (const auto& r : records)
            if (r.engine == e && r.n == n) return &r;
        return nullptr;
    };
    const BenchRecord* base = find(baseline);
    const BenchRecord* hybrid = find(Engine::hybrid);
    if (!base || !hybrid)
        throw std::invalid_argument("speedup: need " + std::string(engine_name(baseline)) +
                                    " and hybrid records at n=" + std::to_string(n));
    if (!(hybrid->seconds_median > 0.0))
        throw std::invalid_argument("speedup: hybrid median runtime must be positive");
    return {n, baseline, base->seconds_median / hybrid->seconds_median};
}

// Every non-hybrid engine against hybrid, for each n where both were run.
// Ordered by baseline engine, then n.
inline std::vector<SpeedupRecord> all_speedups(const std::vector<BenchRecord>& records) {
    std::vector<std::uint64_t> ns;
    for (const auto& r : records)
        if (r.engine == Engine::hybrid) ns.push_back(r.n);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    std::vector<SpeedupRecord> out;
    for (Engine e : {Engine::classical, Engine::segmented})
        for (std::uint64_t n : ns) {
            const bool present = std::any_of(records.begin(), records.end(),
                                             [&](const BenchRecord& r) { return r.engine == e && r.n == n; });
            if (present) out.push_back(speedup(records, n, e));
        }
    return out;
}

// --- CSV -------------------------------------------------------------------

inline constexpr std::string_view kRuntimeCsvHeader =
    "engine,n,repeats,seconds_median,seconds_min,prime_count,checksum";
inline constexpr std::string_view kSpeedupCsvHeader = "n,baseline,ratio";

// Shortest representation that parses back to the same double; never
// locale-dependent.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

inline void write_runtime_csv(std::ostream& out, std::vector<BenchRecord> records) {
    sort_records(records);
    out << kRuntimeCsvHeader << '\n';
    for (const auto& r : records)
        out << engine_name(r.engine) << ',' << r.n << ',' << r.repeats << ','
            << format_double(r.seconds_median) << ',' << format_double(r.seconds_min) << ','
            << r.prime_count << ',' << r.checksum << '\n';
}

inline void write_speedup_csv(std::ostream& out, const std::vector<SpeedupRecord>& speedups) {
    out << kSpeedupCsvHeader << '\n';
    for (const auto& s : speedups)
        out << s.n << ',' << engine_name(s.baseline) << ',' << format_double(s.ratio) << '\n';
}

namespace detail {

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <class T>
T parse_field(std::string_view text, std::size_t line_no, const char* column) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad " + column + " '" +
                                 std::string(text) + "'");
    return value;
}

template <class RowFn>
void read_csv(std::istream& in, std::string_view header, std::size_t columns, RowFn&& row) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != header)
        throw std::runtime_error("line 1: expected header '" + std::string(header) + "'");
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != columns)
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(columns) + " fields, got " +
                                     std::to_string(fields.size()));
        row(fields, line_no);
    }
}

inline Engine parse_engine_field(std::string_view text, std::size_t line_no) {
    try {
        return parse_engine(text);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
}

}  // namespace detail

inline std::vector<BenchRecord> read_runtime_csv(std::istream& in) {
    std::vector<BenchRecord> out;
    detail::read_csv(in, kRuntimeCsvHeader, 7, [&](const auto& f, std::size_t ln) {
        BenchRecord r;
        r.engine = detail::parse_engine_field(f[0], ln);
        r.n = detail::parse_field<std::uint64_t>(f[1], ln, "n");
        r.repeats = detail::parse_field<std::uint64_t>(f[2], ln, "repeats");
        r.seconds_median = detail::parse_field<double>(f[3], ln, "seconds_median");
        r.seconds_min = detail::parse_field<double>(f[4], ln, "seconds_min");
        r.prime_count = detail::parse_field<std::uint64_t>(f[5], ln, "prime_count");
        r.checksum = detail::parse_field<std::uint64_t>(f[6], ln, "checksum");
        out.push_back(r);
    });
    return out;
}

inline std::vector<SpeedupRecord> read_speedup_csv(std::istream& in) {
    std::vector<SpeedupRecord> out;
    detail::read_csv(in, kSpeedupCsvHeader, 3, [&](const auto& f, std::size_t ln) {
        SpeedupRecord s;
        s.n = detail::parse_field<std::uint64_t>(f[0], ln, "n");
        s.baseline = detail::parse_engine_field(f[1], ln);
        s.ratio = detail::parse_field<double>(f[2], ln, "ratio");
        out.push_back(s);
    });
    return out;
}

inline void write_runtime_csv(const std::string& path, const std::vector<BenchRecord>& records) {
    detail::write_file(path, [&](std::ostream& out) { write_runtime_csv(out, records); });
}

inline void write_speedup_csv(const std::string& path, const std::vector<SpeedupRecord>& speedups) {
    detail::write_file(path, [&](std::ostream& out) { write_speedup_csv(out, speedups); });
}

// Writes either table when its path is set.
inline void write_csv(const std::vector<BenchRecord>& records, const std::vector<SpeedupRecord>& speedups,
                      const std::optional<std::string>& runtime_path,
                      const std::optional<std::string>& speedup_path) {
    if (runtime_path) write_runtime_csv(*runtime_path, records);
    if (speedup_path) write_speedup_csv(*speedup_path, speedups);
}

// --- Human-readable table ----------------------------------------------------

// One row per n, one column per engine (median seconds), then the speedup of
// each baseline over hybrid.
inline std::string render_table(const std::vector<BenchRecord>& records) {
    std::vector<Engine> engines;
    std::vector<std::uint64_t> ns;
    for (const auto& r : records) {
        if (std::find(engines.begin(), engines.end(), r.engine) == engines.end()) engines.push_back(r.engine);
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
    }
    std::sort(engines.begin(), engines.end());
    std::sort(ns.begin(), ns.end());
    const auto speedups = all_speedups(records);

    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.insert(0, w - s.size(), ' ');
        return s;
    };
    auto seconds = [](double s) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f s", s);
        return std::string(buf);
    };

    std::ostringstream out;
    out << pad("N", 14);
    for (Engine e : engines) out << pad(std::string(engine_name(e)), 14);
    for (const auto& e : {Engine::classical, Engine::segmented})
        if (std::any_of(speedups.begin(), speedups.end(), [&](const SpeedupRecord& s) { return s.baseline == e; }))
            out << pad(std::string(engine_name(e)) + "/hybrid", 20);
    out << '\n';

    for (std::uint64_t n : ns) {
        out << pad(std::to_string(n), 14);
        for (Engine e : engines) {
            auto it = std::find_if(records.begin(), records.end(),
                                   [&](const BenchRecord& r) { return r.engine == e && r.n == n; });
            out << pad(it == records.end() ? "-" : seconds(it->seconds_median), 14);
        }
        for (const auto& e : {Engine::classical, Engine::segmented}) {
            if (std::none_of(speedups.begin(), speedups.end(),
                             [&](const SpeedupRecord& s) { return s.baseline == e; }))
                continue;
            auto it = std::find_if(speedups.begin(), speedups.end(),
                                   [&](const SpeedupRecord& s) { return s.baseline == e && s.n == n; });
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4fx", it == speedups.end() ? 0.0 : it->ratio);
            out << pad(it == speedups.end() ? "-" : buf, 20);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace hsieve

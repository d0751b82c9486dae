// Command-line front end shared by tools/hsieve and the tests.
//
//   primes  count, print or checksum the primes up to a limit
//   bench   time engines over a list of limits, write CSVs, print a table
//   model   print memory-model predictions per engine
//
// Exit codes: 0 success, 1 runtime or correctness failure, 2 usage error.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "hsieve/bench.hpp"
#include "hsieve/memmodel.hpp"
#include "hsieve/sieve.hpp"

namespace hsieve::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Accepts plain integers ("10000000") and scientific shorthand ("1e7",
// "2.5e6") as long as the value is a whole number within the sieve range.
inline std::uint64_t parse_limit(std::string_view text) {
    const char* first = text.data();
    const char* last = first + text.size();
    std::uint64_t whole = 0;
    auto [p, ec] = std::from_chars(first, last, whole);
    if (ec == std::errc{} && p == last && !text.empty()) {
        if (whole > SieveConfig::kMaxLimit) throw UsageError("limit '" + std::string(text) + "' exceeds 2^62");
        return whole;
    }
    double value = 0.0;
    auto [q, ec2] = std::from_chars(first, last, value, std::chars_format::general);
    if (ec2 != std::errc{} || q != last || text.empty() || !std::isfinite(value) || value < 0 ||
        value != std::floor(value) || value > static_cast<double>(SieveConfig::kMaxLimit))
        throw UsageError("invalid limit '" + std::string(text) + "'");
    return static_cast<std::uint64_t>(value);
}

namespace detail {

struct SizeFlags {
    std::uint64_t l1_bytes = 32768;
    std::uint64_t line_bytes = kCacheLineBytes;
    std::uint64_t block_bits = 0;
    std::uint64_t segment_bytes = 0;

    void add_to(CLI::App& cmd, bool with_engine_sizes) {
        cmd.add_option("--l1-bytes", l1_bytes, "L1 data cache size in bytes (power of two)")
            ->capture_default_str();
        cmd.add_option("--line-bytes", line_bytes, "Cache line size in bytes (power of two)")
            ->capture_default_str();
        if (with_engine_sizes) {
            cmd.add_option("--block-bits", block_bits, "Odd numbers per hybrid block (default l1-bytes*8)");
            cmd.add_option("--segment-bytes", segment_bytes, "Segmented sieve window (default l1-bytes)");
        }
    }

    SieveConfig config(std::uint64_t n) const {
        SieveConfig cfg;
        cfg.n = n;
        cfg.l1_bytes = l1_bytes;
        cfg.cache_line_bytes = line_bytes;
        cfg.block_bits = block_bits;
        cfg.segment_bytes = segment_bytes;
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }
};

inline Engine engine_arg(std::string_view name) {
    try {
        return parse_engine(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prime sieve engines, benchmarks and memory model", "hsieve"};
    app.require_subcommand(1);

    // primes
    auto* primes = app.add_subcommand("primes", "Count, print or checksum primes up to a limit");
    std::string primes_limit;
    std::string primes_engine = "hybrid";
    std::string primes_mode = "count";
    detail::SizeFlags primes_sizes;
    primes->add_option("--limit", primes_limit, "Upper bound N (inclusive); accepts 1e7")->required();
    primes->add_option("--engine", primes_engine, "classical, segmented or hybrid")->capture_default_str();
    primes->add_option("--mode", primes_mode, "count, print or checksum")
        ->check(CLI::IsMember({"count", "print", "checksum"}))
        ->capture_default_str();
    primes_sizes.add_to(*primes, true);

    // bench
    auto* bench = app.add_subcommand("bench", "Time engines and write runtime/speedup CSVs");
    std::vector<std::string> bench_limits;
    std::vector<std::string> bench_engines = {"classical", "segmented", "hybrid"};
    std::uint64_t bench_repeats = 5;
    std::string bench_csv;
    std::string bench_speedup_csv;
    std::string bench_fault_engine;
    detail::SizeFlags bench_sizes;
    bench->add_option("--limits", bench_limits, "Comma-separated limits, e.g. 1e7,1e8")
        ->required()
        ->delimiter(',');
    bench->add_option("--engines", bench_engines, "Comma-separated engines")->delimiter(',');
    bench->add_option("--repeats", bench_repeats, "Timed repetitions per (engine, N)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--csv", bench_csv, "Runtime CSV output path");
    bench->add_option("--speedup-csv", bench_speedup_csv, "Speedup CSV output path");
    // Corrupts the named engine's checksum to exercise the correctness gate.
    bench->add_option("--fault-engine", bench_fault_engine)->group("");
    bench_sizes.add_to(*bench, true);

    // model
    auto* model_cmd = app.add_subcommand("model", "Print memory-access model predictions");
    std::string model_limit;
    std::string model_csv;
    detail::SizeFlags model_sizes;
    model_cmd->add_option("--limit", model_limit, "Upper bound N (>= 2); accepts 1e9")->required();
    model_cmd->add_option("--csv", model_csv, "Also write the predictions as CSV");
    model_sizes.add_to(*model_cmd, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (primes->parsed()) {
            const SieveConfig cfg = primes_sizes.config(parse_limit(primes_limit));
            const Engine engine = detail::engine_arg(primes_engine);
            if (primes_mode == "count") {
                CountSink sink;
                run_engine(engine, cfg, sink);
                out << sink.count << '\n';
            } else if (primes_mode == "checksum") {
                ChecksumSink sink;
                run_engine(engine, cfg, sink);
                out << sink.count << ' ' << sink.checksum << '\n';
            } else {
                TextSink sink(out);
                run_engine(engine, cfg, sink);
            }
            return kExitOk;
        }

        if (bench->parsed()) {
            std::vector<std::uint64_t> ns;
            for (const auto& s : bench_limits) {
                const std::uint64_t n = parse_limit(s);
                if (n < 2) throw UsageError("benchmark limits must be >= 2, got " + s);
                ns.push_back(n);
            }
            std::vector<Engine> engines;
            for (const auto& s : bench_engines) engines.push_back(detail::engine_arg(s));
            std::optional<Engine> fault;
            if (!bench_fault_engine.empty()) fault = detail::engine_arg(bench_fault_engine);

            BenchOptions options;
            options.repeats = bench_repeats;
            if (fault)
                options.tamper = [f = *fault](Engine e, std::uint64_t, Tally& t) {
                    if (e == f) t.checksum ^= 1;
                };
            const auto records = run_bench(engines, ns, bench_sizes.config(0), options);
            const auto speedups = all_speedups(records);
            write_csv(records, speedups,
                      bench_csv.empty() ? std::nullopt : std::optional<std::string>(bench_csv),
                      bench_speedup_csv.empty() ? std::nullopt : std::optional<std::string>(bench_speedup_csv));
            out << render_table(records);
            return kExitOk;
        }

        if (model_cmd->parsed()) {
            const std::uint64_t n = parse_limit(model_limit);
            if (n < 2) throw UsageError("model needs --limit >= 2");
            const SieveConfig cfg = model_sizes.config(n);

            std::vector<AccessModel> rows;
            for (Engine e : kAllEngines) rows.push_back(model(e, cfg));

            out << std::left << std::setw(11) << "engine" << std::right << std::setw(18) << "bytes_touched"
                << std::setw(18) << "resident_bytes" << std::setw(10) << "padding" << std::setw(20)
                << "cache_lines_touched" << '\n';
            for (const auto& m : rows)
                out << std::left << std::setw(11) << engine_name(m.engine) << std::right << std::setw(18)
                    << m.bytes_touched << std::setw(18) << m.resident.total() << std::setw(10)
                    << m.resident.padding_bytes << std::setw(20) << m.cache_lines_touched << '\n';
            out << "ratio classical/hybrid bytes_touched: " << std::fixed << std::setprecision(4)
                << touched_ratio(n) << '\n'
                << "packing per stored number: 8x (bit vs byte); per integer of range: 16x (odd-only)\n";
            out.unsetf(std::ios::floatfield);

            if (!model_csv.empty()) {
                hsieve::detail::write_file(model_csv, [&](std::ostream& csv) {
                    csv << "engine,n,bytes_touched,resident_bytes,padding_bytes,cache_lines_touched\n";
                    for (const auto& m : rows)
                        csv << engine_name(m.engine) << ',' << m.n << ',' << m.bytes_touched << ','
                            << m.resident.total() << ',' << m.resident.padding_bytes << ','
                            << m.cache_lines_touched << '\n';
                });
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    } catch (const CorrectnessError& e) {
        err << "correctness gate failed: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace hsieve::cli

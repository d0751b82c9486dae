#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hsieve/bench.hpp"

using namespace hsieve;

namespace {

BenchRecord rec(Engine e, std::uint64_t n, double median, double min = 0.0) {
    BenchRecord r;
    r.engine = e;
    r.n = n;
    r.repeats = 1;
    r.seconds_median = median;
    r.seconds_min = min == 0.0 ? median : min;
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(RunBench, TwoEnginesAgree) {
    SieveConfig cfg;
    const auto records = run_bench({Engine::classical, Engine::hybrid}, {1'000'000}, 3, cfg);
    ASSERT_EQ(records.size(), 2u);
    for (const auto& r : records) {
        EXPECT_EQ(r.prime_count, 78498u);
        EXPECT_EQ(r.checksum, 37550402023u);
        EXPECT_EQ(r.repeats, 3u);
        EXPECT_LE(r.seconds_min, r.seconds_median);
        EXPECT_GT(r.seconds_min, 0.0);
    }
    EXPECT_EQ(records[0].engine, Engine::classical);
    EXPECT_EQ(records[1].engine, Engine::hybrid);
}

TEST(RunBench, SingleRepeatMedianEqualsMin) {
    const auto records = run_bench({Engine::segmented}, {50'000}, 1, SieveConfig{});
    ASSERT_EQ(records.size(), 1u);
    EXPECT_EQ(records[0].seconds_median, records[0].seconds_min);
}

TEST(RunBench, RejectsBadArguments) {
    EXPECT_THROW(run_bench({Engine::hybrid}, {1'000}, 0, SieveConfig{}), std::invalid_argument);
    EXPECT_THROW(run_bench({Engine::hybrid}, {1}, 1, SieveConfig{}), std::invalid_argument);
}

TEST(RunBench, CorruptedEngineTripsGate) {
    BenchOptions opt;
    opt.repeats = 1;
    opt.tamper = [](Engine e, std::uint64_t, Tally& t) {
        if (e == Engine::segmented) t.count += 1;
    };
    try {
        run_bench({Engine::classical, Engine::segmented, Engine::hybrid}, {10'000}, SieveConfig{}, opt);
        FAIL() << "expected CorrectnessError";
    } catch (const CorrectnessError& e) {
        EXPECT_NE(std::string(e.what()).find("segmented"), std::string::npos);
    }
}

TEST(Speedup, PaperFigureTwoPoints) {
    const std::vector<BenchRecord> rs = {
        rec(Engine::classical, 10'000'000, 0.48), rec(Engine::hybrid, 10'000'000, 0.22),
        rec(Engine::classical, 1'000'000'000, 51.7), rec(Engine::hybrid, 1'000'000'000, 21.5)};
    EXPECT_NEAR(speedup(rs, 10'000'000, Engine::classical).ratio, 2.1818, 1e-4);
    EXPECT_NEAR(speedup(rs, 1'000'000'000, Engine::classical).ratio, 2.4046, 1e-4);
    EXPECT_EQ(speedup(rs, 10'000'000, Engine::hybrid).ratio, 1.0);
    EXPECT_THROW(speedup(rs, 10'000'000, Engine::segmented), std::invalid_argument);
    EXPECT_THROW(speedup(rs, 123, Engine::classical), std::invalid_argument);
}

TEST(Speedup, EqualTimesGiveOne) {
    const std::vector<BenchRecord> rs = {rec(Engine::segmented, 100, 0.5), rec(Engine::hybrid, 100, 0.5)};
    EXPECT_EQ(speedup(rs, 100, Engine::segmented).ratio, 1.0);
    const auto all = all_speedups(rs);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0].baseline, Engine::segmented);
}

TEST(Csv, OneRecordOneRow) {
    std::ostringstream out;
    write_runtime_csv(out, {rec(Engine::hybrid, 100, 0.25)});
    EXPECT_EQ(out.str(),
              "engine,n,repeats,seconds_median,seconds_min,prime_count,checksum\n"
              "hybrid,100,1,0.25,0.25,0,0\n");
}

TEST(Csv, StableOrderingEngineThenN) {
    std::vector<BenchRecord> rs;
    for (std::uint64_t n : {1000u, 10u, 100u})
        for (Engine e : {Engine::hybrid, Engine::classical, Engine::segmented}) rs.push_back(rec(e, n, 1.0));
    std::ostringstream out;
    write_runtime_csv(out, rs);
    std::istringstream in(out.str());
    const auto back = read_runtime_csv(in);
    ASSERT_EQ(back.size(), 9u);
    for (std::size_t i = 1; i < back.size(); ++i) {
        const bool ordered = back[i - 1].engine < back[i].engine ||
                             (back[i - 1].engine == back[i].engine && back[i - 1].n < back[i].n);
        EXPECT_TRUE(ordered) << i;
    }
}

TEST(Csv, SpeedupFormat) {
    std::ostringstream out;
    write_speedup_csv(out, {{10'000'000, Engine::classical, 0.48 / 0.22}});
    std::istringstream in(out.str());
    const auto back = read_speedup_csv(in);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].ratio, 0.48 / 0.22);
    EXPECT_EQ(out.str().substr(0, 16), "n,baseline,ratio");
    EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(CsvProperty, RoundTripRandomRecords) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> secs(1e-9, 1e4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BenchRecord> rs;
        for (Engine e : kAllEngines)
            for (int k = 0; k < 5; ++k) {
                BenchRecord r;
                r.engine = e;
                r.n = 2 + rng() % (std::uint64_t{1} << 40) + static_cast<std::uint64_t>(k);
                r.repeats = 1 + rng() % 20;
                r.seconds_min = secs(rng);
                r.seconds_median = r.seconds_min * (1.0 + secs(rng) / 1e4);
                r.prime_count = rng();
                r.checksum = rng();
                rs.push_back(r);
            }
        sort_records(rs);
        std::ostringstream out;
        write_runtime_csv(out, rs);
        std::istringstream in(out.str());
        ASSERT_EQ(read_runtime_csv(in), rs);

        std::ostringstream again;
        write_runtime_csv(again, rs);
        ASSERT_EQ(again.str(), out.str());
    }
}

TEST(Csv, ReaderReportsLineNumbers) {
    std::istringstream bad_header("engine,n\n");
    EXPECT_THROW(read_runtime_csv(bad_header), std::runtime_error);
    std::istringstream bad_row(
        "engine,n,repeats,seconds_median,seconds_min,prime_count,checksum\n"
        "hybrid,100,1,0.25,0.25,0,0\n"
        "hybrid,abc,1,0.25,0.25,0,0\n");
    try {
        read_runtime_csv(bad_row);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Csv, WriteFilesAndReportPath) {
    const auto dir = std::filesystem::temp_directory_path() / "hsieve_test_bench";
    std::filesystem::create_directories(dir);
    const std::vector<BenchRecord> rs = {rec(Engine::classical, 100, 2.0), rec(Engine::hybrid, 100, 1.0)};
    write_csv(rs, all_speedups(rs), (dir / "rt.csv").string(), (dir / "sp.csv").string());
    EXPECT_EQ(slurp(dir / "sp.csv"), "n,baseline,ratio\n100,classical,2\n");
    EXPECT_NE(slurp(dir / "rt.csv").find("classical,100,1,2,2,0,0\n"), std::string::npos);

    try {
        write_runtime_csv((dir / "missing" / "x.csv").string(), rs);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("x.csv"), std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST(Table, OneRowPerLimitOneColumnPerEngine) {
    std::vector<BenchRecord> rs;
    for (std::uint64_t n : {10u, 100u})
        for (Engine e : kAllEngines) rs.push_back(rec(e, n, 1.0));
    const std::string t = render_table(rs);
    std::istringstream lines(t);
    std::string header;
    std::getline(lines, header);
    for (const char* col : {"classical", "segmented", "hybrid", "classical/hybrid", "segmented/hybrid"})
        EXPECT_NE(header.find(col), std::string::npos) << col;
    int rows = 0;
    for (std::string l; std::getline(lines, l);) ++rows;
    EXPECT_EQ(rows, 2);
}

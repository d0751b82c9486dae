#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hsieve/cli.hpp"
#include "oracle.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "hsieve");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = hsieve::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST(ParseLimit, AcceptsScientificShorthand) {
    using hsieve::cli::parse_limit;
    EXPECT_EQ(parse_limit("30"), 30u);
    EXPECT_EQ(parse_limit("1e7"), 10'000'000u);
    EXPECT_EQ(parse_limit("2.5e6"), 2'500'000u);
    EXPECT_EQ(parse_limit("1E9"), 1'000'000'000u);
    EXPECT_THROW(parse_limit("banana"), hsieve::cli::UsageError);
    EXPECT_THROW(parse_limit("1.5"), hsieve::cli::UsageError);
    EXPECT_THROW(parse_limit("-3"), hsieve::cli::UsageError);
    EXPECT_THROW(parse_limit(""), hsieve::cli::UsageError);
    EXPECT_THROW(parse_limit("1e30"), hsieve::cli::UsageError);
}

TEST(CliPrimes, PrintMode) {
    const auto r = invoke({"primes", "--limit", "30", "--mode", "print"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "2\n3\n5\n7\n11\n13\n17\n19\n23\n29\n");
}

TEST(CliPrimes, CountModes) {
    EXPECT_EQ(invoke({"primes", "--limit", "1", "--mode", "count"}).out, "0\n");
    EXPECT_EQ(invoke({"primes", "--limit", "1e6"}).out, "78498\n");
    const auto r = invoke({"primes", "--limit", "1e6", "--mode", "checksum", "--engine", "segmented"});
    EXPECT_EQ(r.out, "78498 37550402023\n");
}

TEST(CliPrimes, TenMillion) {
    EXPECT_EQ(invoke({"primes", "--limit", "10000000", "--mode", "count"}).out, "664579\n");
}

TEST(CliPrimes, PrintedPrimesPassTrialDivision) {
    const auto r = invoke({"primes", "--limit", "100000", "--mode", "print", "--block-bits", "1000"});
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::uint64_t v = 0, prev = 0, failures = 0, lines = 0;
    while (in >> v) {
        failures += !oracle::is_prime(v) || v <= prev;
        prev = v;
        ++lines;
    }
    EXPECT_EQ(failures, 0u);
    EXPECT_EQ(lines, 9592u);
}

TEST(CliPrimes, UsageErrors) {
    EXPECT_EQ(invoke({"primes", "--limit", "abc"}).code, 2);
    EXPECT_EQ(invoke({"primes", "--limit", "100", "--engine", "atkin"}).code, 2);
    EXPECT_EQ(invoke({"primes", "--limit", "100", "--mode", "dump"}).code, 2);
    EXPECT_EQ(invoke({"primes"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"primes", "--limit", "100", "--l1-bytes", "1000"}).code, 2);
}

TEST(CliBench, WritesCsvAndTable) {
    const auto dir = std::filesystem::temp_directory_path() / "hsieve_test_cli";
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "out.csv").string();
    const auto sp = (dir / "sp.csv").string();
    const auto r = invoke({"bench", "--limits", "1e6", "--engines", "classical,hybrid", "--repeats", "2",
                           "--csv", csv, "--speedup-csv", sp});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(csv);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(count_lines(ss.str()), 3u);  // header + 2 rows
    EXPECT_NE(r.out.find("classical/hybrid"), std::string::npos);
    EXPECT_EQ(count_lines(r.out), 2u);  // header + one row per limit
    EXPECT_TRUE(std::filesystem::exists(sp));
    std::filesystem::remove_all(dir);
}

TEST(CliBench, UsageAndGateFailures) {
    EXPECT_EQ(invoke({"bench", "--limits", "banana"}).code, 2);
    EXPECT_EQ(invoke({"bench", "--limits", "1e4", "--engines", "atkin"}).code, 2);
    EXPECT_EQ(invoke({"bench", "--limits", "1e4", "--repeats", "0"}).code, 2);
    const auto r = invoke({"bench", "--limits", "1e4", "--repeats", "1", "--fault-engine", "hybrid"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("hybrid"), std::string::npos);
}

TEST(CliModel, PrintsPredictions) {
    const auto r = invoke({"model", "--limit", "1000000000"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("62500000"), std::string::npos);
    EXPECT_NE(r.out.find("bytes_touched: 16.0000"), std::string::npos);
}

TEST(CliModel, UsageErrors) {
    EXPECT_EQ(invoke({"model", "--limit", "1"}).code, 2);
    EXPECT_EQ(invoke({"model", "--limit", "1e6", "--line-bytes", "48"}).code, 2);
    EXPECT_EQ(invoke({"model", "--limit", "1e6", "--l1-bytes", "30000"}).code, 2);
}

TEST(CliModel, OptionalCsv) {
    const auto path = std::filesystem::temp_directory_path() / "hsieve_model.csv";
    std::filesystem::remove(path);
    ASSERT_EQ(invoke({"model", "--limit", "1e4", "--csv", path.string()}).code, 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "engine,n,bytes_touched,resident_bytes,padding_bytes,cache_lines_touched");
    std::filesystem::remove(path);
}

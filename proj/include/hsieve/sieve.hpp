// Prime sieve engines: a byte-flag classical sieve, a byte-flag segmented
// sieve, and the cache-aware hybrid sieve that walks [3, n] in bit-packed,
// odd-only blocks sized to the L1 data cache.
//
// All engines stream primes in increasing order into a sink (see sinks.hpp).
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hsieve/bitpack.hpp"
#include "hsieve/sinks.hpp"

namespace hsieve {

enum class Engine { classical, segmented, hybrid };

inline constexpr Engine kAllEngines[] = {Engine::classical, Engine::segmented, Engine::hybrid};

constexpr std::string_view engine_name(Engine e) noexcept {
    switch (e) {
        case Engine::classical: return "classical";
        case Engine::segmented: return "segmented";
        case Engine::hybrid: return "hybrid";
    }
    return "?";
}

inline Engine parse_engine(std::string_view name) {
    for (Engine e : kAllEngines)
        if (engine_name(e) == name) return e;
    throw std::invalid_argument("unknown engine '" + std::string(name) +
                                "' (expected classical, segmented or hybrid)");
}

// Exact floor(sqrt(n)) for every 64-bit n.
constexpr std::uint64_t isqrt(std::uint64_t n) noexcept {
    if (n < 2) return n;
    // Newton iteration from an overestimate decreases monotonically to the floor.
    const int shift = (std::bit_width(n) + 1) / 2;
    std::uint64_t x = std::uint64_t{1} << shift;
    while (true) {
        const std::uint64_t y = (x + n / x) / 2;
        if (y >= x) return x;
        x = y;
    }
}

struct SieveConfig {
    std::uint64_t n = 0;
    std::uint64_t l1_bytes = 32768;
    std::uint64_t cache_line_bytes = kCacheLineBytes;
    // Odd numbers per hybrid block; 0 means l1_bytes * 8.
    std::uint64_t block_bits = 0;
    // Byte-flag window of the segmented baseline; 0 means l1_bytes.
    std::uint64_t segment_bytes = 0;

    std::uint64_t effective_block_bits() const noexcept {
        return block_bits != 0 ? block_bits : l1_bytes * 8;
    }
    std::uint64_t effective_segment_bytes() const noexcept {
        return segment_bytes != 0 ? segment_bytes : l1_bytes;
    }

    void validate() const {
        if (l1_bytes == 0 || !std::has_single_bit(l1_bytes))
            throw std::invalid_argument("l1_bytes must be a power of two, got " +
                                        std::to_string(l1_bytes));
        if (cache_line_bytes < sizeof(std::uint64_t) || !std::has_single_bit(cache_line_bytes))
            throw std::invalid_argument("cache_line_bytes must be a power of two >= 8, got " +
                                        std::to_string(cache_line_bytes));
        if (n > kMaxLimit)
            throw std::invalid_argument("n must be <= 2^62, got " + std::to_string(n));
    }

    static constexpr std::uint64_t kMaxLimit = std::uint64_t{1} << 62;
};

// Primes up to floor(sqrt(n)); shared read-only by every block of a run.
struct BasePrimes {
    std::uint64_t limit = 0;
    std::vector<std::uint64_t> primes;

    // True when these primes mark every composite <= top.
    bool covers(std::uint64_t top) const noexcept { return isqrt(top) <= limit; }
};

// One byte per integer in [0, n], evens included. This is the O(N)-memory
// baseline and is intentionally left unoptimized.
template <PrimeSink Sink>
std::uint64_t classical_sieve(std::uint64_t n, Sink& sink) {
    if (n < 2) return 0;
    std::vector<unsigned char> composite(n + 1, 0);
    for (std::uint64_t i = 2; i * i <= n; ++i)
        if (!composite[i])
            for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = 1;

    std::uint64_t count = 0;
    for (std::uint64_t i = 2; i <= n; ++i)
        if (!composite[i]) {
            sink(i);
            ++count;
        }
    notify_block_done(sink);
    return count;
}

inline std::vector<std::uint64_t> classical_sieve(std::uint64_t n) {
    CollectSink sink;
    classical_sieve(n, sink);
    return std::move(sink.primes);
}

inline BasePrimes base_primes(std::uint64_t n) {
    BasePrimes bp;
    bp.limit = isqrt(n);
    bp.primes = classical_sieve(bp.limit);
    return bp;
}

// Smallest odd multiple of p that is >= max(low, p*p). Multiples below p*p
// have a smaller prime factor and are marked by that prime instead.
constexpr std::uint64_t first_odd_multiple(std::uint64_t p, std::uint64_t low) noexcept {
    const std::uint64_t start = std::max(low, p * p);
    std::uint64_t m = (start + p - 1) / p * p;
    if ((m & 1) == 0) m += p;
    return m;
}

// Marks every odd composite in the block using the odd base primes. Odd
// multiples are 2p apart, which is a stride of p in bit-index space.
inline void sieve_block(OddBitBlock& block, const BasePrimes& bp) {
    const std::uint64_t top = block.high();
    if (!bp.covers(top))
        throw std::invalid_argument("sieve_block: base primes up to " + std::to_string(bp.limit) +
                                    " cannot sieve a block ending at " + std::to_string(top));
    const std::uint64_t low = block.low();
    for (std::uint64_t p : bp.primes) {
        if (p == 2) continue;
        if (p * p > top) break;
        const std::uint64_t m = first_odd_multiple(p, low);
        if (m > top) continue;
        block.mark_stride((m - low) / 2, p);
    }
}

// Cache-aware hybrid sieve. Emits 2, then every odd prime <= n, block by
// block. Returns pi(n).
template <PrimeSink Sink>
std::uint64_t hybrid_sieve(const SieveConfig& config, Sink& sink) {
    config.validate();
    const std::uint64_t n = config.n;
    if (n < 2) return 0;

    sink(2);
    std::uint64_t count = 1;
    if (n < 3) {
        notify_block_done(sink);
        return count;
    }

    const BasePrimes bp = base_primes(n);
    const std::uint64_t top_odd = (n & 1) ? n : n - 1;
    const std::uint64_t total_odd = (top_odd - 3) / 2 + 1;
    const std::uint64_t block_bits = std::min(config.effective_block_bits(), total_odd);
    if (block_bits == 0) throw std::invalid_argument("block_bits must be >= 1");

    OddBitBlock block(3, block_bits, static_cast<std::size_t>(config.cache_line_bytes));
    for (std::uint64_t done = 0; done < total_odd; done += block_bits) {
        const std::uint64_t span = std::min(block_bits, total_odd - done);
        block.reset(3 + 2 * done, span);
        sieve_block(block, bp);
        block.for_each_candidate([&](std::uint64_t v) {
            sink(v);
            ++count;
        });
        notify_block_done(sink);
    }
    return count;
}

// Segmented baseline: one byte per integer (evens included), processed in
// windows of segment_bytes integers, reusing the base primes in each window.
template <PrimeSink Sink>
std::uint64_t segmented_sieve(std::uint64_t n, std::uint64_t segment_bytes, Sink& sink) {
    if (segment_bytes == 0) throw std::invalid_argument("segment_bytes must be >= 1");
    if (n < 2) return 0;

    const BasePrimes bp = base_primes(n);
    std::vector<unsigned char> composite(static_cast<std::size_t>(std::min(segment_bytes, n + 1)));
    std::uint64_t count = 0;

    for (std::uint64_t low = 0; low <= n; low += segment_bytes) {
        const std::uint64_t high = std::min(n, low + segment_bytes - 1);
        const std::size_t len = static_cast<std::size_t>(high - low + 1);
        std::fill_n(composite.begin(), len, 0);

        for (std::uint64_t p : bp.primes) {
            if (p * p > high) break;
            std::uint64_t m = std::max(p * p, (low + p - 1) / p * p);
            for (; m <= high; m += p) composite[m - low] = 1;
        }

        for (std::uint64_t v = std::max<std::uint64_t>(low, 2); v <= high; ++v)
            if (!composite[v - low]) {
                sink(v);
                ++count;
            }
        notify_block_done(sink);
        if (high == n) break;
    }
    return count;
}

template <PrimeSink Sink>
std::uint64_t run_engine(Engine engine, const SieveConfig& config, Sink& sink) {
    config.validate();
    switch (engine) {
        case Engine::classical: return classical_sieve(config.n, sink);
        case Engine::segmented: return segmented_sieve(config.n, config.effective_segment_bytes(), sink);
        case Engine::hybrid: return hybrid_sieve(config, sink);
    }
    throw std::invalid_argument("unknown engine");
}

inline std::uint64_t count_primes(std::uint64_t n, Engine engine, SieveConfig config = {}) {
    config.n = n;
    CountSink sink;
    return run_engine(engine, config, sink);
}

inline std::uint64_t count_primes(std::uint64_t n, std::string_view engine, SieveConfig config = {}) {
    return count_primes(n, parse_engine(engine), config);
}

}  // namespace hsieve

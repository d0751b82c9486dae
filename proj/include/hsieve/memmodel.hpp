// Analytical memory model for the three engines. Nothing here is measured;
// every figure is a closed-form prediction from n and the cache geometry.
//
//   bytes_touched   distinct flag-array bytes addressed over a whole run
//                   (footprint, not load/store count: marking revisits bytes)
//   resident        peak simultaneously-live auxiliary storage
//   cache lines     ceil(bytes_touched / line_bytes)
//
// The classical sieve walks one byte per integer, the hybrid one bit per odd
// integer, hence the 16x ratio: 8x from bit packing, 2x from skipping evens.
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "hsieve/sieve.hpp"

namespace hsieve {

struct ResidentFootprint {
    std::uint64_t base_bytes = 0;     // base primes (or their byte flags)
    std::uint64_t working_bytes = 0;  // sieve array, segment or block
    std::uint64_t padding_bytes = 0;  // alignment padding, not part of total()

    std::uint64_t total() const noexcept { return base_bytes + working_bytes; }
};

struct AccessModel {
    Engine engine = Engine::hybrid;
    std::uint64_t n = 0;
    std::uint64_t bytes_touched = 0;
    ResidentFootprint resident;
    std::uint64_t cache_lines_touched = 0;
};

namespace detail {
inline void require_model_limit(std::uint64_t n) {
    if (n < 2) throw std::invalid_argument("memory model needs n >= 2, got " + std::to_string(n));
}
inline void require_pow2(std::uint64_t v, const char* what) {
    if (!std::has_single_bit(v))
        throw std::invalid_argument(std::string(what) + " must be a power of two, got " +
                                    std::to_string(v));
}
}  // namespace detail

inline std::uint64_t bytes_touched(Engine engine, std::uint64_t n) {
    detail::require_model_limit(n);
    switch (engine) {
        case Engine::classical:
        case Engine::segmented: return n;
        case Engine::hybrid: return (n + 15) / 16;
    }
    throw std::invalid_argument("unknown engine");
}

inline std::uint64_t cache_lines_touched(Engine engine, std::uint64_t n,
                                         std::uint64_t line_bytes = kCacheLineBytes) {
    detail::require_pow2(line_bytes, "line_bytes");
    return (bytes_touched(engine, n) + line_bytes - 1) / line_bytes;
}

// Computes pi(floor(sqrt(n))) to size the hybrid's base-prime table, so the
// cost grows like n^(1/2) in time and n^(1/4) in memory.
inline ResidentFootprint resident_bytes(Engine engine, const SieveConfig& config) {
    config.validate();
    detail::require_model_limit(config.n);
    ResidentFootprint fp;
    switch (engine) {
        case Engine::classical:
            fp.working_bytes = config.n;
            break;
        case Engine::segmented:
            fp.base_bytes = isqrt(config.n);
            fp.working_bytes = config.effective_segment_bytes();
            break;
        case Engine::hybrid: {
            const std::uint64_t root = isqrt(config.n);
            SieveConfig base_cfg = config;
            base_cfg.n = root;
            CountSink counter;
            hybrid_sieve(base_cfg, counter);
            fp.base_bytes = counter.count * sizeof(std::uint64_t);
            fp.working_bytes = (config.effective_block_bits() + 7) / 8;
            const std::uint64_t line = config.cache_line_bytes;
            fp.padding_bytes = (fp.working_bytes + line - 1) / line * line - fp.working_bytes;
            break;
        }
    }
    return fp;
}

inline AccessModel model(Engine engine, const SieveConfig& config) {
    AccessModel m;
    m.engine = engine;
    m.n = config.n;
    m.bytes_touched = bytes_touched(engine, config.n);
    m.resident = resident_bytes(engine, config);
    m.cache_lines_touched = cache_lines_touched(engine, config.n, config.cache_line_bytes);
    return m;
}

// Bytes touched by the classical sieve divided by those of the hybrid.
inline double touched_ratio(std::uint64_t n) {
    return static_cast<double>(bytes_touched(Engine::classical, n)) /
           static_cast<double>(bytes_touched(Engine::hybrid, n));
}

}  // namespace hsieve

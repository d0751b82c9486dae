// Prime consumers. Engines call sink(p) once per prime in increasing order and,
// when the sink provides it, sink.block_done() after each finished block.
#pragma once

#include <charconv>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace hsieve {

template <class S>
concept PrimeSink = requires(S& s, std::uint64_t p) { s(p); };

template <class S>
void notify_block_done(S& sink) {
    if constexpr (requires { sink.block_done(); }) sink.block_done();
}

struct CountSink {
    std::uint64_t count = 0;
    void operator()(std::uint64_t) noexcept { ++count; }
};

// Count plus the sum of all primes modulo 2^64; used to compare engines.
struct ChecksumSink {
    std::uint64_t count = 0;
    std::uint64_t checksum = 0;
    void operator()(std::uint64_t p) noexcept {
        ++count;
        checksum += p;
    }
};

struct CollectSink {
    std::vector<std::uint64_t> primes;
    void operator()(std::uint64_t p) { primes.push_back(p); }
};

// Writes one prime per line. Lines are buffered and handed to the stream at
// each block boundary, so memory stays proportional to one block's output.
class TextSink {
public:
    explicit TextSink(std::ostream& out) : out_(out) {}
    TextSink(const TextSink&) = delete;
    TextSink& operator=(const TextSink&) = delete;
    ~TextSink() { flush(); }

    void operator()(std::uint64_t p) {
        char buf[24];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf) - 1, p);
        *end++ = '\n';
        buffer_.append(buf, end);
    }

    void block_done() { flush(); }

    void flush() {
        if (buffer_.empty()) return;
        out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        out_.flush();
        buffer_.clear();
    }

private:
    std::ostream& out_;
    std::string buffer_;
};

}  // namespace hsieve

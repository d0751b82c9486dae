// Bit-packed primality flags for the odd numbers of one sieve block.
//
// Layout:
//   bit i  <->  odd value low + 2*i
//   word w holds bits [64*w, 64*w + 63], least-significant bit first
//   set bit = composite, clear bit = candidate prime
//
// Storage is allocated with the requested alignment (64 bytes by default, one
// cache line) and padded to a whole number of alignment units, so a block of
// 262144 bits occupies exactly 32 KB.
#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <iterator>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

namespace hsieve {

inline constexpr std::size_t kCacheLineBytes = 64;

class OddBitBlock {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t kWordBits = 64;

    // Creates a zeroed block covering the odd numbers low, low+2, ...,
    // low + 2*(span_bits-1).
    OddBitBlock(std::uint64_t low, std::uint64_t span_bits,
                std::size_t alignment = kCacheLineBytes)
        : alignment_(alignment) {
        if (alignment < sizeof(word_type) || !std::has_single_bit(alignment))
            throw std::invalid_argument("OddBitBlock: alignment must be a power of two >= " +
                                        std::to_string(sizeof(word_type)));
        check_geometry(low, span_bits);
        capacity_bits_ = span_bits;
        storage_bytes_ = padded_bytes(span_bits, alignment);
        words_ = Storage(static_cast<word_type*>(
                             ::operator new(storage_bytes_, std::align_val_t{alignment_})),
                         AlignedDelete{alignment_});
        low_ = low;
        span_bits_ = span_bits;
        std::memset(words_.get(), 0, storage_bytes_);
    }

    OddBitBlock(OddBitBlock&&) noexcept = default;
    OddBitBlock& operator=(OddBitBlock&&) noexcept = default;
    OddBitBlock(const OddBitBlock&) = delete;
    OddBitBlock& operator=(const OddBitBlock&) = delete;

    // Moves the window to a new range without reallocating and clears every
    // flag. span_bits may shrink (final, truncated block) but never exceed the
    // capacity the block was created with.
    void reset(std::uint64_t low, std::uint64_t span_bits) {
        check_geometry(low, span_bits);
        if (span_bits > capacity_bits_)
            throw std::invalid_argument("OddBitBlock::reset: span_bits " + std::to_string(span_bits) +
                                        " exceeds capacity " + std::to_string(capacity_bits_));
        low_ = low;
        span_bits_ = span_bits;
        std::memset(words_.get(), 0, storage_bytes_);
    }

    std::uint64_t low() const noexcept { return low_; }
    std::uint64_t span_bits() const noexcept { return span_bits_; }
    std::uint64_t capacity_bits() const noexcept { return capacity_bits_; }
    std::uint64_t high() const noexcept { return low_ + 2 * (span_bits_ - 1); }
    std::size_t alignment() const noexcept { return alignment_; }

    // Bytes actually allocated, a multiple of alignment().
    std::size_t storage_bytes() const noexcept { return storage_bytes_; }
    // Bytes needed by the flags alone: ceil(span_bits / 8).
    std::uint64_t packed_bytes() const noexcept { return (span_bits_ + 7) / 8; }
    std::size_t word_count() const noexcept { return (span_bits_ + kWordBits - 1) / kWordBits; }

    const word_type* words() const noexcept { return words_.get(); }

    bool contains(std::uint64_t v) const noexcept {
        return (v & 1) != 0 && v >= low_ && v <= high();
    }

    std::uint64_t bit_index(std::uint64_t v) const {
        check_value(v, "bit_index");
        return (v - low_) / 2;
    }

    std::uint64_t value_at(std::uint64_t index) const {
        if (index >= span_bits_)
            throw std::invalid_argument("OddBitBlock::value_at: index " + std::to_string(index) +
                                        " out of range");
        return low_ + 2 * index;
    }

    void mark_composite(std::uint64_t v) {
        check_value(v, "mark_composite");
        mark_index_unchecked((v - low_) / 2);
    }

    bool is_candidate(std::uint64_t v) const {
        check_value(v, "is_candidate");
        return !test_index_unchecked((v - low_) / 2);
    }

    // Hot-loop access; the caller has already bounded index < span_bits().
    void mark_index_unchecked(std::uint64_t index) noexcept {
        words_.get()[index / kWordBits] |= word_type{1} << (index % kWordBits);
    }
    bool test_index_unchecked(std::uint64_t index) const noexcept {
        return (words_.get()[index / kWordBits] >> (index % kWordBits)) & 1u;
    }

    // Marks indices start, start+step, ... below span_bits().
    void mark_stride(std::uint64_t start, std::uint64_t step) noexcept {
        word_type* w = words_.get();
        for (std::uint64_t i = start; i < span_bits_; i += step)
            w[i / kWordBits] |= word_type{1} << (i % kWordBits);
    }

    std::uint64_t marked_count() const noexcept {
        std::uint64_t total = 0;
        const std::size_t n = word_count();
        for (std::size_t i = 0; i < n; ++i) total += std::popcount(live_word(i));
        return total;
    }

    std::uint64_t candidate_count() const noexcept { return span_bits_ - marked_count(); }

    // Calls fn(v) for each candidate v in increasing order.
    template <class Fn>
    void for_each_candidate(Fn&& fn) const {
        const std::size_t n = word_count();
        for (std::size_t i = 0; i < n; ++i) {
            word_type free = ~live_word(i) & valid_mask(i);
            const std::uint64_t base = low_ + 2 * (i * kWordBits);
            while (free != 0) {
                fn(base + 2 * static_cast<std::uint64_t>(std::countr_zero(free)));
                free &= free - 1;
            }
        }
    }

    class CandidateIterator;

    CandidateIterator begin() const;
    CandidateIterator end() const;

private:
    struct AlignedDelete {
        std::size_t alignment;
        void operator()(word_type* p) const noexcept {
            ::operator delete(p, std::align_val_t{alignment});
        }
    };
    using Storage = std::unique_ptr<word_type[], AlignedDelete>;

    static std::size_t padded_bytes(std::uint64_t span_bits, std::size_t alignment) {
        const std::uint64_t packed = (span_bits + 7) / 8;
        return static_cast<std::size_t>((packed + alignment - 1) / alignment * alignment);
    }

    static void check_geometry(std::uint64_t low, std::uint64_t span_bits) {
        if (low < 3 || (low & 1) == 0)
            throw std::invalid_argument("OddBitBlock: low must be odd and >= 3, got " +
                                        std::to_string(low));
        if (span_bits == 0) throw std::invalid_argument("OddBitBlock: span_bits must be >= 1");
        if (span_bits - 1 > (UINT64_MAX - low) / 2)
            throw std::invalid_argument("OddBitBlock: block top overflows 64 bits");
    }

    void check_value(std::uint64_t v, const char* what) const {
        if (!contains(v))
            throw std::invalid_argument(std::string("OddBitBlock::") + what + ": " +
                                        std::to_string(v) + " is not an odd value in [" +
                                        std::to_string(low_) + ", " + std::to_string(high()) + "]");
    }

    word_type live_word(std::size_t i) const noexcept { return words_.get()[i] & valid_mask(i); }

    // Bits of word i that lie inside the span; padding bits beyond it are ignored.
    word_type valid_mask(std::size_t i) const noexcept {
        const std::uint64_t first = i * kWordBits;
        const std::uint64_t remaining = span_bits_ - first;
        return remaining >= kWordBits ? ~word_type{0} : (word_type{1} << remaining) - 1;
    }

    std::uint64_t low_ = 3;
    std::uint64_t span_bits_ = 0;
    std::uint64_t capacity_bits_ = 0;
    std::size_t alignment_ = kCacheLineBytes;
    std::size_t storage_bytes_ = 0;
    Storage words_{nullptr, AlignedDelete{kCacheLineBytes}};
};

// Forward iterator over candidate values, used by range-for and the
// iter_candidates helpers.
class OddBitBlock::CandidateIterator {
public:
    using value_type = std::uint64_t;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::forward_iterator_tag;

    CandidateIterator() = default;
    explicit CandidateIterator(const OddBitBlock* block) : block_(block) {
        load(0);
        advance_to_next();
    }
    static CandidateIterator past_end(const OddBitBlock* block) {
        CandidateIterator it;
        it.block_ = block;
        it.word_ = block->word_count();
        return it;
    }

    std::uint64_t operator*() const noexcept {
        return block_->low_ + 2 * (word_ * kWordBits + std::countr_zero(pending_));
    }

    CandidateIterator& operator++() noexcept {
        pending_ &= pending_ - 1;
        advance_to_next();
        return *this;
    }
    CandidateIterator operator++(int) noexcept {
        auto tmp = *this;
        ++*this;
        return tmp;
    }

    friend bool operator==(const CandidateIterator& a, const CandidateIterator& b) noexcept {
        return a.block_ == b.block_ && a.word_ == b.word_ && a.pending_ == b.pending_;
    }

private:
    void load(std::size_t w) noexcept {
        word_ = w;
        pending_ = ~block_->live_word(w) & block_->valid_mask(w);
    }
    void advance_to_next() noexcept {
        const std::size_t n = block_->word_count();
        while (pending_ == 0) {
            if (word_ + 1 >= n) {
                word_ = n;
                return;
            }
            load(word_ + 1);
        }
    }

    const OddBitBlock* block_ = nullptr;
    std::size_t word_ = 0;
    word_type pending_ = 0;
};

inline OddBitBlock::CandidateIterator OddBitBlock::begin() const { return CandidateIterator(this); }
inline OddBitBlock::CandidateIterator OddBitBlock::end() const { return CandidateIterator::past_end(this); }

}  // namespace hsieve

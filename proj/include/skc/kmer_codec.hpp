#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skc {

// 2-bit symbol codes. A<C<G<T numerically, so packed order is lexicographic
// order and complement(x) == 3 - x == x ^ 3.
inline constexpr uint8_t kBaseA = 0;
inline constexpr uint8_t kBaseC = 1;
inline constexpr uint8_t kBaseG = 2;
inline constexpr uint8_t kBaseT = 3;
inline constexpr uint8_t kInvalidBase = 0xFF;

inline constexpr std::size_t kSymbolsPerWord = 32;
inline constexpr std::size_t kMaxK = 512;
inline constexpr std::size_t kMaxKWords = kMaxK / kSymbolsPerWord;

// Maps ASCII to a 2-bit code; both cases of ACGT are accepted, anything else
// maps to kInvalidBase.
extern const std::array<uint8_t, 256> kBaseCode;

inline constexpr char kCodeBase[4] = {'A', 'C', 'G', 'T'};

inline constexpr std::size_t words_for(std::size_t symbols) {
    return (symbols + kSymbolsPerWord - 1) / kSymbolsPerWord;
}

class EncodeError : public std::invalid_argument {
public:
    EncodeError(std::size_t position, char symbol);
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

enum class Strand : uint8_t { forward, reverse };

// Immutable 2-bit packed DNA string. Symbol 0 occupies the two most significant
// bits of word 0; bits past 2*size() are always zero.
class PackedSeq {
public:
    PackedSeq() = default;

    // Takes ownership of `words` (at least words_for(length) entries) and clears
    // any bits beyond `length` symbols.
    static PackedSeq from_words(std::vector<uint64_t> words, std::size_t length);

    std::size_t size() const { return length_; }
    bool empty() const { return length_ == 0; }
    std::span<const uint64_t> words() const { return words_; }

    uint8_t at(std::size_t i) const {
        return static_cast<uint8_t>(words_[i / kSymbolsPerWord] >> (62 - 2 * (i % kSymbolsPerWord))) & 3u;
    }

    friend bool operator==(const PackedSeq& a, const PackedSeq& b) {
        return a.length_ == b.length_ && a.words_ == b.words_;
    }

private:
    PackedSeq(std::vector<uint64_t> words, std::size_t length)
        : words_(std::move(words)), length_(length) {}

    std::vector<uint64_t> words_;
    std::size_t length_ = 0;
};

PackedSeq encode(std::string_view text);
std::string decode(const PackedSeq& seq);

PackedSeq reverse_complement(const PackedSeq& seq);

// Lexicographic minimum of `seq` and its reverse complement. RC-palindromes
// report Strand::forward.
std::pair<PackedSeq, Strand> canonical(const PackedSeq& seq);

// Lexicographic order on equal-length sequences; throws std::invalid_argument
// on a length mismatch.
std::strong_ordering compare(const PackedSeq& a, const PackedSeq& b);

// Throws std::out_of_range unless start + len <= seq.size().
PackedSeq subseq(const PackedSeq& seq, std::size_t start, std::size_t len);

uint64_t hash_words(std::span<const uint64_t> words, std::size_t length);

struct PackedSeqHash {
    std::size_t operator()(const PackedSeq& s) const { return hash_words(s.words(), s.size()); }
};

// Packs `len` symbols of `text` (either case of ACGT) into `out`, which must
// hold words_for(len) entries. Returns false on the first non-ACGT byte.
bool pack_into(std::string_view text, std::span<uint64_t> out);

// Sliding k-window over a symbol stream, maintaining both the forward k-mer
// and its reverse complement in fixed buffers (k <= kMaxK).
class KmerRoller {
public:
    explicit KmerRoller(std::size_t k);

    std::size_t k() const { return k_; }
    std::size_t word_count() const { return nwords_; }

    void reset() { filled_ = 0; fwd_.fill(0); rc_.fill(0); }

    // Shifts in one symbol code (0..3). Returns true once k symbols are loaded.
    bool push(uint8_t code);

    bool full() const { return filled_ >= k_; }

    std::span<const uint64_t> forward() const { return {fwd_.data(), nwords_}; }
    std::span<const uint64_t> reverse() const { return {rc_.data(), nwords_}; }

    // Lexicographically smaller of forward() and reverse(); forward on ties.
    std::span<const uint64_t> canonical() const;

private:
    std::size_t k_;
    std::size_t nwords_;
    std::size_t filled_ = 0;
    unsigned last_shift_;   // bit position of symbol k-1 inside the last word
    uint64_t last_mask_;    // meaningful bits of the last word
    std::array<uint64_t, kMaxKWords> fwd_{};
    std::array<uint64_t, kMaxKWords> rc_{};
};

}  // namespace skc

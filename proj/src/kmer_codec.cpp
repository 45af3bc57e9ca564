#include "skc/kmer_codec.hpp"

#include <algorithm>

#include "skc/hash.hpp"

namespace skc {

namespace {

constexpr std::array<uint8_t, 256> make_base_table() {
    std::array<uint8_t, 256> t{};
    for (auto& v : t) v = kInvalidBase;
    t['A'] = t['a'] = kBaseA;
    t['C'] = t['c'] = kBaseC;
    t['G'] = t['g'] = kBaseG;
    t['T'] = t['t'] = kBaseT;
    return t;
}

// Bits of the last word that hold symbols when `length` symbols are packed.
uint64_t tail_mask(std::size_t length) {
    const std::size_t used = length % kSymbolsPerWord;
    return used == 0 ? ~0ULL : ~0ULL << (64 - 2 * used);
}

// Reverses the order of the 32 two-bit groups of x.
uint64_t reverse_symbols(uint64_t x) {
    x = ((x >> 2) & 0x3333333333333333ULL) | ((x & 0x3333333333333333ULL) << 2);
    x = ((x >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((x & 0x0F0F0F0F0F0F0F0FULL) << 4);
    return __builtin_bswap64(x);
}

}  // namespace

const std::array<uint8_t, 256> kBaseCode = make_base_table();

EncodeError::EncodeError(std::size_t position, char symbol)
    : std::invalid_argument("invalid symbol '" + std::string(1, symbol) + "' at position " +
                            std::to_string(position)),
      position_(position) {}

PackedSeq PackedSeq::from_words(std::vector<uint64_t> words, std::size_t length) {
    const std::size_t n = words_for(length);
    if (words.size() < n) throw std::invalid_argument("PackedSeq: word list shorter than length");
    words.resize(n);
    if (n > 0) words.back() &= tail_mask(length);
    return PackedSeq(std::move(words), length);
}

bool pack_into(std::string_view text, std::span<uint64_t> out) {
    std::size_t i = 0;
    for (std::size_t w = 0; w < words_for(text.size()); ++w) {
        uint64_t word = 0;
        const std::size_t end = std::min(text.size(), i + kSymbolsPerWord);
        unsigned shift = 62;
        for (; i < end; ++i, shift -= 2) {
            const uint8_t c = kBaseCode[static_cast<unsigned char>(text[i])];
            if (c == kInvalidBase) return false;
            word |= static_cast<uint64_t>(c) << shift;
        }
        out[w] = word;
    }
    return true;
}

PackedSeq encode(std::string_view text) {
    std::vector<uint64_t> words(words_for(text.size()));
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch != 'A' && ch != 'C' && ch != 'G' && ch != 'T') throw EncodeError(i, ch);
    }
    pack_into(text, words);
    return PackedSeq::from_words(std::move(words), text.size());
}

std::string decode(const PackedSeq& seq) {
    std::string out(seq.size(), 'A');
    for (std::size_t i = 0; i < seq.size(); ++i) out[i] = kCodeBase[seq.at(i)];
    return out;
}

PackedSeq reverse_complement(const PackedSeq& seq) {
    const auto in = seq.words();
    const std::size_t n = in.size();
    if (n == 0) return {};
    std::vector<uint64_t> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = reverse_symbols(~in[n - 1 - j]);
    // The reversed symbols are right-aligned behind `pad` bits of garbage.
    const std::size_t pad = 64 * n - 2 * seq.size();
    if (pad > 0) {
        for (std::size_t j = 0; j + 1 < n; ++j) out[j] = (out[j] << pad) | (out[j + 1] >> (64 - pad));
        out[n - 1] <<= pad;
    }
    return PackedSeq::from_words(std::move(out), seq.size());
}

std::pair<PackedSeq, Strand> canonical(const PackedSeq& seq) {
    PackedSeq rc = reverse_complement(seq);
    if (compare(rc, seq) < 0) return {std::move(rc), Strand::reverse};
    return {seq, Strand::forward};
}

std::strong_ordering compare(const PackedSeq& a, const PackedSeq& b) {
    if (a.size() != b.size()) throw std::invalid_argument("compare: length mismatch");
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        if (wa[i] != wb[i]) return wa[i] <=> wb[i];
    }
    return std::strong_ordering::equal;
}

PackedSeq subseq(const PackedSeq& seq, std::size_t start, std::size_t len) {
    if (start > seq.size() || len > seq.size() - start) throw std::out_of_range("subseq: range past end");
    const auto in = seq.words();
    const std::size_t first = start / kSymbolsPerWord;
    const unsigned shift = 2 * (start % kSymbolsPerWord);
    std::vector<uint64_t> out(words_for(len));
    for (std::size_t j = 0; j < out.size(); ++j) {
        const std::size_t a = first + j;
        uint64_t w = in[a] << shift;
        if (shift != 0 && a + 1 < in.size()) w |= in[a + 1] >> (64 - shift);
        out[j] = w;
    }
    return PackedSeq::from_words(std::move(out), len);
}

uint64_t hash_words(std::span<const uint64_t> words, std::size_t length) {
    uint64_t h = mix64(length + 0x9E3779B97F4A7C15ULL);
    for (uint64_t w : words) h = mix64(h ^ w) + 0x9E3779B97F4A7C15ULL;
    return h;
}

KmerRoller::KmerRoller(std::size_t k) : k_(k), nwords_(words_for(k)) {
    if (k == 0 || k > kMaxK) throw std::invalid_argument("KmerRoller: k must be in [1, 512]");
    last_shift_ = 62 - 2 * static_cast<unsigned>((k - 1) % kSymbolsPerWord);
    last_mask_ = tail_mask(k);
}

bool KmerRoller::push(uint8_t code) {
    const std::size_t n = nwords_;
    for (std::size_t i = 0; i + 1 < n; ++i) fwd_[i] = (fwd_[i] << 2) | (fwd_[i + 1] >> 62);
    fwd_[n - 1] = ((fwd_[n - 1] << 2) | (static_cast<uint64_t>(code) << last_shift_)) & last_mask_;

    for (std::size_t i = n - 1; i > 0; --i) rc_[i] = (rc_[i] >> 2) | (rc_[i - 1] << 62);
    rc_[0] = (rc_[0] >> 2) | (static_cast<uint64_t>(3 - code) << 62);
    rc_[n - 1] &= last_mask_;

    if (filled_ < k_) ++filled_;
    return filled_ >= k_;
}

std::span<const uint64_t> KmerRoller::canonical() const {
    for (std::size_t i = 0; i < nwords_; ++i) {
        if (fwd_[i] != rc_[i]) return fwd_[i] < rc_[i] ? forward() : reverse();
    }
    return forward();
}

}  // namespace skc

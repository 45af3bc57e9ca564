#include "skc/signature_engine.hpp"

#include <stdexcept>

namespace skc {

namespace {

uint64_t right_aligned_code(const PackedSeq& seq, std::size_t start, std::size_t len) {
    uint64_t code = 0;
    for (std::size_t i = start; i < start + len; ++i) code = (code << 2) | seq.at(i);
    return code;
}

void check_m(unsigned m) {
    if (m == 0 || m > kMaxM) throw std::invalid_argument("m must be in [1, 31]");
}

}  // namespace

bool is_allowed(const PackedSeq& mmer) {
    const std::size_t m = mmer.size();
    if (m < 3) return true;
    const uint8_t s0 = mmer.at(0), s1 = mmer.at(1), s2 = mmer.at(2);
    if (s0 == kBaseA && (s1 == kBaseA || s1 == kBaseC) && s2 == kBaseA) return false;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if (mmer.at(i) == kBaseA && mmer.at(i + 1) == kBaseA) return false;
    }
    return true;
}

uint64_t mmer_rank(const PackedSeq& mmer) {
    if (mmer.size() > kMaxM) throw std::invalid_argument("mmer_rank: m-mer longer than 31 symbols");
    const auto m = static_cast<unsigned>(mmer.size());
    return rank_of_code(right_aligned_code(mmer, 0, m), m);
}

PackedSeq Signature::mmer() const {
    if (m == 0) return {};
    return PackedSeq::from_words({code << (64 - 2 * m)}, m);
}

std::pair<Signature, std::size_t> signature_of(const PackedSeq& window, unsigned m) {
    check_m(m);
    if (window.size() < m) throw std::invalid_argument("signature_of: window shorter than m");
    const uint64_t mask = (1ULL << (2 * m)) - 1;
    uint64_t best_rank = ~0ULL;
    uint64_t best_code = 0;
    std::size_t best_pos = 0;
    for (std::size_t pos = 0; pos + m <= window.size(); ++pos) {
        const uint64_t fwd = right_aligned_code(window, pos, m);
        uint64_t rc = 0;
        for (unsigned i = 0; i < m; ++i) rc |= static_cast<uint64_t>(3 - ((fwd >> (2 * i)) & 3)) << (2 * (m - 1 - i));
        rc &= mask;
        const uint64_t canon = fwd < rc ? fwd : rc;
        const uint64_t r = rank_of_code(canon, m);
        if (r < best_rank) {
            best_rank = r;
            best_code = canon;
            best_pos = pos;
        }
    }
    return {Signature{best_code, m}, best_pos};
}

SuperkmerExtractor::SuperkmerExtractor(std::size_t k, unsigned m)
    : k_(k), m_(m), span_(k >= m ? k - m + 1 : 0) {
    check_m(m);
    if (k < m) throw std::invalid_argument("SuperkmerExtractor: m must not exceed k");
    if (k > kMaxK) throw std::invalid_argument("SuperkmerExtractor: k must not exceed 512");
    mask_ = (1ULL << (2 * m)) - 1;
    ranks_.assign(span_, 0);
}

std::vector<SuperkmerRecord> extract_superkmers(std::string_view fragment, std::size_t k, unsigned m) {
    SuperkmerExtractor extractor(k, m);
    std::vector<SuperkmerRecord> out;
    extractor.scan(fragment, [&](const SuperkmerSpan& s) {
        std::vector<uint64_t> words(words_for(s.length));
        pack_into(fragment.substr(s.start, s.length), words);
        out.push_back({s.signature, PackedSeq::from_words(std::move(words), s.length)});
    });
    return out;
}

std::vector<SuperkmerRecord> extract_superkmers(const Fragment& fragment, std::size_t k, unsigned m) {
    return extract_superkmers(std::string_view(fragment.bases), k, m);
}

}  // namespace skc

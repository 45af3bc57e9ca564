#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "skc/kmer_codec.hpp"
#include "skc/sequence_io.hpp"

namespace skc {

inline constexpr unsigned kMaxM = 31;

// Set on the rank of an m-mer that fails the signature filter, so that every
// allowed m-mer ranks before every disallowed one.
inline constexpr uint64_t kDisallowedRankBit = 1ULL << 62;

// Filter on a right-aligned 2-bit m-mer code: rejects m-mers that start with
// AAA or ACA, or that contain AA at any position other than the start.
// Every m-mer with m < 3 is allowed.
constexpr bool is_allowed_code(uint64_t code, unsigned m) {
    if (m < 3) return true;
    const unsigned top = 2 * (m - 3);
    const uint64_t prefix = (code >> top) & 0x3F;
    if (prefix == 0b000000 || prefix == 0b000100) return false;  // AAA, ACA
    const uint64_t mask = m >= 32 ? ~0ULL : (1ULL << (2 * m)) - 1;
    // low bit of each symbol slot is set iff the symbol is A
    const uint64_t is_a = ~(code | (code >> 1)) & 0x5555555555555555ULL & mask;
    // bit 2(m-1-i) set iff symbols i and i+1 are both A
    const uint64_t aa = is_a & (is_a << 2) & mask;
    const uint64_t first_pair = 1ULL << (2 * (m - 1));
    return (aa & ~first_pair) == 0;
}

constexpr uint64_t rank_of_code(uint64_t code, unsigned m) {
    return is_allowed_code(code, m) ? code : (code | kDisallowedRankBit);
}

bool is_allowed(const PackedSeq& mmer);

// Requires mmer.size() <= 31.
uint64_t mmer_rank(const PackedSeq& mmer);

// Canonical, filter-ranked m-mer. `code` holds the m-mer right-aligned.
struct Signature {
    uint64_t code = 0;
    unsigned m = 0;

    uint64_t rank() const { return rank_of_code(code, m); }
    PackedSeq mmer() const;

    friend bool operator==(const Signature&, const Signature&) = default;
};

struct SuperkmerRecord {
    Signature signature;
    PackedSeq seq;

    std::size_t kmer_count(std::size_t k) const { return seq.size() - k + 1; }
};

// Location of one superkmer inside the fragment it came from.
struct SuperkmerSpan {
    Signature signature;
    std::size_t start = 0;
    std::size_t length = 0;
};

// Minimum-rank canonical m-mer over all m-windows of `window` (leftmost on
// ties), with the position of that m-window.
std::pair<Signature, std::size_t> signature_of(const PackedSeq& window, unsigned m);

// Splits ACGT fragments into superkmers. Keeps per-scan state, so one
// instance per worker.
//
// The window minimum is maintained incrementally: an entering m-mer replaces
// the minimum only if it ranks strictly lower, and the whole window is
// rescanned only when the current minimum's position slides out. This keeps
// the leftmost-minimum tie-break while costing O(1) amortized per base on
// non-adversarial input.
class SuperkmerExtractor {
public:
    SuperkmerExtractor(std::size_t k, unsigned m);

    std::size_t k() const { return k_; }
    unsigned m() const { return m_; }

    // `fragment` must contain only ACGT (either case) and have length >= k.
    // Calls emit(const SuperkmerSpan&) once per superkmer, left to right.
    template <class Emit>
    void scan(std::string_view fragment, Emit&& emit);

private:
    std::size_t k_;
    unsigned m_;
    std::size_t span_;  // m-windows per k-window
    uint64_t mask_;
    std::vector<uint64_t> ranks_;  // ring buffer of the last span_ m-mer ranks
};

std::vector<SuperkmerRecord> extract_superkmers(std::string_view fragment, std::size_t k, unsigned m);
std::vector<SuperkmerRecord> extract_superkmers(const Fragment& fragment, std::size_t k, unsigned m);

template <class Emit>
void SuperkmerExtractor::scan(std::string_view fragment, Emit&& emit) {
    const std::size_t len = fragment.size();
    if (len < k_) return;
    const unsigned rc_shift = 2 * (m_ - 1);
    uint64_t fwd = 0;
    uint64_t rc = 0;

    // m-mer at position j is stored in ranks_[j % span_]
    auto rank_at = [&](std::size_t j) { return ranks_[j % span_]; };
    auto push_mmer = [&](std::size_t j) {
        const uint64_t canon = fwd < rc ? fwd : rc;
        ranks_[j % span_] = rank_of_code(canon, m_);
    };
    auto rescan = [&](std::size_t first, std::size_t last, std::size_t& best_pos, uint64_t& best) {
        best_pos = first;
        best = rank_at(first);
        for (std::size_t j = first + 1; j <= last; ++j) {
            const uint64_t r = rank_at(j);
            if (r < best) {
                best = r;
                best_pos = j;
            }
        }
    };

    for (std::size_t i = 0; i < m_ - 1; ++i) {
        const uint64_t c = kBaseCode[static_cast<unsigned char>(fragment[i])];
        fwd = ((fwd << 2) | c) & mask_;
        rc = (rc >> 2) | ((3 - c) << rc_shift);
    }
    std::size_t min_pos = 0;
    uint64_t min_rank = 0;
    SuperkmerSpan current;
    bool open = false;

    for (std::size_t i = m_ - 1; i < len; ++i) {
        const uint64_t c = kBaseCode[static_cast<unsigned char>(fragment[i])];
        fwd = ((fwd << 2) | c) & mask_;
        rc = (rc >> 2) | ((3 - c) << rc_shift);
        const std::size_t j = i + 1 - m_;  // position of the m-mer just completed
        push_mmer(j);
        if (i + 1 < k_) continue;

        const std::size_t window = i + 1 - k_;  // k-window start
        if (window == 0) {
            rescan(0, j, min_pos, min_rank);
        } else if (min_pos < window) {
            rescan(window, j, min_pos, min_rank);
        } else if (rank_at(j) < min_rank) {
            min_rank = rank_at(j);
            min_pos = j;
        }
        const uint64_t canon = min_rank & ~kDisallowedRankBit;
        if (!open || canon != current.signature.code) {
            if (open) {
                current.length = (window - 1) + k_ - current.start;
                emit(static_cast<const SuperkmerSpan&>(current));
            }
            current.signature = Signature{canon, m_};
            current.start = window;
            open = true;
        }
    }
    current.length = len - current.start;
    emit(static_cast<const SuperkmerSpan&>(current));
}

}  // namespace skc

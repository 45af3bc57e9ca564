#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skc/kmer_codec.hpp"
#include "skc/signature_engine.hpp"

namespace skc {

enum class CountingMode { canonical, forward };
enum class OutputFormat { tsv, binary };

struct KmerCount {
    PackedSeq kmer;
    uint64_t count = 0;
};

class MemoryBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Open-addressing k-mer -> count table. Keys are stored inline, words_for(k)
// words each; linear probing over a power-of-two capacity that doubles once
// the load factor would exceed 0.7.
class CountTable {
public:
    static constexpr double kMaxLoadFactor = 0.7;

    // memory_limit == 0 means unbounded. Growth past the limit throws
    // MemoryBudgetError.
    explicit CountTable(std::size_t k, std::size_t initial_capacity = 1024, std::size_t memory_limit = 0);

    std::size_t k() const { return k_; }
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    uint64_t total() const { return total_; }
    std::size_t memory_bytes() const { return capacity_ * (nwords_ + 1) * sizeof(uint64_t); }

    void add(std::span<const uint64_t> kmer, uint64_t n = 1);
    uint64_t count(std::span<const uint64_t> kmer) const;
    uint64_t count(const PackedSeq& kmer) const { return count(kmer.words()); }

    // Visits entries in table order.
    template <class F>
    void for_each(F&& visit) const {
        for (std::size_t slot = 0; slot < capacity_; ++slot) {
            if (counts_[slot] != 0) visit(key_at(slot), counts_[slot]);
        }
    }

    // Occupied slots in lexicographic key order.
    std::vector<std::size_t> sorted_slots() const;
    std::span<const uint64_t> key_at(std::size_t slot) const { return {keys_.data() + slot * nwords_, nwords_}; }
    uint64_t count_at(std::size_t slot) const { return counts_[slot]; }

    std::vector<KmerCount> to_counts() const;

private:
    std::size_t find_slot(std::span<const uint64_t> kmer) const;
    void grow();

    std::size_t k_;
    std::size_t nwords_;
    std::size_t capacity_;
    std::size_t memory_limit_;
    std::size_t size_ = 0;
    uint64_t total_ = 0;
    std::vector<uint64_t> keys_;
    std::vector<uint64_t> counts_;  // 0 marks an empty slot
};

// Feeds every k-window of a packed sequence to `emit(span<const uint64_t>)`,
// canonicalized in canonical mode.
template <class Emit>
void for_each_kmer(std::span<const uint64_t> words, std::size_t length, KmerRoller& roller, CountingMode mode,
                   Emit&& emit) {
    roller.reset();
    for (std::size_t i = 0; i < length; ++i) {
        const auto code = static_cast<uint8_t>(words[i / kSymbolsPerWord] >> (62 - 2 * (i % kSymbolsPerWord))) & 3u;
        if (roller.push(code)) emit(mode == CountingMode::canonical ? roller.canonical() : roller.forward());
    }
}

std::vector<PackedSeq> expand_superkmer(const SuperkmerRecord& rec, std::size_t k,
                                        CountingMode mode = CountingMode::canonical);

CountTable count_partition(std::span<const SuperkmerRecord> records, std::size_t k,
                           CountingMode mode = CountingMode::canonical, std::size_t memory_limit = 0);

struct WriteSummary {
    uint64_t distinct = 0;
    uint64_t total = 0;
};

// Text rows are "KMER\tCOUNT\n". Binary output starts with the 8-byte magic
// "SKCKBIN1", then k and the per-key word count as little-endian u32, followed
// by (key words, u64 count) records, all little-endian.
WriteSummary write_counts(const CountTable& table, std::ostream& out, OutputFormat format, uint64_t min_count = 1,
                          bool sorted = false);
WriteSummary write_counts(std::span<const KmerCount> counts, std::ostream& out, OutputFormat format,
                          uint64_t min_count = 1);

inline constexpr char kBinaryMagic[8] = {'S', 'K', 'C', 'K', 'B', 'I', 'N', '1'};

// Reads a file produced by write_counts; the format is taken from its first
// bytes.
std::vector<std::pair<std::string, uint64_t>> read_counts(const std::filesystem::path& path);

std::string partition_file_name(uint32_t partition, OutputFormat format);

}  // namespace skc

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skc/counting_engine.hpp"
#include "skc/sequence_io.hpp"

namespace skc {

// Reference k-mer counter working on plain strings: every length-k window
// free of non-ACGT symbols, strand-merged by string reverse complement in
// canonical mode. Shares no code with the packed path.
using OracleCounts = std::unordered_map<std::string, uint64_t>;

std::string reverse_complement_text(std::string_view s);

void oracle_add(OracleCounts& counts, std::string_view bases, std::size_t k, CountingMode mode);
OracleCounts oracle_count(std::span<const SequenceRecord> records, std::size_t k,
                          CountingMode mode = CountingMode::canonical);
OracleCounts oracle_count_files(const std::vector<std::string>& paths, InputFormat format, std::size_t k,
                                CountingMode mode = CountingMode::canonical);

struct Divergence {
    std::string kmer;
    uint64_t expected = 0;
    uint64_t actual = 0;
};

// Lexicographically first k-mer whose counts differ, if any.
std::optional<Divergence> first_divergence(const OracleCounts& expected, const OracleCounts& actual);

uint64_t total_count(const OracleCounts& counts);

}  // namespace skc

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "skc/sequence_io.hpp"

namespace skc {

// Parameters of a generated sequencing-like corpus. With reference_length > 0
// the records are reads drawn from both strands of one random reference, so
// k-mers recur; otherwise every record is independent random sequence.
struct CorpusSpec {
    std::size_t records = 100;
    std::size_t min_length = 50;
    std::size_t max_length = 300;
    std::size_t reference_length = 0;
    double ambiguous_rate = 0.0;  // per-base chance of starting an N (or IUPAC) run
    double lowercase_rate = 0.0;  // per-base chance of starting a soft-masked run
};

std::string random_dna(std::mt19937_64& rng, std::size_t length);

std::vector<SequenceRecord> synthetic_records(const CorpusSpec& spec, uint64_t seed);

std::string to_fasta(std::span<const SequenceRecord> records, std::size_t line_width = 60);
std::string to_fastq(std::span<const SequenceRecord> records);

// Streams about `target_bases` bases of reads (drawn from a random reference of
// `reference_length` bases) to a FASTA file without holding them in memory.
void write_synthetic_fasta(const std::filesystem::path& path, uint64_t target_bases, uint64_t seed,
                           std::size_t read_length = 150, std::size_t reference_length = 1 << 24);

// Zipf(exponent) job sizes for ranks 1..n, scaled to sum to `total`.
std::vector<double> zipf_sizes(std::size_t n, double exponent, double total);

}  // namespace skc

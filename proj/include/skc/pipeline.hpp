#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "skc/counting_engine.hpp"
#include "skc/partitioning.hpp"
#include "skc/sequence_io.hpp"
#include "skc/signature_engine.hpp"

namespace skc {

enum class PartitionerKind { lpt, hash };

struct Config {
    std::size_t k = 28;
    unsigned m = 10;
    Granularity granularity = Granularity::signature;
    uint64_t bins = kDefaultBins;
    uint32_t partitions = 0;  // 0: 4 x workers
    PartitionerKind partitioner = PartitionerKind::lpt;
    double sample_fraction = 0.01;
    uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency
    CountingMode counting = CountingMode::canonical;
    uint64_t min_count = 1;
    bool sorted = false;
    OutputFormat format = OutputFormat::tsv;
    InputFormat input_format = InputFormat::automatic;
    std::filesystem::path output_dir;  // empty: no files written
    std::filesystem::path spill_dir;   // empty: shuffle stays in memory
    std::size_t table_memory_limit = 0;  // bytes per count table, 0 = unbounded

    unsigned resolved_workers() const;
    uint32_t resolved_partitions() const;
    Binning binning() const { return Binning(granularity, bins); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

std::string to_string(Granularity g);
std::string to_string(PartitionerKind p);
std::string to_string(CountingMode c);
std::string to_string(OutputFormat f);

struct StageTimings {
    double sample_seconds = 0;
    double extract_seconds = 0;
    double count_seconds = 0;
    double total_seconds = 0;
};

struct SuperkmerStats {
    uint64_t records = 0;
    uint64_t fragments = 0;
    uint64_t superkmers = 0;
    uint64_t superkmer_symbols = 0;
    uint64_t naive_symbols = 0;  // sum over fragments of (L - k + 1) * k
    uint64_t fallback_superkmers = 0;  // routed to a bin absent from the schedule

    void merge(const SuperkmerStats& o);
};

struct RunReport {
    Config config;
    uint32_t partitions = 0;
    unsigned workers = 0;

    uint64_t distinct_kmers = 0;
    uint64_t total_kmers = 0;
    uint64_t emitted_distinct = 0;  // after min_count
    uint64_t emitted_total = 0;

    std::vector<uint64_t> partition_loads;     // k-mers (with multiplicity) per partition
    std::vector<uint64_t> partition_distinct;
    std::vector<double> predicted_loads;       // empty for the hash partitioner
    uint64_t max_load = 0;
    double mean_load = 0;
    double skew = 1;

    SuperkmerStats superkmers;
    double compression_ratio = 0;
    uint64_t scheduled_bins = 0;
    bool sample_empty = false;

    StageTimings timings;
    std::vector<std::string> output_files;

    std::string to_json() const;
    std::string render_table() const;
};

// Fills the load, skew and compression fields of `report`.
void compute_metrics(RunReport& report, std::span<const uint64_t> loads, const SuperkmerStats& stats,
                     const StageTimings& timings);

// Skew of a load vector: max / mean, 1.0 when everything is zero.
double load_skew(std::span<const double> loads);

// Per-partition append-only spools of encoded superkmers. Each record is
// [signature code][symbol count][packed words...]. append() takes whole
// records and is atomic per call.
class ShuffleSpools {
public:
    ShuffleSpools(uint32_t partitions, const std::filesystem::path& spill_dir = {});
    ~ShuffleSpools();
    ShuffleSpools(const ShuffleSpools&) = delete;
    ShuffleSpools& operator=(const ShuffleSpools&) = delete;

    uint32_t partitions() const { return static_cast<uint32_t>(spools_.size()); }

    void append(uint32_t partition, std::span<const uint64_t> encoded, uint64_t records);
    uint64_t record_count(uint32_t partition) const { return spools_[partition]->records; }

    // Ends the write phase; required before visit().
    void seal();

    // visit(signature_code, words, length) for each record of the partition.
    void visit(uint32_t partition,
               const std::function<void(uint64_t, std::span<const uint64_t>, std::size_t)>& visit) const;

    // Releases a partition's storage once it has been counted.
    void release(uint32_t partition);

private:
    struct Spool {
        std::mutex mu;
        std::vector<uint64_t> data;
        std::ofstream file;
        std::filesystem::path path;
        uint64_t records = 0;
    };
    std::vector<std::unique_ptr<Spool>> spools_;
    std::filesystem::path dir_;
    bool sealed_ = false;
};

// Buffers encoded records per partition and hands them to the spools in
// batches.
class SpoolWriter {
public:
    explicit SpoolWriter(ShuffleSpools& spools, std::size_t flush_words = 1 << 15);
    ~SpoolWriter();

    // `bases` must be ACGT (either case).
    void add(uint32_t partition, uint64_t signature_code, std::string_view bases);
    void add(uint32_t partition, const SuperkmerRecord& rec);
    void flush();

private:
    void maybe_flush(uint32_t partition);

    ShuffleSpools& spools_;
    std::size_t flush_words_;
    std::vector<std::vector<uint64_t>> buffers_;
    std::vector<uint64_t> pending_;
};

// Routes the superkmers of each producer stream (one thread per stream) to
// partitions through the spools and returns the per-partition collections.
std::vector<std::vector<SuperkmerRecord>> shuffle(std::span<const std::vector<SuperkmerRecord>> producers,
                                                  const Binning& binning, const PartitionMap& map);

// Called once per partition after counting, possibly from several threads.
using PartitionObserver = std::function<void(uint32_t partition, const CountTable& table)>;

// Sampling (lpt only), extraction and shuffle, barrier, then per-partition
// counting. Writes part files, manifest.json, report.json and loads.tsv when
// config.output_dir is set.
RunReport run(const Config& config, const std::vector<std::string>& inputs, const PartitionObserver& observer = {});

// Per-partition load histogram, "partition TAB load TAB distinct" per line.
void write_load_histogram(const RunReport& report, std::ostream& out);
std::vector<uint64_t> read_load_histogram(std::istream& in);

}  // namespace skc

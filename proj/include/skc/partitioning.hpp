#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "skc/hash.hpp"
#include "skc/sequence_io.hpp"
#include "skc/signature_engine.hpp"

namespace skc {

struct BinId {
    uint64_t value = 0;
    friend auto operator<=>(const BinId&, const BinId&) = default;
};

struct BinIdHash {
    std::size_t operator()(BinId b) const { return mix64(b.value); }
};

enum class Granularity { signature, bin };

inline constexpr uint64_t kDefaultBins = 8192;

inline BinId bin_of(const Signature& sig, uint64_t bins) { return BinId{mix64(sig.code) % bins}; }
inline BinId signature_bin(const Signature& sig) { return BinId{sig.code}; }
inline uint32_t default_partition(BinId bin, uint32_t partitions) {
    return static_cast<uint32_t>(bin.value % partitions);
}

// Signature -> bin under the configured granularity.
class Binning {
public:
    Binning(Granularity granularity, uint64_t bins = kDefaultBins);

    Granularity granularity() const { return granularity_; }
    uint64_t bins() const { return bins_; }

    BinId operator()(const Signature& sig) const {
        return granularity_ == Granularity::signature ? signature_bin(sig) : bin_of(sig, bins_);
    }

private:
    Granularity granularity_;
    uint64_t bins_;
};

struct SizeEstimate {
    std::unordered_map<BinId, double, BinIdHash> sizes;
    double sample_fraction = 1.0;
    uint64_t sampled_records = 0;
    uint64_t sampled_kmers = 0;

    // Bins ordered by id, for stable output.
    std::vector<std::pair<BinId, double>> sorted() const;
};

// Record-level Bernoulli inclusion, decided by a hash of (seed, index) so the
// decision does not depend on which thread sees the record.
bool sample_record(uint64_t seed, uint64_t record_index, double fraction);

// Accumulates raw per-bin k-mer counts from sampled records. Partial
// estimators from several workers can be merged before finish().
class SizeEstimator {
public:
    SizeEstimator(std::size_t k, unsigned m, Binning binning, double fraction, uint64_t seed);

    // Returns whether the record was part of the sample.
    bool add(uint64_t record_index, const SequenceRecord& record);
    void merge(const SizeEstimator& other);

    // Throws std::runtime_error when nothing was sampled.
    SizeEstimate finish() const;

private:
    std::size_t k_;
    SuperkmerExtractor extractor_;
    Binning binning_;
    double fraction_;
    uint64_t seed_;
    std::unordered_map<BinId, uint64_t, BinIdHash> raw_;
    uint64_t records_ = 0;
    uint64_t kmers_ = 0;
};

SizeEstimate estimate_bin_sizes(std::span<const SequenceRecord> records, double fraction, std::size_t k,
                                unsigned m, Binning binning, uint64_t seed);
SizeEstimate estimate_bin_sizes(const std::vector<std::string>& paths, InputFormat format, double fraction,
                                std::size_t k, unsigned m, Binning binning, uint64_t seed);

class PartitionMap {
public:
    PartitionMap() = default;
    explicit PartitionMap(uint32_t partitions);

    uint32_t partitions() const { return partitions_; }
    std::size_t size() const { return assignment_.size(); }

    void assign(BinId bin, uint32_t partition, double estimated_size);
    bool contains(BinId bin) const { return assignment_.count(bin) != 0; }

    // Scheduled partition, or default_partition(bin, p) for unscheduled bins.
    uint32_t lookup(BinId bin) const {
        const auto it = assignment_.find(bin);
        return it != assignment_.end() ? it->second.partition : default_partition(bin, partitions_);
    }

    const std::vector<double>& predicted_loads() const { return loads_; }
    double predicted_makespan() const;

    // One "bin TAB partition TAB est_size" line per bin, sorted by bin, after
    // a "#partitions TAB p" header line.
    void dump(std::ostream& out) const;
    static PartitionMap load(std::istream& in);

    friend bool operator==(const PartitionMap& a, const PartitionMap& b);

private:
    struct Slot {
        uint32_t partition;
        double estimate;
    };
    uint32_t partitions_ = 0;
    std::unordered_map<BinId, Slot, BinIdHash> assignment_;
    std::vector<double> loads_;
};

inline uint32_t lookup_partition(const PartitionMap& map, BinId bin) { return map.lookup(bin); }

// Longest-processing-time-first greedy schedule: bins by size descending (ties
// by id), each to the currently least-loaded partition (ties by lower id).
PartitionMap lpt_schedule(const SizeEstimate& sizes, uint32_t partitions);

// Same schedule on a plain job list; returns per-machine loads.
std::vector<double> lpt_loads(std::span<const double> jobs, uint32_t machines);

// Exact minimum makespan by exhaustive search. Throws std::invalid_argument
// for more than 12 jobs.
double optimal_schedule_bruteforce(std::span<const double> jobs, uint32_t machines);

}  // namespace skc

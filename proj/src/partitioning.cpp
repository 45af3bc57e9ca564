#include "skc/partitioning.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace skc {

Binning::Binning(Granularity granularity, uint64_t bins) : granularity_(granularity), bins_(bins) {
    if (granularity_ == Granularity::bin && bins_ == 0) throw std::invalid_argument("bin count must be >= 1");
}

std::vector<std::pair<BinId, double>> SizeEstimate::sorted() const {
    std::vector<std::pair<BinId, double>> out(sizes.begin(), sizes.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

bool sample_record(uint64_t seed, uint64_t record_index, double fraction) {
    if (fraction >= 1.0) return true;
    const uint64_t h = mix64(seed ^ mix64(record_index + 0x9E3779B97F4A7C15ULL));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return u < fraction;
}

SizeEstimator::SizeEstimator(std::size_t k, unsigned m, Binning binning, double fraction, uint64_t seed)
    : k_(k), extractor_(k, m), binning_(binning), fraction_(fraction), seed_(seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("sample fraction must be in (0, 1]");
}

bool SizeEstimator::add(uint64_t record_index, const SequenceRecord& record) {
    if (!sample_record(seed_, record_index, fraction_)) return false;
    ++records_;
    for_each_fragment(record.bases, k_, [&](std::string_view frag, std::size_t) {
        extractor_.scan(frag, [&](const SuperkmerSpan& s) {
            const uint64_t n = s.length - k_ + 1;
            raw_[binning_(s.signature)] += n;
            kmers_ += n;
        });
    });
    return true;
}

void SizeEstimator::merge(const SizeEstimator& other) {
    for (const auto& [bin, n] : other.raw_) raw_[bin] += n;
    records_ += other.records_;
    kmers_ += other.kmers_;
}

SizeEstimate SizeEstimator::finish() const {
    if (kmers_ == 0) {
        throw std::runtime_error("size estimation sample is empty (" + std::to_string(records_) +
                                 " records sampled, no k-mers); use a larger --sample-fraction");
    }
    SizeEstimate est;
    est.sample_fraction = fraction_;
    est.sampled_records = records_;
    est.sampled_kmers = kmers_;
    est.sizes.reserve(raw_.size());
    for (const auto& [bin, n] : raw_) est.sizes.emplace(bin, static_cast<double>(n) / fraction_);
    return est;
}

SizeEstimate estimate_bin_sizes(std::span<const SequenceRecord> records, double fraction, std::size_t k,
                                unsigned m, Binning binning, uint64_t seed) {
    SizeEstimator estimator(k, m, binning, fraction, seed);
    for (std::size_t i = 0; i < records.size(); ++i) estimator.add(i, records[i]);
    return estimator.finish();
}

SizeEstimate estimate_bin_sizes(const std::vector<std::string>& paths, InputFormat format, double fraction,
                                std::size_t k, unsigned m, Binning binning, uint64_t seed) {
    SizeEstimator estimator(k, m, binning, fraction, seed);
    for_each_record(paths, format, [&](uint64_t index, SequenceRecord&& rec) { estimator.add(index, rec); });
    return estimator.finish();
}

PartitionMap::PartitionMap(uint32_t partitions) : partitions_(partitions), loads_(partitions, 0.0) {
    if (partitions == 0) throw std::invalid_argument("partition count must be >= 1");
}

void PartitionMap::assign(BinId bin, uint32_t partition, double estimated_size) {
    if (partition >= partitions_) throw std::out_of_range("partition id out of range");
    const auto [it, inserted] = assignment_.try_emplace(bin, Slot{partition, estimated_size});
    if (!inserted) {
        loads_[it->second.partition] -= it->second.estimate;
        it->second = Slot{partition, estimated_size};
    }
    loads_[partition] += estimated_size;
}

double PartitionMap::predicted_makespan() const {
    return loads_.empty() ? 0.0 : *std::max_element(loads_.begin(), loads_.end());
}

void PartitionMap::dump(std::ostream& out) const {
    std::vector<std::pair<BinId, Slot>> rows(assignment_.begin(), assignment_.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out << "#partitions\t" << partitions_ << '\n';
    char buf[64];
    for (const auto& [bin, slot] : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", slot.estimate);
        out << bin.value << '\t' << slot.partition << '\t' << buf << '\n';
    }
    if (!out) throw std::runtime_error("failed to write partition map");
}

PartitionMap PartitionMap::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("#partitions\t", 0) != 0) {
        throw std::runtime_error("partition map: missing '#partitions' header");
    }
    PartitionMap map(static_cast<uint32_t>(std::stoul(line.substr(12))));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        uint64_t bin = 0;
        uint32_t part = 0;
        double est = 0;
        if (!(fields >> bin >> part >> est)) {
            throw std::runtime_error("partition map: malformed line " + std::to_string(lineno));
        }
        map.assign(BinId{bin}, part, est);
    }
    return map;
}

bool operator==(const PartitionMap& a, const PartitionMap& b) {
    if (a.partitions_ != b.partitions_ || a.assignment_.size() != b.assignment_.size()) return false;
    for (const auto& [bin, slot] : a.assignment_) {
        const auto it = b.assignment_.find(bin);
        if (it == b.assignment_.end() || it->second.partition != slot.partition ||
            it->second.estimate != slot.estimate) {
            return false;
        }
    }
    return true;
}

namespace {

// Min-heap keyed by (load, partition id).
class LeastLoaded {
public:
    explicit LeastLoaded(uint32_t machines) {
        for (uint32_t i = 0; i < machines; ++i) heap_.push({0.0, i});
    }
    uint32_t take(double job) {
        auto [load, id] = heap_.top();
        heap_.pop();
        heap_.push({load + job, id});
        return id;
    }

private:
    using Entry = std::pair<double, uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

}  // namespace

PartitionMap lpt_schedule(const SizeEstimate& sizes, uint32_t partitions) {
    if (sizes.sizes.empty()) throw std::invalid_argument("lpt_schedule: no bins to schedule");
    PartitionMap map(partitions);
    std::vector<std::pair<BinId, double>> jobs(sizes.sizes.begin(), sizes.sizes.end());
    std::sort(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    LeastLoaded machines(partitions);
    for (const auto& [bin, size] : jobs) map.assign(bin, machines.take(size), size);
    return map;
}

std::vector<double> lpt_loads(std::span<const double> jobs, uint32_t machines) {
    if (machines == 0) throw std::invalid_argument("machine count must be >= 1");
    std::vector<double> sorted(jobs.begin(), jobs.end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> loads(machines, 0.0);
    LeastLoaded heap(machines);
    for (double job : sorted) loads[heap.take(job)] += job;
    return loads;
}

namespace {

void search(const std::vector<double>& jobs, std::size_t next, std::vector<double>& loads, double current_max,
            double& best) {
    if (next == jobs.size()) {
        best = std::min(best, current_max);
        return;
    }
    const double job = jobs[next];
    for (std::size_t j = 0; j < loads.size(); ++j) {
        // machines with equal load are interchangeable
        bool seen = false;
        for (std::size_t i = 0; i < j && !seen; ++i) seen = loads[i] == loads[j];
        if (seen) continue;
        const double load = loads[j] + job;
        if (load >= best) continue;
        const double saved = loads[j];
        loads[j] = load;
        search(jobs, next + 1, loads, std::max(current_max, load), best);
        loads[j] = saved;
    }
}

}  // namespace

double optimal_schedule_bruteforce(std::span<const double> jobs, uint32_t machines) {
    if (machines == 0) throw std::invalid_argument("machine count must be >= 1");
    if (jobs.size() > 12) throw std::invalid_argument("optimal_schedule_bruteforce: at most 12 jobs");
    if (jobs.empty()) return 0.0;
    std::vector<double> sorted(jobs.begin(), jobs.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    std::vector<double> loads(machines, 0.0);
    double best = std::numeric_limits<double>::infinity();
    search(sorted, 0, loads, 0.0, best);
    return best;
}

}  // namespace skc

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "skc/pipeline.hpp"

namespace skc {

double load_skew(std::span<const double> loads) {
    if (loads.empty()) return 1.0;
    const double total = std::accumulate(loads.begin(), loads.end(), 0.0);
    if (total <= 0.0) return 1.0;
    const double mean = total / static_cast<double>(loads.size());
    return *std::max_element(loads.begin(), loads.end()) / mean;
}

void compute_metrics(RunReport& report, std::span<const uint64_t> loads, const SuperkmerStats& stats,
                     const StageTimings& timings) {
    report.partition_loads.assign(loads.begin(), loads.end());
    report.total_kmers = std::accumulate(loads.begin(), loads.end(), uint64_t{0});
    report.max_load = loads.empty() ? 0 : *std::max_element(loads.begin(), loads.end());
    report.mean_load = loads.empty() ? 0.0 : static_cast<double>(report.total_kmers) / static_cast<double>(loads.size());
    std::vector<double> as_double(loads.begin(), loads.end());
    report.skew = load_skew(as_double);
    report.superkmers = stats;
    report.compression_ratio = stats.naive_symbols == 0 ? 0.0
                                                        : static_cast<double>(stats.superkmer_symbols) /
                                                              static_cast<double>(stats.naive_symbols);
    report.timings = timings;
}

std::string RunReport::to_json() const {
    nlohmann::ordered_json j;
    j["config"] = {
        {"k", config.k},
        {"m", config.m},
        {"granularity", to_string(config.granularity)},
        {"bins", config.bins},
        {"partitions", partitions},
        {"partitioner", to_string(config.partitioner)},
        {"sample_fraction", config.sample_fraction},
        {"seed", config.seed},
        {"workers", workers},
        {"counting", to_string(config.counting)},
        {"min_count", config.min_count},
        {"format", to_string(config.format)},
    };
    j["distinct_kmers"] = distinct_kmers;
    j["total_kmers"] = total_kmers;
    j["emitted_distinct"] = emitted_distinct;
    j["emitted_total"] = emitted_total;
    j["partition_loads"] = partition_loads;
    j["partition_distinct"] = partition_distinct;
    j["predicted_loads"] = predicted_loads;
    j["max_load"] = max_load;
    j["mean_load"] = mean_load;
    j["skew"] = skew;
    j["records"] = superkmers.records;
    j["fragments"] = superkmers.fragments;
    j["superkmers"] = superkmers.superkmers;
    j["superkmer_symbols"] = superkmers.superkmer_symbols;
    j["naive_symbols"] = superkmers.naive_symbols;
    j["compression_ratio"] = compression_ratio;
    j["scheduled_bins"] = scheduled_bins;
    j["fallback_superkmers"] = superkmers.fallback_superkmers;
    j["sample_empty"] = sample_empty;
    j["timings"] = {
        {"sample_seconds", timings.sample_seconds},
        {"extract_seconds", timings.extract_seconds},
        {"count_seconds", timings.count_seconds},
        {"total_seconds", timings.total_seconds},
    };
    return j.dump(2);
}

std::string RunReport::render_table() const {
    std::ostringstream out;
    char line[160];
    auto row = [&](const char* name, const std::string& value) {
        std::snprintf(line, sizeof line, "  %-22s %s\n", name, value.c_str());
        out << line;
    };
    auto fmt = [](const char* f, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, v);
        return std::string(buf);
    };
    out << "run summary\n";
    row("k / m", std::to_string(config.k) + " / " + std::to_string(config.m));
    row("binning", config.granularity == Granularity::signature ? "signature"
                                                                 : "bin (B=" + std::to_string(config.bins) + ")");
    row("partitioner", to_string(config.partitioner) + (sample_empty ? " (empty sample, hash fallback)" : ""));
    row("partitions / workers", std::to_string(partitions) + " / " + std::to_string(workers));
    row("distinct k-mers", std::to_string(distinct_kmers));
    row("total k-mers", std::to_string(total_kmers));
    row("superkmers", std::to_string(superkmers.superkmers));
    row("compression ratio", fmt("%.4f", compression_ratio));
    row("max / mean load", std::to_string(max_load) + " / " + fmt("%.1f", mean_load));
    row("skew (max/mean)", fmt("%.4f", skew));
    row("sample time (s)", fmt("%.3f", timings.sample_seconds));
    row("extract time (s)", fmt("%.3f", timings.extract_seconds));
    row("count time (s)", fmt("%.3f", timings.count_seconds));
    row("total time (s)", fmt("%.3f", timings.total_seconds));
    out << "partition loads\n";
    for (std::size_t p = 0; p < partition_loads.size(); ++p) {
        const double share = total_kmers == 0 ? 0.0
                                              : static_cast<double>(partition_loads[p]) / static_cast<double>(total_kmers);
        const int bar = max_load == 0 ? 0
                                      : static_cast<int>(50.0 * static_cast<double>(partition_loads[p]) /
                                                             static_cast<double>(max_load) +
                                                         0.5);
        std::snprintf(line, sizeof line, "  %5zu %12llu %6.2f%% ", p,
                      static_cast<unsigned long long>(partition_loads[p]), share * 100.0);
        out << line << std::string(static_cast<std::size_t>(bar), '#') << '\n';
    }
    return out.str();
}

void write_load_histogram(const RunReport& report, std::ostream& out) {
    out << "partition\tload\tdistinct\n";
    for (std::size_t p = 0; p < report.partition_loads.size(); ++p) {
        out << p << '\t' << report.partition_loads[p] << '\t'
            << (p < report.partition_distinct.size() ? report.partition_distinct[p] : 0) << '\n';
    }
}

std::vector<uint64_t> read_load_histogram(std::istream& in) {
    std::string line;
    std::vector<uint64_t> loads;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::size_t p = 0;
        uint64_t load = 0;
        if (!(fields >> p >> load)) throw std::runtime_error("malformed load histogram line: " + line);
        if (p != loads.size()) throw std::runtime_error("load histogram partitions out of order");
        loads.push_back(load);
    }
    return loads;
}

}  // namespace skc

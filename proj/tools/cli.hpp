#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skc/pipeline.hpp"

namespace skc::cli {

enum class Command { count, estimate, bench, verify, report };

enum class ExitCode : int { ok = 0, failure = 1, usage = 2 };

struct BenchOptions {
    std::string distribution = "zipf";  // zipf | uniform
    double exponent = 1.0;
    std::size_t jobs = 10000;
    uint32_t partitions = 32;
    double total = 1e8;
    uint64_t seed = 1;
    double throughput_mb = 0;  // 0: skip the pipeline throughput run
    unsigned workers = 0;
    std::filesystem::path output_dir;
    std::filesystem::path history;  // appended throughput log
};

struct Invocation {
    Command command = Command::count;
    Config config;
    std::vector<std::string> inputs;
    std::filesystem::path against;   // verify: compare an existing output directory
    std::filesystem::path map_path;  // estimate: write the partition map here
    std::filesystem::path report_dir;
    bool json = false;
    BenchOptions bench;
};

// Bad flags, values or combinations. The message names the offending flag.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --help was given; what() holds the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Invocation parse_args(int argc, const char* const* argv);

int cmd_count(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_estimate(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream& err);
int cmd_report(const Invocation& inv, std::ostream& out, std::ostream& err);

// Parses and dispatches; maps errors onto exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

inline constexpr uint64_t kVerifyInputLimit = 100ull << 20;

// Max load, skew and ratio to the trivial lower bound max(total/p, largest job)
// of one partitioner on one job set.
struct SchemeLoads {
    std::vector<double> loads;
    double max_load = 0;
    double skew = 1;
    double bound_ratio = 1;
};

struct PartitionerComparison {
    SchemeLoads hash;
    SchemeLoads lpt;
    double total = 0;
    double lower_bound = 0;
};

// Job i is bin id i; the hash scheme puts it on i mod p.
PartitionerComparison compare_partitioners(std::span<const double> sizes, uint32_t partitions);

// Bench job sizes: Zipf or uniform, shuffled onto bin ids by `seed` so the
// largest jobs do not sit on consecutive ids.
std::vector<double> bench_sizes(const BenchOptions& opts);

}  // namespace skc::cli

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skc/oracle.hpp"
#include "skc/synthetic.hpp"

namespace skc::cli {

namespace {

void add_input_options(CLI::App* sub, Invocation& inv) {
    sub->add_option("inputs", inv.inputs, "FASTA/FASTQ files, optionally gzipped; '-' reads standard input")
        ->required();
    sub->add_option("--input-format", inv.config.input_format, "input format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, InputFormat>{
                {"auto", InputFormat::automatic}, {"fasta", InputFormat::fasta}, {"fastq", InputFormat::fastq}},
            CLI::ignore_case))
        ->option_text("{auto,fasta,fastq} [auto]");
}

struct ModeFlags {
    CLI::Option* bins = nullptr;
    CLI::Option* forward_only = nullptr;
};

ModeFlags add_config_options(CLI::App* sub, Invocation& inv) {
    Config& c = inv.config;
    ModeFlags flags;
    sub->add_option("-k,--kmer-length", c.k, "k-mer length")->required()->check(CLI::Range(1, 512));
    sub->add_option("-m,--signature-length", c.m, "signature (minimizer) length")->check(CLI::Range(3, 31));
    flags.bins = sub->add_option("--bins", c.bins, "hash signatures into this many bins (bin granularity)")
                     ->check(CLI::PositiveNumber);
    auto* sig = sub->add_flag("--signature-granularity", "one bin per signature (the default binning)");
    flags.bins->excludes(sig);
    sub->add_option("-p,--partitions", c.partitions, "number of partitions")
        ->check(CLI::PositiveNumber)
        ->default_str("4 x workers");
    sub->add_option("--partitioner", c.partitioner, "bin to partition assignment")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, PartitionerKind>{{"lpt", PartitionerKind::lpt}, {"hash", PartitionerKind::hash}},
            CLI::ignore_case))
        ->option_text("{lpt,hash} [lpt]");
    sub->add_option("--sample-fraction", c.sample_fraction, "fraction of records sampled for bin size estimates")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--seed", c.seed, "sampling seed");
    sub->add_option("--workers", c.workers, "worker threads")
        ->check(CLI::PositiveNumber)
        ->default_str("hardware threads");
    flags.forward_only = sub->add_flag("--forward-only", "count forward k-mers instead of canonical ones");
    sub->add_option("--min-count", c.min_count, "omit k-mers seen fewer times")->check(CLI::PositiveNumber);
    sub->add_flag("--sorted", c.sorted, "sort each partition file by k-mer");
    sub->add_option("--format", c.format, "output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, OutputFormat>{{"tsv", OutputFormat::tsv}, {"bin", OutputFormat::binary}},
            CLI::ignore_case))
        ->option_text("{tsv,bin} [tsv]");
    sub->add_option("--spill-dir", c.spill_dir, "spill shuffle buffers to files under this directory")
        ->envname("SKC_SPILL_DIR")
        ->default_str("in memory");
    sub->add_option("--table-memory", c.table_memory_limit,
                    "per-partition count table budget, e.g. 512MB (fails with advice to raise -p)")
        ->transform(CLI::AsSizeValue(false))
        ->default_str("unlimited");
    return flags;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void check_inputs(const Invocation& inv) {
    for (const auto& in : inv.inputs) {
        if (in != "-" && !std::filesystem::exists(in)) throw UsageError("inputs: file not found: " + in);
    }
}

OracleCounts filtered(OracleCounts counts, uint64_t min_count) {
    if (min_count > 1) std::erase_if(counts, [&](const auto& kv) { return kv.second < min_count; });
    return counts;
}

OracleCounts read_output_dir(const std::filesystem::path& dir) {
    OracleCounts out;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        const auto ext = entry.path().extension();
        if (name.rfind("part-", 0) == 0 && (ext == ".tsv" || ext == ".kbin")) files.push_back(entry.path());
    }
    if (files.empty()) throw std::runtime_error("no part-* files in '" + dir.string() + "'");
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        for (auto& [kmer, n] : read_counts(f)) {
            if (!out.emplace(kmer, n).second) {
                throw std::runtime_error("k-mer " + kmer + " appears in more than one partition file (" +
                                         f.filename().string() + ")");
            }
        }
    }
    return out;
}

void write_bench_files(const BenchOptions& opts, const PartitionerComparison& cmp) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.output_dir);
    {
        std::ofstream tsv(opts.output_dir / "bench_loads.tsv");
        tsv << "partition\thash_load\tlpt_load\n";
        for (std::size_t p = 0; p < cmp.hash.loads.size(); ++p)
            tsv << p << '\t' << fmt("%.6g", cmp.hash.loads[p]) << '\t' << fmt("%.6g", cmp.lpt.loads[p]) << '\n';
    }
    {
        std::ofstream tsv(opts.output_dir / "bench_sorted.tsv");
        auto h = cmp.hash.loads, l = cmp.lpt.loads;
        std::sort(h.rbegin(), h.rend());
        std::sort(l.rbegin(), l.rend());
        tsv << "rank\thash_load\tlpt_load\n";
        for (std::size_t p = 0; p < h.size(); ++p)
            tsv << p << '\t' << fmt("%.6g", h[p]) << '\t' << fmt("%.6g", l[p]) << '\n';
    }
    {
        std::ofstream gp(opts.output_dir / "bench.gp");
        gp << "set terminal pngcairo size 1000,500\n"
           << "set output 'bench.png'\n"
           << "set multiplot layout 1,2\n"
           << "set style data histograms\nset style fill solid 0.8\n"
           << "set xlabel 'partition'\nset ylabel 'k-mers'\n"
           << "set title 'hash partitioner'\n"
           << "plot 'bench_loads.tsv' using 2 title columnhead\n"
           << "set title 'LPT partitioner'\n"
           << "plot 'bench_loads.tsv' using 3 title columnhead\n"
           << "unset multiplot\n";
    }
    {
        nlohmann::ordered_json j;
        j["distribution"] = opts.distribution;
        j["exponent"] = opts.exponent;
        j["jobs"] = opts.jobs;
        j["partitions"] = opts.partitions;
        j["total"] = cmp.total;
        j["lower_bound"] = cmp.lower_bound;
        j["hash"] = {{"max_load", cmp.hash.max_load}, {"skew", cmp.hash.skew}, {"bound_ratio", cmp.hash.bound_ratio}};
        j["lpt"] = {{"max_load", cmp.lpt.max_load}, {"skew", cmp.lpt.skew}, {"bound_ratio", cmp.lpt.bound_ratio}};
        std::ofstream(opts.output_dir / "bench.json") << j.dump(2) << '\n';
    }
}

int bench_throughput(const Invocation& inv, std::ostream& out) {
    namespace fs = std::filesystem;
    const auto& opts = inv.bench;
    const fs::path dir = fs::temp_directory_path() / ("skc-bench-" + std::to_string(::time(nullptr)) + "-" +
                                                      std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    struct Cleanup {
        fs::path dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{dir};

    const auto input = dir / "synthetic.fa";
    // 150-base reads plus a short header line take about 160 bytes per read
    const auto bases = static_cast<uint64_t>(opts.throughput_mb * 1e6 * 150.0 / 160.0);
    write_synthetic_fasta(input, bases, opts.seed);
    const double mb = static_cast<double>(fs::file_size(input)) / 1e6;

    Config c = inv.config;
    c.workers = opts.workers;
    c.seed = opts.seed;
    const RunReport r = run(c, {input.string()});
    const double stages = r.timings.extract_seconds + r.timings.count_seconds;
    const double rate = stages > 0 ? mb / stages : 0.0;

    out << "\nthroughput (" << fmt("%.1f", mb) << " MB synthetic FASTA, k=" << c.k << ", m=" << c.m
        << ", workers=" << r.workers << ", partitions=" << r.partitions << ")\n";
    out << "  sample    " << fmt("%8.3f", r.timings.sample_seconds) << " s\n";
    out << "  stage 1   " << fmt("%8.3f", r.timings.extract_seconds) << " s\n";
    out << "  stage 2   " << fmt("%8.3f", r.timings.count_seconds) << " s\n";
    out << "  total     " << fmt("%8.3f", r.timings.total_seconds) << " s\n";
    out << "  stage 1+2 " << fmt("%8.2f", rate) << " MB/s\n";
    out << "  k-mers    " << r.total_kmers << " total, " << r.distinct_kmers << " distinct, skew "
        << fmt("%.4f", r.skew) << '\n';

    if (!opts.history.empty()) {
        const bool fresh = !fs::exists(opts.history);
        std::ofstream hist(opts.history, std::ios::app);
        if (fresh) hist << "unix_time\tmb\tk\tm\tworkers\tpartitions\tsample_s\textract_s\tcount_s\tmb_per_s\n";
        hist << ::time(nullptr) << '\t' << fmt("%.2f", mb) << '\t' << c.k << '\t' << c.m << '\t' << r.workers << '\t'
             << r.partitions << '\t' << fmt("%.4f", r.timings.sample_seconds) << '\t'
             << fmt("%.4f", r.timings.extract_seconds) << '\t' << fmt("%.4f", r.timings.count_seconds) << '\t'
             << fmt("%.3f", rate) << '\n';
        if (!hist) throw std::runtime_error("cannot append to '" + opts.history.string() + "'");
    }
    return 0;
}

}  // namespace

Invocation parse_args(int argc, const char* const* argv) {
    Invocation inv;
    CLI::App app{"Exact k-mer counting with signature-based superkmer partitioning.", "skc"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    auto* count = app.add_subcommand("count", "count k-mers into one output file per partition");
    add_input_options(count, inv);
    const auto count_flags = add_config_options(count, inv);
    count->add_option("-o,--output", inv.config.output_dir, "output directory")->required();
    count->add_flag("--json", inv.json, "print the run report as JSON instead of a table");

    auto* estimate = app.add_subcommand("estimate", "sample bin sizes and preview the partition schedule");
    add_input_options(estimate, inv);
    const auto estimate_flags = add_config_options(estimate, inv);
    estimate->add_option("--map", inv.map_path, "write the partition map (bin, partition, estimate) here");
    estimate->add_flag("--json", inv.json, "print JSON instead of a table");

    auto* verify = app.add_subcommand("verify", "compare pipeline counts with a brute-force reference counter");
    add_input_options(verify, inv);
    const auto verify_flags = add_config_options(verify, inv);
    verify->add_option("-o,--output", inv.config.output_dir, "also keep the pipeline output here");
    verify->add_option("--against", inv.against, "check an existing output directory instead of running")
        ->check(CLI::ExistingDirectory);

    auto* bench = app.add_subcommand("bench", "compare hash and LPT partitioners on synthetic bin sizes");
    auto& b = inv.bench;
    bench->add_option("--distribution", b.distribution, "bin size distribution")
        ->check(CLI::IsMember({"zipf", "uniform"}));
    bench->add_option("--exponent", b.exponent, "Zipf exponent")->check(CLI::NonNegativeNumber);
    bench->add_option("--jobs", b.jobs, "number of bins")->check(CLI::PositiveNumber);
    bench->add_option("-p,--partitions", b.partitions, "number of partitions")->check(CLI::PositiveNumber);
    bench->add_option("--total", b.total, "total k-mers over all bins")->check(CLI::PositiveNumber);
    bench->add_option("--seed", b.seed, "seed for bin placement and synthetic input");
    bench->add_option("-o,--output", b.output_dir, "write plot-ready series and a gnuplot script here");
    bench->add_option("--throughput-mb", b.throughput_mb,
                      "also time the pipeline on a synthetic FASTA of this many MB (0 skips)")
        ->check(CLI::NonNegativeNumber);
    bench->add_option("--history", b.history, "append the throughput result to this TSV file");
    bench->add_option("-k,--kmer-length", inv.config.k, "k for the throughput run")->check(CLI::Range(1, 512));
    bench->add_option("-m,--signature-length", inv.config.m, "m for the throughput run")->check(CLI::Range(3, 31));
    bench->add_option("--workers", b.workers, "worker threads for the throughput run")
        ->default_str("hardware threads");

    auto* report = app.add_subcommand("report", "render report.json and loads.tsv from an output directory");
    report->add_option("dir", inv.report_dir, "output directory of a count run")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_flag("--json", inv.json, "print the stored JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        for (auto* sub : app.get_subcommands()) throw HelpRequested(sub->help());
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const ModeFlags* flags = nullptr;
    if (count->parsed()) {
        inv.command = Command::count;
        flags = &count_flags;
    } else if (estimate->parsed()) {
        inv.command = Command::estimate;
        flags = &estimate_flags;
    } else if (verify->parsed()) {
        inv.command = Command::verify;
        flags = &verify_flags;
    } else if (bench->parsed()) {
        inv.command = Command::bench;
    } else {
        inv.command = Command::report;
    }

    if (flags) {
        inv.config.granularity = flags->bins->count() ? Granularity::bin : Granularity::signature;
        if (flags->forward_only->count()) inv.config.counting = CountingMode::forward;
        if (inv.config.sample_fraction <= 0.0) throw UsageError("--sample-fraction: must be in (0, 1]");
        if (inv.config.m > inv.config.k) {
            throw UsageError("-m: signature length " + std::to_string(inv.config.m) + " exceeds k = " +
                             std::to_string(inv.config.k));
        }
        try {
            inv.config.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        check_inputs(inv);
        if (inv.command == Command::verify && std::count(inv.inputs.begin(), inv.inputs.end(), "-")) {
            throw UsageError("inputs: verify reads its inputs twice and needs files, not '-'");
        }
    }
    if (inv.command == Command::bench) {
        if (inv.config.m > inv.config.k) throw UsageError("-m: signature length exceeds k");
        if (!b.history.empty() && b.throughput_mb == 0) throw UsageError("--history: needs --throughput-mb");
    }
    return inv;
}

int cmd_count(const Invocation& inv, std::ostream& out, std::ostream&) {
    const RunReport r = run(inv.config, inv.inputs);
    if (inv.json) {
        out << r.to_json() << '\n';
    } else {
        out << r.render_table();
        out << "wrote " << r.output_files.size() << " partition files, manifest.json, report.json and loads.tsv to "
            << inv.config.output_dir.string() << '\n';
    }
    return 0;
}

int cmd_estimate(const Invocation& inv, std::ostream& out, std::ostream&) {
    const Config& c = inv.config;
    const auto t0 = std::chrono::steady_clock::now();
    const SizeEstimate est =
        estimate_bin_sizes(inv.inputs, c.input_format, c.sample_fraction, c.k, c.m, c.binning(), c.seed);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const uint32_t p = c.resolved_partitions();
    const PartitionMap map = lpt_schedule(est, p);

    std::vector<double> hash_loads(p, 0.0);
    double total = 0, largest = 0;
    for (const auto& [bin, size] : est.sizes) {
        hash_loads[default_partition(bin, p)] += size;
        total += size;
        largest = std::max(largest, size);
    }
    const auto& lpt = map.predicted_loads();

    if (!inv.map_path.empty()) {
        std::ofstream f(inv.map_path);
        map.dump(f);
        if (!f) throw std::runtime_error("cannot write partition map '" + inv.map_path.string() + "'");
    }

    if (inv.json) {
        nlohmann::ordered_json j;
        j["sample_fraction"] = est.sample_fraction;
        j["sampled_records"] = est.sampled_records;
        j["sampled_kmers"] = est.sampled_kmers;
        j["bins"] = est.sizes.size();
        j["estimated_total"] = total;
        j["largest_bin"] = largest;
        j["partitions"] = p;
        j["lpt_loads"] = lpt;
        j["hash_loads"] = hash_loads;
        j["lpt_skew"] = load_skew(lpt);
        j["hash_skew"] = load_skew(hash_loads);
        j["seconds"] = seconds;
        out << j.dump(2) << '\n';
        return 0;
    }
    out << "sample: " << est.sampled_records << " records, " << est.sampled_kmers << " k-mers ("
        << fmt("%.4g", est.sample_fraction * 100) << "%), " << est.sizes.size() << " bins, " << fmt("%.2f", seconds)
        << " s\n";
    out << "estimated total " << fmt("%.0f", total) << " k-mers, largest bin " << fmt("%.0f", largest) << " ("
        << fmt("%.2f", total > 0 ? 100 * largest / total : 0) << "%)\n";
    out << "predicted skew over " << p << " partitions: lpt " << fmt("%.4f", load_skew(lpt)) << ", hash "
        << fmt("%.4f", load_skew(hash_loads)) << '\n';
    out << "partition      lpt_load     hash_load\n";
    for (uint32_t i = 0; i < p; ++i) {
        out << std::setw(9) << i << ' ' << std::setw(13) << fmt("%.0f", lpt[i]) << ' ' << std::setw(13)
            << fmt("%.0f", hash_loads[i]) << '\n';
    }
    return 0;
}

int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream&) {
    const Config& c = inv.config;
    uint64_t bytes = 0;
    for (const auto& in : inv.inputs) bytes += std::filesystem::file_size(in);
    if (bytes > kVerifyInputLimit) {
        throw std::runtime_error("verify: inputs total " + std::to_string(bytes) +
                                 " bytes, over the 100 MB limit of the reference counter");
    }

    const OracleCounts expected = filtered(oracle_count_files(inv.inputs, c.input_format, c.k, c.counting), c.min_count);
    OracleCounts actual;
    if (!inv.against.empty()) {
        actual = read_output_dir(inv.against);
    } else {
        std::mutex mu;
        run(c, inv.inputs, [&](uint32_t, const CountTable& table) {
            OracleCounts part;
            table.for_each([&](std::span<const uint64_t> key, uint64_t n) {
                if (n >= c.min_count) part.emplace(decode(PackedSeq::from_words({key.begin(), key.end()}, c.k)), n);
            });
            std::lock_guard lock(mu);
            actual.merge(part);
        });
    }

    if (const auto d = first_divergence(expected, actual)) {
        out << "DIVERGENCE: " << d->kmer << " expected " << d->expected << " got " << d->actual << '\n';
        return static_cast<int>(ExitCode::failure);
    }
    out << "OK: " << expected.size() << " distinct, " << total_count(expected) << " total\n";
    return 0;
}

std::vector<double> bench_sizes(const BenchOptions& opts) {
    std::vector<double> sizes = opts.distribution == "uniform"
                                    ? std::vector<double>(opts.jobs, opts.total / static_cast<double>(opts.jobs))
                                    : zipf_sizes(opts.jobs, opts.exponent, opts.total);
    std::vector<std::size_t> perm(opts.jobs);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(opts.seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> by_bin(opts.jobs);
    for (std::size_t i = 0; i < opts.jobs; ++i) by_bin[perm[i]] = sizes[i];
    return by_bin;
}

PartitionerComparison compare_partitioners(std::span<const double> sizes, uint32_t partitions) {
    PartitionerComparison cmp;
    cmp.hash.loads.assign(partitions, 0.0);
    double largest = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        cmp.hash.loads[default_partition(BinId{i}, partitions)] += sizes[i];
        cmp.total += sizes[i];
        largest = std::max(largest, sizes[i]);
    }
    cmp.lpt.loads = lpt_loads(sizes, partitions);
    cmp.lower_bound = std::max(cmp.total / partitions, largest);
    for (SchemeLoads* s : {&cmp.hash, &cmp.lpt}) {
        s->max_load = s->loads.empty() ? 0 : *std::max_element(s->loads.begin(), s->loads.end());
        s->skew = load_skew(s->loads);
        s->bound_ratio = cmp.lower_bound > 0 ? s->max_load / cmp.lower_bound : 1.0;
    }
    return cmp;
}

int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream&) {
    const auto& opts = inv.bench;
    const auto sizes = bench_sizes(opts);
    const auto cmp = compare_partitioners(sizes, opts.partitions);

    out << "bin sizes: " << opts.distribution;
    if (opts.distribution == "zipf") out << '(' << fmt("%g", opts.exponent) << ')';
    out << ", " << opts.jobs << " bins, total " << fmt("%.0f", cmp.total) << ", p=" << opts.partitions << '\n';
    out << "lower bound max(total/p, largest bin) = " << fmt("%.1f", cmp.lower_bound) << '\n';
    out << "scheme      max_load      skew   max/bound\n";
    for (const auto& [name, s] : {std::pair{"hash", &cmp.hash}, std::pair{"lpt", &cmp.lpt}}) {
        out << std::left << std::setw(6) << name << std::right << std::setw(14) << fmt("%.1f", s->max_load)
            << std::setw(10) << fmt("%.4f", s->skew) << std::setw(12) << fmt("%.4f", s->bound_ratio) << '\n';
    }
    const double gain = cmp.lpt.max_load > 0 ? cmp.hash.max_load / cmp.lpt.max_load : 1.0;
    out << "hash/lpt makespan ratio " << fmt("%.4f", gain) << '\n';

    if (!opts.output_dir.empty()) {
        write_bench_files(opts, cmp);
        out << "wrote bench_loads.tsv, bench_sorted.tsv, bench.json and bench.gp to " << opts.output_dir.string()
            << '\n';
    }
    if (opts.throughput_mb > 0) return bench_throughput(inv, out);
    return 0;
}

int cmd_report(const Invocation& inv, std::ostream& out, std::ostream&) {
    const auto path = inv.report_dir / "report.json";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    const auto j = nlohmann::ordered_json::parse(in);
    if (inv.json) {
        out << j.dump(2) << '\n';
        return 0;
    }
    const auto& cfg = j.at("config");
    auto row = [&](const char* name, const std::string& value) {
        out << "  " << std::left << std::setw(22) << name << std::right << ' ' << value << '\n';
    };
    out << "run summary\n";
    row("k / m", std::to_string(cfg.at("k").get<uint64_t>()) + " / " + std::to_string(cfg.at("m").get<uint64_t>()));
    row("binning", cfg.at("granularity").get<std::string>());
    row("partitioner", cfg.at("partitioner").get<std::string>());
    row("partitions / workers", std::to_string(cfg.at("partitions").get<uint64_t>()) + " / " +
                                    std::to_string(cfg.at("workers").get<uint64_t>()));
    row("distinct k-mers", std::to_string(j.at("distinct_kmers").get<uint64_t>()));
    row("total k-mers", std::to_string(j.at("total_kmers").get<uint64_t>()));
    row("compression ratio", fmt("%.4f", j.at("compression_ratio").get<double>()));
    row("skew (max/mean)", fmt("%.4f", j.at("skew").get<double>()));
    row("total time (s)", fmt("%.3f", j.at("timings").at("total_seconds").get<double>()));

    std::vector<uint64_t> loads;
    if (std::ifstream hist(inv.report_dir / "loads.tsv"); hist) {
        loads = read_load_histogram(hist);
    } else {
        loads = j.at("partition_loads").get<std::vector<uint64_t>>();
    }
    const uint64_t max = loads.empty() ? 0 : *std::max_element(loads.begin(), loads.end());
    out << "partition loads\n";
    for (std::size_t p = 0; p < loads.size(); ++p) {
        const int bar = max == 0 ? 0 : static_cast<int>(50.0 * static_cast<double>(loads[p]) / static_cast<double>(max) + 0.5);
        out << std::setw(7) << p << std::setw(14) << loads[p] << ' ' << std::string(static_cast<std::size_t>(bar), '#')
            << '\n';
    }
    return 0;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Invocation inv;
    try {
        inv = parse_args(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\nrun 'skc --help' for usage\n";
        return static_cast<int>(ExitCode::usage);
    }
    try {
        switch (inv.command) {
            case Command::count: return cmd_count(inv, out, err);
            case Command::estimate: return cmd_estimate(inv, out, err);
            case Command::verify: return cmd_verify(inv, out, err);
            case Command::bench: return cmd_bench(inv, out, err);
            case Command::report: return cmd_report(inv, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return static_cast<int>(ExitCode::failure);
}

}  // namespace skc::cli

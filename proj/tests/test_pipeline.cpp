#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "skc/oracle.hpp"
#include "skc/pipeline.hpp"
#include "skc/synthetic.hpp"
#include "test_util.hpp"

using namespace skc;
using skc::test::TempDir;

namespace {

std::string write_corpus(const TempDir& dir, const std::string& name, const CorpusSpec& spec, uint64_t seed) {
    const auto path = (dir / name).string();
    std::ofstream(path) << to_fasta(synthetic_records(spec, seed), 70);
    return path;
}

OracleCounts read_outputs(const std::filesystem::path& dir, const RunReport& report) {
    OracleCounts out;
    for (const auto& name : report.output_files) {
        for (const auto& [kmer, n] : read_counts(dir / name)) {
            EXPECT_TRUE(out.emplace(kmer, n).second) << kmer << " appears in two partitions";
        }
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CorpusSpec megabyte_spec() {
    CorpusSpec spec;
    spec.records = 7000;
    spec.min_length = 100;
    spec.max_length = 200;
    spec.reference_length = 300000;
    spec.ambiguous_rate = 0.001;
    spec.lowercase_rate = 0.002;
    return spec;
}

}  // namespace

TEST(config, validation) {
    Config c;
    EXPECT_NO_THROW(c.validate());
    c.k = 2;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.m = 32;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.k = 513;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.sample_fraction = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = Config{};
    c.workers = 3;
    EXPECT_EQ(c.resolved_partitions(), 12u);
}

TEST(run, megabyte_corpus_matches_oracle_across_layouts) {
    TempDir dir;
    const auto input = write_corpus(dir, "in.fa", megabyte_spec(), 1);
    ASSERT_GT(std::filesystem::file_size(input), 1000000u);
    const auto expected = oracle_count_files({input}, InputFormat::automatic, 28);
    struct Layout {
        uint32_t p;
        unsigned workers;
        PartitionerKind kind;
        Granularity granularity;
    };
    const std::vector<Layout> layouts = {{1, 1, PartitionerKind::lpt, Granularity::signature},
                                         {7, 2, PartitionerKind::lpt, Granularity::signature},
                                         {16, 4, PartitionerKind::hash, Granularity::bin},
                                         {5, 3, PartitionerKind::lpt, Granularity::bin}};
    int i = 0;
    for (const auto& l : layouts) {
        Config c;
        c.k = 28;
        c.partitions = l.p;
        c.workers = l.workers;
        c.partitioner = l.kind;
        c.granularity = l.granularity;
        c.bins = 512;
        c.output_dir = dir / ("out" + std::to_string(i++));
        const auto report = run(c, {input});
        const auto got = read_outputs(c.output_dir, report);
        const auto diff = first_divergence(expected, got);
        ASSERT_FALSE(diff.has_value()) << diff->kmer << ": expected " << diff->expected << " got " << diff->actual;
        EXPECT_EQ(report.total_kmers, total_count(expected));
        EXPECT_EQ(report.distinct_kmers, expected.size());
        EXPECT_GE(report.skew, 1.0);
    }
}

TEST(run, outputs_are_independent_of_worker_count) {
    TempDir dir;
    CorpusSpec spec = megabyte_spec();
    spec.records = 2000;
    const auto input = write_corpus(dir, "in.fa", spec, 2);
    std::vector<std::string> files;
    std::vector<std::vector<uint64_t>> loads;
    for (unsigned w : {1u, 2u, 8u, 8u}) {
        Config c;
        c.k = 31;
        c.partitions = 12;
        c.workers = w;
        c.sorted = true;
        c.sample_fraction = 0.2;
        c.output_dir = dir / ("w" + std::to_string(w) + "-" + std::to_string(files.size()));
        const auto report = run(c, {input});
        std::string all;
        for (const auto& name : report.output_files) all += name + "\n" + slurp(c.output_dir / name);
        files.push_back(all);
        loads.push_back(report.partition_loads);
    }
    for (std::size_t i = 1; i < files.size(); ++i) {
        EXPECT_EQ(files[i], files[0]);
        EXPECT_EQ(loads[i], loads[0]);
    }
}

TEST(run, single_partition_has_unit_skew) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 300;
    const auto input = write_corpus(dir, "in.fa", spec, 3);
    Config c;
    c.k = 21;
    c.partitions = 1;
    c.workers = 2;
    const auto report = run(c, {input});
    ASSERT_EQ(report.partition_loads.size(), 1u);
    EXPECT_EQ(report.partition_loads[0], report.total_kmers);
    EXPECT_EQ(report.skew, 1.0);
}

TEST(run, spill_directory_gives_identical_counts) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 1500;
    spec.reference_length = 20000;
    const auto input = write_corpus(dir, "in.fa", spec, 4);
    std::filesystem::create_directories(dir / "spill");
    Config c;
    c.k = 40;
    c.partitions = 6;
    c.workers = 3;
    c.sorted = true;
    c.output_dir = dir / "mem";
    const auto a = run(c, {input});
    c.output_dir = dir / "disk";
    c.spill_dir = dir / "spill";
    const auto b = run(c, {input});
    EXPECT_EQ(read_outputs(dir / "mem", a), read_outputs(dir / "disk", b));
    EXPECT_EQ(a.partition_loads, b.partition_loads);
    EXPECT_TRUE(std::filesystem::is_empty(dir / "spill"));
}

TEST(run, doubled_input_doubles_counts) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 800;
    spec.reference_length = 10000;
    spec.ambiguous_rate = 0.002;
    const auto input = write_corpus(dir, "in.fa", spec, 5);
    Config c;
    c.k = 25;
    c.partitions = 8;
    c.workers = 2;
    c.output_dir = dir / "once";
    const auto once = read_outputs(c.output_dir, run(c, {input}));
    c.output_dir = dir / "twice";
    const auto twice = read_outputs(c.output_dir, run(c, {input, input}));
    ASSERT_EQ(once.size(), twice.size());
    for (const auto& [kmer, n] : once) ASSERT_EQ(twice.at(kmer), 2 * n) << kmer;
}

TEST(run, empty_input) {
    TempDir dir;
    const auto input = (dir / "empty.fa").string();
    std::ofstream(input).close();
    Config c;
    c.k = 21;
    c.partitions = 4;
    c.workers = 2;
    c.output_dir = dir / "out";
    const auto report = run(c, {input});
    EXPECT_EQ(report.total_kmers, 0u);
    EXPECT_EQ(report.distinct_kmers, 0u);
    EXPECT_TRUE(report.sample_empty);
    EXPECT_EQ(report.skew, 1.0);
    EXPECT_TRUE(read_outputs(c.output_dir, report).empty());
}

TEST(run, min_count_and_forward_mode) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 500;
    spec.reference_length = 3000;
    const auto input = write_corpus(dir, "in6.fa", spec, 6);
    Config c;
    c.k = 17;
    c.m = 7;
    c.partitions = 3;
    c.workers = 2;
    c.min_count = 3;
    c.counting = CountingMode::forward;
    c.format = OutputFormat::binary;
    c.output_dir = dir / "out";
    const auto report = run(c, {input});
    auto expected = oracle_count_files({input}, InputFormat::automatic, 17, CountingMode::forward);
    std::erase_if(expected, [](const auto& kv) { return kv.second < 3; });
    EXPECT_EQ(read_outputs(c.output_dir, report), expected);
    EXPECT_EQ(report.emitted_distinct, expected.size());
    EXPECT_EQ(report.emitted_total, total_count(expected));
}

TEST(run, writes_manifest_report_and_histogram) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 200;
    const auto input = write_corpus(dir, "in.fa", spec, 7);
    Config c;
    c.k = 21;
    c.partitions = 5;
    c.workers = 2;
    c.output_dir = dir / "out";
    const auto report = run(c, {input});

    const auto manifest = nlohmann::json::parse(slurp(c.output_dir / "manifest.json"));
    EXPECT_EQ(manifest["k"], 21);
    EXPECT_EQ(manifest["mode"], "canonical");
    EXPECT_EQ(manifest["files"].size(), 5u);
    EXPECT_EQ(manifest["total"], report.emitted_total);

    const auto rj = nlohmann::json::parse(slurp(c.output_dir / "report.json"));
    EXPECT_EQ(rj["total_kmers"], report.total_kmers);
    EXPECT_EQ(rj["partition_loads"].get<std::vector<uint64_t>>(), report.partition_loads);
    EXPECT_DOUBLE_EQ(rj["skew"].get<double>(), report.skew);

    std::ifstream hist(c.output_dir / "loads.tsv");
    EXPECT_EQ(read_load_histogram(hist), report.partition_loads);
    EXPECT_NE(report.render_table().find("skew"), std::string::npos);
}

TEST(run, compression_ratio_reflects_superkmer_sharing) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 300;
    const auto input = write_corpus(dir, "in.fa", spec, 8);
    Config c;
    c.k = 31;
    c.partitions = 4;
    c.workers = 1;
    const auto r = run(c, {input});
    EXPECT_GT(r.superkmers.superkmers, 0u);
    EXPECT_LT(r.compression_ratio, 0.5);
    EXPECT_EQ(r.superkmers.superkmer_symbols,
              r.total_kmers + r.superkmers.superkmers * (c.k - 1));
}

TEST(run, observer_sees_every_partition_once) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 300;
    const auto input = write_corpus(dir, "in.fa", spec, 9);
    Config c;
    c.k = 21;
    c.partitions = 9;
    c.workers = 3;
    std::mutex mu;
    std::multiset<uint32_t> seen;
    uint64_t total = 0;
    const auto report = run(c, {input}, [&](uint32_t p, const CountTable& t) {
        std::lock_guard lock(mu);
        seen.insert(p);
        total += t.total();
    });
    EXPECT_EQ(seen.size(), 9u);
    EXPECT_EQ(std::set<uint32_t>(seen.begin(), seen.end()).size(), 9u);
    EXPECT_EQ(total, report.total_kmers);
}

TEST(run, memory_budget_error_names_partition) {
    TempDir dir;
    CorpusSpec spec;
    spec.records = 2000;
    const auto input = write_corpus(dir, "in.fa", spec, 10);
    Config c;
    c.k = 21;
    c.partitions = 1;
    c.workers = 1;
    c.table_memory_limit = 64 * 1024;
    try {
        run(c, {input});
        FAIL() << "expected MemoryBudgetError";
    } catch (const MemoryBudgetError& e) {
        EXPECT_NE(std::string(e.what()).find("partition 0"), std::string::npos) << e.what();
    }
}

TEST(run, parse_error_carries_stage_context) {
    TempDir dir;
    const auto input = (dir / "bad.fa").string();
    std::ofstream(input) << "ACGT\n";
    Config c;
    c.k = 3;
    c.m = 3;
    c.workers = 1;
    c.partitions = 1;
    c.partitioner = PartitionerKind::hash;
    try {
        run(c, {input});
        FAIL() << "expected failure";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("input"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("bad.fa"), std::string::npos) << e.what();
    }
}

TEST(shuffle, conserves_records_and_groups_signatures) {
    std::mt19937_64 rng(11);
    std::vector<std::vector<SuperkmerRecord>> producers(8);
    CorpusSpec spec;
    spec.records = 400;
    spec.reference_length = 5000;
    const auto recs = synthetic_records(spec, 12);
    std::size_t in = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        for (const auto& frag : fragment(recs[i], 23)) {
            for (auto& sk : extract_superkmers(frag, 23, 8)) {
                producers[rng() % 8].push_back(std::move(sk));
                ++in;
            }
        }
    }
    const Binning binning(Granularity::signature);
    PartitionMap map(5);
    const auto out = shuffle(producers, binning, map);
    std::size_t total = 0;
    std::map<uint64_t, std::set<uint32_t>> where;
    std::multiset<std::pair<uint64_t, std::string>> before, after;
    for (const auto& s : producers)
        for (const auto& r : s) before.emplace(r.signature.code, decode(r.seq));
    for (uint32_t p = 0; p < out.size(); ++p) {
        total += out[p].size();
        for (const auto& r : out[p]) {
            where[r.signature.code].insert(p);
            EXPECT_EQ(p, map.lookup(binning(r.signature)));
            after.emplace(r.signature.code, decode(r.seq));
        }
    }
    EXPECT_EQ(total, in);
    EXPECT_EQ(before, after);
    for (const auto& [code, parts] : where) EXPECT_EQ(parts.size(), 1u);
}

TEST(shuffle, single_record) {
    std::vector<std::vector<SuperkmerRecord>> producers(1);
    producers[0] = extract_superkmers("ACGTTGCAAGTC", 12, 4);
    const Binning binning(Granularity::bin, 100);
    PartitionMap map(3);
    const auto out = shuffle(producers, binning, map);
    const uint32_t want = map.lookup(binning(producers[0][0].signature));
    EXPECT_EQ(out[want].size(), 1u);
    EXPECT_EQ(decode(out[want][0].seq), "ACGTTGCAAGTC");
}

TEST(shuffle_spools, append_after_seal_is_rejected) {
    ShuffleSpools spools(2);
    SpoolWriter writer(spools);
    writer.add(1, 42, "acgtac");
    writer.flush();
    spools.seal();
    EXPECT_EQ(spools.record_count(1), 1u);
    std::vector<uint64_t> none;
    EXPECT_THROW(spools.append(0, none, 0), std::logic_error);
    int seen = 0;
    spools.visit(1, [&](uint64_t code, std::span<const uint64_t> words, std::size_t len) {
        EXPECT_EQ(code, 42u);
        EXPECT_EQ(decode(PackedSeq::from_words({words.begin(), words.end()}, len)), "ACGTAC");
        ++seen;
    });
    EXPECT_EQ(seen, 1);
}

TEST(compute_metrics, skew_examples) {
    RunReport r;
    const std::vector<uint64_t> even = {10, 10, 10, 10};
    compute_metrics(r, even, {}, {});
    EXPECT_DOUBLE_EQ(r.skew, 1.0);
    EXPECT_EQ(r.total_kmers, 40u);
    const std::vector<uint64_t> uneven = {40, 10, 10, 20};
    compute_metrics(r, uneven, {}, {});
    EXPECT_DOUBLE_EQ(r.skew, 2.0);
    EXPECT_EQ(r.max_load, 40u);
    EXPECT_DOUBLE_EQ(r.mean_load, 20.0);
}

TEST(compute_metrics, compression_ratio) {
    RunReport r;
    SuperkmerStats s;
    s.superkmer_symbols = 30;
    s.naive_symbols = 120;
    const std::vector<uint64_t> loads = {1};
    compute_metrics(r, loads, s, {});
    EXPECT_DOUBLE_EQ(r.compression_ratio, 0.25);
}

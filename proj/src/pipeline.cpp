#include "skc/pipeline.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <iostream>
#include <optional>
#include <thread>

#include <json.hpp>

namespace skc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class T>
class BlockingQueue {
public:
    explicit BlockingQueue(std::size_t capacity) : capacity_(capacity) {}

    bool push(T item) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(item));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> items_;
    std::size_t capacity_;
    bool closed_ = false;
};

// First exception raised by any worker, tagged with its stage.
class FailureSlot {
public:
    void capture(const char* stage) {
        std::lock_guard lock(mu_);
        if (!error_) {
            error_ = std::current_exception();
            stage_ = stage;
        }
        failed_.store(true, std::memory_order_relaxed);
    }
    bool failed() const { return failed_.load(std::memory_order_relaxed); }
    void rethrow() const {
        if (!error_) return;
        try {
            std::rethrow_exception(error_);
        } catch (const MemoryBudgetError& e) {
            throw MemoryBudgetError(std::string(stage_) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string(stage_) + ": " + e.what());
        }
    }

private:
    std::mutex mu_;
    std::exception_ptr error_;
    const char* stage_ = "";
    std::atomic<bool> failed_{false};
};

std::atomic<uint64_t> g_dir_counter{0};

std::filesystem::path unique_dir(const std::filesystem::path& parent, const std::string& stem) {
    namespace fs = std::filesystem;
    for (;;) {
        fs::path p = parent / (stem + std::to_string(::getpid()) + "-" + std::to_string(g_dir_counter++));
        if (fs::create_directories(p)) return p;
    }
}

// Copies standard input to a temporary file so it can be read twice.
class StdinCopy {
public:
    StdinCopy() {
        dir_ = unique_dir(std::filesystem::temp_directory_path(), "skc-stdin-");
        path_ = dir_ / "stdin";
        std::ofstream out(path_, std::ios::binary);
        out << std::cin.rdbuf();
        if (!out) throw std::runtime_error("failed to buffer standard input");
    }
    ~StdinCopy() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    StdinCopy(const StdinCopy&) = delete;
    StdinCopy& operator=(const StdinCopy&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path path_;
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("failed to write '" + path.string() + "'");
}

}  // namespace

std::string to_string(Granularity g) { return g == Granularity::signature ? "signature" : "bin"; }
std::string to_string(PartitionerKind p) { return p == PartitionerKind::lpt ? "lpt" : "hash"; }
std::string to_string(CountingMode c) { return c == CountingMode::canonical ? "canonical" : "forward"; }
std::string to_string(OutputFormat f) { return f == OutputFormat::tsv ? "tsv" : "bin"; }

unsigned Config::resolved_workers() const {
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

uint32_t Config::resolved_partitions() const {
    return partitions != 0 ? partitions : 4 * resolved_workers();
}

void Config::validate() const {
    if (k == 0 || k > kMaxK) throw std::invalid_argument("k must be in [1, 512]");
    if (m < 3 || m > kMaxM) throw std::invalid_argument("m must be in [3, 31]");
    if (m > k) throw std::invalid_argument("m must not exceed k");
    if (granularity == Granularity::bin && bins == 0) throw std::invalid_argument("bins must be >= 1");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) {
        throw std::invalid_argument("sample fraction must be in (0, 1]");
    }
    if (min_count == 0) throw std::invalid_argument("min count must be >= 1");
}

void SuperkmerStats::merge(const SuperkmerStats& o) {
    records += o.records;
    fragments += o.fragments;
    superkmers += o.superkmers;
    superkmer_symbols += o.superkmer_symbols;
    naive_symbols += o.naive_symbols;
    fallback_superkmers += o.fallback_superkmers;
}

ShuffleSpools::ShuffleSpools(uint32_t partitions, const std::filesystem::path& spill_dir) {
    if (partitions == 0) throw std::invalid_argument("ShuffleSpools: partition count must be >= 1");
    if (!spill_dir.empty()) dir_ = unique_dir(spill_dir, "skc-spool-");
    spools_.reserve(partitions);
    for (uint32_t p = 0; p < partitions; ++p) {
        auto spool = std::make_unique<Spool>();
        if (!dir_.empty()) {
            spool->path = dir_ / ("spool-" + std::to_string(p) + ".bin");
            spool->file.open(spool->path, std::ios::binary | std::ios::trunc);
            if (!spool->file) throw std::runtime_error("cannot create spill file '" + spool->path.string() + "'");
        }
        spools_.push_back(std::move(spool));
    }
}

ShuffleSpools::~ShuffleSpools() {
    if (!dir_.empty()) {
        for (auto& s : spools_) s->file.close();
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
}

void ShuffleSpools::append(uint32_t partition, std::span<const uint64_t> encoded, uint64_t records) {
    Spool& s = *spools_.at(partition);
    std::lock_guard lock(s.mu);
    if (sealed_) throw std::logic_error("ShuffleSpools: append after seal");
    if (s.file.is_open()) {
        s.file.write(reinterpret_cast<const char*>(encoded.data()),
                     static_cast<std::streamsize>(encoded.size() * sizeof(uint64_t)));
        if (!s.file) throw std::runtime_error("write failed on spill file '" + s.path.string() + "'");
    } else {
        s.data.insert(s.data.end(), encoded.begin(), encoded.end());
    }
    s.records += records;
}

void ShuffleSpools::seal() {
    for (auto& s : spools_) {
        std::lock_guard lock(s->mu);
        if (s->file.is_open()) {
            s->file.close();
            if (s->file.fail()) throw std::runtime_error("failed to close spill file '" + s->path.string() + "'");
        }
    }
    sealed_ = true;
}

void ShuffleSpools::visit(uint32_t partition,
                          const std::function<void(uint64_t, std::span<const uint64_t>, std::size_t)>& visit) const {
    if (!sealed_) throw std::logic_error("ShuffleSpools: visit before seal");
    const Spool& s = *spools_.at(partition);
    if (!s.path.empty()) {
        std::ifstream in(s.path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot reopen spill file '" + s.path.string() + "'");
        std::vector<uint64_t> words;
        uint64_t header[2];
        while (in.read(reinterpret_cast<char*>(header), sizeof header)) {
            const std::size_t n = words_for(header[1]);
            words.resize(n);
            if (!in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(n * sizeof(uint64_t)))) {
                throw std::runtime_error("truncated spill file '" + s.path.string() + "'");
            }
            visit(header[0], words, header[1]);
        }
        return;
    }
    const auto& d = s.data;
    std::size_t i = 0;
    while (i < d.size()) {
        const uint64_t code = d[i];
        const auto len = static_cast<std::size_t>(d[i + 1]);
        const std::size_t n = words_for(len);
        visit(code, std::span<const uint64_t>(d.data() + i + 2, n), len);
        i += 2 + n;
    }
}

void ShuffleSpools::release(uint32_t partition) {
    Spool& s = *spools_.at(partition);
    std::vector<uint64_t>().swap(s.data);
    if (!s.path.empty()) {
        std::error_code ec;
        std::filesystem::remove(s.path, ec);
    }
}

SpoolWriter::SpoolWriter(ShuffleSpools& spools, std::size_t flush_words)
    : spools_(spools), flush_words_(flush_words), buffers_(spools.partitions()), pending_(spools.partitions(), 0) {}

SpoolWriter::~SpoolWriter() {
    try {
        flush();
    } catch (...) {
        // write errors have already been reported through flush() by the owner
    }
}

void SpoolWriter::add(uint32_t partition, uint64_t signature_code, std::string_view bases) {
    auto& buf = buffers_.at(partition);
    const std::size_t at = buf.size();
    buf.resize(at + 2 + words_for(bases.size()));
    buf[at] = signature_code;
    buf[at + 1] = bases.size();
    if (!pack_into(bases, std::span<uint64_t>(buf.data() + at + 2, words_for(bases.size())))) {
        buf.resize(at);
        throw std::invalid_argument("SpoolWriter: superkmer contains a non-ACGT symbol");
    }
    ++pending_[partition];
    maybe_flush(partition);
}

void SpoolWriter::add(uint32_t partition, const SuperkmerRecord& rec) {
    auto& buf = buffers_.at(partition);
    buf.push_back(rec.signature.code);
    buf.push_back(rec.seq.size());
    const auto words = rec.seq.words();
    buf.insert(buf.end(), words.begin(), words.end());
    ++pending_[partition];
    maybe_flush(partition);
}

void SpoolWriter::maybe_flush(uint32_t partition) {
    auto& buf = buffers_[partition];
    if (buf.size() < flush_words_) return;
    spools_.append(partition, buf, pending_[partition]);
    buf.clear();
    pending_[partition] = 0;
}

void SpoolWriter::flush() {
    for (uint32_t p = 0; p < buffers_.size(); ++p) {
        if (buffers_[p].empty()) continue;
        spools_.append(p, buffers_[p], pending_[p]);
        buffers_[p].clear();
        pending_[p] = 0;
    }
}

std::vector<std::vector<SuperkmerRecord>> shuffle(std::span<const std::vector<SuperkmerRecord>> producers,
                                                  const Binning& binning, const PartitionMap& map) {
    ShuffleSpools spools(map.partitions());
    FailureSlot failure;
    {
        std::vector<std::jthread> threads;
        threads.reserve(producers.size());
        for (const auto& stream : producers) {
            threads.emplace_back([&, &stream = stream] {
                try {
                    SpoolWriter writer(spools, 64);
                    for (const auto& rec : stream) writer.add(map.lookup(binning(rec.signature)), rec);
                    writer.flush();
                } catch (...) {
                    failure.capture("shuffle");
                }
            });
        }
    }
    failure.rethrow();
    spools.seal();
    std::vector<std::vector<SuperkmerRecord>> out(map.partitions());
    unsigned m = 0;
    for (const auto& stream : producers) {
        if (!stream.empty()) {
            m = stream.front().signature.m;
            break;
        }
    }
    for (uint32_t p = 0; p < map.partitions(); ++p) {
        spools.visit(p, [&](uint64_t code, std::span<const uint64_t> words, std::size_t len) {
            out[p].push_back({Signature{code, m}, PackedSeq::from_words({words.begin(), words.end()}, len)});
        });
    }
    return out;
}

RunReport run(const Config& config, const std::vector<std::string>& inputs, const PartitionObserver& observer) {
    config.validate();
    const auto run_start = Clock::now();
    const unsigned workers = config.resolved_workers();
    const uint32_t partitions = config.resolved_partitions();
    const Binning binning = config.binning();
    const std::size_t k = config.k;

    RunReport report;
    report.config = config;
    report.workers = workers;
    report.partitions = partitions;

    if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

    std::vector<std::string> paths = inputs;
    std::unique_ptr<StdinCopy> stdin_copy;
    const bool needs_sample = config.partitioner == PartitionerKind::lpt;
    if (needs_sample && std::count(paths.begin(), paths.end(), "-") > 0) {
        stdin_copy = std::make_unique<StdinCopy>();
        for (auto& p : paths) {
            if (p == "-") p = stdin_copy->path().string();
        }
    }

    // Sampling pass and schedule.
    PartitionMap map(partitions);
    StageTimings timings;
    if (needs_sample) {
        const auto t0 = Clock::now();
        SizeEstimator estimator(k, config.m, binning, config.sample_fraction, config.seed);
        try {
            for_each_record(paths, config.input_format,
                            [&](uint64_t index, SequenceRecord&& rec) { estimator.add(index, rec); });
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("sampling: ") + e.what());
        }
        try {
            map = lpt_schedule(estimator.finish(), partitions);
        } catch (const std::runtime_error&) {
            // Nothing sampled: every bin takes the hash fallback.
            report.sample_empty = true;
        }
        report.scheduled_bins = map.size();
        report.predicted_loads = map.predicted_loads();
        timings.sample_seconds = seconds_since(t0);
    }

    // Stage 1: extraction and shuffle.
    ShuffleSpools spools(partitions, config.spill_dir);
    SuperkmerStats stats;
    std::vector<uint64_t> loads(partitions, 0);
    FailureSlot failure;
    {
        const auto t0 = Clock::now();
        BlockingQueue<std::vector<SequenceRecord>> queue(2 * static_cast<std::size_t>(workers));
        std::mutex merge_mu;
        std::vector<std::jthread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                try {
                    SuperkmerExtractor extractor(k, config.m);
                    SpoolWriter writer(spools);
                    SuperkmerStats local;
                    std::vector<uint64_t> local_loads(partitions, 0);
                    const bool lpt = needs_sample;
                    while (auto batch = queue.pop()) {
                        if (failure.failed()) break;
                        for (const auto& rec : *batch) {
                            ++local.records;
                            for_each_fragment(rec.bases, k, [&](std::string_view frag, std::size_t) {
                                ++local.fragments;
                                local.naive_symbols += (frag.size() - k + 1) * k;
                                extractor.scan(frag, [&](const SuperkmerSpan& s) {
                                    const BinId bin = binning(s.signature);
                                    if (lpt && !map.contains(bin)) ++local.fallback_superkmers;
                                    const uint32_t part = map.lookup(bin);
                                    writer.add(part, s.signature.code, frag.substr(s.start, s.length));
                                    ++local.superkmers;
                                    local.superkmer_symbols += s.length;
                                    local_loads[part] += s.length - k + 1;
                                });
                            });
                        }
                    }
                    writer.flush();
                    std::lock_guard lock(merge_mu);
                    stats.merge(local);
                    for (uint32_t p = 0; p < partitions; ++p) loads[p] += local_loads[p];
                } catch (...) {
                    failure.capture("extraction");
                    queue.close();
                }
            });
        }
        try {
            std::vector<SequenceRecord> batch;
            std::size_t batch_bases = 0;
            for_each_record(paths, config.input_format, [&](uint64_t, SequenceRecord&& rec) {
                if (failure.failed()) throw std::runtime_error("aborted");
                batch_bases += rec.bases.size();
                batch.push_back(std::move(rec));
                if (batch_bases >= (1u << 20) || batch.size() >= 4096) {
                    queue.push(std::move(batch));
                    batch.clear();
                    batch_bases = 0;
                }
            });
            if (!batch.empty()) queue.push(std::move(batch));
        } catch (...) {
            if (!failure.failed()) failure.capture("input");
        }
        queue.close();
        threads.clear();  // barrier: every producer has flushed
        failure.rethrow();
        spools.seal();
        timings.extract_seconds = seconds_since(t0);
    }

    // Stage 2: per-partition counting.
    report.partition_distinct.assign(partitions, 0);
    std::vector<uint64_t> emitted_distinct(partitions, 0);
    std::vector<uint64_t> emitted_total(partitions, 0);
    {
        const auto t0 = Clock::now();
        std::atomic<uint32_t> next{0};
        std::vector<std::jthread> threads;
        for (unsigned w = 0; w < std::min<unsigned>(workers, partitions); ++w) {
            threads.emplace_back([&] {
                try {
                    KmerRoller roller(k);
                    for (uint32_t p = next++; p < partitions && !failure.failed(); p = next++) {
                        CountTable table(k, 1024, config.table_memory_limit);
                        try {
                            spools.visit(p, [&](uint64_t, std::span<const uint64_t> words, std::size_t len) {
                                for_each_kmer(words, len, roller, config.counting,
                                              [&](std::span<const uint64_t> key) { table.add(key); });
                            });
                        } catch (const MemoryBudgetError& e) {
                            throw MemoryBudgetError("partition " + std::to_string(p) + ": " + e.what());
                        }
                        spools.release(p);
                        if (table.total() != loads[p]) {
                            throw std::logic_error("partition " + std::to_string(p) + " lost k-mers in the shuffle");
                        }
                        report.partition_distinct[p] = table.size();
                        if (!config.output_dir.empty()) {
                            const auto path = config.output_dir / partition_file_name(p, config.format);
                            std::ofstream out(path, std::ios::binary | std::ios::trunc);
                            if (!out) throw std::runtime_error("partition " + std::to_string(p) + ": cannot open '" +
                                                               path.string() + "'");
                            try {
                                const auto summary =
                                    write_counts(table, out, config.format, config.min_count, config.sorted);
                                emitted_distinct[p] = summary.distinct;
                                emitted_total[p] = summary.total;
                            } catch (const std::exception& e) {
                                throw std::runtime_error("partition " + std::to_string(p) + ": " + e.what());
                            }
                        } else {
                            table.for_each([&](std::span<const uint64_t>, uint64_t n) {
                                if (n >= config.min_count) {
                                    ++emitted_distinct[p];
                                    emitted_total[p] += n;
                                }
                            });
                        }
                        if (observer) observer(p, table);
                    }
                } catch (...) {
                    failure.capture("counting");
                }
            });
        }
        threads.clear();
        failure.rethrow();
        timings.count_seconds = seconds_since(t0);
    }

    for (uint32_t p = 0; p < partitions; ++p) {
        report.distinct_kmers += report.partition_distinct[p];
        report.emitted_distinct += emitted_distinct[p];
        report.emitted_total += emitted_total[p];
    }
    timings.total_seconds = seconds_since(run_start);
    compute_metrics(report, loads, stats, timings);

    if (!config.output_dir.empty()) {
        nlohmann::ordered_json manifest;
        manifest["k"] = config.k;
        manifest["m"] = config.m;
        manifest["mode"] = to_string(config.counting);
        manifest["format"] = to_string(config.format);
        manifest["sorted"] = config.sorted;
        manifest["min_count"] = config.min_count;
        manifest["partitions"] = partitions;
        manifest["distinct"] = report.emitted_distinct;
        manifest["total"] = report.emitted_total;
        auto files = nlohmann::ordered_json::array();
        for (uint32_t p = 0; p < partitions; ++p) {
            const auto name = partition_file_name(p, config.format);
            report.output_files.push_back(name);
            files.push_back({{"file", name}, {"partition", p}, {"distinct", emitted_distinct[p]},
                             {"total", emitted_total[p]}});
        }
        manifest["files"] = files;
        write_text_file(config.output_dir / "manifest.json", manifest.dump(2) + "\n");
        write_text_file(config.output_dir / "report.json", report.to_json() + "\n");
        std::ofstream hist(config.output_dir / "loads.tsv");
        write_load_histogram(report, hist);
        if (!hist) throw std::runtime_error("failed to write loads.tsv");
    }
    return report;
}

}  // namespace skc

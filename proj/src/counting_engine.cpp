#include "skc/counting_engine.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <new>

namespace skc {

namespace {

std::size_t round_up_pow2(std::size_t n) {
    std::size_t c = 16;
    while (c < n) c <<= 1;
    return c;
}

void put_le(std::ostream& out, uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, bytes);
}

uint64_t get_le(const char* p, int bytes) {
    uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}

void write_kmer_text(std::ostream& out, std::span<const uint64_t> words, std::size_t k, uint64_t count,
                     std::string& scratch) {
    scratch.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        scratch[i] = kCodeBase[(words[i / kSymbolsPerWord] >> (62 - 2 * (i % kSymbolsPerWord))) & 3u];
    }
    out << scratch << '\t' << count << '\n';
}

class CountWriter {
public:
    CountWriter(std::ostream& out, OutputFormat format, std::size_t k, uint64_t min_count)
        : out_(out), format_(format), k_(k), min_count_(min_count) {
        if (format_ == OutputFormat::binary) {
            out_.write(kBinaryMagic, sizeof kBinaryMagic);
            put_le(out_, k, 4);
            put_le(out_, words_for(k), 4);
        }
    }

    void write(std::span<const uint64_t> words, uint64_t count) {
        if (count < min_count_) return;
        if (format_ == OutputFormat::tsv) {
            write_kmer_text(out_, words, k_, count, scratch_);
        } else {
            for (uint64_t w : words) put_le(out_, w, 8);
            put_le(out_, count, 8);
        }
        ++summary_.distinct;
        summary_.total += count;
    }

    WriteSummary finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("failed writing k-mer counts");
        return summary_;
    }

private:
    std::ostream& out_;
    OutputFormat format_;
    std::size_t k_;
    uint64_t min_count_;
    std::string scratch_;
    WriteSummary summary_;
};

}  // namespace

CountTable::CountTable(std::size_t k, std::size_t initial_capacity, std::size_t memory_limit)
    : k_(k), nwords_(words_for(k)), capacity_(round_up_pow2(initial_capacity)), memory_limit_(memory_limit) {
    if (k == 0 || k > kMaxK) throw std::invalid_argument("CountTable: k must be in [1, 512]");
    if (memory_limit_ != 0 && memory_bytes() > memory_limit_) {
        throw MemoryBudgetError("count table exceeds memory budget at initial capacity");
    }
    keys_.assign(capacity_ * nwords_, 0);
    counts_.assign(capacity_, 0);
}

std::size_t CountTable::find_slot(std::span<const uint64_t> kmer) const {
    const std::size_t mask = capacity_ - 1;
    std::size_t slot = hash_words(kmer, k_) & mask;
    while (counts_[slot] != 0) {
        if (std::equal(kmer.begin(), kmer.end(), keys_.begin() + static_cast<std::ptrdiff_t>(slot * nwords_))) {
            return slot;
        }
        slot = (slot + 1) & mask;
    }
    return slot;
}

void CountTable::grow() {
    const std::size_t new_capacity = capacity_ * 2;
    const std::size_t new_bytes = new_capacity * (nwords_ + 1) * sizeof(uint64_t);
    if (memory_limit_ != 0 && new_bytes > memory_limit_) {
        throw MemoryBudgetError("count table would grow to " + std::to_string(new_bytes) +
                                " bytes, over the budget of " + std::to_string(memory_limit_) +
                                " bytes; rerun with more partitions (-p)");
    }
    std::vector<uint64_t> old_keys;
    std::vector<uint64_t> old_counts;
    try {
        old_keys.swap(keys_);
        old_counts.swap(counts_);
        keys_.assign(new_capacity * nwords_, 0);
        counts_.assign(new_capacity, 0);
    } catch (const std::bad_alloc&) {
        throw MemoryBudgetError("out of memory growing count table to " + std::to_string(new_bytes) +
                                " bytes; rerun with more partitions (-p)");
    }
    const std::size_t old_capacity = capacity_;
    capacity_ = new_capacity;
    for (std::size_t s = 0; s < old_capacity; ++s) {
        if (old_counts[s] == 0) continue;
        std::span<const uint64_t> key(old_keys.data() + s * nwords_, nwords_);
        const std::size_t slot = find_slot(key);
        std::copy(key.begin(), key.end(), keys_.begin() + static_cast<std::ptrdiff_t>(slot * nwords_));
        counts_[slot] = old_counts[s];
    }
}

void CountTable::add(std::span<const uint64_t> kmer, uint64_t n) {
    if (kmer.size() != nwords_) throw std::invalid_argument("CountTable::add: key width mismatch");
    if (n == 0) return;
    std::size_t slot = find_slot(kmer);
    if (counts_[slot] == 0) {
        if (static_cast<double>(size_ + 1) > kMaxLoadFactor * static_cast<double>(capacity_)) {
            grow();
            slot = find_slot(kmer);
        }
        std::copy(kmer.begin(), kmer.end(), keys_.begin() + static_cast<std::ptrdiff_t>(slot * nwords_));
        ++size_;
    }
    counts_[slot] += n;
    total_ += n;
}

uint64_t CountTable::count(std::span<const uint64_t> kmer) const {
    if (kmer.size() != nwords_) return 0;
    return counts_[find_slot(kmer)];
}

std::vector<std::size_t> CountTable::sorted_slots() const {
    std::vector<std::size_t> slots;
    slots.reserve(size_);
    for (std::size_t s = 0; s < capacity_; ++s) {
        if (counts_[s] != 0) slots.push_back(s);
    }
    std::sort(slots.begin(), slots.end(), [this](std::size_t a, std::size_t b) {
        const auto ka = key_at(a);
        const auto kb = key_at(b);
        return std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end());
    });
    return slots;
}

std::vector<KmerCount> CountTable::to_counts() const {
    std::vector<KmerCount> out;
    out.reserve(size_);
    for_each([&](std::span<const uint64_t> key, uint64_t n) {
        out.push_back({PackedSeq::from_words({key.begin(), key.end()}, k_), n});
    });
    return out;
}

std::vector<PackedSeq> expand_superkmer(const SuperkmerRecord& rec, std::size_t k, CountingMode mode) {
    if (rec.seq.size() < k) throw std::invalid_argument("expand_superkmer: superkmer shorter than k");
    std::vector<PackedSeq> out;
    out.reserve(rec.seq.size() - k + 1);
    KmerRoller roller(k);
    for_each_kmer(rec.seq.words(), rec.seq.size(), roller, mode, [&](std::span<const uint64_t> key) {
        out.push_back(PackedSeq::from_words({key.begin(), key.end()}, k));
    });
    return out;
}

CountTable count_partition(std::span<const SuperkmerRecord> records, std::size_t k, CountingMode mode,
                           std::size_t memory_limit) {
    CountTable table(k, 1024, memory_limit);
    KmerRoller roller(k);
    for (const auto& rec : records) {
        if (rec.seq.size() < k) throw std::invalid_argument("count_partition: superkmer shorter than k");
        for_each_kmer(rec.seq.words(), rec.seq.size(), roller, mode,
                      [&](std::span<const uint64_t> key) { table.add(key); });
    }
    return table;
}

WriteSummary write_counts(const CountTable& table, std::ostream& out, OutputFormat format, uint64_t min_count,
                          bool sorted) {
    CountWriter writer(out, format, table.k(), min_count);
    if (sorted) {
        for (std::size_t slot : table.sorted_slots()) writer.write(table.key_at(slot), table.count_at(slot));
    } else {
        table.for_each([&](std::span<const uint64_t> key, uint64_t n) { writer.write(key, n); });
    }
    return writer.finish();
}

WriteSummary write_counts(std::span<const KmerCount> counts, std::ostream& out, OutputFormat format,
                          uint64_t min_count) {
    const std::size_t k = counts.empty() ? 1 : counts.front().kmer.size();
    CountWriter writer(out, format, k, min_count);
    for (const auto& kc : counts) {
        if (kc.kmer.size() != k) throw std::invalid_argument("write_counts: mixed k-mer lengths");
        writer.write(kc.kmer.words(), kc.count);
    }
    return writer.finish();
}

std::vector<std::pair<std::string, uint64_t>> read_counts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open count file '" + path.string() + "'");
    std::vector<std::pair<std::string, uint64_t>> out;
    char magic[8] = {};
    in.read(magic, sizeof magic);
    if (in.gcount() == sizeof magic && std::memcmp(magic, kBinaryMagic, sizeof magic) == 0) {
        char hdr[8];
        if (!in.read(hdr, 8)) throw std::runtime_error(path.string() + ": truncated binary header");
        const auto k = static_cast<std::size_t>(get_le(hdr, 4));
        const auto nwords = static_cast<std::size_t>(get_le(hdr + 4, 4));
        if (k == 0 || nwords != words_for(k)) throw std::runtime_error(path.string() + ": bad binary header");
        std::vector<char> rec((nwords + 1) * 8);
        std::vector<uint64_t> words(nwords);
        while (in.read(rec.data(), static_cast<std::streamsize>(rec.size()))) {
            for (std::size_t w = 0; w < nwords; ++w) words[w] = get_le(rec.data() + 8 * w, 8);
            out.emplace_back(decode(PackedSeq::from_words(words, k)), get_le(rec.data() + 8 * nwords, 8));
        }
        if (in.gcount() != 0) throw std::runtime_error(path.string() + ": truncated binary record");
        return out;
    }
    in.clear();
    in.seekg(0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": missing TAB");
        }
        out.emplace_back(line.substr(0, tab), std::stoull(line.substr(tab + 1)));
    }
    return out;
}

std::string partition_file_name(uint32_t partition, OutputFormat format) {
    return "part-" + std::to_string(partition) + (format == OutputFormat::tsv ? ".tsv" : ".kbin");
}

}  // namespace skc

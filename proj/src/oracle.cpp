#include "skc/oracle.hpp"

#include <algorithm>

namespace skc {

std::string reverse_complement_text(std::string_view s) {
    std::string out(s.rbegin(), s.rend());
    for (char& c : out) {
        switch (c) {
            case 'A': c = 'T'; break;
            case 'C': c = 'G'; break;
            case 'G': c = 'C'; break;
            case 'T': c = 'A'; break;
            default: break;
        }
    }
    return out;
}

void oracle_add(OracleCounts& counts, std::string_view bases, std::size_t k, CountingMode mode) {
    std::string upper(bases);
    for (char& c : upper) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    if (upper.size() < k) return;
    for (std::size_t i = 0; i + k <= upper.size(); ++i) {
        std::string window = upper.substr(i, k);
        if (window.find_first_not_of("ACGT") != std::string::npos) continue;
        if (mode == CountingMode::canonical) {
            std::string rc = reverse_complement_text(window);
            if (rc < window) window = std::move(rc);
        }
        ++counts[window];
    }
}

OracleCounts oracle_count(std::span<const SequenceRecord> records, std::size_t k, CountingMode mode) {
    OracleCounts counts;
    for (const auto& r : records) oracle_add(counts, r.bases, k, mode);
    return counts;
}

OracleCounts oracle_count_files(const std::vector<std::string>& paths, InputFormat format, std::size_t k,
                                CountingMode mode) {
    OracleCounts counts;
    for_each_record(paths, format, [&](uint64_t, SequenceRecord&& r) { oracle_add(counts, r.bases, k, mode); });
    return counts;
}

std::optional<Divergence> first_divergence(const OracleCounts& expected, const OracleCounts& actual) {
    std::vector<std::string> keys;
    keys.reserve(expected.size() + actual.size());
    for (const auto& [kmer, n] : expected) {
        const auto it = actual.find(kmer);
        if (it == actual.end() || it->second != n) keys.push_back(kmer);
    }
    for (const auto& [kmer, n] : actual) {
        if (!expected.count(kmer)) keys.push_back(kmer);
    }
    if (keys.empty()) return std::nullopt;
    const std::string& first = *std::min_element(keys.begin(), keys.end());
    const auto e = expected.find(first);
    const auto a = actual.find(first);
    return Divergence{first, e == expected.end() ? 0 : e->second, a == actual.end() ? 0 : a->second};
}

uint64_t total_count(const OracleCounts& counts) {
    uint64_t t = 0;
    for (const auto& [kmer, n] : counts) t += n;
    return t;
}

}  // namespace skc

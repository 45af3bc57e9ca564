#include "skc/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace skc {

namespace {

constexpr char kAmbiguous[] = {'N', 'N', 'N', 'N', 'R', 'Y', 'K', 'M', 'n'};

void reverse_complement_in_place(std::string& s) {
    std::reverse(s.begin(), s.end());
    for (char& c : s) {
        switch (c) {
            case 'A': c = 'T'; break;
            case 'C': c = 'G'; break;
            case 'G': c = 'C'; break;
            case 'T': c = 'A'; break;
            default: break;
        }
    }
}

}  // namespace

std::string random_dna(std::mt19937_64& rng, std::size_t length) {
    std::string s(length, 'A');
    for (std::size_t i = 0; i < length; ++i) s[i] = "ACGT"[rng() & 3];
    return s;
}

std::vector<SequenceRecord> synthetic_records(const CorpusSpec& spec, uint64_t seed) {
    if (spec.min_length > spec.max_length) throw std::invalid_argument("CorpusSpec: min_length > max_length");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> length(spec.min_length, spec.max_length);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::string reference = spec.reference_length > 0 ? random_dna(rng, spec.reference_length) : std::string();

    std::vector<SequenceRecord> out;
    out.reserve(spec.records);
    for (std::size_t r = 0; r < spec.records; ++r) {
        std::size_t len = length(rng);
        std::string bases;
        if (!reference.empty()) {
            len = std::min(len, reference.size());
            const std::size_t start = std::uniform_int_distribution<std::size_t>(0, reference.size() - len)(rng);
            bases = reference.substr(start, len);
            if (rng() & 1) reverse_complement_in_place(bases);
        } else {
            bases = random_dna(rng, len);
        }
        for (std::size_t i = 0; i < bases.size(); ++i) {
            if (spec.ambiguous_rate > 0 && unit(rng) < spec.ambiguous_rate) {
                const std::size_t run = 1 + rng() % 4;
                for (std::size_t j = i; j < std::min(bases.size(), i + run); ++j) {
                    bases[j] = kAmbiguous[rng() % sizeof kAmbiguous];
                }
                i += run - 1;
            } else if (spec.lowercase_rate > 0 && unit(rng) < spec.lowercase_rate) {
                const std::size_t run = 1 + rng() % 40;
                for (std::size_t j = i; j < std::min(bases.size(), i + run); ++j) {
                    bases[j] = static_cast<char>(std::tolower(static_cast<unsigned char>(bases[j])));
                }
                i += run - 1;
            }
        }
        out.push_back({"read" + std::to_string(r), std::move(bases)});
    }
    return out;
}

std::string to_fasta(std::span<const SequenceRecord> records, std::size_t line_width) {
    std::string out;
    for (const auto& r : records) {
        out += '>';
        out += r.id;
        out += '\n';
        if (line_width == 0) {
            out += r.bases;
            out += '\n';
            continue;
        }
        for (std::size_t i = 0; i < r.bases.size(); i += line_width) {
            out.append(r.bases, i, line_width);
            out += '\n';
        }
    }
    return out;
}

std::string to_fastq(std::span<const SequenceRecord> records) {
    std::string out;
    for (const auto& r : records) {
        out += '@' + r.id + '\n' + r.bases + "\n+\n" + std::string(r.bases.size(), 'I') + '\n';
    }
    return out;
}

void write_synthetic_fasta(const std::filesystem::path& path, uint64_t target_bases, uint64_t seed,
                           std::size_t read_length, std::size_t reference_length) {
    std::mt19937_64 rng(seed);
    const std::string reference = random_dna(rng, std::max(reference_length, read_length));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create '" + path.string() + "'");
    std::uniform_int_distribution<std::size_t> start(0, reference.size() - read_length);
    std::string read;
    uint64_t written = 0;
    for (uint64_t r = 0; written < target_bases; ++r) {
        read.assign(reference, start(rng), read_length);
        if (rng() & 1) reverse_complement_in_place(read);
        out << ">r" << r << '\n' << read << '\n';
        written += read_length;
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<double> zipf_sizes(std::size_t n, double exponent, double total) {
    std::vector<double> sizes(n);
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sizes[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
        norm += sizes[i];
    }
    for (double& s : sizes) s = s / norm * total;
    return sizes;
}

}  // namespace skc

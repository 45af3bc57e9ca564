#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skc {

struct SequenceRecord {
    std::string id;
    std::string bases;
};

// A maximal run of unambiguous bases from one record, uppercased.
struct Fragment {
    std::string bases;
    std::string record_id;
    std::size_t offset = 0;  // position of bases[0] inside the record
};

enum class InputFormat { automatic, fasta, fastq };

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Byte supplier behind a FastxReader. read() returns 0 at end of input.
class ByteSource {
public:
    virtual ~ByteSource() = default;
    virtual std::size_t read(char* buf, std::size_t n) = 0;
};

// Plain or gzip file; "-" reads standard input.
std::unique_ptr<ByteSource> open_source(const std::string& path);
std::unique_ptr<ByteSource> istream_source(std::istream& in);

// Streaming FASTA/FASTQ parser. Only the record being assembled is held in
// memory. Bases are uppercased; '\r' and blank lines are dropped.
class FastxReader {
public:
    FastxReader(std::unique_ptr<ByteSource> source, InputFormat format = InputFormat::automatic);

    std::optional<SequenceRecord> next();

    // Resolved once the first byte has been seen; automatic before that.
    InputFormat format() const { return format_; }
    uint64_t records_read() const { return records_; }

private:
    bool fill();
    bool getline(std::string& line);
    int peek();
    std::optional<SequenceRecord> next_fasta();
    std::optional<SequenceRecord> next_fastq();
    void resolve_format();

    std::unique_ptr<ByteSource> source_;
    InputFormat format_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t end_ = 0;
    uint64_t offset_ = 0;  // bytes consumed before buf_[0]
    uint64_t records_ = 0;
    bool eof_ = false;
    std::string line_;
    std::string pending_header_;
    bool has_pending_header_ = false;
};

std::vector<SequenceRecord> read_fasta(std::istream& in);
std::vector<SequenceRecord> read_fastq(std::istream& in);

// Calls `visit` for each record of every file in order, with a running record
// index across files.
void for_each_record(const std::vector<std::string>& paths, InputFormat format,
                     const std::function<void(uint64_t index, SequenceRecord&&)>& visit);

inline bool is_acgt(char c) {
    switch (c) {
        case 'A': case 'C': case 'G': case 'T':
        case 'a': case 'c': case 'g': case 't':
            return true;
        default:
            return false;
    }
}

// Invokes `emit(bases, offset)` for every maximal ACGT run (either case) of
// length >= k. The view aliases `bases`.
template <class Emit>
void for_each_fragment(std::string_view bases, std::size_t k, Emit&& emit) {
    std::size_t i = 0;
    const std::size_t n = bases.size();
    while (i < n) {
        while (i < n && !is_acgt(bases[i])) ++i;
        const std::size_t start = i;
        while (i < n && is_acgt(bases[i])) ++i;
        if (i - start >= k && i > start) emit(bases.substr(start, i - start), start);
    }
}

std::vector<Fragment> fragment(const SequenceRecord& record, std::size_t k);

}  // namespace skc

#include "skc/sequence_io.hpp"

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cstring>

namespace skc {

namespace {

class GzSource : public ByteSource {
public:
    explicit GzSource(const std::string& path) : path_(path) {
        if (path == "-") {
            file_ = gzdopen(dup(STDIN_FILENO), "rb");
        } else {
            file_ = gzopen(path.c_str(), "rb");
        }
        if (file_ == nullptr) throw std::runtime_error("cannot open input '" + path + "'");
        gzbuffer(file_, 1 << 18);
    }
    ~GzSource() override { gzclose(file_); }
    GzSource(const GzSource&) = delete;
    GzSource& operator=(const GzSource&) = delete;

    std::size_t read(char* buf, std::size_t n) override {
        const int got = gzread(file_, buf, static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30)));
        if (got < 0) {
            int err = 0;
            throw std::runtime_error("read error on '" + path_ + "': " + gzerror(file_, &err));
        }
        return static_cast<std::size_t>(got);
    }

private:
    std::string path_;
    gzFile file_ = nullptr;
};

class IstreamSource : public ByteSource {
public:
    explicit IstreamSource(std::istream& in) : in_(in) {}
    std::size_t read(char* buf, std::size_t n) override {
        in_.read(buf, static_cast<std::streamsize>(n));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::istream& in_;
};

void append_upper(std::string& dst, std::string_view line) {
    for (char c : line) {
        if (c == ' ' || c == '\t' || c == '\r') continue;
        dst.push_back((c >= 'a' && c <= 'z') ? static_cast<char>(c - 32) : c);
    }
}

std::string header_id(std::string_view header) {
    // header excludes the leading marker
    std::size_t start = 0;
    while (start < header.size() && std::isspace(static_cast<unsigned char>(header[start]))) ++start;
    std::size_t end = start;
    while (end < header.size() && !std::isspace(static_cast<unsigned char>(header[end]))) ++end;
    return std::string(header.substr(start, end - start));
}

}  // namespace

std::unique_ptr<ByteSource> open_source(const std::string& path) {
    return std::make_unique<GzSource>(path);
}

std::unique_ptr<ByteSource> istream_source(std::istream& in) {
    return std::make_unique<IstreamSource>(in);
}

FastxReader::FastxReader(std::unique_ptr<ByteSource> source, InputFormat format)
    : source_(std::move(source)), format_(format), buf_(1 << 16) {}

bool FastxReader::fill() {
    if (eof_) return false;
    offset_ += end_;
    pos_ = 0;
    end_ = source_->read(buf_.data(), buf_.size());
    if (end_ == 0) eof_ = true;
    return end_ > 0;
}

int FastxReader::peek() {
    if (pos_ >= end_ && !fill()) return -1;
    return static_cast<unsigned char>(buf_[pos_]);
}

// Reads one line without its terminator. Returns false at end of input with
// nothing read.
bool FastxReader::getline(std::string& line) {
    line.clear();
    bool any = false;
    while (true) {
        if (pos_ >= end_ && !fill()) return any;
        any = true;
        const char* begin = buf_.data() + pos_;
        const char* nl = static_cast<const char*>(std::memchr(begin, '\n', end_ - pos_));
        if (nl != nullptr) {
            line.append(begin, static_cast<std::size_t>(nl - begin));
            pos_ += static_cast<std::size_t>(nl - begin) + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        line.append(begin, end_ - pos_);
        pos_ = end_;
    }
}

void FastxReader::resolve_format() {
    // skip leading blank lines
    while (true) {
        const int c = peek();
        if (c == '\n' || c == '\r') {
            ++pos_;
            continue;
        }
        if (c < 0) return;
        if (format_ == InputFormat::automatic) {
            if (c == '>') {
                format_ = InputFormat::fasta;
            } else if (c == '@') {
                format_ = InputFormat::fastq;
            } else {
                throw ParseError("unrecognized input format: expected '>' or '@' at byte offset " +
                                 std::to_string(offset_ + pos_));
            }
        }
        return;
    }
}

std::optional<SequenceRecord> FastxReader::next() {
    if (records_ == 0 && !has_pending_header_) resolve_format();
    if (format_ == InputFormat::automatic) return std::nullopt;  // empty input
    auto rec = format_ == InputFormat::fasta ? next_fasta() : next_fastq();
    if (rec) ++records_;
    return rec;
}

std::optional<SequenceRecord> FastxReader::next_fasta() {
    if (!has_pending_header_) {
        uint64_t line_offset = 0;
        do {
            line_offset = offset_ + pos_;
            if (!getline(line_)) return std::nullopt;
        } while (line_.empty());
        if (line_[0] != '>') {
            throw ParseError("malformed FASTA: expected '>' at byte offset " + std::to_string(line_offset));
        }
        pending_header_.assign(line_, 1);
        has_pending_header_ = true;
    }
    SequenceRecord rec;
    rec.id = header_id(pending_header_);
    if (rec.id.empty()) throw ParseError("malformed FASTA: empty header near byte offset " +
                                         std::to_string(offset_ + pos_));
    has_pending_header_ = false;
    while (getline(line_)) {
        if (!line_.empty() && line_[0] == '>') {
            pending_header_.assign(line_, 1);
            has_pending_header_ = true;
            break;
        }
        append_upper(rec.bases, line_);
    }
    return rec;
}

std::optional<SequenceRecord> FastxReader::next_fastq() {
    const std::string idx = std::to_string(records_);
    do {
        if (!getline(line_)) return std::nullopt;
    } while (line_.empty());
    if (line_[0] != '@') throw ParseError("malformed FASTQ: record " + idx + " does not start with '@'");
    SequenceRecord rec;
    rec.id = header_id(std::string_view(line_).substr(1));
    if (rec.id.empty()) throw ParseError("malformed FASTQ: record " + idx + " has an empty header");
    if (!getline(line_)) throw ParseError("truncated FASTQ record " + idx + ": missing sequence line");
    append_upper(rec.bases, line_);
    if (!getline(line_)) throw ParseError("truncated FASTQ record " + idx + ": missing '+' line");
    if (line_.empty() || line_[0] != '+') {
        throw ParseError("malformed FASTQ: record " + idx + " separator line does not start with '+'");
    }
    if (!getline(line_)) throw ParseError("truncated FASTQ record " + idx + ": missing quality line");
    if (line_.size() != rec.bases.size()) {
        throw ParseError("FASTQ record " + idx + ": quality length " + std::to_string(line_.size()) +
                         " != sequence length " + std::to_string(rec.bases.size()));
    }
    return rec;
}

std::vector<SequenceRecord> read_fasta(std::istream& in) {
    FastxReader reader(istream_source(in), InputFormat::fasta);
    std::vector<SequenceRecord> out;
    while (auto rec = reader.next()) out.push_back(std::move(*rec));
    return out;
}

std::vector<SequenceRecord> read_fastq(std::istream& in) {
    FastxReader reader(istream_source(in), InputFormat::fastq);
    std::vector<SequenceRecord> out;
    while (auto rec = reader.next()) out.push_back(std::move(*rec));
    return out;
}

void for_each_record(const std::vector<std::string>& paths, InputFormat format,
                     const std::function<void(uint64_t, SequenceRecord&&)>& visit) {
    uint64_t index = 0;
    for (const auto& path : paths) {
        FastxReader reader(open_source(path), format);
        try {
            while (auto rec = reader.next()) visit(index++, std::move(*rec));
        } catch (const ParseError& e) {
            throw ParseError(path + ": " + e.what());
        }
    }
}

std::vector<Fragment> fragment(const SequenceRecord& record, std::size_t k) {
    if (k == 0) throw std::invalid_argument("fragment: k must be >= 1");
    std::vector<Fragment> out;
    for_each_fragment(record.bases, k, [&](std::string_view run, std::size_t offset) {
        Fragment f;
        f.bases.reserve(run.size());
        append_upper(f.bases, run);
        f.record_id = record.id;
        f.offset = offset;
        out.push_back(std::move(f));
    });
    return out;
}

}  // namespace skc

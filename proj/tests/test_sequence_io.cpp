#include <gtest/gtest.h>
#include <zlib.h>

#include <fstream>
#include <random>
#include <sstream>

#include "skc/sequence_io.hpp"
#include "skc/synthetic.hpp"
#include "test_util.hpp"

using namespace skc;

namespace {

// Line-oriented reference FASTA parser used as an oracle.
std::vector<std::pair<std::string, std::string>> reference_fasta(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '>') {
            out.emplace_back(line.substr(1, line.find(' ') == std::string::npos ? std::string::npos
                                                                                : line.find(' ') - 1),
                             "");
        } else {
            for (char c : line) out.back().second += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    return out;
}

std::size_t clean_windows(const std::string& s, std::size_t k) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + k <= s.size(); ++i) {
        bool ok = true;
        for (std::size_t j = i; j < i + k && ok; ++j) ok = std::string_view("ACGTacgt").find(s[j]) != std::string_view::npos;
        n += ok;
    }
    return n;
}

}  // namespace

TEST(read_fasta, multi_line_record) {
    std::istringstream in(">r1\nACGT\nACGT\n");
    const auto recs = read_fasta(in);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].id, "r1");
    EXPECT_EQ(recs[0].bases, "ACGTACGT");
}

TEST(read_fasta, empty_record) {
    std::istringstream in(">a\n\n>b\nT\n");
    const auto recs = read_fasta(in);
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].id, "a");
    EXPECT_EQ(recs[0].bases, "");
    EXPECT_EQ(recs[1].id, "b");
    EXPECT_EQ(recs[1].bases, "T");
}

TEST(read_fasta, crlf_lowercase_and_description) {
    std::istringstream in(">chr1 some description\r\nacgN\r\nTT\r\n");
    const auto recs = read_fasta(in);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].id, "chr1");
    EXPECT_EQ(recs[0].bases, "ACGNTT");
}

TEST(read_fasta, missing_header_reports_byte_offset) {
    std::istringstream in("ACGT\n>r\nA\n");
    try {
        read_fasta(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("byte offset 0"), std::string::npos) << e.what();
    }
}

TEST(read_fasta, matches_reference_parser_on_large_file) {
    CorpusSpec spec;
    spec.records = 10000;
    spec.min_length = 0;
    spec.max_length = 400;
    spec.ambiguous_rate = 0.01;
    spec.lowercase_rate = 0.01;
    const auto generated = synthetic_records(spec, 5);
    const std::string text = to_fasta(generated, 70);
    std::istringstream in(text);
    const auto recs = read_fasta(in);
    const auto ref = reference_fasta(text);
    ASSERT_EQ(recs.size(), 10000u);
    ASSERT_EQ(ref.size(), recs.size());
    std::size_t parsed_bases = 0, generated_bases = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        ASSERT_EQ(recs[i].id, ref[i].first);
        ASSERT_EQ(recs[i].bases, ref[i].second);
        parsed_bases += recs[i].bases.size();
        generated_bases += generated[i].bases.size();
    }
    EXPECT_EQ(parsed_bases, generated_bases);
}

TEST(read_fasta, round_trip_reproduces_sequence_bytes) {
    std::mt19937_64 rng(3);
    std::string text;
    std::string expected;
    for (int r = 0; r < 50; ++r) {
        text += ">s" + std::to_string(r) + "\n";
        const int lines = static_cast<int>(rng() % 5);
        for (int l = 0; l < lines; ++l) {
            std::string line = skc::test::random_acgt(rng, rng() % 90);
            for (auto& c : line) {
                if (rng() % 7 == 0) c = static_cast<char>(std::tolower(c));
            }
            text += line + (rng() % 2 ? "\r\n" : "\n");
            for (char c : line) expected += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
    }
    std::istringstream in(text);
    std::string joined;
    for (const auto& rec : read_fasta(in)) joined += rec.bases;
    EXPECT_EQ(joined, expected);
}

TEST(read_fastq, single_record) {
    std::istringstream in("@r\nACGT\n+\nIIII\n");
    const auto recs = read_fastq(in);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].id, "r");
    EXPECT_EQ(recs[0].bases, "ACGT");
}

TEST(read_fastq, quality_length_mismatch) {
    std::istringstream in("@r\nACGT\n+\nIII\n");
    EXPECT_THROW(read_fastq(in), ParseError);
}

TEST(read_fastq, truncated_record_names_index) {
    std::istringstream in("@a\nAC\n+\nII\n@b\nACGT\n+\n");
    try {
        read_fastq(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
    }
}

TEST(read_fastq, thousand_records) {
    CorpusSpec spec;
    spec.records = 1000;
    const auto generated = synthetic_records(spec, 9);
    std::istringstream in(to_fastq(generated));
    const auto recs = read_fastq(in);
    ASSERT_EQ(recs.size(), 1000u);
    for (std::size_t i = 0; i < recs.size(); ++i) ASSERT_EQ(recs[i].bases, generated[i].bases);
}

TEST(fastx_reader, detects_format_from_first_byte) {
    std::istringstream fa(">x\nAC\n");
    FastxReader a(istream_source(fa));
    ASSERT_TRUE(a.next().has_value());
    EXPECT_EQ(a.format(), InputFormat::fasta);

    std::istringstream fq("@x\nAC\n+\nII\n");
    FastxReader b(istream_source(fq));
    ASSERT_TRUE(b.next().has_value());
    EXPECT_EQ(b.format(), InputFormat::fastq);

    std::istringstream empty("");
    FastxReader c(istream_source(empty));
    EXPECT_FALSE(c.next().has_value());

    std::istringstream junk("hello\n");
    FastxReader d(istream_source(junk));
    EXPECT_THROW(d.next(), ParseError);
}

TEST(fastx_reader, reads_gzip_files) {
    skc::test::TempDir dir;
    const auto path = (dir / "in.fa.gz").string();
    const std::string text = ">g1\nACGT\nTTTT\n>g2\nGG\n";
    gzFile gz = gzopen(path.c_str(), "wb");
    ASSERT_NE(gz, nullptr);
    gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
    gzclose(gz);

    std::vector<SequenceRecord> recs;
    for_each_record({path}, InputFormat::automatic, [&](uint64_t, SequenceRecord&& r) { recs.push_back(r); });
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].bases, "ACGTTTTT");
    EXPECT_EQ(recs[1].id, "g2");
}

TEST(fragment, splits_at_ambiguous_bases) {
    const auto frags = fragment({"r", "ACGTNNACG"}, 3);
    ASSERT_EQ(frags.size(), 2u);
    EXPECT_EQ(frags[0].bases, "ACGT");
    EXPECT_EQ(frags[0].offset, 0u);
    EXPECT_EQ(frags[1].bases, "ACG");
    EXPECT_EQ(frags[1].offset, 6u);
    EXPECT_EQ(frags[1].record_id, "r");
}

TEST(fragment, folds_case) {
    const auto frags = fragment({"r", "acgt"}, 4);
    ASSERT_EQ(frags.size(), 1u);
    EXPECT_EQ(frags[0].bases, "ACGT");
}

TEST(fragment, drops_short_runs_and_empty_records) {
    EXPECT_TRUE(fragment({"r", ""}, 3).empty());
    EXPECT_TRUE(fragment({"r", "ACNGTNRYA"}, 3).empty());
    EXPECT_THROW(fragment({"r", "ACGT"}, 0), std::invalid_argument);
}

TEST(fragment, window_total_matches_brute_force) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        std::string s = skc::test::random_acgt(rng, 10000);
        for (auto& c : s) {
            if (rng() % 100 == 0) c = 'N';
        }
        for (std::size_t k : {1u, 4u, 21u, 31u, 64u}) {
            std::size_t total = 0;
            for (const auto& f : fragment({"r", s}, k)) {
                ASSERT_GE(f.bases.size(), k);
                ASSERT_EQ(f.bases.find_first_not_of("ACGT"), std::string::npos);
                ASSERT_EQ(f.bases, s.substr(f.offset, f.bases.size()));
                total += f.bases.size() - k + 1;
            }
            ASSERT_EQ(total, clean_windows(s, k)) << "k=" << k;
        }
    }
}

#pragma once

// BM25 candidate generation over an in-memory inverted index.

#include "corank/corpus.hpp"
#include "corank/run.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace corank {

struct Posting {
    std::uint32_t doc = 0;  // internal document number, order of insertion
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

class InvertedIndex {
  public:
    /// Indexes every document; duplicate ids are rejected by the corpus itself.
    static InvertedIndex build(const Corpus& corpus);

    [[nodiscard]] std::size_t num_docs() const { return doc_ids_.size(); }
    [[nodiscard]] double avg_doc_length() const { return avg_length_; }
    [[nodiscard]] const std::vector<std::uint32_t>& doc_lengths() const { return lengths_; }
    [[nodiscard]] const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    [[nodiscard]] const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
    [[nodiscard]] const std::vector<Posting>* find(const std::string& term) const;
    [[nodiscard]] std::size_t df(const std::string& term) const;

    /// ln((N - df + 0.5) / (df + 0.5) + 1)
    [[nodiscard]] double idf(const std::string& term) const;

    /// Top-k by BM25; ties by doc id ascending. Unknown terms contribute nothing.
    [[nodiscard]] ScoredList search(const std::string& query_id, const std::vector<std::string>& query_terms,
                                    std::size_t k = 1000, Bm25Params params = {}) const;

    // On-disk layout, little-endian:
    //   magic "CRNKIDX1", u64 N, f64 average length,
    //   N x (u32 id length, id bytes, u32 doc length),
    //   u64 T, T x (u32 term length, term bytes, u64 posting count,
    //              count x (u32 doc, u32 tf))
    // Terms appear in byte order; postings in doc order.
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    friend bool operator==(const InvertedIndex&, const InvertedIndex&) = default;

  private:
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> lengths_;
    double avg_length_ = 0.0;
    std::map<std::string, std::vector<Posting>> postings_;
};

/// First m doc ids of a first-pass ranking.
std::vector<std::string> select_prf(const std::vector<std::string>& ranking, std::size_t m);

}  // namespace corank

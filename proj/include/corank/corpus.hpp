#pragma once

#include "corank/text.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace corank {

struct Document {
    std::string doc_id;
    std::vector<std::string> words;  // split_words of the text
};

/// Documents addressable by id, kept in insertion order.
class Corpus {
  public:
    void add(Document doc);
    [[nodiscard]] const Document& get(const std::string& doc_id) const;
    [[nodiscard]] bool contains(const std::string& doc_id) const { return index_.count(doc_id) != 0; }
    [[nodiscard]] std::size_t size() const { return docs_.size(); }
    [[nodiscard]] bool empty() const { return docs_.empty(); }
    [[nodiscard]] auto begin() const { return docs_.begin(); }
    [[nodiscard]] auto end() const { return docs_.end(); }

  private:
    std::vector<Document> docs_;
    std::map<std::string, std::size_t> index_;
};

struct Query {
    std::string query_id;
    std::string text;
};

/// JSONL, one {"doc_id": ..., "text": ...} object per line. Duplicate ids are an error.
Corpus read_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& docs);

/// `qid<TAB>text` per line.
std::vector<Query> read_queries_tsv(const std::filesystem::path& path);
void write_queries_tsv(const std::filesystem::path& path, const std::vector<Query>& queries);

}  // namespace corank

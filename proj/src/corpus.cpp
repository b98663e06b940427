#include "corank/corpus.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace corank {

void Corpus::add(Document doc)
{
    if (index_.count(doc.doc_id) != 0) {
        throw std::invalid_argument("duplicate doc_id: " + doc.doc_id);
    }
    index_.emplace(doc.doc_id, docs_.size());
    docs_.push_back(std::move(doc));
}

const Document& Corpus::get(const std::string& doc_id) const
{
    auto it = index_.find(doc_id);
    if (it == index_.end()) {
        throw std::out_of_range("unknown doc_id: " + doc_id);
    }
    return docs_[it->second];
}

Corpus read_corpus_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus " + path.string());
    }
    Corpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
            corpus.add(Document{obj.at("doc_id").get<std::string>(), split_words(obj.at("text").get<std::string>())});
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return corpus;
}

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& docs)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (auto const& [id, text] : docs) {
        out << nlohmann::json{{"doc_id", id}, {"text", text}}.dump() << '\n';
    }
}

std::vector<Query> read_queries_tsv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open queries " + path.string());
    }
    std::vector<Query> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected qid<TAB>text");
        }
        out.push_back(Query{line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

void write_queries_tsv(const std::filesystem::path& path, const std::vector<Query>& queries)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (auto const& q : queries) {
        out << q.query_id << '\t' << q.text << '\n';
    }
}

}  // namespace corank

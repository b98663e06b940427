#include "corank/firststage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace corank {

namespace {

template <typename T>
void put(std::ostream& out, T v)
{
    std::uint64_t bits;
    if constexpr (std::is_floating_point_v<T>) {
        bits = std::bit_cast<std::uint64_t>(static_cast<double>(v));
    } else {
        bits = static_cast<std::uint64_t>(v);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.put(static_cast<char>((bits >> (8 * i)) & 0xffU));
    }
}

template <typename T>
T get(std::istream& in)
{
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        const int c = in.get();
        if (c == std::char_traits<char>::eof()) {
            throw std::runtime_error("index: truncated file");
        }
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
    }
    if constexpr (std::is_floating_point_v<T>) {
        return std::bit_cast<double>(bits);
    } else {
        return static_cast<T>(bits);
    }
}

void put_string(std::ostream& out, const std::string& s)
{
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in)
{
    const auto len = get<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) {
        throw std::runtime_error("index: truncated file");
    }
    return s;
}

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus)
{
    if (corpus.empty()) {
        throw std::invalid_argument("build_index: empty corpus");
    }
    InvertedIndex idx;
    std::uint64_t total = 0;
    for (auto const& doc : corpus) {
        const auto number = static_cast<std::uint32_t>(idx.doc_ids_.size());
        idx.doc_ids_.push_back(doc.doc_id);
        idx.lengths_.push_back(static_cast<std::uint32_t>(doc.words.size()));
        total += doc.words.size();
        std::map<std::string, std::uint32_t> tf;
        for (auto const& w : doc.words) {
            ++tf[w];
        }
        for (auto const& [term, count] : tf) {
            idx.postings_[term].push_back(Posting{number, count});
        }
    }
    idx.avg_length_ = static_cast<double>(total) / static_cast<double>(idx.doc_ids_.size());
    return idx;
}

const std::vector<Posting>* InvertedIndex::find(const std::string& term) const
{
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::size_t InvertedIndex::df(const std::string& term) const
{
    const auto* p = find(term);
    return p == nullptr ? 0 : p->size();
}

double InvertedIndex::idf(const std::string& term) const
{
    const auto n = static_cast<double>(num_docs());
    const auto d = static_cast<double>(df(term));
    return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

ScoredList InvertedIndex::search(const std::string& query_id, const std::vector<std::string>& query_terms,
                                 std::size_t k, Bm25Params params) const
{
    if (k < 1) {
        throw std::invalid_argument("bm25_search: k must be at least 1");
    }
    std::unordered_map<std::uint32_t, double> acc;
    for (auto const& term : query_terms) {
        const auto* list = find(term);
        if (list == nullptr) {
            continue;
        }
        const double w = idf(term);
        for (auto const& p : *list) {
            const double tf = p.tf;
            const double norm = params.k1 * (1.0 - params.b + params.b * lengths_[p.doc] / avg_length_);
            acc[p.doc] += w * tf * (params.k1 + 1.0) / (tf + norm);
        }
    }
    ScoredList out{query_id, {}};
    out.entries.reserve(acc.size());
    for (auto const& [doc, score] : acc) {
        out.entries.push_back({doc_ids_[doc], score, 0});
    }
    out.sort();
    if (out.entries.size() > k) {
        out.entries.resize(k);
    }
    return out;
}

void InvertedIndex::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write("CRNKIDX1", 8);
    put<std::uint64_t>(out, doc_ids_.size());
    put<double>(out, avg_length_);
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        put_string(out, doc_ids_[i]);
        put<std::uint32_t>(out, lengths_[i]);
    }
    put<std::uint64_t>(out, postings_.size());
    for (auto const& [term, list] : postings_) {
        put_string(out, term);
        put<std::uint64_t>(out, list.size());
        for (auto const& p : list) {
            put<std::uint32_t>(out, p.doc);
            put<std::uint32_t>(out, p.tf);
        }
    }
    if (!out) {
        throw std::runtime_error("index: write failed for " + path.string());
    }
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open index " + path.string());
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "CRNKIDX1") {
        throw std::runtime_error("index: bad magic in " + path.string());
    }
    InvertedIndex idx;
    const auto n = get<std::uint64_t>(in);
    idx.avg_length_ = get<double>(in);
    for (std::uint64_t i = 0; i < n; ++i) {
        idx.doc_ids_.push_back(get_string(in));
        idx.lengths_.push_back(get<std::uint32_t>(in));
    }
    const auto terms = get<std::uint64_t>(in);
    for (std::uint64_t t = 0; t < terms; ++t) {
        std::string term = get_string(in);
        const auto count = get<std::uint64_t>(in);
        std::vector<Posting> list;
        list.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto doc = get<std::uint32_t>(in);
            const auto tf = get<std::uint32_t>(in);
            if (doc >= n) {
                throw std::runtime_error("index: posting refers to unknown document");
            }
            list.push_back(Posting{doc, tf});
        }
        idx.postings_.emplace(std::move(term), std::move(list));
    }
    return idx;
}

std::vector<std::string> select_prf(const std::vector<std::string>& ranking, std::size_t m)
{
    if (ranking.size() < m) {
        throw std::invalid_argument("select_prf: ranking has fewer than m documents");
    }
    return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(m)};
}

}  // namespace corank

#include "corank/text.hpp"

#include <cctype>
#include <stdexcept>

namespace corank {

std::vector<std::string> split_words(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::isspace(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            flush();
            out.emplace_back(1, ch);
        } else {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        }
    }
    flush();
    return out;
}

Vocabulary::Vocabulary(Index size, std::vector<std::string> words) : size_(size)
{
    if (size_ <= kFirstWordId + static_cast<Index>(words.size())) {
        throw std::invalid_argument("vocabulary size too small for the listed words");
    }
    for (auto& w : words) {
        table_.emplace(std::move(w), kFirstWordId + static_cast<Index>(table_.size()));
    }
}

Index Vocabulary::id(std::string_view word) const
{
    if (auto it = table_.find(std::string(word)); it != table_.end()) {
        return it->second;
    }
    const Index first = kFirstWordId + static_cast<Index>(table_.size());
    const auto span = static_cast<std::uint64_t>(size_ - first);
    return first + static_cast<Index>(fnv1a(word) % span);
}

std::vector<Index> Vocabulary::ids(const std::vector<std::string>& words) const
{
    std::vector<Index> out;
    out.reserve(words.size());
    for (auto const& w : words) {
        out.push_back(id(w));
    }
    return out;
}

std::vector<Index> tokenize(std::string_view text, const Vocabulary& vocab)
{
    return vocab.ids(split_words(text));
}

std::vector<Passage> window_passages(const std::string& doc_id, const std::vector<std::string>& words,
                                     std::size_t window, std::size_t stride)
{
    if (window == 0 || stride == 0 || stride > window) {
        throw std::invalid_argument("window_passages: need 0 < stride <= window");
    }
    std::vector<Passage> out;
    if (words.empty()) {
        out.push_back(Passage{doc_id, 0, {}});
        return out;
    }
    for (std::size_t start = 0; start < words.size(); start += stride) {
        const std::size_t end = std::min(words.size(), start + window);
        out.push_back(Passage{doc_id, start, {words.begin() + static_cast<std::ptrdiff_t>(start),
                                              words.begin() + static_cast<std::ptrdiff_t>(end)}});
        if (end == words.size()) {
            break;
        }
    }
    return out;
}

std::size_t TokenSequence::unpadded_length() const
{
    std::size_t n = 0;
    for (bool m : attention_mask) {
        n += m ? 1 : 0;
    }
    return n;
}

TokenSequence build_sequence(const std::vector<Index>& query, const std::vector<Index>& passage,
                             std::size_t max_seq_len)
{
    if (query.empty()) {
        throw std::invalid_argument("build_sequence: empty query");
    }
    if (query.size() + 3 > max_seq_len) {
        throw std::length_error("query too long");
    }
    const std::size_t room = max_seq_len - query.size() - 3;
    const std::size_t plen = std::min(room, passage.size());

    TokenSequence seq;
    seq.token_ids.reserve(max_seq_len);
    seq.token_ids.push_back(kClsId);
    seq.token_ids.insert(seq.token_ids.end(), query.begin(), query.end());
    seq.token_ids.push_back(kSepId);
    seq.segment_ids.assign(seq.token_ids.size(), 0);
    seq.token_ids.insert(seq.token_ids.end(), passage.begin(), passage.begin() + static_cast<std::ptrdiff_t>(plen));
    seq.token_ids.push_back(kSepId);
    seq.segment_ids.resize(seq.token_ids.size(), 1);
    seq.attention_mask.assign(seq.token_ids.size(), true);

    seq.token_ids.resize(max_seq_len, kPadId);
    seq.segment_ids.resize(max_seq_len, 0);
    seq.attention_mask.resize(max_seq_len, false);
    return seq;
}

TokenBatch make_token_batch(const std::vector<TokenSequence>& seqs)
{
    TokenBatch batch;
    if (seqs.empty()) {
        return batch;
    }
    batch.seq_len = static_cast<Index>(seqs.front().length());
    for (auto const& s : seqs) {
        if (static_cast<Index>(s.length()) != batch.seq_len) {
            throw shape_error("make_token_batch: sequences differ in length");
        }
        batch.token_ids.insert(batch.token_ids.end(), s.token_ids.begin(), s.token_ids.end());
        batch.segment_ids.insert(batch.segment_ids.end(), s.segment_ids.begin(), s.segment_ids.end());
        batch.mask.insert(batch.mask.end(), s.attention_mask.begin(), s.attention_mask.end());
    }
    return batch;
}

}  // namespace corank

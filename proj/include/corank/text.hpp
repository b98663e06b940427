#pragma once

// Tokenization, MaxP passage windowing and [CLS] q [SEP] p [SEP] sequences.

#include "corank/encoder.hpp"

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace corank {

inline constexpr Index kPadId = 0;
inline constexpr Index kClsId = 1;
inline constexpr Index kSepId = 2;
inline constexpr Index kUnkId = 3;
inline constexpr Index kFirstWordId = 4;

/// Lowercases ASCII and splits on whitespace; every ASCII punctuation
/// character becomes its own token.
std::vector<std::string> split_words(std::string_view text);

/// Word -> id mapping. Listed words get consecutive ids after the reserved
/// ones; anything else hashes into the remaining id space.
class Vocabulary {
  public:
    explicit Vocabulary(Index size = 30000, std::vector<std::string> words = {});

    [[nodiscard]] Index id(std::string_view word) const;
    [[nodiscard]] std::vector<Index> ids(const std::vector<std::string>& words) const;
    [[nodiscard]] Index size() const { return size_; }

  private:
    Index size_;
    std::unordered_map<std::string, Index> table_;
};

/// split_words followed by vocabulary lookup.
std::vector<Index> tokenize(std::string_view text, const Vocabulary& vocab);

struct Passage {
    std::string doc_id;
    std::size_t start_word = 0;
    std::vector<std::string> words;
};

/// Windows of `window` words starting every `stride` words, up to and
/// including the first window that reaches the end of the document. An empty
/// document yields one empty passage.
std::vector<Passage> window_passages(const std::string& doc_id, const std::vector<std::string>& words,
                                     std::size_t window = 150, std::size_t stride = 75);

struct TokenSequence {
    std::vector<Index> token_ids;
    std::vector<Index> segment_ids;
    std::vector<bool> attention_mask;

    [[nodiscard]] std::size_t length() const { return token_ids.size(); }
    [[nodiscard]] std::size_t unpadded_length() const;
};

/// [CLS] query [SEP] passage [SEP], passage truncated from the right to fit,
/// then padded with [PAD] to max_seq_len.
TokenSequence build_sequence(const std::vector<Index>& query, const std::vector<Index>& passage,
                             std::size_t max_seq_len = 256);

/// Packs equal-length sequences for the token encoder.
TokenBatch make_token_batch(const std::vector<TokenSequence>& seqs);

}  // namespace corank

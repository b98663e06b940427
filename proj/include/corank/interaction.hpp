#pragma once

#include "corank/text.hpp"

#include <functional>

namespace corank {

/// [CLS] output of every sequence: one H-row per sequence.
template <typename Scalar>
BasicTensor<Scalar> interaction_vectors(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                        const std::string& prefix, const std::vector<TokenSequence>& seqs)
{
    if (seqs.empty()) {
        throw std::invalid_argument("interaction_vectors: no sequences");
    }
    const TokenBatch batch = make_token_batch(seqs);
    auto encoded = encode_tokens(store, cfg, prefix, batch);
    std::vector<Index> cls_rows;
    cls_rows.reserve(seqs.size());
    for (Index s = 0; s < batch.sequences(); ++s) {
        cls_rows.push_back(s * batch.seq_len);
    }
    return take_rows(encoded, cls_rows);
}

template <typename Scalar>
BasicTensor<Scalar> interaction_vector(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                       const std::string& prefix, const TokenSequence& seq)
{
    return interaction_vectors(store, cfg, prefix, std::vector<TokenSequence>{seq});
}

/// Index of the highest-scoring passage; ties go to the smallest start offset.
inline std::size_t select_max_passage(const std::vector<Passage>& passages, const std::vector<double>& scores)
{
    if (passages.empty() || passages.size() != scores.size()) {
        throw std::invalid_argument("select_max_passage: need one score per passage");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < passages.size(); ++i) {
        if (scores[i] > scores[best]
            || (scores[i] == scores[best] && passages[i].start_word < passages[best].start_word)) {
            best = i;
        }
    }
    return best;
}

inline const Passage& select_max_passage(const std::vector<Passage>& passages,
                                         const std::function<double(const Passage&)>& scorer)
{
    std::vector<double> scores;
    scores.reserve(passages.size());
    for (auto const& p : passages) {
        scores.push_back(scorer(p));
    }
    return passages[select_max_passage(passages, scores)];
}

}  // namespace corank

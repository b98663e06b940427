#pragma once

// Groupwise scoring over overlapping windows of a ranking.

#include "corank/encoder.hpp"
#include "corank/run.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace corank {

struct GroupSchedule {
    std::size_t k = 0;
    std::size_t n = 0;
    std::size_t o = 0;
    // 1-based ranks into the initial ranking; padding is not listed.
    std::vector<std::vector<std::size_t>> groups;

    [[nodiscard]] std::size_t size() const { return groups.size(); }
    /// n-slot mask of group g (0-based): true for real documents, false for padding.
    [[nodiscard]] std::vector<bool> pad_mask(std::size_t g) const;
    [[nodiscard]] std::size_t padding(std::size_t g) const { return n - groups.at(g).size(); }
};

/// Windows of n ranks with stride n - o; the last one is padded up to n.
GroupSchedule schedule_groups(std::size_t k, std::size_t n, std::size_t o);

/// Each document keeps the score from the earliest group that contains it.
/// `ranking[r - 1]` is the doc id at rank r; `group_scores[g][s]` the score of
/// slot s of group g.
ScoredList merge_scores(const std::string& query_id, const std::vector<std::string>& ranking,
                        const std::vector<std::vector<double>>& group_scores, const GroupSchedule& schedule);

inline EncoderConfig group_encoder_config(int hidden, int heads, int layers, int group_size)
{
    EncoderConfig cfg;
    cfg.layers = layers;
    cfg.hidden = hidden;
    cfg.heads = heads;
    cfg.use_positional = false;
    cfg.max_positions = group_size;
    cfg.use_segments = false;
    cfg.input = EncoderInput::vectors;
    return cfg;
}

template <typename Scalar>
void init_group_scorer_params(ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                              const std::string& prefix, std::uint64_t seed)
{
    init_encoder_params(store, cfg, prefix, seed);
    store.add(prefix + "head.w", truncated_normal<Scalar>(cfg.hidden, 1, 0.02, seed, prefix + "head.w"));
    store.add(prefix + "head.b", Matrix<Scalar>::Zero(1, 1));
}

/// Scores one group jointly: n x H vectors in, n x 1 scores out (padded rows 0).
template <typename Scalar>
BasicTensor<Scalar> score_group(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                const std::string& prefix, const BasicTensor<Scalar>& vectors,
                                const std::vector<bool>& pad_mask)
{
    if (static_cast<Index>(pad_mask.size()) != vectors.rows()) {
        throw shape_error("score_group: expected one mask entry per vector");
    }
    if (vectors.rows() != cfg.max_positions) {
        throw shape_error("score_group: expected " + std::to_string(cfg.max_positions) + " vectors, got "
                          + std::to_string(vectors.rows()));
    }
    auto encoded = encode_vectors(store, cfg, prefix, vectors, vectors.rows(), pad_mask);
    auto scores = linear(encoded, store.get(prefix + "head.w"), store.get(prefix + "head.b"));
    return mask_rows(scores, pad_mask);
}

template <typename Scalar>
void init_pointwise_head(ParameterStore<Scalar>& store, int hidden, const std::string& prefix, std::uint64_t seed)
{
    store.add(prefix + "w", truncated_normal<Scalar>(hidden, 1, 0.02, seed, prefix + "w"));
    store.add(prefix + "b", Matrix<Scalar>::Zero(1, 1));
}

/// W_rel . r + b_rel for every row of `vectors`; n x 1.
template <typename Scalar>
BasicTensor<Scalar> pointwise_scores(const ParameterStore<Scalar>& store, const std::string& prefix,
                                     const BasicTensor<Scalar>& vectors)
{
    return linear(vectors, store.get(prefix + "w"), store.get(prefix + "b"));
}

template <typename Scalar>
Scalar pointwise_score(const Vector<Scalar>& r, const Vector<Scalar>& w, Scalar b)
{
    if (r.size() != w.size()) {
        throw shape_error("pointwise_score: dimension mismatch");
    }
    return w.dot(r) + b;
}

}  // namespace corank

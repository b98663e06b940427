#pragma once

// End-to-end re-ranking of one query's candidate pool:
// MaxP first pass -> PRF selection -> calibration -> groupwise scoring -> merge.

#include "corank/corpus.hpp"
#include "corank/firststage.hpp"
#include "corank/model.hpp"

namespace corank {

/// The candidate pool ordered by first-pass score (pointwise head on the best passage vector).
template <typename Scalar>
struct FirstPass {
    std::vector<std::string> ranking;
    std::vector<double> scores;
    std::vector<TokenSequence> best_sequences;  // MaxP passage of each ranked doc
    Matrix<Scalar> vectors;                     // r of each ranked doc, k x H
};

/// Query/passage sequences for every passage of a document.
inline std::vector<TokenSequence> passage_sequences(const ModelConfig& cfg, const Vocabulary& vocab,
                                                    const std::vector<Index>& query, const Document& doc)
{
    std::vector<TokenSequence> out;
    for (auto const& p : window_passages(doc.doc_id, doc.words, static_cast<std::size_t>(cfg.passage_window),
                                         static_cast<std::size_t>(cfg.passage_stride))) {
        out.push_back(build_sequence(query, vocab.ids(p.words), static_cast<std::size_t>(cfg.max_seq_len)));
    }
    return out;
}

template <typename Scalar>
FirstPass<Scalar> first_pass(const CoBert<Scalar>& model, const Vocabulary& vocab, const std::vector<Index>& query,
                             const std::vector<std::string>& candidates, const Corpus& corpus,
                             std::size_t chunk = 64)
{
    NoGradGuard no_grad;
    const auto& cfg = model.config();
    struct Item {
        std::size_t doc;
        std::size_t passage;
    };
    std::vector<std::vector<TokenSequence>> seqs(candidates.size());
    std::vector<Item> items;
    for (std::size_t d = 0; d < candidates.size(); ++d) {
        seqs[d] = passage_sequences(cfg, vocab, query, corpus.get(candidates[d]));
        for (std::size_t p = 0; p < seqs[d].size(); ++p) {
            items.push_back({d, p});
        }
    }
    std::vector<double> passage_score(items.size());
    Matrix<Scalar> passage_vec(static_cast<Index>(items.size()), cfg.hidden);
    for (std::size_t begin = 0; begin < items.size(); begin += chunk) {
        const std::size_t end = std::min(items.size(), begin + chunk);
        std::vector<TokenSequence> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(seqs[items[i].doc][items[i].passage]);
        }
        auto r = model.interactions(batch);
        auto s = model.pointwise(r);
        for (std::size_t i = begin; i < end; ++i) {
            passage_score[i] = static_cast<double>(s.value()(static_cast<Index>(i - begin), 0));
            passage_vec.row(static_cast<Index>(i)) = r.value().row(static_cast<Index>(i - begin));
        }
    }
    // MaxP: best passage per document, earliest on ties.
    std::vector<std::size_t> best(candidates.size(), items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& b = best[items[i].doc];
        if (b == items.size() || passage_score[i] > passage_score[b]) {
            b = i;
        }
    }
    ScoredList order{"", {}};
    for (std::size_t d = 0; d < candidates.size(); ++d) {
        order.entries.push_back({candidates[d], passage_score[best[d]], static_cast<int>(d)});
    }
    order.sort();

    FirstPass<Scalar> fp;
    fp.vectors.resize(static_cast<Index>(candidates.size()), cfg.hidden);
    for (std::size_t r = 0; r < order.entries.size(); ++r) {
        const auto d = static_cast<std::size_t>(order.entries[r].source_group);
        const Item& it = items[best[d]];
        fp.ranking.push_back(order.entries[r].doc_id);
        fp.scores.push_back(order.entries[r].score);
        fp.best_sequences.push_back(seqs[d][it.passage]);
        fp.vectors.row(static_cast<Index>(r)) = passage_vec.row(static_cast<Index>(best[d]));
    }
    return fp;
}

/// Rows of `vectors` at 1-based ranks, padded with zero rows up to n.
template <typename Scalar>
Matrix<Scalar> gather_group(const Matrix<Scalar>& vectors, const std::vector<std::size_t>& ranks, std::size_t n)
{
    Matrix<Scalar> out = Matrix<Scalar>::Zero(static_cast<Index>(n), vectors.cols());
    for (std::size_t s = 0; s < ranks.size(); ++s) {
        out.row(static_cast<Index>(s)) = vectors.row(static_cast<Index>(ranks[s] - 1));
    }
    return out;
}

struct RerankOptions {
    Variant variant = Variant::full;
    std::optional<bool> residual;  // defaults to the model configuration
};

/// Scores the pool with the groupwise re-ranker; returns the merged ranking.
template <typename Scalar>
ScoredList rerank_query(const CoBert<Scalar>& model, const Vocabulary& vocab, const std::string& query_id,
                        const std::vector<Index>& query, const std::vector<std::string>& candidates,
                        const Corpus& corpus, RerankOptions opts = {})
{
    if (candidates.empty()) {
        return ScoredList{query_id, {}};
    }
    const auto& cfg = model.config();
    const FirstPass<Scalar> fp = first_pass(model, vocab, query, candidates, corpus);
    NoGradGuard no_grad;

    std::optional<BasicTensor<Scalar>> prototypes;
    if (opts.variant != Variant::group_only) {
        const auto prf = select_prf(fp.ranking, static_cast<std::size_t>(cfg.prf_docs));
        prototypes = BasicTensor<Scalar>(Matrix<Scalar>(fp.vectors.topRows(static_cast<Index>(prf.size()))));
    }
    const auto schedule = schedule_groups(fp.ranking.size(), static_cast<std::size_t>(cfg.group_size),
                                          static_cast<std::size_t>(cfg.group_overlap));
    std::vector<std::vector<double>> scores(schedule.size());
    for (std::size_t g = 0; g < schedule.size(); ++g) {
        BasicTensor<Scalar> group(gather_group(fp.vectors, schedule.groups[g], schedule.n));
        auto s = model.score_group(opts.variant, prototypes, group, schedule.pad_mask(g), opts.residual);
        for (Index i = 0; i < s.rows(); ++i) {
            scores[g].push_back(static_cast<double>(s.value()(i, 0)));
        }
    }
    return merge_scores(query_id, fp.ranking, scores, schedule);
}

}  // namespace corank

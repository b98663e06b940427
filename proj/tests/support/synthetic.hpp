#pragma once

// Generated re-ranking benchmark. Each query draws three terms from a shared
// term list. Its relevant documents carry a hidden facet token and its decoys
// a distractor token, both drawn from one small pool, and both match the query
// terms equally. Facets may lean toward the first half of the pool, which
// gives a pointwise prior; the rest of the signal lies in the PRF documents
// and in the make-up of each group.

#include "corank/corpus.hpp"
#include "corank/evalkit.hpp"
#include "corank/trainer.hpp"

#include <map>
#include <string>
#include <vector>

namespace corank::synthetic {

struct Options {
    std::size_t queries = 60;
    std::size_t docs_per_query = 200;
    std::size_t relevant = 20;
    std::size_t decoys = 40;
    std::size_t pool = 12;
    std::size_t token_copies = 1;
    double facet_bias = 0.5;
    std::size_t relevant_overlap_min = 2;
    std::size_t relevant_overlap_max = 4;
    std::size_t decoy_overlap_min = 2;
    std::size_t decoy_overlap_max = 3;
    std::size_t filler = 60;
    std::size_t query_terms = 40;
    std::size_t doc_length = 8;
    std::uint64_t seed = 1;

    // Two query kinds, marked by a kind term in the query text. In anchored
    // queries relevant and decoy documents are equally many, and `anchors` of
    // the relevant ones carry `anchor_overlap` query terms so they lead the
    // ranking. In crowded queries the decoy count is as above, and the anchors
    // carry a third pool token and are not relevant. A fraction of 0 disables
    // kinds entirely.
    double anchored_fraction = 0.0;
    std::size_t anchors = 4;
    std::size_t anchor_overlap = 4;
};

struct Dataset {
    Corpus corpus;
    Qrels qrels;
    std::vector<std::string> query_ids;
    std::map<std::string, std::string> query_text;
    std::map<std::string, std::vector<std::string>> candidates;
    std::vector<std::string> words;  // every word the generator can emit
};

Dataset generate(const Options& opts);

/// TrainingData view over a dataset; `vocab` must outlive the result.
TrainingData training_view(const Dataset& data, const Vocabulary& vocab);

/// Writes corpus.jsonl, queries.tsv and qrels.txt into `dir`.
void write_files(const Dataset& data, const std::filesystem::path& dir);

}  // namespace corank::synthetic

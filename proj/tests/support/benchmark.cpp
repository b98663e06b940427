#include "benchmark.hpp"

#include <chrono>

namespace corank::synthetic {

Benchmark default_benchmark(Variant variant, std::uint64_t seed)
{
    Benchmark b;
    b.train_queries = 84;
    b.validation_queries = 48;
    b.test_queries = 192;

    Options& o = b.data;
    o.docs_per_query = 200;
    o.relevant = 20;
    o.decoys = 80;
    o.pool = 6;
    o.token_copies = 1;
    o.facet_bias = 0.5;
    o.relevant_overlap_min = 2;
    o.relevant_overlap_max = 3;
    o.decoy_overlap_min = 2;
    o.decoy_overlap_max = 3;
    o.filler = 60;
    o.query_terms = 3;
    o.doc_length = 5;
    o.anchored_fraction = 0.5;
    o.seed = seed;

    ModelConfig& mc = b.model;
    mc.hidden = 32;
    mc.heads = 4;
    mc.base_layers = 1;
    mc.calibration_layers = 1;
    mc.group_layers = 2;
    mc.max_seq_len = 16;
    mc.passage_window = 12;
    mc.passage_stride = 6;
    mc.prf_docs = 4;
    mc.group_size = 20;
    mc.group_overlap = 2;
    mc.candidates = 200;

    TrainConfig& tc = b.training;
    tc.epochs = 30;
    tc.base_lr = 1e-3;
    tc.variant = variant;
    tc.seed = seed;
    return b;
}

BenchmarkResult run_benchmark(Benchmark bench, const TrainLogger& log)
{
    const auto start = std::chrono::steady_clock::now();
    bench.data.queries = bench.train_queries + bench.validation_queries + bench.test_queries;
    const Dataset data = generate(bench.data);
    // Every generated word gets its own id; a few hash slots stay free.
    bench.model.vocab_size = static_cast<int>(data.words.size() + kFirstWordId + 8);
    const Vocabulary vocab(bench.model.vocab_size, data.words);
    const TrainingData view = training_view(data, vocab);
    CoBert<double> model(bench.model, bench.training.seed);

    const auto at = [&](std::size_t i) { return data.query_ids.begin() + static_cast<std::ptrdiff_t>(i); };
    const std::size_t val_start = bench.train_queries;
    const std::size_t test_start = val_start + bench.validation_queries;
    const std::vector<std::string> train_ids(at(0), at(val_start));
    const std::vector<std::string> val_ids(at(val_start), at(test_start));
    const std::vector<std::string> test_ids(at(test_start), data.query_ids.end());

    train(model, view, train_ids, val_ids, bench.training, log);

    BenchmarkResult r;
    r.test_ndcg = validation_ndcg(model, view, test_ids, bench.training.variant);
    if (bench.data.anchored_fraction > 0.0) {
        std::vector<std::string> anchored;
        std::vector<std::string> crowded;
        for (auto const& q : test_ids) {
            const auto& text = data.query_text.at(q);
            (text.ends_with("anchored") ? anchored : crowded).push_back(q);
        }
        if (!anchored.empty()) {
            r.anchored_ndcg = validation_ndcg(model, view, anchored, bench.training.variant);
        }
        if (!crowded.empty()) {
            r.crowded_ndcg = validation_ndcg(model, view, crowded, bench.training.variant);
        }
    }
    std::vector<ScoredList> lists;
    Qrels subset;
    for (auto const& q : test_ids) {
        auto fp = first_pass(model, vocab, view.queries.at(q), view.candidates.at(q), data.corpus);
        ScoredList l{q, {}};
        for (std::size_t i = 0; i < fp.ranking.size(); ++i) {
            l.entries.push_back({fp.ranking[i], fp.scores[i], 0});
        }
        lists.push_back(l);
        for (auto const& [d, g] : data.qrels.judgments().at(q)) {
            subset.set(q, d, g);
        }
    }
    r.first_pass_ndcg = ndcg_at(Run::from_lists(lists, "first-pass"), subset, 20).mean;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace corank::synthetic

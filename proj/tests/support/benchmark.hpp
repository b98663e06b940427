#pragma once

// The synthetic effectiveness benchmark: one generated collection per seed,
// split into training, validation and test queries, and a small model
// trained per variant.

#include "synthetic.hpp"

namespace corank::synthetic {

struct Benchmark {
    Options data;
    std::size_t train_queries = 0;
    std::size_t validation_queries = 0;
    std::size_t test_queries = 0;
    ModelConfig model;
    TrainConfig training;
};

/// The configuration used by the acceptance run.
Benchmark default_benchmark(Variant variant, std::uint64_t seed);

struct BenchmarkResult {
    double test_ndcg = 0.0;        // re-ranked, on the test queries
    double first_pass_ndcg = 0.0;  // pointwise ranking of the trained model, same queries
    double anchored_ndcg = 0.0;    // test queries of each kind, when kinds are enabled
    double crowded_ndcg = 0.0;
    double seconds = 0.0;
};

BenchmarkResult run_benchmark(Benchmark bench, const TrainLogger& log = {});

}  // namespace corank::synthetic

#pragma once

// Analytic inference cost.
//
// Convention: a product of an (m x k) and a (k x n) matrix costs 2mkn FLOPs.
// Only matrix products are counted: the Q/K/V/output projections, the two
// attention products (QK^T and PV), the two feed-forward products and the
// scoring heads. Embedding lookups, bias adds, softmax, GELU and layer norm
// are not counted. The tensor core's FlopCounter uses the same rule, so the
// closed forms here can be checked against an instrumented forward pass.

#include "corank/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace corank {

constexpr std::uint64_t matmul_flops(std::uint64_t m, std::uint64_t k, std::uint64_t n) { return 2 * m * k * n; }

/// One sequence of `seq_len` rows through the stack.
std::uint64_t encoder_flops(const EncoderConfig& cfg, std::uint64_t seq_len);

/// FLOPs of an H -> 1 projection applied to `rows` vectors.
constexpr std::uint64_t head_flops(std::uint64_t rows, std::uint64_t hidden) { return matmul_flops(rows, hidden, 1); }

struct StageCost {
    double passages = 0.0;
    double flops = 0.0;
};

struct FlopsReport {
    std::string model;
    std::size_t queries = 0;
    StageCost first_pass;
    StageCost second_pass;
    double total = 0.0;
    double per_query = 0.0;
    double ratio = 1.0;        // total / baseline total
    double avg_passages = 0.0; // c-bar, first-pass passages per document (0 when unknown)
};

/// Totals, per-query cost and ratio against `baseline_total`
/// (defaults to the first-pass total, i.e. a single-pass re-ranker).
FlopsReport pipeline_flops(std::string model, std::size_t queries, StageCost first, StageCost second,
                           double baseline_total = -1.0);

/// Per-query stage costs of the re-ranker under this convention, for k
/// candidates averaging `avg_passages` passages each.
struct QueryCost {
    StageCost first_pass;
    StageCost second_pass;
};
QueryCost cobert_query_cost(const ModelConfig& cfg, Variant variant, std::size_t k, double avg_passages);

/// Second-pass slots per query: groups x (n + m), or groups x n without PRF.
std::uint64_t second_pass_passages(std::size_t k, std::size_t n, std::size_t o, std::size_t m, Variant variant);

/// Tab-separated rows with the columns
/// model, #Q, first #passages, first FLOPs(T), second #passages,
/// second FLOPs(T), FLOPs(T)/query, total (ratio).
void write_flops_tsv(std::ostream& out, const std::vector<FlopsReport>& reports, double unit = 1e12);

}  // namespace corank

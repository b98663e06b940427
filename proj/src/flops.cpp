#include "corank/flops.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace corank {

std::uint64_t encoder_flops(const EncoderConfig& cfg, std::uint64_t seq_len)
{
    if (seq_len > static_cast<std::uint64_t>(cfg.max_positions)) {
        throw std::length_error("encoder_flops: sequence exceeds max positions");
    }
    const std::uint64_t h = cfg.hidden;
    const std::uint64_t f = cfg.ffn();
    const std::uint64_t s = seq_len;
    const std::uint64_t projections = 4 * matmul_flops(s, h, h);
    // QK^T and PV summed over heads: 2 * (2 * s * s * h/heads) * heads.
    const std::uint64_t attention = 2 * matmul_flops(s, s, h);
    const std::uint64_t ffn = matmul_flops(s, h, f) + matmul_flops(s, f, h);
    return static_cast<std::uint64_t>(cfg.layers) * (projections + attention + ffn);
}

FlopsReport pipeline_flops(std::string model, std::size_t queries, StageCost first, StageCost second,
                           double baseline_total)
{
    if (queries == 0) {
        throw std::invalid_argument("pipeline_flops: query count must be positive");
    }
    if (first.passages < 0 || second.passages < 0 || first.flops < 0 || second.flops < 0) {
        throw std::invalid_argument("pipeline_flops: counts must be non-negative");
    }
    FlopsReport r;
    r.model = std::move(model);
    r.queries = queries;
    r.first_pass = first;
    r.second_pass = second;
    r.total = first.flops + second.flops;
    r.per_query = r.total / static_cast<double>(queries);
    const double base = baseline_total < 0 ? first.flops : baseline_total;
    r.ratio = base > 0 ? r.total / base : 1.0;
    return r;
}

std::uint64_t second_pass_passages(std::size_t k, std::size_t n, std::size_t o, std::size_t m, Variant variant)
{
    const auto groups = static_cast<std::uint64_t>(schedule_groups(k, n, o).size());
    const std::uint64_t slots = variant == Variant::group_only ? n : n + m;
    return groups * slots;
}

QueryCost cobert_query_cost(const ModelConfig& cfg, Variant variant, std::size_t k, double avg_passages)
{
    const std::uint64_t h = cfg.hidden;
    const auto n = static_cast<std::uint64_t>(cfg.group_size);
    const auto m = static_cast<std::uint64_t>(cfg.prf_docs);
    const double per_passage = static_cast<double>(encoder_flops(cfg.base_encoder(), cfg.max_seq_len) + head_flops(1, h));

    QueryCost q;
    q.first_pass.passages = static_cast<double>(k) * avg_passages;
    q.first_pass.flops = q.first_pass.passages * per_passage;

    const auto groups = static_cast<double>(schedule_groups(k, cfg.group_size, cfg.group_overlap).size());
    q.second_pass.passages = static_cast<double>(
        second_pass_passages(k, cfg.group_size, cfg.group_overlap, cfg.prf_docs, variant));
    double per_group = 0.0;
    if (variant != Variant::group_only) {
        per_group += static_cast<double>(n * m * encoder_flops(cfg.calibration_encoder(), 2) + head_flops(m, h));
    }
    if (variant == Variant::prf_only) {
        per_group += static_cast<double>(head_flops(n, h));
    } else {
        per_group += static_cast<double>(encoder_flops(cfg.group_encoder(), n) + head_flops(n, h));
    }
    q.second_pass.flops = q.second_pass.passages * per_passage + groups * per_group;
    return q;
}

void write_flops_tsv(std::ostream& out, const std::vector<FlopsReport>& reports, double unit)
{
    out << "model\t#Q\tfirst_passages\tfirst_flops\tsecond_passages\tsecond_flops\tflops_per_query\ttotal\n";
    char buf[512];
    for (auto const& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.0f\t%.3f\t%.0f\t%.3f\t%.3f\t%.3fx\n", r.model.c_str(), r.queries,
                      r.first_pass.passages, r.first_pass.flops / unit, r.second_pass.passages,
                      r.second_pass.flops / unit, r.per_query / unit, r.ratio);
        out << buf;
    }
}

}  // namespace corank

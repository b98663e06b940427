#pragma once

// PRF calibration of interaction vectors.
//
// Each candidate vector r_j is paired with every prototype t_i as the
// two-row sequence (t_i, r_j) and passed through a shallow vector encoder.
// The row in r_j's slot is rt_ij. The prototypes are weighted by a softmax
// over the m logits W_t t_i + b_t, the weighted rt_ij are summed into r'_j and,
// with the residual enabled, averaged with r_j.

#include "corank/interaction.hpp"

#include <unordered_set>

namespace corank {

/// Output slot of the two-row calibration sequence taken as rt_ij.
inline constexpr Index kCalibratedSlot = 1;

inline EncoderConfig calibration_encoder_config(int hidden, int heads, int layers = 2)
{
    EncoderConfig cfg;
    cfg.layers = layers;
    cfg.hidden = hidden;
    cfg.heads = heads;
    cfg.use_positional = true;
    cfg.max_positions = 2;
    cfg.use_segments = false;
    cfg.input = EncoderInput::vectors;
    return cfg;
}

template <typename Scalar>
struct PrototypeSet {
    std::string query_id;
    BasicTensor<Scalar> vectors;  // m x H
    std::vector<std::string> source_doc_ids;

    [[nodiscard]] Index size() const { return vectors.rows(); }
};

/// t_i for each PRF passage sequence, computed with the candidates' base encoder.
template <typename Scalar>
PrototypeSet<Scalar> build_prototypes(const ParameterStore<Scalar>& store, const EncoderConfig& base_cfg,
                                      const std::string& base_prefix, std::string query_id,
                                      const std::vector<TokenSequence>& prf_sequences,
                                      std::vector<std::string> prf_doc_ids)
{
    if (prf_sequences.empty()) {
        throw std::invalid_argument("calibration requires m >= 1");
    }
    if (prf_sequences.size() != prf_doc_ids.size()) {
        throw std::invalid_argument("build_prototypes: one doc id per PRF sequence");
    }
    std::unordered_set<std::string> distinct(prf_doc_ids.begin(), prf_doc_ids.end());
    if (distinct.size() != prf_doc_ids.size()) {
        throw std::invalid_argument("build_prototypes: PRF documents must be distinct");
    }
    return PrototypeSet<Scalar>{std::move(query_id), interaction_vectors(store, base_cfg, base_prefix, prf_sequences),
                                std::move(prf_doc_ids)};
}

template <typename Scalar>
void init_calibrator_params(ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                            const std::string& prefix, std::uint64_t seed)
{
    init_encoder_params(store, cfg, prefix, seed);
    store.add(prefix + "proto.w", truncated_normal<Scalar>(cfg.hidden, 1, 0.02, seed, prefix + "proto.w"));
    store.add(prefix + "proto.b", Matrix<Scalar>::Zero(1, 1));
}

/// softmax over prototypes of W_t t_i + b_t, as an m x 1 column.
template <typename Scalar>
BasicTensor<Scalar> prototype_weights(const ParameterStore<Scalar>& store, const std::string& prefix,
                                      const BasicTensor<Scalar>& prototypes)
{
    if (prototypes.rows() < 1) {
        throw std::invalid_argument("prototype_weights: need m >= 1");
    }
    auto logits = matmul(prototypes, store.get(prefix + "proto.w"));  // m x 1
    auto bias = take_rows(store.get(prefix + "proto.b"), std::vector<Index>(static_cast<std::size_t>(logits.rows()), 0));
    return transpose(softmax_rows(transpose(add(logits, bias))));
}

template <typename Scalar>
struct Calibration {
    BasicTensor<Scalar> weights;     // m x 1
    BasicTensor<Scalar> pairwise;    // (n*m) x H, row j*m + i holds rt_ij
    BasicTensor<Scalar> combined;    // n x H, r'_j
    BasicTensor<Scalar> calibrated;  // n x H, r^_j
};

template <typename Scalar>
Calibration<Scalar> calibrate(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                              const std::string& prefix, const BasicTensor<Scalar>& prototypes,
                              const BasicTensor<Scalar>& candidates, bool residual)
{
    if (prototypes.cols() != candidates.cols() || prototypes.cols() != cfg.hidden) {
        throw shape_error("calibrate: prototype and candidate widths must equal the hidden size");
    }
    const Index m = prototypes.rows();
    const Index n = candidates.rows();
    if (m < 1) {
        throw std::invalid_argument("calibration requires m >= 1");
    }
    // Stack [T; R] and gather (t_i, r_j) pairs, pair index j*m + i.
    auto stacked = concat_rows<Scalar>({prototypes, candidates});
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(2 * n * m));
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            order.push_back(i);
            order.push_back(m + j);
        }
    }
    auto pairs = take_rows(stacked, order);
    std::vector<bool> mask(order.size(), true);
    auto encoded = encode_vectors(store, cfg, prefix, pairs, 2, mask);
    std::vector<Index> slots;
    slots.reserve(static_cast<std::size_t>(n * m));
    for (Index p = 0; p < n * m; ++p) {
        slots.push_back(2 * p + kCalibratedSlot);
    }
    Calibration<Scalar> out;
    out.pairwise = take_rows(encoded, slots);
    out.weights = prototype_weights(store, prefix, prototypes);
    out.combined = weighted_block_sum(out.pairwise, out.weights);
    out.calibrated = residual ? scale(add(candidates, out.combined), Scalar(0.5)) : out.combined;
    return out;
}

}  // namespace corank

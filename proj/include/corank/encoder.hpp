#pragma once

// Post-LN transformer encoder stacks (BERT ordering) over the tensor core.
//
// Two input kinds exist. Token stacks embed ids (word + segment + position,
// then layer norm). Vector stacks take pre-embedded rows and only add
// positional rows when enabled; with zero layers and no positions they are the
// identity on unmasked rows.

#include "corank/parameters.hpp"

#include <string>
#include <vector>

namespace corank {

enum class EncoderInput { tokens, vectors };

struct EncoderConfig {
    int layers = 1;
    int hidden = 32;
    int heads = 4;
    int ffn_dim = 0;  // 0 means 4 * hidden
    bool use_positional = true;
    int max_positions = 64;
    int vocab_size = 30000;
    bool use_segments = true;
    EncoderInput input = EncoderInput::tokens;

    [[nodiscard]] int ffn() const { return ffn_dim > 0 ? ffn_dim : 4 * hidden; }

    void validate() const
    {
        if (layers < 0 || hidden <= 0 || heads <= 0 || max_positions <= 0) {
            throw std::invalid_argument("encoder config: sizes must be positive");
        }
        if (hidden % heads != 0) {
            throw std::invalid_argument("encoder config: hidden size must be divisible by heads");
        }
        if (input == EncoderInput::tokens && vocab_size <= 0) {
            throw std::invalid_argument("encoder config: vocab_size must be positive");
        }
    }
};

/// Number of scalars init_encoder_params creates for this configuration.
inline std::size_t encoder_parameter_count(const EncoderConfig& cfg)
{
    const std::size_t h = cfg.hidden;
    const std::size_t f = cfg.ffn();
    std::size_t n = 0;
    if (cfg.input == EncoderInput::tokens) {
        n += static_cast<std::size_t>(cfg.vocab_size) * h + 2 * h;
        if (cfg.use_segments) {
            n += 2 * h;
        }
    }
    if (cfg.use_positional) {
        n += static_cast<std::size_t>(cfg.max_positions) * h;
    }
    const std::size_t per_layer = 4 * (h * h + h) + (h * f + f) + (f * h + h) + 4 * h;
    return n + per_layer * static_cast<std::size_t>(cfg.layers);
}

/// Adds the stack's parameters under `prefix` (e.g. "base.").
template <typename Scalar>
void init_encoder_params(ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                         const std::string& prefix, std::uint64_t seed)
{
    cfg.validate();
    const Index h = cfg.hidden;
    const Index f = cfg.ffn();
    auto normal = [&](const std::string& name, Index r, Index c) {
        store.add(prefix + name, truncated_normal<Scalar>(r, c, 0.02, seed, prefix + name));
    };
    auto zeros = [&](const std::string& name, Index r, Index c) {
        store.add(prefix + name, Matrix<Scalar>::Zero(r, c));
    };
    auto ones = [&](const std::string& name, Index r, Index c) {
        store.add(prefix + name, Matrix<Scalar>::Ones(r, c));
    };
    if (cfg.input == EncoderInput::tokens) {
        normal("embeddings.word", cfg.vocab_size, h);
        if (cfg.use_segments) {
            normal("embeddings.segment", 2, h);
        }
        ones("embeddings.ln.gamma", 1, h);
        zeros("embeddings.ln.beta", 1, h);
    }
    if (cfg.use_positional) {
        normal("embeddings.position", cfg.max_positions, h);
    }
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string p = "layer" + std::to_string(l) + ".";
        for (const char* w : {"wq", "wk", "wv", "wo"}) {
            normal(p + "attn." + w, h, h);
            zeros(p + "attn.b" + std::string(w + 1), 1, h);
        }
        ones(p + "attn_ln.gamma", 1, h);
        zeros(p + "attn_ln.beta", 1, h);
        normal(p + "ffn.w1", h, f);
        zeros(p + "ffn.b1", 1, f);
        normal(p + "ffn.w2", f, h);
        zeros(p + "ffn.b2", 1, h);
        ones(p + "ffn_ln.gamma", 1, h);
        zeros(p + "ffn_ln.beta", 1, h);
    }
}

template <typename Scalar>
ParameterStore<Scalar> init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed,
                                           const std::string& prefix = "")
{
    ParameterStore<Scalar> store;
    init_encoder_params(store, cfg, prefix, seed);
    return store;
}

/// Flattened batch of token sequences, all of length seq_len.
struct TokenBatch {
    std::vector<Index> token_ids;
    std::vector<Index> segment_ids;
    std::vector<bool> mask;
    Index seq_len = 0;

    [[nodiscard]] Index sequences() const
    {
        return seq_len == 0 ? 0 : static_cast<Index>(token_ids.size()) / seq_len;
    }
};

namespace detail {

inline void check_length(const EncoderConfig& cfg, Index seq_len)
{
    if (seq_len > cfg.max_positions) {
        throw std::length_error("sequence of length " + std::to_string(seq_len)
                                + " exceeds max positions (" + std::to_string(cfg.max_positions) + ")");
    }
}

inline std::vector<Index> position_ids(Index blocks, Index seq_len)
{
    std::vector<Index> ids;
    ids.reserve(static_cast<std::size_t>(blocks * seq_len));
    for (Index b = 0; b < blocks; ++b) {
        for (Index s = 0; s < seq_len; ++s) {
            ids.push_back(s);
        }
    }
    return ids;
}

template <typename Scalar>
BasicTensor<Scalar> encoder_layers(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                   const std::string& prefix, BasicTensor<Scalar> x, Index seq_len,
                                   const std::vector<bool>& mask)
{
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string p = prefix + "layer" + std::to_string(l) + ".";
        auto w = [&](const std::string& n) -> const BasicTensor<Scalar>& { return store.get(p + n); };
        auto q = linear(x, w("attn.wq"), w("attn.bq"));
        auto k = linear(x, w("attn.wk"), w("attn.bk"));
        auto v = linear(x, w("attn.wv"), w("attn.bv"));
        auto ctx = attention(q, k, v, seq_len, cfg.heads, mask);
        auto attn_out = linear(ctx, w("attn.wo"), w("attn.bo"));
        x = layer_norm_rows(add(x, attn_out), w("attn_ln.gamma"), w("attn_ln.beta"));
        auto hidden = gelu(linear(x, w("ffn.w1"), w("ffn.b1")));
        auto ffn_out = linear(hidden, w("ffn.w2"), w("ffn.b2"));
        x = layer_norm_rows(add(x, ffn_out), w("ffn_ln.gamma"), w("ffn_ln.beta"));
    }
    return mask_rows(x, mask);
}

}  // namespace detail

/// Encodes blocks of pre-embedded rows. `inputs` is (blocks * seq_len) x H;
/// output has the same shape with masked rows zeroed.
template <typename Scalar>
BasicTensor<Scalar> encode_vectors(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                   const std::string& prefix, const BasicTensor<Scalar>& inputs,
                                   Index seq_len, const std::vector<bool>& mask)
{
    if (cfg.input != EncoderInput::vectors) {
        throw std::invalid_argument("encode_vectors: stack expects token input");
    }
    if (inputs.cols() != cfg.hidden) {
        throw shape_error("encode_vectors: input width must equal hidden size");
    }
    if (seq_len <= 0 || inputs.rows() % seq_len != 0) {
        throw shape_error("encode_vectors: rows must be a multiple of the sequence length");
    }
    if (static_cast<Index>(mask.size()) != inputs.rows()) {
        throw shape_error("encode_vectors: mask length must equal row count");
    }
    detail::check_length(cfg, seq_len);
    BasicTensor<Scalar> x = inputs;
    if (cfg.use_positional) {
        auto pos = take_rows(store.get(prefix + "embeddings.position"),
                             detail::position_ids(inputs.rows() / seq_len, seq_len));
        x = add(x, pos);
    }
    return detail::encoder_layers(store, cfg, prefix, x, seq_len, mask);
}

/// Encodes a batch of token sequences; output is (sequences * seq_len) x H.
template <typename Scalar>
BasicTensor<Scalar> encode_tokens(const ParameterStore<Scalar>& store, const EncoderConfig& cfg,
                                  const std::string& prefix, const TokenBatch& batch)
{
    if (cfg.input != EncoderInput::tokens) {
        throw std::invalid_argument("encode_tokens: stack expects vector input");
    }
    const Index seq_len = batch.seq_len;
    if (seq_len <= 0 || batch.token_ids.size() % static_cast<std::size_t>(seq_len) != 0
        || batch.segment_ids.size() != batch.token_ids.size() || batch.mask.size() != batch.token_ids.size()) {
        throw shape_error("encode_tokens: inconsistent batch layout");
    }
    detail::check_length(cfg, seq_len);
    BasicTensor<Scalar> x = take_rows(store.get(prefix + "embeddings.word"), batch.token_ids);
    if (cfg.use_segments) {
        x = add(x, take_rows(store.get(prefix + "embeddings.segment"), batch.segment_ids));
    }
    if (cfg.use_positional) {
        x = add(x, take_rows(store.get(prefix + "embeddings.position"),
                             detail::position_ids(batch.sequences(), seq_len)));
    }
    x = layer_norm_rows(x, store.get(prefix + "embeddings.ln.gamma"), store.get(prefix + "embeddings.ln.beta"));
    return detail::encoder_layers(store, cfg, prefix, x, seq_len, batch.mask);
}

}  // namespace corank

#pragma once

// The full re-ranker: a token encoder producing interaction vectors, the PRF
// calibrator, the groupwise scorer and a pointwise head. Parameter names are
// grouped under "base.", "calibrator.", "scorer." and "head.rel.".

#include "corank/calibrator.hpp"
#include "corank/group_scorer.hpp"

#include <optional>

namespace corank {

enum class Variant { full, prf_only, group_only };

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);

struct ModelConfig {
    int hidden = 32;
    int heads = 4;
    int base_layers = 2;
    int calibration_layers = 2;
    int group_layers = 4;
    int vocab_size = 30000;
    int max_seq_len = 256;
    int passage_window = 150;
    int passage_stride = 75;
    int prf_docs = 4;      // m
    int group_size = 60;   // n
    int group_overlap = 4; // o
    int candidates = 1000; // k
    bool residual = true;
    std::uint64_t seed = 42;

    void validate() const;

    [[nodiscard]] EncoderConfig base_encoder() const
    {
        EncoderConfig cfg;
        cfg.layers = base_layers;
        cfg.hidden = hidden;
        cfg.heads = heads;
        cfg.use_positional = true;
        cfg.max_positions = max_seq_len;
        cfg.vocab_size = vocab_size;
        cfg.use_segments = true;
        cfg.input = EncoderInput::tokens;
        return cfg;
    }
    [[nodiscard]] EncoderConfig calibration_encoder() const
    {
        return calibration_encoder_config(hidden, heads, calibration_layers);
    }
    [[nodiscard]] EncoderConfig group_encoder() const
    {
        return group_encoder_config(hidden, heads, group_layers, group_size);
    }
};

inline const std::string kBasePrefix = "base.";
inline const std::string kCalibratorPrefix = "calibrator.";
inline const std::string kScorerPrefix = "scorer.";
inline const std::string kRelHeadPrefix = "head.rel.";

template <typename Scalar>
class CoBert {
  public:
    using tensor_type = BasicTensor<Scalar>;

    CoBert(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg))
    {
        cfg_.validate();
        init_encoder_params(params_, cfg_.base_encoder(), kBasePrefix, seed);
        init_calibrator_params(params_, cfg_.calibration_encoder(), kCalibratorPrefix, seed);
        init_group_scorer_params(params_, cfg_.group_encoder(), kScorerPrefix, seed);
        init_pointwise_head(params_, cfg_.hidden, kRelHeadPrefix, seed);
    }

    CoBert(ModelConfig cfg, ParameterStore<Scalar> params) : cfg_(std::move(cfg)), params_(std::move(params))
    {
        cfg_.validate();
        CoBert reference(cfg_, 0);
        for (auto const& [name, p] : reference.params_) {
            const auto& mine = params_.get(name);
            if (mine.rows() != p.tensor.rows() || mine.cols() != p.tensor.cols()) {
                throw shape_error("parameter " + name + " does not match the model configuration");
            }
        }
        if (params_.size() != reference.params_.size()) {
            throw std::invalid_argument("parameter set has entries the configuration does not define");
        }
    }

    [[nodiscard]] const ModelConfig& config() const { return cfg_; }
    [[nodiscard]] const ParameterStore<Scalar>& params() const { return params_; }
    [[nodiscard]] ParameterStore<Scalar>& params() { return params_; }

    template <typename Other>
    [[nodiscard]] CoBert<Other> cast() const
    {
        return CoBert<Other>(cfg_, params_.template cast<Other>());
    }

    /// r for each sequence; rows follow `seqs`.
    [[nodiscard]] tensor_type interactions(const std::vector<TokenSequence>& seqs) const
    {
        return interaction_vectors(params_, cfg_.base_encoder(), kBasePrefix, seqs);
    }

    /// Pointwise relevance head applied to any stack of H-vectors.
    [[nodiscard]] tensor_type pointwise(const tensor_type& vectors) const
    {
        return pointwise_scores(params_, kRelHeadPrefix, vectors);
    }

    [[nodiscard]] Calibration<Scalar> calibrate(const tensor_type& prototypes, const tensor_type& candidates,
                                                std::optional<bool> residual = std::nullopt) const
    {
        return corank::calibrate(params_, cfg_.calibration_encoder(), kCalibratorPrefix, prototypes, candidates,
                                 residual.value_or(cfg_.residual));
    }

    /// Final scores of one group: `candidates` is n x H (padding rows zero),
    /// `prototypes` m x H (ignored by group_only). Returns n x 1, padding 0.
    [[nodiscard]] tensor_type score_group(Variant variant, const std::optional<tensor_type>& prototypes,
                                          const tensor_type& candidates, const std::vector<bool>& pad_mask,
                                          std::optional<bool> residual = std::nullopt) const
    {
        if (candidates.rows() != cfg_.group_size) {
            throw shape_error("score_group: expected a padded group of " + std::to_string(cfg_.group_size));
        }
        tensor_type reps = candidates;
        if (variant != Variant::group_only) {
            if (!prototypes) {
                throw std::invalid_argument("calibration requires m >= 1");
            }
            reps = mask_rows(calibrate(*prototypes, candidates, residual).calibrated, pad_mask);
        }
        if (variant == Variant::prf_only) {
            return mask_rows(pointwise(reps), pad_mask);
        }
        return corank::score_group(params_, cfg_.group_encoder(), kScorerPrefix, reps, pad_mask);
    }

  private:
    ModelConfig cfg_;
    ParameterStore<Scalar> params_;
};

}  // namespace corank

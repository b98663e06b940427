#pragma once

// Experiment configuration files, checkpoints and run manifests.
//
// A config file is flat `key = value` text; '#' starts a comment. Every
// model and training field has a key; unknown keys are rejected. A checkpoint
// is one metadata line, the config text, a `snapshot` line and the binary
// parameter snapshot.

#include "corank/trainer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace corank {

struct ExperimentConfig {
    ModelConfig model;
    TrainConfig train;
    Bm25Params bm25;

    void validate() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig read_config(const std::filesystem::path& path);

/// Canonical text: every key in a fixed order, one per line.
std::string config_text(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical text.
std::string config_hash(const ExperimentConfig& cfg);

struct CheckpointMeta {
    int epoch = 0;
    double validation_ndcg = 0.0;
};

struct Checkpoint {
    ExperimentConfig config;
    CheckpointMeta meta;
    ParameterStore<double> params;
};

void write_checkpoint(const std::filesystem::path& path, const ExperimentConfig& cfg, const CheckpointMeta& meta,
                      const ParameterStore<double>& params);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace corank

#pragma once

#include <string>

#include "regnn/layers.hpp"
#include "regnn/train.hpp"

namespace regnn {

std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

std::string train_config_to_json(const TrainConfig& tc);
TrainConfig train_config_from_json(const std::string& text);

// Reads both config families from one document; missing fields keep defaults.
void apply_config_file(const std::string& path, ModelConfig& mc, TrainConfig& tc);

std::string train_report_to_json(const TrainReport& rep, const ModelConfig& cfg,
                                 const TrainConfig& tc);

// Versioned checkpoint: config, every parameter tensor, embeddings included.
// fp64 values round-trip exactly.
void save_checkpoint(const Model& model, std::uint64_t seed, const std::string& path);

struct Checkpoint {
  ModelConfig config;
  std::uint64_t seed = 0;
  ParamStore params;
  std::vector<std::string> relation_names, type_names;
};

Checkpoint load_checkpoint(const std::string& path);

// Instantiates the checkpointed model against a graph (shapes must agree).
Model restore_model(const Checkpoint& ckpt, const HeteroGraph& g);

}  // namespace regnn

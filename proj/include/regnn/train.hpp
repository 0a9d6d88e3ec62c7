#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regnn/hgraph.hpp"
#include "regnn/layers.hpp"
#include "regnn/metrics.hpp"
#include "regnn/optim.hpp"

namespace regnn {

struct TrainConfig {
  std::size_t max_epochs = 200;
  std::size_t patience = 50;  // early stop after this many non-improving epochs
  double lr = 0.001;
  double weight_decay = 0.001;
  double dropout = 0.6;
  OptKind optimizer = OptKind::Adam;
  double lambda = 100.0;
  std::uint64_t seed = 0;
  bool decay_embeddings = true;  // set false to exempt e/s from weight decay

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;      // per epoch run
  std::vector<double> valid_micro_f1;  // per epoch run
  std::size_t best_epoch = 0;
  double best_valid_micro_f1 = 0.0;
  double test_macro_f1 = 0.0;
  double test_micro_f1 = 0.0;
  std::vector<std::vector<double>> alpha;  // per layer, learned lambda*e
  std::vector<std::vector<double>> beta;   // per layer, learned lambda*s
  double wall_seconds = 0.0;
  std::size_t param_total = 0;
  std::size_t param_overhead_per_layer = 0;
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
};

struct TrainResult {
  Model model;  // best-validation parameters restored
  TrainReport report;
};

// Full-batch training with early stopping on validation micro-F1; the
// best-validation parameters are restored before test evaluation.
// TrainConfig's dropout and lambda override the model config's copies.
TrainResult train(const ModelConfig& model_cfg, const HeteroGraph& g, const TrainConfig& tc);

// Penultimate representation of the target-type nodes in eval mode: the final
// layer's aggregated input.
DenseMatrix extract_embeddings(const Model& model, const HeteroGraph& g);

// Eval-mode logits over target-type rows.
DenseMatrix eval_logits(const Model& model, const HeteroGraph& g);

}  // namespace regnn

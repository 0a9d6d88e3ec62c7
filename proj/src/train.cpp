#include "regnn/train.hpp"

#include <chrono>
#include <stdexcept>

namespace regnn {

void TrainConfig::validate() const {
  if (patience > max_epochs) throw std::invalid_argument("train: patience > max_epochs");
  if (lr < 0.0 || weight_decay < 0.0) throw std::invalid_argument("train: negative rate");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("train: dropout outside [0,1)");
  if (lambda <= 0.0) throw std::invalid_argument("train: lambda must be positive");
}

namespace {

double eval_valid_micro(const Model& model, const HeteroGraph& g) {
  Tape tape;
  ForwardResult fr = model.forward(tape, g, false, nullptr);
  return evaluate_f1(tape.value(fr.logits), g.labels, g.splits.valid, g.num_classes).micro;
}

}  // namespace

TrainResult train(const ModelConfig& model_cfg, const HeteroGraph& g, const TrainConfig& tc) {
  tc.validate();
  if (g.target_type < 0 || g.labels.empty())
    throw std::invalid_argument("train: graph has no labeled target nodes");
  if (g.splits.train.empty() || g.splits.valid.empty())
    throw std::invalid_argument("train: graph needs train and valid splits");

  auto t0 = std::chrono::steady_clock::now();
  ModelConfig cfg = model_cfg;
  cfg.dropout = tc.dropout;
  cfg.lambda = tc.lambda;

  Model model = Model::init(cfg, g, tc.seed);
  std::mt19937_64 dropout_rng(tc.seed ^ 0x9e3779b97f4a7c15ull);

  OptimizerConfig ocfg;
  ocfg.kind = tc.optimizer;
  ocfg.lr = tc.lr;
  ocfg.weight_decay = tc.weight_decay;
  Optimizer opt(ocfg);

  std::vector<std::size_t> trainable_ids;
  std::vector<char> decay_mask;
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    if (!model.params.trainable[i]) continue;
    trainable_ids.push_back(i);
    bool is_embedding = model.params.names[i].rfind("emb", 0) == 0;
    decay_mask.push_back(tc.decay_embeddings || !is_embedding ? 1 : 0);
  }

  TrainReport rep;
  rep.seed = tc.seed;
  double best_f1 = -1.0;
  std::size_t best_epoch = 0, non_improving = 0;
  std::vector<DenseMatrix> best_params = model.params.values;

  for (std::size_t epoch = 0; epoch < tc.max_epochs; ++epoch) {
    Tape tape;
    ForwardResult fr = model.forward(tape, g, true, &dropout_rng);
    Var loss = tape.softmax_cross_entropy(fr.logits, g.labels, g.splits.train);
    tape.backward(loss);
    rep.train_loss.push_back(tape.value(loss)(0, 0));

    std::vector<DenseMatrix*> params;
    std::vector<const DenseMatrix*> grads;
    for (std::size_t i : trainable_ids) {
      params.push_back(&model.params.values[i]);
      grads.push_back(&tape.grad(fr.param_vars[i]));
    }
    opt.step(params, grads, &decay_mask);

    double vf1 = eval_valid_micro(model, g);
    rep.valid_micro_f1.push_back(vf1);
    if (vf1 > best_f1) {
      best_f1 = vf1;
      best_epoch = epoch;
      best_params = model.params.values;
      non_improving = 0;
    } else {
      ++non_improving;
      if (non_improving > tc.patience) break;
    }
  }
  rep.epochs_run = rep.train_loss.size();
  rep.best_epoch = best_epoch;
  rep.best_valid_micro_f1 = best_f1;

  model.params.values = best_params;

  {
    Tape tape;
    ForwardResult fr = model.forward(tape, g, false, nullptr);
    if (!g.splits.test.empty()) {
      F1Scores s = evaluate_f1(tape.value(fr.logits), g.labels, g.splits.test, g.num_classes);
      rep.test_macro_f1 = s.macro;
      rep.test_micro_f1 = s.micro;
    }
  }

  RelationEmbeddings emb = model.embeddings();
  for (std::size_t l = 0; l < emb.num_layers(); ++l) {
    std::vector<double> al, be;
    for (std::size_t r = 0; r < emb.num_relations(); ++r) al.push_back(emb.alpha(l, r));
    for (std::size_t j = 0; j < emb.num_types(); ++j) be.push_back(emb.beta(l, j));
    rep.alpha.push_back(std::move(al));
    rep.beta.push_back(std::move(be));
  }

  ParamCountReport pc = param_count(cfg, g);
  rep.param_total = pc.total;
  rep.param_overhead_per_layer = pc.per_layer_overhead;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  TrainResult out{std::move(model), std::move(rep)};
  return out;
}

DenseMatrix extract_embeddings(const Model& model, const HeteroGraph& g) {
  Tape tape;
  ForwardResult fr = model.forward(tape, g, false, nullptr);
  return tape.value(fr.penultimate);
}

DenseMatrix eval_logits(const Model& model, const HeteroGraph& g) {
  Tape tape;
  ForwardResult fr = model.forward(tape, g, false, nullptr);
  return tape.value(fr.logits);
}

}  // namespace regnn

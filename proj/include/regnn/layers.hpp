#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "regnn/hgraph.hpp"
#include "regnn/relemb.hpp"
#include "regnn/tape.hpp"

namespace regnn {

enum class Backbone { REGCN, RESGC, REGIN, GTN };

std::string to_string(Backbone b);
std::string to_string(NormMode m);
std::string to_string(SelfLoopMode m);
Backbone backbone_from_string(const std::string& s);
NormMode norm_from_string(const std::string& s);
SelfLoopMode selfloop_from_string(const std::string& s);

struct ModelConfig {
  Backbone backbone = Backbone::REGCN;
  std::size_t layers = 4;
  std::size_t hidden = 64;
  double dropout = 0.6;
  double lambda = 100.0;
  NormMode norm = NormMode::Row;
  SelfLoopMode self_loops = SelfLoopMode::Embedded;
  bool freeze_relations = false;  // pin alpha at 1 (relation weights fixed)
  bool freeze_selfloops = false;  // pin beta at 1
  std::size_t gtn_channels = 1;   // non-ensembled by default
  std::size_t gtn_length = 2;

  void validate() const;
};

// Named parameter tensors plus a trainable flag (frozen embeddings and other
// constants are stored but excluded from optimization and counting).
struct ParamStore {
  std::vector<std::string> names;
  std::vector<DenseMatrix> values;
  std::vector<char> trainable;
  std::unordered_map<std::string, std::size_t> index;

  std::size_t add(const std::string& name, DenseMatrix v, bool is_trainable);
  DenseMatrix& get(const std::string& name);
  const DenseMatrix& get(const std::string& name) const;
  bool has(const std::string& name) const { return index.count(name) > 0; }
  std::size_t size() const { return values.size(); }
};

struct ForwardResult {
  Var logits;                   // target rows x classes
  Var penultimate;              // target rows x d: final layer's aggregated input
  std::vector<Var> param_vars;  // parallel to ParamStore order; invalid for frozen
};

class Model {
 public:
  ModelConfig config;
  ParamStore params;
  PatternPtr pattern;
  std::shared_ptr<std::vector<SparseCSR>> relation_adjs;  // for the GTN backbone
  std::size_t num_relations = 0, num_types = 0;
  std::size_t target_offset = 0, target_count = 0;
  std::size_t num_classes = 0;
  std::vector<std::size_t> feature_dims;
  std::vector<std::string> relation_names, type_names;

  static Model init(const ModelConfig& cfg, const HeteroGraph& g, std::uint64_t seed);

  // Classes can be forced for unlabeled graphs (expressivity checks).
  static Model init(const ModelConfig& cfg, const HeteroGraph& g, std::uint64_t seed,
                    std::size_t num_classes_override);

  ForwardResult forward(Tape& tape, const HeteroGraph& g, bool training,
                        std::mt19937_64* rng) const;

  // Current alpha/beta view of the stored embedding parameters; frozen or
  // absent embeddings read as alpha = beta = 1.
  RelationEmbeddings embeddings() const;
};

// x-tilde rows ordered by global id; gradient reaches each W_f only from its
// own type's rows. proj_wb holds one (W, bias) Var pair per node type.
Var project_features(Tape& tape, const HeteroGraph& g,
                     const std::vector<std::pair<Var, Var>>& proj_wb);

// sigma(aggregate(H) W + b); pass apply_activation = false on the last layer
// to emit logits.
Var regcn_layer(Tape& tape, Var aggregated, Var w, Var b, bool apply_activation);

// GIN-style layer on the unnormalized weighted adjacency:
// sigma((A_hat H + (1 + eps) H) W1) followed by sigma(. W2).
Var regin_layer(Tape& tape, Var aggregated_unnormalized, Var h, Var w1, Var w2, Var eps,
                bool apply_final_activation);

// Two-layer collapsed form: the composite adjacency A-hat(1) * A-hat(0) with
// normalizer defined as the product of the per-layer degree matrices.
WeightedAdjacency resgc_composite(const PatternPtr& pat, const RelationEmbeddings& emb,
                                  SelfLoopMode self_loops);
Var resgc_forward(Tape& tape, const WeightedAdjacency& composite, Var h, Var w,
                  bool apply_activation);

// Soft relation mixtures, one per meta-path step.
struct GTNChannel {
  std::vector<std::vector<double>> step_weights;  // already on the simplex, each length |R|
};

std::vector<double> softmax(const std::vector<double>& scores);

// Product of the per-step convex relation mixtures, computed left to right.
SparseCSR gtn_composite_adjacency(const std::vector<const SparseCSR*>& relations,
                                  const GTNChannel& channel);

// sigma(rownorm(A_P + I) H W + B); A_P is a constant of the graph here.
Var gtn_layer(Tape& tape, const SparseCSR& a_p, Var h, Var w, Var b, bool apply_activation);
Var gtn_ensemble(Tape& tape, const std::vector<Var>& channel_outputs);

// Differentiable GTN aggregation: value = rownorm(prod_j mixture_j + I) * H
// where mixture_j = sum_r softmax(scores_j)_r A_r. Gradients flow to the raw
// step scores and to H. Dense intermediates; meant for desk-scale graphs.
Var gtn_aggregate(Tape& tape, const std::shared_ptr<std::vector<SparseCSR>>& relations,
                  const std::vector<Var>& step_scores, Var h);

struct ParamCountReport {
  std::size_t total = 0;
  std::size_t per_layer_overhead = 0;  // relation-embedding overhead
};

ParamCountReport param_count(const ModelConfig& cfg, const HeteroGraph& g);

}  // namespace regnn

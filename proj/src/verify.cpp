#include "regnn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "regnn/relemb.hpp"
#include "regnn/tape.hpp"

namespace regnn {

DenseMatrix plain_gcn_reference(const HeteroGraph& g, const Model& model) {
  std::size_t n = g.num_nodes();
  // Homogenized adjacency: sum of all relation adjacencies plus I, row norm.
  DenseMatrix a(n, n);
  for (const auto& r : g.relations) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t k = r.adj.row_offsets[u]; k < r.adj.row_offsets[u + 1]; ++k)
        a(u, r.adj.col_indices[k]) += r.adj.values[k];
  }
  for (std::size_t u = 0; u < n; ++u) a(u, u) += 1.0;
  for (std::size_t u = 0; u < n; ++u) {
    double d = 0.0;
    for (std::size_t v = 0; v < n; ++v) d += a(u, v);
    d = std::max(d, kDegreeEps);
    for (std::size_t v = 0; v < n; ++v) a(u, v) /= d;
  }

  // Shared feature projection.
  DenseMatrix h(n, model.config.hidden);
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    const DenseMatrix& w = model.params.get("proj." + g.type_names[t] + ".W");
    const DenseMatrix& b = model.params.get("proj." + g.type_names[t] + ".b");
    DenseMatrix proj = matmul(g.features[t], w);
    std::size_t off = g.type_offset(static_cast<int>(t));
    for (std::size_t i = 0; i < proj.rows(); ++i)
      for (std::size_t j = 0; j < proj.cols(); ++j) h(off + i, j) = proj(i, j) + b(0, j);
  }

  for (std::size_t l = 0; l < model.config.layers; ++l) {
    bool last = l + 1 == model.config.layers;
    const DenseMatrix& w = model.params.get("layer" + std::to_string(l) + ".W");
    const DenseMatrix& b = model.params.get("layer" + std::to_string(l) + ".b");
    DenseMatrix z = matmul(matmul(a, h), w);
    for (std::size_t i = 0; i < z.rows(); ++i)
      for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b(0, j);
    if (!last)
      for (auto& v : z.data()) v = std::max(v, 0.0);
    h = std::move(z);
  }
  std::size_t off = model.target_offset;
  DenseMatrix out(model.target_count, h.cols());
  for (std::size_t i = 0; i < model.target_count; ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) out(i, j) = h(off + i, j);
  return out;
}

CheckResult degeneration_check(std::uint64_t seed) {
  CheckResult res;
  res.name = "degeneration";
  res.tolerance = 1e-12;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    HeteroGraph g = random_proof_graph(10 + trial, 2 + trial % 2, 2 + trial % 2, rng);
    ModelConfig cfg;
    cfg.backbone = Backbone::REGCN;
    cfg.layers = 2 + trial % 2;
    cfg.hidden = 6;
    cfg.dropout = 0.0;
    cfg.lambda = 100.0;
    cfg.freeze_relations = true;
    cfg.freeze_selfloops = true;
    Model model = Model::init(cfg, g, seed + trial, 3);
    Tape tape;
    ForwardResult fr = model.forward(tape, g, false, nullptr);
    DenseMatrix reference = plain_gcn_reference(g, model);
    worst = std::max(worst, max_abs_diff(tape.value(fr.logits), reference));
  }
  res.max_deviation = worst;
  res.pass = worst < res.tolerance;
  return res;
}

GradCheckInstance make_gradcheck_instance(std::uint64_t seed, Backbone backbone, NormMode norm) {
  std::mt19937_64 rng(seed);
  GradCheckInstance inst;
  inst.graph = random_proof_graph(8 + rng() % 13, 2 + rng() % 2, 2 + rng() % 3, rng);
  // Random small features instead of one-hot, plus labels on type 0.
  for (std::size_t t = 0; t < inst.graph.num_types(); ++t)
    inst.graph.features[t] =
        DenseMatrix::gaussian(inst.graph.type_counts[t], 2 + rng() % 3, 0.0, 1.0, rng);
  inst.graph.target_type = 0;
  inst.graph.num_classes = 2 + static_cast<int>(rng() % 2);
  inst.graph.labels.resize(inst.graph.type_counts[0]);
  for (auto& l : inst.graph.labels) l = static_cast<int>(rng() % inst.graph.num_classes);
  for (std::size_t i = 0; i < inst.graph.type_counts[0]; ++i)
    inst.graph.splits.train.push_back(static_cast<int>(i));

  inst.config.backbone = backbone;
  inst.config.layers = backbone == Backbone::RESGC ? 2 : 2;
  inst.config.hidden = 4;
  inst.config.dropout = 0.0;
  inst.config.lambda = 100.0;
  inst.config.norm = norm;
  inst.config.self_loops = SelfLoopMode::Embedded;
  if (backbone == Backbone::GTN) inst.config.gtn_length = 2;
  return inst;
}

CheckResult gradient_check(std::size_t graphs, std::uint64_t seed, Backbone backbone, NormMode norm) {
  CheckResult res;
  res.name = "gradient_" + to_string(backbone) + "_" + to_string(norm);
  res.tolerance = 1e-4;
  double worst = 0.0;
  for (std::size_t t = 0; t < graphs; ++t) {
    GradCheckInstance inst = make_gradcheck_instance(seed + 1000 * t, backbone, norm);
    Model model = Model::init(inst.config, inst.graph, seed + t);

    Tape tape;
    ForwardResult fr = model.forward(tape, inst.graph, false, nullptr);
    Var loss = tape.softmax_cross_entropy(fr.logits, inst.graph.labels, inst.graph.splits.train);
    tape.backward(loss);

    std::vector<DenseMatrix*> params;
    std::vector<const DenseMatrix*> grads;
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      if (!model.params.trainable[i]) continue;
      params.push_back(&model.params.values[i]);
      grads.push_back(&tape.grad(fr.param_vars[i]));
    }
    auto f = [&]() {
      Tape t2;
      ForwardResult fr2 = model.forward(t2, inst.graph, false, nullptr);
      Var l2 = t2.softmax_cross_entropy(fr2.logits, inst.graph.labels, inst.graph.splits.train);
      return t2.value(l2)(0, 0);
    };
    worst = std::max(worst, finite_diff_check(f, params, grads, 1e-6));
  }
  res.max_deviation = worst;
  res.pass = worst < res.tolerance;
  return res;
}

std::vector<CheckResult> optimizer_identity_checks(std::size_t traces, std::size_t steps,
                                                   double lambda, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  for (OptKind kind : {OptKind::SGD, OptKind::Momentum, OptKind::Nesterov, OptKind::Adagrad,
                       OptKind::Adam}) {
    CheckResult res;
    res.name = "scaling_" + to_string(kind);
    res.tolerance = 1e-9;
    double worst = 0.0;
    for (std::size_t t = 0; t < traces; ++t) {
      std::vector<DenseMatrix> trace;
      for (std::size_t s = 0; s < steps; ++s)
        trace.push_back(DenseMatrix::gaussian(3, 1, 0.0, 1.0, rng));
      ScalingReport rep = verify_scaling_identity(kind, lambda, trace, 0.001, 0.0, res.tolerance);
      worst = std::max(worst, rep.max_deviation);
    }
    res.max_deviation = worst;
    res.pass = worst < res.tolerance;
    res.detail = is_adaptive(kind) ? "kappa(lambda g) = kappa(g), alpha ratio lambda"
                                   : "kappa(lambda g) = lambda kappa(g), alpha ratio lambda^2";
    out.push_back(res);
  }
  return out;
}

std::string VerifySummary::to_json() const {
  nlohmann::json doc;
  doc["all_pass"] = all_pass;
  doc["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    doc["checks"].push_back({{"name", c.name},
                             {"pass", c.pass},
                             {"max_deviation", c.max_deviation},
                             {"tolerance", c.tolerance},
                             {"detail", c.detail}});
  }
  return doc.dump(2);
}

VerifySummary run_verification(std::uint64_t seed) {
  VerifySummary sum;
  auto push = [&](CheckResult c) {
    sum.all_pass = sum.all_pass && c.pass;
    sum.checks.push_back(std::move(c));
  };
  for (auto& c : optimizer_identity_checks(100, 50, 100.0, seed)) push(std::move(c));

  auto from_equiv = [](const EquivalenceReport& r) {
    CheckResult c;
    c.name = r.name;
    c.pass = r.pass || r.skipped;
    c.max_deviation = r.max_deviation;
    c.tolerance = r.tolerance;
    c.detail = r.note;
    return c;
  };
  push(from_equiv(lemma3_random_trials(100, 100, 1.0, seed + 1)));
  {
    Lemma4Report l4 = lemma4_random_trials(10000, 1.0, 5, seed + 2);
    CheckResult c;
    c.name = "lemma4";
    c.pass = l4.pass;
    c.max_deviation = l4.max_sq_norm;
    c.tolerance = l4.bound;
    c.detail = std::to_string(l4.violations) + " violations over " + std::to_string(l4.draws) +
               " draws";
    push(std::move(c));
  }
  push(from_equiv(corollary5_random_trials(20, seed + 3)));
  push(from_equiv(theorem6_random_trials(5, 2, 2, seed + 4)));
  push(from_equiv(theorem7_nonlinearity_witness()));
  push(from_equiv(theorem7_determinant_witness()));
  push(degeneration_check(seed + 5));
  push(gradient_check(10, seed + 6));
  return sum;
}

}  // namespace regnn

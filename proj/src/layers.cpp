#include "regnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regnn {

std::string to_string(Backbone b) {
  switch (b) {
    case Backbone::REGCN: return "regcn";
    case Backbone::RESGC: return "resgc";
    case Backbone::REGIN: return "regin";
    case Backbone::GTN: return "gtn";
  }
  return "?";
}
std::string to_string(NormMode m) {
  switch (m) {
    case NormMode::Row: return "row";
    case NormMode::Symmetric: return "sym";
    case NormMode::None: return "none";
  }
  return "?";
}
std::string to_string(SelfLoopMode m) {
  switch (m) {
    case SelfLoopMode::Embedded: return "embedded";
    case SelfLoopMode::Identity: return "identity";
    case SelfLoopMode::None: return "none";
  }
  return "?";
}
Backbone backbone_from_string(const std::string& s) {
  if (s == "regcn") return Backbone::REGCN;
  if (s == "resgc") return Backbone::RESGC;
  if (s == "regin") return Backbone::REGIN;
  if (s == "gtn") return Backbone::GTN;
  throw std::invalid_argument("unknown backbone: " + s);
}
NormMode norm_from_string(const std::string& s) {
  if (s == "row") return NormMode::Row;
  if (s == "sym" || s == "symmetric") return NormMode::Symmetric;
  if (s == "none") return NormMode::None;
  throw std::invalid_argument("unknown normalization mode: " + s);
}
SelfLoopMode selfloop_from_string(const std::string& s) {
  if (s == "embedded") return SelfLoopMode::Embedded;
  if (s == "identity") return SelfLoopMode::Identity;
  if (s == "none") return SelfLoopMode::None;
  throw std::invalid_argument("unknown self-loop mode: " + s);
}

void ModelConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("config: layers must be >= 1");
  if (hidden < 1) throw std::invalid_argument("config: hidden must be >= 1");
  if (dropout < 0.0 || dropout >= 1.0) throw std::invalid_argument("config: dropout outside [0,1)");
  if (lambda <= 0.0) throw std::invalid_argument("config: lambda must be positive");
  if (backbone == Backbone::RESGC && layers != 2)
    throw std::invalid_argument("config: resgc is a two-layer collapse; set layers = 2");
  if (backbone == Backbone::GTN && (gtn_length < 1 || gtn_channels < 1))
    throw std::invalid_argument("config: gtn needs length >= 1 and channels >= 1");
}

std::size_t ParamStore::add(const std::string& name, DenseMatrix v, bool is_trainable) {
  if (index.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
  index[name] = values.size();
  names.push_back(name);
  values.push_back(std::move(v));
  trainable.push_back(is_trainable ? 1 : 0);
  return values.size() - 1;
}
DenseMatrix& ParamStore::get(const std::string& name) {
  auto it = index.find(name);
  if (it == index.end()) throw std::out_of_range("no parameter named " + name);
  return values[it->second];
}
const DenseMatrix& ParamStore::get(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw std::out_of_range("no parameter named " + name);
  return values[it->second];
}

Var project_features(Tape& tape, const HeteroGraph& g,
                     const std::vector<std::pair<Var, Var>>& proj_wb) {
  if (proj_wb.size() != g.num_types())
    throw std::invalid_argument("project_features: need one (W, b) pair per node type");
  std::vector<Var> parts;
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    const auto& [w, b] = proj_wb[t];
    if (g.features[t].cols() != tape.value(w).rows())
      throw std::invalid_argument("project_features: feature dim mismatch for type '" +
                                  g.type_names[t] + "'");
    Var x = tape.constant(g.features[t]);
    parts.push_back(tape.add_row_vector(tape.matmul(x, w), b));
  }
  return tape.stack_rows(parts);
}

Var regcn_layer(Tape& tape, Var aggregated, Var w, Var b, bool apply_activation) {
  Var z = tape.add_row_vector(tape.matmul(aggregated, w), b);
  return apply_activation ? tape.relu(z) : z;
}

Var regin_layer(Tape& tape, Var aggregated_unnormalized, Var h, Var w1, Var w2, Var eps,
                bool apply_final_activation) {
  Var self = tape.scale_by_scalar(h, eps, 1.0);
  Var mixed = tape.add(aggregated_unnormalized, self);
  Var z1 = tape.relu(tape.matmul(mixed, w1));
  Var z2 = tape.matmul(z1, w2);
  return apply_final_activation ? tape.relu(z2) : z2;
}

WeightedAdjacency resgc_composite(const PatternPtr& pat, const RelationEmbeddings& emb,
                                  SelfLoopMode self_loops) {
  if (emb.num_layers() < 2) throw std::invalid_argument("resgc_composite: need two embedding layers");
  WeightedAdjacency a0 = assemble_adjacency(pat, emb, 0, self_loops);
  WeightedAdjacency a1 = assemble_adjacency(pat, emb, 1, self_loops);
  WeightedAdjacency out;
  out.pattern = pat;
  out.hat = spgemm(a1.hat, a0.hat);
  out.degrees.resize(out.hat.rows);
  for (std::size_t u = 0; u < out.hat.rows; ++u) out.degrees[u] = a1.degrees[u] * a0.degrees[u];
  out.tilde = out.hat;
  out.norm = NormMode::Row;
  for (std::size_t u = 0; u < out.hat.rows; ++u) {
    double d = std::max(out.degrees[u], kDegreeEps);
    for (std::size_t k = out.hat.row_offsets[u]; k < out.hat.row_offsets[u + 1]; ++k)
      out.tilde.values[k] = out.hat.values[k] / d;
  }
  return out;
}

Var resgc_forward(Tape& tape, const WeightedAdjacency& composite, Var h, Var w,
                  bool apply_activation) {
  Var agg = tape.spmm(composite.tilde, h);
  Var z = tape.matmul(agg, w);
  return apply_activation ? tape.relu(z) : z;
}

std::vector<double> softmax(const std::vector<double>& scores) {
  if (scores.empty()) throw std::invalid_argument("softmax: empty input");
  double mx = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - mx);
    denom += out[i];
  }
  for (auto& v : out) v /= denom;
  return out;
}

SparseCSR gtn_composite_adjacency(const std::vector<const SparseCSR*>& relations,
                                  const GTNChannel& channel) {
  if (channel.step_weights.empty()) throw std::invalid_argument("gtn composite: length must be >= 1");
  if (relations.empty()) throw std::invalid_argument("gtn composite: no relations");
  std::size_t n = relations[0]->rows;
  auto mixture = [&](const std::vector<double>& wts) {
    if (wts.size() != relations.size())
      throw std::invalid_argument("gtn composite: weight/relation count mismatch");
    SparseCSR m(n, n);
    for (std::size_t r = 0; r < relations.size(); ++r) {
      if (wts[r] == 0.0) continue;
      SparseCSR scaled = *relations[r];
      for (auto& v : scaled.values) v *= wts[r];
      m = sp_add(m, scaled);
    }
    return m;
  };
  SparseCSR prod = mixture(channel.step_weights[0]);
  for (std::size_t j = 1; j < channel.step_weights.size(); ++j)
    prod = spgemm(prod, mixture(channel.step_weights[j]));
  return prod;
}

Var gtn_layer(Tape& tape, const SparseCSR& a_p, Var h, Var w, Var b, bool apply_activation) {
  SparseCSR hat = sp_add(a_p, SparseCSR::identity(a_p.rows));
  std::vector<double> deg = hat.row_sums();
  for (std::size_t u = 0; u < hat.rows; ++u) {
    double d = std::max(deg[u], kDegreeEps);
    for (std::size_t k = hat.row_offsets[u]; k < hat.row_offsets[u + 1]; ++k) hat.values[k] /= d;
  }
  Var agg = tape.spmm(std::move(hat), h);
  Var z = tape.add_row_vector(tape.matmul(agg, w), b);
  return apply_activation ? tape.relu(z) : z;
}

Var gtn_ensemble(Tape& tape, const std::vector<Var>& channel_outputs) {
  if (channel_outputs.size() == 1) return channel_outputs[0];
  return tape.concat_cols(channel_outputs);
}

namespace {

struct GTNSaved {
  std::shared_ptr<std::vector<SparseCSR>> rels;
  std::vector<std::vector<double>> soft;     // per step, softmax weights
  std::vector<DenseMatrix> mixtures;         // per step, dense
  std::vector<DenseMatrix> prefix;           // prefix[j] = M_0 ... M_{j-1} (prefix[0] = I)
  std::vector<DenseMatrix> suffix;           // suffix[j] = M_{j+1} ... M_{l-1}
  DenseMatrix tilde;                         // normalized composite
  std::vector<double> deg;
  std::vector<std::size_t> score_idx;
  std::size_t h_idx = 0;
};

}  // namespace

Var gtn_aggregate(Tape& tape, const std::shared_ptr<std::vector<SparseCSR>>& relations,
                  const std::vector<Var>& step_scores, Var h) {
  if (step_scores.empty()) throw std::invalid_argument("gtn_aggregate: no steps");
  if (!relations || relations->empty()) throw std::invalid_argument("gtn_aggregate: no relations");
  std::size_t n = (*relations)[0].rows;
  const DenseMatrix& hv = tape.value(h);
  if (hv.rows() != n) throw std::invalid_argument("gtn_aggregate: H row count");

  auto saved = std::make_shared<GTNSaved>();
  saved->rels = relations;
  saved->h_idx = h.idx;
  std::size_t l = step_scores.size();

  for (Var sc : step_scores) {
    const DenseMatrix& s = tape.value(sc);
    if (s.rows() != 1 || s.cols() != relations->size())
      throw std::invalid_argument("gtn_aggregate: scores must be 1 x num_relations");
    saved->score_idx.push_back(sc.idx);
    std::vector<double> raw(s.data().begin(), s.data().end());
    saved->soft.push_back(softmax(raw));
    DenseMatrix m(n, n);
    for (std::size_t r = 0; r < relations->size(); ++r) {
      double wr = saved->soft.back()[r];
      const SparseCSR& a = (*relations)[r];
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t k = a.row_offsets[u]; k < a.row_offsets[u + 1]; ++k)
          m(u, a.col_indices[k]) += wr * a.values[k];
    }
    saved->mixtures.push_back(std::move(m));
  }

  saved->prefix.resize(l);
  saved->suffix.resize(l);
  saved->prefix[0] = DenseMatrix::identity(n);
  for (std::size_t j = 1; j < l; ++j)
    saved->prefix[j] = matmul(saved->prefix[j - 1], saved->mixtures[j - 1]);
  saved->suffix[l - 1] = DenseMatrix::identity(n);
  for (std::size_t j = l - 1; j-- > 0;)
    saved->suffix[j] = matmul(saved->mixtures[j + 1], saved->suffix[j + 1]);

  DenseMatrix composite = matmul(saved->prefix[l - 1], saved->mixtures[l - 1]);
  for (std::size_t u = 0; u < n; ++u) composite(u, u) += 1.0;
  saved->deg.resize(n);
  saved->tilde = composite;
  for (std::size_t u = 0; u < n; ++u) {
    double d = 0.0;
    for (std::size_t v = 0; v < n; ++v) d += composite(u, v);
    saved->deg[u] = d;
    double dc = std::max(d, kDegreeEps);
    for (std::size_t v = 0; v < n; ++v) saved->tilde(u, v) /= dc;
  }

  DenseMatrix out = matmul(saved->tilde, hv);
  return tape.make_node(std::move(out), [saved](Tape& t, std::size_t self) {
    const DenseMatrix& g = t.grad_ref(self);
    const DenseMatrix& out = t.value(Var{self});
    const DenseMatrix& hv = t.value(Var{saved->h_idx});
    std::size_t n = saved->tilde.rows();

    t.grad_ref(saved->h_idx).add_inplace(matmul_at_b(saved->tilde, g));

    // dL/dA-hat through row normalization, dense.
    DenseMatrix ghT = matmul_a_bt(g, hv);  // (u,v) -> dot(g_u, h_v)
    DenseMatrix dhat(n, n);
    for (std::size_t u = 0; u < n; ++u) {
      bool clamped = saved->deg[u] <= kDegreeEps;
      double d = std::max(saved->deg[u], kDegreeEps);
      double cu = 0.0;
      if (!clamped) {
        const double* grow = g.row_ptr(u);
        const double* orow = out.row_ptr(u);
        for (std::size_t j = 0; j < g.cols(); ++j) cu += grow[j] * orow[j];
      }
      for (std::size_t v = 0; v < n; ++v) dhat(u, v) = (ghT(u, v) - cu) / d;
    }

    std::size_t l = saved->mixtures.size();
    for (std::size_t j = 0; j < l; ++j) {
      Var sc{saved->score_idx[j]};
      if (!t.requires_grad(sc)) continue;
      DenseMatrix dm = matmul_at_b(saved->prefix[j], matmul_a_bt(dhat, saved->suffix[j]));
      std::vector<double> dalpha(saved->rels->size(), 0.0);
      for (std::size_t r = 0; r < saved->rels->size(); ++r) {
        const SparseCSR& a = (*saved->rels)[r];
        double acc = 0.0;
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t k = a.row_offsets[u]; k < a.row_offsets[u + 1]; ++k)
            acc += a.values[k] * dm(u, a.col_indices[k]);
        dalpha[r] = acc;
      }
      const std::vector<double>& al = saved->soft[j];
      double inner = 0.0;
      for (std::size_t r = 0; r < al.size(); ++r) inner += al[r] * dalpha[r];
      DenseMatrix& sg = t.grad_ref(sc.idx);
      for (std::size_t r = 0; r < al.size(); ++r) sg(0, r) += al[r] * (dalpha[r] - inner);
    }
  });
}

// ---------------------------------------------------------------------------
// Model assembly

Model Model::init(const ModelConfig& cfg, const HeteroGraph& g, std::uint64_t seed) {
  return init(cfg, g, seed, g.num_classes > 0 ? static_cast<std::size_t>(g.num_classes) : 2);
}

Model Model::init(const ModelConfig& cfg, const HeteroGraph& g, std::uint64_t seed,
                  std::size_t num_classes_override) {
  cfg.validate();
  Model m;
  m.config = cfg;
  m.pattern = build_pattern(g);
  m.num_relations = g.relations.size();
  m.num_types = g.num_types();
  m.num_classes = num_classes_override;
  if (g.target_type >= 0) {
    m.target_offset = g.type_offset(g.target_type);
    m.target_count = g.type_counts[g.target_type];
  } else {
    m.target_offset = 0;
    m.target_count = g.num_nodes();
  }
  for (std::size_t t = 0; t < g.num_types(); ++t) m.feature_dims.push_back(g.features[t].cols());
  for (const auto& r : g.relations) m.relation_names.push_back(r.name);
  m.type_names = g.type_names;

  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    m.params.add("proj." + g.type_names[t] + ".W",
                 DenseMatrix::xavier_uniform(m.feature_dims[t], cfg.hidden, rng), true);
    m.params.add("proj." + g.type_names[t] + ".b", DenseMatrix(1, cfg.hidden, 0.0), true);
  }

  auto add_embeddings = [&](std::size_t layer_count, bool force_frozen = false) {
    for (std::size_t l = 0; l < layer_count; ++l) {
      m.params.add("emb" + std::to_string(l) + ".e",
                   DenseMatrix(1, m.num_relations, 1.0 / cfg.lambda),
                   !force_frozen && !cfg.freeze_relations);
      if (cfg.self_loops == SelfLoopMode::Embedded)
        m.params.add("emb" + std::to_string(l) + ".s", DenseMatrix(1, m.num_types, 1.0 / cfg.lambda),
                     !force_frozen && !cfg.freeze_selfloops);
    }
  };

  switch (cfg.backbone) {
    case Backbone::REGCN: {
      add_embeddings(cfg.layers);
      for (std::size_t l = 0; l < cfg.layers; ++l) {
        std::size_t din = cfg.hidden;
        std::size_t dout = l + 1 == cfg.layers ? m.num_classes : cfg.hidden;
        m.params.add("layer" + std::to_string(l) + ".W", DenseMatrix::xavier_uniform(din, dout, rng),
                     true);
        m.params.add("layer" + std::to_string(l) + ".b", DenseMatrix(1, dout, 0.0), true);
      }
      break;
    }
    case Backbone::RESGC: {
      // The collapse treats the embedding values as constants of the composite
      // adjacency, so they are stored but not optimized.
      add_embeddings(2, /*force_frozen=*/true);
      m.params.add("layer0.W", DenseMatrix::xavier_uniform(cfg.hidden, m.num_classes, rng), true);
      break;
    }
    case Backbone::REGIN: {
      add_embeddings(cfg.layers);
      for (std::size_t l = 0; l < cfg.layers; ++l) {
        std::size_t dout = l + 1 == cfg.layers ? m.num_classes : cfg.hidden;
        m.params.add("layer" + std::to_string(l) + ".W1",
                     DenseMatrix::xavier_uniform(cfg.hidden, cfg.hidden, rng), true);
        m.params.add("layer" + std::to_string(l) + ".W2",
                     DenseMatrix::xavier_uniform(cfg.hidden, dout, rng), true);
        m.params.add("layer" + std::to_string(l) + ".eps", DenseMatrix(1, 1, 0.0), true);
      }
      break;
    }
    case Backbone::GTN: {
      m.relation_adjs = std::make_shared<std::vector<SparseCSR>>();
      for (const auto& r : g.relations) m.relation_adjs->push_back(r.adj);
      if (m.relation_adjs->empty())
        throw std::invalid_argument("gtn backbone needs at least one relation");
      for (std::size_t l = 0; l < cfg.layers; ++l) {
        bool last = l + 1 == cfg.layers;
        std::size_t channels = last ? 1 : cfg.gtn_channels;
        std::size_t din = l == 0 ? cfg.hidden : cfg.hidden * cfg.gtn_channels;
        std::size_t dout = last ? m.num_classes : cfg.hidden;
        for (std::size_t c = 0; c < channels; ++c)
          for (std::size_t j = 0; j < cfg.gtn_length; ++j)
            m.params.add("layer" + std::to_string(l) + ".ch" + std::to_string(c) + ".step" +
                             std::to_string(j) + ".score",
                         DenseMatrix(1, m.num_relations, 0.0), true);
        m.params.add("layer" + std::to_string(l) + ".W", DenseMatrix::xavier_uniform(din, dout, rng),
                     true);
        m.params.add("layer" + std::to_string(l) + ".b", DenseMatrix(1, dout, 0.0), true);
      }
      break;
    }
  }
  return m;
}

RelationEmbeddings Model::embeddings() const {
  RelationEmbeddings emb;
  emb.lambda = config.lambda;
  std::size_t levels = config.backbone == Backbone::RESGC ? 2 : config.layers;
  for (std::size_t l = 0; l < levels; ++l) {
    std::string ename = "emb" + std::to_string(l) + ".e";
    std::string sname = "emb" + std::to_string(l) + ".s";
    emb.e.push_back(params.has(ename) ? params.get(ename)
                                      : DenseMatrix(1, num_relations, 1.0 / config.lambda));
    emb.s.push_back(params.has(sname) ? params.get(sname)
                                      : DenseMatrix(1, num_types, 1.0 / config.lambda));
  }
  return emb;
}

ForwardResult Model::forward(Tape& tape, const HeteroGraph& g, bool training,
                             std::mt19937_64* rng) const {
  if (training && rng == nullptr) throw std::invalid_argument("forward: training needs an rng");
  ForwardResult res;
  res.param_vars.resize(params.size());

  auto lift = [&](const std::string& name) {
    std::size_t i = params.index.at(name);
    Var v = params.trainable[i] ? tape.param(params.values[i]) : tape.constant(params.values[i]);
    res.param_vars[i] = v;
    return v;
  };

  std::vector<std::pair<Var, Var>> proj;
  for (std::size_t t = 0; t < g.num_types(); ++t)
    proj.emplace_back(lift("proj." + g.type_names[t] + ".W"), lift("proj." + g.type_names[t] + ".b"));
  Var h = project_features(tape, g, proj);

  auto maybe_dropout = [&](Var x) {
    return training ? tape.dropout(x, config.dropout, true, *rng) : x;
  };

  AggregateOptions opt;
  opt.lambda = config.lambda;
  opt.norm = config.norm;
  opt.self_loops = config.self_loops;

  auto layer_emb = [&](std::size_t l) {
    Var e = lift("emb" + std::to_string(l) + ".e");
    std::optional<Var> s;
    if (config.self_loops == SelfLoopMode::Embedded) s = lift("emb" + std::to_string(l) + ".s");
    return std::make_pair(e, s);
  };

  Var penult_full;
  switch (config.backbone) {
    case Backbone::REGCN: {
      for (std::size_t l = 0; l < config.layers; ++l) {
        bool last = l + 1 == config.layers;
        h = maybe_dropout(h);
        auto [e, s] = layer_emb(l);
        Var agg = aggregate_with_gradients(tape, pattern, opt, e, s, h);
        if (last) penult_full = agg;
        h = regcn_layer(tape, agg, lift("layer" + std::to_string(l) + ".W"),
                        lift("layer" + std::to_string(l) + ".b"), !last);
      }
      break;
    }
    case Backbone::RESGC: {
      h = maybe_dropout(h);
      WeightedAdjacency composite = resgc_composite(pattern, embeddings(), config.self_loops);
      // Embeddings enter the collapsed composite as constants; register their
      // Vars anyway so callers see a complete parameter mapping.
      layer_emb(0);
      layer_emb(1);
      Var agg = tape.spmm(composite.tilde, h);
      penult_full = agg;
      h = tape.matmul(agg, lift("layer0.W"));
      break;
    }
    case Backbone::REGIN: {
      AggregateOptions gin_opt = opt;
      gin_opt.norm = NormMode::None;  // sum aggregation is the point of GIN
      for (std::size_t l = 0; l < config.layers; ++l) {
        bool last = l + 1 == config.layers;
        h = maybe_dropout(h);
        auto [e, s] = layer_emb(l);
        Var agg = aggregate_with_gradients(tape, pattern, gin_opt, e, s, h);
        Var self = tape.scale_by_scalar(h, lift("layer" + std::to_string(l) + ".eps"), 1.0);
        Var mixed = tape.add(agg, self);
        if (last) penult_full = mixed;
        Var z1 = tape.relu(tape.matmul(mixed, lift("layer" + std::to_string(l) + ".W1")));
        h = tape.matmul(z1, lift("layer" + std::to_string(l) + ".W2"));
        if (!last) h = tape.relu(h);
      }
      break;
    }
    case Backbone::GTN: {
      for (std::size_t l = 0; l < config.layers; ++l) {
        bool last = l + 1 == config.layers;
        std::size_t channels = last ? 1 : config.gtn_channels;
        h = maybe_dropout(h);
        std::vector<Var> outs;
        Var w = lift("layer" + std::to_string(l) + ".W");
        Var b = lift("layer" + std::to_string(l) + ".b");
        std::vector<Var> aggs;
        for (std::size_t c = 0; c < channels; ++c) {
          std::vector<Var> scores;
          for (std::size_t j = 0; j < config.gtn_length; ++j)
            scores.push_back(lift("layer" + std::to_string(l) + ".ch" + std::to_string(c) + ".step" +
                                  std::to_string(j) + ".score"));
          Var agg = gtn_aggregate(tape, relation_adjs, scores, h);
          aggs.push_back(agg);
          Var z = tape.add_row_vector(tape.matmul(agg, w), b);
          outs.push_back(last ? z : tape.relu(z));
        }
        if (last) penult_full = gtn_ensemble(tape, aggs);
        h = gtn_ensemble(tape, outs);
      }
      break;
    }
  }

  res.logits = tape.row_slice(h, target_offset, target_offset + target_count);
  res.penultimate = tape.row_slice(penult_full, target_offset, target_offset + target_count);
  return res;
}

ParamCountReport param_count(const ModelConfig& cfg, const HeteroGraph& g) {
  Model m = Model::init(cfg, g, 0);
  ParamCountReport rep;
  for (std::size_t i = 0; i < m.params.size(); ++i)
    if (m.params.trainable[i]) rep.total += m.params.values[i].size();
  std::size_t overhead = 0;
  if (!cfg.freeze_relations) overhead += g.relations.size();
  if (cfg.self_loops == SelfLoopMode::Embedded && !cfg.freeze_selfloops) overhead += g.num_types();
  if (cfg.backbone == Backbone::GTN || cfg.backbone == Backbone::RESGC) overhead = 0;
  rep.per_layer_overhead = overhead;
  return rep;
}

}  // namespace regnn

#include "regnn/relemb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace regnn {

RelationEmbeddings init_embeddings(double lambda, std::size_t num_relations, std::size_t num_types,
                                   std::size_t num_layers) {
  if (lambda <= 0.0) throw std::invalid_argument("init_embeddings: lambda must be positive");
  RelationEmbeddings emb;
  emb.lambda = lambda;
  for (std::size_t l = 0; l < num_layers; ++l) {
    emb.e.emplace_back(1, num_relations, 1.0 / lambda);
    emb.s.emplace_back(1, num_types, 1.0 / lambda);
  }
  return emb;
}

PatternPtr build_pattern(const HeteroGraph& g) {
  auto pat = std::make_shared<AdjacencyPattern>();
  std::size_t n = g.num_nodes();
  pat->num_relations = g.relations.size();
  pat->num_types = g.num_types();
  pat->node_type.resize(n);
  for (std::size_t u = 0; u < n; ++u) pat->node_type[u] = g.type_of(u);
  pat->diag_slot.resize(n);

  SparseCSR& p = pat->pattern;
  p = SparseCSR(n, n);
  std::vector<std::pair<std::size_t, std::uint32_t>> row_entries;  // (col, rel id)
  constexpr std::uint32_t kDiag = static_cast<std::uint32_t>(-1);
  for (std::size_t u = 0; u < n; ++u) {
    row_entries.clear();
    for (std::size_t r = 0; r < g.relations.size(); ++r) {
      const SparseCSR& a = g.relations[r].adj;
      for (std::size_t k = a.row_offsets[u]; k < a.row_offsets[u + 1]; ++k)
        row_entries.emplace_back(a.col_indices[k], static_cast<std::uint32_t>(r));
    }
    row_entries.emplace_back(u, kDiag);
    std::sort(row_entries.begin(), row_entries.end());
    for (std::size_t i = 0; i < row_entries.size();) {
      std::size_t col = row_entries[i].first;
      std::size_t slot = p.col_indices.size();
      p.col_indices.push_back(col);
      if (col == u) pat->diag_slot[u] = slot;
      pat->slot_contrib_offsets.push_back(pat->slot_contrib_rels.size());
      while (i < row_entries.size() && row_entries[i].first == col) {
        if (row_entries[i].second != kDiag) pat->slot_contrib_rels.push_back(row_entries[i].second);
        ++i;
      }
    }
    p.row_offsets[u + 1] = p.col_indices.size();
  }
  pat->slot_contrib_offsets.push_back(pat->slot_contrib_rels.size());
  p.values.assign(p.col_indices.size(), 0.0);
  return pat;
}

namespace {

// Fills values over the pattern from per-relation weights w and per-type
// diagonal weights; returns row sums.
std::vector<double> fill_hat_values(const AdjacencyPattern& pat, const std::vector<double>& w,
                                    const std::vector<double>& diag_w, std::vector<double>& values) {
  const SparseCSR& p = pat.pattern;
  values.assign(p.nnz(), 0.0);
  for (std::size_t slot = 0; slot < p.nnz(); ++slot) {
    double v = 0.0;
    for (std::size_t k = pat.slot_contrib_offsets[slot]; k < pat.slot_contrib_offsets[slot + 1]; ++k)
      v += w[pat.slot_contrib_rels[k]];
    values[slot] = v;
  }
  for (std::size_t u = 0; u < p.rows; ++u) values[pat.diag_slot[u]] += diag_w[pat.node_type[u]];
  std::vector<double> deg(p.rows, 0.0);
  for (std::size_t u = 0; u < p.rows; ++u)
    for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) deg[u] += values[k];
  return deg;
}

std::vector<double> relation_weights(const RelationEmbeddings& emb, std::size_t layer) {
  std::vector<double> w(emb.num_relations());
  for (std::size_t r = 0; r < w.size(); ++r) w[r] = tau(emb.alpha(layer, r));
  return w;
}

std::vector<double> diag_weights(const RelationEmbeddings& emb, std::size_t layer,
                                 SelfLoopMode mode, std::size_t num_types) {
  std::vector<double> d(num_types, 0.0);
  switch (mode) {
    case SelfLoopMode::Embedded:
      for (std::size_t j = 0; j < num_types; ++j) d[j] = tau(emb.beta(layer, j));
      break;
    case SelfLoopMode::Identity:
      std::fill(d.begin(), d.end(), 1.0);
      break;
    case SelfLoopMode::None:
      break;
  }
  return d;
}

}  // namespace

WeightedAdjacency assemble_adjacency(const PatternPtr& pat, const RelationEmbeddings& emb,
                                     std::size_t layer, SelfLoopMode self_loops) {
  if (layer >= emb.num_layers()) throw std::out_of_range("assemble_adjacency: layer index");
  if (emb.num_relations() != pat->num_relations)
    throw std::invalid_argument("assemble_adjacency: embedding/relation count mismatch");
  WeightedAdjacency wa;
  wa.pattern = pat;
  wa.hat = pat->pattern;
  std::vector<double> w = relation_weights(emb, layer);
  std::vector<double> dw = diag_weights(emb, layer, self_loops, pat->num_types);
  wa.degrees = fill_hat_values(*pat, w, dw, wa.hat.values);
  return wa;
}

WeightedAdjacency assemble_adjacency(const HeteroGraph& g, const RelationEmbeddings& emb,
                                     std::size_t layer, bool include_self_loops) {
  return assemble_adjacency(build_pattern(g), emb, layer,
                            include_self_loops ? SelfLoopMode::Embedded : SelfLoopMode::None);
}

WeightedAdjacency normalize_adjacency(WeightedAdjacency wa, NormMode mode) {
  wa.tilde = wa.hat;
  wa.norm = mode;
  if (mode == NormMode::Row) {
    for (std::size_t u = 0; u < wa.hat.rows; ++u) {
      double d = std::max(wa.degrees[u], kDegreeEps);
      for (std::size_t k = wa.hat.row_offsets[u]; k < wa.hat.row_offsets[u + 1]; ++k)
        wa.tilde.values[k] = wa.hat.values[k] / d;
    }
  } else if (mode == NormMode::Symmetric) {
    for (std::size_t u = 0; u < wa.hat.rows; ++u)
      for (std::size_t k = wa.hat.row_offsets[u]; k < wa.hat.row_offsets[u + 1]; ++k)
        if (wa.hat.values[k] < 0.0)
          throw std::domain_error("normalize_adjacency: symmetric mode with negative entry at (" +
                                  std::to_string(u) + "," + std::to_string(wa.hat.col_indices[k]) +
                                  ") = " + std::to_string(wa.hat.values[k]));
    std::vector<double> scale(wa.hat.rows, 0.0);
    for (std::size_t u = 0; u < wa.hat.rows; ++u)
      scale[u] = wa.degrees[u] > kDegreeEps ? 1.0 / std::sqrt(wa.degrees[u]) : 0.0;
    for (std::size_t u = 0; u < wa.hat.rows; ++u)
      for (std::size_t k = wa.hat.row_offsets[u]; k < wa.hat.row_offsets[u + 1]; ++k)
        wa.tilde.values[k] = wa.hat.values[k] * scale[u] * scale[wa.hat.col_indices[k]];
  }
  return wa;
}

namespace {

struct AggSaved {
  PatternPtr pat;
  AggregateOptions opt;
  std::vector<double> norm_values;  // A-tilde per slot
  std::vector<double> degrees;      // raw row sums of A-hat
  std::vector<double> scale;        // symmetric mode row scales
  std::vector<double> alpha;        // per relation
  std::vector<double> beta;         // per type (Embedded only)
  std::size_t e_idx = 0, s_idx = 0, h_idx = 0;
  bool has_s = false;
};

}  // namespace

Var aggregate_with_gradients(Tape& tape, const PatternPtr& pat, const AggregateOptions& opt,
                             Var e_vec, std::optional<Var> s_vec, Var h) {
  const DenseMatrix& ev = tape.value(e_vec);
  if (ev.rows() != 1 || ev.cols() != pat->num_relations)
    throw std::invalid_argument("aggregate: e_vec must be 1 x num_relations");
  if (opt.self_loops == SelfLoopMode::Embedded) {
    if (!s_vec || !s_vec->valid())
      throw std::invalid_argument("aggregate: embedded self-loops need s_vec");
    const DenseMatrix& sv = tape.value(*s_vec);
    if (sv.rows() != 1 || sv.cols() != pat->num_types)
      throw std::invalid_argument("aggregate: s_vec must be 1 x num_types");
  }
  const DenseMatrix& hv = tape.value(h);
  if (hv.rows() != pat->pattern.cols) throw std::invalid_argument("aggregate: H row count");

  auto saved = std::make_shared<AggSaved>();
  saved->pat = pat;
  saved->opt = opt;
  saved->e_idx = e_vec.idx;
  saved->h_idx = h.idx;
  saved->has_s = opt.self_loops == SelfLoopMode::Embedded;
  if (saved->has_s) saved->s_idx = s_vec->idx;

  std::size_t R = pat->num_relations, F = pat->num_types;
  saved->alpha.resize(R);
  std::vector<double> w(R);
  for (std::size_t r = 0; r < R; ++r) {
    saved->alpha[r] = opt.lambda * ev(0, r);
    w[r] = tau(saved->alpha[r]);
  }
  std::vector<double> dw(F, 0.0);
  if (opt.self_loops == SelfLoopMode::Embedded) {
    saved->beta.resize(F);
    for (std::size_t j = 0; j < F; ++j) {
      saved->beta[j] = opt.lambda * tape.value(*s_vec)(0, j);
      dw[j] = tau(saved->beta[j]);
    }
  } else if (opt.self_loops == SelfLoopMode::Identity) {
    std::fill(dw.begin(), dw.end(), 1.0);
  }

  std::vector<double> hat_values;
  saved->degrees = fill_hat_values(*pat, w, dw, hat_values);

  const SparseCSR& p = pat->pattern;
  saved->norm_values = hat_values;
  if (opt.norm == NormMode::Row) {
    for (std::size_t u = 0; u < p.rows; ++u) {
      double d = std::max(saved->degrees[u], kDegreeEps);
      for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k)
        saved->norm_values[k] = hat_values[k] / d;
    }
  } else if (opt.norm == NormMode::Symmetric) {
    for (std::size_t k = 0; k < hat_values.size(); ++k)
      if (hat_values[k] < 0.0)
        throw std::domain_error("aggregate: symmetric normalization with negative entry");
    saved->scale.resize(p.rows);
    for (std::size_t u = 0; u < p.rows; ++u)
      saved->scale[u] = saved->degrees[u] > kDegreeEps ? 1.0 / std::sqrt(saved->degrees[u]) : 0.0;
    for (std::size_t u = 0; u < p.rows; ++u)
      for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k)
        saved->norm_values[k] = hat_values[k] * saved->scale[u] * saved->scale[p.col_indices[k]];
  }

  DenseMatrix out(p.rows, hv.cols());
  for (std::size_t u = 0; u < p.rows; ++u) {
    double* orow = out.row_ptr(u);
    for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
      double v = saved->norm_values[k];
      const double* hrow = hv.row_ptr(p.col_indices[k]);
      for (std::size_t j = 0; j < hv.cols(); ++j) orow[j] += v * hrow[j];
    }
  }

  return tape.make_node(std::move(out), [saved](Tape& t, std::size_t self) {
    const AdjacencyPattern& pat = *saved->pat;
    const SparseCSR& p = pat.pattern;
    const DenseMatrix& g = t.grad_ref(self);
    const DenseMatrix& out = t.value(Var{self});
    const DenseMatrix& hv = t.value(Var{saved->h_idx});
    DenseMatrix& hg = t.grad_ref(saved->h_idx);
    std::size_t dim = hv.cols();

    // dL/dH = A-tilde^T * G
    for (std::size_t u = 0; u < p.rows; ++u) {
      const double* grow = g.row_ptr(u);
      for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
        double v = saved->norm_values[k];
        if (v == 0.0) continue;
        double* hrow = hg.row_ptr(p.col_indices[k]);
        for (std::size_t j = 0; j < dim; ++j) hrow[j] += v * grow[j];
      }
    }

    // Per-slot adjoint of the unnormalized A-hat entries, including the path
    // through the degrees of the normalization.
    std::vector<double> slot_grad(p.nnz(), 0.0);
    if (saved->opt.norm == NormMode::Row) {
      for (std::size_t u = 0; u < p.rows; ++u) {
        bool clamped = saved->degrees[u] <= kDegreeEps;
        double d = std::max(saved->degrees[u], kDegreeEps);
        const double* grow = g.row_ptr(u);
        double cu = 0.0;
        if (!clamped) {
          const double* orow = out.row_ptr(u);
          for (std::size_t j = 0; j < dim; ++j) cu += grow[j] * orow[j];
        }
        for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
          const double* hrow = hv.row_ptr(p.col_indices[k]);
          double gh = 0.0;
          for (std::size_t j = 0; j < dim; ++j) gh += grow[j] * hrow[j];
          slot_grad[k] = (gh - cu) / d;
        }
      }
    } else if (saved->opt.norm == NormMode::None) {
      for (std::size_t u = 0; u < p.rows; ++u) {
        const double* grow = g.row_ptr(u);
        for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
          const double* hrow = hv.row_ptr(p.col_indices[k]);
          double gh = 0.0;
          for (std::size_t j = 0; j < dim; ++j) gh += grow[j] * hrow[j];
          slot_grad[k] = gh;
        }
      }
    } else {  // Symmetric
      std::vector<double> gh(p.nnz(), 0.0);
      std::vector<double> deg_adj(p.rows, 0.0);  // sum of A-tilde[u,v] * gh over row and column u
      for (std::size_t u = 0; u < p.rows; ++u) {
        const double* grow = g.row_ptr(u);
        for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
          std::size_t v = p.col_indices[k];
          const double* hrow = hv.row_ptr(v);
          double d2 = 0.0;
          for (std::size_t j = 0; j < dim; ++j) d2 += grow[j] * hrow[j];
          gh[k] = d2;
          double weighted = saved->norm_values[k] * d2;
          deg_adj[u] += weighted;
          deg_adj[v] += weighted;
        }
      }
      for (std::size_t u = 0; u < p.rows; ++u) {
        bool clamped = saved->degrees[u] <= kDegreeEps;
        double dd_u = clamped ? 0.0 : -deg_adj[u] / (2.0 * saved->degrees[u]);
        for (std::size_t k = p.row_offsets[u]; k < p.row_offsets[u + 1]; ++k) {
          std::size_t v = p.col_indices[k];
          slot_grad[k] = gh[k] * saved->scale[u] * saved->scale[v] + dd_u;
        }
      }
    }

    // Route slot adjoints to the embeddings through tau and lambda.
    if (t.requires_grad(Var{saved->e_idx}) && pat.num_relations > 0) {
      std::vector<double> acc(pat.num_relations, 0.0);
      for (std::size_t slot = 0; slot < p.nnz(); ++slot) {
        for (std::size_t k = pat.slot_contrib_offsets[slot]; k < pat.slot_contrib_offsets[slot + 1];
             ++k)
          acc[pat.slot_contrib_rels[k]] += slot_grad[slot];
      }
      DenseMatrix& eg = t.grad_ref(saved->e_idx);
      for (std::size_t r = 0; r < pat.num_relations; ++r)
        eg(0, r) += saved->opt.lambda * tau_grad(saved->alpha[r]) * acc[r];
    }
    if (saved->has_s && t.requires_grad(Var{saved->s_idx})) {
      std::vector<double> acc(pat.num_types, 0.0);
      for (std::size_t u = 0; u < p.rows; ++u)
        acc[pat.node_type[u]] += slot_grad[pat.diag_slot[u]];
      DenseMatrix& sg = t.grad_ref(saved->s_idx);
      for (std::size_t j = 0; j < pat.num_types; ++j)
        sg(0, j) += saved->opt.lambda * tau_grad(saved->beta[j]) * acc[j];
    }
  });
}

}  // namespace regnn

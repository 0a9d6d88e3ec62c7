#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "regnn/hgraph.hpp"
#include "regnn/sparse.hpp"
#include "regnn/tape.hpp"

namespace regnn {

// LeakyReLU applied to scaled embeddings when turning them into aggregation
// weights. Negative slope fixed at 0.01.
constexpr double kTauSlope = 0.01;
inline double tau(double x) { return x >= 0.0 ? x : kTauSlope * x; }
inline double tau_grad(double x) { return x >= 0.0 ? 1.0 : kTauSlope; }

// Guard for rows whose weighted degree approaches zero; keeps the forward
// pass finite and the gradient bounded.
constexpr double kDegreeEps = 1e-12;

enum class SelfLoopMode { Embedded, Identity, None };
enum class NormMode { Row, Symmetric, None };

// Per-layer scalar embeddings: one per relation (e) and one per node type (s),
// together with the fixed gradient scaling factor lambda. The effective
// aggregation weights are tau(alpha) with alpha = lambda * e (and beta =
// lambda * s for self-loops). At initialization alpha = beta = 1 exactly.
struct RelationEmbeddings {
  double lambda = 1.0;
  std::vector<DenseMatrix> e;  // per layer, 1 x |R|
  std::vector<DenseMatrix> s;  // per layer, 1 x |F|

  std::size_t num_layers() const { return e.size(); }
  std::size_t num_relations() const { return e.empty() ? 0 : e[0].cols(); }
  std::size_t num_types() const { return s.empty() ? 0 : s[0].cols(); }
  double alpha(std::size_t layer, std::size_t rel) const { return lambda * e[layer](0, rel); }
  double beta(std::size_t layer, std::size_t type) const { return lambda * s[layer](0, type); }
};

RelationEmbeddings init_embeddings(double lambda, std::size_t num_relations, std::size_t num_types,
                                   std::size_t num_layers);

// Union sparsity pattern of all relations plus the diagonal, with provenance:
// for each stored slot, which relation ids contribute to it. Built once per
// graph and shared by every layer; only the values are rebuilt per forward.
struct AdjacencyPattern {
  SparseCSR pattern;  // values unused
  std::vector<std::size_t> slot_contrib_offsets;  // per slot, into slot_contrib_rels
  std::vector<std::uint32_t> slot_contrib_rels;
  std::vector<std::size_t> diag_slot;  // per node, slot index of (u,u)
  std::vector<int> node_type;          // phi
  std::size_t num_relations = 0;
  std::size_t num_types = 0;
};

using PatternPtr = std::shared_ptr<const AdjacencyPattern>;

PatternPtr build_pattern(const HeteroGraph& g);

struct WeightedAdjacency {
  SparseCSR hat;                // A-hat: tau-weighted sum of relations (+ self-loops)
  SparseCSR tilde;              // normalized form; empty until normalized
  std::vector<double> degrees;  // row sums of hat
  NormMode norm = NormMode::None;
  PatternPtr pattern;
};

// A-hat[u,v] = sum over relations containing (u,v) of tau(alpha_r), plus
// tau(beta_phi(u)) (Embedded), 1 (Identity) or nothing (None) on the diagonal.
WeightedAdjacency assemble_adjacency(const PatternPtr& pat, const RelationEmbeddings& emb,
                                     std::size_t layer, SelfLoopMode self_loops);
// Convenience overload matching the graph-level call.
WeightedAdjacency assemble_adjacency(const HeteroGraph& g, const RelationEmbeddings& emb,
                                     std::size_t layer, bool include_self_loops);

// Row mode divides each row by max(degree, 1e-12); symmetric mode computes
// D^-1/2 A D^-1/2 and rejects negative entries. Zero-degree rows stay zero.
WeightedAdjacency normalize_adjacency(WeightedAdjacency wa, NormMode mode);

struct AggregateOptions {
  double lambda = 1.0;
  NormMode norm = NormMode::Row;
  SelfLoopMode self_loops = SelfLoopMode::Embedded;
};

// Differentiable aggregation: value = normalize(A-hat) * H. The backward pass
// routes gradients to H and, through both the tau-weighted entries and the
// degrees of the normalization, to the raw embeddings e and s (scaled by
// lambda). e_vec is 1 x |R|; s_vec is 1 x |F| and only read in Embedded mode.
Var aggregate_with_gradients(Tape& tape, const PatternPtr& pat, const AggregateOptions& opt,
                             Var e_vec, std::optional<Var> s_vec, Var h);

}  // namespace regnn

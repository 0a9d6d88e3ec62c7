#pragma once

#include <random>
#include <vector>

#include "regnn/hgraph.hpp"
#include "regnn/relemb.hpp"

namespace regnn::testing {

// Graph literal: types by (name, count), relations by (name, src type, dst
// type, list of (src local, dst local) edges).
struct RelSpec {
  std::string name;
  std::string src, dst;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

inline HeteroGraph make_graph(std::vector<std::pair<std::string, std::size_t>> types,
                              std::vector<RelSpec> rels) {
  HeteroGraph g;
  for (auto& [name, count] : types) {
    g.type_names.push_back(name);
    g.type_counts.push_back(count);
    g.features.push_back(DenseMatrix::identity(count));
  }
  std::size_t n = g.num_nodes();
  for (auto& rs : rels) {
    RelationDef r;
    r.name = rs.name;
    r.src_type = g.type_index(rs.src);
    r.dst_type = g.type_index(rs.dst);
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (auto& [u, v] : rs.edges)
      coords.emplace_back(g.to_global(r.dst_type, v), g.to_global(r.src_type, u));
    r.adj = SparseCSR::from_coo(n, n, std::move(coords));
    g.relations.push_back(std::move(r));
  }
  g.validate();
  return g;
}

// Dense reference of the weighted adjacency of Eq-style assembly: sum of
// tau(alpha_r) A_r plus diagonal self-loop weights. Independent of the
// pattern/provenance machinery.
inline DenseMatrix dense_weighted_adjacency(const HeteroGraph& g,
                                            const std::vector<double>& rel_weights,
                                            const std::vector<double>& diag_by_type) {
  std::size_t n = g.num_nodes();
  DenseMatrix a(n, n);
  for (std::size_t r = 0; r < g.relations.size(); ++r) {
    const SparseCSR& adj = g.relations[r].adj;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t k = adj.row_offsets[u]; k < adj.row_offsets[u + 1]; ++k)
        a(u, adj.col_indices[k]) += rel_weights[r] * adj.values[k];
  }
  for (std::size_t u = 0; u < n; ++u) a(u, u) += diag_by_type[g.type_of(u)];
  return a;
}

inline DenseMatrix dense_row_normalize(DenseMatrix a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) d += a(i, j);
    d = std::max(d, 1e-12);
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) /= d;
  }
  return a;
}

}  // namespace regnn::testing

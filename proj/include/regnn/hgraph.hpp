#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regnn/dense.hpp"
#include "regnn/sparse.hpp"

namespace regnn {

// One edge type. The adjacency is stored over global node ids with the
// receiver on the row: adj[u, v] != 0 means v (src type) sends a message
// to u (dst type). Entries are unit valued; duplicate input edges collapse.
struct RelationDef {
  std::string name;
  int src_type = 0;
  int dst_type = 0;
  SparseCSR adj;  // N x N over global ids
  bool is_reverse = false;
};

struct Splits {
  std::vector<int> train, valid, test;  // target-type local indices
};

// Typed graph: node types are concatenated in declaration order to form the
// global id space, so each type occupies one contiguous block of rows.
class HeteroGraph {
 public:
  std::vector<std::string> type_names;
  std::vector<std::size_t> type_counts;
  std::vector<DenseMatrix> features;  // per type, type_counts[t] x feature_dim_t
  std::vector<RelationDef> relations;
  int target_type = -1;
  std::vector<int> labels;  // per target-type node, -1 if absent
  int num_classes = 0;
  Splits splits;

  std::size_t num_types() const { return type_names.size(); }
  std::size_t num_nodes() const;
  std::size_t type_offset(int type) const;
  std::size_t to_global(int type, std::size_t local) const { return type_offset(type) + local; }
  std::pair<int, std::size_t> to_local(std::size_t global) const;
  int type_of(std::size_t global) const { return to_local(global).first; }
  int type_index(const std::string& name) const;  // -1 if unknown

  // Checks every structural invariant; throws with the offending relation /
  // index in the message.
  void validate() const;
};

struct RelationStructures {
  std::vector<const SparseCSR*> adjacencies;  // A_i, borrowed from the graph
  std::vector<SparseCSR> type_masks;          // I_j diagonal masks, one per node type
};

HeteroGraph load_graph(const std::string& path);
HeteroGraph parse_graph_json(const std::string& text);
std::string graph_to_json(const HeteroGraph& g);
void save_graph(const HeteroGraph& g, const std::string& path);

// Appends the transposed relation r_rev (is_reverse = true) for every stored
// relation that is directed in effect: different endpoint types, or same-type
// with an asymmetric adjacency. Idempotent.
HeteroGraph add_reverse_relations(const HeteroGraph& g);

RelationStructures relation_structures(const HeteroGraph& g);

}  // namespace regnn

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "regnn/hgraph.hpp"

namespace regnn {

struct SyntheticRelationSpec {
  std::string name;
  std::string src_type;
  std::string dst_type;
  // Probability that an edge connects endpoints with the same latent class.
  // A relation carries no class signal at homophily = 1 / num_classes.
  double homophily = 0.5;
  std::size_t edges_per_dst = 5;
};

struct SyntheticSpec {
  std::vector<std::pair<std::string, std::size_t>> types;  // (name, count)
  std::string target_type;
  std::size_t num_classes = 2;
  std::vector<SyntheticRelationSpec> relations;
  std::size_t feature_dim = 8;
  double class_separation = 1.0;  // distance between per-class feature means
  double noise = 0.5;
  // Types whose features carry no class signal (pure noise).
  std::set<std::string> uninformative_types;
};

struct SyntheticGraph {
  HeteroGraph graph;
  // Latent class per node of every type (the target type's latents are its
  // labels); exposed so probes can audit what the generator planted.
  std::vector<std::vector<int>> latent;
};

// Deterministic for a fixed (spec, seed). Target labels are balanced within
// one node per class. Splits: 400/400/rest when the target type has at least
// 1000 nodes, otherwise 10%/10%/80%.
SyntheticGraph generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace regnn

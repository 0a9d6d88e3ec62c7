#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regnn/hgraph.hpp"
#include "regnn/layers.hpp"
#include "regnn/optim.hpp"
#include "regnn/proofs.hpp"

namespace regnn {

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Dense reference forward of a plain GCN stack on the homogenized graph
// (sum of relation adjacencies plus I, row-normalized), sharing the given
// projection and layer weights. Oracle path for the degeneration check.
DenseMatrix plain_gcn_reference(const HeteroGraph& g, const Model& model);

// RE-GCN with alpha = beta = 1 frozen against the dense plain-GCN reference.
CheckResult degeneration_check(std::uint64_t seed);

// Central finite differences over every trainable parameter of small random
// models (relation and self-loop embeddings included).
CheckResult gradient_check(std::size_t graphs, std::uint64_t seed, Backbone backbone = Backbone::REGCN,
                           NormMode norm = NormMode::Row);

// kappa(lambda g) identities for all five optimizer kinds over random traces.
std::vector<CheckResult> optimizer_identity_checks(std::size_t traces, std::size_t steps,
                                                   double lambda, std::uint64_t seed);

struct VerifySummary {
  std::vector<CheckResult> checks;
  bool all_pass = true;
  std::string to_json() const;
};

VerifySummary run_verification(std::uint64_t seed);

// Random labeled model/graph pair for gradient checking, exposed for tests.
struct GradCheckInstance {
  HeteroGraph graph;
  ModelConfig config;
};
GradCheckInstance make_gradcheck_instance(std::uint64_t seed, Backbone backbone, NormMode norm);

}  // namespace regnn

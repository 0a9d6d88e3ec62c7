#include "regnn/synthetic.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace regnn {

SyntheticGraph generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.types.empty()) throw std::invalid_argument("synthetic: no node types");
  if (spec.num_classes < 1) throw std::invalid_argument("synthetic: num_classes must be >= 1");
  if (spec.feature_dim < 1) throw std::invalid_argument("synthetic: feature_dim must be >= 1");
  for (const auto& [name, count] : spec.types)
    if (count == 0) throw std::invalid_argument("synthetic: type '" + name + "' has zero nodes");
  for (const auto& r : spec.relations)
    if (r.homophily < 0.0 || r.homophily > 1.0)
      throw std::invalid_argument("synthetic: homophily for '" + r.name + "' outside [0,1]");

  std::mt19937_64 rng(seed);
  SyntheticGraph out;
  HeteroGraph& g = out.graph;

  for (const auto& [name, count] : spec.types) {
    g.type_names.push_back(name);
    g.type_counts.push_back(count);
  }
  g.target_type = g.type_index(spec.target_type);
  if (g.target_type < 0)
    throw std::invalid_argument("synthetic: unknown target type '" + spec.target_type + "'");
  if (spec.num_classes > g.type_counts[g.target_type])
    throw std::invalid_argument("synthetic: more classes than target nodes");

  // Balanced latent classes per type: round-robin, then shuffled.
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    std::vector<int> latent(g.type_counts[t]);
    for (std::size_t i = 0; i < latent.size(); ++i)
      latent[i] = static_cast<int>(i % spec.num_classes);
    std::shuffle(latent.begin(), latent.end(), rng);
    out.latent.push_back(std::move(latent));
  }
  g.labels = out.latent[g.target_type];
  g.num_classes = static_cast<int>(spec.num_classes);

  // Features: class mean is class_separation along one axis per class,
  // plus Gaussian noise. Uninformative types get noise only.
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    bool informative = spec.uninformative_types.count(g.type_names[t]) == 0;
    DenseMatrix x(g.type_counts[t], spec.feature_dim);
    for (std::size_t i = 0; i < g.type_counts[t]; ++i) {
      for (std::size_t j = 0; j < spec.feature_dim; ++j) x(i, j) = spec.noise * gauss(rng);
      if (informative) {
        std::size_t axis = static_cast<std::size_t>(out.latent[t][i]) % spec.feature_dim;
        x(i, axis) += spec.class_separation;
      }
    }
    g.features.push_back(std::move(x));
  }

  // Edges: per receiver, draw senders; with probability homophily the sender
  // shares the receiver's latent class, otherwise it is drawn from another
  // class (uniform within the pool).
  std::size_t n = g.num_nodes();
  for (const auto& rs : spec.relations) {
    int src_t = g.type_index(rs.src_type), dst_t = g.type_index(rs.dst_type);
    if (src_t < 0 || dst_t < 0)
      throw std::invalid_argument("synthetic: relation '" + rs.name + "' references unknown type");
    std::vector<std::vector<std::size_t>> by_class(spec.num_classes);
    for (std::size_t i = 0; i < g.type_counts[src_t]; ++i)
      by_class[out.latent[src_t][i]].push_back(i);

    std::vector<std::pair<std::size_t, std::size_t>> coords;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any_src(0, g.type_counts[src_t] - 1);
    for (std::size_t u = 0; u < g.type_counts[dst_t]; ++u) {
      int cls = out.latent[dst_t][u];
      std::set<std::size_t> chosen;
      std::size_t want = std::min<std::size_t>(rs.edges_per_dst, g.type_counts[src_t]);
      std::size_t attempts = 0;
      while (chosen.size() < want && attempts < want * 30 + 30) {
        ++attempts;
        bool same = coin(rng) < rs.homophily;
        std::size_t v;
        const auto& pool = by_class[cls];
        if (same && !pool.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          v = pool[pick(rng)];
        } else if (!same && pool.size() < g.type_counts[src_t]) {
          do {
            v = any_src(rng);
          } while (out.latent[src_t][v] == cls);
        } else {
          v = any_src(rng);
        }
        chosen.insert(v);
      }
      for (std::size_t v : chosen)
        coords.emplace_back(g.to_global(dst_t, u), g.to_global(src_t, v));
    }
    RelationDef r;
    r.name = rs.name;
    r.src_type = src_t;
    r.dst_type = dst_t;
    r.adj = SparseCSR::from_coo(n, n, std::move(coords));
    g.relations.push_back(std::move(r));
  }

  // Splits over the target type.
  std::size_t tc = g.type_counts[g.target_type];
  std::vector<int> order(tc);
  for (std::size_t i = 0; i < tc; ++i) order[i] = static_cast<int>(i);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_train, n_valid;
  if (tc >= 1000) {
    n_train = 400;
    n_valid = 400;
  } else {
    n_train = std::max<std::size_t>(1, tc / 10);
    n_valid = std::max<std::size_t>(1, tc / 10);
  }
  g.splits.train.assign(order.begin(), order.begin() + n_train);
  g.splits.valid.assign(order.begin() + n_train, order.begin() + n_train + n_valid);
  g.splits.test.assign(order.begin() + n_train + n_valid, order.end());

  g.validate();
  return out;
}

}  // namespace regnn

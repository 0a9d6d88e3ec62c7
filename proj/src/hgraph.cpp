#include "regnn/hgraph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace regnn {

using nlohmann::json;

std::size_t HeteroGraph::num_nodes() const {
  std::size_t n = 0;
  for (auto c : type_counts) n += c;
  return n;
}

std::size_t HeteroGraph::type_offset(int type) const {
  std::size_t off = 0;
  for (int t = 0; t < type; ++t) off += type_counts[t];
  return off;
}

std::pair<int, std::size_t> HeteroGraph::to_local(std::size_t global) const {
  std::size_t off = 0;
  for (std::size_t t = 0; t < type_counts.size(); ++t) {
    if (global < off + type_counts[t]) return {static_cast<int>(t), global - off};
    off += type_counts[t];
  }
  throw std::out_of_range("to_local: global id " + std::to_string(global) + " out of range");
}

int HeteroGraph::type_index(const std::string& name) const {
  for (std::size_t t = 0; t < type_names.size(); ++t)
    if (type_names[t] == name) return static_cast<int>(t);
  return -1;
}

void HeteroGraph::validate() const {
  if (type_names.size() != type_counts.size() || type_names.size() != features.size())
    throw std::runtime_error("graph: type arrays out of sync");
  std::size_t n = num_nodes();
  for (std::size_t t = 0; t < type_counts.size(); ++t) {
    if (type_counts[t] == 0) throw std::runtime_error("graph: type '" + type_names[t] + "' has zero nodes");
    if (features[t].rows() != type_counts[t])
      throw std::runtime_error("graph: feature rows for type '" + type_names[t] + "' != node count");
  }
  for (const auto& r : relations) {
    r.adj.validate();
    if (r.adj.rows != n || r.adj.cols != n)
      throw std::runtime_error("relation '" + r.name + "': adjacency not global-sized");
    std::size_t dst_lo = type_offset(r.dst_type), dst_hi = dst_lo + type_counts[r.dst_type];
    std::size_t src_lo = type_offset(r.src_type), src_hi = src_lo + type_counts[r.src_type];
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t k = r.adj.row_offsets[u]; k < r.adj.row_offsets[u + 1]; ++k) {
        std::size_t v = r.adj.col_indices[k];
        if (u < dst_lo || u >= dst_hi)
          throw std::runtime_error("relation '" + r.name + "': receiver " + std::to_string(u) +
                                   " not of dst type");
        if (v < src_lo || v >= src_hi)
          throw std::runtime_error("relation '" + r.name + "': sender " + std::to_string(v) +
                                   " not of src type");
      }
    }
  }
  if (target_type >= 0) {
    std::size_t tc = type_counts[target_type];
    if (!labels.empty() && labels.size() != tc)
      throw std::runtime_error("graph: label count != target node count");
    std::set<int> seen;
    auto check_split = [&](const std::vector<int>& s, const char* which) {
      for (int i : s) {
        if (i < 0 || static_cast<std::size_t>(i) >= tc)
          throw std::runtime_error(std::string("graph: ") + which + " split index " +
                                   std::to_string(i) + " out of target range");
        if (!seen.insert(i).second)
          throw std::runtime_error(std::string("graph: split index ") + std::to_string(i) +
                                   " appears in more than one split");
      }
    };
    check_split(splits.train, "train");
    check_split(splits.valid, "valid");
    check_split(splits.test, "test");
  }
}

namespace {

DenseMatrix parse_feature_matrix(const json& j, std::size_t count, const std::string& type_name) {
  if (j.size() != count)
    throw std::runtime_error("graph file: features for type '" + type_name + "' have " +
                             std::to_string(j.size()) + " rows, expected " + std::to_string(count));
  std::size_t dim = j.empty() ? 0 : j.at(0).size();
  DenseMatrix m(count, dim);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& row = j.at(i);
    if (row.size() != dim)
      throw std::runtime_error("graph file: ragged feature row " + std::to_string(i) +
                               " for type '" + type_name + "'");
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = row.at(k).get<double>();
  }
  return m;
}

}  // namespace

HeteroGraph parse_graph_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("graph file: JSON parse error: ") + e.what());
  }
  if (!doc.contains("format") || doc["format"] != "regnn-graph/1")
    throw std::runtime_error("graph file: missing or unsupported 'format' (want regnn-graph/1)");
  if (!doc.contains("node_types") || !doc["node_types"].is_array() || doc["node_types"].empty())
    throw std::runtime_error("graph file: 'node_types' must be a non-empty array");

  HeteroGraph g;
  for (const auto& nt : doc["node_types"]) {
    if (!nt.contains("name") || !nt.contains("count"))
      throw std::runtime_error("graph file: node type entry needs 'name' and 'count'");
    std::string name = nt["name"].get<std::string>();
    long long count = nt["count"].get<long long>();
    if (count <= 0) throw std::runtime_error("graph file: type '" + name + "' count must be positive");
    if (g.type_index(name) >= 0) throw std::runtime_error("graph file: duplicate node type '" + name + "'");
    g.type_names.push_back(name);
    g.type_counts.push_back(static_cast<std::size_t>(count));
    if (nt.contains("features")) {
      g.features.push_back(parse_feature_matrix(nt["features"], g.type_counts.back(), name));
    } else {
      // One-hot identity for attribute-less types.
      g.features.push_back(DenseMatrix::identity(g.type_counts.back()));
    }
    if (nt.value("target", false)) {
      if (g.target_type >= 0) throw std::runtime_error("graph file: more than one target type");
      g.target_type = static_cast<int>(g.type_names.size()) - 1;
      if (nt.contains("labels")) {
        g.labels = nt["labels"].get<std::vector<int>>();
        if (g.labels.size() != g.type_counts.back())
          throw std::runtime_error("graph file: labels length != count for target type '" + name + "'");
        for (int l : g.labels) g.num_classes = std::max(g.num_classes, l + 1);
      }
    }
  }

  std::size_t n = g.num_nodes();
  if (doc.contains("relations")) {
    for (const auto& rel : doc["relations"]) {
      RelationDef r;
      r.name = rel.at("name").get<std::string>();
      std::string src = rel.at("src").get<std::string>(), dst = rel.at("dst").get<std::string>();
      r.src_type = g.type_index(src);
      r.dst_type = g.type_index(dst);
      if (r.src_type < 0) throw std::runtime_error("relation '" + r.name + "': unknown src type '" + src + "'");
      if (r.dst_type < 0) throw std::runtime_error("relation '" + r.name + "': unknown dst type '" + dst + "'");
      r.is_reverse = rel.value("is_reverse", false);
      std::vector<std::pair<std::size_t, std::size_t>> coords;
      for (const auto& e : rel.at("edges")) {
        if (!e.is_array() || e.size() != 2)
          throw std::runtime_error("relation '" + r.name + "': edge entries must be [src,dst] pairs");
        long long u = e.at(0).get<long long>(), v = e.at(1).get<long long>();
        if (u < 0 || static_cast<std::size_t>(u) >= g.type_counts[r.src_type])
          throw std::runtime_error("relation '" + r.name + "': src index " + std::to_string(u) +
                                   " out of range for type '" + src + "' (count " +
                                   std::to_string(g.type_counts[r.src_type]) + ")");
        if (v < 0 || static_cast<std::size_t>(v) >= g.type_counts[r.dst_type])
          throw std::runtime_error("relation '" + r.name + "': dst index " + std::to_string(v) +
                                   " out of range for type '" + dst + "' (count " +
                                   std::to_string(g.type_counts[r.dst_type]) + ")");
        // receiver row = dst global id, sender column = src global id
        coords.emplace_back(g.to_global(r.dst_type, static_cast<std::size_t>(v)),
                            g.to_global(r.src_type, static_cast<std::size_t>(u)));
      }
      r.adj = SparseCSR::from_coo(n, n, std::move(coords));
      g.relations.push_back(std::move(r));
    }
  }

  if (doc.contains("splits")) {
    const auto& s = doc["splits"];
    if (g.target_type < 0) throw std::runtime_error("graph file: splits given but no target type");
    if (s.contains("train")) g.splits.train = s["train"].get<std::vector<int>>();
    if (s.contains("valid")) g.splits.valid = s["valid"].get<std::vector<int>>();
    if (s.contains("test")) g.splits.test = s["test"].get<std::vector<int>>();
  }

  g.validate();
  return g;
}

HeteroGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph_json(buf.str());
}

std::string graph_to_json(const HeteroGraph& g) {
  json doc;
  doc["format"] = "regnn-graph/1";
  doc["node_types"] = json::array();
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    json nt;
    nt["name"] = g.type_names[t];
    nt["count"] = g.type_counts[t];
    json feats = json::array();
    for (std::size_t i = 0; i < g.features[t].rows(); ++i) {
      json row = json::array();
      for (std::size_t jx = 0; jx < g.features[t].cols(); ++jx) row.push_back(g.features[t](i, jx));
      feats.push_back(std::move(row));
    }
    nt["features"] = std::move(feats);
    if (static_cast<int>(t) == g.target_type) {
      nt["target"] = true;
      if (!g.labels.empty()) nt["labels"] = g.labels;
    }
    doc["node_types"].push_back(std::move(nt));
  }
  doc["relations"] = json::array();
  for (const auto& r : g.relations) {
    json rel;
    rel["name"] = r.name;
    rel["src"] = g.type_names[r.src_type];
    rel["dst"] = g.type_names[r.dst_type];
    if (r.is_reverse) rel["is_reverse"] = true;
    json edges = json::array();
    std::size_t src_off = g.type_offset(r.src_type), dst_off = g.type_offset(r.dst_type);
    for (std::size_t u = 0; u < r.adj.rows; ++u)
      for (std::size_t k = r.adj.row_offsets[u]; k < r.adj.row_offsets[u + 1]; ++k)
        edges.push_back(json::array({r.adj.col_indices[k] - src_off, u - dst_off}));
    rel["edges"] = std::move(edges);
    doc["relations"].push_back(std::move(rel));
  }
  if (!g.splits.train.empty() || !g.splits.valid.empty() || !g.splits.test.empty()) {
    doc["splits"] = {{"train", g.splits.train}, {"valid", g.splits.valid}, {"test", g.splits.test}};
  }
  return doc.dump();
}

void save_graph(const HeteroGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  out << graph_to_json(g) << "\n";
}

HeteroGraph add_reverse_relations(const HeteroGraph& g) {
  HeteroGraph out = g;
  std::set<std::string> names;
  for (const auto& r : g.relations) names.insert(r.name);
  for (const auto& r : g.relations) {
    if (r.is_reverse) continue;
    std::string rev_name = r.name + "_rev";
    if (names.count(rev_name)) continue;  // already reversed, keeps the op idempotent
    if (r.src_type == r.dst_type && r.adj.structurally_symmetric()) continue;
    RelationDef rev;
    rev.name = rev_name;
    rev.src_type = r.dst_type;
    rev.dst_type = r.src_type;
    rev.adj = r.adj.transpose();
    rev.is_reverse = true;
    out.relations.push_back(std::move(rev));
    names.insert(rev_name);
  }
  return out;
}

RelationStructures relation_structures(const HeteroGraph& g) {
  RelationStructures rs;
  for (const auto& r : g.relations) rs.adjacencies.push_back(&r.adj);
  std::size_t n = g.num_nodes();
  for (std::size_t t = 0; t < g.num_types(); ++t) {
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    std::size_t off = g.type_offset(static_cast<int>(t));
    for (std::size_t i = 0; i < g.type_counts[t]; ++i) coords.emplace_back(off + i, off + i);
    rs.type_masks.push_back(SparseCSR::from_coo(n, n, std::move(coords)));
  }
  return rs;
}

}  // namespace regnn

#include "regnn/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "regnn/checkpoint.hpp"
#include "regnn/metrics.hpp"
#include "regnn/synthetic.hpp"
#include "regnn/train.hpp"
#include "regnn/verify.hpp"

namespace regnn {

namespace {

using nlohmann::json;

SyntheticSpec spec_from_json(const json& doc) {
  SyntheticSpec spec;
  for (const auto& t : doc.at("types"))
    spec.types.emplace_back(t.at(0).get<std::string>(), t.at(1).get<std::size_t>());
  spec.target_type = doc.at("target").get<std::string>();
  spec.num_classes = doc.value("classes", spec.num_classes);
  spec.feature_dim = doc.value("feature_dim", spec.feature_dim);
  spec.class_separation = doc.value("separation", spec.class_separation);
  spec.noise = doc.value("noise", spec.noise);
  if (doc.contains("uninformative"))
    for (const auto& u : doc["uninformative"]) spec.uninformative_types.insert(u.get<std::string>());
  for (const auto& r : doc.at("relations")) {
    SyntheticRelationSpec rs;
    rs.name = r.at("name").get<std::string>();
    rs.src_type = r.at("src").get<std::string>();
    rs.dst_type = r.at("dst").get<std::string>();
    rs.homophily = r.value("homophily", rs.homophily);
    rs.edges_per_dst = r.value("edges_per_dst", rs.edges_per_dst);
    spec.relations.push_back(std::move(rs));
  }
  return spec;
}

SyntheticSpec preset_spec(const std::string& name) {
  SyntheticSpec spec;
  if (name == "skewed") {
    // One strongly homophilous relation cancelled by one heterophilous one of
    // equal degree; only the target's own features are uninformative. A model
    // with fixed unit relation weights sees no net class signal.
    spec.types = {{"src", 300}, {"item", 300}};
    spec.target_type = "item";
    spec.num_classes = 2;
    spec.feature_dim = 12;
    spec.class_separation = 1.2;
    spec.noise = 0.6;
    spec.uninformative_types = {"item"};
    spec.relations = {{"good", "src", "item", 0.98, 6},
                      {"bad", "src", "item", 0.02, 6},
                      {"neutral", "src", "item", 0.5, 6}};
  } else if (name == "separable") {
    spec.types = {{"src", 200}, {"item", 200}};
    spec.target_type = "item";
    spec.num_classes = 2;
    spec.feature_dim = 10;
    spec.class_separation = 4.0;
    spec.noise = 0.2;
    spec.uninformative_types = {"item"};
    spec.relations = {{"link", "src", "item", 0.995, 12}};
  } else if (name == "acm") {
    spec.types = {{"paper", 60}, {"author", 40}, {"subject", 6}};
    spec.target_type = "paper";
    spec.num_classes = 3;
    spec.feature_dim = 8;
    spec.relations = {{"pp", "paper", "paper", 0.8, 3},
                      {"pa", "author", "paper", 0.8, 3},
                      {"ps", "subject", "paper", 0.8, 1}};
  } else if (name == "dblp") {
    spec.types = {{"author", 40}, {"paper", 60}, {"term", 30}, {"venue", 4}};
    spec.target_type = "author";
    spec.num_classes = 4;
    spec.feature_dim = 8;
    spec.relations = {{"ap", "author", "paper", 0.8, 2},
                      {"pt", "term", "paper", 0.5, 3},
                      {"pv", "venue", "paper", 0.8, 1}};
  } else {
    throw CLI::ValidationError("--preset", "unknown preset '" + name + "'");
  }
  return spec;
}

int cmd_gen(const std::string& preset, const std::string& config_path, std::uint64_t seed,
            const std::string& out, bool reverse) {
  SyntheticSpec spec;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config: " + config_path);
    json doc;
    in >> doc;
    spec = spec_from_json(doc);
  } else {
    spec = preset_spec(preset.empty() ? "skewed" : preset);
  }
  SyntheticGraph sg = generate_synthetic(spec, seed);
  HeteroGraph g = reverse ? add_reverse_relations(sg.graph) : sg.graph;
  json doc = json::parse(graph_to_json(g));
  doc["provenance"] = {{"seed", seed},
                       {"preset", preset},
                       {"config", config_path},
                       {"reverse", reverse}};
  {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write graph file: " + out);
    f << doc.dump() << "\n";
  }
  std::cout << "wrote " << out << ": " << g.num_nodes() << " nodes, " << g.relations.size()
            << " relations, seed " << seed << "\n";
  return 0;
}

struct TrainFlags {
  std::string graph, config, out = ".", backbone, norm, selfloop, optimizer, curve;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double lambda = -1.0, lr = -1.0, wd = -1.0, dropout = -1.0;
  long layers = -1, hidden = -1, epochs = -1, patience = -1;
  bool freeze_relations = false, freeze_selfloops = false, no_reverse = false;
};

int cmd_train(const TrainFlags& fl) {
  ModelConfig mc;
  TrainConfig tc;
  if (!fl.config.empty()) apply_config_file(fl.config, mc, tc);
  if (!fl.backbone.empty()) mc.backbone = backbone_from_string(fl.backbone);
  if (!fl.norm.empty()) mc.norm = norm_from_string(fl.norm);
  if (!fl.selfloop.empty()) mc.self_loops = selfloop_from_string(fl.selfloop);
  if (!fl.optimizer.empty()) tc.optimizer = optkind_from_string(fl.optimizer);
  if (fl.lambda > 0) tc.lambda = fl.lambda;
  if (fl.lr >= 0) tc.lr = fl.lr;
  if (fl.wd >= 0) tc.weight_decay = fl.wd;
  if (fl.dropout >= 0) tc.dropout = fl.dropout;
  if (fl.layers > 0) mc.layers = static_cast<std::size_t>(fl.layers);
  if (fl.hidden > 0) mc.hidden = static_cast<std::size_t>(fl.hidden);
  if (fl.epochs > 0) tc.max_epochs = static_cast<std::size_t>(fl.epochs);
  if (fl.patience >= 0) tc.patience = std::min(static_cast<std::size_t>(fl.patience), tc.max_epochs);
  if (fl.seed_set) tc.seed = fl.seed;
  mc.freeze_relations = mc.freeze_relations || fl.freeze_relations;
  mc.freeze_selfloops = mc.freeze_selfloops || fl.freeze_selfloops;
  mc.dropout = tc.dropout;
  mc.lambda = tc.lambda;

  HeteroGraph g = load_graph(fl.graph);
  if (!fl.no_reverse) g = add_reverse_relations(g);

  std::cout << "resolved config:\n"
            << json{{"model", json::parse(model_config_to_json(mc))},
                    {"train", json::parse(train_config_to_json(tc))},
                    {"graph", fl.graph},
                    {"seed", tc.seed}}
                   .dump(2)
            << "\n";

  TrainResult res = train(mc, g, tc);

  std::filesystem::create_directories(fl.out);
  std::string report_path = fl.out + "/report.json";
  std::string ckpt_path = fl.out + "/checkpoint.json";
  {
    std::ofstream out(report_path);
    out << train_report_to_json(res.report, mc, tc) << "\n";
  }
  save_checkpoint(res.model, tc.seed, ckpt_path);
  if (!fl.curve.empty()) {
    std::ofstream out(fl.curve);
    out << "# seed=" << tc.seed << " config=" << model_config_to_json(mc) << "\n";
    out << "epoch,train_loss,valid_micro_f1\n";
    for (std::size_t e = 0; e < res.report.train_loss.size(); ++e)
      out << e << "," << res.report.train_loss[e] << "," << res.report.valid_micro_f1[e] << "\n";
  }
  std::cout << "best epoch " << res.report.best_epoch << ", valid micro-F1 "
            << res.report.best_valid_micro_f1 << ", test micro-F1 " << res.report.test_micro_f1
            << ", test macro-F1 " << res.report.test_macro_f1 << "\n"
            << "wrote " << report_path << " and " << ckpt_path << "\n";
  return 0;
}

int cmd_eval(const std::string& graph_path, const std::string& ckpt_path, std::uint64_t seed,
             bool no_reverse) {
  HeteroGraph g = load_graph(graph_path);
  if (!no_reverse) g = add_reverse_relations(g);
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  Model model = restore_model(ckpt, g);

  json doc;
  doc["seed"] = seed;
  doc["config"] = json::parse(model_config_to_json(model.config));
  DenseMatrix logits = eval_logits(model, g);
  if (!g.splits.test.empty() && !g.labels.empty()) {
    F1Scores f1 = evaluate_f1(logits, g.labels, g.splits.test, g.num_classes);
    doc["test_macro_f1"] = f1.macro;
    doc["test_micro_f1"] = f1.micro;
  }
  if (!g.labels.empty()) {
    DenseMatrix emb = extract_embeddings(model, g);
    std::vector<int> assign = kmeans_cluster(emb, g.num_classes, 10, seed);
    std::vector<int> test_assign, test_labels;
    const std::vector<int>& rows = g.splits.test.empty() ? g.splits.train : g.splits.test;
    for (int i : rows) {
      test_assign.push_back(assign[i]);
      test_labels.push_back(g.labels[i]);
    }
    ClusterAgreement ca = clustering_metrics(test_assign, test_labels);
    doc["nmi"] = ca.nmi;
    doc["ari"] = ca.ari;
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& out) {
  VerifySummary sum = run_verification(seed);
  std::string text = sum.to_json();
  if (!out.empty()) {
    std::ofstream f(out);
    f << text << "\n";
  }
  std::cout << text << "\n";
  return sum.all_pass ? 0 : 1;
}

int cmd_inspect(const std::string& ckpt_path, const std::string& out) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  std::ostringstream csv;
  csv << "# seed=" << ckpt.seed << " config=" << model_config_to_json(ckpt.config) << "\n";
  csv << "layer,kind,name,alpha\n";
  std::size_t levels = ckpt.config.backbone == Backbone::RESGC ? 2 : ckpt.config.layers;
  for (std::size_t l = 0; l < levels; ++l) {
    std::string ename = "emb" + std::to_string(l) + ".e";
    std::string sname = "emb" + std::to_string(l) + ".s";
    if (ckpt.params.has(ename)) {
      const DenseMatrix& e = ckpt.params.get(ename);
      for (std::size_t r = 0; r < e.cols(); ++r) {
        std::string name = r < ckpt.relation_names.size() ? ckpt.relation_names[r]
                                                          : "r" + std::to_string(r);
        csv << l << ",relation," << name << "," << ckpt.config.lambda * e(0, r) << "\n";
      }
    }
    if (ckpt.params.has(sname)) {
      const DenseMatrix& s = ckpt.params.get(sname);
      for (std::size_t j = 0; j < s.cols(); ++j) {
        std::string name = j < ckpt.type_names.size() ? ckpt.type_names[j] : "t" + std::to_string(j);
        csv << l << ",selfloop," << name << "," << ckpt.config.lambda * s(0, j) << "\n";
      }
    }
  }
  if (!out.empty()) {
    std::ofstream f(out);
    f << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"relation-embedding heterogeneous graph networks"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic heterogeneous graph");
  std::string gen_preset, gen_config, gen_out = "graph.json";
  std::uint64_t gen_seed = 0;
  bool gen_reverse = false;
  gen->add_option("--preset", gen_preset, "skewed | separable | acm | dblp");
  gen->add_option("--config", gen_config, "synthetic spec JSON");
  gen->add_option("--out", gen_out, "output graph path");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_flag("--reverse", gen_reverse, "append reversed relations in the file");

  // train
  auto* tr = app.add_subcommand("train", "train a model on a graph file");
  TrainFlags fl;
  tr->add_option("--graph", fl.graph, "graph file")->required();
  tr->add_option("--config", fl.config, "model/train config JSON");
  tr->add_option("--out", fl.out, "output directory");
  auto* seed_opt = tr->add_option("--seed", fl.seed, "training seed");
  tr->add_option("--backbone", fl.backbone, "regcn | resgc | regin | gtn");
  tr->add_option("--lambda", fl.lambda, "gradient scaling factor");
  tr->add_option("--norm", fl.norm, "row | sym");
  tr->add_option("--selfloop", fl.selfloop, "embedded | identity | none");
  tr->add_option("--layers", fl.layers, "layer count");
  tr->add_option("--hidden", fl.hidden, "hidden width");
  tr->add_option("--epochs", fl.epochs, "max epochs");
  tr->add_option("--patience", fl.patience, "early-stop patience");
  tr->add_option("--lr", fl.lr, "learning rate");
  tr->add_option("--weight-decay", fl.wd, "weight decay");
  tr->add_option("--dropout", fl.dropout, "dropout rate");
  tr->add_option("--optimizer", fl.optimizer, "sgd | momentum | nesterov | adagrad | adam");
  tr->add_option("--curve", fl.curve, "per-epoch CSV path");
  tr->add_flag("--freeze-relations", fl.freeze_relations, "pin relation weights at 1");
  tr->add_flag("--freeze-selfloops", fl.freeze_selfloops, "pin self-loop weights at 1");
  tr->add_flag("--no-reverse", fl.no_reverse, "skip reverse-relation augmentation");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint: F1, NMI, ARI");
  std::string ev_graph, ev_ckpt;
  std::uint64_t ev_seed = 0;
  bool ev_no_reverse = false;
  ev->add_option("--graph", ev_graph, "graph file")->required();
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint file")->required();
  ev->add_option("--seed", ev_seed, "k-means seed");
  ev->add_flag("--no-reverse", ev_no_reverse, "skip reverse-relation augmentation");

  // verify
  auto* vf = app.add_subcommand("verify", "run optimizer-scaling and equivalence checks");
  std::uint64_t vf_seed = 12345;
  std::string vf_out;
  vf->add_option("--seed", vf_seed, "verification seed");
  vf->add_option("--out", vf_out, "write the JSON summary here");

  // inspect-weights
  auto* iw = app.add_subcommand("inspect-weights", "dump learned per-layer alpha/beta as CSV");
  std::string iw_ckpt, iw_out;
  iw->add_option("--checkpoint", iw_ckpt, "checkpoint file")->required();
  iw->add_option("--out", iw_out, "CSV path (stdout if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_preset, gen_config, gen_seed, gen_out, gen_reverse);
    if (tr->parsed()) {
      fl.seed_set = seed_opt->count() > 0;
      return cmd_train(fl);
    }
    if (ev->parsed()) return cmd_eval(ev_graph, ev_ckpt, ev_seed, ev_no_reverse);
    if (vf->parsed()) return cmd_verify(vf_seed, vf_out);
    if (iw->parsed()) return cmd_inspect(iw_ckpt, iw_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace regnn

#include "regnn/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace regnn {

using nlohmann::json;

namespace {

json config_json(const ModelConfig& cfg) {
  return json{{"backbone", to_string(cfg.backbone)},
              {"layers", cfg.layers},
              {"hidden", cfg.hidden},
              {"dropout", cfg.dropout},
              {"lambda", cfg.lambda},
              {"norm", to_string(cfg.norm)},
              {"self_loops", to_string(cfg.self_loops)},
              {"freeze_relations", cfg.freeze_relations},
              {"freeze_selfloops", cfg.freeze_selfloops},
              {"gtn_channels", cfg.gtn_channels},
              {"gtn_length", cfg.gtn_length}};
}

ModelConfig config_from(const json& j) {
  ModelConfig cfg;
  if (j.contains("backbone")) cfg.backbone = backbone_from_string(j["backbone"].get<std::string>());
  cfg.layers = j.value("layers", cfg.layers);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.dropout = j.value("dropout", cfg.dropout);
  cfg.lambda = j.value("lambda", cfg.lambda);
  if (j.contains("norm")) cfg.norm = norm_from_string(j["norm"].get<std::string>());
  if (j.contains("self_loops")) cfg.self_loops = selfloop_from_string(j["self_loops"].get<std::string>());
  cfg.freeze_relations = j.value("freeze_relations", cfg.freeze_relations);
  cfg.freeze_selfloops = j.value("freeze_selfloops", cfg.freeze_selfloops);
  cfg.gtn_channels = j.value("gtn_channels", cfg.gtn_channels);
  cfg.gtn_length = j.value("gtn_length", cfg.gtn_length);
  return cfg;
}

json train_json(const TrainConfig& tc) {
  return json{{"max_epochs", tc.max_epochs},
              {"patience", tc.patience},
              {"lr", tc.lr},
              {"weight_decay", tc.weight_decay},
              {"dropout", tc.dropout},
              {"optimizer", to_string(tc.optimizer)},
              {"lambda", tc.lambda},
              {"seed", tc.seed},
              {"decay_embeddings", tc.decay_embeddings}};
}

TrainConfig train_from(const json& j) {
  TrainConfig tc;
  tc.max_epochs = j.value("max_epochs", tc.max_epochs);
  tc.patience = j.value("patience", tc.patience);
  tc.lr = j.value("lr", tc.lr);
  tc.weight_decay = j.value("weight_decay", tc.weight_decay);
  tc.dropout = j.value("dropout", tc.dropout);
  if (j.contains("optimizer")) tc.optimizer = optkind_from_string(j["optimizer"].get<std::string>());
  tc.lambda = j.value("lambda", tc.lambda);
  tc.seed = j.value("seed", tc.seed);
  tc.decay_embeddings = j.value("decay_embeddings", tc.decay_embeddings);
  return tc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  return doc;
}

}  // namespace

std::string model_config_to_json(const ModelConfig& cfg) { return config_json(cfg).dump(2); }
ModelConfig model_config_from_json(const std::string& text) { return config_from(json::parse(text)); }
std::string train_config_to_json(const TrainConfig& tc) { return train_json(tc).dump(2); }
TrainConfig train_config_from_json(const std::string& text) { return train_from(json::parse(text)); }

void apply_config_file(const std::string& path, ModelConfig& mc, TrainConfig& tc) {
  json doc = read_json_file(path);
  if (doc.contains("model")) mc = config_from(doc["model"]);
  if (doc.contains("train")) tc = train_from(doc["train"]);
  // Flat documents are also accepted.
  if (!doc.contains("model") && !doc.contains("train")) {
    mc = config_from(doc);
    tc = train_from(doc);
  }
}

std::string train_report_to_json(const TrainReport& rep, const ModelConfig& cfg,
                                 const TrainConfig& tc) {
  json doc;
  doc["seed"] = rep.seed;
  doc["config"] = {{"model", config_json(cfg)}, {"train", train_json(tc)}};
  doc["epochs_run"] = rep.epochs_run;
  doc["best_epoch"] = rep.best_epoch;
  doc["best_valid_micro_f1"] = rep.best_valid_micro_f1;
  doc["test_macro_f1"] = rep.test_macro_f1;
  doc["test_micro_f1"] = rep.test_micro_f1;
  doc["train_loss"] = rep.train_loss;
  doc["valid_micro_f1"] = rep.valid_micro_f1;
  doc["alpha"] = rep.alpha;
  doc["beta"] = rep.beta;
  doc["wall_seconds"] = rep.wall_seconds;
  doc["param_total"] = rep.param_total;
  doc["param_overhead_per_layer"] = rep.param_overhead_per_layer;
  return doc.dump(2);
}

void save_checkpoint(const Model& model, std::uint64_t seed, const std::string& path) {
  json doc;
  doc["format"] = "regnn-checkpoint/1";
  doc["seed"] = seed;
  doc["config"] = config_json(model.config);
  doc["num_classes"] = model.num_classes;
  doc["relation_names"] = model.relation_names;
  doc["type_names"] = model.type_names;
  doc["params"] = json::array();
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    doc["params"].push_back({{"name", model.params.names[i]},
                             {"rows", model.params.values[i].rows()},
                             {"cols", model.params.values[i].cols()},
                             {"trainable", static_cast<bool>(model.params.trainable[i])},
                             {"data", model.params.values[i].data()}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << doc.dump() << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  json doc = read_json_file(path);
  if (!doc.contains("format") || doc["format"] != "regnn-checkpoint/1")
    throw std::runtime_error("checkpoint: missing or unsupported format field");
  Checkpoint ckpt;
  ckpt.config = config_from(doc.at("config"));
  ckpt.seed = doc.value("seed", 0ull);
  if (doc.contains("relation_names"))
    ckpt.relation_names = doc["relation_names"].get<std::vector<std::string>>();
  if (doc.contains("type_names")) ckpt.type_names = doc["type_names"].get<std::vector<std::string>>();
  for (const auto& p : doc.at("params")) {
    DenseMatrix m(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>(),
                  p.at("data").get<std::vector<double>>());
    ckpt.params.add(p.at("name").get<std::string>(), std::move(m), p.value("trainable", true));
  }
  return ckpt;
}

Model restore_model(const Checkpoint& ckpt, const HeteroGraph& g) {
  Model model = Model::init(ckpt.config, g, ckpt.seed);
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const std::string& name = model.params.names[i];
    if (!ckpt.params.has(name))
      throw std::runtime_error("checkpoint missing parameter " + name +
                               " (graph/checkpoint mismatch?)");
    const DenseMatrix& v = ckpt.params.get(name);
    if (!v.same_shape(model.params.values[i]))
      throw std::runtime_error("checkpoint parameter " + name + " has mismatched shape");
    model.params.values[i] = v;
  }
  return model;
}

}  // namespace regnn

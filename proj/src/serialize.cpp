#include "authpipe/serialize.hpp"

namespace authpipe {

nlohmann::json eval_report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["predictions"] = nlohmann::json::array();
  for (const ImagePrediction& p : report.predictions) {
    j["predictions"].push_back({{"image_id", p.image_id},
                                {"set", std::string(to_string(p.set_label))},
                                {"mean_probability", p.mean_probability},
                                {"predicted_class", p.predicted_class},
                                {"true_class", p.true_class}});
  }
  j["per_group"] = nlohmann::json::object();
  for (const auto& [group, res] : report.per_group) {
    j["per_group"][std::string(to_string(group))] = {
        {"accuracy", res.accuracy},
        {"n_images", res.n_images},
        {"n_correct", res.n_correct}};
  }
  j["confusion"] = {{"true0_pred0", report.confusion.true0_pred0},
                    {"true0_pred1", report.confusion.true0_pred1},
                    {"true1_pred0", report.confusion.true1_pred0},
                    {"true1_pred1", report.confusion.true1_pred1}};
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport report;
  for (const auto& p : j.at("predictions")) {
    ImagePrediction pred;
    pred.image_id = p.at("image_id").get<std::string>();
    pred.set_label = set_label_from_string(p.at("set").get<std::string>());
    pred.mean_probability = p.at("mean_probability").get<double>();
    pred.predicted_class = p.at("predicted_class").get<int>();
    pred.true_class = p.at("true_class").get<int>();
    report.predictions.push_back(std::move(pred));
  }
  for (const auto& [name, res] : j.at("per_group").items()) {
    GroupResult gr;
    gr.accuracy = res.at("accuracy").get<double>();
    gr.n_images = res.at("n_images").get<std::size_t>();
    gr.n_correct = res.at("n_correct").get<std::size_t>();
    report.per_group[eval_group_from_string(name)] = gr;
  }
  const auto& c = j.at("confusion");
  report.confusion.true0_pred0 = c.at("true0_pred0").get<std::size_t>();
  report.confusion.true0_pred1 = c.at("true0_pred1").get<std::size_t>();
  report.confusion.true1_pred0 = c.at("true1_pred0").get<std::size_t>();
  report.confusion.true1_pred1 = c.at("true1_pred1").get<std::size_t>();
  return report;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["artist_tag"] = cfg.artist_tag;
  j["contrast"] = {{"name", std::string(to_string(cfg.contrast.name))},
                   {"include_imitations", cfg.contrast.include_imitations}};
  j["backbone"] = {{"identifier", cfg.backbone.identifier},
                   {"input_side", cfg.backbone.input_side},
                   {"pretrained_source", cfg.backbone.pretrained_source}};
  j["train"] = {{"learning_rate", cfg.train_cfg.learning_rate},
                {"batch_size", cfg.train_cfg.batch_size},
                {"max_epochs", cfg.train_cfg.max_epochs},
                {"early_stop_patience", cfg.train_cfg.early_stop_patience},
                {"seed", cfg.train_cfg.seed}};
  j["manifest"] = cfg.manifest_file.string();
  j["splits"] = cfg.split_file.string();
  j["cache"] = cfg.cache_dir.string();
  return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.artist_tag = j.at("artist_tag").get<std::string>();
  const auto& c = j.at("contrast");
  cfg.contrast.name = contrast_from_string(c.at("name").get<std::string>());
  cfg.contrast.include_imitations = c.at("include_imitations").get<bool>();

  const auto& b = j.at("backbone");
  cfg.backbone = backbone_spec(b.at("identifier").get<std::string>());
  if (b.contains("input_side")) {
    cfg.backbone.input_side = b.at("input_side").get<int>();
  }
  if (b.contains("pretrained_source")) {
    cfg.backbone.pretrained_source =
        b.at("pretrained_source").get<std::string>();
  }

  if (j.contains("train")) {
    const auto& t = j.at("train");
    cfg.train_cfg.learning_rate =
        t.value("learning_rate", cfg.train_cfg.learning_rate);
    cfg.train_cfg.batch_size = t.value("batch_size", cfg.train_cfg.batch_size);
    cfg.train_cfg.max_epochs = t.value("max_epochs", cfg.train_cfg.max_epochs);
    cfg.train_cfg.early_stop_patience =
        t.value("early_stop_patience", cfg.train_cfg.early_stop_patience);
    cfg.train_cfg.seed = t.value("seed", cfg.train_cfg.seed);
  }
  cfg.manifest_file = j.value("manifest", std::string());
  cfg.split_file = j.value("splits", std::string());
  cfg.cache_dir = j.value("cache", std::string());
  return cfg;
}

}  // namespace authpipe

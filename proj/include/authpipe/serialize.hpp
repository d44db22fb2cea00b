#pragma once

#include <json.hpp>

#include "authpipe/evaluator.hpp"
#include "authpipe/runner.hpp"

namespace authpipe {

nlohmann::json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

// The experiment config file schema (data paths included).
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

}  // namespace authpipe

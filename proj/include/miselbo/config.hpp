#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "miselbo/approximations.hpp"
#include "miselbo/targets.hpp"

namespace miselbo {

// Declarative experiment config:
//   {
//     "target": "iii" | {"weights": [...], "means": [...], "sigmas": [...]},
//     "members": [
//       {"label": "q1", "family": "gaussian", "mean": [-3, 0], "sigma": 0.8,
//        "trainable": ["mean"]},
//       {"label": "h1", "family": "hierarchical", "mu_mean": 10,
//        "mu_sigma": 1.0, "cond_sigma": 1.0}
//     ]
//   }
// "sigma" may be a number (isotropic) or an array (diagonal); "mean" may be
// a number for 1-D members.
struct ExperimentConfig {
  nlohmann::json target_spec;  // id string or inline mixture; null if absent
  std::vector<Member> members;
};

Target target_from_spec(const nlohmann::json& spec);
Member member_from_json(const nlohmann::json& spec);
nlohmann::json member_to_json(const Member& member);

ExperimentConfig load_config(const std::string& path);

// Fitted-ensemble round trip: {"target": <spec>, "members": [...]}.
void save_ensemble_config(const std::string& path, const nlohmann::json& target_spec,
                          const std::vector<Member>& members);

}  // namespace miselbo

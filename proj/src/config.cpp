#include "miselbo/config.hpp"

#include <fstream>

#include "miselbo/errors.hpp"

namespace miselbo {

namespace {

using nlohmann::json;

std::vector<double> number_or_array(const json& value, const char* what) {
  if (value.is_number()) return {value.get<double>()};
  if (value.is_array()) {
    std::vector<double> out;
    for (const auto& v : value) {
      if (!v.is_number()) throw ConfigError(std::string(what) + " must hold numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  throw ConfigError(std::string(what) + " must be a number or an array of numbers");
}

}  // namespace

Target target_from_spec(const json& spec) {
  if (spec.is_string()) return make_setting(spec.get<std::string>());
  if (spec.is_object()) {
    if (spec.contains("id")) return make_setting(spec.at("id").get<std::string>());
    if (!spec.contains("weights") || !spec.contains("means") || !spec.contains("sigmas"))
      throw ConfigError("inline target needs weights, means, sigmas");
    GaussianMixtureSpec mixture;
    mixture.weights = spec.at("weights").get<std::vector<double>>();
    for (const auto& mean : spec.at("means"))
      mixture.means.push_back(number_or_array(mean, "target mean"));
    mixture.sigmas = spec.at("sigmas").get<std::vector<double>>();
    return make_gaussian_mixture(std::move(mixture), spec.value("name", std::string("mixture")));
  }
  throw ConfigError("target spec must be an id string or an object");
}

Member member_from_json(const json& spec) {
  if (!spec.is_object()) throw ConfigError("member spec must be an object");
  Member member;
  member.label = spec.value("label", std::string());
  if (member.label.empty()) throw ConfigError("member needs a nonempty label");
  const std::string family = spec.value("family", std::string("gaussian"));

  if (family == "gaussian") {
    GaussianApprox approx;
    if (!spec.contains("mean")) throw ConfigError("gaussian member '" + member.label + "' needs mean");
    approx.mean = number_or_array(spec.at("mean"), "member mean");
    approx.scale = spec.contains("sigma") ? number_or_array(spec.at("sigma"), "member sigma")
                                          : std::vector<double>{1.0};
    approx.train_mean = false;
    approx.train_scale = false;
    if (spec.contains("trainable")) {
      for (const auto& t : spec.at("trainable")) {
        const std::string name = t.get<std::string>();
        if (name == "mean")
          approx.train_mean = true;
        else if (name == "sigma")
          approx.train_scale = true;
        else
          throw ConfigError("member '" + member.label + "': unknown trainable '" + name +
                            "'; valid: mean sigma");
      }
    } else {
      approx.train_mean = true;
    }
    member.approx = std::move(approx);
    return member;
  }

  if (family == "hierarchical") {
    HierarchicalApprox approx;
    approx.mu_mean = spec.value("mu_mean", 10.0);
    approx.mu_sigma = spec.value("mu_sigma", 1.0);
    approx.cond_sigma = spec.value("cond_sigma", 1.0);
    member.approx = approx;
    return member;
  }

  throw ConfigError("member '" + member.label + "': unknown family '" + family +
                    "'; valid: gaussian hierarchical");
}

json member_to_json(const Member& member) {
  json out;
  out["label"] = member.label;
  if (const auto* g = std::get_if<GaussianApprox>(&member.approx)) {
    out["family"] = "gaussian";
    out["mean"] = g->mean;
    out["sigma"] = g->scale.size() == 1 ? json(g->scale[0]) : json(g->scale);
    json trainable = json::array();
    if (g->train_mean) trainable.push_back("mean");
    if (g->train_scale) trainable.push_back("sigma");
    out["trainable"] = trainable;
  } else {
    const auto& h = std::get<HierarchicalApprox>(member.approx);
    out["family"] = "hierarchical";
    out["mu_mean"] = h.mu_mean;
    out["mu_sigma"] = h.mu_sigma;
    out["cond_sigma"] = h.cond_sigma;
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
  ExperimentConfig config;
  if (doc.contains("target")) config.target_spec = doc.at("target");
  if (doc.contains("members"))
    for (const auto& m : doc.at("members")) config.members.push_back(member_from_json(m));
  return config;
}

void save_ensemble_config(const std::string& path, const json& target_spec,
                          const std::vector<Member>& members) {
  json doc;
  if (!target_spec.is_null()) doc["target"] = target_spec;
  doc["members"] = json::array();
  for (const auto& m : members) doc["members"].push_back(member_to_json(m));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << "\n";
}

}  // namespace miselbo

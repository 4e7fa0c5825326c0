// Copyright 2026 The llmsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "llmsched/sim_config.h"

#include <algorithm>
#include <fstream>
#include <type_traits>

#include "llmsched/errors.h"

namespace llmsched {

using nlohmann::json;

std::string Method::name() const {
  switch (kind) {
    case Kind::kSls: return "SLS";
    case Kind::kFifo: return "FIFO";
    case Kind::kRandom: return "RANDOM";
    case Kind::kSingle: return "SINGLE(" + llm + ")";
    case Kind::kStaticOnce: return "STATIC_ONCE";
  }
  return "SLS";
}

Method Method::parse(std::string_view text) {
  if (text == "SLS") return {Kind::kSls, ""};
  if (text == "FIFO") return {Kind::kFifo, ""};
  if (text == "RANDOM") return {Kind::kRandom, ""};
  if (text == "STATIC_ONCE") return {Kind::kStaticOnce, ""};
  if (text.starts_with("SINGLE(") && text.ends_with(")") && text.size() > 8) {
    return {Kind::kSingle, std::string(text.substr(7, text.size() - 8))};
  }
  if (text.starts_with("SINGLE:") && text.size() > 7) return {Kind::kSingle, std::string(text.substr(7))};
  throw ConfigError("method: unknown value '" + std::string(text) +
                    "' (expected SLS, FIFO, RANDOM, STATIC_ONCE or SINGLE(<llm>))");
}

namespace {

json path_json(const std::filesystem::path& p) { return p.empty() ? json("") : json(p.string()); }

// Reads known fields from one JSON object, collecting diagnostics.
class Reader {
 public:
  Reader(const json& j, std::string prefix, std::vector<std::string>& errors)
      : j_(j), prefix_(std::move(prefix)), errors_(errors) {
    if (!j_.is_object()) {
      errors_.push_back(where("") + "must be an object");
      ok_ = false;
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.push_back(key);
    if (!ok_ || !j_.contains(key)) return;
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      const json& v = j_.at(key);
      bool fits = std::is_unsigned_v<T> ? v.is_number_unsigned() : v.is_number_integer();
      if (!fits) {
        errors_.push_back(where(key) + "has the wrong type");
        return;
      }
    }
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where(key) + "has the wrong type");
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.push_back(key);
    if (!ok_ || !j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      out.reset();
      return;
    }
    double v = 0.0;
    get_value(key, v);
    out = v;
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    if (!ok_ || !j_.contains(key)) return nullptr;
    return &j_.at(key);
  }

  std::string path(const char* key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

  void finish() {
    if (!ok_) return;
    for (const auto& [key, _] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        errors_.push_back("unknown field '" + path(key.c_str()) + "'");
      }
    }
  }

 private:
  template <typename T>
  void get_value(const char* key, T& out) {
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(where(key) + "has the wrong type");
    }
  }
  std::string where(const char* key) const {
    std::string p = *key ? path(key) : (prefix_.empty() ? "config" : prefix_);
    return p + " ";
  }

  const json& j_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::vector<std::string> seen_;
  bool ok_ = true;
};

template <typename Fn>
void collect(std::vector<std::string>& errors, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.diagnostics().begin(), e.diagnostics().end());
  } catch (const InvalidInput& e) {
    errors.emplace_back(e.what());
  }
}

std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base_dir) {
  if (text.empty()) return {};
  std::filesystem::path p(text);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.lexically_normal();
}

}  // namespace

void SimConfig::validate() const {
  std::vector<std::string> errors;
  if (scenario.empty()) errors.push_back("scenario must name a scenario file");
  if (workload.empty()) errors.push_back("workload must name a workload file");
  if (!(arrivals.init_fraction > 0.0 && arrivals.init_fraction < 1.0)) {
    errors.push_back("init_fraction must lie in (0, 1)");
  }
  if (!(arrivals.lambda_min_fraction > 0.0 && arrivals.lambda_min_fraction <= arrivals.lambda_max_fraction)) {
    errors.push_back("lambda_range must satisfy 0 < min <= max");
  }
  if (repetitions < 1) errors.push_back("repetitions must be >= 1");
  if (method.kind == Method::Kind::kSingle && method.llm.empty()) errors.push_back("method SINGLE needs an LLM id");
  if (rule.kind == SchedulingRule::Kind::kCustom) {
    errors.push_back("rule.kind CUSTOM is only available through the library API");
  }
  collect(errors, [&] { embedder.validate(); });
  collect(errors, [&] { cache.validate(); });
  SchedulingRule r = rule;
  if (r.kind == SchedulingRule::Kind::kCustom) r.kind = SchedulingRule::Kind::kRatio;
  collect(errors, [&] { r.validate(); });
  collect(errors, [&] { update.validate(); });
  collect(errors, [&] { model.validate(); });
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

json SimConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["scenario"] = path_json(scenario);
  j["workload"] = path_json(workload);
  j["init_fraction"] = arrivals.init_fraction;
  j["lambda_range"] = {arrivals.lambda_min_fraction, arrivals.lambda_max_fraction};
  j["repetitions"] = repetitions;
  j["method"] = method.name();
  j["ablations"] = {{"no_cache", ablations.no_cache},
                    {"no_scheduler", ablations.no_scheduler},
                    {"no_updater", ablations.no_updater}};
  j["seed_cache_from_init"] = seed_cache_from_init;
  j["embedder"] = {{"kind", embedder.kind == EmbedderConfig::Kind::kHashedToken ? "hashed_token" : "external_plugin"},
                   {"dimension", embedder.dimension},
                   {"hash_seed", embedder.hash_seed},
                   {"plugin_command", embedder.plugin_command}};
  j["cache"] = {{"capacity", cache.capacity},
                {"tau", cache.tau},
                {"tau_min", cache.threshold.tau_min},
                {"tau_max", cache.threshold.tau_max},
                {"tau_step", cache.threshold.tau_step},
                {"low_success_bound", cache.threshold.low_success_bound},
                {"high_success_bound", cache.threshold.high_success_bound},
                {"adaptive_threshold", cache.adaptive_threshold},
                {"cluster_trigger", cache.cluster_trigger},
                {"recluster_interval", cache.recluster_interval},
                {"fixed_k", cache.fixed_k},
                {"probe_clusters", cache.probe_clusters},
                {"kmeans_seed", cache.kmeans_seed},
                {"kmeans_max_iterations", cache.kmeans_max_iterations},
                {"lookup_latency_ms", cache.lookup_latency_ms}};
  j["rule"] = {{"kind", rule_kind_name(rule.kind)},
               {"ratio_weight", rule.ratio_weight},
               {"feasibility_cutoff", rule.feasibility_cutoff}};
  j["update"] = {{"q_interval", update.q_interval},
                 {"inspection_rate", update.inspection_rate},
                 {"classifier_acc_floor", update.classifier_acc_floor},
                 {"regressor_mae_ceiling",
                  update.regressor_mae_ceiling ? json(*update.regressor_mae_ceiling) : json(nullptr)},
                 {"mae_ceiling_fraction", update.mae_ceiling_fraction},
                 {"max_retrain_rows", update.max_retrain_rows},
                 {"max_cache_checks", update.max_cache_checks}};
  j["model"] = {{"family", model.family == ModelConfig::Family::kGbdt ? "gbdt" : "linear"},
                {"n_trees", model.gbdt.n_trees},
                {"max_depth", model.gbdt.max_depth},
                {"learning_rate", model.gbdt.learning_rate},
                {"lambda", model.gbdt.lambda},
                {"min_child_weight", model.gbdt.min_child_weight},
                {"linear_epochs", model.linear.epochs},
                {"linear_learning_rate", model.linear.learning_rate},
                {"linear_l2", model.linear.l2},
                {"seed", model.seed},
                {"holdout_fraction", model.holdout_fraction}};
  return j;
}

SimConfig SimConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  SimConfig c;
  std::vector<std::string> errors;
  Reader top(j, "", errors);

  top.get("seed", c.seed);
  std::string scenario_path = c.scenario.string(), workload_path = c.workload.string();
  top.get("scenario", scenario_path);
  top.get("workload", workload_path);
  c.scenario = resolve(scenario_path, base_dir);
  c.workload = resolve(workload_path, base_dir);
  top.get("init_fraction", c.arrivals.init_fraction);
  std::vector<double> lambda{c.arrivals.lambda_min_fraction, c.arrivals.lambda_max_fraction};
  top.get("lambda_range", lambda);
  if (lambda.size() == 2) {
    c.arrivals.lambda_min_fraction = lambda[0];
    c.arrivals.lambda_max_fraction = lambda[1];
  } else {
    errors.push_back("lambda_range must hold exactly two numbers");
  }
  top.get("repetitions", c.repetitions);
  std::string method = c.method.name();
  top.get("method", method);
  collect(errors, [&] { c.method = Method::parse(method); });
  top.get("seed_cache_from_init", c.seed_cache_from_init);

  if (const json* a = top.child("ablations")) {
    Reader r(*a, "ablations", errors);
    r.get("no_cache", c.ablations.no_cache);
    r.get("no_scheduler", c.ablations.no_scheduler);
    r.get("no_updater", c.ablations.no_updater);
    r.finish();
  }
  if (const json* e = top.child("embedder")) {
    Reader r(*e, "embedder", errors);
    std::string kind = "hashed_token";
    r.get("kind", kind);
    if (kind == "hashed_token") {
      c.embedder.kind = EmbedderConfig::Kind::kHashedToken;
    } else if (kind == "external_plugin") {
      c.embedder.kind = EmbedderConfig::Kind::kExternalPlugin;
    } else {
      errors.push_back("embedder.kind must be hashed_token or external_plugin");
    }
    r.get("dimension", c.embedder.dimension);
    r.get("hash_seed", c.embedder.hash_seed);
    r.get("plugin_command", c.embedder.plugin_command);
    r.finish();
  }
  if (const json* e = top.child("cache")) {
    Reader r(*e, "cache", errors);
    r.get("capacity", c.cache.capacity);
    r.get("tau", c.cache.tau);
    r.get("tau_min", c.cache.threshold.tau_min);
    r.get("tau_max", c.cache.threshold.tau_max);
    r.get("tau_step", c.cache.threshold.tau_step);
    r.get("low_success_bound", c.cache.threshold.low_success_bound);
    r.get("high_success_bound", c.cache.threshold.high_success_bound);
    r.get("adaptive_threshold", c.cache.adaptive_threshold);
    r.get("cluster_trigger", c.cache.cluster_trigger);
    r.get("recluster_interval", c.cache.recluster_interval);
    r.get("fixed_k", c.cache.fixed_k);
    r.get("probe_clusters", c.cache.probe_clusters);
    r.get("kmeans_seed", c.cache.kmeans_seed);
    r.get("kmeans_max_iterations", c.cache.kmeans_max_iterations);
    r.get("lookup_latency_ms", c.cache.lookup_latency_ms);
    r.finish();
  }
  if (const json* e = top.child("rule")) {
    Reader r(*e, "rule", errors);
    std::string kind = rule_kind_name(c.rule.kind);
    r.get("kind", kind);
    collect(errors, [&] { c.rule.kind = parse_rule_kind(kind); });
    r.get("ratio_weight", c.rule.ratio_weight);
    r.get("feasibility_cutoff", c.rule.feasibility_cutoff);
    r.finish();
  }
  if (const json* e = top.child("update")) {
    Reader r(*e, "update", errors);
    r.get("q_interval", c.update.q_interval);
    r.get("inspection_rate", c.update.inspection_rate);
    r.get("classifier_acc_floor", c.update.classifier_acc_floor);
    r.get_optional("regressor_mae_ceiling", c.update.regressor_mae_ceiling);
    r.get("mae_ceiling_fraction", c.update.mae_ceiling_fraction);
    r.get("max_retrain_rows", c.update.max_retrain_rows);
    r.get("max_cache_checks", c.update.max_cache_checks);
    r.finish();
  }
  if (const json* e = top.child("model")) {
    Reader r(*e, "model", errors);
    std::string family = "gbdt";
    r.get("family", family);
    if (family == "gbdt") {
      c.model.family = ModelConfig::Family::kGbdt;
    } else if (family == "linear") {
      c.model.family = ModelConfig::Family::kLinear;
    } else {
      errors.push_back("model.family must be gbdt or linear");
    }
    r.get("n_trees", c.model.gbdt.n_trees);
    r.get("max_depth", c.model.gbdt.max_depth);
    r.get("learning_rate", c.model.gbdt.learning_rate);
    r.get("lambda", c.model.gbdt.lambda);
    r.get("min_child_weight", c.model.gbdt.min_child_weight);
    r.get("linear_epochs", c.model.linear.epochs);
    r.get("linear_learning_rate", c.model.linear.learning_rate);
    r.get("linear_l2", c.model.linear.l2);
    r.get("seed", c.model.seed);
    r.get("holdout_fraction", c.model.holdout_fraction);
    r.finish();
  }
  top.finish();

  if (errors.empty()) collect(errors, [&] { c.validate(); });
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

SimConfig SimConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (j.is_object() && j.contains("resolved_config")) j = j.at("resolved_config");
  auto base = std::filesystem::absolute(path).parent_path();
  return from_json(j, base);
}

std::string canonical_key(std::string_view key) {
  if (key == "tau") return "cache.tau";
  if (key == "Q") return "update.q_interval";
  if (key == "w") return "rule.ratio_weight";
  return std::string(key);
}

void apply_override(SimConfig& config, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like KEY=VALUE");
  }
  std::string key = canonical_key(assignment.substr(0, eq));
  std::string text(assignment.substr(eq + 1));

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json j = config.to_json();
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    auto dot = key.find('.', start);
    std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw ConfigError("override: unknown field '" + key + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw ConfigError("override: '" + key + "' is a section, not a field");
  *node = std::move(value);
  config = SimConfig::from_json(j);
}

}  // namespace llmsched

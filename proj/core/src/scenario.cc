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

#include "llmsched/scenario.h"

#include <cmath>
#include <fstream>
#include <set>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

using nlohmann::json;

void Scenario::validate() const {
  std::vector<std::string> errors;
  if (llms.empty()) errors.push_back("scenario.providers must not be empty");
  if (categories.empty()) errors.push_back("scenario.categories must not be empty");
  std::set<std::string> ids;
  for (const auto& llm : llms) {
    if (!ids.insert(llm.id).second) errors.push_back("scenario.providers: duplicate id '" + llm.id + "'");
    try {
      llm.validate();
    } catch (const InvalidInput& e) {
      errors.push_back(std::string("scenario.providers.") + llm.id + ": " + e.what());
    }
    for (const auto& [cat, _] : categories) {
      if (!llm.success_table.count(cat)) {
        errors.push_back("scenario.providers." + llm.id + ".success is missing category '" + cat + "'");
      }
    }
    for (const auto& [cat, _] : llm.success_table) {
      if (!categories.count(cat)) {
        errors.push_back("scenario.providers." + llm.id + ".success names unknown category '" + cat + "'");
      }
    }
  }
  for (const auto& [cat, model] : categories) {
    if (!(model.mean >= 1.0) || !std::isfinite(model.mean)) {
      errors.push_back("scenario.categories." + cat + ".mean must be >= 1");
    }
    if (!(model.sigma >= 0.0) || !std::isfinite(model.sigma)) {
      errors.push_back("scenario.categories." + cat + ".sigma must be >= 0");
    }
  }
  if (recipe) {
    if (recipe->size < 10) errors.push_back("scenario.workload.size must be >= 10");
    if (!(recipe->duplicate_fraction >= 0.0 && recipe->duplicate_fraction < 1.0)) {
      errors.push_back("scenario.workload.duplicate_fraction must lie in [0, 1)");
    }
    if (recipe->duplicate_fraction > 0.0 && recipe->hot_set == 0) {
      errors.push_back("scenario.workload.hot_set must be >= 1 when duplicates are requested");
    }
    if (recipe->words_per_query < 1) errors.push_back("scenario.workload.words_per_query must be >= 1");
    if (recipe->vocabulary < 2) errors.push_back("scenario.workload.vocabulary must be >= 2");
    for (const auto& [cat, w] : recipe->category_weights) {
      if (!categories.count(cat)) errors.push_back("scenario.workload.category_weights: unknown category '" + cat + "'");
      if (!(w >= 0.0)) errors.push_back("scenario.workload.category_weights." + cat + " must be >= 0");
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
}

std::optional<std::size_t> Scenario::index_of(const std::string& llm_id) const {
  for (std::size_t i = 0; i < llms.size(); ++i) {
    if (llms[i].id == llm_id) return i;
  }
  return std::nullopt;
}

void Scenario::check_workload(std::span<const Query> queries) const {
  for (const auto& q : queries) {
    if (!categories.count(q.truth_category())) {
      throw ConfigError("workload query '" + q.id() + "' has truth_category '" + q.truth_category() +
                        "' which the scenario does not define");
    }
  }
}

json Scenario::to_json() const {
  json providers = json::array();
  for (const auto& llm : llms) {
    providers.push_back({{"id", llm.id},
                         {"price_input_usd", llm.price_input.dollars()},
                         {"price_output_usd", llm.price_output.dollars()},
                         {"latency", {{"base_ms", llm.latency.base_ms},
                                      {"per_output_token_ms", llm.latency.per_output_token_ms}}},
                         {"success", llm.success_table}});
  }
  json cats = json::object();
  for (const auto& [name, m] : categories) cats[name] = {{"mean", m.mean}, {"sigma", m.sigma}};
  json j = {{"format", "llmsched.scenario"},
            {"version", 1},
            {"name", name},
            {"providers", providers},
            {"categories", cats}};
  if (recipe) {
    j["workload"] = {{"size", recipe->size},
                     {"duplicate_fraction", recipe->duplicate_fraction},
                     {"hot_set", recipe->hot_set},
                     {"words_per_query", recipe->words_per_query},
                     {"vocabulary", recipe->vocabulary},
                     {"seed", recipe->seed},
                     {"category_weights", recipe->category_weights},
                     {"category_prefix", recipe->category_prefix}};
  }
  return j;
}

Scenario Scenario::from_json(const json& j) {
  if (j.value("format", "") != "llmsched.scenario" || j.value("version", 0) != 1) {
    throw FormatError("scenario: expected format llmsched.scenario version 1");
  }
  Scenario s;
  try {
    s.name = j.value("name", "");
    for (const auto& p : j.at("providers")) {
      LLMProfile llm;
      llm.id = p.at("id").get<std::string>();
      llm.price_input = Money::from_dollars(p.at("price_input_usd").get<double>());
      llm.price_output = Money::from_dollars(p.at("price_output_usd").get<double>());
      llm.latency.base_ms = p.at("latency").at("base_ms").get<double>();
      llm.latency.per_output_token_ms = p.at("latency").at("per_output_token_ms").get<double>();
      llm.success_table = p.at("success").get<std::map<std::string, double>>();
      s.llms.push_back(std::move(llm));
    }
    for (const auto& [name, m] : j.at("categories").items()) {
      s.categories[name] = OutputTokenModel{m.at("mean").get<double>(), m.at("sigma").get<double>()};
    }
    if (j.contains("workload")) {
      const auto& w = j.at("workload");
      WorkloadRecipe r;
      r.size = w.value("size", r.size);
      r.duplicate_fraction = w.value("duplicate_fraction", r.duplicate_fraction);
      r.hot_set = w.value("hot_set", r.hot_set);
      r.words_per_query = w.value("words_per_query", r.words_per_query);
      r.vocabulary = w.value("vocabulary", r.vocabulary);
      r.seed = w.value("seed", r.seed);
      if (w.contains("category_weights")) r.category_weights = w.at("category_weights").get<std::map<std::string, double>>();
      if (w.contains("category_prefix")) r.category_prefix = w.at("category_prefix").get<std::map<std::string, std::string>>();
      s.recipe = std::move(r);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open scenario " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError("scenario " + path.string() + ": " + e.what());
  }
}

std::string Scenario::hash() const { return to_hex(fnv1a64(to_json().dump())); }

}  // namespace llmsched

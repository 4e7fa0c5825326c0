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

#include "llmsched/simulator.h"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"
#include "llmsched/mock_provider.h"
#include "llmsched/semantic_cache.h"
#include "llmsched/workload_io.h"

namespace llmsched {

using nlohmann::json;

json PeriodMetrics::to_json() const {
  return {{"period", period},
          {"queries", queries},
          {"cache_hits", cache_hits},
          {"cache_correct", cache_correct},
          {"llm_jobs", llm_jobs},
          {"llm_correct", llm_correct},
          {"skipped", skipped},
          {"cost_picos", cost.picos()},
          {"cost_usd", cost.dollars()},
          {"perf", perf},
          {"makespan_ms", makespan_ms},
          {"cache_time_ms", cache_time_ms},
          {"llm_time_ms", llm_time_ms},
          {"cache_hit_rate", cache_hit_rate},
          {"cache_perf", cache_perf},
          {"scheduler_hit_rate", scheduler_hit_rate},
          {"scheduler_perf", scheduler_perf},
          {"plan", {{"predicted_total_cost_usd", plan.predicted_total_cost},
                    {"predicted_mean_perf", plan.predicted_mean_perf},
                    {"scheduled", plan.scheduled},
                    {"skipped", plan.skipped}}},
          {"tau", tau},
          {"bundle_digest", bundle_digest}};
}

std::string scenario_fingerprint(const Scenario& scenario, std::span<const Query> dataset) {
  uint64_t h = fnv1a64(scenario.to_json().dump());
  for (const auto& q : dataset) h = fnv1a64(workload_line(q), h);
  return to_hex(h);
}

namespace {

std::string cache_key(const Query& q) { return "q-" + to_hex(fnv1a64(q.payload())); }

class Run {
 public:
  Run(const SimConfig& config, const Scenario& scenario, uint64_t seed, const Embedder* embedder)
      : config_(config), scenario_(scenario), seed_(seed), llms_(scenario.llms) {
    if (embedder == nullptr) {
      owned_embedder_ = make_embedder(config.embedder);
      embedder = owned_embedder_.get();
    }
    embedder_ = embedder;
    for (std::size_t k = 0; k < llms_.size(); ++k) providers_.emplace_back(scenario_, k, seed);
    if (config.method.kind == Method::Kind::kSingle) {
      auto idx = scenario.index_of(config.method.llm);
      if (!idx) throw ConfigError("method SINGLE names unknown LLM '" + config.method.llm + "'");
      single_ = *idx;
    }
    sls_ = config.method.kind == Method::Kind::kSls;
    if (sls_ && !config.ablations.no_cache) cache_ = std::make_unique<SemanticCache>(config.cache);
    route_rng_.seed(combine_seed(seed, fnv1a64("route")));
  }

  RunReport execute(const WorkloadPlan& plan, const std::string& fingerprint) {
    RunReport report;
    report.seed = seed_;
    report.method = config_.method.name();
    report.config = config_.to_json();
    report.config["seed"] = seed_;
    report.config["repetitions"] = 1;
    report.scenario_hash = fingerprint;
    report.lambda = plan.lambda;

    for (const auto& q : plan.init) expected_[q.id()] = expected_response(q);
    for (const auto& b : plan.periods) {
      for (const auto& q : b.queries) expected_[q.id()] = expected_response(q);
    }

    if (config_.method.uses_init()) initialize(plan.init, report);

    for (const auto& batch : plan.periods) {
      batch.validate();
      report.periods.push_back(run_period(batch, report));
    }

    Money cost = report.init_cost;
    double makespan = report.init_time_ms;
    for (const auto& p : report.periods) {
      cost += p.cost;
      makespan += p.makespan_ms;
      report.total_jobs += p.queries;
      report.total_correct += p.cache_correct + p.llm_correct;
    }
    report.total_cost = cost;
    report.total_makespan_ms = makespan;
    report.total_perf = report.total_jobs > 0 ? static_cast<double>(report.total_correct) /
                                                    static_cast<double>(report.total_jobs)
                                              : 0.0;
    return report;
  }

 private:
  const Embedding& embed(const Query& q) {
    auto it = embeddings_.find(q.payload());
    if (it != embeddings_.end()) return it->second;
    return embeddings_.emplace(q.payload(), embedder_->embed(q.payload())).first->second;
  }

  bool correct(const CompletedJob& job) const { return job.response == expected_.at(job.query_id); }

  void initialize(const std::vector<Query>& init, RunReport& report) {
    report.init_queries = init.size();
    std::vector<double> serial(llms_.size(), 0.0);
    std::vector<TrainingRow> rows;
    rows.reserve(init.size() * llms_.size());
    for (const auto& q : init) {
      const Embedding& e = embed(q);
      bool any_correct = false;
      for (std::size_t k = 0; k < llms_.size(); ++k) {
        CompletedJob job = providers_[k].execute(q, 0);
        bool ok = correct(job);
        any_correct = any_correct || ok;
        report.init_cost += job.actual_cost;
        serial[k] += job.actual_latency.count();
        rows.push_back(make_training_row(e, k, llms_.size(), ok, job.actual_cost));
      }
      if (cache_ && config_.seed_cache_from_init && any_correct) {
        cache_->insert(cache_key(q), e, expected_.at(q.id()));
      }
    }
    report.init_time_ms = *std::max_element(serial.begin(), serial.end());
    ModelConfig mc = config_.model;
    update_.bundle = train(rows, mc, embedder_->dimension(), llms_.size());
    update_.init_rows = std::move(rows);
    update_.buffer = RowBuffer(config_.update.max_retrain_rows);
    if (cache_) cache_->reset_stats();
  }

  std::size_t random_llm() {
    return std::uniform_int_distribution<std::size_t>(0, llms_.size() - 1)(route_rng_);
  }

  PeriodMetrics run_period(const HorizonBatch& batch, RunReport& report) {
    PeriodMetrics m;
    m.period = batch.period;
    m.queries = batch.queries.size();
    m.llm_time_ms.assign(llms_.size(), 0.0);

    std::vector<Target> targets(batch.queries.size(), Target::skipped());
    std::vector<std::string> hit_responses(batch.queries.size());
    std::vector<std::size_t> misses;

    if (cache_) {
      for (std::size_t i = 0; i < batch.queries.size(); ++i) {
        m.cache_time_ms += config_.cache.lookup_latency_ms;
        auto hit = cache_->lookup(embed(batch.queries[i]));
        if (hit) {
          targets[i] = Target::cache();
          hit_responses[i] = hit->response;
        } else {
          misses.push_back(i);
        }
      }
    } else {
      for (std::size_t i = 0; i < batch.queries.size(); ++i) misses.push_back(i);
    }

    route(batch, misses, targets, m);

    std::vector<bool> served(llms_.size(), false);
    for (std::size_t i = 0; i < batch.queries.size(); ++i) {
      const Query& q = batch.queries[i];
      JobRecord rec;
      if (targets[i].kind == Target::Kind::kCache) {
        rec.job.query_id = q.id();
        rec.job.target = targets[i];
        rec.job.response = hit_responses[i];
        rec.job.actual_latency = SimDuration(config_.cache.lookup_latency_ms);
        rec.job.period = batch.period;
        rec.correct = correct(rec.job);
        ++m.cache_hits;
        m.cache_correct += rec.correct ? 1 : 0;
        window_cache_.push_back(report.jobs.size());
      } else if (targets[i].is_llm()) {
        std::size_t k = targets[i].llm;
        rec.job = providers_[k].execute(q, batch.period);
        rec.correct = correct(rec.job);
        ++m.llm_jobs;
        m.llm_correct += rec.correct ? 1 : 0;
        m.cost += rec.job.actual_cost;
        m.llm_time_ms[k] += rec.job.actual_latency.count();
        served[k] = true;
        if (sls_) window_llm_.push_back({rec.job, embed(q), cache_key(q), q.input_tokens()});
        if (sls_) window_llm_index_.push_back(report.jobs.size());
      } else {
        rec.job.query_id = q.id();
        rec.job.target = targets[i];
        rec.job.period = batch.period;
        ++m.skipped;
      }
      ++window_jobs_;
      report.jobs.push_back(std::move(rec));
    }

    double busiest = -1.0;
    for (std::size_t k = 0; k < llms_.size(); ++k) {
      if (served[k]) busiest = std::max(busiest, m.llm_time_ms[k]);
    }
    m.makespan_ms = busiest >= 0.0 ? busiest + m.cache_time_ms : m.cache_time_ms;

    const double n = static_cast<double>(m.queries);
    if (m.queries > 0) {
      m.perf = static_cast<double>(m.cache_correct + m.llm_correct) / n;
      m.scheduler_hit_rate = static_cast<double>(m.llm_jobs) / n;
      if (cache_) m.cache_hit_rate = static_cast<double>(m.cache_hits) / n;
    }
    if (m.cache_hits > 0) m.cache_perf = static_cast<double>(m.cache_correct) / static_cast<double>(m.cache_hits);
    if (m.llm_jobs > 0) m.scheduler_perf = static_cast<double>(m.llm_correct) / static_cast<double>(m.llm_jobs);

    report.events.push_back(maybe_update(batch.period, report));
    m.tau = cache_ ? cache_->tau() : 0.0;
    m.bundle_digest = update_.bundle.trained() ? update_.bundle.digest() : "untrained";
    return m;
  }

  void route(const HorizonBatch& batch, const std::vector<std::size_t>& misses, std::vector<Target>& targets,
             PeriodMetrics& m) {
    switch (config_.method.kind) {
      case Method::Kind::kFifo:
        for (std::size_t i : misses) targets[i] = Target::to_llm(fifo_next_++ % llms_.size());
        return;
      case Method::Kind::kRandom:
        for (std::size_t i : misses) targets[i] = Target::to_llm(random_llm());
        return;
      case Method::Kind::kSingle:
        for (std::size_t i : misses) targets[i] = Target::to_llm(single_);
        return;
      case Method::Kind::kSls:
        if (config_.ablations.no_scheduler) {
          for (std::size_t i : misses) targets[i] = Target::to_llm(random_llm());
          return;
        }
        break;
      case Method::Kind::kStaticOnce:
        break;
    }
    SchedulingRule rule = config_.rule;
    if (config_.method.kind == Method::Kind::kStaticOnce) rule.kind = SchedulingRule::Kind::kRatio;
    std::vector<Query> queries;
    std::vector<Embedding> embeddings;
    queries.reserve(misses.size());
    embeddings.reserve(misses.size());
    for (std::size_t i : misses) {
      queries.push_back(batch.queries[i]);
      embeddings.push_back(embed(batch.queries[i]));
    }
    HorizonPlan plan = allocate(queries, embeddings, update_.bundle, llms_, rule);
    for (std::size_t j = 0; j < misses.size(); ++j) targets[misses[j]] = plan.assignments[j].target;
    m.plan = plan.objective;
  }

  UpdateOutcome maybe_update(int period, RunReport& report) {
    bool enabled = sls_ && !config_.ablations.no_updater;
    if (!enabled || !should_update(period, config_.update)) {
      UpdateOutcome idle;
      idle.period = period;
      idle.tau_before = idle.tau_after = cache_ ? cache_->tau() : 0.0;
      return idle;
    }

    std::size_t labels = 0;
    LabelOracle oracle = [&](const CompletedJob& job) {
      ++labels;
      return correct(job);
    };
    uint64_t period_seed = combine_seed(seed_, static_cast<uint64_t>(period));
    InspectionBatch batch =
        sample_for_inspection(window_llm_, llms_.size(), config_.update, combine_seed(period_seed, 1), oracle);
    for (const auto& s : batch.sampled) {
      for (std::size_t w = 0; w < window_llm_.size(); ++w) {
        if (window_llm_[w].job.query_id == s.job.query_id) report.jobs[window_llm_index_[w]].inspected = true;
      }
    }

    CacheStats window_stats = cache_ ? cache_->stats() : CacheStats{};
    std::size_t budget = label_budget(window_jobs_, llms_.size(), config_.update);
    std::size_t remaining = budget > labels ? budget - labels : 0;
    std::vector<CompletedJob> hits;
    hits.reserve(window_cache_.size());
    for (std::size_t idx : window_cache_) hits.push_back(report.jobs[idx].job);
    auto check = inspect_cache_hits(hits, std::min(remaining, config_.update.max_cache_checks),
                                    combine_seed(period_seed, 2), oracle);
    window_stats.inspected_hits = static_cast<int64_t>(check.inspected);
    window_stats.inspected_correct = static_cast<int64_t>(check.correct);

    UpdateOutcome out =
        apply_update(batch, window_stats, cache_.get(), update_, llms_, config_.update, config_.model);
    out.period = period;
    out.labels_consumed = labels;
    if (cache_) cache_->reset_stats();
    window_llm_.clear();
    window_llm_index_.clear();
    window_cache_.clear();
    window_jobs_ = 0;
    return out;
  }

  const SimConfig& config_;
  const Scenario& scenario_;
  uint64_t seed_;
  const std::vector<LLMProfile>& llms_;
  std::unique_ptr<Embedder> owned_embedder_;
  const Embedder* embedder_ = nullptr;
  std::vector<MockProvider> providers_;
  std::unique_ptr<SemanticCache> cache_;
  bool sls_ = false;
  std::size_t single_ = 0;
  std::size_t fifo_next_ = 0;
  std::mt19937_64 route_rng_;
  UpdateState update_;
  std::unordered_map<std::string, Embedding> embeddings_;
  std::unordered_map<std::string, std::string> expected_;
  std::vector<InspectionCandidate> window_llm_;
  std::vector<std::size_t> window_llm_index_;
  std::vector<std::size_t> window_cache_;
  std::size_t window_jobs_ = 0;
};

}  // namespace

RunReport run_plan(const SimConfig& config, const Scenario& scenario, const WorkloadPlan& plan, uint64_t seed,
                   const std::string& fingerprint, const Embedder* embedder) {
  config.validate();
  scenario.validate();
  for (const auto& b : plan.periods) scenario.check_workload(b.queries);
  scenario.check_workload(plan.init);
  Run run(config, scenario, seed, embedder);
  return run.execute(plan, fingerprint);
}

RunReport run_once(const SimConfig& config, const Scenario& scenario, std::span<const Query> dataset, uint64_t seed,
                   const Embedder* embedder) {
  scenario.check_workload(dataset);
  WorkloadPlan plan = generate_workload(dataset, config.arrivals, combine_seed(seed, fnv1a64("arrivals")));
  return run_plan(config, scenario, plan, seed, scenario_fingerprint(scenario, dataset), embedder);
}

std::vector<RunReport> run_repetitions(const SimConfig& config, const Scenario& scenario,
                                       std::span<const Query> dataset, const Embedder* embedder) {
  std::vector<RunReport> out;
  out.reserve(static_cast<std::size_t>(config.repetitions));
  for (int i = 0; i < config.repetitions; ++i) {
    out.push_back(run_once(config, scenario, dataset, config.seed + static_cast<uint64_t>(i), embedder));
  }
  return out;
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  s.min = s.max = values[0];
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

json AggregateReport::to_json() const {
  auto ms = [](const MetricSummary& s) { return json{{"mean", s.mean}, {"max", s.max}, {"min", s.min}}; };
  return {{"method", method},
          {"repetitions", repetitions},
          {"perf", ms(perf)},
          {"cost_usd", ms(cost_usd)},
          {"makespan_ms", ms(makespan_ms)},
          {"cache_hit_rate", cache_hit_rate},
          {"cache_perf", cache_perf},
          {"scheduler_hit_rate", scheduler_hit_rate},
          {"scheduler_perf", scheduler_perf}};
}

AggregateReport aggregate(std::span<const RunReport> runs) {
  AggregateReport a;
  if (runs.empty()) return a;
  a.method = runs[0].method;
  a.repetitions = runs.size();
  std::vector<double> perf, cost, makespan;
  for (const auto& r : runs) {
    perf.push_back(r.total_perf);
    cost.push_back(r.total_cost.dollars());
    makespan.push_back(r.total_makespan_ms);
    double chr = 0, cp = 0, shr = 0, sp = 0;
    for (const auto& p : r.periods) {
      chr += p.cache_hit_rate;
      cp += p.cache_perf;
      shr += p.scheduler_hit_rate;
      sp += p.scheduler_perf;
    }
    double n = r.periods.empty() ? 1.0 : static_cast<double>(r.periods.size());
    a.cache_hit_rate += chr / n;
    a.cache_perf += cp / n;
    a.scheduler_hit_rate += shr / n;
    a.scheduler_perf += sp / n;
  }
  double n = static_cast<double>(runs.size());
  a.cache_hit_rate /= n;
  a.cache_perf /= n;
  a.scheduler_hit_rate /= n;
  a.scheduler_perf /= n;
  a.perf = summarize(perf);
  a.cost_usd = summarize(cost);
  a.makespan_ms = summarize(makespan);
  return a;
}

}  // namespace llmsched

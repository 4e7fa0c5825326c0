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

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.h"
#include "llmsched/domain.h"
#include "llmsched/errors.h"
#include "llmsched/workload_io.h"

namespace llmsched {
namespace {

TEST(Query, RejectsNegativeTokensAndPeriods) {
  EXPECT_THROW(Query("a", "x", -1, "c"), InvalidInput);
  EXPECT_THROW(Query("a", "x", 1, "c", -2), InvalidInput);
}

TEST(Query, WithPeriodOnlyChangesPeriod) {
  Query q("a", "payload", 12, "c");
  Query p = q.with_period(4);
  EXPECT_EQ(p.arrival_period(), 4);
  EXPECT_EQ(p.id(), q.id());
  EXPECT_EQ(p.payload(), q.payload());
  EXPECT_EQ(p.input_tokens(), q.input_tokens());
}

TEST(InvocationCost, InputPlusOutputPricing) {
  LLMProfile llm{"x", Money::from_dollars(2e-6), Money::from_dollars(5e-6), {10.0, 1.0}, {}};
  // 100 * 2e-6 + 40 * 5e-6 = 4e-4
  EXPECT_EQ(invocation_cost(100, llm, 40), Money::from_dollars(4e-4));
  EXPECT_THROW(invocation_cost(-1, llm, 1), InvalidInput);
}

TEST(LatencyModel, AffineInOutputTokens) {
  LatencyModel m{250.0, 12.5};
  EXPECT_DOUBLE_EQ(m(0).count(), 250.0);
  EXPECT_DOUBLE_EQ(m(8).count(), 350.0);
}

TEST(LLMProfile, ValidateRejectsBadFields) {
  LLMProfile ok{"x", Money::from_picos(1), Money::from_picos(1), {1.0, 1.0}, {{"c", 0.5}}};
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.success_table["c"] = 1.5;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = ok;
  bad.price_input = Money::from_picos(-1);
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = ok;
  bad.id.clear();
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(Target, Labels) {
  std::vector<LLMProfile> llms{{"alpha", {}, {}, {1.0, 0.0}, {}}};
  EXPECT_EQ(target_label(Target::to_llm(0), llms), "alpha");
  EXPECT_EQ(target_label(Target::cache(), llms), "cache");
  EXPECT_EQ(target_label(Target::skipped(), llms), "skipped");
}

TEST(HorizonBatch, RejectsForeignPeriods) {
  HorizonBatch b{2, {Query("a", "x", 1, "c", 2), Query("b", "y", 1, "c", 3)}};
  EXPECT_THROW(b.validate(), InvalidInput);
  b.queries.pop_back();
  EXPECT_NO_THROW(b.validate());
}

TEST(WorkloadIo, RoundTripsQueries) {
  std::vector<Query> qs{Query("q1", "hello \"world\"\n", 5, "general"), Query("q2", "Ünïcode", 9, "code")};
  std::stringstream buf;
  write_workload(buf, qs);
  auto back = read_workload(buf);
  EXPECT_EQ(back, qs);
}

TEST(WorkloadIo, RejectsMalformedLines) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_workload(in);
  };
  EXPECT_THROW(parse("not json\n"), FormatError);
  EXPECT_THROW(parse(R"({"id":"a","payload":"x","truth_category":"c"})"), FormatError);
  EXPECT_THROW(parse(R"({"id":"a","payload":"x","input_tokens":0,"truth_category":"c"})"), FormatError);
  EXPECT_THROW(parse(R"({"id":"a","payload":"","input_tokens":1,"truth_category":"c"})"), FormatError);
  EXPECT_THROW(parse("{\"id\":\"a\",\"payload\":\"x\",\"input_tokens\":1,\"truth_category\":\"c\"}\n"
                     "{\"id\":\"a\",\"payload\":\"y\",\"input_tokens\":1,\"truth_category\":\"c\"}\n"),
               FormatError);
  EXPECT_TRUE(parse("\n\n").empty());
}

TEST(WorkloadIo, ShippedWorkloadLoads) {
  auto shipped = testing::load_shipped();
  EXPECT_EQ(shipped.dataset.size(), 3000u);
  EXPECT_NO_THROW(shipped.scenario.check_workload(shipped.dataset));
}

}  // namespace
}  // namespace llmsched

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

#include "llmsched/workload_io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"
#include "llmsched/errors.h"

namespace llmsched {

using nlohmann::json;

std::vector<Query> read_workload(std::istream& in) {
  std::vector<Query> queries;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw FormatError("workload line " + std::to_string(line_no) + ": " + why);
    };
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    if (!record.is_object()) fail("expected an object");
    for (const char* field : {"id", "payload", "input_tokens", "truth_category"}) {
      if (!record.contains(field)) fail(std::string("missing field '") + field + "'");
    }
    if (!record["id"].is_string() || !record["payload"].is_string() ||
        !record["truth_category"].is_string() || !record["input_tokens"].is_number_integer()) {
      fail("field has the wrong type");
    }
    auto tokens = record["input_tokens"].get<int64_t>();
    if (tokens < 1) fail("input_tokens must be >= 1");
    auto id = record["id"].get<std::string>();
    if (!seen.insert(id).second) fail("duplicate id '" + id + "'");
    if (record["payload"].get_ref<const std::string&>().empty()) fail("empty payload");
    queries.emplace_back(std::move(id), record["payload"].get<std::string>(), tokens,
                         record["truth_category"].get<std::string>());
  }
  return queries;
}

std::vector<Query> read_workload(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open workload file " + path.string());
  return read_workload(in);
}

std::string workload_line(const Query& query) {
  json record = {{"id", query.id()},
                 {"payload", query.payload()},
                 {"input_tokens", query.input_tokens()},
                 {"truth_category", query.truth_category()}};
  return record.dump();
}

void write_workload(std::ostream& out, std::span<const Query> queries) {
  for (const auto& q : queries) out << workload_line(q) << '\n';
}

void write_workload(const std::filesystem::path& path, std::span<const Query> queries) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write workload file " + path.string());
  write_workload(out, queries);
}

}  // namespace llmsched

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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "llmsched/domain.h"

namespace llmsched {

// Workload files are JSON Lines, one query per line:
//   {"id":"q1","input_tokens":12,"payload":"...","truth_category":"code"}
// Writing a parsed file reproduces it byte for byte.
inline constexpr int kWorkloadFormatVersion = 1;

std::vector<Query> read_workload(std::istream& in);
std::vector<Query> read_workload(const std::filesystem::path& path);

std::string workload_line(const Query& query);
void write_workload(std::ostream& out, std::span<const Query> queries);
void write_workload(const std::filesystem::path& path, std::span<const Query> queries);

}  // namespace llmsched

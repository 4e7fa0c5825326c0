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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace llmsched::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kConfigInvalid = 3;
inline constexpr int kIncompatible = 4;

struct SimulateArgs {
  std::filesystem::path config;
  std::optional<uint64_t> seed;
  std::optional<int> repetitions;
  std::vector<std::string> overrides;
  std::filesystem::path out;
};

struct SweepArgs {
  std::filesystem::path config;
  std::vector<std::string> grid;  // KEY=V1,V2,...
  std::optional<int> repetitions;
  std::vector<std::string> overrides;
  std::filesystem::path out;
};

struct SynthArgs {
  std::filesystem::path scenario;
  std::filesystem::path out;
};

// Each writes human-readable output to `out` and diagnostics to `err`.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_compare(const std::vector<std::filesystem::path>& reports, std::ostream& out, std::ostream& err);
int cmd_synth_workload(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_print_defaults(std::ostream& out);

// Session directory created by the most recent simulate/sweep call.
const std::filesystem::path& last_session_dir();

}  // namespace llmsched::cli

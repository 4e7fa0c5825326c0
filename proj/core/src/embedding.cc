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

#include "llmsched/embedding.h"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <csignal>
#include <cstring>

#include "llmsched/errors.h"
#include "llmsched/hashing.h"

namespace llmsched {

namespace {

bool is_token_char(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

Embedding normalized_or_basis(std::vector<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (sq == 0.0) {
    std::fill(values.begin(), values.end(), 0.0);
    values[0] = 1.0;
    return Embedding(std::move(values));
  }
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : values) v *= inv;
  return Embedding(std::move(values));
}

}  // namespace

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidInput("embedding: empty vector");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("embedding: non-finite entry");
  }
}

double Embedding::norm() const {
  double sq = 0.0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

void EmbedderConfig::validate() const {
  if (dimension < 2) throw ConfigError("embedder.dimension must be >= 2");
  if (kind == Kind::kExternalPlugin && plugin_command.empty()) {
    throw ConfigError("embedder.plugin_command is required for kind=external-plugin");
  }
}

std::vector<std::string_view> tokenize(std::string_view payload) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < payload.size()) {
    while (i < payload.size() && !is_token_char(static_cast<unsigned char>(payload[i]))) ++i;
    std::size_t start = i;
    while (i < payload.size() && is_token_char(static_cast<unsigned char>(payload[i]))) ++i;
    if (i > start) tokens.push_back(payload.substr(start, i - start));
  }
  return tokens;
}

HashedTokenEmbedder::HashedTokenEmbedder(std::size_t dimension, uint64_t hash_seed)
    : dimension_(dimension), hash_seed_(hash_seed) {
  if (dimension_ < 2) throw InvalidInput("embedder: dimension must be >= 2");
}

std::size_t HashedTokenEmbedder::bucket_of(std::string_view token) const {
  return static_cast<std::size_t>(mix64(fnv1a64(token) ^ hash_seed_) % dimension_);
}

Embedding HashedTokenEmbedder::embed(std::string_view payload) const {
  if (payload.empty()) throw InvalidInput("embed: empty payload");
  std::vector<double> counts(dimension_, 0.0);
  for (auto token : tokenize(payload)) counts[bucket_of(token)] += 1.0;
  return normalized_or_basis(std::move(counts));
}

ProcessEmbedder::ProcessEmbedder(std::size_t dimension, std::string command)
    : dimension_(dimension), command_(std::move(command)) {
  if (dimension_ < 2) throw InvalidInput("embedder: dimension must be >= 2");
  if (command_.empty()) throw InvalidInput("embedder: empty plugin command");
}

std::vector<double> parse_plugin_response(std::string_view response, std::size_t dimension) {
  std::vector<double> values;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == ','; };
  while (i < response.size()) {
    while (i < response.size() && is_space(response[i])) ++i;
    if (i >= response.size()) break;
    std::size_t start = i;
    while (i < response.size() && !is_space(response[i])) ++i;
    double v = 0.0;
    auto field = response.substr(start, i - start);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ProtocolError("embedding plugin: unparsable value '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) throw ProtocolError("embedding plugin: non-finite value");
    values.push_back(v);
  }
  if (values.size() != dimension) {
    throw ProtocolError("embedding plugin: expected " + std::to_string(dimension) + " values, got " +
                        std::to_string(values.size()));
  }
  return values;
}

Embedding ProcessEmbedder::embed(std::string_view payload) const {
  if (payload.empty()) throw InvalidInput("embed: empty payload");
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0) throw ProtocolError("embedding plugin: pipe failed");
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw ProtocolError("embedding plugin: pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) throw ProtocolError("embedding plugin: fork failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);

  // A plugin that exits without reading stdin must not kill us with SIGPIPE.
  struct sigaction ignore {};
  struct sigaction previous {};
  ignore.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &ignore, &previous);
  std::size_t written = 0;
  while (written < payload.size()) {
    ssize_t n = write(to_child[1], payload.data() + written, payload.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  close(to_child[1]);
  sigaction(SIGPIPE, &previous, nullptr);

  std::string output;
  char buf[4096];
  for (;;) {
    ssize_t n = read(from_child[0], buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(from_child[0]);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw ProtocolError("embedding plugin: command exited abnormally");
  }
  return normalized_or_basis(parse_plugin_response(output, dimension_));
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config) {
  config.validate();
  if (config.kind == EmbedderConfig::Kind::kExternalPlugin) {
    return std::make_unique<ProcessEmbedder>(config.dimension, config.plugin_command);
  }
  return std::make_unique<HashedTokenEmbedder>(config.dimension, config.hash_seed);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("cosine: dimension mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw InvalidInput("cosine: zero vector");
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

double cosine(const Embedding& a, const Embedding& b) { return cosine(a.values(), b.values()); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("squared_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace llmsched

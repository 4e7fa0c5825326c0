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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace llmsched {

// Fixed-length real vector with finite entries.
class Embedding {
 public:
  Embedding() = default;
  // Throws InvalidInput on an empty vector or non-finite entries.
  explicit Embedding(std::vector<double> values);

  std::size_t dimension() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double norm() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<double> values_;
};

struct EmbedderConfig {
  enum class Kind { kHashedToken, kExternalPlugin };

  std::size_t dimension = 256;
  Kind kind = Kind::kHashedToken;
  uint64_t hash_seed = 0x5eed0f7a11c0ffeeull;
  // Shell command for kExternalPlugin: reads the payload on stdin and prints
  // exactly `dimension` floats on stdout.
  std::string plugin_command;

  void validate() const;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  // Deterministic and L2-normalized. Throws InvalidInput on an empty payload.
  virtual Embedding embed(std::string_view payload) const = 0;
};

// Hashed bag of tokens. Tokens are maximal runs of ASCII alphanumerics and
// non-ASCII bytes; each token is hashed into one of `dimension` buckets.
class HashedTokenEmbedder final : public Embedder {
 public:
  explicit HashedTokenEmbedder(std::size_t dimension, uint64_t hash_seed = EmbedderConfig{}.hash_seed);

  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view payload) const override;

  std::size_t bucket_of(std::string_view token) const;

 private:
  std::size_t dimension_;
  uint64_t hash_seed_;
};

// Runs an external command per payload. Any response other than exactly
// `dimension` finite floats raises ProtocolError.
class ProcessEmbedder final : public Embedder {
 public:
  ProcessEmbedder(std::size_t dimension, std::string command);

  std::size_t dimension() const override { return dimension_; }
  Embedding embed(std::string_view payload) const override;

 private:
  std::size_t dimension_;
  std::string command_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config);

std::vector<std::string_view> tokenize(std::string_view payload);

// Parses a plugin response; exposed for testing the protocol check.
std::vector<double> parse_plugin_response(std::string_view response, std::size_t dimension);

// (a.b) / (|a||b|). Throws InvalidInput on dimension mismatch or a zero vector.
double cosine(const Embedding& a, const Embedding& b);
double cosine(std::span<const double> a, std::span<const double> b);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace llmsched

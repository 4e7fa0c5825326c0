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

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

namespace llmsched {

// Non-negative currency amount held as an integer count of pico-dollars
// (1e-12 USD). Per-token prices are ~1e-6 USD, so every price down to
// 1e-12 USD/token and every sum of token costs is represented exactly.
class Money {
 public:
  static constexpr int64_t kPicosPerDollar = 1'000'000'000'000;

  constexpr Money() = default;

  static constexpr Money from_picos(int64_t picos) { return Money(picos); }

  // Rounds to the nearest pico-dollar.
  static Money from_dollars(double dollars) {
    return Money(static_cast<int64_t>(std::llround(dollars * static_cast<double>(kPicosPerDollar))));
  }

  constexpr int64_t picos() const { return picos_; }
  constexpr double dollars() const {
    return static_cast<double>(picos_) / static_cast<double>(kPicosPerDollar);
  }

  constexpr Money& operator+=(Money other) {
    picos_ += other.picos_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return Money(a.picos_ + b.picos_); }
  friend constexpr Money operator-(Money a, Money b) { return Money(a.picos_ - b.picos_); }
  friend constexpr Money operator*(Money a, int64_t n) { return Money(a.picos_ * n); }
  friend constexpr Money operator*(int64_t n, Money a) { return Money(a.picos_ * n); }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(int64_t picos) : picos_(picos) {}
  int64_t picos_ = 0;
};

}  // namespace llmsched

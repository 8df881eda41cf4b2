// Copyright 2026 The qaipf Authors
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

#ifndef QAIPF_NUMERIC_HPP
#define QAIPF_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qaipf/errors.hpp"

namespace qaipf {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

[[nodiscard]] inline double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (const double v : values) {
    acc.add(v);
  }
  return acc.value();
}

[[nodiscard]] inline double log_sum_exp(std::span<const double> logs) noexcept {
  if (logs.empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  const double peak = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(peak)) {
    return peak;
  }
  CompensatedSum acc;
  for (const double l : logs) {
    acc.add(std::exp(l - peak));
  }
  return peak + std::log(acc.value());
}

/// log(1 + e^x) without overflow.
[[nodiscard]] inline double softplus(double x) noexcept {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Logistic 1 / (1 + e^{-x}).
[[nodiscard]] inline double logistic(double x) noexcept {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct Bracket {
  double lo = -10.0;
  double hi = 40.0;
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/**
 * Bisection for a function with f(lo) and f(hi) of opposite sign. Stops once
 * |f| < tolerance and the bracket is narrower than tolerance (relative), or
 * the bracket has collapsed to adjacent doubles.
 */
[[nodiscard]] inline RootResult bisect(const std::function<double(double)>& f, double lo, double hi,
                                       double tolerance, const std::string& what) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) {
    return {lo, 0.0, 0};
  }
  if (f_hi == 0.0) {
    return {hi, 0.0, 0};
  }
  if ((f_lo > 0) == (f_hi > 0) || std::isnan(f_lo) || std::isnan(f_hi)) {
    throw NoRoot(what + ": no sign change in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                 f_lo, f_hi);
  }
  RootResult best{lo, f_lo, 0};
  for (int it = 1; it <= 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    best = {mid, f_mid, it};
    // Keep halving past the residual tolerance until the bracket is tight
    // too: near-flat residuals would otherwise stop far from the root.
    if ((std::abs(f_mid) < tolerance && hi - lo < tolerance * (1.0 + std::abs(mid))) || mid <= lo || mid >= hi ||
        f_mid == 0.0) {
      break;
    }
    if ((f_mid > 0) == (f_lo > 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return best;
}

/// Locations where f changes sign on a uniform grid: each entry is the left grid node.
[[nodiscard]] inline std::vector<double> scan_sign_changes(const std::function<double(double)>& f, double lo,
                                                           double hi, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::ceil((hi - lo) / step));
  double x_prev = lo;
  double f_prev = f(lo);
  for (int i = 1; i <= count; ++i) {
    const double x = std::min(hi, lo + step * i);
    const double fx = f(x);
    if (f_prev == 0.0 || (fx != 0.0 && (f_prev > 0) != (fx > 0))) {
      out.push_back(x_prev);
    }
    x_prev = x;
    f_prev = fx;
  }
  if (f_prev == 0.0) {
    out.push_back(x_prev);
  }
  return out;
}

}  // namespace qaipf

#endif  // QAIPF_NUMERIC_HPP

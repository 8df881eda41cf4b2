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

#ifndef QAIPF_ERRORS_HPP
#define QAIPF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qaipf {

/// Bad parameters or precondition violations supplied by the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hard size cap of an exponential-cost routine was exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A self-consistent equation had no sign change in its search bracket.
class NoRoot : public std::runtime_error {
 public:
  NoRoot(const std::string& what, double f_lo, double f_hi)
      : std::runtime_error(what + " (f(lo)=" + std::to_string(f_lo) +
                           ", f(hi)=" + std::to_string(f_hi) + ")"),
        f_lo_(f_lo),
        f_hi_(f_hi) {}

  [[nodiscard]] double f_lo() const noexcept { return f_lo_; }
  [[nodiscard]] double f_hi() const noexcept { return f_hi_; }

 private:
  double f_lo_;
  double f_hi_;
};

/// Broken internal invariant (integrator fault, impossible weights).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qaipf

#endif  // QAIPF_ERRORS_HPP

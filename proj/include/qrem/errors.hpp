// Copyright 2026 The qrem Authors
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

#ifndef QREM_ERRORS_HPP
#define QREM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qrem {

/// Malformed input data (files, flags, out-of-range parameters).
class ParseError : public std::invalid_argument {
 public:
  explicit ParseError(const std::string &what) : std::invalid_argument(what) {}
};

/// A per-qubit transition matrix cannot be inverted because its
/// determinant 1 - r1_given_0 - r0_given_1 is (numerically) zero.
class SingularChannelError : public std::runtime_error {
 public:
  explicit SingularChannelError(const std::string &what) : std::runtime_error(what) {}
};

/// An observed bitstring has probability zero under the current channel
/// and estimate, so the multiplicative update is undefined. Only reachable
/// with channels that contain exact-zero rates.
class InfeasibleSupportError : public std::runtime_error {
 public:
  explicit InfeasibleSupportError(const std::string &what) : std::runtime_error(what) {}
};

/// Filesystem failures on the output side (unwritable path, rename failure).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace qrem

#endif

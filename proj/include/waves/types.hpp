// Copyright 2026 The WAVES Workbench Authors
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

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace waves {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Random engine used throughout. Every stochastic routine takes one by
/// reference; nothing seeds from the clock.
using Rng = std::mt19937_64;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0), detail_(what) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& detail() const noexcept { return detail_; }

  /// Same error with "<source>: " in front of the message, e.g. a file path.
  ParseError in(const std::string& source) const {
    return line_ == 0 ? ParseError(source + ": " + detail_) : ParseError(line_, source + ": " + detail_);
  }

 private:
  std::size_t line_;
  std::string detail_;
};

/// Operand sizes do not agree (qubit counts, vector lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value outside the domain an operation accepts.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Largest register for which dense matrices are built.
inline constexpr int kMaxDenseQubits = 12;

}  // namespace waves

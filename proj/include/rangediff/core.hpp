// Copyright 2026 The rangediff Authors
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
#include <stdexcept>
#include <string>
#include <vector>

namespace rangediff {

/// File and stream failures. Mapped to exit code 3 by the CLI.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration. Mapped to exit code 2 by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Math-domain failures use the standard exception types throughout:
//   std::invalid_argument  shape/dimension mismatch, invalid parameters
//   std::out_of_range      value outside its stated domain
//   std::domain_error      degenerate geometry (zero depth, collapsed box)

/// Dense row-major grid of doubles. All image- and view-shaped data in the
/// library is stored at 64-bit precision; file I/O narrows to float32.
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Grid: negative shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return v_.size(); }

  double& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  bool same_shape(const Grid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  void fill(double x) { v_.assign(v_.size(), x); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

/// Binary grid (values 0/1), used for occupancy and edit masks.
class Mask {
 public:
  Mask() = default;
  Mask(int rows, int cols, uint8_t fill = 0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mask: negative shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return v_.size(); }

  uint8_t& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
  uint8_t operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

  std::vector<uint8_t>& values() { return v_; }
  const std::vector<uint8_t>& values() const { return v_; }

  bool same_shape(const Mask& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  size_t count() const {
    size_t n = 0;
    for (uint8_t x : v_) n += (x != 0);
    return n;
  }

  /// Elementwise complement, 1 - m.
  Mask complement() const {
    Mask out(rows_, cols_);
    for (size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] ? 0 : 1;
    return out;
  }

  friend bool operator==(const Mask& a, const Mask& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<uint8_t> v_;
};

/// State vectors handled by the diffusion machinery.
using Vec = std::vector<double>;

inline void check_same_dim(const Vec& a, const Vec& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

}  // namespace rangediff

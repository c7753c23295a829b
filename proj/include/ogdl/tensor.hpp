#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ogdl {

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto process exit codes:
// ConfigError -> 1 (usage), DataError -> 2 (data/integrity),
// NumericError -> 3 (non-finite values).
// ---------------------------------------------------------------------------
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : ConfigError {
  using ConfigError::ConfigError;
};

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

// Dense row-major tensor of doubles; the unit of all computation here.
// Rank 0 is a scalar, rank 1 a vector, rank 2 a matrix.
struct Tensor {
  Shape shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != shape_numel(shape))
      throw ShapeError("tensor value count " + std::to_string(values.size()) +
                       " does not match shape " + shape_str(shape));
  }

  static Tensor zeros(const Shape& s) { return Tensor(s, std::vector<double>(shape_numel(s), 0.0)); }
  static Tensor scalar(double v) { return Tensor({}, {v}); }
  static Tensor vec(std::vector<double> v) {
    Shape s{v.size()};
    return Tensor(std::move(s), std::move(v));
  }
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
    return Tensor({rows, cols}, std::move(v));
  }

  std::size_t numel() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }

  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  // rank-2 access, row-major
  double at2(std::size_t r, std::size_t c) const { return values[r * shape[1] + c]; }
  double& at2(std::size_t r, std::size_t c) { return values[r * shape[1] + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  // Bit-exact comparison, used by the routing and determinism checks.
  bool same_bits(const Tensor& o) const {
    if (shape != o.shape) return false;
    if (values.empty()) return o.values.empty();
    return std::memcmp(values.data(), o.values.data(), values.size() * sizeof(double)) == 0;
  }
};

inline double squared_distance(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b))
    throw ShapeError("squared_distance shape mismatch " + shape_str(a.shape) + " vs " + shape_str(b.shape));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

inline std::size_t argmax(const Tensor& t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < t.numel(); ++i)
    if (t[i] > t[best]) best = i;
  return best;
}

}  // namespace ogdl

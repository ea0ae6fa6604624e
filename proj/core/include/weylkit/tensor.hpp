#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "weylkit/errors.hpp"

namespace weylkit {

// Relative degeneracy threshold shared by matrix inversion, determinant
// checks and signature computation: a metric is rejected when
// |det| <= threshold * scale^n with scale = max |entry|. Configurable from
// the CLI; 1e-12 separates genuine degeneracy from rounding at desk scale.
double degeneracy_threshold();
void set_degeneracy_threshold(double factor);

// Dense numeric tensor at a point. Sizes are deliberately small: dim <= 6,
// entries stored row-major. Symmetric index pairs can be declared and are
// tracked as metadata.
class PointTensor {
 public:
  PointTensor(int rank, int dim);  // zero-filled
  static PointTensor identity(int dim);  // rank-2 Kronecker delta

  int rank() const noexcept { return rank_; }
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return e_.size(); }

  double at(std::span<const int> idx) const;
  double& at(std::span<const int> idx);

  template <typename... I>
  double operator()(I... i) const {
    if constexpr (sizeof...(I) == 0) {
      return at(std::span<const int>{});
    } else {
      const int idx[] = {static_cast<int>(i)...};
      return at(std::span<const int>(idx, sizeof...(I)));
    }
  }

  template <typename... I>
  double& operator()(I... i) {
    static_assert(sizeof...(I) > 0, "use at({}) for rank-0 tensors");
    const int idx[] = {static_cast<int>(i)...};
    return at(std::span<const int>(idx, sizeof...(I)));
  }

  std::span<const double> data() const { return e_; }
  std::span<double> data() { return e_; }

  // Averages entries over the slot swap and records the pair.
  void symmetrize(int slot_a, int slot_b);
  // Validates |t[..a..b..] - t[..b..a..]| <= tol, then records the pair.
  void declare_symmetry(int slot_a, int slot_b, double tol = 0.0);
  bool symmetric_in(int slot_a, int slot_b, double tol) const;
  const std::vector<std::pair<int, int>>& symmetries() const { return sym_; }

  // Sums over the paired slots; rank drops by two. Declared symmetries of
  // the result are not tracked.
  PointTensor contract(int slot_a, int slot_b) const;

  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t flat(std::span<const int> idx) const;

  int rank_;
  int dim_;
  std::vector<double> e_;
  std::vector<std::pair<int, int>> sym_;
};

// L-infinity distance over entries; shapes must match.
double max_abs_diff(const PointTensor& a, const PointTensor& b);

PointTensor operator+(const PointTensor& a, const PointTensor& b);
PointTensor operator-(const PointTensor& a, const PointTensor& b);

// Symmetric matrix holding a metric value g_{jk} at a point (or its inverse).
// Stored full, writes go through set() which keeps both triangles equal.
class SymMatrix {
 public:
  explicit SymMatrix(int dim);  // zeros
  static SymMatrix identity(int dim);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix minkowski(int dim);  // diag(-1, 1, ..., 1)

  int dim() const noexcept { return dim_; }
  double operator()(int i, int j) const;
  void set(int i, int j, double value);

  double det() const;

  // Gauss-Jordan with partial pivoting; throws DegenerateMetricError when
  // |det| <= degeneracy_threshold() * scale^n.
  SymMatrix inverse() const;

  // (positive count, negative count) via the Jacobi eigen-solver; throws
  // DegenerateMetricError when any |eigenvalue| falls below the threshold.
  std::pair<int, int> signature() const;

  double quad(std::span<const double> v) const;      // v . m . v
  std::vector<double> apply(std::span<const double> v) const;  // m . v

  double max_abs() const;
  std::span<const double> data() const { return e_; }

 private:
  int dim_;
  std::vector<double> e_;
};

struct EigenSystem {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

// Cyclic Jacobi rotations; deterministic and ample for dim <= 6.
EigenSystem jacobi_eigen(const SymMatrix& m);

}  // namespace weylkit

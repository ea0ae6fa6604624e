#include "weylkit/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace weylkit {

namespace {

std::atomic<double> g_degeneracy_threshold{1e-12};

void check_dim(int dim) {
  if (dim < 2 || dim > 6)
    throw ShapeError("tensor dimension must lie in [2, 6], got " +
                     std::to_string(dim));
}

std::size_t ipow(int base, int exponent) {
  std::size_t r = 1;
  for (int i = 0; i < exponent; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

}  // namespace

double degeneracy_threshold() { return g_degeneracy_threshold.load(); }

void set_degeneracy_threshold(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw Error("degeneracy threshold must be a positive finite number");
  g_degeneracy_threshold.store(factor);
}

// --- PointTensor ---

PointTensor::PointTensor(int rank, int dim) : rank_(rank), dim_(dim) {
  if (rank < 0) throw ShapeError("tensor rank must be non-negative");
  check_dim(dim);
  e_.assign(ipow(dim, rank), 0.0);
}

PointTensor PointTensor::identity(int dim) {
  PointTensor t(2, dim);
  for (int i = 0; i < dim; ++i) t(i, i) = 1.0;
  t.declare_symmetry(0, 1);
  return t;
}

std::size_t PointTensor::flat(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank_)
    throw ShapeError("index arity " + std::to_string(idx.size()) +
                     " does not match tensor rank " + std::to_string(rank_));
  std::size_t acc = 0;
  for (int i : idx) {
    if (i < 0 || i >= dim_)
      throw ShapeError("tensor index " + std::to_string(i) +
                       " out of range for dim " + std::to_string(dim_));
    acc = acc * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  }
  return acc;
}

double PointTensor::at(std::span<const int> idx) const { return e_[flat(idx)]; }
double& PointTensor::at(std::span<const int> idx) { return e_[flat(idx)]; }

void PointTensor::symmetrize(int slot_a, int slot_b) {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= rank_ ||
      slot_b >= rank_)
    throw ShapeError("invalid symmetry slots");
  std::vector<int> idx(static_cast<std::size_t>(rank_), 0);
  const std::size_t total = e_.size();
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % dim_);
      rem /= static_cast<std::size_t>(dim_);
    }
    if (idx[static_cast<std::size_t>(slot_a)] >= idx[static_cast<std::size_t>(slot_b)]) continue;
    std::swap(idx[static_cast<std::size_t>(slot_a)], idx[static_cast<std::size_t>(slot_b)]);
    const std::size_t g = flat(idx);
    const double avg = 0.5 * (e_[f] + e_[g]);
    e_[f] = avg;
    e_[g] = avg;
  }
  sym_.emplace_back(std::min(slot_a, slot_b), std::max(slot_a, slot_b));
}

bool PointTensor::symmetric_in(int slot_a, int slot_b, double tol) const {
  if (slot_a == slot_b || slot_a < 0 || slot_b < 0 || slot_a >= rank_ ||
      slot_b >= rank_)
    throw ShapeError("invalid symmetry slots");
  std::vector<int> idx(static_cast<std::size_t>(rank_), 0);
  for (std::size_t f = 0; f < e_.size(); ++f) {
    std::size_t rem = f;
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % dim_);
      rem /= static_cast<std::size_t>(dim_);
    }
    std::swap(idx[static_cast<std::size_t>(slot_a)], idx[static_cast<std::size_t>(slot_b)]);
    if (std::abs(e_[f] - e_[flat(idx)]) > tol) return false;
  }
  return true;
}

void PointTensor::declare_symmetry(int slot_a, int slot_b, double tol) {
  if (!symmetric_in(slot_a, slot_b, tol))
    throw ShapeError("tensor is not symmetric in slots " +
                     std::to_string(slot_a) + "," + std::to_string(slot_b));
  sym_.emplace_back(std::min(slot_a, slot_b), std::max(slot_a, slot_b));
}

PointTensor PointTensor::contract(int slot_a, int slot_b) const {
  if (rank_ < 2) throw ShapeError("contraction needs rank >= 2");
  if (slot_a == slot_b) throw ShapeError("contraction slots must differ");
  if (slot_a < 0 || slot_b < 0 || slot_a >= rank_ || slot_b >= rank_)
    throw ShapeError("contraction slot out of range");
  const int lo = std::min(slot_a, slot_b);
  const int hi = std::max(slot_a, slot_b);
  PointTensor out(rank_ - 2, dim_);
  std::vector<int> out_idx(static_cast<std::size_t>(rank_ - 2), 0);
  std::vector<int> full(static_cast<std::size_t>(rank_), 0);
  const std::size_t total = out.e_.size();
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rem = f;
    for (int s = rank_ - 3; s >= 0; --s) {
      out_idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % dim_);
      rem /= static_cast<std::size_t>(dim_);
    }
    // spread the free indices around the contracted slots
    int src = 0;
    for (int s = 0; s < rank_; ++s) {
      if (s == lo || s == hi) continue;
      full[static_cast<std::size_t>(s)] = out_idx[static_cast<std::size_t>(src++)];
    }
    double sum = 0.0;
    for (int d = 0; d < dim_; ++d) {
      full[static_cast<std::size_t>(lo)] = d;
      full[static_cast<std::size_t>(hi)] = d;
      sum += e_[flat(full)];
    }
    out.e_[f] = sum;
  }
  return out;
}

double PointTensor::max_abs() const {
  double m = 0.0;
  for (double v : e_) m = std::max(m, std::abs(v));
  return m;
}

bool PointTensor::all_finite() const {
  for (double v : e_)
    if (!std::isfinite(v)) return false;
  return true;
}

double max_abs_diff(const PointTensor& a, const PointTensor& b) {
  if (a.rank() != b.rank() || a.dim() != b.dim())
    throw ShapeError("tensor shape mismatch in max_abs_diff");
  double m = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i)
    m = std::max(m, std::abs(da[i] - db[i]));
  return m;
}

PointTensor operator+(const PointTensor& a, const PointTensor& b) {
  if (a.rank() != b.rank() || a.dim() != b.dim())
    throw ShapeError("tensor shape mismatch in addition");
  PointTensor out = a;
  auto d = out.data();
  auto db = b.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += db[i];
  return out;
}

PointTensor operator-(const PointTensor& a, const PointTensor& b) {
  if (a.rank() != b.rank() || a.dim() != b.dim())
    throw ShapeError("tensor shape mismatch in subtraction");
  PointTensor out = a;
  auto d = out.data();
  auto db = b.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= db[i];
  return out;
}

// --- SymMatrix ---

SymMatrix::SymMatrix(int dim) : dim_(dim) {
  check_dim(dim);
  e_.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
  SymMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.dim_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
  return m;
}

SymMatrix SymMatrix::minkowski(int dim) {
  SymMatrix m = identity(dim);
  m.set(0, 0, -1.0);
  return m;
}

double SymMatrix::operator()(int i, int j) const {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
    throw ShapeError("matrix index out of range");
  return e_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
            static_cast<std::size_t>(j)];
}

void SymMatrix::set(int i, int j, double value) {
  if (i < 0 || j < 0 || i >= dim_ || j >= dim_)
    throw ShapeError("matrix index out of range");
  e_[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim_) +
     static_cast<std::size_t>(j)] = value;
  e_[static_cast<std::size_t>(j) * static_cast<std::size_t>(dim_) +
     static_cast<std::size_t>(i)] = value;
}

namespace {

// LU with partial pivoting; returns the determinant of a dense copy.
double lu_det(const SymMatrix& m) {
  const int n = m.dim();
  std::vector<double> a(m.data().begin(), m.data().end());
  auto at = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(at(r, c)) > std::abs(at(pivot, c))) pivot = r;
    if (at(pivot, c) == 0.0) return 0.0;
    if (pivot != c) {
      for (int j = 0; j < n; ++j) std::swap(at(pivot, j), at(c, j));
      det = -det;
    }
    det *= at(c, c);
    for (int r = c + 1; r < n; ++r) {
      const double f = at(r, c) / at(c, c);
      for (int j = c; j < n; ++j) at(r, j) -= f * at(c, j);
    }
  }
  return det;
}

}  // namespace

double SymMatrix::det() const { return lu_det(*this); }

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (double v : e_) m = std::max(m, std::abs(v));
  return m;
}

SymMatrix SymMatrix::inverse() const {
  const int n = dim_;
  const double scale = max_abs();
  const double d = lu_det(*this);
  double limit = degeneracy_threshold();
  for (int i = 0; i < n; ++i) limit *= scale;
  if (scale == 0.0 || std::abs(d) <= limit)
    throw DegenerateMetricError(
        "degenerate metric: |det| = " + std::to_string(std::abs(d)) +
            " at or below threshold",
        d);

  // Gauss-Jordan on [A | I]
  std::vector<double> a(e_.begin(), e_.end());
  std::vector<double> inv(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  auto A = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };
  auto B = [&](int i, int j) -> double& {
    return inv[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j)];
  };
  for (int i = 0; i < n; ++i) B(i, i) = 1.0;
  for (int c = 0; c < n; ++c) {
    int pivot = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(A(r, c)) > std::abs(A(pivot, c))) pivot = r;
    if (A(pivot, c) == 0.0)
      throw DegenerateMetricError("degenerate metric: zero pivot", d);
    if (pivot != c)
      for (int j = 0; j < n; ++j) {
        std::swap(A(pivot, j), A(c, j));
        std::swap(B(pivot, j), B(c, j));
      }
    const double p = A(c, c);
    for (int j = 0; j < n; ++j) {
      A(c, j) /= p;
      B(c, j) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A(r, c);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        A(r, j) -= f * A(c, j);
        B(r, j) -= f * B(c, j);
      }
    }
  }
  // the inverse of a symmetric matrix is symmetric; average out rounding
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      out.set(i, j, 0.5 * (B(i, j) + B(j, i)));
  return out;
}

std::pair<int, int> SymMatrix::signature() const {
  const EigenSystem eig = jacobi_eigen(*this);
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  const double thr = degeneracy_threshold() * scale;
  int pos = 0;
  int neg = 0;
  double det = 1.0;
  for (double v : eig.values) det *= v;
  for (double v : eig.values) {
    if (scale == 0.0 || std::abs(v) <= thr)
      throw DegenerateMetricError(
          "degenerate metric: eigenvalue below threshold", det);
    if (v > 0.0)
      ++pos;
    else
      ++neg;
  }
  return {pos, neg};
}

double SymMatrix::quad(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw ShapeError("vector length does not match matrix dimension");
  double s = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      s += (*this)(i, j) * v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return s;
}

std::vector<double> SymMatrix::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw ShapeError("vector length does not match matrix dimension");
  std::vector<double> out(static_cast<std::size_t>(dim_), 0.0);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

EigenSystem jacobi_eigen(const SymMatrix& m) {
  const int n = m.dim();
  std::vector<double> a(m.data().begin(), m.data().end());
  auto A = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(j)];
  };
  std::vector<double> vec(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  auto V = [&](int i, int j) -> double& {
    return vec[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j)];
  };
  for (int i = 0; i < n; ++i) V(i, i) = 1.0;

  const double scale = std::max(m.max_abs(), 1e-300);
  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (std::sqrt(off) <= 1e-15 * scale * n) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = A(p, p);
        const double aqq = A(q, q);
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = 0.0;
        A(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = A(r, p);
            const double arq = A(r, q);
            A(r, p) = arp - s * (arq + tau * arp);
            A(p, r) = A(r, p);
            A(r, q) = arq + s * (arp - tau * arq);
            A(q, r) = A(r, q);
          }
          const double vrp = V(r, p);
          const double vrq = V(r, q);
          V(r, p) = vrp - s * (vrq + tau * vrp);
          V(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return A(x, x) < A(y, y); });

  EigenSystem out;
  out.values.reserve(static_cast<std::size_t>(n));
  out.vectors.reserve(static_cast<std::size_t>(n));
  for (int k : order) {
    out.values.push_back(A(k, k));
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = V(r, k);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

}  // namespace weylkit

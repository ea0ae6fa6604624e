#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weylkit {

// Root of the toolkit error hierarchy. The CLI maps any Error to exit code 1;
// compatibility verdicts use exit code 2 and are not reported as errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Expression or scenario text rejected. offset() is the byte position of the
// first offending token in the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation left the expression's domain (ln of a non-positive value,
// division by zero, sqrt of a negative value) or produced a non-finite value.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Rank, dimension or slot mismatch between tensor-like arguments.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(what) {}
};

// Metric (or eigenvalue) fell below the degeneracy threshold.
class DegenerateMetricError : public Error {
 public:
  DegenerateMetricError(const std::string& what, double determinant)
      : Error(what), det_(determinant) {}
  double determinant() const noexcept { return det_; }

 private:
  double det_;
};

// A null-cone operation was requested for a definite metric; there are no
// nonzero null vectors in that case.
class DefiniteSignatureError : public Error {
 public:
  explicit DefiniteSignatureError(const std::string& what) : Error(what) {}
};

// weylize found a point whose difference tensor is not in the compatible
// family; carries the worst offending point and its reconstruction residual.
class IncompatibilityError : public Error {
 public:
  IncompatibilityError(const std::string& what, std::vector<double> point,
                       double residual, int point_index)
      : Error(what),
        point_(std::move(point)),
        residual_(residual),
        index_(point_index) {}
  const std::vector<double>& point() const noexcept { return point_; }
  double residual() const noexcept { return residual_; }
  int point_index() const noexcept { return index_; }

 private:
  std::vector<double> point_;
  double residual_;
  int index_;
};

// Geodesic integration failed mid-run; step() is the offending step index.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, int step)
      : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace weylkit

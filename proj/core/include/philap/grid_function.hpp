#pragma once

#include <iosfwd>
#include <vector>

#include "philap/errors.hpp"

namespace philap {

// A function on [0,1] sampled at a strictly increasing node set containing 0
// and 1, with a monotone piecewise-cubic (Fritsch-Carlson) interpolant
// between nodes. Node values are reproduced exactly by evaluation.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<double> nodes, std::vector<double> values);

  // Symmetric mesh geometrically graded toward both endpoints; consecutive
  // interval widths shrink by `ratio` toward 0 and 1. n is forced odd so the
  // midpoint 1/2 is a node.
  static std::vector<double> graded_mesh(std::size_t n, double ratio = 0.85);

  static GridFunction zero(std::vector<double> nodes);

  double operator()(double t) const;
  double sup_norm() const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return nodes_.size(); }

  // Two-column CSV (t,u) with a header row, 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  void ensure_slopes() const;

  std::vector<double> nodes_;
  std::vector<double> values_;
  mutable std::vector<double> slopes_;  // lazy PCHIP slopes
};

}  // namespace philap

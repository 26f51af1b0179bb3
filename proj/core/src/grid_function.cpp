#include "philap/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace philap {

GridFunction::GridFunction(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() != values_.size() || nodes_.size() < 2)
    throw InvariantError("grid function needs matching node/value arrays of size >= 2");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
    throw InvariantError("grid function nodes must start at 0 and end at 1");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw InvariantError("grid function nodes must be strictly increasing");
}

std::vector<double> GridFunction::graded_mesh(std::size_t n, double ratio) {
  if (n < 5) n = 5;
  if (n % 2 == 0) ++n;
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvariantError("mesh ratio must lie in (0,1)");
  const std::size_t half = (n - 1) / 2;
  // widths from the center toward 0 scale by `ratio` each step
  double scale = (0.5) * (1.0 - ratio) / (1.0 - std::pow(ratio, static_cast<double>(half)));
  std::vector<double> nodes(n);
  nodes[0] = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    // width nearest the endpoint is scale*ratio^(half-1)
    t += scale * std::pow(ratio, static_cast<double>(half - 1 - i));
    nodes[i + 1] = t;
  }
  nodes[half] = 0.5;
  for (std::size_t i = 0; i < half; ++i) nodes[n - 1 - i] = 1.0 - nodes[i];
  return nodes;
}

GridFunction GridFunction::zero(std::vector<double> nodes) {
  std::vector<double> values(nodes.size(), 0.0);
  return GridFunction(std::move(nodes), std::move(values));
}

void GridFunction::ensure_slopes() const {
  if (!slopes_.empty()) return;
  const std::size_t n = nodes_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = nodes_[i + 1] - nodes_[i];
    delta[i] = (values_[i + 1] - values_[i]) / h[i];
  }
  slopes_.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      double w1 = 2.0 * h[i] + h[i - 1];
      double w2 = h[i] + 2.0 * h[i - 1];
      slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // shape-preserving one-sided endpoint slopes
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::fabs(m) > 3.0 * std::fabs(d0)) return 3.0 * d0;
    return m;
  };
  slopes_[0] = n > 2 ? endpoint(h[0], h[1], delta[0], delta[1]) : delta[0];
  slopes_[n - 1] = n > 2 ? endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]) : delta[n - 2];
}

double GridFunction::operator()(double t) const {
  if (t <= nodes_.front()) return values_.front();
  if (t >= nodes_.back()) return values_.back();
  ensure_slopes();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  if (t == nodes_[i]) return values_[i];
  double h = nodes_[i + 1] - nodes_[i];
  double s = (t - nodes_[i]) / h;
  double s2 = s * s, s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1;
  double h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2;
  double h11 = s3 - s2;
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] + h11 * h * slopes_[i + 1];
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "t,u\n";
  char buf[96];
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", nodes_[i], values_[i]);
    os << buf;
  }
}

}  // namespace philap

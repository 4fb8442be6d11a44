#pragma once

#include <array>

#include "wcurv/errors.hpp"
#include "wcurv/types.hpp"

namespace wcurv {

/// Uniform periodic grid on the flat torus [0, 2pi)^n, n in {1,2,3}.
/// Lexicographic node order: u_1 slowest, u_n fastest.
struct BaseGrid {
  int dim = 2;     // n
  int points = 8;  // N per dimension, even, >= 8

  BaseGrid() = default;
  BaseGrid(int n, int N) : dim(n), points(N) {
    if (n < 1 || n > 3) throw ConfigError("BaseGrid: dim must be 1, 2 or 3");
    if (N < 8 || N % 2 != 0) throw ConfigError("BaseGrid: N must be even and >= 8");
  }

  double spacing() const { return 2.0 * M_PI / points; }

  Eigen::Index size() const {
    Eigen::Index s = 1;
    for (int d = 0; d < dim; ++d) s *= points;
    return s;
  }

  std::array<int, 3> unflatten(Eigen::Index flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int d = dim - 1; d >= 0; --d) {
      idx[std::size_t(d)] = int(flat % points);
      flat /= points;
    }
    return idx;
  }

  Eigen::Index flatten(const std::array<int, 3>& idx) const {
    Eigen::Index flat = 0;
    for (int d = 0; d < dim; ++d) flat = flat * points + idx[std::size_t(d)];
    return flat;
  }

  /// Periodic neighbor of a node along dimension d (delta in node units).
  Eigen::Index shift(Eigen::Index flat, int d, int delta) const {
    auto idx = unflatten(flat);
    int v = (idx[std::size_t(d)] + delta) % points;
    if (v < 0) v += points;
    idx[std::size_t(d)] = v;
    return flatten(idx);
  }

  /// Coordinates of a node.
  SmallVec coords(Eigen::Index flat) const {
    const auto idx = unflatten(flat);
    SmallVec u(dim);
    for (int d = 0; d < dim; ++d) u[d] = spacing() * idx[std::size_t(d)];
    return u;
  }

  bool operator==(const BaseGrid& other) const {
    return dim == other.dim && points == other.points;
  }
};

/// Discrete radial field r(u) over a BaseGrid, with its annulus barrier.
struct RadialGraphField {
  BaseGrid grid;
  Eigen::VectorXd r;
  double r1 = 0.0;
  double r2 = 0.0;

  RadialGraphField() = default;
  RadialGraphField(BaseGrid g, Eigen::VectorXd values, double lo, double hi)
      : grid(g), r(std::move(values)), r1(lo), r2(hi) {
    if (r.size() != grid.size())
      throw ShapeError("RadialGraphField: value count does not match the grid");
    if (!(r1 < r2)) throw ConfigError("RadialGraphField: need r1 < r2");
  }

  static RadialGraphField constant(BaseGrid g, double value, double lo, double hi) {
    return RadialGraphField(g, Eigen::VectorXd::Constant(g.size(), value), lo, hi);
  }

  /// Strict barrier check r1 < r < r2 at every node.
  bool inside_barrier() const {
    return (r.array() > r1).all() && (r.array() < r2).all();
  }
};

}  // namespace wcurv

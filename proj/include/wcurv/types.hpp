#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace wcurv {

// Principal-curvature dimension is small (n <= 8); fixed-capacity dynamic
// types keep every per-node quantity off the heap.
inline constexpr int kMaxDim = 8;

template <typename Scalar>
using SmallVecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
template <typename Scalar>
using SmallMatT =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

using SmallVec = SmallVecT<double>;
using SmallMat = SmallMatT<double>;

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x > lo && x < hi; }
};

/// Exact binomial coefficient for the small dimensions used here.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * double(n - i) / double(i + 1);
  // n <= 8: the product is an exact small integer, round away the noise
  return std::round(c);
}

}  // namespace wcurv

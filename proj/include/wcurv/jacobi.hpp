#pragma once

#include <cmath>
#include <numeric>

#include "wcurv/errors.hpp"
#include "wcurv/types.hpp"

namespace wcurv {

template <typename Scalar>
struct JacobiEigenT {
  SmallVecT<Scalar> values;   // sorted descending, ties keep original order
  SmallMatT<Scalar> vectors;  // columns matched to values
  int sweeps = 0;
};

using JacobiEigen = JacobiEigenT<double>;

/// Cyclic Jacobi eigen-decomposition for small symmetric matrices (n <= 8).
/// Rotations are skipped once an off-diagonal entry falls below
/// tol_scale * ||S||_F, so a diagonal input is returned bit-exactly.
template <typename Derived>
JacobiEigenT<typename Derived::Scalar> jacobi_eigen(
    const Eigen::MatrixBase<Derived>& S_in,
    typename Derived::Scalar tol_scale = typename Derived::Scalar(1e-13),
    int max_sweeps = 50) {
  using Scalar = typename Derived::Scalar;
  const int n = int(S_in.rows());
  if (n < 1 || n > kMaxDim || S_in.cols() != n)
    throw ShapeError("jacobi_eigen: matrix must be n x n with 1 <= n <= 8");

  SmallMatT<Scalar> A = S_in;
  SmallMatT<Scalar> V = SmallMatT<Scalar>::Identity(n, n);
  const Scalar thresh = tol_scale * A.norm();

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Scalar off = 0;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(A(p, q)));
    if (off <= thresh) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const Scalar apq = A(p, q);
        if (std::abs(apq) <= thresh) continue;
        // |apq| > thresh keeps theta far from overflow
        const Scalar theta = (A(q, q) - A(p, p)) / (Scalar(2) * apq);
        Scalar t = Scalar(1) / (std::abs(theta) + std::sqrt(Scalar(1) + theta * theta));
        if (theta < Scalar(0)) t = -t;
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = t * c;
        const Scalar tau = s / (Scalar(1) + c);
        const Scalar h = t * apq;

        A(p, p) -= h;
        A(q, q) += h;
        A(p, q) = Scalar(0);
        A(q, p) = Scalar(0);
        for (int i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const Scalar aip = A(i, p), aiq = A(i, q);
            A(i, p) = aip - s * (aiq + tau * aip);
            A(p, i) = A(i, p);
            A(i, q) = aiq + s * (aip - tau * aiq);
            A(q, i) = A(i, q);
          }
          const Scalar vip = V(i, p), viq = V(i, q);
          V(i, p) = vip - s * (viq + tau * vip);
          V(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  if (sweep >= max_sweeps)
    throw InternalError("jacobi_eigen: no convergence within sweep cap");

  // descending order, stable in the original index for exact ties
  JacobiEigenT<Scalar> out;
  int idx[kMaxDim];
  std::iota(idx, idx + n, 0);
  std::stable_sort(idx, idx + n, [&](int a, int b) { return A(a, a) > A(b, b); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = A(idx[j], idx[j]);
    out.vectors.col(j) = V.col(idx[j]);
  }
  out.sweeps = sweep;
  return out;
}

/// Principal inverse square root of a symmetric positive definite matrix.
template <typename Derived>
SmallMatT<typename Derived::Scalar> symmetric_inverse_sqrt(
    const Eigen::MatrixBase<Derived>& G) {
  using Scalar = typename Derived::Scalar;
  const auto eig = jacobi_eigen(G);
  const int n = int(G.rows());
  SmallMatT<Scalar> D = SmallMatT<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!(eig.values[i] > Scalar(0)))
      throw DomainError("symmetric_inverse_sqrt: matrix not positive definite");
    D(i, i) = Scalar(1) / std::sqrt(eig.values[i]);
  }
  return eig.vectors * D * eig.vectors.transpose();
}

}  // namespace wcurv

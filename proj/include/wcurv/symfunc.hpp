#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "wcurv/errors.hpp"
#include "wcurv/jacobi.hpp"
#include "wcurv/rng.hpp"
#include "wcurv/types.hpp"

namespace wcurv {

/// sigma_k of the entries of any vector expression, by the one-pass
/// dynamic-programming recurrence e_j <- e_j + x_i * e_{j-1} (O(nk)).
/// Out-of-range k follows the usual conventions: sigma_0 = 1, sigma_k = 0
/// for k > n or k < 0.
template <typename Derived>
typename Derived::Scalar elementary_symmetric(int k,
                                              const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const int n = int(x.size());
  if (k == 0) return Scalar(1);
  if (k < 0 || k > n) return Scalar(0);
  Scalar e[kMaxDim + 1] = {};
  e[0] = Scalar(1);
  for (int i = 0; i < n; ++i) {
    const Scalar xi = x[i];
    for (int j = std::min(i + 1, k); j >= 1; --j) e[j] += xi * e[j - 1];
  }
  return e[k];
}

/// Ordered principal-curvature tuple; always sorted descending on
/// construction (stable, so exact ties keep their original order).
class CurvatureVector {
 public:
  explicit CurvatureVector(SmallVec values) : v_(std::move(values)) {
    if (v_.size() < 1) throw DomainError("CurvatureVector: need n >= 1");
    if (v_.size() > kMaxDim) throw DomainError("CurvatureVector: n <= 8 supported");
    if (!v_.allFinite()) throw DomainError("CurvatureVector: entries must be finite");
    std::stable_sort(v_.data(), v_.data() + v_.size(),
                     [](double a, double b) { return a > b; });
  }

  int n() const { return int(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  const SmallVec& values() const { return v_; }

 private:
  SmallVec v_;
};

struct ConeMembership {
  bool in_cone = false;
  double margin = 0.0;  // min over m <= k of sigma_m / C(n, m)
  int k = 0;
};

namespace detail {

inline void require_k_range(int k, int n, const char* who) {
  if (k < 1 || k > n) throw DomainError(std::string(who) + ": need 1 <= k <= n");
}

/// sigma_k of x with one entry deleted.
inline double sigma_without(int k, const SmallVec& x, int skip) {
  const int n = int(x.size());
  if (k == 0) return 1.0;
  if (k < 0 || k > n - 1) return 0.0;
  double e[kMaxDim + 1] = {};
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    if (i == skip) continue;
    for (int j = k; j >= 1; --j) e[j] += x[i] * e[j - 1];
  }
  return e[k];
}

/// sigma_k of x with two entries deleted.
inline double sigma_without2(int k, const SmallVec& x, int skip_a, int skip_b) {
  const int n = int(x.size());
  if (k == 0) return 1.0;
  if (k < 0 || k > n - 2) return 0.0;
  double e[kMaxDim + 1] = {};
  e[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    if (i == skip_a || i == skip_b) continue;
    for (int j = k; j >= 1; --j) e[j] += x[i] * e[j - 1];
  }
  return e[k];
}

}  // namespace detail

/// sigma_k(kappa). With strict=true, k outside [0, n] is a domain error
/// instead of the 0/1 convention.
inline double sigma(int k, const CurvatureVector& kappa, bool strict = false) {
  if (strict && (k < 0 || k > kappa.n()))
    throw DomainError("sigma: k out of range under strict flag");
  return elementary_symmetric(k, kappa.values());
}

/// Gradient of sigma_k: component i is sigma_{k-1} with entry i deleted.
inline SmallVec sigma_gradient(int k, const CurvatureVector& kappa) {
  detail::require_k_range(k, kappa.n(), "sigma_gradient");
  const int n = kappa.n();
  SmallVec g(n);
  for (int i = 0; i < n; ++i) g[i] = detail::sigma_without(k - 1, kappa.values(), i);
  return g;
}

/// Hessian of sigma_k: entry (i, j), i != j, is sigma_{k-2} with entries
/// i and j deleted; the diagonal is identically zero.
inline SmallMat sigma_hessian(int k, const CurvatureVector& kappa) {
  detail::require_k_range(k, kappa.n(), "sigma_hessian");
  const int n = kappa.n();
  SmallMat H = SmallMat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = detail::sigma_without2(k - 2, kappa.values(), i, j);
      H(i, j) = v;
      H(j, i) = v;
    }
  return H;
}

/// Gårding cone membership with a scale-aware margin: the margin is the
/// minimum of sigma_m / C(n, m) over m = 1..k, comparable across m.
inline ConeMembership cone_test(int k, const CurvatureVector& kappa) {
  detail::require_k_range(k, kappa.n(), "cone_test");
  const int n = kappa.n();
  double margin = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= k; ++m)
    margin = std::min(margin, elementary_symmetric(m, kappa.values()) / binomial(n, m));
  return ConeMembership{margin > 0.0, margin, k};
}

/// sigma_k of a symmetric matrix via its Jacobi eigenvalues.
inline std::pair<double, CurvatureVector> sigma_of_shape(int k,
                                                         const SmallMat& S) {
  const int n = int(S.rows());
  if (n < 1 || n > kMaxDim || S.cols() != n)
    throw ShapeError("sigma_of_shape: need square n x n with n <= 8");
  detail::require_k_range(k, n, "sigma_of_shape");
  const double scale = S.norm();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ShapeError("sigma_of_shape: matrix not symmetric within tolerance");
  SmallMat sym = 0.5 * (S + S.transpose());
  CurvatureVector kappa(jacobi_eigen(sym).values);
  return {sigma(k, kappa), kappa};
}

// ---------------------------------------------------------------------------
// Cone sampling

struct ConeSampleConstraints {
  double sigma_k_lo = 0.5;   // N0 > 0
  double sigma_k_hi = 5.0;   // N1 >= N0
  double kappa1_min = 0.0;   // B >= 0
};

/// Draws kappa in the Gårding cone with sigma_k in [N0, N1] and
/// kappa_1 >= B. Rejection sampling over a mixture of positive vectors and
/// positive vectors whose tail is pushed negative toward the cone boundary,
/// rescaled so sigma_k lands in range; anisotropy adapts until the kappa_1
/// floor is met. Deterministic given the seed.
inline CurvatureVector sample_cone(int k, int n, std::uint64_t seed,
                                   const ConeSampleConstraints& c = {}) {
  detail::require_k_range(k, n, "sample_cone");
  if (!(c.sigma_k_lo > 0.0) || c.sigma_k_hi < c.sigma_k_lo || c.kappa1_min < 0.0)
    throw PreconditionError("sample_cone: need 0 < N0 <= N1 and B >= 0");

  Rng rng(seed);
  double anis = 1.0;
  constexpr int kBudget = 100000;
  for (int attempt = 0; attempt < kBudget; ++attempt) {
    SmallVec x(n);
    for (int i = 0; i < n; ++i) x[i] = std::exp(0.75 * rng.normal());
    std::sort(x.data(), x.data() + n, std::greater<double>());
    x[0] *= anis;

    if (n > k && rng.uniform() < 0.5) {
      // negate the last m entries and scale the negative block up to just
      // inside the cone boundary
      const int m = rng.uniform_int(1, n - k);
      SmallVec tail = x.tail(m);
      auto in_cone_scaled = [&](double s) {
        SmallVec y = x;
        y.tail(m) = -s * tail;
        return cone_test(k, CurvatureVector(y)).in_cone;
      };
      double lo = 0.0, hi = 4.0;
      if (in_cone_scaled(hi)) {
        lo = hi;
      } else {
        for (int it = 0; it < 40; ++it) {
          const double mid = 0.5 * (lo + hi);
          (in_cone_scaled(mid) ? lo : hi) = mid;
        }
      }
      const double s = lo * rng.uniform(0.3, 0.995);
      x.tail(m) = -s * tail;
      std::sort(x.data(), x.data() + n, std::greater<double>());
    }

    const double sk = elementary_symmetric(k, x);
    if (!(sk > 0.0)) continue;
    if (!cone_test(k, CurvatureVector(x)).in_cone) continue;

    // positive rescaling keeps the cone and moves sigma_k exactly onto the
    // target (drawn strictly inside [N0, N1])
    const double target =
        c.sigma_k_lo + (c.sigma_k_hi - c.sigma_k_lo) * (0.001 + 0.998 * rng.uniform());
    const double t = std::pow(target / sk, 1.0 / double(k));
    SmallVec y = t * x;
    if (y[0] < c.kappa1_min) {
      anis = std::min(anis * 1.15, 1e12);
      continue;
    }
    return CurvatureVector(y);
  }
  throw SamplingError("sample_cone: rejection budget exhausted");
}

// ---------------------------------------------------------------------------
// Classical sigma_k inequality suite

struct LemmaCheck {
  bool holds = true;
  double slack = std::numeric_limits<double>::infinity();  // min LHS - RHS
};

struct LemmaReport {
  LemmaCheck product_lower;    // sigma_l >= kappa_1...kappa_l, l < k
  LemmaCheck product_upper;    // sigma_k <= C(n,k) kappa_1...kappa_k
  LemmaCheck negative_entry;   // -kappa_i < (n-k) kappa_1 / k for kappa_i <= 0
  LemmaCheck weighted_square;  // sum sigma_{k-1}(kappa|i) kappa_i^2 >= (k/n) sigma_1 sigma_k
  LemmaCheck pairwise;         // |sigma_{k-1}(kappa|ij)| <= sqrt(k(n-k)/(n-1)) sigma_{k-1}(kappa|j)
  double deleted_kth_ratio = 0.0;  // sigma_{k-1}(kappa|k) / sigma_{k-1}(kappa), recorded only
  bool all_pass() const {
    return product_lower.holds && product_upper.holds && negative_entry.holds &&
           weighted_square.holds && pairwise.holds;
  }
};

namespace detail {
// Strict inequalities become non-strict at symmetric points; tolerate
// round-off relative to the magnitudes involved.
inline void fold_check(LemmaCheck& c, double lhs, double rhs) {
  const double slack = lhs - rhs;
  if (slack < c.slack) c.slack = slack;
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  if (slack < -1e-11 * scale) c.holds = false;
}
}  // namespace detail

/// Evaluates the classical sigma_k inequalities on a cone vector and
/// reports pass/fail with the worst slack per inequality. All of them are
/// theorems on the cone, so any failure flags an implementation bug.
inline LemmaReport lemma_suite(int k, const CurvatureVector& kappa) {
  detail::require_k_range(k, kappa.n(), "lemma_suite");
  if (!cone_test(k, kappa).in_cone)
    throw PreconditionError("lemma_suite: kappa outside the Gårding cone");

  const int n = kappa.n();
  const SmallVec& x = kappa.values();
  LemmaReport rep;

  double head_product = 1.0;
  for (int l = 1; l < k; ++l) {
    head_product *= x[l - 1];
    detail::fold_check(rep.product_lower, elementary_symmetric(l, x), head_product);
  }
  head_product *= x[k - 1];
  detail::fold_check(rep.product_upper, binomial(n, k) * head_product,
                     elementary_symmetric(k, x));

  for (int i = 0; i < n; ++i)
    if (x[i] <= 0.0)
      detail::fold_check(rep.negative_entry, double(n - k) * x[0] / double(k), -x[i]);

  const SmallVec grad = sigma_gradient(k, kappa);
  double weighted = 0.0;
  for (int i = 0; i < n; ++i) weighted += grad[i] * x[i] * x[i];
  detail::fold_check(rep.weighted_square, weighted,
                     (double(k) / double(n)) * elementary_symmetric(1, x) *
                         elementary_symmetric(k, x));

  const double pair_const = std::sqrt(double(k) * double(n - k) / double(n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // sorted descending, so kappa_i >= kappa_j and j is the deleted index
      const double lhs = pair_const * detail::sigma_without(k - 1, x, j);
      const double rhs = std::abs(detail::sigma_without2(k - 1, x, i, j));
      detail::fold_check(rep.pairwise, lhs, rhs);
    }

  rep.deleted_kth_ratio =
      detail::sigma_without(k - 1, x, k - 1) / elementary_symmetric(k - 1, x);
  return rep;
}

}  // namespace wcurv

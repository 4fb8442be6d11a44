#pragma once

#include <cstdint>
#include <utility>

#include "wcurv/symfunc.hpp"

namespace wcurv {

/// Parameter set for the quadratic-form positivity check in the n < 2k
/// regime: kappa ranges over the cone slab N0 <= sigma_k <= N1 with
/// kappa_1 >= B; K weights the rank-one gradient term.
struct ConjectureInstance {
  int n = 3;
  int k = 2;
  double K = 1.0;
  double B = 0.0;
  double N0 = 1.0;
  double N1 = 10.0;

  void validate() const;
};

struct FormReport {
  double min_eigenvalue = 0.0;
  SmallVec worst_kappa;
  long long samples_tested = 0;
  long long refinement_steps = 0;
};

/// Matrix M of the quadratic form
///   kappa_1 (K (sum_j s^jj xi_j)^2 - s^{pp,qq} xi_p xi_q)
///   - s^{11} xi_1^2 + sum_{j>1} a_j xi_j^2,
/// with a_j = s^jj + (kappa_1 + kappa_j) s^{11,jj}; here s^jj and s^{pp,qq}
/// are the first and second sigma_k derivatives at kappa.
SmallMat conjecture_form_matrix(const CurvatureVector& kappa, int k, double K);

/// Multistart minimization of the smallest eigenvalue of the form matrix
/// over the constraint set, by derivative-free coordinate descent with
/// shrinking steps; proposals are projected back by rescaling. Deterministic
/// given the seed (per-start sub-seeds come from a fixed splitting rule).
FormReport conjecture_search(const ConjectureInstance& instance, long long budget,
                             std::uint64_t seed, int threads = 0);

/// (1 - e^{-x}) / x with a series branch near zero; the limit at x -> 0 is 1.
double em1_ratio(double x);

/// Large-kappa_1 pairwise bound: compares
///   2 kappa_i (1 - e^{kappa_j - kappa_i}) / (kappa_i - kappa_j) * s^jj
/// against s^jj + (kappa_i + kappa_j) s^{ii,jj}. Returns (holds, slack);
/// the bound is only guaranteed for kappa_1 large, so callers interpret.
/// Indices are zero-based into the sorted vector.
std::pair<bool, double> pairwise_lemma_check(const CurvatureVector& kappa, int k,
                                             int i, int j);

struct EpsilonDeltaResult {
  double delta = 0.0;
  double min_f = 0.0;
};

/// For eps in (0,1), finds delta < 4 eps with
/// f(x) = x - (1-eps)(1-e^{-x})(x+delta) positive on the sampled range;
/// bisection on delta against a dense log-grid oracle over [1e-6, 1e2]
/// with local refinement at the sampled minimizer (f ~ eps x in the tail).
EpsilonDeltaResult epsilon_delta_search(double eps);

/// The oracle used by epsilon_delta_search, exposed for tests: minimum of
/// f over the log grid plus golden-section refinement near the minimizer.
double epsilon_delta_min_f(double eps, double delta);

}  // namespace wcurv

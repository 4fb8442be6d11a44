#include "wcurv/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

namespace wcurv {

void ConjectureInstance::validate() const {
  if (k < 1 || k > n || n > kMaxDim)
    throw PreconditionError("ConjectureInstance: need 1 <= k <= n <= 8");
  if (n >= 2 * k) throw PreconditionError("ConjectureInstance: requires n < 2k");
  if (!(N0 > 0.0) || N1 < N0 || !(K >= 0.0) || !(B >= 0.0))
    throw PreconditionError("ConjectureInstance: need N0 > 0, N1 >= N0, K, B >= 0");
}

SmallMat conjecture_form_matrix(const CurvatureVector& kappa, int k, double K) {
  if (!cone_test(k, kappa).in_cone || !(kappa[0] > 0.0))
    throw PreconditionError("conjecture_form_matrix: kappa must lie in the cone");
  const int n = kappa.n();
  const double k1 = kappa[0];
  const SmallVec g = sigma_gradient(k, kappa);
  const SmallMat H = sigma_hessian(k, kappa);

  // entrywise construction keeps the matrix symmetric bit-for-bit
  SmallMat M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double m = k1 * (K * (g[i] * g[j]) - H(i, j));
      M(i, j) = m;
      M(j, i) = m;
    }
  M(0, 0) -= g[0];
  for (int j = 1; j < n; ++j) M(j, j) += g[j] + (k1 + kappa[j]) * H(0, j);
  return M;
}

namespace {

struct StartResult {
  double min_eig = std::numeric_limits<double>::infinity();
  SmallVec kappa;
  long long evals = 0;
  long long accepted = 0;
};

double form_min_eig(const CurvatureVector& kappa, int k, double K) {
  const SmallMat M = conjecture_form_matrix(kappa, k, K);
  const auto eig = jacobi_eigen(M);
  return eig.values[eig.values.size() - 1];
}

/// Project a proposal back into the constraint set: sort descending, then
/// rescale so sigma_k lands inside [N0, N1] if it drifted out. Returns
/// false when no admissible rescaling exists.
bool project_to_constraints(SmallVec& x, const ConjectureInstance& inst) {
  std::sort(x.data(), x.data() + x.size(), std::greater<double>());
  const double sk = elementary_symmetric(inst.k, x);
  if (!(sk > 0.0)) return false;
  double t = 1.0;
  if (sk < inst.N0) t = std::pow(inst.N0 / sk, 1.0 / double(inst.k));
  if (sk > inst.N1) t = std::pow(inst.N1 / sk, 1.0 / double(inst.k));
  x *= t;
  if (x[0] < inst.B) return false;
  return cone_test(inst.k, CurvatureVector(x)).in_cone;
}

StartResult run_start(const ConjectureInstance& inst, std::uint64_t sub_seed) {
  StartResult res;
  ConeSampleConstraints c{inst.N0, inst.N1, inst.B};
  CurvatureVector kappa = sample_cone(inst.k, inst.n, sub_seed, c);
  res.kappa = kappa.values();
  res.min_eig = form_min_eig(kappa, inst.k, inst.K);
  res.evals = 1;

  const int n = inst.n;
  double step = 0.25;
  while (step > 1e-4 && res.evals < 400) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      const double scale = std::max(std::abs(res.kappa[i]), 0.01 * res.kappa[0]);
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        SmallVec prop = res.kappa;
        prop[i] += sgn * step * scale;
        if (!project_to_constraints(prop, inst)) continue;
        CurvatureVector pk(prop);
        const double val = form_min_eig(pk, inst.k, inst.K);
        ++res.evals;
        if (val < res.min_eig) {
          res.min_eig = val;
          res.kappa = pk.values();
          ++res.accepted;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return res;
}

}  // namespace

FormReport conjecture_search(const ConjectureInstance& inst, long long budget,
                             std::uint64_t seed, int threads) {
  inst.validate();
  if (budget < 1) throw PreconditionError("conjecture_search: budget >= 1");

  std::vector<StartResult> results(static_cast<std::size_t>(budget));
  int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(budget)));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&](long long lo, long long hi) {
    try {
      for (long long s = lo; s < hi; ++s)
        results[std::size_t(s)] = run_start(inst, split_seed(seed, std::uint64_t(s)));
    } catch (...) {
      const std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (nthreads == 1) {
    worker(0, budget);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (budget + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const long long lo = t * chunk, hi = std::min(budget, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // sequential reduction in start order keeps the report deterministic
  FormReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    rep.samples_tested += r.evals;
    rep.refinement_steps += r.accepted;
    if (r.min_eig < rep.min_eigenvalue) {
      rep.min_eigenvalue = r.min_eig;
      rep.worst_kappa = r.kappa;
    }
  }

  // the witness must satisfy the constraints it was searched under
  CurvatureVector w(rep.worst_kappa);
  const double sk = sigma(inst.k, w);
  const double tol = 1e-9;
  if (!cone_test(inst.k, w).in_cone || sk < inst.N0 * (1.0 - tol) ||
      sk > inst.N1 * (1.0 + tol) || w[0] < inst.B * (1.0 - tol))
    throw InternalError("conjecture_search: witness violates its constraints");
  return rep;
}

double em1_ratio(double x) {
  if (std::abs(x) < 1e-4) {
    // (1 - e^{-x})/x = 1 - x/2 + x^2/6 - x^3/24 + O(x^4)
    return 1.0 + x * (-0.5 + x * (1.0 / 6.0 - x / 24.0));
  }
  return -std::expm1(-x) / x;
}

std::pair<bool, double> pairwise_lemma_check(const CurvatureVector& kappa, int k,
                                             int i, int j) {
  const int n = kappa.n();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw PreconditionError("pairwise_lemma_check: need distinct indices in range");
  if (!cone_test(k, kappa).in_cone)
    throw PreconditionError("pairwise_lemma_check: kappa outside the cone");
  const double ki = kappa[i], kj = kappa[j], k1 = kappa[0];
  if (ki == kj)
    throw DegeneratePairError("pairwise_lemma_check: kappa_i == kappa_j");
  if (ki < k1 - std::sqrt(k1) / double(n))
    throw PreconditionError("pairwise_lemma_check: kappa_i below the large-entry hypothesis");

  const SmallVec grad = sigma_gradient(k, kappa);
  const SmallMat hess = sigma_hessian(k, kappa);
  const double lhs = 2.0 * ki * em1_ratio(ki - kj) * grad[j];
  const double rhs = grad[j] + (ki + kj) * hess(i, j);
  return {lhs >= rhs, lhs - rhs};
}

namespace {
double f_eps_delta(double eps, double delta, double x) {
  return x - (1.0 - eps) * (-std::expm1(-x)) * (x + delta);
}
}  // namespace

double epsilon_delta_min_f(double eps, double delta) {
  constexpr int kGrid = 2000;
  const double lx0 = std::log(1e-6), lx1 = std::log(1e2);
  double best_x = 1e-6, best_f = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double x = std::exp(lx0 + (lx1 - lx0) * double(i) / kGrid);
    const double f = f_eps_delta(eps, delta, x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  // golden-section refinement inside the bracketing grid cells
  const double ratio = std::exp((lx1 - lx0) / kGrid);
  double a = best_x / ratio, b = best_x * ratio;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f_eps_delta(eps, delta, c), fd = f_eps_delta(eps, delta, d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * b; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f_eps_delta(eps, delta, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f_eps_delta(eps, delta, d);
    }
  }
  return std::min({best_f, fc, fd});
}

EpsilonDeltaResult epsilon_delta_search(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw PreconditionError("epsilon_delta_search: need eps in (0,1)");
  // min_f is strictly decreasing in delta; bisect keeping lo feasible
  const double hi_cap = 4.0 * eps * (1.0 - 1e-9);
  double lo = 0.0, hi = hi_cap;
  double lo_min_f = epsilon_delta_min_f(eps, lo);  // delta = 0 is always positive
  if (const double f_hi = epsilon_delta_min_f(eps, hi); f_hi > 1e-12) {
    return {hi, f_hi};
  }
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = epsilon_delta_min_f(eps, mid);
    if (f_mid > 1e-12) {
      lo = mid;
      lo_min_f = f_mid;
    } else {
      hi = mid;
    }
  }
  return {lo, lo_min_f};
}

}  // namespace wcurv

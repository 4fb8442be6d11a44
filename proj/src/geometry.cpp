#include "wcurv/geometry.hpp"

#include <cmath>
#include <mutex>
#include <thread>

namespace wcurv {

void parallel_nodes(Eigen::Index count, int threads,
                    const std::function<void(Eigen::Index)>& fn) {
  int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(count)));
  if (nthreads == 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const Eigen::Index chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const Eigen::Index lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Eigen::Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

GraphDerivatives graph_derivatives(const RadialGraphField& field) {
  const BaseGrid& grid = field.grid;
  const int n = grid.dim;
  const double h = grid.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);
  const Eigen::VectorXd& r = field.r;

  GraphDerivatives out;
  out.grad.assign(std::size_t(grid.size()), SmallVec(n));
  out.hess.assign(std::size_t(grid.size()), SmallMat(n, n));

  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    SmallVec& g = out.grad[std::size_t(u)];
    SmallMat& H = out.hess[std::size_t(u)];
    for (int d = 0; d < n; ++d) {
      const Eigen::Index up = grid.shift(u, d, +1);
      const Eigen::Index dn = grid.shift(u, d, -1);
      g[d] = (r[up] - r[dn]) * inv2h;
      H(d, d) = (r[up] - 2.0 * r[u] + r[dn]) * invh2;
    }
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const Eigen::Index pp = grid.shift(grid.shift(u, a, +1), b, +1);
        const Eigen::Index pm = grid.shift(grid.shift(u, a, +1), b, -1);
        const Eigen::Index mp = grid.shift(grid.shift(u, a, -1), b, +1);
        const Eigen::Index mm = grid.shift(grid.shift(u, a, -1), b, -1);
        const double mixed = (r[pp] - r[pm] - r[mp] + r[mm]) * inv4h2;
        H(a, b) = mixed;
        H(b, a) = mixed;
      }
  }
  return out;
}

HypersurfaceJet make_jet(const WarpProfile& profile, double r, const SmallVec& grad,
                         const SmallMat& hess) {
  const int n = int(grad.size());
  HypersurfaceJet jet;
  jet.grad = grad;
  jet.hess = hess;
  jet.lambda = profile.lambda(r);
  jet.lambda_prime = profile.lambda_prime(r);
  jet.lambda_second = profile.lambda_second(r);
  jet.lambda_sq = jet.lambda * jet.lambda;
  jet.v_sq = jet.lambda_sq + grad.squaredNorm();
  jet.v = std::sqrt(jet.v_sq);
  // tau = lambda^2 / v, written so a flat node gives tau == lambda exactly
  jet.nu_radial = jet.lambda / jet.v;
  jet.tau = jet.lambda * jet.nu_radial;

  const SmallMat outer = grad * grad.transpose();
  jet.g = jet.lambda_sq * SmallMat::Identity(n, n) + outer;
  jet.g_inv = (SmallMat::Identity(n, n) - outer / jet.v_sq) / jet.lambda_sq;
  jet.h_num = -jet.lambda * hess + 2.0 * jet.lambda_prime * outer +
              (jet.lambda_sq * jet.lambda_prime) * SmallMat::Identity(n, n);
  jet.h = jet.h_num / jet.v;

  const SmallMat g_inv_sqrt = symmetric_inverse_sqrt(jet.g);
  jet.shape = g_inv_sqrt * jet.h * g_inv_sqrt;
  jet.kappa = jacobi_eigen(jet.shape).values;
  return jet;
}

std::vector<HypersurfaceJet> compute_jets(const RadialGraphField& field,
                                          const WarpProfile& profile, int threads) {
  const GraphDerivatives der = graph_derivatives(field);
  std::vector<HypersurfaceJet> jets(std::size_t(field.grid.size()));
  parallel_nodes(field.grid.size(), threads, [&](Eigen::Index u) {
    jets[std::size_t(u)] =
        make_jet(profile, field.r[u], der.grad[std::size_t(u)], der.hess[std::size_t(u)]);
  });
  return jets;
}

Eigen::VectorXd laplace_beltrami(const Eigen::VectorXd& f, const BaseGrid& grid,
                                 const std::vector<HypersurfaceJet>& jets) {
  if (f.size() != grid.size() || jets.size() != std::size_t(grid.size()))
    throw ShapeError("laplace_beltrami: mismatched field/jets/grid");
  const int n = grid.dim;
  const double inv2h = 1.0 / (2.0 * grid.spacing());

  // phase 1: fluxes F^i = sqrt(det g) g^{ij} D_j f at every node
  Eigen::MatrixXd flux(grid.size(), n);
  Eigen::VectorXd sqrt_det(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    const HypersurfaceJet& jet = jets[std::size_t(u)];
    sqrt_det[u] = std::sqrt(jet.g.determinant());
    SmallVec df(n);
    for (int d = 0; d < n; ++d)
      df[d] = (f[grid.shift(u, d, +1)] - f[grid.shift(u, d, -1)]) * inv2h;
    const SmallVec fl = sqrt_det[u] * (jet.g_inv * df);
    for (int d = 0; d < n; ++d) flux(u, d) = fl[d];
  }

  // phase 2: centered divergence of the flux
  Eigen::VectorXd lap(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    double div = 0.0;
    for (int d = 0; d < n; ++d)
      div += (flux(grid.shift(u, d, +1), d) - flux(grid.shift(u, d, -1), d)) * inv2h;
    lap[u] = div / sqrt_det[u];
  }
  return lap;
}

double lambda_identity_error(const RadialGraphField& field, const WarpProfile& profile,
                             const std::vector<HypersurfaceJet>& jets) {
  const BaseGrid& grid = field.grid;
  Eigen::VectorXd Lambda_field(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u)
    Lambda_field[u] = profile.Lambda(field.r[u]);
  const Eigen::VectorXd lap = laplace_beltrami(Lambda_field, grid, jets);

  // trace of g^{-1} (lambda' g - tau h), with tau h written as
  // (lambda^2 / v^2) h_num so both terms cancel bit-exactly on flat nodes
  double worst = 0.0;
  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    const HypersurfaceJet& jet = jets[std::size_t(u)];
    const double w = jet.lambda_sq / jet.v_sq;
    const SmallMat bracket = jet.lambda_prime * jet.g - w * jet.h_num;
    const double trace = (jet.g_inv * bracket).trace();
    worst = std::max(worst, std::abs(lap[u] - trace));
  }
  return worst;
}

}  // namespace wcurv

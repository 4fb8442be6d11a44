#include "wcurv/operator.hpp"

#include <cmath>

namespace wcurv {

std::string to_string(PsiKind kind) {
  switch (kind) {
    case PsiKind::RadialBeta: return "radial_beta";
    case PsiKind::Angular: return "angular";
    case PsiKind::Tabulated: return "tabulated";
  }
  return "?";
}

PsiKind psi_kind_from_string(const std::string& s) {
  if (s == "radial_beta") return PsiKind::RadialBeta;
  if (s == "angular") return PsiKind::Angular;
  if (s == "tabulated") return PsiKind::Tabulated;
  throw ConfigError("unknown psi kind: " + s);
}

void PsiSpec::validate() const {
  if (k < 1 || k > n) throw ConfigError("PsiSpec: need 1 <= k <= n");
  if (!(r1 < r2)) throw ConfigError("PsiSpec: need r1 < r2");
  if (kind != PsiKind::Tabulated && !(beta_slope > 0.0))
    throw ConfigError("PsiSpec: beta slope must be positive");
  if (kind == PsiKind::Angular && !(eps_angular >= 0.0 && eps_angular < 1.0))
    throw ConfigError("PsiSpec: angular amplitude must lie in [0, 1)");
  if (kind == PsiKind::Tabulated && table.size() != table_grid.size())
    throw ConfigError("PsiSpec: table size does not match its grid");
}

PsiSpec PsiSpec::radial_beta(int n, int k, double r1, double r2, double s_beta) {
  PsiSpec s;
  s.kind = PsiKind::RadialBeta;
  s.n = n;
  s.k = k;
  s.r1 = r1;
  s.r2 = r2;
  s.beta_slope = s_beta;
  s.validate();
  return s;
}

PsiSpec PsiSpec::angular(int n, int k, double r1, double r2, double s_beta,
                         double eps) {
  PsiSpec s = radial_beta(n, k, r1, r2, s_beta);
  s.kind = PsiKind::Angular;
  s.eps_angular = eps;
  s.validate();
  return s;
}

PsiSpec PsiSpec::tabulated(int n, int k, double r1, double r2, BaseGrid grid,
                           Eigen::VectorXd values) {
  PsiSpec s;
  s.kind = PsiKind::Tabulated;
  s.n = n;
  s.k = k;
  s.r1 = r1;
  s.r2 = r2;
  s.table_grid = grid;
  s.table = std::move(values);
  s.validate();
  return s;
}

void HomotopyConfig::validate() const {
  if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("HomotopyConfig: t in [0,1]");
  if (!(phi_slope > 0.0)) throw ConfigError("HomotopyConfig: phi slope > 0");
  if (!(r1 < r2)) throw ConfigError("HomotopyConfig: need r1 < r2");
  if (k < 1 || k > n) throw ConfigError("HomotopyConfig: need 1 <= k <= n");
}

PsiEval psi_eval(const PsiSpec& spec, const WarpProfile& profile, double r,
                 const SmallVec& u, const HypersurfaceJet* /*jet: nu slot, unused*/) {
  PsiEval out;
  out.d_du = SmallVec::Zero(spec.n);

  if (spec.kind == PsiKind::Tabulated) {
    const double h = spec.table_grid.spacing();
    std::array<int, 3> idx{0, 0, 0};
    for (int d = 0; d < spec.table_grid.dim; ++d) {
      const double q = u[d] / h;
      const double nearest = std::round(q);
      if (std::abs(q - nearest) > 1e-9)
        throw InterpolationError("tabulated psi queried off-grid");
      int iq = int(nearest) % spec.table_grid.points;
      if (iq < 0) iq += spec.table_grid.points;
      idx[std::size_t(d)] = iq;
    }
    out.value = spec.table[spec.table_grid.flatten(idx)];
    return out;  // frozen table: zero declared partials
  }

  const double C = binomial(spec.n, spec.k);
  const double zeta = profile.zeta(r);
  const double zeta_k = std::pow(zeta, spec.k);
  const double beta = std::exp(spec.beta_slope * (spec.r_mid() - r));
  const double beta_prime = -spec.beta_slope * beta;
  const double radial = C * zeta_k * beta;
  const double radial_dr =
      C * (double(spec.k) * std::pow(zeta, spec.k - 1) * profile.zeta_prime(r) * beta +
           zeta_k * beta_prime);

  if (spec.kind == PsiKind::RadialBeta) {
    out.value = radial;
    out.d_dr = radial_dr;
    return out;
  }

  // angular: radial * (1 + eps * prod_i cos(u_i))
  double a = 1.0;
  for (int d = 0; d < spec.n; ++d) a *= std::cos(u[d]);
  const double fac = 1.0 + spec.eps_angular * a;
  out.value = radial * fac;
  out.d_dr = radial_dr * fac;
  for (int d = 0; d < spec.n; ++d) {
    double da = -std::sin(u[d]);
    for (int e = 0; e < spec.n; ++e)
      if (e != d) da *= std::cos(u[e]);
    out.d_du[d] = radial * spec.eps_angular * da;
  }
  return out;
}

std::pair<double, double> psi_tilde_eval(const HomotopyConfig& cfg, const PsiSpec& spec,
                                         const WarpProfile& profile, double r,
                                         const SmallVec& u, const HypersurfaceJet* jet) {
  const PsiEval p = psi_eval(spec, profile, r, u, jet);
  const double C = binomial(cfg.n, cfg.k);
  const double zeta = profile.zeta(r);
  const double zeta_k = std::pow(zeta, cfg.k);
  const double phi = cfg.phi(r);
  const double base = phi * C * zeta_k;
  const double base_dr =
      C * (cfg.phi_prime(r) * zeta_k +
           phi * double(cfg.k) * std::pow(zeta, cfg.k - 1) * profile.zeta_prime(r));
  return {cfg.t * p.value + (1.0 - cfg.t) * base,
          cfg.t * p.d_dr + (1.0 - cfg.t) * base_dr};
}

ResidualResult residual_from_jets(const RadialGraphField& field,
                                  const std::vector<HypersurfaceJet>& jets,
                                  const HomotopyConfig& cfg, const PsiSpec& spec,
                                  const WarpProfile& profile) {
  const BaseGrid& grid = field.grid;
  const Eigen::Index size = grid.size();
  ResidualResult res;
  res.F.resize(size);
  res.min_cone_margin = std::numeric_limits<double>::infinity();
  res.min_tau = std::numeric_limits<double>::infinity();
  res.max_kappa = 0.0;
  Eigen::Index worst_node = 0;

  for (Eigen::Index node = 0; node < size; ++node) {
    const HypersurfaceJet& jet = jets[std::size_t(node)];
    CurvatureVector kappa(jet.kappa);
    const double margin = cone_test(cfg.k, kappa).margin;
    if (margin < res.min_cone_margin) {
      res.min_cone_margin = margin;
      worst_node = node;
    }
    res.min_tau = std::min(res.min_tau, jet.tau);
    res.max_kappa = std::max(res.max_kappa, jet.kappa.cwiseAbs().maxCoeff());
    const auto [pt, pt_dr] =
        psi_tilde_eval(cfg, spec, profile, field.r[node], grid.coords(node), &jet);
    (void)pt_dr;
    res.F[node] = elementary_symmetric(cfg.k, jet.kappa) - pt;
  }

  if (!(res.min_cone_margin > 0.0))
    throw AdmissibilityError("residual: field left the Gårding cone", worst_node,
                             jets[std::size_t(worst_node)].kappa);
  res.norm_inf = res.F.cwiseAbs().maxCoeff();
  return res;
}

ResidualResult residual(const RadialGraphField& field, const HomotopyConfig& cfg,
                        const PsiSpec& spec, const WarpProfile& profile, int threads) {
  return residual_from_jets(field, compute_jets(field, profile, threads), cfg, spec,
                            profile);
}

namespace {

/// Newton transform T_{k-1}(A) = sum_{i<k} (-1)^i sigma_{k-1-i} A^i, the
/// derivative of the sum of principal k-minors: d S_k(A) = tr(T dA).
SmallMat newton_transform(int k, const SmallMat& A, const SmallVec& kappa) {
  const int n = int(A.rows());
  SmallMat T = SmallMat::Zero(n, n);
  SmallMat Apow = SmallMat::Identity(n, n);
  double sign = 1.0;
  for (int i = 0; i < k; ++i) {
    T += sign * elementary_symmetric(k - 1 - i, kappa) * Apow;
    if (i + 1 < k) Apow = (Apow * A).eval();
    sign = -sign;
  }
  return T;
}

}  // namespace

Eigen::SparseMatrix<double> jacobian(const RadialGraphField& field,
                                     const HomotopyConfig& cfg, const PsiSpec& spec,
                                     const WarpProfile& profile, int threads) {
  const BaseGrid& grid = field.grid;
  const int n = grid.dim;
  const int k = cfg.k;
  const Eigen::Index size = grid.size();
  const double h = grid.spacing();
  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 1.0 / (4.0 * h * h);

  const std::vector<HypersurfaceJet> jets = compute_jets(field, profile, threads);

  const int per_node = 1 + 2 * n + 2 * n * (n - 1);
  std::vector<Eigen::Triplet<double>> trips(std::size_t(size) * std::size_t(per_node));

  parallel_nodes(size, threads, [&](Eigen::Index node) {
    const HypersurfaceJet& jet = jets[std::size_t(node)];
    const double lam = jet.lambda, lamp = jet.lambda_prime, lams = jet.lambda_second;
    const double v = jet.v;
    const SmallVec& p = jet.grad;

    const SmallMat A = jet.g_inv * jet.h;
    const SmallMat T = newton_transform(k, A, jet.kappa);
    const SmallMat P = T * jet.g_inv;    // symmetric
    const SmallMat AP = A * P;           // symmetric

    const auto [pt, pt_dr] =
        psi_tilde_eval(cfg, spec, profile, field.r[node], grid.coords(node), &jet);
    (void)pt;

    // d v / d rho and the rho-partials of G and H
    const double dv_drho = lam * lamp / v;
    const SmallMat outer = p * p.transpose();
    const SmallMat dG_drho = (2.0 * lam * lamp) * SmallMat::Identity(n, n);
    const SmallMat dHnum_drho = -lamp * jet.hess + 2.0 * lams * outer +
                                (2.0 * lam * lamp * lamp + jet.lambda_sq * lams) *
                                    SmallMat::Identity(n, n);
    const SmallMat dH_drho = dHnum_drho / v - jet.h * (dv_drho / v);
    const double c_rho = (P.cwiseProduct(dH_drho)).sum() -
                         (AP.cwiseProduct(dG_drho)).sum() - pt_dr;

    SmallVec c_grad(n);
    for (int m = 0; m < n; ++m) {
      const double dv_dpm = p[m] / v;
      SmallMat dG = SmallMat::Zero(n, n);
      for (int j = 0; j < n; ++j) {
        dG(m, j) += p[j];
        dG(j, m) += p[j];
      }
      const SmallMat dHnum = 2.0 * lamp * dG;
      const SmallMat dH = dHnum / v - jet.h * (dv_dpm / v);
      c_grad[m] = (P.cwiseProduct(dH)).sum() - (AP.cwiseProduct(dG)).sum();
    }

    // d H / d q_ml = -(lam / v) on the symmetric entry pair
    SmallMat c_hess = SmallMat::Zero(n, n);
    for (int m = 0; m < n; ++m) {
      c_hess(m, m) = -(lam / v) * P(m, m);
      for (int l = m + 1; l < n; ++l) c_hess(m, l) = -(lam / v) * 2.0 * P(m, l);
    }

    // scatter through the stencil weights
    std::size_t slot = std::size_t(node) * std::size_t(per_node);
    double center = c_rho;
    for (int m = 0; m < n; ++m) center += c_hess(m, m) * (-2.0 * invh2);
    trips[slot++] = {int(node), int(node), center};
    for (int m = 0; m < n; ++m) {
      const Eigen::Index up = grid.shift(node, m, +1);
      const Eigen::Index dn = grid.shift(node, m, -1);
      trips[slot++] = {int(node), int(up), c_grad[m] * inv2h + c_hess(m, m) * invh2};
      trips[slot++] = {int(node), int(dn), -c_grad[m] * inv2h + c_hess(m, m) * invh2};
    }
    for (int m = 0; m < n; ++m)
      for (int l = m + 1; l < n; ++l) {
        const double w = c_hess(m, l) * inv4h2;
        const Eigen::Index pp = grid.shift(grid.shift(node, m, +1), l, +1);
        const Eigen::Index pm = grid.shift(grid.shift(node, m, +1), l, -1);
        const Eigen::Index mp = grid.shift(grid.shift(node, m, -1), l, +1);
        const Eigen::Index mm = grid.shift(grid.shift(node, m, -1), l, -1);
        trips[slot++] = {int(node), int(pp), w};
        trips[slot++] = {int(node), int(pm), -w};
        trips[slot++] = {int(node), int(mp), -w};
        trips[slot++] = {int(node), int(mm), w};
      }
  });

  Eigen::SparseMatrix<double> J(size, size);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

Eigen::SparseMatrix<double> jacobian_fd(const RadialGraphField& field,
                                        const HomotopyConfig& cfg, const PsiSpec& spec,
                                        const WarpProfile& profile, double step) {
  const BaseGrid& grid = field.grid;
  const Eigen::Index size = grid.size();
  std::vector<Eigen::Triplet<double>> trips;
  RadialGraphField probe = field;
  for (Eigen::Index j = 0; j < size; ++j) {
    const double delta = step * (1.0 + std::abs(field.r[j]));
    probe.r[j] = field.r[j] + delta;
    const Eigen::VectorXd Fp = residual(probe, cfg, spec, profile).F;
    probe.r[j] = field.r[j] - delta;
    const Eigen::VectorXd Fm = residual(probe, cfg, spec, profile).F;
    probe.r[j] = field.r[j];
    const Eigen::VectorXd col = (Fp - Fm) / (2.0 * delta);
    for (Eigen::Index i = 0; i < size; ++i)
      if (col[i] != 0.0) trips.emplace_back(int(i), int(j), col[i]);
  }
  Eigen::SparseMatrix<double> J(size, size);
  J.setFromTriplets(trips.begin(), trips.end());
  return J;
}

std::string AssumptionAudit::failing() const {
  if (!inner_barrier.holds) return "psi barrier condition at r1";
  if (!outer_barrier.holds) return "psi barrier condition at r2";
  if (!monotone.holds) return "monotonicity of lambda^k psi";
  return "";
}

AssumptionAudit assumption_audit(const PsiSpec& spec, const WarpProfile& profile,
                                 int scan_points) {
  if (spec.kind == PsiKind::Tabulated)
    throw PreconditionError("assumption_audit: radial_beta or angular specs only");
  spec.validate();

  const double C = binomial(spec.n, spec.k);
  // the angular factor 1 + eps a(u) attains its extremes at these nodes
  SmallVec u_plus = SmallVec::Zero(spec.n);
  SmallVec u_minus = SmallVec::Zero(spec.n);
  u_minus[0] = M_PI;

  AssumptionAudit audit;

  auto barrier_slack = [&](double r, bool inner) {
    const double ref = C * std::pow(profile.zeta(r), spec.k);
    double worst = std::numeric_limits<double>::infinity();
    for (const SmallVec* u : {&u_plus, &u_minus}) {
      const double psi = psi_eval(spec, profile, r, *u).value;
      worst = std::min(worst, inner ? psi - ref : ref - psi);
    }
    return worst;
  };
  audit.inner_barrier = {barrier_slack(spec.r1, true) > 0.0,
                         barrier_slack(spec.r1, true), spec.r1};
  audit.outer_barrier = {barrier_slack(spec.r2, false) > 0.0,
                         barrier_slack(spec.r2, false), spec.r2};

  audit.monotone.holds = true;
  audit.monotone.worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i < scan_points; ++i) {
    const double r = spec.r1 + (spec.r2 - spec.r1) * double(i) / scan_points;
    const double lam = profile.lambda(r), lamp = profile.lambda_prime(r);
    for (const SmallVec* u : {&u_plus, &u_minus}) {
      const PsiEval p = psi_eval(spec, profile, r, *u);
      const double ddr = double(spec.k) * std::pow(lam, spec.k - 1) * lamp * p.value +
                         std::pow(lam, spec.k) * p.d_dr;
      const double slack = -ddr;  // want d/dr (lambda^k psi) <= 0
      if (slack < audit.monotone.worst_slack) {
        audit.monotone.worst_slack = slack;
        audit.monotone.worst_r = r;
      }
    }
  }
  audit.monotone.holds = audit.monotone.worst_slack >= 0.0;
  return audit;
}

}  // namespace wcurv

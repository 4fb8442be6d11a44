#pragma once

#include <optional>
#include <string>

#include <Eigen/Sparse>

#include "wcurv/geometry.hpp"

namespace wcurv {

enum class PsiKind { RadialBeta, Angular, Tabulated };

std::string to_string(PsiKind kind);
PsiKind psi_kind_from_string(const std::string& s);

/// Right-hand side psi of sigma_k(kappa) = psi. Presets depend on (r, u)
/// only; the jet argument of psi_eval is the nu-dependence slot of the
/// interface and is unused by presets.
///   radial_beta: C(n,k) zeta(r)^k beta(r),  beta(r) = exp(s_beta (r_mid - r))
///   angular:     radial_beta * (1 + eps a(u)), a(u) = prod_i cos(u_i)
///   tabulated:   frozen grid function of u (manufactured solutions)
struct PsiSpec {
  PsiKind kind = PsiKind::RadialBeta;
  int n = 2;
  int k = 2;
  double r1 = 1.0;
  double r2 = 3.0;
  double beta_slope = 1.0;    // s_beta > 0
  double eps_angular = 0.0;   // angular kind
  BaseGrid table_grid;        // tabulated kind
  Eigen::VectorXd table;      // tabulated kind, one value per node

  double r_mid() const { return 0.5 * (r1 + r2); }
  void validate() const;

  static PsiSpec radial_beta(int n, int k, double r1, double r2, double s_beta);
  static PsiSpec angular(int n, int k, double r1, double r2, double s_beta,
                         double eps);
  static PsiSpec tabulated(int n, int k, double r1, double r2, BaseGrid grid,
                           Eigen::VectorXd values);
};

struct PsiEval {
  double value = 0.0;
  double d_dr = 0.0;
  SmallVec d_du;
};

/// Value and analytic partials of psi at (r, u). Tabulated specs only
/// answer exactly on their grid nodes and declare zero partials.
PsiEval psi_eval(const PsiSpec& spec, const WarpProfile& profile, double r,
                 const SmallVec& u, const HypersurfaceJet* jet = nullptr);

/// Homotopy data: psi_tilde(t, r, u) = t psi + (1 - t) phi(r) C(n,k) zeta^k(r)
/// with phi(r) = exp(s_phi (r_mid - r)), which satisfies phi > 0,
/// phi >= 1 below r1, phi <= 1 above r2 and phi' < 0.
struct HomotopyConfig {
  double t = 1.0;
  double phi_slope = 1.0;  // s_phi > 0
  double r1 = 1.0;
  double r2 = 3.0;
  int n = 2;
  int k = 2;

  double r_mid() const { return 0.5 * (r1 + r2); }
  double phi(double r) const { return std::exp(phi_slope * (r_mid() - r)); }
  double phi_prime(double r) const { return -phi_slope * phi(r); }
  void validate() const;
};

/// psi_tilde and its r-derivative at one point.
std::pair<double, double> psi_tilde_eval(const HomotopyConfig& cfg, const PsiSpec& spec,
                                         const WarpProfile& profile, double r,
                                         const SmallVec& u,
                                         const HypersurfaceJet* jet = nullptr);

struct ResidualResult {
  Eigen::VectorXd F;             // sigma_k(kappa) - psi_tilde per node
  double min_cone_margin = 0.0;
  double min_tau = 0.0;
  double max_kappa = 0.0;        // max |kappa_i| over nodes
  double norm_inf = 0.0;
};

/// Discrete operator F_t[r] on the grid. Throws AdmissibilityError (with
/// the worst node and its kappa) if any node leaves the cone.
ResidualResult residual(const RadialGraphField& field, const HomotopyConfig& cfg,
                        const PsiSpec& spec, const WarpProfile& profile,
                        int threads = 0);

/// Same, reusing a completed jet sweep.
ResidualResult residual_from_jets(const RadialGraphField& field,
                                  const std::vector<HypersurfaceJet>& jets,
                                  const HomotopyConfig& cfg, const PsiSpec& spec,
                                  const WarpProfile& profile);

/// Sparse Jacobian of the residual in r. Rows couple only the 3^n stencil
/// box; entries are assembled from analytic partials of (g, h, v, psi_tilde)
/// with respect to (r, grad r, hess r) composed with the stencil weights.
Eigen::SparseMatrix<double> jacobian(const RadialGraphField& field,
                                     const HomotopyConfig& cfg, const PsiSpec& spec,
                                     const WarpProfile& profile, int threads = 0);

/// Debug fallback: the same matrix by central finite differences of the
/// residual, one probe per node. O(N^n) residual sweeps; small grids only.
Eigen::SparseMatrix<double> jacobian_fd(const RadialGraphField& field,
                                        const HomotopyConfig& cfg, const PsiSpec& spec,
                                        const WarpProfile& profile, double step = 1e-6);

struct ConditionSlack {
  bool holds = false;
  double worst_slack = 0.0;
  double worst_r = 0.0;
};

struct AssumptionAudit {
  ConditionSlack inner_barrier;   // psi > C zeta^k at r1 (worst over u)
  ConditionSlack outer_barrier;   // psi < C zeta^k at r2 (worst over u)
  ConditionSlack monotone;        // d/dr (lambda^k psi) <= 0 on (r1, r2)
  bool all_pass() const {
    return inner_barrier.holds && outer_barrier.holds && monotone.holds;
  }
  std::string failing() const;
};

/// Scans the structural conditions on the annulus for radial_beta/angular
/// specs; report-only.
AssumptionAudit assumption_audit(const PsiSpec& spec, const WarpProfile& profile,
                                 int scan_points = 2000);

}  // namespace wcurv

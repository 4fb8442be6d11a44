#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wcurv/solver.hpp"

namespace wcurv {

/// One-file run configuration with a versioned schema. Every JSON report
/// embeds the resolved form of this document, so runs are self-describing.
struct RunConfig {
  int schema_version = 1;

  int n = 2;
  int k = 2;
  bool enforce_n_lt_2k = true;

  int grid_points = 64;  // N per dimension

  WarpKind warp_kind = WarpKind::Euclidean;
  std::vector<double> warp_coeffs;  // polynomial kind
  double warp_r_lo = 0.0;           // 0 = use the preset default
  double warp_r_hi = 0.0;
  double warp_r_ref = 0.0;          // 0 = use r1

  double r1 = 1.0;
  double r2 = 3.0;

  PsiKind psi_kind = PsiKind::RadialBeta;
  double beta_slope = 1.0;
  double eps_angular = 0.0;

  double phi_slope = 1.0;

  double dt0 = 0.1;
  double dt_min = 1e-4;
  double dt_max = 0.25;
  double newton_tol = 1e-10;
  int newton_max_iters = 30;
  LinearSolverKind linear_solver = LinearSolverKind::Auto;

  double mms_amplitude_factor = 0.15;  // manufactured amplitude / (r2 - r1)

  std::uint64_t seed = 1;
  int threads = 0;  // 0 = auto
  std::string out_dir = "out";

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
  nlohmann::ordered_json to_json() const;

  void validate() const;

  BaseGrid make_grid() const { return BaseGrid(n, grid_points); }
  WarpProfile make_profile() const;  // scans lambda, lambda' > 0 on [r1, r2]
  PsiSpec make_psi() const;
  HomotopyConfig make_homotopy(double t = 1.0) const;
  NewtonOptions make_newton() const;
  ContinuationOptions make_continuation() const;

  /// Manufactured field r_mid + a prod_i sin(u_i) with a = factor (r2 - r1).
  RadialGraphField manufactured_field(const BaseGrid& grid) const;
};

}  // namespace wcurv

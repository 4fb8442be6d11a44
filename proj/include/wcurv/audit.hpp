#pragma once

#include <string>

#include "wcurv/operator.hpp"

namespace wcurv {

/// Quantitative audit of a field against the solver's a priori guards:
/// strict annulus barrier, positive support function, cone membership with
/// margin, bounded curvature, residual size, and the trace identity defect.
struct AuditReport {
  bool c0_ok = false;
  double r_min = 0.0;
  double r_max = 0.0;
  double r1_slack = 0.0;  // r_min - r1
  double r2_slack = 0.0;  // r2 - r_max
  double tau_min = 0.0;
  double kappa_max = 0.0;       // max |kappa_i| over nodes
  double cone_margin_min = 0.0;
  double ellipticity_min = 0.0;  // min eigenvalue of d sigma_k / d shape
  double residual_max = 0.0;
  double lambda_identity_error = 0.0;
  int grid_dim = 0;
  int grid_points = 0;

  bool passes() const { return c0_ok && tau_min > 0.0 && cone_margin_min > 0.0; }
};

/// Recomputes all geometry from scratch (so it can audit ingested fields)
/// and never mutates its inputs. Cone violations are reported, not thrown:
/// the point of the audit is to decide.
AuditReport audit_solution(const RadialGraphField& field, const HomotopyConfig& cfg,
                           const PsiSpec& spec, const WarpProfile& profile,
                           int threads = 0);

/// Writes the field dump: columns u_1..u_n, r, v, tau, kappa_1..kappa_n,
/// sigma_k, cone_margin; one row per node in lexicographic grid order, with
/// a mandatory header. Floats are written round-trip exact.
void dump_field_csv(const std::string& path, const RadialGraphField& field,
                    const WarpProfile& profile, int k, int threads = 0);

/// Reads a field dump back. Validates shape and finiteness only; whether
/// the field is admissible is the auditor's question, not the parser's.
RadialGraphField ingest_field(const std::string& path, const BaseGrid& grid,
                              double r1, double r2);

}  // namespace wcurv

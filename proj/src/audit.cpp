#include "wcurv/audit.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wcurv {

AuditReport audit_solution(const RadialGraphField& field, const HomotopyConfig& cfg,
                           const PsiSpec& spec, const WarpProfile& profile,
                           int threads) {
  AuditReport rep;
  rep.grid_dim = field.grid.dim;
  rep.grid_points = field.grid.points;
  rep.r_min = field.r.minCoeff();
  rep.r_max = field.r.maxCoeff();
  rep.r1_slack = rep.r_min - field.r1;
  rep.r2_slack = field.r2 - rep.r_max;
  rep.c0_ok = rep.r1_slack > 0.0 && rep.r2_slack > 0.0;

  const std::vector<HypersurfaceJet> jets = compute_jets(field, profile, threads);

  rep.tau_min = std::numeric_limits<double>::infinity();
  rep.cone_margin_min = std::numeric_limits<double>::infinity();
  rep.ellipticity_min = std::numeric_limits<double>::infinity();
  rep.kappa_max = 0.0;
  rep.residual_max = 0.0;
  for (Eigen::Index node = 0; node < field.grid.size(); ++node) {
    const HypersurfaceJet& jet = jets[std::size_t(node)];
    CurvatureVector kappa(jet.kappa);
    rep.tau_min = std::min(rep.tau_min, jet.tau);
    rep.kappa_max = std::max(rep.kappa_max, jet.kappa.cwiseAbs().maxCoeff());
    rep.cone_margin_min =
        std::min(rep.cone_margin_min, cone_test(cfg.k, kappa).margin);
    rep.ellipticity_min =
        std::min(rep.ellipticity_min, sigma_gradient(cfg.k, kappa).minCoeff());
    const auto [pt, pt_dr] = psi_tilde_eval(cfg, spec, profile, field.r[node],
                                            field.grid.coords(node), &jet);
    (void)pt_dr;
    rep.residual_max = std::max(
        rep.residual_max, std::abs(elementary_symmetric(cfg.k, jet.kappa) - pt));
  }
  rep.lambda_identity_error = lambda_identity_error(field, profile, jets);
  return rep;
}

void dump_field_csv(const std::string& path, const RadialGraphField& field,
                    const WarpProfile& profile, int k, int threads) {
  const std::vector<HypersurfaceJet> jets = compute_jets(field, profile, threads);
  const BaseGrid& grid = field.grid;
  const int n = grid.dim;

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);

  for (int d = 0; d < n; ++d) std::fprintf(f, "u%d,", d + 1);
  std::fprintf(f, "r,v,tau,");
  for (int d = 0; d < n; ++d) std::fprintf(f, "kappa_%d,", d + 1);
  std::fprintf(f, "sigma_k,cone_margin\n");

  for (Eigen::Index node = 0; node < grid.size(); ++node) {
    const HypersurfaceJet& jet = jets[std::size_t(node)];
    const SmallVec u = grid.coords(node);
    for (int d = 0; d < n; ++d) std::fprintf(f, "%.17g,", u[d]);
    std::fprintf(f, "%.17g,%.17g,%.17g,", field.r[node], jet.v, jet.tau);
    for (int d = 0; d < n; ++d) std::fprintf(f, "%.17g,", jet.kappa[d]);
    CurvatureVector kappa(jet.kappa);
    std::fprintf(f, "%.17g,%.17g\n", elementary_symmetric(k, jet.kappa),
                 cone_test(k, kappa).margin);
  }
  std::fclose(f);
}

RadialGraphField ingest_field(const std::string& path, const BaseGrid& grid,
                              double r1, double r2) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open field dump: " + path);

  const int n = grid.dim;
  const int columns = 2 * n + 5;  // u_1..u_n, r, v, tau, kappa_1..kappa_n, sigma_k, margin
  std::string line;
  if (!std::getline(in, line)) throw IoError("field dump is empty: " + path);
  if (line.rfind("u1", 0) != 0)
    throw IoError("field dump missing the mandatory header row");

  Eigen::VectorXd r(grid.size());
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= grid.size())
      throw ShapeError("field dump has more rows than the configured grid");
    std::stringstream ss(line);
    std::string cell;
    int col = 0;
    double r_value = std::numeric_limits<double>::quiet_NaN();
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw IoError("field dump row " + std::to_string(row + 1) +
                      ": unparsable cell '" + cell + "'");
      if (!std::isfinite(value))
        throw IoError("field dump row " + std::to_string(row + 1) +
                      ": non-finite value in column " + std::to_string(col + 1));
      if (col == n) r_value = value;
      ++col;
    }
    if (col != columns)
      throw ShapeError("field dump row " + std::to_string(row + 1) + ": expected " +
                       std::to_string(columns) + " columns, got " + std::to_string(col));
    r[row++] = r_value;
  }
  if (row != grid.size())
    throw ShapeError("field dump has " + std::to_string(row) + " rows, expected " +
                     std::to_string(grid.size()));
  return RadialGraphField(grid, std::move(r), r1, r2);
}

}  // namespace wcurv

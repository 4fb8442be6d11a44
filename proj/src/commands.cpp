#include "wcurv/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace wcurv {

namespace {

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

std::string ensure_out_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

int exit_for_newton_failure(NewtonStatus status) {
  return status == NewtonStatus::SingularLinearSystem ? exit_code::linear_algebra
                                                      : exit_code::path_failure;
}

}  // namespace

nlohmann::ordered_json trace_to_json(const std::vector<TraceEntry>& trace) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const TraceEntry& e : trace) {
    arr.push_back({{"t", e.t},
                   {"residual_norm", e.residual_norm},
                   {"min_cone_margin", e.min_cone_margin},
                   {"min_tau", e.min_tau},
                   {"max_kappa", e.max_kappa},
                   {"newton_iters", e.newton_iters},
                   {"dt", e.dt}});
  }
  return arr;
}

nlohmann::ordered_json audit_to_json(const AuditReport& rep) {
  nlohmann::ordered_json j;
  j["c0_ok"] = rep.c0_ok;
  j["r_min"] = rep.r_min;
  j["r_max"] = rep.r_max;
  j["r1_slack"] = rep.r1_slack;
  j["r2_slack"] = rep.r2_slack;
  j["tau_min"] = rep.tau_min;
  j["kappa_max"] = rep.kappa_max;
  j["cone_margin_min"] = rep.cone_margin_min;
  j["ellipticity_min"] = rep.ellipticity_min;
  j["residual_max"] = rep.residual_max;
  j["lambda_identity_error"] = rep.lambda_identity_error;
  j["grid"] = {{"dim", rep.grid_dim}, {"points_per_dim", rep.grid_points}};
  j["passes"] = rep.passes();
  return j;
}

int run_solve(const RunConfig& config, std::ostream& log) {
  const WarpProfile profile = config.make_profile();
  const PsiSpec psi = config.make_psi();
  const BaseGrid grid = config.make_grid();

  const AssumptionAudit assumptions = assumption_audit(psi, profile);
  if (!assumptions.all_pass()) {
    log << "structural assumption failed: " << assumptions.failing()
        << " (worst slack " << std::min({assumptions.inner_barrier.worst_slack,
                                         assumptions.outer_barrier.worst_slack,
                                         assumptions.monotone.worst_slack})
        << ")\n";
    return exit_code::input_error;
  }

  const std::string dir = ensure_out_dir(config.out_dir);
  const ContinuationResult run =
      continuation_run(grid, config.make_homotopy(), psi, profile,
                       config.make_continuation());
  write_json(dir + "/trace.json", nlohmann::ordered_json{
                                      {"config", config.to_json()},
                                      {"t_final", run.t_final},
                                      {"reached_target",
                                       run.status == ContinuationStatus::ReachedTarget},
                                      {"trace", trace_to_json(run.trace)}});
  if (run.status != ContinuationStatus::ReachedTarget) {
    log << "continuation stalled at t = " << run.t_final << " (last failure: "
        << to_string(run.last_failure) << ")\n";
    return exit_for_newton_failure(run.last_failure);
  }

  dump_field_csv(dir + "/solution.csv", run.field, profile, config.k, config.threads);
  const AuditReport audit =
      audit_solution(run.field, config.make_homotopy(1.0), psi, profile, config.threads);
  nlohmann::ordered_json audit_json = audit_to_json(audit);
  audit_json["config"] = config.to_json();
  write_json(dir + "/audit.json", audit_json);

  log << "reached t = 1 in " << run.trace.size() - 1 << " accepted steps; "
      << "residual " << run.trace.back().residual_norm << ", min tau " << audit.tau_min
      << ", cone margin " << audit.cone_margin_min << "\n";
  return audit.passes() ? exit_code::ok : exit_code::violation;
}

int run_audit(const RunConfig& config, const std::string& field_csv,
              std::ostream& log) {
  const WarpProfile profile = config.make_profile();
  const PsiSpec psi = config.make_psi();
  const RadialGraphField field =
      ingest_field(field_csv, config.make_grid(), config.r1, config.r2);
  const AuditReport audit =
      audit_solution(field, config.make_homotopy(1.0), psi, profile, config.threads);

  const std::string dir = ensure_out_dir(config.out_dir);
  nlohmann::ordered_json j = audit_to_json(audit);
  j["config"] = config.to_json();
  j["field"] = field_csv;
  write_json(dir + "/audit.json", j);

  log << (audit.passes() ? "audit passed" : "audit found violations") << " (tau_min "
      << audit.tau_min << ", cone margin " << audit.cone_margin_min << ", identity "
      << audit.lambda_identity_error << ")\n";
  return audit.passes() ? exit_code::ok : exit_code::violation;
}

int run_mms(const RunConfig& config, std::ostream& log, MmsOutcome* outcome) {
  const WarpProfile profile = config.make_profile();
  const BaseGrid grid = config.make_grid();
  const RadialGraphField target = config.manufactured_field(grid);

  // freeze psi := sigma_k(kappa) of the manufactured field on this grid
  const std::vector<HypersurfaceJet> jets = compute_jets(target, profile, config.threads);
  Eigen::VectorXd table(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u)
    table[u] = elementary_symmetric(config.k, jets[std::size_t(u)].kappa);
  const PsiSpec psi =
      PsiSpec::tabulated(config.n, config.k, config.r1, config.r2, grid, table);

  const RadialGraphField start =
      RadialGraphField::constant(grid, 0.5 * (config.r1 + config.r2), config.r1,
                                 config.r2);
  // the tabulated right-hand side makes the discrete solution an exact zero,
  // so the corrector can be driven near machine precision
  NewtonOptions newton = config.make_newton();
  newton.tol = std::min(newton.tol, 1e-12);
  const NewtonResult res =
      newton_solve(start, config.make_homotopy(1.0), psi, profile, newton);

  const double max_error =
      res.status == NewtonStatus::Converged
          ? (res.field.r - target.r).cwiseAbs().maxCoeff()
          : std::numeric_limits<double>::quiet_NaN();
  if (outcome) *outcome = {0, max_error, res.iters};

  const std::string dir = ensure_out_dir(config.out_dir);
  write_json(dir + "/mms_report.json",
             nlohmann::ordered_json{{"config", config.to_json()},
                                    {"converged", res.status == NewtonStatus::Converged},
                                    {"newton_status", to_string(res.status)},
                                    {"newton_iters", res.iters},
                                    {"max_error", max_error},
                                    {"residual_norm", res.last.norm_inf}});
  if (res.status != NewtonStatus::Converged) {
    log << "mms solve failed: " << to_string(res.status) << "\n";
    const int code = exit_for_newton_failure(res.status);
    if (outcome) outcome->exit = code;
    return code;
  }
  log << "mms recovered the manufactured field to max error " << max_error << " in "
      << res.iters << " Newton iterations\n";
  return exit_code::ok;
}

int run_lemmas(int n, int k, long long samples, std::uint64_t seed,
               const std::string& out_dir, std::ostream& log) {
  if (k < 1 || k > n || n > kMaxDim) {
    log << "lemmas: need 1 <= k <= n <= 8\n";
    return exit_code::input_error;
  }
  long long violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = -std::numeric_limits<double>::infinity();
  ConeSampleConstraints loose{0.5, 5.0, 0.0};
  for (long long s = 0; s < samples; ++s) {
    const CurvatureVector kappa = sample_cone(k, n, split_seed(seed, std::uint64_t(s)), loose);
    const LemmaReport rep = lemma_suite(k, kappa);
    if (!rep.all_pass()) ++violations;
    worst_slack = std::min({worst_slack, rep.product_lower.slack, rep.product_upper.slack,
                            rep.negative_entry.slack, rep.weighted_square.slack,
                            rep.pairwise.slack});
    ratio_min = std::min(ratio_min, rep.deleted_kth_ratio);
    ratio_max = std::max(ratio_max, rep.deleted_kth_ratio);
  }

  nlohmann::ordered_json eps_table = nlohmann::ordered_json::array();
  bool eps_ok = true;
  for (double eps : {0.01, 0.1, 0.5, 0.9}) {
    const EpsilonDeltaResult r = epsilon_delta_search(eps);
    eps_ok = eps_ok && r.delta < 4.0 * eps && r.min_f > 0.0;
    eps_table.push_back({{"eps", eps}, {"delta", r.delta}, {"min_f", r.min_f}});
  }

  ensure_out_dir(out_dir);
  write_json(out_dir + "/lemmas_report.json",
             nlohmann::ordered_json{
                 {"n", n},
                 {"k", k},
                 {"samples", samples},
                 {"seed", seed},
                 {"violations", violations},
                 {"worst_slack", worst_slack},
                 {"deleted_kth_ratio_range", {ratio_min, ratio_max}},
                 {"epsilon_delta", eps_table}});
  log << "lemma suite: " << violations << " violations over " << samples
      << " cone samples (worst slack " << worst_slack << ")\n";
  return (violations == 0 && eps_ok) ? exit_code::ok : exit_code::violation;
}

int run_conjecture(const ConjectureInstance& instance, long long budget,
                   std::uint64_t seed, int threads, const std::string& out_dir,
                   std::ostream& log) {
  try {
    instance.validate();
  } catch (const PreconditionError& e) {
    log << "conjecture: " << e.what() << "\n";
    return exit_code::input_error;
  }
  const FormReport rep = conjecture_search(instance, budget, seed, threads);

  ensure_out_dir(out_dir);
  std::vector<double> witness(rep.worst_kappa.data(),
                              rep.worst_kappa.data() + rep.worst_kappa.size());
  write_json(out_dir + "/conjecture_report.json",
             nlohmann::ordered_json{
                 {"n", instance.n},
                 {"k", instance.k},
                 {"K", instance.K},
                 {"B", instance.B},
                 {"N0", instance.N0},
                 {"N1", instance.N1},
                 {"budget", budget},
                 {"seed", seed},
                 {"min_eigenvalue", rep.min_eigenvalue},
                 {"worst_kappa", witness},
                 {"samples_tested", rep.samples_tested},
                 {"refinement_steps", rep.refinement_steps}});
  log << "conjecture search: min eigenvalue " << rep.min_eigenvalue << " over "
      << rep.samples_tested << " form evaluations\n";
  // -1e-8 is treated as numerical zero at extreme curvature scales
  return rep.min_eigenvalue >= -1e-8 ? exit_code::ok : exit_code::violation;
}

int run_sweep(const RunConfig& config, const std::vector<int>& grid_sizes,
              std::ostream& log, std::vector<SweepRow>* rows_out) {
  if (grid_sizes.size() < 3) {
    log << "sweep: need at least 3 grid sizes\n";
    return exit_code::input_error;
  }
  const WarpProfile profile = config.make_profile();
  int n_max = 0;
  for (int N : grid_sizes) n_max = std::max(n_max, N);
  const int n_ref = 4 * n_max;
  for (int N : grid_sizes) {
    if (N < 8 || N % 2 != 0 || n_ref % N != 0) {
      log << "sweep: grid size " << N << " must be even, >= 8 and divide " << n_ref
          << "\n";
      return exit_code::input_error;
    }
  }

  // continuum-manufactured right-hand side: tabulate sigma_k of the
  // manufactured field on a 4x finer reference grid, then restrict
  RunConfig ref_config = config;
  ref_config.grid_points = n_ref;
  const BaseGrid ref_grid = ref_config.make_grid();
  const RadialGraphField ref_target = ref_config.manufactured_field(ref_grid);
  const std::vector<HypersurfaceJet> ref_jets =
      compute_jets(ref_target, profile, config.threads);
  Eigen::VectorXd ref_table(ref_grid.size());
  for (Eigen::Index u = 0; u < ref_grid.size(); ++u)
    ref_table[u] = elementary_symmetric(config.k, ref_jets[std::size_t(u)].kappa);

  std::vector<SweepRow> rows;
  for (int N : grid_sizes) {
    RunConfig local = config;
    local.grid_points = N;
    const BaseGrid grid = local.make_grid();
    const RadialGraphField target = local.manufactured_field(grid);

    const int stride = n_ref / N;
    Eigen::VectorXd table(grid.size());
    for (Eigen::Index u = 0; u < grid.size(); ++u) {
      auto idx = grid.unflatten(u);
      std::array<int, 3> ref_idx{idx[0] * stride, idx[1] * stride, idx[2] * stride};
      table[u] = ref_table[ref_grid.flatten(ref_idx)];
    }
    const PsiSpec psi =
        PsiSpec::tabulated(config.n, config.k, config.r1, config.r2, grid, table);

    const RadialGraphField start = RadialGraphField::constant(
        grid, 0.5 * (config.r1 + config.r2), config.r1, config.r2);
    NewtonOptions newton = local.make_newton();
    newton.tol = std::min(newton.tol, 1e-12);
    const NewtonResult res =
        newton_solve(start, local.make_homotopy(1.0), psi, profile, newton);
    if (res.status != NewtonStatus::Converged) {
      log << "sweep: solve failed at N = " << N << ": " << to_string(res.status) << "\n";
      return exit_for_newton_failure(res.status);
    }

    SweepRow row;
    row.N = N;
    row.max_error = (res.field.r - target.r).cwiseAbs().maxCoeff();
    row.identity_error =
        lambda_identity_error(target, profile, compute_jets(target, profile, config.threads));
    rows.push_back(row);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0) {
      rows[i].error_order = nan;
      rows[i].identity_order = nan;
      continue;
    }
    const double scale = std::log(double(rows[i].N) / double(rows[i - 1].N));
    if (scale == 0.0) {
      log << "sweep: repeated grid size " << rows[i].N << ", order undefined (NaN)\n";
      rows[i].error_order = nan;
      rows[i].identity_order = nan;
      continue;
    }
    rows[i].error_order = std::log(rows[i - 1].max_error / rows[i].max_error) / scale;
    rows[i].identity_order =
        std::log(rows[i - 1].identity_error / rows[i].identity_error) / scale;
  }

  const std::string dir = ensure_out_dir(config.out_dir);
  std::FILE* f = std::fopen((dir + "/sweep.csv").c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + dir + "/sweep.csv");
  std::fprintf(f, "N,max_error,error_order,identity_error,identity_order\n");
  for (const SweepRow& row : rows)
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g\n", row.N, row.max_error,
                 row.error_order, row.identity_error, row.identity_order);
  std::fclose(f);

  write_json(dir + "/sweep_report.json",
             nlohmann::ordered_json{{"config", config.to_json()},
                                    {"reference_points_per_dim", n_ref}});
  for (const SweepRow& row : rows)
    log << "N = " << row.N << ": error " << row.max_error << " (order "
        << row.error_order << "), identity " << row.identity_error << " (order "
        << row.identity_order << ")\n";
  if (rows_out) *rows_out = rows;
  return exit_code::ok;
}

}  // namespace wcurv

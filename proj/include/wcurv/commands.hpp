#pragma once

#include <iosfwd>
#include <vector>

#include "wcurv/audit.hpp"
#include "wcurv/config.hpp"
#include "wcurv/inequality.hpp"

namespace wcurv {

/// Stable process exit contract shared by every subcommand.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int violation = 2;      // an estimate or inequality failed
inline constexpr int input_error = 3;    // config, file or precondition problem
inline constexpr int path_failure = 4;   // continuation/Newton did not finish
inline constexpr int linear_algebra = 5; // singular or failed linear solve
}  // namespace exit_code

nlohmann::ordered_json trace_to_json(const std::vector<TraceEntry>& trace);
nlohmann::ordered_json audit_to_json(const AuditReport& report);

/// solve: homotopy run to t = 1; writes solution.csv, trace.json, audit.json.
int run_solve(const RunConfig& config, std::ostream& log);

/// audit: ingest a field dump and audit it against the configured setup.
int run_audit(const RunConfig& config, const std::string& field_csv, std::ostream& log);

struct MmsOutcome {
  int exit = 0;
  double max_error = 0.0;
  int newton_iters = 0;
};

/// mms: manufactured-solution verification of the discrete operator.
int run_mms(const RunConfig& config, std::ostream& log, MmsOutcome* outcome = nullptr);

/// lemmas: bulk inequality suite over cone samples plus the eps-delta scan.
int run_lemmas(int n, int k, long long samples, std::uint64_t seed,
               const std::string& out_dir, std::ostream& log);

/// conjecture: multistart quadratic-form search; exit 2 with a witness when
/// a confidently negative eigenvalue shows up.
int run_conjecture(const ConjectureInstance& instance, long long budget,
                   std::uint64_t seed, int threads, const std::string& out_dir,
                   std::ostream& log);

struct SweepRow {
  int N = 0;
  double max_error = 0.0;
  double error_order = 0.0;  // NaN on the first row or repeated N
  double identity_error = 0.0;
  double identity_order = 0.0;
};

/// sweep: convergence study against a continuum-manufactured field, with
/// psi tabulated on a reference grid 4x finer than the largest request.
int run_sweep(const RunConfig& config, const std::vector<int>& grid_sizes,
              std::ostream& log, std::vector<SweepRow>* rows_out = nullptr);

}  // namespace wcurv

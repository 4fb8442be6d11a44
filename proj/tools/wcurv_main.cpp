#include <iostream>

#include <CLI11.hpp>

#include "wcurv/commands.hpp"

namespace {

struct Overrides {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

void apply(const Overrides& ov, wcurv::RunConfig& config) {
  if (!ov.out_dir.empty()) config.out_dir = ov.out_dir;
  if (ov.seed_set) config.seed = ov.seed;
  if (ov.threads >= 0) config.threads = ov.threads;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for prescribed sigma_k curvature graphs "
               "in warped products"};
  app.require_subcommand(1);

  Overrides ov;
  app.add_option("--out", ov.out_dir, "override the output directory");
  app.add_option("--seed", ov.seed, "override the rng seed")
      ->each([&](const std::string&) { ov.seed_set = true; });
  app.add_option("--threads", ov.threads, "worker threads (0 = auto)");

  std::string config_path;
  std::string field_path;
  std::vector<int> sweep_sizes;

  auto* solve = app.add_subcommand("solve", "homotopy continuation to t = 1");
  solve->add_option("--config", config_path, "JSON run configuration")->required();

  auto* audit = app.add_subcommand("audit", "audit a field dump");
  audit->add_option("--config", config_path, "JSON run configuration")->required();
  audit->add_option("--field", field_path, "field dump CSV")->required();

  auto* mms = app.add_subcommand("mms", "manufactured-solution verification");
  mms->add_option("--config", config_path, "JSON run configuration")->required();

  auto* sweep = app.add_subcommand("sweep", "grid-refinement convergence study");
  sweep->add_option("--config", config_path, "JSON run configuration")->required();
  sweep->add_option("--N", sweep_sizes, "grid sizes (at least 3)")
      ->required()
      ->expected(-1);

  int lem_n = 3, lem_k = 2;
  long long lem_samples = 100000;
  std::uint64_t lem_seed = 1;
  std::string plain_out = "out";
  auto* lemmas = app.add_subcommand("lemmas", "bulk sigma_k inequality suite");
  lemmas->add_option("--n", lem_n, "ambient dimension")->required();
  lemmas->add_option("--k", lem_k, "curvature order")->required();
  lemmas->add_option("--samples", lem_samples, "number of cone samples");
  lemmas->add_option("--lemmas-seed", lem_seed, "sampling seed");

  wcurv::ConjectureInstance inst;
  long long budget = 10000;
  std::uint64_t conj_seed = 1;
  auto* conjecture =
      app.add_subcommand("conjecture", "quadratic-form positivity search");
  conjecture->add_option("--n", inst.n, "ambient dimension")->required();
  conjecture->add_option("--k", inst.k, "curvature order")->required();
  conjecture->add_option("--K", inst.K, "gradient-term weight");
  conjecture->add_option("--B", inst.B, "kappa_1 floor");
  conjecture->add_option("--N0", inst.N0, "sigma_k lower bound");
  conjecture->add_option("--N1", inst.N1, "sigma_k upper bound");
  conjecture->add_option("--budget", budget, "number of multistart points");
  conjecture->add_option("--conjecture-seed", conj_seed, "search seed");

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    if (*lemmas) {
      const std::string dir = ov.out_dir.empty() ? plain_out : ov.out_dir;
      const std::uint64_t seed = ov.seed_set ? ov.seed : lem_seed;
      return wcurv::run_lemmas(lem_n, lem_k, lem_samples, seed, dir, std::cout);
    }
    if (*conjecture) {
      const std::string dir = ov.out_dir.empty() ? plain_out : ov.out_dir;
      const std::uint64_t seed = ov.seed_set ? ov.seed : conj_seed;
      const int threads = ov.threads >= 0 ? ov.threads : 0;
      return wcurv::run_conjecture(inst, budget, seed, threads, dir, std::cout);
    }

    wcurv::RunConfig config = wcurv::RunConfig::from_file(config_path);
    apply(ov, config);
    if (*solve) return wcurv::run_solve(config, std::cout);
    if (*audit) return wcurv::run_audit(config, field_path, std::cout);
    if (*mms) return wcurv::run_mms(config, std::cout);
    if (*sweep) return wcurv::run_sweep(config, sweep_sizes, std::cout);
  } catch (const wcurv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return wcurv::exit_code::input_error;
  } catch (const wcurv::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return wcurv::exit_code::input_error;
  } catch (const wcurv::ShapeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return wcurv::exit_code::input_error;
  } catch (const wcurv::PreconditionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return wcurv::exit_code::input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return wcurv::exit_code::path_failure;
  }
  return wcurv::exit_code::input_error;
}

#include "wcurv/config.hpp"

#include <cmath>
#include <fstream>

namespace wcurv {

namespace {
template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}
}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  read_if(j, "schema_version", c.schema_version);
  if (c.schema_version != 1)
    throw ConfigError("unsupported config schema_version");
  read_if(j, "n", c.n);
  read_if(j, "k", c.k);
  read_if(j, "enforce_n_lt_2k", c.enforce_n_lt_2k);
  if (j.contains("grid")) read_if(j.at("grid"), "points_per_dim", c.grid_points);
  if (j.contains("warp")) {
    const auto& w = j.at("warp");
    std::string kind = "euclidean";
    read_if(w, "kind", kind);
    c.warp_kind = warp_kind_from_string(kind);
    read_if(w, "coefficients", c.warp_coeffs);
    read_if(w, "r_lo", c.warp_r_lo);
    read_if(w, "r_hi", c.warp_r_hi);
    read_if(w, "r_ref", c.warp_r_ref);
  }
  if (j.contains("annulus")) {
    read_if(j.at("annulus"), "r1", c.r1);
    read_if(j.at("annulus"), "r2", c.r2);
  }
  if (j.contains("psi")) {
    const auto& p = j.at("psi");
    std::string kind = "radial_beta";
    read_if(p, "kind", kind);
    c.psi_kind = psi_kind_from_string(kind);
    read_if(p, "beta_slope", c.beta_slope);
    read_if(p, "eps_angular", c.eps_angular);
  }
  read_if(j, "phi_slope", c.phi_slope);
  if (j.contains("continuation")) {
    const auto& t = j.at("continuation");
    read_if(t, "dt0", c.dt0);
    read_if(t, "dt_min", c.dt_min);
    read_if(t, "dt_max", c.dt_max);
    read_if(t, "newton_tol", c.newton_tol);
    read_if(t, "newton_max_iters", c.newton_max_iters);
    std::string solver = "auto";
    read_if(t, "linear_solver", solver);
    c.linear_solver = linear_solver_from_string(solver);
  }
  if (j.contains("mms"))
    read_if(j.at("mms"), "amplitude_factor", c.mms_amplitude_factor);
  read_if(j, "seed", c.seed);
  read_if(j, "threads", c.threads);
  read_if(j, "out_dir", c.out_dir);
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = schema_version;
  j["n"] = n;
  j["k"] = k;
  j["enforce_n_lt_2k"] = enforce_n_lt_2k;
  j["grid"] = {{"points_per_dim", grid_points}};
  j["warp"] = {{"kind", to_string(warp_kind)},
               {"coefficients", warp_coeffs},
               {"r_lo", warp_r_lo},
               {"r_hi", warp_r_hi},
               {"r_ref", warp_r_ref}};
  j["annulus"] = {{"r1", r1}, {"r2", r2}};
  j["psi"] = {{"kind", to_string(psi_kind)},
              {"beta_slope", beta_slope},
              {"eps_angular", eps_angular}};
  j["phi_slope"] = phi_slope;
  j["continuation"] = {{"dt0", dt0},
                       {"dt_min", dt_min},
                       {"dt_max", dt_max},
                       {"newton_tol", newton_tol},
                       {"newton_max_iters", newton_max_iters},
                       {"linear_solver", to_string(linear_solver)}};
  j["mms"] = {{"amplitude_factor", mms_amplitude_factor}};
  j["seed"] = seed;
  j["threads"] = threads;
  j["out_dir"] = out_dir;
  return j;
}

void RunConfig::validate() const {
  if (n < 1 || n > 3) throw ConfigError("config: grid dimension n must be 1, 2 or 3");
  if (k < 1 || k > n) throw ConfigError("config: need 1 <= k <= n");
  if (enforce_n_lt_2k && !(n < 2 * k))
    throw ConfigError("config: standing assumption n < 2k violated "
                      "(set enforce_n_lt_2k to false to override)");
  if (grid_points < 8 || grid_points % 2 != 0)
    throw ConfigError("config: grid points_per_dim must be even and >= 8");
  if (!(r1 < r2)) throw ConfigError("config: annulus needs r1 < r2");
  if (warp_kind == WarpKind::SphericalCap && !(r2 < 1.5707963267948966))
    throw ConfigError("config: spherical_cap annulus must end below pi/2");
  if (warp_kind == WarpKind::Polynomial && warp_coeffs.empty())
    throw ConfigError("config: polynomial warp needs coefficients");
  if (!(beta_slope > 0.0)) throw ConfigError("config: psi beta_slope must be > 0");
  if (!(eps_angular >= 0.0 && eps_angular < 1.0))
    throw ConfigError("config: psi eps_angular must lie in [0, 1)");
  if (!(phi_slope > 0.0)) throw ConfigError("config: phi_slope must be > 0");
  if (!(dt_min > 0.0) || !(dt0 >= dt_min) || !(dt_max >= dt0))
    throw ConfigError("config: need 0 < dt_min <= dt0 <= dt_max");
  if (!(newton_tol > 0.0) || newton_max_iters < 1)
    throw ConfigError("config: bad newton settings");
  if (!(mms_amplitude_factor > 0.0) || !(mms_amplitude_factor < 0.5))
    throw ConfigError("config: mms amplitude_factor must lie in (0, 0.5)");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
}

WarpProfile RunConfig::make_profile() const {
  const double lo = warp_r_lo;
  const double hi = warp_r_hi;
  const double ref = warp_r_ref != 0.0 ? warp_r_ref : r1;
  WarpProfile profile = [&] {
    switch (warp_kind) {
      case WarpKind::Euclidean:
        return WarpProfile::euclidean(lo < hi ? Interval{lo, hi} : Interval{1e-8, 1e8},
                                      ref);
      case WarpKind::Hyperbolic:
        return WarpProfile::hyperbolic(
            lo < hi ? Interval{lo, hi} : Interval{1e-8, 700.0}, ref);
      case WarpKind::SphericalCap:
        return WarpProfile::spherical_cap(
            lo < hi ? Interval{lo, hi} : Interval{1e-8, 1.5707963267948966}, ref);
      case WarpKind::Polynomial:
        return WarpProfile::polynomial(
            warp_coeffs, lo < hi ? Interval{lo, hi} : Interval{1e-8, 1e8}, ref);
    }
    throw ConfigError("config: unknown warp kind");
  }();
  if (!profile.domain().contains(r1) || !profile.domain().contains(r2))
    throw ConfigError("config: annulus not contained in the warp domain");
  profile.validate_monotone_positive(r1, r2);
  return profile;
}

PsiSpec RunConfig::make_psi() const {
  switch (psi_kind) {
    case PsiKind::RadialBeta:
      return PsiSpec::radial_beta(n, k, r1, r2, beta_slope);
    case PsiKind::Angular:
      return PsiSpec::angular(n, k, r1, r2, beta_slope, eps_angular);
    case PsiKind::Tabulated:
      throw ConfigError("config: tabulated psi is built by the mms command, "
                        "not from a config file");
  }
  throw ConfigError("config: unknown psi kind");
}

HomotopyConfig RunConfig::make_homotopy(double t) const {
  HomotopyConfig cfg;
  cfg.t = t;
  cfg.phi_slope = phi_slope;
  cfg.r1 = r1;
  cfg.r2 = r2;
  cfg.n = n;
  cfg.k = k;
  cfg.validate();
  return cfg;
}

NewtonOptions RunConfig::make_newton() const {
  NewtonOptions o;
  o.tol = newton_tol;
  o.max_iters = newton_max_iters;
  o.linear_solver = linear_solver;
  o.threads = threads;
  return o;
}

ContinuationOptions RunConfig::make_continuation() const {
  ContinuationOptions o;
  o.dt0 = dt0;
  o.dt_min = dt_min;
  o.dt_max = dt_max;
  o.newton = make_newton();
  return o;
}

RadialGraphField RunConfig::manufactured_field(const BaseGrid& grid) const {
  const double mid = 0.5 * (r1 + r2);
  const double amp = mms_amplitude_factor * (r2 - r1);
  Eigen::VectorXd r(grid.size());
  for (Eigen::Index node = 0; node < grid.size(); ++node) {
    const SmallVec u = grid.coords(node);
    double bump = 1.0;
    for (int d = 0; d < grid.dim; ++d) bump *= std::sin(u[d]);
    r[node] = mid + amp * bump;
  }
  return RadialGraphField(grid, std::move(r), r1, r2);
}

}  // namespace wcurv

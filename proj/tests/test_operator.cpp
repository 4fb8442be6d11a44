#include <doctest.h>

#include "wcurv/operator.hpp"

using namespace wcurv;

namespace {

const WarpProfile kEuclid = WarpProfile::euclidean({0.5, 10.0}, 1.0);

RadialGraphField smooth_field(const BaseGrid& grid, double base, double amp,
                              std::uint64_t seed) {
  // random low-frequency Fourier bump; stays admissible for small amp
  Rng rng(seed);
  const double a1 = rng.uniform(-1.0, 1.0), a2 = rng.uniform(-1.0, 1.0);
  const double b1 = rng.uniform(-1.0, 1.0), b2 = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd r(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    const SmallVec c = grid.coords(u);
    double val = a1 * std::sin(c[0]) + b1 * std::cos(c[0]);
    if (grid.dim > 1) val += a2 * std::sin(c[1]) + b2 * std::cos(c[1] + c[0]);
    r[u] = base + amp * val;
  }
  return RadialGraphField(grid, std::move(r), base - 1.0, base + 1.0);
}

HomotopyConfig homotopy(int n, int k, double t) {
  HomotopyConfig cfg;
  cfg.t = t;
  cfg.phi_slope = 1.0;
  cfg.r1 = 1.0;
  cfg.r2 = 3.0;
  cfg.n = n;
  cfg.k = k;
  return cfg;
}

}  // namespace

TEST_CASE("psi_eval: radial_beta values and derivative checks") {
  const PsiSpec spec = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.0);
  const double r_mid = 2.0;
  const PsiEval at_mid = psi_eval(spec, kEuclid, r_mid, SmallVec::Zero(2));
  CHECK(at_mid.value ==
        doctest::Approx(binomial(2, 2) * std::pow(kEuclid.zeta(r_mid), 2)));

  Rng rng(91);
  for (int s = 0; s < 25; ++s) {
    const double r = rng.uniform(1.1, 2.9);
    SmallVec u(2);
    u << rng.uniform(0.0, 2 * M_PI), rng.uniform(0.0, 2 * M_PI);
    const PsiEval p = psi_eval(spec, kEuclid, r, u);
    const double fd = (psi_eval(spec, kEuclid, r + 1e-6, u).value -
                       psi_eval(spec, kEuclid, r - 1e-6, u).value) /
                      2e-6;
    CHECK(p.d_dr == doctest::Approx(fd).epsilon(1e-7));
    CHECK(p.d_du.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("psi_eval: angular reduces to radial at eps = 0; partials check") {
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.2);
  const PsiSpec degenerate = PsiSpec::angular(2, 2, 1.0, 3.0, 1.2, 0.0);
  const PsiSpec angular = PsiSpec::angular(2, 2, 1.0, 3.0, 1.2, 0.05);
  Rng rng(92);
  for (int s = 0; s < 20; ++s) {
    const double r = rng.uniform(1.1, 2.9);
    SmallVec u(2);
    u << rng.uniform(0.0, 2 * M_PI), rng.uniform(0.0, 2 * M_PI);
    CHECK(psi_eval(degenerate, kEuclid, r, u).value ==
          doctest::Approx(psi_eval(radial, kEuclid, r, u).value).epsilon(1e-15));

    const PsiEval p = psi_eval(angular, kEuclid, r, u);
    for (int d = 0; d < 2; ++d) {
      SmallVec up = u, dn = u;
      up[d] += 1e-6;
      dn[d] -= 1e-6;
      const double fd = (psi_eval(angular, kEuclid, r, up).value -
                         psi_eval(angular, kEuclid, r, dn).value) /
                        2e-6;
      CHECK(p.d_du[d] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("psi_eval: tabulated answers on-grid only") {
  const BaseGrid grid(2, 8);
  Eigen::VectorXd table(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u) table[u] = double(u);
  const PsiSpec tab = PsiSpec::tabulated(2, 2, 1.0, 3.0, grid, table);

  const SmallVec on = grid.coords(13);
  CHECK(psi_eval(tab, kEuclid, 2.0, on).value == 13.0);
  SmallVec off = on;
  off[0] += 0.3 * grid.spacing();
  CHECK_THROWS_AS(psi_eval(tab, kEuclid, 2.0, off), InterpolationError);
}

TEST_CASE("residual vanishes on the constructed exact solutions") {
  const BaseGrid grid(2, 16);
  const RadialGraphField mid = RadialGraphField::constant(grid, 2.0, 1.0, 3.0);

  // t = 0: phi(r_mid) = 1 makes the constant slice exact
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.0);
  const ResidualResult r0 = residual(mid, homotopy(2, 2, 0.0), radial, kEuclid);
  CHECK(r0.norm_inf <= 1e-14);

  // t = 1 with radial_beta: beta(r_mid) = 1 keeps it exact
  const ResidualResult r1 = residual(mid, homotopy(2, 2, 1.0), radial, kEuclid);
  CHECK(r1.norm_inf <= 1e-14);
  CHECK(r1.min_cone_margin > 0.0);
  CHECK(r1.min_tau == doctest::Approx(2.0));

  // manufactured solution: tabulated psi frozen from a non-constant field
  const RadialGraphField star = smooth_field(grid, 2.0, 0.3, 404);
  const auto jets = compute_jets(star, kEuclid);
  Eigen::VectorXd table(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u)
    table[u] = elementary_symmetric(2, jets[std::size_t(u)].kappa);
  const PsiSpec tab = PsiSpec::tabulated(2, 2, 1.0, 3.0, grid, table);
  const ResidualResult rm = residual(star, homotopy(2, 2, 1.0), tab, kEuclid);
  CHECK(rm.norm_inf <= 1e-12);
}

TEST_CASE("residual reports the worst node when admissibility fails") {
  const BaseGrid grid(2, 16);
  Eigen::VectorXd r(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u) {
    const SmallVec c = grid.coords(u);
    r[u] = 2.0 + 1.4 * std::sin(3.0 * c[0]) * std::sin(3.0 * c[1]);
  }
  const RadialGraphField wild(grid, std::move(r), 0.1, 4.5);
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 0.3, 4.0, 1.0);
  HomotopyConfig cfg = homotopy(2, 2, 1.0);
  cfg.r1 = 0.1;
  cfg.r2 = 4.5;
  try {
    residual(wild, cfg, radial, kEuclid);
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    CHECK(e.node >= 0);
    CHECK(e.node < grid.size());
    CHECK(!cone_test(2, CurvatureVector(e.kappa)).in_cone);
  }
}

TEST_CASE("jacobian: matrix-vector products match directional differences") {
  const BaseGrid grid(2, 16);
  const PsiSpec angular = PsiSpec::angular(2, 2, 1.0, 3.0, 1.0, 0.05);
  const HomotopyConfig cfg = homotopy(2, 2, 0.7);
  Rng rng(95);
  for (int trial = 0; trial < 5; ++trial) {
    const RadialGraphField field = smooth_field(grid, 2.0, 0.25, 500 + trial);
    const Eigen::SparseMatrix<double> J = jacobian(field, cfg, angular, kEuclid);
    for (int dir = 0; dir < 4; ++dir) {
      Eigen::VectorXd w(grid.size());
      for (Eigen::Index i = 0; i < grid.size(); ++i) w[i] = rng.normal();
      w /= w.cwiseAbs().maxCoeff();
      const double h = 1e-6;
      RadialGraphField plus = field, minus = field;
      plus.r += h * w;
      minus.r -= h * w;
      const Eigen::VectorXd fd =
          (residual(plus, cfg, angular, kEuclid).F -
           residual(minus, cfg, angular, kEuclid).F) /
          (2.0 * h);
      const Eigen::VectorXd jw = J * w;
      const double rel =
          (jw - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff();
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("jacobian agrees with the finite-difference assembly fallback") {
  const BaseGrid grid(2, 8);
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.0);
  const HomotopyConfig cfg = homotopy(2, 2, 0.5);
  const RadialGraphField field = smooth_field(grid, 2.0, 0.2, 777);

  const Eigen::MatrixXd Ja = Eigen::MatrixXd(jacobian(field, cfg, radial, kEuclid));
  const Eigen::MatrixXd Jf = Eigen::MatrixXd(jacobian_fd(field, cfg, radial, kEuclid));
  const double scale = Ja.cwiseAbs().maxCoeff();
  CHECK((Ja - Jf).cwiseAbs().maxCoeff() <= 1e-6 * scale);
}

TEST_CASE("jacobian structure: stencil sparsity and translation invariance") {
  for (int dim : {1, 2, 3}) {
    const BaseGrid grid(dim, 8);
    const RadialGraphField mid = RadialGraphField::constant(grid, 2.0, 1.0, 3.0);
    const PsiSpec radial = PsiSpec::radial_beta(dim, dim, 1.0, 3.0, 1.0);
    const HomotopyConfig cfg = homotopy(dim, dim, 0.0);
    Eigen::SparseMatrix<double, Eigen::RowMajor> J =
        jacobian(mid, cfg, radial, kEuclid);

    const int box = int(std::pow(3, dim));
    for (Eigen::Index row = 0; row < J.rows(); ++row) {
      int nnz = 0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(J, row); it;
           ++it)
        ++nnz;
      CHECK(nnz <= box + 1);
    }

    // at the constant solution the rows are periodic shifts of one another
    const Eigen::MatrixXd D = Eigen::MatrixXd(J);
    for (Eigen::Index u = 1; u < grid.size(); ++u)
      for (Eigen::Index c = 0; c < grid.size(); ++c) {
        auto iu = grid.unflatten(u);
        auto ic = grid.unflatten(c);
        std::array<int, 3> rel{0, 0, 0};
        for (int d = 0; d < dim; ++d)
          rel[std::size_t(d)] =
              (ic[std::size_t(d)] - iu[std::size_t(d)] + grid.points) % grid.points;
        CHECK(D(u, c) == D(0, grid.flatten(rel)));
      }
  }
}

TEST_CASE("residual is translation-equivariant for radial psi (bitwise)") {
  const BaseGrid grid(2, 16);
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.0);
  const HomotopyConfig cfg = homotopy(2, 2, 0.6);
  const RadialGraphField field = smooth_field(grid, 2.0, 0.25, 808);

  Eigen::VectorXd shifted(grid.size());
  for (Eigen::Index u = 0; u < grid.size(); ++u)
    shifted[grid.shift(grid.shift(u, 0, 5), 1, 2)] = field.r[u];
  const RadialGraphField moved(grid, std::move(shifted), field.r1, field.r2);

  const Eigen::VectorXd F = residual(field, cfg, radial, kEuclid).F;
  const Eigen::VectorXd Fm = residual(moved, cfg, radial, kEuclid).F;
  for (Eigen::Index u = 0; u < grid.size(); ++u)
    CHECK(F[u] == Fm[grid.shift(grid.shift(u, 0, 5), 1, 2)]);
}

TEST_CASE("ellipticity monitor: sigma_k gradient eigenvalues stay positive") {
  const BaseGrid grid(2, 16);
  const RadialGraphField field = smooth_field(grid, 2.0, 0.3, 909);
  for (const HypersurfaceJet& jet : compute_jets(field, kEuclid)) {
    // eigenvalues of d sigma_k / d shape are the gradient entries
    CHECK(sigma_gradient(2, CurvatureVector(jet.kappa)).minCoeff() > 0.0);
  }
}

TEST_CASE("assumption_audit: euclidean radial_beta closed-form slacks") {
  // lambda = r: lambda^k psi = C(n,k) beta(r), so the monotone slack at r is
  // s_beta C(n,k) beta(r), worst near r2 where beta is smallest
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 1.0);
  const AssumptionAudit audit = assumption_audit(radial, kEuclid);
  CHECK(audit.all_pass());
  const double C = binomial(2, 2);
  CHECK(audit.inner_barrier.worst_slack ==
        doctest::Approx(C * (std::exp(1.0) - 1.0) * std::pow(kEuclid.zeta(1.0), 2)));
  CHECK(audit.outer_barrier.worst_slack ==
        doctest::Approx(C * (1.0 - std::exp(-1.0)) * std::pow(kEuclid.zeta(3.0), 2)));
  CHECK(audit.monotone.worst_slack ==
        doctest::Approx(1.0 * C * std::exp(-1.0)).epsilon(1e-2));
}

TEST_CASE("assumption_audit: angular boundary slacks flip with large eps") {
  // conditions hold iff beta(r1)(1 - eps) > 1 and beta(r2)(1 + eps) < 1
  const double ok_eps = 0.05, bad_eps = 0.8;
  CHECK(assumption_audit(PsiSpec::angular(2, 2, 1.0, 3.0, 1.0, ok_eps), kEuclid)
            .all_pass());
  const AssumptionAudit bad =
      assumption_audit(PsiSpec::angular(2, 2, 1.0, 3.0, 1.0, bad_eps), kEuclid);
  CHECK_FALSE(bad.all_pass());
  CHECK_FALSE(bad.inner_barrier.holds);
  CHECK(bad.failing() == "psi barrier condition at r1");
}

TEST_CASE("assumption_audit: warp curvature shifts the monotone condition") {
  const WarpProfile sph = WarpProfile::spherical_cap({0.05, 1.5}, 0.5);
  const PsiSpec radial = PsiSpec::radial_beta(2, 2, 0.4, 1.2, 1.0);
  CHECK(assumption_audit(radial, sph).all_pass());

  // hyperbolic needs the slope to beat k * tanh(r2); a flat slope fails
  const WarpProfile hyp = WarpProfile::hyperbolic({0.05, 5.0}, 0.5);
  const PsiSpec shallow = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 0.05);
  CHECK_FALSE(assumption_audit(shallow, hyp).monotone.holds);
  const PsiSpec steep = PsiSpec::radial_beta(2, 2, 1.0, 3.0, 2.5);
  CHECK(assumption_audit(steep, hyp).all_pass());
}

#include <doctest.h>

#include <bit>

#include "wcurv/symfunc.hpp"

using namespace wcurv;

namespace {

SmallVec vec(std::initializer_list<double> values) {
  SmallVec v(Eigen::Index(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// independent oracle: brute-force subset enumeration; also reports the
// cancellation scale sum |product| so tolerances can respect it
std::pair<double, double> sigma_enum(int k, const SmallVec& x) {
  const int n = int(x.size());
  if (k == 0) return {1.0, 1.0};
  if (k < 0 || k > n) return {0.0, 0.0};
  double total = 0.0, scale = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != k) continue;
    double prod = 1.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= x[i];
    total += prod;
    scale += std::abs(prod);
  }
  return {total, scale};
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("sigma matches hand values and conventions") {
  CHECK(sigma(2, CurvatureVector(vec({1, 1, 1}))) == doctest::Approx(3.0));
  CHECK(sigma(2, CurvatureVector(vec({3, 2, 1}))) == doctest::Approx(11.0));
  CHECK(sigma(3, CurvatureVector(vec({2, 1, 0}))) == doctest::Approx(0.0));
  CurvatureVector kappa(vec({1.5, -0.5}));
  CHECK(sigma(0, kappa) == 1.0);
  CHECK(sigma(5, kappa) == 0.0);
  CHECK(sigma(-1, kappa) == 0.0);
  CHECK_THROWS_AS(sigma(5, kappa, true), DomainError);
  CHECK_THROWS_AS(sigma(-1, kappa, true), DomainError);
}

TEST_CASE("sigma agrees with subset enumeration") {
  Rng rng(20240601);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + int(rng.next_u64() % 8);
    SmallVec x(n);
    for (int i = 0; i < n; ++i) x[i] = 4.0 * rng.normal();
    for (int k = 0; k <= n; ++k) {
      const double dp = elementary_symmetric(k, x);
      const auto [brute, scale] = sigma_enum(k, x);
      CHECK(std::abs(dp - brute) <= 1e-14 * (1.0 + scale));
    }
  }
}

TEST_CASE("CurvatureVector sorts descending and validates") {
  CurvatureVector kappa(vec({1.0, 3.0, 2.0}));
  CHECK(kappa[0] == 3.0);
  CHECK(kappa[1] == 2.0);
  CHECK(kappa[2] == 1.0);
  CHECK_THROWS_AS(CurvatureVector(vec({1.0, std::nan("")})), DomainError);
}

TEST_CASE("sigma_gradient: delete-one values, Euler and count identities") {
  CurvatureVector kappa(vec({3, 2, 1}));
  const SmallVec g = sigma_gradient(2, kappa);
  CHECK(g[0] == doctest::Approx(3.0));
  CHECK(g[1] == doctest::Approx(4.0));
  CHECK(g[2] == doctest::Approx(5.0));

  CHECK(sigma_gradient(1, kappa).isApprox(SmallVec::Ones(3)));

  const SmallVec g2 = sigma_gradient(2, CurvatureVector(vec({2, 1, 1})));
  CHECK(g2[0] == doctest::Approx(2.0));
  CHECK(g2[1] == doctest::Approx(3.0));
  CHECK(g2[2] == doctest::Approx(3.0));

  const std::pair<int, int> cases[] = {{2, 2}, {3, 2}, {3, 3}, {4, 3}, {5, 3}, {8, 5}};
  for (auto [n, k] : cases) {
    for (int s = 0; s < 200; ++s) {
      const CurvatureVector sample = sample_cone(k, n, split_seed(11, s + 1000 * n + k));
      const SmallVec grad = sigma_gradient(k, sample);
      const double euler = grad.dot(sample.values());
      CHECK(rel_err(euler, k * sigma(k, sample)) < 1e-12);
      CHECK(rel_err(grad.sum(), (n - k + 1) * sigma(k - 1, sample)) < 1e-12);
    }
  }
}

TEST_CASE("sigma_gradient matches central finite differences") {
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 4;
    const int k = 2 + trial % 2;
    const CurvatureVector kappa = sample_cone(k, n, split_seed(21, trial));
    const SmallVec grad = sigma_gradient(k, kappa);
    for (int i = 0; i < n; ++i) {
      const double step = 1e-6 * (1.0 + std::abs(kappa[i]));
      SmallVec plus = kappa.values(), minus = kappa.values();
      plus[i] += step;
      minus[i] -= step;
      const double fd =
          (elementary_symmetric(k, plus) - elementary_symmetric(k, minus)) / (2 * step);
      CHECK(rel_err(grad[i], fd) < 1e-6);
    }
  }
}

TEST_CASE("sigma_hessian: values, symmetry, finite differences") {
  // k = 2: every off-diagonal entry is sigma_0 = 1
  const SmallMat H2 = sigma_hessian(2, CurvatureVector(vec({4, 1, -0.5})));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(H2(i, j) == (i == j ? 0.0 : 1.0));

  // deleting the two smallest entries of (3,2,1) leaves sigma_1 = 3
  const SmallMat H3 = sigma_hessian(3, CurvatureVector(vec({1, 2, 3})));
  CHECK(H3(1, 2) == doctest::Approx(3.0));
  CHECK(H3(0, 1) == doctest::Approx(1.0));
  CHECK(H3(0, 2) == doctest::Approx(2.0));

  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 3;
    const int k = 3;
    const CurvatureVector kappa = sample_cone(k, n, split_seed(31, trial));
    const SmallMat H = sigma_hessian(k, kappa);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int j = 0; j < n; ++j) {
      const double step = 1e-6 * (1.0 + std::abs(kappa[j]));
      SmallVec plus = kappa.values(), minus = kappa.values();
      plus[j] += step;
      minus[j] -= step;
      // raw delete-one gradients keep entry order stable under perturbation
      for (int i = 0; i < n; ++i) {
        const double gp = detail::sigma_without(k - 1, plus, i);
        const double gm = detail::sigma_without(k - 1, minus, i);
        CHECK(rel_err(H(i, j), (gp - gm) / (2 * step)) < 1e-5);
      }
    }
  }
}

TEST_CASE("cone_test: membership and normalized margin") {
  const ConeMembership in = cone_test(2, CurvatureVector(vec({1, 1, -0.4})));
  CHECK(in.in_cone);
  CHECK(in.margin == doctest::Approx(std::min(1.6 / 3.0, 0.2 / 3.0)));

  const ConeMembership out = cone_test(2, CurvatureVector(vec({3, 1, -1})));
  CHECK_FALSE(out.in_cone);
  CHECK(out.margin < 0.0);

  CHECK(cone_test(4, CurvatureVector(vec({2, 1, 0.5, 0.1}))).in_cone);
}

TEST_CASE("ellipticity: the sigma_k gradient is positive on the cone") {
  const std::pair<int, int> cases[] = {{3, 2}, {4, 3}, {5, 3}};
  for (auto [n, k] : cases)
    for (int s = 0; s < 500; ++s) {
      const CurvatureVector kappa = sample_cone(k, n, split_seed(41, s + n * 7919));
      CHECK(sigma_gradient(k, kappa).minCoeff() > 0.0);
    }
}

TEST_CASE("sigma_of_shape: spectral cases and the char-poly oracle") {
  const int n = 4, k = 2;
  const double c = 0.7;
  SmallMat S = c * SmallMat::Identity(n, n);
  auto [value, kappa] = sigma_of_shape(k, S);
  CHECK(value == doctest::Approx(binomial(n, k) * c * c));
  CHECK(kappa.values().isApproxToConstant(c, 1e-14));

  SmallMat D = SmallMat::Zero(3, 3);
  D.diagonal() << 3.0, 2.0, 1.0;
  CHECK(sigma_of_shape(2, D).first == doctest::Approx(11.0));

  Rng rng(520);
  for (int trial = 0; trial < 200; ++trial) {
    SmallMat A(3, 3);
    for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = rng.normal();
    SmallMat sym = 0.5 * (A + A.transpose());
    // characteristic-polynomial coefficients of a 3x3 symmetric matrix
    const double s1 = sym.trace();
    const double s2 = 0.5 * (s1 * s1 - (sym * sym).trace());
    const double s3 = sym.determinant();
    CHECK(rel_err(sigma_of_shape(1, sym).first, s1) < 1e-12);
    CHECK(rel_err(sigma_of_shape(2, sym).first, s2) < 1e-12);
    CHECK(rel_err(sigma_of_shape(3, sym).first, s3) < 1e-12);
  }

  SmallMat bad(2, 2);
  bad << 1.0, 2.0, 0.5, 1.0;
  CHECK_THROWS_AS(sigma_of_shape(1, bad), ShapeError);
}

TEST_CASE("sigma_of_shape is invariant under orthogonal conjugation") {
  Rng rng(521);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + int(rng.next_u64() % 5);
    SmallMat G(n, n);
    for (int i = 0; i < n * n; ++i) G(i / n, i % n) = rng.normal();
    const Eigen::MatrixXd dense = G;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(dense);
    const SmallMat Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    SmallVec d(n);
    for (int i = 0; i < n; ++i) d[i] = 3.0 * rng.normal();
    const SmallMat S = Q * d.asDiagonal() * Q.transpose();
    for (int k = 1; k <= n; ++k) {
      const double via_shape = sigma_of_shape(k, S).first;
      const double via_diag = elementary_symmetric(k, d);
      CHECK(rel_err(via_shape, via_diag) < 1e-10);
    }
  }
}

TEST_CASE("jacobi_eigen: diagonal inputs are returned exactly") {
  SmallMat D = SmallMat::Zero(3, 3);
  D.diagonal() << 0.25, 7.5, -1.125;
  const JacobiEigen eig = jacobi_eigen(D);
  CHECK(eig.values[0] == 7.5);
  CHECK(eig.values[1] == 0.25);
  CHECK(eig.values[2] == -1.125);
  CHECK(eig.sweeps == 0);

  SmallMat S(2, 2);
  S << 2.0, 1.0, 1.0, 2.0;
  const JacobiEigen e2 = jacobi_eigen(S);
  CHECK(e2.values[0] == doctest::Approx(3.0));
  CHECK(e2.values[1] == doctest::Approx(1.0));
}

TEST_CASE("sample_cone: determinism, membership, constraints") {
  ConeSampleConstraints c{1.0, 10.0, 0.0};
  const CurvatureVector a = sample_cone(2, 3, 99, c);
  const CurvatureVector b = sample_cone(2, 3, 99, c);
  CHECK(a.values() == b.values());

  for (int s = 0; s < 10000; ++s) {
    const CurvatureVector kappa = sample_cone(2, 3, split_seed(51, s), c);
    CHECK(cone_test(2, kappa).in_cone);
    const double sk = sigma(2, kappa);
    CHECK(sk >= c.sigma_k_lo * (1 - 1e-12));
    CHECK(sk <= c.sigma_k_hi * (1 + 1e-12));
  }

  // binding kappa_1 floor: the proven-regime search configuration
  ConeSampleConstraints hard{1.0, 10.0, 10.0};
  for (int s = 0; s < 200; ++s) {
    const CurvatureVector kappa = sample_cone(2, 3, split_seed(52, s), hard);
    CHECK(kappa[0] >= 10.0);
    CHECK(cone_test(2, kappa).in_cone);
  }

  // k = n never pushes entries negative
  const CurvatureVector gauss = sample_cone(3, 3, 123, c);
  CHECK(gauss[2] > 0.0);

  // sigma_1 = kappa_1 makes these constraints infeasible
  ConeSampleConstraints impossible{1.0, 2.0, 100.0};
  CHECK_THROWS_AS(sample_cone(1, 1, 1, impossible), SamplingError);
}

TEST_CASE("lemma_suite: hand values and the symmetric equality point") {
  const LemmaReport ones = lemma_suite(2, CurvatureVector(vec({1, 1, 1})));
  CHECK(ones.all_pass());
  CHECK(ones.weighted_square.slack == doctest::Approx(0.0).epsilon(1e-12));

  const LemmaReport r = lemma_suite(2, CurvatureVector(vec({3, 2, 1})));
  CHECK(r.all_pass());
  CHECK(r.weighted_square.slack == doctest::Approx(48.0 - 44.0));

  CHECK_THROWS_AS(lemma_suite(2, CurvatureVector(vec({3, 1, -1}))), PreconditionError);
}

TEST_CASE("lemma_suite holds on bulk cone samples") {
  const std::pair<int, int> cases[] = {{3, 2}, {4, 3}, {5, 3}};
  for (auto [n, k] : cases)
    for (int s = 0; s < 3000; ++s) {
      const CurvatureVector kappa = sample_cone(k, n, split_seed(61, s + 100000 * n));
      const LemmaReport rep = lemma_suite(k, kappa);
      CAPTURE(n);
      CAPTURE(k);
      CAPTURE(s);
      CHECK(rep.all_pass());
      CHECK(rep.deleted_kth_ratio > 0.0);
    }
}

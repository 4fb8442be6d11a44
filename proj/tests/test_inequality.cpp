#include <doctest.h>

#include "wcurv/inequality.hpp"

using namespace wcurv;

namespace {

SmallVec vec(std::initializer_list<double> values) {
  SmallVec v(Eigen::Index(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// oracle: the quadratic form evaluated directly from its scalar expression
double form_scalar(const CurvatureVector& kappa, int k, double K, const SmallVec& xi) {
  const int n = kappa.n();
  const SmallVec g = sigma_gradient(k, kappa);
  const SmallMat H = sigma_hessian(k, kappa);
  const double k1 = kappa[0];

  double grad_term = g.dot(xi);
  double hess_term = 0.0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) hess_term += H(p, q) * xi[p] * xi[q];
  double tail = 0.0;
  for (int j = 1; j < n; ++j)
    tail += (g[j] + (k1 + kappa[j]) * H(0, j)) * xi[j] * xi[j];
  return k1 * (K * grad_term * grad_term - hess_term) - g[0] * xi[0] * xi[0] + tail;
}

double min_eig(const SmallMat& M) {
  const auto eig = jacobi_eigen(M);
  return eig.values[eig.values.size() - 1];
}

}  // namespace

TEST_CASE("conjecture_form_matrix: hand-expanded 2x2 case") {
  const CurvatureVector kappa(vec({2, 1}));
  const SmallMat M = conjecture_form_matrix(kappa, 2, 1.0);
  CHECK(M(0, 0) == doctest::Approx(1.0));
  CHECK(M(0, 1) == doctest::Approx(2.0));
  CHECK(M(1, 0) == doctest::Approx(2.0));
  CHECK(M(1, 1) == doctest::Approx(13.0));
  CHECK(min_eig(M) == doctest::Approx(7.0 - std::sqrt(40.0)).epsilon(1e-12));
}

TEST_CASE("conjecture_form_matrix agrees with the scalar form on random xi") {
  Rng rng(7101);
  const std::pair<int, int> cases[] = {{2, 2}, {3, 2}, {4, 3}, {5, 3}};
  for (auto [n, k] : cases) {
    for (int s = 0; s < 25; ++s) {
      const CurvatureVector kappa = sample_cone(k, n, split_seed(71, s + 17 * n));
      const double K = rng.uniform(0.0, 5.0);
      const SmallMat M = conjecture_form_matrix(kappa, k, K);
      CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (int t = 0; t < 100; ++t) {
        SmallVec xi(n);
        for (int i = 0; i < n; ++i) xi[i] = rng.normal();
        const double via_matrix = xi.dot(M * xi);
        const double via_scalar = form_scalar(kappa, k, K, xi);
        const double scale = std::max({1.0, std::abs(via_matrix), std::abs(via_scalar)});
        CHECK(std::abs(via_matrix - via_scalar) <= 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("form matrix commutes with permutations fixing the first index") {
  const int n = 4, k = 3;
  const CurvatureVector kappa(SmallVec(SmallVec::Constant(n, 1.3)));
  const SmallMat M = conjecture_form_matrix(kappa, k, 2.0);
  // swapping any two indices > 0 must leave the matrix invariant
  for (int a = 1; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
      P.setIdentity();
      P.applyTranspositionOnTheRight(a, b);
      const SmallMat conj = P.transpose() * M * P;
      CHECK((conj - M).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("min eigenvalue of the form is nondecreasing in K") {
  for (int s = 0; s < 50; ++s) {
    const CurvatureVector kappa = sample_cone(2, 3, split_seed(72, s));
    double prev = -std::numeric_limits<double>::infinity();
    for (double K : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const double cur = min_eig(conjecture_form_matrix(kappa, 2, K));
      CHECK(cur >= prev - 1e-10);
      prev = cur;
    }
  }
}

TEST_CASE("K = 0 admits negative directions (the first diagonal entry)") {
  // with K = 0 the (1,1) entry is -sigma_k^{11} < 0 on the cone
  ConjectureInstance inst;
  inst.n = 3;
  inst.k = 2;
  inst.K = 0.0;
  inst.B = 10.0;
  inst.N0 = 1.0;
  inst.N1 = 10.0;
  const FormReport rep = conjecture_search(inst, 50, 17);
  CHECK(rep.min_eigenvalue < 0.0);
}

TEST_CASE("conjecture_search: determinism and the proven k >= n-2 regimes") {
  ConjectureInstance inst;
  inst.n = 3;
  inst.k = 2;
  inst.K = 5.0;
  inst.B = 10.0;
  inst.N0 = 1.0;
  inst.N1 = 10.0;

  const FormReport a = conjecture_search(inst, 300, 4242, 2);
  const FormReport b = conjecture_search(inst, 300, 4242, 1);
  CHECK(a.min_eigenvalue == b.min_eigenvalue);
  CHECK(a.worst_kappa == b.worst_kappa);
  CHECK(a.samples_tested == b.samples_tested);
  CHECK(a.min_eigenvalue >= -1e-8);

  inst.n = 4;
  inst.k = 3;
  const FormReport c = conjecture_search(inst, 300, 4242);
  CHECK(c.min_eigenvalue >= -1e-8);

  inst.n = 4;
  inst.k = 2;  // n >= 2k
  CHECK_THROWS_AS(conjecture_search(inst, 10, 1), PreconditionError);
}

TEST_CASE("em1_ratio: series branch agrees with the expm1 form") {
  CHECK(em1_ratio(0.0) == 1.0);
  for (double x : {1e-7, 1e-5, 0.99e-4, 1.01e-4, 2e-4, 0.01, 1.0, 50.0}) {
    CHECK(em1_ratio(x) == doctest::Approx(-std::expm1(-x) / x).epsilon(1e-13));
    CHECK(em1_ratio(-x) == doctest::Approx(-std::expm1(x) / -x).epsilon(1e-13));
  }
}

TEST_CASE("pairwise_lemma_check: far-separated large entries") {
  // sigma_2 = 1 at kappa = (100, 99.9, x): x = (1 - 100*99.9) / (100 + 99.9)
  const double x = (1.0 - 100.0 * 99.9) / (100.0 + 99.9);
  const CurvatureVector kappa(vec({100.0, 99.9, x}));
  REQUIRE(cone_test(2, kappa).in_cone);

  const auto [holds, slack] = pairwise_lemma_check(kappa, 2, 0, 2);
  CHECK(holds);
  CHECK(slack > 0.0);

  CHECK_THROWS_AS(pairwise_lemma_check(kappa, 2, 0, 0), PreconditionError);
  const CurvatureVector tied(vec({5.0, 5.0, 0.1}));
  CHECK_THROWS_AS(pairwise_lemma_check(tied, 2, 0, 1), DegeneratePairError);
  // hypothesis kappa_i >= kappa_1 - sqrt(kappa_1)/n is enforced
  CHECK_THROWS_AS(pairwise_lemma_check(kappa, 2, 2, 1), PreconditionError);
}

TEST_CASE("pairwise slack sweep in kappa_1 stays finite (reported, not asserted)") {
  for (double k1 : {10.0, 100.0, 1000.0}) {
    const double x = (1.0 - k1 * (k1 - 0.1)) / (k1 + (k1 - 0.1));
    const CurvatureVector kappa(vec({k1, k1 - 0.1, x}));
    REQUIRE(cone_test(2, kappa).in_cone);
    const auto [holds, slack] = pairwise_lemma_check(kappa, 2, 0, 2);
    (void)holds;
    CHECK(std::isfinite(slack));
    MESSAGE("kappa_1 = ", k1, ": slack = ", slack);
  }
}

TEST_CASE("epsilon_delta_search: dense-sampling oracle and bounds") {
  // direct oracle check at a hand-picked point
  CHECK(epsilon_delta_min_f(0.5, 1.0) > 0.0);

  for (double eps : {0.01, 0.1, 0.5, 0.9}) {
    const EpsilonDeltaResult r = epsilon_delta_search(eps);
    CHECK(r.delta > 0.0);
    CHECK(r.delta < 4.0 * eps);
    CHECK(r.min_f > 0.0);
    // the returned pair must reproduce under the oracle
    CHECK(epsilon_delta_min_f(eps, r.delta) == doctest::Approx(r.min_f));
  }
  CHECK_THROWS_AS(epsilon_delta_search(0.0), PreconditionError);
  CHECK_THROWS_AS(epsilon_delta_search(1.0), PreconditionError);
}

#include "wcurv/warp.hpp"

#include <cmath>
#include <functional>

namespace wcurv {

std::string to_string(WarpKind kind) {
  switch (kind) {
    case WarpKind::Euclidean: return "euclidean";
    case WarpKind::Hyperbolic: return "hyperbolic";
    case WarpKind::SphericalCap: return "spherical_cap";
    case WarpKind::Polynomial: return "polynomial";
  }
  return "?";
}

WarpKind warp_kind_from_string(const std::string& s) {
  if (s == "euclidean") return WarpKind::Euclidean;
  if (s == "hyperbolic") return WarpKind::Hyperbolic;
  if (s == "spherical_cap") return WarpKind::SphericalCap;
  if (s == "polynomial") return WarpKind::Polynomial;
  throw ConfigError("unknown warp kind: " + s);
}

WarpProfile::WarpProfile(WarpKind kind, std::vector<double> coeffs, Interval I,
                         double r_ref)
    : kind_(kind), coeffs_(std::move(coeffs)), I_(I), r_ref_(r_ref) {
  if (!(I_.lo < I_.hi)) throw ConfigError("WarpProfile: empty domain interval");
  if (!I_.contains(r_ref_)) throw ConfigError("WarpProfile: r_ref outside domain");
}

WarpProfile WarpProfile::euclidean(Interval I, double r_ref) {
  return WarpProfile(WarpKind::Euclidean, {}, I, r_ref);
}
WarpProfile WarpProfile::hyperbolic(Interval I, double r_ref) {
  return WarpProfile(WarpKind::Hyperbolic, {}, I, r_ref);
}
WarpProfile WarpProfile::spherical_cap(Interval I, double r_ref) {
  if (I.hi > 1.5707963267948967)
    throw ConfigError("spherical_cap: domain must stay below pi/2");
  return WarpProfile(WarpKind::SphericalCap, {}, I, r_ref);
}
WarpProfile WarpProfile::polynomial(std::vector<double> coeffs, Interval I,
                                    double r_ref) {
  if (coeffs.empty()) throw ConfigError("polynomial warp: need coefficients");
  return WarpProfile(WarpKind::Polynomial, std::move(coeffs), I, r_ref);
}

void WarpProfile::require_in_domain(double r) const {
  if (!I_.contains(r))
    throw DomainError("warp evaluation outside the profile domain");
}

double WarpProfile::lambda(double r) const {
  require_in_domain(r);
  switch (kind_) {
    case WarpKind::Euclidean: return r;
    case WarpKind::Hyperbolic: return std::sinh(r);
    case WarpKind::SphericalCap: return std::sin(r);
    case WarpKind::Polynomial: {
      double v = 0.0;
      for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * r + *it;
      return v;
    }
  }
  return 0.0;
}

double WarpProfile::lambda_prime(double r) const {
  require_in_domain(r);
  switch (kind_) {
    case WarpKind::Euclidean: return 1.0;
    case WarpKind::Hyperbolic: return std::cosh(r);
    case WarpKind::SphericalCap: return std::cos(r);
    case WarpKind::Polynomial: {
      double v = 0.0;
      for (int j = int(coeffs_.size()) - 1; j >= 1; --j) v = v * r + double(j) * coeffs_[std::size_t(j)];
      return v;
    }
  }
  return 0.0;
}

double WarpProfile::lambda_second(double r) const {
  require_in_domain(r);
  switch (kind_) {
    case WarpKind::Euclidean: return 0.0;
    case WarpKind::Hyperbolic: return std::sinh(r);
    case WarpKind::SphericalCap: return -std::sin(r);
    case WarpKind::Polynomial: {
      double v = 0.0;
      for (int j = int(coeffs_.size()) - 1; j >= 2; --j)
        v = v * r + double(j) * double(j - 1) * coeffs_[std::size_t(j)];
      return v;
    }
  }
  return 0.0;
}

double WarpProfile::zeta_prime(double r) const {
  const double z = zeta(r);
  return lambda_second(r) / lambda(r) - z * z;
}

double WarpProfile::Lambda(double r) const {
  require_in_domain(r);
  switch (kind_) {
    case WarpKind::Euclidean: return 0.5 * (r * r - r_ref_ * r_ref_);
    case WarpKind::Hyperbolic: return std::cosh(r) - std::cosh(r_ref_);
    case WarpKind::SphericalCap: return std::cos(r_ref_) - std::cos(r);
    case WarpKind::Polynomial:
      return adaptive_simpson([this](double s) { return lambda(s); }, r_ref_, r);
  }
  return 0.0;
}

WarpEval WarpProfile::eval(double r) const {
  WarpEval w;
  w.lambda = lambda(r);
  w.lambda_prime = lambda_prime(r);
  w.zeta = w.lambda_prime / w.lambda;
  w.Lambda = Lambda(r);
  return w;
}

void WarpProfile::validate_monotone_positive(double lo, double hi) const {
  if (!(lo < hi) || !I_.contains(lo) || !I_.contains(hi))
    throw ConfigError("warp validation range must sit inside the profile domain");
  constexpr int kScan = 10000;
  for (int i = 0; i <= kScan; ++i) {
    const double r = lo + (hi - lo) * double(i) / kScan;
    if (!(lambda(r) > 0.0))
      throw ConfigError("warp profile: lambda not positive on the annulus");
    if (!(lambda_prime(r) > 0.0))
      throw ConfigError("warp profile: lambda' not positive on the annulus");
  }
}

namespace {
double simpson_step(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double m, double fm, double whole,
                    double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b);
  const double m = 0.5 * (a + b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

}  // namespace wcurv

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wcurv/errors.hpp"
#include "wcurv/types.hpp"

namespace wcurv {

enum class WarpKind { Euclidean, Hyperbolic, SphericalCap, Polynomial };

std::string to_string(WarpKind kind);
WarpKind warp_kind_from_string(const std::string& s);

struct WarpEval {
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double zeta = 0.0;    // lambda' / lambda
  double Lambda = 0.0;  // primitive of lambda from r_ref
};

/// Warp function lambda on an interval I, with derivatives, zeta and the
/// primitive Lambda (measured from r_ref; only derivatives of Lambda matter
/// downstream). Presets: lambda = r, sinh r, sin r; plus polynomials in r.
class WarpProfile {
 public:
  static WarpProfile euclidean(Interval I = {1e-8, 1e8}, double r_ref = 1.0);
  static WarpProfile hyperbolic(Interval I = {1e-8, 700.0}, double r_ref = 1.0);
  static WarpProfile spherical_cap(Interval I = {1e-8, 1.5707963267948966},
                                   double r_ref = 0.5);
  static WarpProfile polynomial(std::vector<double> coeffs, Interval I, double r_ref);

  WarpKind kind() const { return kind_; }
  const Interval& domain() const { return I_; }
  double r_ref() const { return r_ref_; }

  double lambda(double r) const;
  double lambda_prime(double r) const;
  double lambda_second(double r) const;
  double zeta(double r) const { return lambda_prime(r) / lambda(r); }
  double zeta_prime(double r) const;
  double Lambda(double r) const;

  WarpEval eval(double r) const;

  /// Scans [lo, hi] on 10^4 points and rejects the profile unless
  /// lambda > 0 and lambda' > 0 throughout.
  void validate_monotone_positive(double lo, double hi) const;

 private:
  WarpProfile(WarpKind kind, std::vector<double> coeffs, Interval I, double r_ref);
  void require_in_domain(double r) const;

  WarpKind kind_;
  std::vector<double> coeffs_;  // polynomial kind only
  Interval I_;
  double r_ref_;
};

/// Adaptive Simpson quadrature to the given absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

}  // namespace wcurv

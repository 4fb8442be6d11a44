#pragma once

#include <vector>

#include "wcurv/grid.hpp"
#include "wcurv/symfunc.hpp"
#include "wcurv/warp.hpp"

namespace wcurv {

/// Per-node geometry bundle of the radial graph (r(u), u): metric, normal
/// speed v, second fundamental form, symmetrized shape operator and its
/// eigenvalues, support function tau = lambda^2 / v.
struct HypersurfaceJet {
  SmallVec grad;        // r_i
  SmallMat hess;        // r_ij (symmetric by construction)
  double lambda = 0.0;
  double lambda_prime = 0.0;
  double lambda_second = 0.0;
  double lambda_sq = 0.0;   // fl(lambda * lambda)
  double v = 0.0;           // sqrt(lambda^2 + |grad|^2)
  double v_sq = 0.0;        // lambda_sq + |grad|^2 before the square root
  double tau = 0.0;         // lambda * (lambda / v) > 0
  double nu_radial = 0.0;   // lambda / v
  SmallMat g;               // lambda^2 I + grad grad^T
  SmallMat g_inv;
  SmallMat h_num;           // -lambda hess + 2 lambda' grad grad^T + lambda^2 lambda' I
  SmallMat h;               // h_num / v
  SmallMat shape;           // G^{-1/2} H G^{-1/2}
  SmallVec kappa;           // eigenvalues of shape, descending
};

struct GraphDerivatives {
  std::vector<SmallVec> grad;
  std::vector<SmallMat> hess;
};

/// Second-order periodic finite differences of the field: central first
/// derivatives, 3-point second derivatives, 4-point mixed stencil. The
/// mixed entries are written symmetrically from a single evaluation.
GraphDerivatives graph_derivatives(const RadialGraphField& field);

/// Jet from explicit local data (radius, gradient, Hessian); the grid sweep
/// is a map of this over nodes.
HypersurfaceJet make_jet(const WarpProfile& profile, double r, const SmallVec& grad,
                         const SmallMat& hess);

/// Jets at every node. Parallel map; outputs are bitwise independent of the
/// thread count.
std::vector<HypersurfaceJet> compute_jets(const RadialGraphField& field,
                                          const WarpProfile& profile,
                                          int threads = 0);

/// Principal curvatures of a jet, descending.
inline const SmallVec& principal_curvatures(const HypersurfaceJet& jet) {
  return jet.kappa;
}

/// Discrete surface Laplacian: (1/sqrt(det g)) D_i(sqrt(det g) g^{ij} D_j f)
/// with centered conservative differencing. Requires a completed jet sweep.
Eigen::VectorXd laplace_beltrami(const Eigen::VectorXd& f, const BaseGrid& grid,
                                 const std::vector<HypersurfaceJet>& jets);

/// Max-norm defect of the trace identity relating the surface Laplacian of
/// Lambda(r(u)) to the trace of lambda' g - tau h. Exactly zero on constant
/// fields, O(h^2) on smooth ones.
double lambda_identity_error(const RadialGraphField& field, const WarpProfile& profile,
                             const std::vector<HypersurfaceJet>& jets);

/// Shared helper: run fn(node) for node = 0..count-1 on a small pool.
void parallel_nodes(Eigen::Index count, int threads,
                    const std::function<void(Eigen::Index)>& fn);

}  // namespace wcurv

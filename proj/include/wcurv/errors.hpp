#pragma once

#include <stdexcept>
#include <string>

#include "wcurv/types.hpp"

namespace wcurv {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SamplingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegeneratePairError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InterpolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A field left the Gårding cone; carries the worst node and its curvatures.
struct AdmissibilityError : std::runtime_error {
  AdmissibilityError(std::string msg, Eigen::Index node_index, SmallVec node_kappa)
      : std::runtime_error(std::move(msg)), node(node_index), kappa(std::move(node_kappa)) {}
  Eigen::Index node;
  SmallVec kappa;
};

}  // namespace wcurv

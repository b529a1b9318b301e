#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "g2ldp/field.hpp"

namespace g2ldp {

struct CheckLine {
  std::string name;
  bool pass = false;
  double value = 0.0;  ///< worst observed quantity
  double bound = 0.0;  ///< its admissible bound (0 when informational)
  std::string detail;
};

struct OperatorSuiteReport {
  std::vector<CheckLine> lines;
  bool all_pass = true;
  double runtime_seconds = 0.0;
};

/// Randomized verification of the operator identities and bounds on the
/// torus basis: Parseval exactness against grid quadrature, the Poincare
/// chain, the W/V eigen-relation, the generalized-Stokes identity, the
/// filtered-Stokes quadratic identity, the curl bound, skew-symmetry and
/// antisymmetry of the rotational nonlinearity, and the growth of its
/// dual-norm constant between consecutive cutoffs.
OperatorSuiteReport verify_operators(double alpha, double side,
                                     std::span<const int> cutoffs, int samples,
                                     uint64_t seed);

}  // namespace g2ldp

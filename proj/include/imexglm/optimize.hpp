#pragma once

#include <functional>
#include <optional>

#include "imexglm/region.hpp"

namespace imexglm {

struct NelderMeadOptions {
  RealVector steps;             // initial simplex edge per coordinate; empty -> initial_step
  double initial_step = 0.25;
  double diameter_tol = 1e-3;   // stop when the simplex is this small
  std::size_t budget = 200;     // maximum objective evaluations
};

struct NelderMeadResult {
  RealVector x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool budget_exhausted = false;
};

/// Derivative-free minimization with reflection 1, expansion 2,
/// contraction 0.5 and shrink 0.5. Deterministic.
NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& objective, const RealVector& x0,
                             const NelderMeadOptions& opts = {});

struct OptimizeRequest {
  MethodFamily family = MethodFamily::dimsim2;
  std::optional<double> parameter;  // theta / lambda (start value when optimize_parameter)
  bool optimize_parameter = false;  // also search over lambda (dimsim2)
  std::optional<double> alpha;      // unset -> maximize S_E
  RealVector beta0;
  ScanSettings scan;
  NelderMeadOptions nm;
};

struct OptimizeResult {
  RealVector beta;
  std::optional<double> parameter;
  double area = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool budget_exhausted = false;
};

/// Local maximizer of the region area over the extrapolation parameters.
OptimizeResult optimize_beta(const OptimizeRequest& req);

}  // namespace imexglm

#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "imexglm/integrate.hpp"

namespace imexglm {

using ProblemFactory = std::function<std::unique_ptr<SplitProblem>()>;

enum class ErrorMeasure {
  expansion,  // ||y^[N] - sum_k q_k h^k y^(k)(tf)||, needs a derivative oracle
  terminal,   // RMS error of the solution estimate at tf
};

struct ConvergenceCase {
  std::string label;
  ImexScheme scheme;
};

struct ConvergenceOptions {
  ErrorMeasure measure = ErrorMeasure::expansion;
  std::size_t workers = 0;
  double reference_divisor = 64.0;  // h_ref = min(h) / divisor when no exact solution exists
  bool check_reference = true;      // one halving of h_ref; difference must be below 1e-2 of the smallest error
};

struct ConvergenceSeries {
  std::string label;
  int order = 0;
  std::vector<double> h;
  std::vector<double> error;
  double slope = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceSeries> series;
  double reference_h = 0.0;          // 0 when the exact solution was used
  double reference_difference = 0.0; // RMS difference of the halving check
};

/// Least-squares slope of log(error) against log(h). NaN if any error is not positive.
double loglog_slope(std::span<const double> h, std::span<const double> error);

/// Runs every (case, h) pair on a fresh problem from the factory. Runs are
/// independent and spread over workers. h must be a geometric sequence with
/// ratio 2 (either direction).
ConvergenceReport convergence_study(const ProblemFactory& factory, const std::vector<ConvergenceCase>& cases,
                                    const std::vector<double>& hs, const ConvergenceOptions& opts = {});

/// Columns scheme,h,error,slope with 17 significant digits.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);
std::string convergence_json(const ConvergenceReport& report);

}  // namespace imexglm

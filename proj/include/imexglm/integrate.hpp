#pragma once

#include <optional>
#include <vector>

#include "imexglm/extrap.hpp"
#include "imexglm/problems.hpp"

namespace imexglm {

/// Factorization cache for the modified Newton iteration: the Jacobian of g
/// frozen at the entry state of the current step and the LU of I - ha J.
struct StageCache {
  std::optional<BandedMatrix> jacobian;
  std::optional<BandedLu> lu;
  double ha = 0.0;
  std::size_t newton_iterations = 0;
};

/// y holds the r external vectors at time t = t0 + n h; Y and fY the stage
/// values of the previous step (at t + (c_j - 1) h) and f at those stages.
struct StepperState {
  std::size_t n = 0;
  double t = 0.0;
  double h = 0.0;
  std::vector<RealVector> y;
  std::vector<RealVector> Y;
  std::vector<RealVector> fY;
  StageCache cache;
};

/// Number of whole steps of size h needed before the first IMEX step when
/// the starting data has to come from a reference solve.
std::size_t startup_steps(const ImexScheme& scheme);

/// Starting data. With a derivative oracle the state is exact at t0:
/// y = sum_k q_k h^k y^(k)(t0), Y_j = y(t0 + (c_j - 1) h). Otherwise an RK4
/// reference covers [t0, t0 + m h] (m = startup_steps), Y_j are reference
/// values and the derivatives come from finite differences on a 2p+1 point
/// centred stencil with spacing h/2.
StepperState start(SplitProblem& problem, const ImexScheme& scheme, double h);

/// Starting data at t = t0 + n h assembled from given stage values (at
/// t + (c_j - 1) h) and external vectors, with f evaluated at the stages.
StepperState make_state(SplitProblem& problem, const ImexScheme& scheme, std::size_t n, double h,
                        std::vector<RealVector> Y, std::vector<RealVector> y);

/// Solves Y - ha g(t, Y) = rhs. Affine g goes to the problem's direct solver;
/// otherwise modified Newton with the cached Jacobian (relative tolerance
/// 1e-12, at most 50 iterations).
void implicit_stage_solve(SplitProblem& problem, double t, double ha, std::span<const double> rhs,
                          std::span<double> y, StageCache& cache);

/// One IMEX GLM step: stages in order, then the external update.
void step(const ImexScheme& scheme, StepperState& state, SplitProblem& problem);

struct TraceRow {
  std::size_t n = 0;
  double t = 0.0;
  double norm = 0.0;  // Euclidean norm of all external vectors
};

struct IntegrationResult {
  StepperState state;
  std::size_t steps = 0;
  std::vector<TraceRow> trace;
};

/// Steps from the starting data to tf. Throws ValidationError when
/// (tf - t0) / h is not an integer (relative tolerance 1e-9).
IntegrationResult integrate(SplitProblem& problem, const ImexScheme& scheme, double h, bool keep_trace = false);

/// Number of steps (tf - t0) / h; throws unless it is an integer.
std::size_t step_count(double t0, double tf, double h);

/// Stage index with c = 1, if any.
std::optional<std::size_t> unit_stage(const GlmTableau& tab);
/// External component with q_0 = 1 and q_k = 0 for k >= 1, if any.
std::optional<std::size_t> pure_component(const GlmTableau& tab);

/// Approximation of y(t) read from the state: the c = 1 stage, else the pure
/// external component. Throws if the scheme has neither.
RealVector solution_estimate(const ImexScheme& scheme, const StepperState& state);

/// Euclidean norm of y - sum_k q_k h^k y^(k)(t) over all external vectors.
double expansion_error(const SplitProblem& problem, const ImexScheme& scheme, const StepperState& state);

/// Classical RK4 on f + g from (t0, y0) with substeps no longer than h_ref.
/// Returns the states at `times` (any order, all >= t0).
std::vector<RealVector> reference_solve(SplitProblem& problem, std::span<const double> times, double h_ref);

}  // namespace imexglm

#include "imexglm/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace imexglm {

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (a == 0.0) return;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

std::size_t entry_stage(const GlmTableau& tab) {
  return static_cast<std::size_t>(std::max_element(tab.c.begin(), tab.c.end()) - tab.c.begin());
}

}  // namespace

std::size_t startup_steps(const ImexScheme& scheme) {
  return std::max<std::size_t>(1, static_cast<std::size_t>((scheme.base.p + 1) / 2));
}

std::size_t step_count(double t0, double tf, double h) {
  if (!(h > 0.0)) throw ValidationError("step size must be positive");
  const double n = (tf - t0) / h;
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-9 * std::max(1.0, r))
    throw ValidationError("step size " + std::to_string(h) + " does not divide the integration interval");
  return static_cast<std::size_t>(r);
}

StepperState make_state(SplitProblem& problem, const ImexScheme& scheme, std::size_t n, double h,
                        std::vector<RealVector> Y, std::vector<RealVector> y) {
  const std::size_t d = problem.dimension();
  if (Y.size() != scheme.s() || y.size() != scheme.r()) throw ValidationError("make_state: block count mismatch");
  for (const auto& v : Y)
    if (v.size() != d) throw ValidationError("make_state: stage dimension mismatch");
  for (const auto& v : y)
    if (v.size() != d) throw ValidationError("make_state: external dimension mismatch");
  StepperState st;
  st.n = n;
  st.h = h;
  st.t = problem.t0() + static_cast<double>(n) * h;
  st.Y = std::move(Y);
  st.y = std::move(y);
  st.fY.assign(scheme.s(), RealVector(d));
  for (std::size_t j = 0; j < scheme.s(); ++j)
    problem.f(st.t + (scheme.base.c[j] - 1.0) * h, st.Y[j], st.fY[j]);
  return st;
}

StepperState start(SplitProblem& problem, const ImexScheme& scheme, double h) {
  if (!(h > 0.0)) throw ValidationError("start: step size must be positive");
  const GlmTableau& tab = scheme.base;
  const std::size_t s = scheme.s(), r = scheme.r(), d = problem.dimension();
  const int p = tab.p;
  std::vector<RealVector> Y(s), y(r, RealVector(d, 0.0));

  if (problem.has_derivatives()) {
    const double t = problem.t0();
    for (std::size_t j = 0; j < s; ++j) Y[j] = problem.derivative(0, t + (tab.c[j] - 1.0) * h);
    double hk = 1.0;
    for (int k = 0; k <= p; ++k, hk *= h) {
      const RealVector dk = problem.derivative(k, t);
      for (std::size_t i = 0; i < r; ++i) axpy(tab.qvecs[k][i] * hk, dk, y[i]);
    }
    return make_state(problem, scheme, 0, h, std::move(Y), std::move(y));
  }

  const std::size_t m = startup_steps(scheme);
  const double ts = problem.t0() + static_cast<double>(m) * h;
  RealVector times, offsets;
  for (int i = 0; i <= 2 * p; ++i) {
    offsets.push_back((i - p) * 0.5 * h);
    times.push_back(ts + offsets.back());
  }
  for (std::size_t j = 0; j < s; ++j) times.push_back(ts + (tab.c[j] - 1.0) * h);
  const auto ref = reference_solve(problem, times, h / 64.0);
  for (std::size_t j = 0; j < s; ++j) Y[j] = ref[2 * p + 1 + j];

  double hk = 1.0;
  for (int k = 0; k <= p; ++k, hk *= h) {
    RealVector dk(d, 0.0);
    if (k == 0) {
      dk = ref[p];
    } else {
      const RealVector w = fd_weights(offsets, k, 0.0);
      for (int i = 0; i <= 2 * p; ++i) axpy(w[i], ref[i], dk);
    }
    for (std::size_t i = 0; i < r; ++i) axpy(tab.qvecs[k][i] * hk, dk, y[i]);
  }
  return make_state(problem, scheme, m, h, std::move(Y), std::move(y));
}

void implicit_stage_solve(SplitProblem& problem, double t, double ha, std::span<const double> rhs,
                          std::span<double> y, StageCache& cache) {
  if (ha == 0.0) {
    std::copy(rhs.begin(), rhs.end(), y.begin());
    return;
  }
  if (problem.g_is_affine()) {
    problem.solve_affine_stage(t, ha, rhs, y);
    return;
  }
  if (!cache.jacobian) cache.jacobian = problem.g_jacobian(t, y);
  if (!cache.lu || cache.ha != ha) {
    cache.lu.emplace(cache.jacobian->shifted_identity(-ha));
    cache.ha = ha;
  }
  const std::size_t d = rhs.size();
  RealVector gy(d), res(d);
  for (int it = 0; it < 50; ++it) {
    problem.g(t, y, gy);
    for (std::size_t i = 0; i < d; ++i) res[i] = rhs[i] - y[i] + ha * gy[i];
    cache.lu->solve_in_place(res);
    for (std::size_t i = 0; i < d; ++i) y[i] += res[i];
    ++cache.newton_iterations;
    if (max_abs(res) <= 1e-12 * std::max(1.0, max_abs(y))) return;
  }
  throw ConvergenceError("implicit stage: Newton iteration did not converge in 50 iterations at t = " +
                         std::to_string(t));
}

void step(const ImexScheme& scheme, StepperState& state, SplitProblem& problem) {
  const GlmTableau& tab = scheme.base;
  const std::size_t s = scheme.s(), r = scheme.r(), d = problem.dimension();
  const double t = state.t, h = state.h;
  if (state.Y.size() != s || state.y.size() != r || state.fY.size() != s)
    throw ValidationError("step: state does not match the scheme");

  const std::size_t e = entry_stage(tab);
  const double te = t + (tab.c[e] - 1.0) * h;
  if (problem.refreeze(te, state.Y[e]))
    for (std::size_t j = 0; j < s; ++j) problem.f(t + (tab.c[j] - 1.0) * h, state.Y[j], state.fY[j]);
  if (!problem.g_is_affine()) {
    state.cache.jacobian = problem.g_jacobian(te, state.Y[e]);
    state.cache.lu.reset();
  }

  std::vector<RealVector> Yn(s, RealVector(d)), Fn(s, RealVector(d)), Gn(s, RealVector(d));
  RealVector rhs(d);
  for (std::size_t i = 0; i < s; ++i) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t k = 0; k < r; ++k) axpy(tab.U(i, k), state.y[k], rhs);
    for (std::size_t j = 0; j < s; ++j) axpy(h * scheme.abar(i, j), state.fY[j], rhs);
    for (std::size_t j = 0; j < i; ++j) {
      axpy(h * scheme.astar(i, j), Fn[j], rhs);
      axpy(h * tab.A(i, j), Gn[j], rhs);
    }
    const double ti = t + tab.c[i] * h;
    const double ha = h * tab.A(i, i);
    if (ha != 0.0) {
      Yn[i] = state.Y[i];
      implicit_stage_solve(problem, ti, ha, rhs, Yn[i], state.cache);
      for (std::size_t k = 0; k < d; ++k) Gn[i][k] = (Yn[i][k] - rhs[k]) / ha;
    } else {
      Yn[i] = rhs;
      problem.g(ti, Yn[i], Gn[i]);
    }
    problem.f(ti, Yn[i], Fn[i]);
  }

  std::vector<RealVector> yn(r, RealVector(d, 0.0));
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t l = 0; l < r; ++l) axpy(tab.V(k, l), state.y[l], yn[k]);
    for (std::size_t j = 0; j < s; ++j) {
      axpy(h * scheme.bbar(k, j), state.fY[j], yn[k]);
      axpy(h * scheme.bstar(k, j), Fn[j], yn[k]);
      axpy(h * tab.B(k, j), Gn[j], yn[k]);
    }
  }
  state.y = std::move(yn);
  state.Y = std::move(Yn);
  state.fY = std::move(Fn);
  ++state.n;
  state.t = problem.t0() + static_cast<double>(state.n) * h;
}

IntegrationResult integrate(SplitProblem& problem, const ImexScheme& scheme, double h, bool keep_trace) {
  const std::size_t total = step_count(problem.t0(), problem.tf(), h);
  IntegrationResult res;
  res.state = start(problem, scheme, h);
  if (res.state.n >= total) throw ValidationError("integrate: interval shorter than the starting procedure");
  auto record = [&] {
    if (!keep_trace) return;
    double sq = 0.0;
    for (const auto& v : res.state.y)
      for (double x : v) sq += x * x;
    res.trace.push_back({res.state.n, res.state.t, std::sqrt(sq)});
  };
  record();
  while (res.state.n < total) {
    step(scheme, res.state, problem);
    ++res.steps;
    record();
  }
  return res;
}

std::optional<std::size_t> unit_stage(const GlmTableau& tab) {
  for (std::size_t j = 0; j < tab.c.size(); ++j)
    if (std::abs(tab.c[j] - 1.0) < 1e-14) return j;
  return std::nullopt;
}

std::optional<std::size_t> pure_component(const GlmTableau& tab) {
  for (std::size_t i = 0; i < tab.r(); ++i) {
    bool pure = std::abs(tab.qvecs[0][i] - 1.0) < 1e-14;
    for (std::size_t k = 1; pure && k < tab.qvecs.size(); ++k) pure = std::abs(tab.qvecs[k][i]) < 1e-14;
    if (pure) return i;
  }
  return std::nullopt;
}

RealVector solution_estimate(const ImexScheme& scheme, const StepperState& state) {
  if (auto j = unit_stage(scheme.base)) return state.Y[*j];
  if (auto i = pure_component(scheme.base)) return state.y[*i];
  throw ValidationError("solution_estimate: scheme has neither a c = 1 stage nor a pure external component");
}

double expansion_error(const SplitProblem& problem, const ImexScheme& scheme, const StepperState& state) {
  const GlmTableau& tab = scheme.base;
  std::vector<RealVector> target(scheme.r(), RealVector(problem.dimension(), 0.0));
  double hk = 1.0;
  for (int k = 0; k <= tab.p; ++k, hk *= state.h) {
    const RealVector dk = problem.derivative(k, state.t);
    for (std::size_t i = 0; i < scheme.r(); ++i) axpy(tab.qvecs[k][i] * hk, dk, target[i]);
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < scheme.r(); ++i)
    for (std::size_t k = 0; k < target[i].size(); ++k) {
      const double e = state.y[i][k] - target[i][k];
      sq += e * e;
    }
  return std::sqrt(sq);
}

std::vector<RealVector> reference_solve(SplitProblem& problem, std::span<const double> times, double h_ref) {
  if (!(h_ref > 0.0)) throw ValidationError("reference_solve: h_ref must be positive");
  const double t0 = problem.t0();
  for (double t : times)
    if (t < t0) throw ValidationError("reference_solve: requested time before t0");
  std::vector<std::size_t> order(times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  const std::size_t d = problem.dimension();
  RealVector y = problem.initial_state(), k1(d), k2(d), k3(d), k4(d), tmp(d);
  double t = t0;
  std::vector<RealVector> out(times.size());
  for (std::size_t idx : order) {
    const double target = times[idx];
    const double span = target - t;
    if (span > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(span / h_ref - 1e-9));
      const double hs = span / static_cast<double>(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double tk = t + static_cast<double>(k) * hs;
        problem.rhs(tk, y, k1);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * hs * k1[i];
        problem.rhs(tk + 0.5 * hs, tmp, k2);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * hs * k2[i];
        problem.rhs(tk + 0.5 * hs, tmp, k3);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + hs * k3[i];
        problem.rhs(tk + hs, tmp, k4);
        for (std::size_t i = 0; i < d; ++i) y[i] += hs / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      t = target;
    }
    out[idx] = y;
  }
  return out;
}

}  // namespace imexglm

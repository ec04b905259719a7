#include "imexglm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace imexglm {

namespace {

struct Vertex {
  RealVector x;
  double f = 0.0;
};

double diameter(const std::vector<Vertex>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i)
    for (std::size_t k = 0; k < simplex[0].x.size(); ++k)
      d = std::max(d, std::abs(simplex[i].x[k] - simplex[0].x[k]));
  return d;
}

RealVector affine(const RealVector& c, const RealVector& x, double t) {
  RealVector out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = c[k] + t * (x[k] - c[k]);
  return out;
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const RealVector&)>& objective, const RealVector& x0,
                             const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw ValidationError("nelder_mead: empty start vector");
  if (!opts.steps.empty() && opts.steps.size() != n) throw ValidationError("nelder_mead: steps size mismatch");
  if (opts.budget == 0) throw ValidationError("nelder_mead: budget must be positive");

  NelderMeadResult res;
  auto eval = [&](const RealVector& x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  };
  auto out_of_budget = [&] { return res.evaluations >= opts.budget; };

  std::vector<Vertex> simplex;
  simplex.push_back({x0, eval(x0)});
  for (std::size_t k = 0; k < n && !out_of_budget(); ++k) {
    RealVector x = x0;
    x[k] += opts.steps.empty() ? opts.initial_step : opts.steps[k];
    simplex.push_back({x, eval(x)});
  }
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };

  while (simplex.size() == n + 1) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    if (diameter(simplex) < opts.diameter_tol) {
      res.converged = true;
      break;
    }
    if (out_of_budget()) break;

    RealVector centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i].x[k] / static_cast<double>(n);
    Vertex& worst = simplex[n];

    Vertex refl{affine(centroid, worst.x, -1.0), 0.0};
    refl.f = eval(refl.x);
    if (refl.f < simplex[0].f) {
      if (out_of_budget()) {
        worst = refl;
        continue;
      }
      Vertex exp{affine(centroid, worst.x, -2.0), 0.0};
      exp.f = eval(exp.x);
      worst = exp.f < refl.f ? exp : refl;
      continue;
    }
    if (refl.f < simplex[n - 1].f) {
      worst = refl;
      continue;
    }
    if (out_of_budget()) continue;
    const bool outside = refl.f < worst.f;
    Vertex con{affine(centroid, outside ? refl.x : worst.x, 0.5), 0.0};
    con.f = eval(con.x);
    if (con.f < (outside ? refl.f : worst.f)) {
      worst = con;
      continue;
    }
    for (std::size_t i = 1; i <= n && !out_of_budget(); ++i) {
      simplex[i].x = affine(simplex[0].x, simplex[i].x, 0.5);
      simplex[i].f = eval(simplex[i].x);
    }
  }

  const auto best = std::min_element(simplex.begin(), simplex.end(), by_value);
  res.x = best->x;
  res.value = best->f;
  res.budget_exhausted = !res.converged;
  return res;
}

OptimizeResult optimize_beta(const OptimizeRequest& req) {
  const std::size_t nb = beta_count(req.family);
  if (req.beta0.size() != nb)
    throw ValidationError("optimize_beta: expected " + std::to_string(nb) + " starting beta entries");
  if (req.optimize_parameter && req.family != MethodFamily::dimsim2)
    throw ValidationError("optimize_beta: the diagonal parameter can only be searched for dimsim2");

  const bool with_param = req.optimize_parameter;
  RealVector x0;
  if (with_param) x0.push_back(req.parameter.value_or(dimsim2_l_stable_lambda()));
  x0.insert(x0.end(), req.beta0.begin(), req.beta0.end());

  auto unpack = [&](const RealVector& x, std::optional<double>& param, RealVector& beta) {
    param = with_param ? std::optional<double>(x[0]) : req.parameter;
    beta.assign(x.begin() + (with_param ? 1 : 0), x.end());
  };
  auto objective = [&](const RealVector& x) {
    std::optional<double> param;
    RealVector beta;
    unpack(x, param, beta);
    try {
      const ImexScheme sc = make_scheme(req.family, param, beta);
      return -region_area(sc, req.alpha, req.scan).area;
    } catch (const ValidationError&) {
      return 0.0;
    }
  };

  NelderMeadOptions nm = req.nm;
  if (nm.steps.empty()) {
    nm.steps.assign(x0.size(), nm.initial_step);
    if (with_param) nm.steps[0] = 0.02;
  }
  const NelderMeadResult r = nelder_mead(objective, x0, nm);
  OptimizeResult out;
  unpack(r.x, out.parameter, out.beta);
  out.area = -r.value;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  out.budget_exhausted = r.budget_exhausted;
  return out;
}

}  // namespace imexglm

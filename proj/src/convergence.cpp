#include "imexglm/convergence.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "imexglm/parallel.hpp"
#include "json.hpp"

namespace imexglm {

namespace {

double rms_difference(std::span<const double> a, std::span<const double> b) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sq / static_cast<double>(a.size()));
}

}  // namespace

double loglog_slope(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size() || h.size() < 2) throw ValidationError("loglog_slope: need two or more points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(error[i] > 0.0) || !(h[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    sx += std::log(h[i]);
    sy += std::log(error[i]);
  }
  const double n = static_cast<double>(h.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(error[i]) - my);
  }
  return sxy / sxx;
}

ConvergenceReport convergence_study(const ProblemFactory& factory, const std::vector<ConvergenceCase>& cases,
                                    const std::vector<double>& hs, const ConvergenceOptions& opts) {
  if (hs.size() < 2) throw ValidationError("convergence_study: need at least two step sizes");
  if (cases.empty()) throw ValidationError("convergence_study: no schemes given");
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double ratio = hs[i - 1] > hs[i] ? hs[i - 1] / hs[i] : hs[i] / hs[i - 1];
    if (!(std::abs(ratio - 2.0) < 1e-9)) throw ValidationError("convergence_study: step sizes must halve");
  }

  auto probe = factory();
  for (double h : hs) step_count(probe->t0(), probe->tf(), h);
  if (opts.measure == ErrorMeasure::expansion && !probe->has_derivatives())
    throw ValidationError("convergence_study: expansion error needs a derivative oracle");

  ConvergenceReport report;
  RealVector exact_final;
  if (opts.measure == ErrorMeasure::terminal) {
    const double tf[] = {probe->tf()};
    if (probe->has_exact()) {
      exact_final = probe->exact(probe->tf());
    } else {
      double hmin = hs[0];
      for (double h : hs) hmin = std::min(hmin, h);
      report.reference_h = hmin / opts.reference_divisor;
      exact_final = reference_solve(*probe, tf, report.reference_h)[0];
      if (opts.check_reference) {
        auto fresh = factory();
        const RealVector finer = reference_solve(*fresh, tf, 0.5 * report.reference_h)[0];
        report.reference_difference = rms_difference(exact_final, finer);
        exact_final = finer;
      }
    }
  }

  const std::size_t nh = hs.size();
  std::vector<double> errors(cases.size() * nh, 0.0);
  parallel_for(
      cases.size() * nh,
      [&](std::size_t idx, std::size_t) {
        const ConvergenceCase& cs = cases[idx / nh];
        const double h = hs[idx % nh];
        auto problem = factory();
        const IntegrationResult res = integrate(*problem, cs.scheme, h);
        errors[idx] = opts.measure == ErrorMeasure::expansion
                          ? expansion_error(*problem, cs.scheme, res.state)
                          : rms_difference(solution_estimate(cs.scheme, res.state), exact_final);
      },
      opts.workers);

  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    ConvergenceSeries s;
    s.label = cases[c].label;
    s.order = cases[c].scheme.base.p;
    s.h = hs;
    s.error.assign(errors.begin() + static_cast<std::ptrdiff_t>(c * nh),
                   errors.begin() + static_cast<std::ptrdiff_t>((c + 1) * nh));
    s.slope = loglog_slope(s.h, s.error);
    for (double e : s.error) smallest = std::min(smallest, e);
    report.series.push_back(std::move(s));
  }
  if (report.reference_h > 0.0 && opts.check_reference && report.reference_difference > 1e-2 * smallest)
    throw NumericalError("convergence_study: reference not converged (halving difference " +
                         std::to_string(report.reference_difference) + ", smallest error " +
                         std::to_string(smallest) + ")");
  return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  os << "scheme,h,error,slope\n" << std::setprecision(17);
  for (const auto& s : report.series)
    for (std::size_t i = 0; i < s.h.size(); ++i) os << s.label << ',' << s.h[i] << ',' << s.error[i] << ',' << s.slope << '\n';
}

std::string convergence_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["reference_h"] = report.reference_h;
  j["reference_difference"] = report.reference_difference;
  j["series"] = nlohmann::json::array();
  for (const auto& s : report.series)
    j["series"].push_back({{"scheme", s.label}, {"order", s.order}, {"h", s.h}, {"error", s.error}, {"slope", s.slope}});
  return j.dump(2);
}

}  // namespace imexglm

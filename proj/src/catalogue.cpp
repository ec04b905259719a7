#include "imexglm/catalogue.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace imexglm {

namespace {

double newton_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                   double x) {
  for (int it = 0; it < 50; ++it) {
    const double step = f(x) / df(x);
    x -= step;
    if (std::abs(step) <= 1e-17 * std::abs(x)) break;
  }
  return x;
}

// DIMSIM with U = I and V = e v^T, as tabulated: lambda on the diagonal, the
// remaining A entries from the table, the last entry of v adjusted so that
// V e = e holds exactly, q_k from the stage-order conditions and B from the
// Lagrange-integral construction.
GlmTableau tabulated_dimsim(std::string name, RealVector c, RealMatrix a, RealVector v, double lambda) {
  const std::size_t s = c.size();
  for (std::size_t i = 0; i < s; ++i) a(i, i) = lambda;
  double sum = 0.0;
  for (double x : v) sum += x;
  v.back() += 1.0 - sum;

  GlmTableau t;
  t.name = std::move(name);
  t.c = std::move(c);
  t.A = std::move(a);
  t.U = RealMatrix::identity(s);
  t.V = RealMatrix(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) t.V(i, j) = v[j];
  t.p = t.q = static_cast<int>(s);

  t.qvecs.push_back(RealVector(s, 1.0));
  double kf = 1.0;
  for (int k = 1; k <= t.p; ++k) {
    kf *= k;
    RealVector qk = elementwise_power(t.c, k);
    const RealVector ack = t.A * elementwise_power(t.c, k - 1);
    for (std::size_t i = 0; i < s; ++i) qk[i] = (qk[i] - k * ack[i]) / kf;
    t.qvecs.push_back(std::move(qk));
  }
  t.B = build_B(t.A, t.V, t.c);
  t.validate();
  return t;
}

}  // namespace

std::string family_name(MethodFamily f) {
  switch (f) {
    case MethodFamily::theta: return "theta";
    case MethodFamily::dimsim2: return "dimsim2";
    case MethodFamily::dimsim3: return "dimsim3";
    case MethodFamily::dimsim4: return "dimsim4";
  }
  return "unknown";
}

MethodFamily parse_family(std::string_view name) {
  if (name == "theta") return MethodFamily::theta;
  if (name == "dimsim2") return MethodFamily::dimsim2;
  if (name == "dimsim3") return MethodFamily::dimsim3;
  if (name == "dimsim4") return MethodFamily::dimsim4;
  throw ValidationError("unknown method family '" + std::string(name) + "'");
}

GlmTableau theta_method(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ValidationError("theta_method: theta must lie in [0, 1]");
  GlmTableau t;
  t.name = "theta";
  t.c = {theta};
  t.A = {{theta}};
  t.U = {{1.0}};
  t.B = {{1.0}};
  t.V = {{1.0}};
  t.qvecs = {{1.0}, {0.0}};
  t.p = t.q = 1;
  return t;
}

double dimsim2_l_stable_lambda() { return (2.0 - std::sqrt(2.0)) / 2.0; }

GlmTableau dimsim2(double l) {
  if (!(l > 0.0) || !std::isfinite(l)) throw ValidationError("dimsim2: lambda must be positive");
  const double d = 2.0 * l + 1.0;
  const double l2 = l * l, l3 = l2 * l;
  GlmTableau t;
  t.name = "dimsim2";
  t.c = {0.0, 1.0};
  t.A = {{l, 0.0}, {2.0 / d, l}};
  t.U = RealMatrix::identity(2);
  t.B = {{(8 * l3 + 12 * l2 - 2 * l + 5) / (4 * d), (1 - 4 * l2) / 4},
         {(8 * l3 + 20 * l2 - 2 * l + 3) / (4 * d), (-8 * l3 - 12 * l2 + 10 * l - 1) / (4 * d)}};
  t.V = {{0.5 + l, 0.5 - l}, {0.5 + l, 0.5 - l}};
  t.qvecs = {{1.0, 1.0}, {-l, (-2 * l2 + l - 1) / d}, {0.0, (1 - 2 * l) / 2}};
  t.p = t.q = 2;
  return t;
}

double dimsim3_lambda() {
  return newton_root([](double x) { return ((x - 3.0) * x + 1.5) * x - 1.0 / 6.0; },
                     [](double x) { return (3.0 * x - 6.0) * x + 1.5; }, 0.43586652);
}

double dimsim4_lambda() {
  return newton_root(
      [](double x) { return (((x - 4.0) * x + 3.0) * x - 2.0 / 3.0) * x + 1.0 / 24.0; },
      [](double x) { return ((4.0 * x - 12.0) * x + 6.0) * x - 2.0 / 3.0; }, 0.57281606);
}

GlmTableau dimsim3() {
  RealMatrix a = {{0.0, 0.0, 0.0}, {0.25051488, 0.0, 0.0}, {-1.2115943, 1.0012746, 0.0}};
  return tabulated_dimsim("dimsim3", {0.0, 0.5, 1.0}, std::move(a), {0.55209096, 0.73485666, -0.28694762},
                          dimsim3_lambda());
}

GlmTableau dimsim4() {
  RealMatrix a = {{0.0, 0.0, 0.0, 0.0},
                  {0.15022075, 0.0, 0.0, 0.0},
                  {0.59515808, -0.26632807, 0.0, 0.0},
                  {1.7717286, -1.64234444, 0.39147320, 0.0}};
  return tabulated_dimsim("dimsim4", {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}, std::move(a),
                          {15.615037, -46.967269, 41.290082, -8.9378502}, dimsim4_lambda());
}

std::vector<RealVector> dimsim3_tabulated_qvecs() {
  return {{1.0, 1.0, 1.0},
          {-0.43586652, -0.18638140, 0.77445315},
          {0.0, -0.092933261, -0.43650382},
          {0.0, -0.033649982, -0.17642592}};
}

std::vector<RealVector> dimsim4_tabulated_qvecs() {
  return {{1.0, 1.0, 1.0, 1.0},
          {-0.57281606, -0.38970348, -0.23497940, -0.093673420},
          {0.0, -0.13538313, -0.070879128, 0.21364995},
          {0.0, -0.025650275, -0.063113738, -0.11549405},
          {0.0, -0.0030214983, -0.018412760, -0.062996758}};
}

Method make_method(MethodFamily family, std::optional<double> parameter) {
  Method m;
  m.family = family;
  switch (family) {
    case MethodFamily::theta: {
      const double th = parameter.value_or(1.0);
      m.parameter = th;
      m.tableau = theta_method(th);
      m.a_stable = th >= 0.5 && th <= 1.0;
      m.l_stable = th > 0.5 && th <= 1.0;
      break;
    }
    case MethodFamily::dimsim2: {
      const double l = parameter.value_or(dimsim2_l_stable_lambda());
      m.parameter = l;
      m.tableau = dimsim2(l);
      m.a_stable = l >= 0.25;
      m.l_stable = std::abs(l - dimsim2_l_stable_lambda()) <= 1e-12 ||
                   std::abs(l - (2.0 + std::sqrt(2.0)) / 2.0) <= 1e-12;
      break;
    }
    case MethodFamily::dimsim3:
      m.parameter = dimsim3_lambda();
      m.tableau = dimsim3();
      m.a_stable = m.l_stable = true;
      break;
    case MethodFamily::dimsim4:
      m.parameter = dimsim4_lambda();
      m.tableau = dimsim4();
      m.a_stable = m.l_stable = true;
      break;
  }
  return m;
}

std::size_t beta_count(MethodFamily family) {
  switch (family) {
    case MethodFamily::theta: return 0;
    case MethodFamily::dimsim2: return 1;
    case MethodFamily::dimsim3: return 3;
    case MethodFamily::dimsim4: return 6;
  }
  return 0;
}

std::optional<RealVector> reference_beta(MethodFamily family, BetaTarget target) {
  switch (family) {
    case MethodFamily::theta: return RealVector{};
    case MethodFamily::dimsim2:
      if (target == BetaTarget::explicit_region) return RealVector{4.56};
      if (target == BetaTarget::right_angle) return RealVector{4.64};
      return std::nullopt;
    case MethodFamily::dimsim3:
      if (target == BetaTarget::explicit_region) return RealVector{1.13, 1.45, -0.158};
      if (target == BetaTarget::right_angle) return RealVector{1.39, -0.146, 1.24};
      return RealVector{1.25, 1.62, 0.00555};
    case MethodFamily::dimsim4:
      if (target == BetaTarget::explicit_region) return RealVector{0.0625, -0.355, 0.272, -2.84, 3.49, -1.06};
      if (target == BetaTarget::right_angle) return RealVector{-0.00516, -0.939, 1.18, -1.71, 2.07, 0.32};
      return RealVector{0.0964, -0.278, 0.464, -1.63, 2.73, -0.678};
  }
  return std::nullopt;
}

}  // namespace imexglm

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imexglm/glm.hpp"

namespace imexglm {

enum class MethodFamily { theta, dimsim2, dimsim3, dimsim4 };

std::string family_name(MethodFamily f);
MethodFamily parse_family(std::string_view name);

/// A catalogued base method with its free parameter (theta or lambda; the
/// diagonal lambda for dimsim3/dimsim4, which is fixed) and stability tags.
struct Method {
  MethodFamily family = MethodFamily::theta;
  double parameter = 1.0;
  GlmTableau tableau;
  bool a_stable = false;
  bool l_stable = false;
};

/// Implicit theta-method, p = q = r = s = 1. Requires 0 <= theta <= 1.
GlmTableau theta_method(double theta);

/// Two-stage DIMSIM with c = [0, 1] and diagonal lambda, p = q = r = s = 2.
GlmTableau dimsim2(double lambda);

/// Three-stage DIMSIM with c = [0, 1/2, 1], p = q = r = s = 3.
GlmTableau dimsim3();

/// Four-stage DIMSIM with c = [0, 1/3, 2/3, 1], p = q = r = s = 4.
GlmTableau dimsim4();

/// Diagonal coefficient of dimsim3: root of l^3 - 3l^2 + 3/2 l - 1/6 near 0.43586652.
double dimsim3_lambda();
/// Diagonal coefficient of dimsim4: root of l^4 - 4l^3 + 3l^2 - 2/3 l + 1/24 near 0.57281606.
double dimsim4_lambda();

/// q-vectors exactly as tabulated (8 significant digits) for dimsim3/dimsim4.
/// The constructors derive q-vectors from the stage-order conditions instead;
/// these are kept to check the two agree.
std::vector<RealVector> dimsim3_tabulated_qvecs();
std::vector<RealVector> dimsim4_tabulated_qvecs();

/// L-stable diagonal for dimsim2, (2 - sqrt 2) / 2.
double dimsim2_l_stable_lambda();

/// Builds a catalogued method. `parameter` is theta for the theta-method and
/// lambda for dimsim2; it is ignored for dimsim3/dimsim4.
Method make_method(MethodFamily family, std::optional<double> parameter = std::nullopt);

/// Number of free extrapolation parameters, s(s-1)/2.
std::size_t beta_count(MethodFamily family);

/// Which region a published extrapolation choice was tuned for.
enum class BetaTarget { explicit_region, right_angle, quarter_angle };

/// Published extrapolation parameters (row-wise beta_21, beta_31, beta_32, ...)
/// maximizing S_E, S_{pi/2} or S_{pi/4}. Empty for the theta-method; nullopt
/// when no value was published for that target.
std::optional<RealVector> reference_beta(MethodFamily family, BetaTarget target);

}  // namespace imexglm

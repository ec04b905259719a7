#include "imexglm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "imexglm/catalogue.hpp"
#include "imexglm/convergence.hpp"
#include "imexglm/optimize.hpp"
#include "imexglm/region.hpp"
#include "imexglm/shallow_water.hpp"
#include "imexglm/tableau_json.hpp"
#include "json.hpp"

namespace imexglm {

namespace {

using nlohmann::json;

enum Command : unsigned {
  kCheck = 1,
  kTableau = 2,
  kRegion = 4,
  kLocus = 8,
  kOptimize = 16,
  kIntegrate = 32,
  kConverge = 64,
};
constexpr unsigned kMethodCmds = kCheck | kTableau | kRegion | kLocus | kOptimize | kIntegrate;
constexpr unsigned kScanCmds = kRegion | kOptimize;
constexpr unsigned kProblemCmds = kIntegrate | kConverge;

enum class Kind { text, number, integer, boolean, numbers, texts };

struct KeySpec {
  std::string name;
  Kind kind;
  json def;
  unsigned commands;
  std::string help;
};

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"method", Kind::text, "dimsim2", kMethodCmds, "theta | dimsim2 | dimsim3 | dimsim4"},
      {"methods", Kind::texts, json::array({"theta", "dimsim2", "dimsim3", "dimsim4"}), kConverge,
       "schemes compared in the study"},
      {"theta", Kind::number, nullptr, kMethodCmds | kConverge, "theta-method parameter (default 1)"},
      {"lambda", Kind::number, nullptr, kMethodCmds | kConverge, "dimsim2 diagonal (default (2-sqrt 2)/2)"},
      {"beta", Kind::numbers, nullptr, kMethodCmds, "extrapolation entries beta21 beta31 beta32 ..."},
      {"beta_target", Kind::text, "right_angle", kMethodCmds | kConverge,
       "published beta used when beta is unset: explicit_region | right_angle | quarter_angle"},
      {"tableau", Kind::text, "", kCheck, "check a tableau read from this JSON file instead"},
      {"output", Kind::text, "", kTableau | kOptimize | kIntegrate, "JSON output path (stdout when empty)"},
      {"alpha", Kind::text, "pi/2", kRegion | kLocus | kOptimize, "sector angle: E, pi/N or radians"},
      {"x_min", Kind::number, -6.0, kScanCmds, "scan rectangle"},
      {"x_max", Kind::number, 1.0, kScanCmds, "scan rectangle"},
      {"y_min", Kind::number, -4.0, kScanCmds, "scan rectangle"},
      {"y_max", Kind::number, 4.0, kScanCmds, "scan rectangle"},
      {"delta", Kind::number, 0.02, kScanCmds, "raster cell size"},
      {"y_extent", Kind::number, 8.0, kScanCmds, "sector samples y in [-y_extent, y_extent]"},
      {"y_step", Kind::number, 0.05, kScanCmds, "sector sample spacing"},
      {"tail", Kind::boolean, true, kScanCmds, "geometric samples beyond y_extent"},
      {"refine", Kind::boolean, true, kScanCmds, "golden-section refinement of the worst y"},
      {"stiff_limit", Kind::boolean, true, kScanCmds, "require a stable z1 -> -inf limit"},
      {"tol", Kind::number, 1e-8, kScanCmds, "boundary bisection tolerance"},
      {"ray_extent", Kind::number, 50.0, kScanCmds, "ray search length"},
      {"ray_y_step", Kind::number, 0.25, kScanCmds, "y seeds for boundary rays"},
      {"rays", Kind::integer, 180, kRegion, "boundary rays"},
      {"boundary_csv", Kind::text, "", kRegion, "boundary output (psi,radius,re,im,y_worst)"},
      {"raster_csv", Kind::text, "", kRegion, "raster output (x,y,stable)"},
      {"area_json", Kind::text, "", kRegion, "area summary output"},
      {"svg", Kind::text, "", kRegion | kLocus, "SVG rendering of the boundary"},
      {"y", Kind::number, 0.0, kLocus, "sector parameter y (z1 on the sector edge)"},
      {"samples", Kind::integer, 720, kLocus, "points on the unit circle"},
      {"windings", Kind::integer, 1, kLocus, "turns around the unit circle"},
      {"locus_csv", Kind::text, "", kLocus, "locus output (re,im,tag with tag the sample index); stdout when empty"},
      {"budget", Kind::integer, 200, kOptimize, "objective evaluations"},
      {"initial_step", Kind::number, 0.25, kOptimize, "initial simplex edge"},
      {"diameter_tol", Kind::number, 1e-3, kOptimize, "stop when the simplex is this small"},
      {"optimize_lambda", Kind::boolean, false, kOptimize, "also search the dimsim2 diagonal"},
      {"problem", Kind::text, "prothero_robinson", kProblemCmds, "prothero_robinson | linear | shallow_water"},
      {"mu", Kind::number, -1e6, kProblemCmds, "Prothero-Robinson stiffness"},
      {"forcing_in_g", Kind::boolean, false, kProblemCmds, "Prothero-Robinson forcing in the implicit part"},
      {"t0", Kind::number, 0.0, kProblemCmds, "initial time"},
      {"tf", Kind::number, nullptr, kProblemCmds, "final time (10 for prothero_robinson, else 1)"},
      {"lambda0", Kind::numbers, json::array({0.0, 0.0}), kProblemCmds, "linear test: explicit rate (re im)"},
      {"lambda1", Kind::numbers, json::array({-1.0, 0.0}), kProblemCmds, "linear test: implicit rate (re im)"},
      {"y0", Kind::numbers, json::array({1.0, 0.0}), kProblemCmds, "linear test: initial value (re im)"},
      {"nx", Kind::integer, 20, kProblemCmds, "shallow water cells in x"},
      {"ny", Kind::integer, 20, kProblemCmds, "shallow water cells in y"},
      {"gravity", Kind::number, 9.81, kProblemCmds, "shallow water gravitational constant"},
      {"step", Kind::number, 0.01, kIntegrate, "step size"},
      {"trace_csv", Kind::text, "", kIntegrate, "per-step trace (n,t,norm)"},
      {"state_csv", Kind::text, "", kIntegrate, "final solution estimate"},
      {"hs", Kind::numbers, json::array(), kConverge, "step sizes, halving"},
      {"measure", Kind::text, "auto", kConverge, "auto | expansion | terminal"},
      {"csv", Kind::text, "", kConverge, "error table output (stdout when empty)"},
      {"json", Kind::text, "", kConverge, "error table as JSON"},
  };
  return table;
}

const KeySpec* find_key(const std::string& name) {
  for (const auto& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

std::vector<std::string> split_list(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  double v = 0.0;
  if (!(is >> v) || !is.eof()) throw ValidationError("--" + key + ": not a number: '" + s + "'");
  return v;
}

json parse_value(const KeySpec& k, const std::vector<std::string>& tokens) {
  const std::string first = tokens.empty() ? std::string() : tokens[0];
  switch (k.kind) {
    case Kind::text: return first;
    case Kind::number:
      if (first == "null") return nullptr;
      return parse_double(k.name, first);
    case Kind::integer: {
      const double v = parse_double(k.name, first);
      if (v != std::floor(v)) throw ValidationError("--" + k.name + ": expected an integer");
      return static_cast<long long>(v);
    }
    case Kind::boolean:
      if (first == "true" || first == "1" || first == "yes") return true;
      if (first == "false" || first == "0" || first == "no") return false;
      throw ValidationError("--" + k.name + ": expected true or false");
    case Kind::numbers: {
      json arr = json::array();
      for (const auto& t : split_list(tokens)) arr.push_back(parse_double(k.name, t));
      return arr;
    }
    case Kind::texts: {
      json arr = json::array();
      for (const auto& t : split_list(tokens)) arr.push_back(t);
      return arr;
    }
  }
  return nullptr;
}

void check_type(const KeySpec& k, const json& v) {
  auto bad = [&] { throw ValidationError("config key '" + k.name + "' has the wrong type"); };
  const bool nullable = k.def.is_null() || k.kind == Kind::numbers;
  if (v.is_null()) {
    if (!nullable) bad();
    return;
  }
  switch (k.kind) {
    case Kind::text: if (!v.is_string()) bad(); break;
    case Kind::number: if (!v.is_number()) bad(); break;
    case Kind::integer: if (!v.is_number_integer()) bad(); break;
    case Kind::boolean: if (!v.is_boolean()) bad(); break;
    case Kind::numbers:
      if (!v.is_array()) bad();
      for (const auto& x : v)
        if (!x.is_number()) bad();
      break;
    case Kind::texts:
      if (!v.is_array()) bad();
      for (const auto& x : v)
        if (!x.is_string()) bad();
      break;
  }
}

// Typed access to a resolved configuration.
struct Config {
  json values;

  bool is_set(const char* k) const { return !values.at(k).is_null(); }
  double num(const char* k) const { return values.at(k).get<double>(); }
  std::optional<double> opt_num(const char* k) const {
    return is_set(k) ? std::optional<double>(num(k)) : std::nullopt;
  }
  long long integer(const char* k) const { return values.at(k).get<long long>(); }
  std::size_t count(const char* k) const {
    const long long v = integer(k);
    if (v < 0) throw ValidationError(std::string(k) + " must be nonnegative");
    return static_cast<std::size_t>(v);
  }
  bool flag(const char* k) const { return values.at(k).get<bool>(); }
  std::string text(const char* k) const { return values.at(k).get<std::string>(); }
  RealVector numbers(const char* k) const { return values.at(k).get<RealVector>(); }
  std::vector<std::string> texts(const char* k) const { return values.at(k).get<std::vector<std::string>>(); }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  os.imbue(std::locale::classic());
  os << std::setprecision(17);
  return os;
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    auto os = open_output(path);
    os << j.dump(2) << '\n';
  }
}

std::optional<double> parse_alpha(const std::string& s) {
  if (s == "E" || s == "e" || s == "explicit") return std::nullopt;
  if (s.rfind("pi/", 0) == 0) {
    const double d = parse_double("alpha", s.substr(3));
    if (!(d > 0.0)) throw ValidationError("alpha: bad divisor in '" + s + "'");
    return std::numbers::pi / d;
  }
  if (s == "pi") return std::numbers::pi;
  return parse_double("alpha", s);
}

BetaTarget parse_target(const std::string& s) {
  if (s == "explicit_region") return BetaTarget::explicit_region;
  if (s == "right_angle") return BetaTarget::right_angle;
  if (s == "quarter_angle") return BetaTarget::quarter_angle;
  throw ValidationError("beta_target must be explicit_region, right_angle or quarter_angle");
}

std::optional<double> family_parameter(const Config& cfg, MethodFamily fam) {
  if (fam == MethodFamily::theta) return cfg.opt_num("theta");
  if (fam == MethodFamily::dimsim2) return cfg.opt_num("lambda");
  return std::nullopt;
}

RealVector family_beta(const Config& cfg, MethodFamily fam, bool use_beta_key) {
  if (use_beta_key && cfg.is_set("beta")) return cfg.numbers("beta");
  const auto b = reference_beta(fam, parse_target(cfg.text("beta_target")));
  if (!b) throw ValidationError("no published beta for " + family_name(fam) + " and target " + cfg.text("beta_target"));
  return *b;
}

ImexScheme scheme_for(const Config& cfg, MethodFamily fam, bool use_beta_key) {
  return make_scheme(fam, family_parameter(cfg, fam), family_beta(cfg, fam, use_beta_key));
}

ScanSettings scan_settings(const Config& cfg) {
  ScanSettings s;
  s.x_min = cfg.num("x_min");
  s.x_max = cfg.num("x_max");
  s.y_min = cfg.num("y_min");
  s.y_max = cfg.num("y_max");
  s.delta = cfg.num("delta");
  s.y_extent = cfg.num("y_extent");
  s.y_step = cfg.num("y_step");
  s.tail = cfg.flag("tail");
  s.refine = cfg.flag("refine");
  s.stiff_limit = cfg.flag("stiff_limit");
  s.tol = cfg.num("tol");
  s.ray_extent = cfg.num("ray_extent");
  s.ray_y_step = cfg.num("ray_y_step");
  s.validate();
  return s;
}

Complex complex_from(const Config& cfg, const char* k) {
  const RealVector v = cfg.numbers(k);
  if (v.size() != 2) throw ValidationError(std::string(k) + " needs two numbers (re im)");
  return {v[0], v[1]};
}

ProblemFactory problem_factory(const Config& cfg) {
  const std::string name = cfg.text("problem");
  const double t0 = cfg.num("t0");
  if (name == "prothero_robinson") {
    const double mu = cfg.num("mu"), tf = cfg.opt_num("tf").value_or(10.0);
    const bool in_g = cfg.flag("forcing_in_g");
    prothero_robinson(mu, t0, tf, in_g);
    return [=] { return std::unique_ptr<SplitProblem>(prothero_robinson(mu, t0, tf, in_g)); };
  }
  if (name == "linear") {
    const Complex l0 = complex_from(cfg, "lambda0"), l1 = complex_from(cfg, "lambda1"), y0 = complex_from(cfg, "y0");
    const double tf = cfg.opt_num("tf").value_or(1.0);
    linear_split(l0, l1, y0, t0, tf);
    return [=] { return std::unique_ptr<SplitProblem>(linear_split(l0, l1, y0, t0, tf)); };
  }
  if (name == "shallow_water") {
    const std::size_t nx = cfg.count("nx"), ny = cfg.count("ny");
    const double grav = cfg.num("gravity"), tf = cfg.opt_num("tf").value_or(1.0);
    shallow_water(nx, ny, grav, t0, tf);
    return [=] { return std::unique_ptr<SplitProblem>(shallow_water(nx, ny, grav, t0, tf)); };
  }
  throw ValidationError("unknown problem '" + name + "'");
}

void write_svg(const std::string& path, const std::vector<Complex>& pts, bool closed) {
  auto os = open_output(path);
  os << std::setprecision(6);
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].real();
    y0 = y1 = pts[0].imag();
    for (const auto& p : pts) {
      x0 = std::min(x0, p.real());
      x1 = std::max(x1, p.real());
      y0 = std::min(y0, p.imag());
      y1 = std::max(y1, p.imag());
    }
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  const double size = 600.0, margin = 20.0, scale = (size - 2 * margin) / span;
  auto px = [&](const Complex& p) { return margin + (p.real() - x0) * scale; };
  auto py = [&](const Complex& p) { return size - margin - (p.imag() - y0) * scale; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  const Complex origin{0.0, 0.0};
  if (x0 <= 0 && x1 >= 0) os << "<line x1=\"" << px(origin) << "\" y1=\"0\" x2=\"" << px(origin) << "\" y2=\"" << size << "\" stroke=\"#bbb\"/>\n";
  if (y0 <= 0 && y1 >= 0) os << "<line x1=\"0\" y1=\"" << py(origin) << "\" x2=\"" << size << "\" y2=\"" << py(origin) << "\" stroke=\"#bbb\"/>\n";
  if (closed) {
    os << "<polygon fill=\"#cde\" stroke=\"#124\" points=\"";
    for (const auto& p : pts) os << px(p) << ',' << py(p) << ' ';
    os << "\"/>\n";
  } else {
    for (const auto& p : pts) os << "<circle cx=\"" << px(p) << "\" cy=\"" << py(p) << "\" r=\"1\" fill=\"#124\"/>\n";
  }
  os << "</svg>\n";
}

json scheme_summary(const ImexScheme& sc, MethodFamily fam, const Config& cfg) {
  json j;
  j["method"] = family_name(fam);
  if (auto p = family_parameter(cfg, fam)) j["parameter"] = *p;
  j["beta"] = beta_entries(sc.coeffs.beta);
  return j;
}

int cmd_check(const Config& cfg, std::ostream& out) {
  GlmTableau tab;
  std::optional<ImexScheme> sc;
  const std::string path = cfg.text("tableau");
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read tableau '" + path + "'");
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw ValidationError("tableau '" + path + "': " + e.what());
    }
    tab = tableau_from_json(j);
  } else {
    const MethodFamily fam = parse_family(cfg.text("method"));
    sc = scheme_for(cfg, fam, true);
    tab = sc->base;
  }
  const OrderReport rep = check_order_conditions(tab);
  const double tol = 1e-8;
  out << "tableau " << tab.name << " p=" << tab.p << " q=" << tab.q << " r=" << tab.r() << " s=" << tab.s() << '\n';
  out << std::scientific << std::setprecision(3);
  std::optional<std::string> first_fail;
  for (std::size_t k = 0; k < rep.stage.size(); ++k) {
    const bool ok = rep.stage[k] <= tol;
    out << "stage k=" << k << " residual " << rep.stage[k] << (ok ? " ok" : " FAIL") << '\n';
    if (!ok && !first_fail) first_fail = "stage k=" + std::to_string(k);
  }
  for (std::size_t k = 0; k < rep.order.size(); ++k) {
    const bool ok = rep.order[k] <= tol;
    out << "order k=" << k << " residual " << rep.order[k] << (ok ? " ok" : " FAIL") << '\n';
    if (!ok && !first_fail) first_fail = "order k=" + std::to_string(k);
  }
  if (sc) {
    const double res = interpolation_residual(sc->coeffs, tab.c);
    const bool ok = res <= tol;
    out << "extrapolation residual " << res << (ok ? " ok" : " FAIL") << '\n';
    if (!ok && !first_fail) first_fail = "extrapolation";
  }
  out << std::defaultfloat;
  if (first_fail) {
    out << "FAIL first failure at " << *first_fail << '\n';
    return kExitValidation;
  }
  out << "PASS\n";
  return kExitOk;
}

int cmd_tableau(const Config& cfg, std::ostream& out) {
  const MethodFamily fam = parse_family(cfg.text("method"));
  emit_json(scheme_to_json(scheme_for(cfg, fam, true)), cfg.text("output"), out);
  return kExitOk;
}

int cmd_region(const Config& cfg, std::ostream& out) {
  const MethodFamily fam = parse_family(cfg.text("method"));
  const ImexScheme sc = scheme_for(cfg, fam, true);
  const auto alpha = parse_alpha(cfg.text("alpha"));
  const ScanSettings st = scan_settings(cfg);
  const std::string raster_path = cfg.text("raster_csv"), boundary_path = cfg.text("boundary_csv");
  const std::string svg_path = cfg.text("svg");

  const RegionResult res = region_area(sc, alpha, st, !raster_path.empty());
  json summary = scheme_summary(sc, fam, cfg);
  summary["alpha"] = cfg.text("alpha");
  if (alpha) summary["alpha_radians"] = *alpha;
  summary["area"] = res.area;
  summary["stable_cells"] = res.stable_cells;
  summary["nx"] = res.nx;
  summary["ny"] = res.ny;
  summary["truncated"] = res.truncated;
  if (alpha) summary["limit_modulus"] = res.limit_modulus;

  if (!boundary_path.empty() || !svg_path.empty()) {
    const auto pts = s_alpha_boundary(sc, alpha, cfg.count("rays"), st);
    std::vector<Complex> poly;
    for (const auto& p : pts) poly.push_back(p.z0);
    summary["boundary_area"] = polygon_area(poly);
    if (!boundary_path.empty()) {
      auto os = open_output(boundary_path);
      os << "psi,radius,re,im,y_worst\n";
      for (const auto& p : pts)
        os << p.psi << ',' << p.radius << ',' << p.z0.real() << ',' << p.z0.imag() << ',' << p.y_worst << '\n';
    }
    if (!svg_path.empty()) write_svg(svg_path, poly, true);
  }
  if (!raster_path.empty()) {
    auto os = open_output(raster_path);
    const double dx = (st.x_max - st.x_min) / static_cast<double>(res.nx);
    const double dy = (st.y_max - st.y_min) / static_cast<double>(res.ny);
    os << "x,y,stable\n";
    for (std::size_t j = 0; j < res.ny; ++j)
      for (std::size_t i = 0; i < res.nx; ++i)
        os << st.x_min + (static_cast<double>(i) + 0.5) * dx << ',' << st.y_min + (static_cast<double>(j) + 0.5) * dy
           << ',' << static_cast<int>(res.raster[j * res.nx + i]) << '\n';
  }
  const std::string area_path = cfg.text("area_json");
  if (!area_path.empty()) emit_json(summary, area_path, out);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_locus(const Config& cfg, std::ostream& out) {
  const MethodFamily fam = parse_family(cfg.text("method"));
  const ImexScheme sc = scheme_for(cfg, fam, true);
  const auto alpha = parse_alpha(cfg.text("alpha"));
  const std::size_t samples = cfg.count("samples");
  const long long windings = cfg.integer("windings");
  if (windings < 1 || windings > 1000) throw ValidationError("windings must be in 1..1000");
  if (samples < 64) throw ValidationError("samples must be at least 64");
  const Complex z1 = alpha ? sector_z1(*alpha, cfg.num("y")) : Complex{0.0, 0.0};
  std::vector<Complex> pts;
  std::vector<std::size_t> tags;
  for (std::size_t j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(windings) * static_cast<double>(j) /
                         static_cast<double>(samples);
    const Polynomial p = locus_polynomial(sc, std::polar(1.0, theta), z1);
    if (p.degree() < 1) continue;
    for (const Complex& z : poly_roots(p)) {
      pts.push_back(z);
      tags.push_back(j);
    }
  }
  const std::string path = cfg.text("locus_csv");
  auto write = [&](std::ostream& os) {
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << "re,im,tag\n";
    for (std::size_t i = 0; i < pts.size(); ++i) os << pts[i].real() << ',' << pts[i].imag() << ',' << tags[i] << '\n';
  };
  if (path.empty()) {
    write(out);
  } else {
    auto os = open_output(path);
    write(os);
  }
  if (!cfg.text("svg").empty()) write_svg(cfg.text("svg"), pts, false);
  return kExitOk;
}

int cmd_optimize(const Config& cfg, std::ostream& out) {
  OptimizeRequest req;
  req.family = parse_family(cfg.text("method"));
  req.parameter = family_parameter(cfg, req.family);
  req.optimize_parameter = cfg.flag("optimize_lambda");
  req.alpha = parse_alpha(cfg.text("alpha"));
  req.beta0 = family_beta(cfg, req.family, true);
  req.scan = scan_settings(cfg);
  req.nm.initial_step = cfg.num("initial_step");
  req.nm.diameter_tol = cfg.num("diameter_tol");
  req.nm.budget = cfg.count("budget");
  const OptimizeResult r = optimize_beta(req);
  json j;
  j["method"] = family_name(req.family);
  if (r.parameter) j["parameter"] = *r.parameter;
  j["alpha"] = cfg.text("alpha");
  j["beta"] = r.beta;
  j["area"] = r.area;
  j["evaluations"] = r.evaluations;
  j["converged"] = r.converged;
  j["budget_exhausted"] = r.budget_exhausted;
  emit_json(j, cfg.text("output"), out);
  return kExitOk;
}

int cmd_integrate(const Config& cfg, std::ostream& out) {
  const MethodFamily fam = parse_family(cfg.text("method"));
  const ImexScheme sc = scheme_for(cfg, fam, true);
  auto problem = problem_factory(cfg)();
  const double h = cfg.num("step");
  const bool trace = !cfg.text("trace_csv").empty();
  const IntegrationResult res = integrate(*problem, sc, h, trace);

  json j = scheme_summary(sc, fam, cfg);
  j["problem"] = problem->name();
  j["h"] = h;
  j["steps"] = res.steps;
  j["t_final"] = res.state.t;
  const RealVector est = solution_estimate(sc, res.state);
  if (problem->has_exact()) {
    const RealVector ex = problem->exact(res.state.t);
    double sq = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) sq += (est[i] - ex[i]) * (est[i] - ex[i]);
    j["solution_error"] = std::sqrt(sq / static_cast<double>(ex.size()));
  }
  if (problem->has_derivatives()) j["expansion_error"] = expansion_error(*problem, sc, res.state);
  if (auto* swe = dynamic_cast<ShallowWater*>(problem.get())) {
    j["mass_initial"] = swe->mass(swe->initial_state());
    j["mass_final"] = swe->mass(est);
  }
  if (trace) {
    auto os = open_output(cfg.text("trace_csv"));
    os << "n,t,norm\n";
    for (const auto& row : res.trace) os << row.n << ',' << row.t << ',' << row.norm << '\n';
  }
  if (!cfg.text("state_csv").empty()) {
    auto os = open_output(cfg.text("state_csv"));
    if (auto* swe = dynamic_cast<ShallowWater*>(problem.get())) {
      swe->write_csv(os, est);
    } else {
      os << "index,value\n";
      for (std::size_t i = 0; i < est.size(); ++i) os << i << ',' << est[i] << '\n';
    }
  }
  emit_json(j, cfg.text("output"), out);
  return kExitOk;
}

int cmd_converge(const Config& cfg, std::ostream& out) {
  const RealVector hs = cfg.numbers("hs");
  if (hs.empty()) throw ValidationError("converge: the h list is empty (use --hs)");
  std::vector<ConvergenceCase> cases;
  for (const auto& m : cfg.texts("methods")) {
    const MethodFamily fam = parse_family(m);
    cases.push_back({family_name(fam), scheme_for(cfg, fam, false)});
  }
  if (cases.empty()) throw ValidationError("converge: no methods given");
  const ProblemFactory factory = problem_factory(cfg);
  ConvergenceOptions opts;
  const std::string measure = cfg.text("measure");
  if (measure == "expansion") {
    opts.measure = ErrorMeasure::expansion;
  } else if (measure == "terminal") {
    opts.measure = ErrorMeasure::terminal;
  } else if (measure == "auto") {
    opts.measure = factory()->has_derivatives() ? ErrorMeasure::expansion : ErrorMeasure::terminal;
  } else {
    throw ValidationError("measure must be auto, expansion or terminal");
  }
  const ConvergenceReport rep = convergence_study(factory, cases, hs, opts);
  const std::string csv = cfg.text("csv");
  if (csv.empty()) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    write_convergence_csv(os, rep);
    out << os.str();
  } else {
    auto os = open_output(csv);
    write_convergence_csv(os, rep);
    for (const auto& s : rep.series) out << s.label << " order " << s.order << " slope " << s.slope << '\n';
  }
  if (!cfg.text("json").empty()) {
    auto os = open_output(cfg.text("json"));
    os << convergence_json(rep) << '\n';
  }
  return kExitOk;
}

struct Subcommand {
  std::string name;
  unsigned bit;
  std::string description;
  int (*run)(const Config&, std::ostream&);
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> list = {
      {"check", kCheck, "Check the order and stage-order conditions of a tableau", cmd_check},
      {"tableau", kTableau, "Export an IMEX scheme as JSON", cmd_tableau},
      {"region", kRegion, "Area and boundary of S_E or S_alpha", cmd_region},
      {"locus", kLocus, "Boundary locus points for a fixed z1", cmd_locus},
      {"optimize", kOptimize, "Nelder-Mead search over the extrapolation parameters", cmd_optimize},
      {"integrate", kIntegrate, "Integrate a test problem with a fixed step", cmd_integrate},
      {"converge", kConverge, "Convergence study over a halving h list", cmd_converge},
  };
  return list;
}

json resolve_config(unsigned bit, const std::string& config_path,
                    const std::map<std::string, std::vector<std::string>>& given) {
  json cfg = json::object();
  for (const auto& k : key_table())
    if (k.commands & bit) cfg[k.name] = k.def;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ValidationError("cannot read config '" + config_path + "'");
    json file;
    try {
      file = json::parse(is);
    } catch (const json::exception& e) {
      throw ValidationError("config '" + config_path + "': " + e.what());
    }
    if (!file.is_object()) throw ValidationError("config must be a JSON object");
    for (auto it = file.begin(); it != file.end(); ++it) {
      const KeySpec* k = find_key(it.key());
      if (!k || !(k->commands & bit)) throw ValidationError("unknown config key '" + it.key() + "'");
      check_type(*k, it.value());
      cfg[it.key()] = it.value();
    }
  }
  for (const auto& [name, tokens] : given) cfg[name] = parse_value(*find_key(name), tokens);
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"IMEX general linear methods: order checks, stability regions, integration"};
  app.require_subcommand(1);

  struct Bound {
    const Subcommand* cmd = nullptr;
    CLI::App* app = nullptr;
    std::string config;
    bool print_config = false;
    std::map<std::string, std::vector<std::string>> raw;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<Bound> bound(subcommands().size());
  for (std::size_t i = 0; i < subcommands().size(); ++i) {
    Bound& b = bound[i];
    b.cmd = &subcommands()[i];
    b.app = app.add_subcommand(b.cmd->name, b.cmd->description);
    b.app->add_option("--config", b.config, "JSON config file; flags override its values");
    b.app->add_flag("--print-config", b.print_config, "Print the resolved configuration and exit");
    for (const auto& k : key_table()) {
      if (!(k.commands & b.cmd->bit)) continue;
      auto& store = b.raw[k.name];
      CLI::Option* opt = b.app->add_option("--" + k.name, store, k.help);
      if (k.kind == Kind::numbers || k.kind == Kind::texts)
        opt->expected(1, CLI::detail::expected_max_vector_size)->allow_extra_args();
      else
        opt->expected(1);
      b.options[k.name] = opt;
    }
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (auto& b : bound) {
    if (!b.app->parsed()) continue;
    try {
      std::map<std::string, std::vector<std::string>> given;
      for (const auto& [name, opt] : b.options)
        if (opt->count() > 0) given[name] = b.raw[name];
      Config cfg{resolve_config(b.cmd->bit, b.config, given)};
      if (b.print_config) {
        out << cfg.values.dump(2) << '\n';
        return kExitOk;
      }
      out.imbue(std::locale::classic());
      return b.cmd->run(cfg, out);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const json::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitValidation;
    } catch (const NumericalError& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::exception& e) {
      err << "numerical failure: " << e.what() << '\n';
      return kExitNumerical;
    }
  }
  return kExitValidation;
}

}  // namespace imexglm

#include "epsrb/elliptic_config.hpp"

#include "epsrb/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace epsrb::elliptic {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  raise(ErrorCode::ConfigParse, where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(where, "unknown key '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "not finite");
  return x;
}

double positive(const json& j, const std::string& where) {
  const double x = number(j, where);
  if (!(x > 0.0)) fail(where, "must be positive");
  return x;
}

std::uint64_t count(const json& j, const std::string& where, std::uint64_t min = 1) {
  if (!j.is_number_integer() || (j.is_number_integer() && j.get<std::int64_t>() < 0)) {
    fail(where, "expected a non-negative integer");
  }
  const auto v = j.get<std::uint64_t>();
  if (v < min) fail(where, "must be at least " + std::to_string(min));
  return v;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Profile profile(const json& j, const std::string& where) {
  only_keys(j, where, {"poly", "sine"});
  Profile p;
  if (j.contains("poly")) p.poly = numbers(j["poly"], where + ".poly");
  if (j.contains("sine")) p.sine = numbers(j["sine"], where + ".sine");
  return p;
}

ParamBox box(const json& j) {
  if (!j.is_array() || j.empty()) fail("nu_box", "expected a non-empty array of [lower, upper] pairs");
  std::vector<double> lo, hi;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "nu_box[" + std::to_string(k) + "]";
    const auto pair = numbers(j[k], where);
    if (pair.size() != 2 || !(pair[0] <= pair[1])) fail(where, "expected [lower, upper] with lower <= upper");
    lo.push_back(pair[0]);
    hi.push_back(pair[1]);
  }
  return ParamBox(lo, hi);
}

CoefficientField coefficient(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "affine_sine") return CoefficientField::affine_sine();
    fail("coefficient", "unknown preset '" + j.get<std::string>() + "'");
  }
  only_keys(j, "coefficient", {"base", "terms", "alpha"});
  if (!j.contains("base") || !j.contains("alpha")) fail("coefficient", "needs 'base' and 'alpha'");
  std::vector<Profile> terms;
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) fail("coefficient.terms", "expected an array");
    for (std::size_t k = 0; k < j["terms"].size(); ++k) {
      terms.push_back(profile(j["terms"][k], "coefficient.terms[" + std::to_string(k) + "]"));
    }
  }
  return CoefficientField(profile(j["base"], "coefficient.base"), std::move(terms),
                          positive(j["alpha"], "coefficient.alpha"));
}

ForcingComponent component(const json& j, const std::string& where) {
  only_keys(j, where, {"spectral", "nodal"});
  if (j.size() != 1) fail(where, "expected exactly one of 'spectral' or 'nodal'");
  if (j.contains("nodal")) return ForcingComponent::sampled(profile(j["nodal"], where + ".nodal"));
  const json& s = j["spectral"];
  only_keys(s, where + ".spectral", {"scale", "decay"});
  return ForcingComponent::spectral(s.contains("scale") ? number(s["scale"], where + ".spectral.scale") : 1.0,
                                    s.contains("decay") ? number(s["decay"], where + ".spectral.decay") : 1.0);
}

Forcing forcing(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "rough_smooth") return Forcing::rough_smooth();
    fail("forcing", "unknown preset '" + j.get<std::string>() + "'");
  }
  only_keys(j, "forcing", {"base", "terms"});
  if (!j.contains("base")) fail("forcing", "needs 'base'");
  std::vector<ForcingComponent> terms;
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) fail("forcing.terms", "expected an array");
    for (std::size_t k = 0; k < j["terms"].size(); ++k) {
      terms.push_back(component(j["terms"][k], "forcing.terms[" + std::to_string(k) + "]"));
    }
  }
  return Forcing(component(j["base"], "forcing.base"), std::move(terms));
}

}  // namespace

EllipticConfig parse_elliptic_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::ConfigParse, std::string("malformed JSON: ") + e.what());
  }
  only_keys(j, "config", {"n", "eps", "nu_box", "coefficient", "forcing", "grid", "delta", "safety_factor",
                          "tolerances", "validation", "workers"});

  EllipticConfig c;
  EllipticSpec& s = c.spec;
  if (j.contains("n")) s.n = static_cast<int>(count(j["n"], "n"));
  if (j.contains("eps")) s.eps = positive(j["eps"], "eps");
  if (j.contains("nu_box")) s.box = box(j["nu_box"]);
  if (j.contains("coefficient")) s.coefficient = coefficient(j["coefficient"]);
  if (j.contains("forcing")) s.forcing = forcing(j["forcing"]);
  if (s.coefficient.param_dim() != s.box.dim()) fail("coefficient", "number of terms differs from nu_box dimension");
  if (s.forcing.param_dim() != s.box.dim()) fail("forcing", "number of terms differs from nu_box dimension");

  OfflineSettings& o = c.offline;
  o.nu_counts.assign(s.box.dim(), o.nu_counts.empty() ? 4 : o.nu_counts.front());
  if (j.contains("grid")) {
    const json& g = j["grid"];
    only_keys(g, "grid", {"nu", "eta", "eta_spacing", "interval_points"});
    if (g.contains("nu")) {
      if (!g["nu"].is_array() || g["nu"].size() != s.box.dim()) fail("grid.nu", "expected one count per parameter");
      o.nu_counts.clear();
      for (std::size_t k = 0; k < g["nu"].size(); ++k) {
        o.nu_counts.push_back(count(g["nu"][k], "grid.nu[" + std::to_string(k) + "]"));
      }
    }
    if (g.contains("eta")) o.eta_count = count(g["eta"], "grid.eta");
    if (g.contains("eta_spacing")) {
      const std::string sp = g["eta_spacing"].is_string() ? g["eta_spacing"].get<std::string>() : "";
      if (sp == "log") o.eta_spacing = EtaSpacing::Log;
      else if (sp == "uniform") o.eta_spacing = EtaSpacing::Uniform;
      else fail("grid.eta_spacing", "expected \"log\" or \"uniform\"");
    }
    if (g.contains("interval_points")) o.interval_points = count(g["interval_points"], "grid.interval_points", 2);
  }
  if (j.contains("delta")) {
    o.delta = number(j["delta"], "delta");
    if (o.delta < 0.0) fail("delta", "must be non-negative");
  }
  if (j.contains("safety_factor")) {
    o.safety_factor = number(j["safety_factor"], "safety_factor");
    if (!(o.safety_factor >= 1.0)) fail("safety_factor", "must be at least 1");
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    only_keys(t, "tolerances", {"online", "psi_rtol", "bracket_rtol", "cg_rtol"});
    if (t.contains("online")) c.tolerances.online = positive(t["online"], "tolerances.online");
    if (t.contains("psi_rtol")) c.tolerances.psi_rtol = positive(t["psi_rtol"], "tolerances.psi_rtol");
    if (t.contains("bracket_rtol")) c.tolerances.bracket_rtol = positive(t["bracket_rtol"], "tolerances.bracket_rtol");
    if (t.contains("cg_rtol")) c.tolerances.cg_rtol = positive(t["cg_rtol"], "tolerances.cg_rtol");
  }
  if (j.contains("validation")) {
    const json& v = j["validation"];
    only_keys(v, "validation", {"samples", "seed"});
    if (v.contains("samples")) c.validation.samples = count(v["samples"], "validation.samples");
    if (v.contains("seed")) c.validation.seed = count(v["seed"], "validation.seed", 0);
  }
  if (j.contains("workers")) c.workers = static_cast<unsigned>(count(j["workers"], "workers", 0));
  return c;
}

EllipticConfig load_elliptic_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_elliptic_config(text.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConfigParse) throw;
    const std::string what = e.what();
    raise(ErrorCode::ConfigParse, path.string() + ": " + what.substr(what.find(": ") + 2));
  }
}

EpsSolverOptions solver_options(const EllipticConfig& config) {
  EpsSolverOptions o;
  o.psi_rtol = config.tolerances.psi_rtol;
  o.bracket_rtol = config.tolerances.bracket_rtol;
  o.linear.cg_rtol = config.tolerances.cg_rtol;
  return o;
}

}  // namespace epsrb::elliptic

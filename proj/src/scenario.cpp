#include "decoh/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "decoh/errors.hpp"
#include "decoh/io.hpp"
#include "decoh/mode_oracle.hpp"
#include "decoh/position_model.hpp"
#include "decoh/superselection.hpp"
#include "decoh/velocity_model.hpp"

namespace decoh {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kOutputDirEnv = "DECOH_OUTPUT_DIR";

struct TimeGridSpec {
  std::string kind = "linear";
  double t_max = 0.0;
  double t_min = 0.0;
  int samples = 0;
};

struct OracleSettings {
  bool enabled = false;
  int modes = 512;
  double tolerance = 1e-3;
};

struct Scenario {
  std::string name;
  std::string model;
  FormFactor profile;
  double omega0 = 0.0;
  EnvironmentState env = EnvironmentState::vacuum();
  WeylLabel label{0.0, 1.0};
  std::optional<WeylCombination> combination;
  std::optional<std::pair<MomentumInterval, MomentumInterval>> intervals;
  TimeGridSpec times;
  OracleSettings oracle;
  int grid_modes = 1024;
  std::optional<std::string> output_dir;
};

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing field: " + where + key);
  return *it;
}

double require_number(const json& obj, const char* key,
                      const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number())
    throw ConfigError("field must be a number: " + where + key);
  return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_number_integer())
    throw ConfigError("field must be an integer: " + where + key);
  return v.get<int>();
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  const json& v = require_field(obj, key, where);
  if (!v.is_string())
    throw ConfigError("field must be a string: " + where + key);
  return v.get<std::string>();
}

FormFactor parse_form_factor(const json& ff, const fs::path& base_dir) {
  if (!ff.is_object())
    throw ConfigError("field must be an object: form_factor");
  const std::string family = require_string(ff, "family", "form_factor.");
  if (family == "power_law") {
    const double sigma = require_number(ff, "sigma", "form_factor.");
    const double cutoff = require_number(ff, "cutoff", "form_factor.");
    const bool has_amp = ff.contains("amplitude");
    const bool has_norm = ff.contains("coupling_norm_sq");
    if (has_amp == has_norm) {
      throw ConfigError(
          "form_factor needs exactly one of: amplitude, coupling_norm_sq");
    }
    if (has_amp) {
      return FormFactor::power_law(sigma, cutoff,
                                   require_number(ff, "amplitude",
                                                  "form_factor."));
    }
    return FormFactor::power_law_with_norm(
        sigma, cutoff, require_number(ff, "coupling_norm_sq", "form_factor."));
  }
  if (family == "tabulated") {
    const std::string rel = require_string(ff, "path", "form_factor.");
    fs::path p(rel);
    if (p.is_relative()) p = base_dir / p;
    return FormFactor::from_csv(p.string());
  }
  throw ConfigError(
      "form_factor.family must be \"power_law\" or \"tabulated\"");
}

EnvironmentState parse_environment(const json& env) {
  if (!env.is_object())
    throw ConfigError("field must be an object: environment");
  const std::string kind = require_string(env, "kind", "environment.");
  if (kind == "vacuum") return EnvironmentState::vacuum();
  if (kind == "thermal")
    return EnvironmentState::thermal(
        require_number(env, "beta", "environment."));
  throw ConfigError("environment.kind must be \"vacuum\" or \"thermal\"");
}

MomentumInterval parse_interval(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number())
    throw ConfigError("field must be a [lo, hi] pair: " + where);
  return make_interval(v[0].get<double>(), v[1].get<double>());
}

Scenario parse_scenario(const std::string& path,
                        std::vector<std::string>& warnings) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigError("scenario root must be a JSON object");

  static const char* known[] = {
      "schema_version", "name",        "model",      "form_factor",
      "omega0",         "environment", "label",      "combination",
      "intervals",      "time_grid",   "oracle",     "grid_modes",
      "output_dir"};
  for (const auto& item : root.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) warnings.push_back("unknown field: " + item.key());
  }

  const json& ver = require_field(root, "schema_version", "");
  if (!ver.is_number_integer() || ver.get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version (expected 1)");

  Scenario sc;
  sc.model = require_string(root, "model", "");
  if (sc.model != "velocity" && sc.model != "position")
    throw ConfigError("model must be \"velocity\" or \"position\"");

  const fs::path base_dir = fs::path(path).parent_path();
  sc.profile = parse_form_factor(require_field(root, "form_factor", ""),
                                 base_dir);

  if (sc.model == "position") {
    sc.omega0 = require_number(root, "omega0", "");
    if (!(sc.omega0 >= 0.0))
      throw ConfigError("omega0 must be non-negative");
  } else if (root.contains("omega0")) {
    throw ConfigError("field omega0 is only valid for the position model");
  }

  if (root.contains("environment"))
    sc.env = parse_environment(root["environment"]);

  if (root.contains("label")) {
    const json& l = root["label"];
    if (!l.is_object())
      throw ConfigError("field must be an object: label");
    sc.label.a = require_number(l, "a", "label.");
    sc.label.b = require_number(l, "b", "label.");
  }

  if (root.contains("combination")) {
    const json& arr = root["combination"];
    if (!arr.is_array() || arr.empty())
      throw ConfigError("combination must be a non-empty array");
    WeylCombination comb;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "combination[" + std::to_string(i) + "].";
      if (!arr[i].is_object())
        throw ConfigError("combination entries must be objects");
      WeylTerm term;
      term.coeff_abs =
          std::abs(require_number(arr[i], "coeff", where));
      term.a = require_number(arr[i], "a", where);
      term.b = require_number(arr[i], "b", where);
      comb.terms.push_back(term);
    }
    sc.combination = std::move(comb);
  }

  if (root.contains("intervals")) {
    const json& iv = root["intervals"];
    if (!iv.is_object())
      throw ConfigError("field must be an object: intervals");
    sc.intervals = {parse_interval(require_field(iv, "i1", "intervals."),
                                   "intervals.i1"),
                    parse_interval(require_field(iv, "i2", "intervals."),
                                   "intervals.i2")};
  }
  if (sc.intervals.has_value() != sc.combination.has_value())
    throw ConfigError("intervals and combination must be provided together");
  if (sc.intervals && sc.model != "velocity")
    throw ConfigError("superselection sweep requires the velocity model");

  {
    const json& tg = require_field(root, "time_grid", "");
    if (!tg.is_object())
      throw ConfigError("field must be an object: time_grid");
    sc.times.kind = require_string(tg, "kind", "time_grid.");
    if (sc.times.kind != "linear" && sc.times.kind != "log")
      throw ConfigError("time_grid.kind must be \"linear\" or \"log\"");
    sc.times.t_max = require_number(tg, "t_max", "time_grid.");
    if (!(sc.times.t_max > 0.0))
      throw ConfigError("time_grid.t_max must be positive");
    sc.times.samples = require_int(tg, "samples", "time_grid.");
    if (sc.times.samples < 2 || sc.times.samples > 200000)
      throw ConfigError("time_grid.samples must be in [2, 200000]");
    if (sc.times.kind == "log") {
      sc.times.t_min = require_number(tg, "t_min", "time_grid.");
      if (!(sc.times.t_min > 0.0) || !(sc.times.t_min < sc.times.t_max))
        throw ConfigError("time_grid.t_min must be in (0, t_max)");
    }
  }

  if (root.contains("oracle")) {
    const json& oc = root["oracle"];
    if (!oc.is_object())
      throw ConfigError("field must be an object: oracle");
    if (oc.contains("enabled")) {
      if (!oc["enabled"].is_boolean())
        throw ConfigError("field must be a boolean: oracle.enabled");
      sc.oracle.enabled = oc["enabled"].get<bool>();
    }
    if (oc.contains("modes")) {
      sc.oracle.modes = require_int(oc, "modes", "oracle.");
      if (sc.oracle.modes < 8)
        throw ConfigError("oracle.modes must be at least 8");
    }
    if (oc.contains("tolerance")) {
      sc.oracle.tolerance = require_number(oc, "tolerance", "oracle.");
      if (!(sc.oracle.tolerance > 0.0))
        throw ConfigError("oracle.tolerance must be positive");
    }
  }

  if (root.contains("grid_modes")) {
    sc.grid_modes = require_int(root, "grid_modes", "");
    if (sc.grid_modes < 8 || sc.grid_modes > 1000000)
      throw ConfigError("grid_modes must be in [8, 1000000]");
  }

  if (root.contains("name")) {
    if (!root["name"].is_string())
      throw ConfigError("field must be a string: name");
    sc.name = root["name"].get<std::string>();
  } else {
    sc.name = fs::path(path).stem().string();
  }
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string())
      throw ConfigError("field must be a string: output_dir");
    sc.output_dir = root["output_dir"].get<std::string>();
  }
  return sc;
}

std::vector<double> make_times(const TimeGridSpec& g) {
  std::vector<double> t(static_cast<std::size_t>(g.samples));
  const int n = g.samples;
  if (g.kind == "linear") {
    for (int i = 0; i < n; ++i)
      t[static_cast<std::size_t>(i)] =
          g.t_max * static_cast<double>(i) / static_cast<double>(n - 1);
  } else {
    const double lo = std::log(g.t_min), hi = std::log(g.t_max);
    for (int i = 0; i < n; ++i)
      t[static_cast<std::size_t>(i)] = std::exp(
          lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return t;
}

std::string resolve_output_dir(const Scenario& sc,
                               const ScenarioOptions& opts) {
  if (opts.output_dir) return *opts.output_dir;
  if (sc.output_dir) return *sc.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env)
    return env;
  return ".";
}

RunReport error_report(int code, const char* type, const std::string& msg) {
  json rep;
  rep["error"] = {{"type", type}, {"message", msg}};
  rep["exit_code"] = code;
  return {code, rep.dump(2)};
}

RunReport map_exception(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const UnboundedError& e) {
    return error_report(kExitModelUnbounded, "ModelUnbounded", e.what());
  } catch (const NumericalError& e) {
    return error_report(kExitNumericalFailure, "NumericalFailure", e.what());
  } catch (const OscillationOverflowError& e) {
    return error_report(kExitNumericalFailure, "NumericalFailure", e.what());
  } catch (const EigenFailureError& e) {
    return error_report(kExitNumericalFailure, "NumericalFailure", e.what());
  } catch (const Error& e) {
    return error_report(kExitConfigInvalid, "ConfigInvalid", e.what());
  } catch (const std::exception& e) {
    return error_report(kExitNumericalFailure, "NumericalFailure", e.what());
  }
}

json check_entry(const std::string& name, bool passed, double value,
                 double tolerance) {
  return {{"name", name},
          {"passed", passed},
          {"value", value},
          {"tolerance", tolerance}};
}

// Oracle comparison entries {quantity, analytic, oracle, abs_diff, N,
// convergence_order_estimate}; the order estimate needs a continuum
// reference, so it is only filled for the velocity model.
json oracle_comparisons(const Scenario& sc, double t_ref, json& checks,
                        bool& all_passed) {
  json out = json::array();
  const ModelSelector sel = sc.model == "velocity"
                                ? ModelSelector::velocity()
                                : ModelSelector::position(sc.omega0);
  const int n_full = sc.oracle.modes;

  if (sc.model == "velocity") {
    VelocityModel::Options vopts;
    vopts.grid_modes = sc.grid_modes;
    VelocityModel model(sc.profile, vopts);
    std::vector<int> sizes{std::max(8, n_full / 4), std::max(8, n_full / 2),
                           n_full};
    std::vector<double> chi_err(sizes.size()), drift_err(sizes.size());
    double chi_analytic = 0.0, chi_oracle = 0.0;
    double a_analytic = 0.0, a_oracle = 0.0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const ModeSystem sys = build_mode_system(sc.profile, sel, sizes[k]);
      const ChiComparison cc = oracle_chi(sys, sc.label, t_ref, sc.env);
      const PhasePoint analytic_flow = model.flow(sc.label, t_ref);
      Eigen::VectorXd z = Eigen::VectorXd::Zero(
          static_cast<Eigen::Index>(sys.dim()));
      z[0] = sc.label.a;
      z[static_cast<Eigen::Index>(sys.modes()) + 1] = sc.label.b;
      const Eigen::VectorXd zt = propagate(sys, z, t_ref);
      chi_err[k] = cc.abs_diff;
      drift_err[k] = std::abs(zt[0] - analytic_flow.a);
      if (k + 1 == sizes.size()) {
        chi_analytic = cc.analytic;
        chi_oracle = cc.oracle;
        a_analytic = analytic_flow.a;
        a_oracle = zt[0];
      }
    }
    const auto order = [](const std::vector<double>& e) -> json {
      if (e.size() < 3 || !(e[0] > 0.0) || !(e[1] > 0.0) || !(e[2] > 0.0))
        return nullptr;
      return 0.5 * (std::log2(e[0] / e[1]) + std::log2(e[1] / e[2]));
    };
    out.push_back({{"quantity", "abs_chi"},
                   {"analytic", chi_analytic},
                   {"oracle", chi_oracle},
                   {"abs_diff", chi_err.back()},
                   {"N", n_full},
                   {"convergence_order_estimate", order(chi_err)}});
    out.push_back({{"quantity", "a_t"},
                   {"analytic", a_analytic},
                   {"oracle", a_oracle},
                   {"abs_diff", drift_err.back()},
                   {"N", n_full},
                   {"convergence_order_estimate", order(drift_err)}});
    const bool ok = chi_err.back() <= sc.oracle.tolerance;
    checks.push_back(check_entry("oracle_abs_chi", ok, chi_err.back(),
                                 sc.oracle.tolerance));
    all_passed = all_passed && ok;
  } else {
    const ModeSystem sys = build_mode_system(sc.profile, sel, n_full);
    const ChiComparison cc = oracle_chi(sys, sc.label, t_ref, sc.env);
    out.push_back({{"quantity", "abs_chi"},
                   {"analytic", cc.analytic},
                   {"oracle", cc.oracle},
                   {"abs_diff", cc.abs_diff},
                   {"N", n_full},
                   {"convergence_order_estimate", nullptr}});
    const bool ok = cc.abs_diff <= sc.oracle.tolerance;
    checks.push_back(
        check_entry("oracle_abs_chi", ok, cc.abs_diff, sc.oracle.tolerance));
    all_passed = all_passed && ok;
  }
  return out;
}

}  // namespace

RunReport check_scenario(const std::string& scenario_path,
                         const ScenarioOptions& opts) {
  try {
    std::vector<std::string> warnings;
    const Scenario sc = parse_scenario(scenario_path, warnings);
    const ModelSelector sel = sc.model == "velocity"
                                  ? ModelSelector::velocity()
                                  : ModelSelector::position(sc.omega0);
    json rep;
    rep["valid"] = true;
    rep["name"] = sc.name;
    rep["model"] = sc.model;
    const Boundedness bd = boundedness_check(sc.profile, sel);
    rep["boundedness"] = to_string(bd);
    try {
      rep["ir_class"] = to_string(ir_classify(sc.profile));
    } catch (const IndeterminateError& e) {
      rep["ir_class"] = "indeterminate";
      warnings.push_back(e.what());
    }
    const double norm = weighted_norm_sq(sc.profile, -2.0).value;
    rep["coupling_norm_sq"] = norm;
    if (sc.model == "velocity" && bd != Boundedness::supercritical)
      rep["alpha_sq"] = bd == Boundedness::critical ? 0.0 : 1.0 - norm;
    if (bd == Boundedness::critical)
      warnings.push_back("coupling is exactly critical");
    rep["warnings"] = warnings;
    const int code = (opts.strict && !warnings.empty()) ? kExitConfigInvalid
                                                        : kExitOk;
    rep["exit_code"] = code;
    return {code, rep.dump(2)};
  } catch (...) {
    return map_exception(std::current_exception());
  }
}

RunReport run_scenario(const std::string& scenario_path,
                       const ScenarioOptions& opts) {
  try {
    std::vector<std::string> validation_warnings;
    Scenario sc = parse_scenario(scenario_path, validation_warnings);
    if (opts.threads) set_thread_count(*opts.threads);
    if (opts.oracle_modes) {
      if (*opts.oracle_modes < 8)
        throw ConfigError("oracle modes must be at least 8");
      sc.oracle.modes = *opts.oracle_modes;
    }
    const std::string out_dir = resolve_output_dir(sc, opts);
    const std::vector<double> times = make_times(sc.times);
    const double t_ref = std::min(10.0, sc.times.t_max);

    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> runtime_warnings;
    json rep;
    rep["scenario"] = sc.name;
    rep["model"] = sc.model;
    json checks = json::array();
    bool all_passed = true;

    const auto add_file = [&](const std::string& suffix,
                              const std::string& content) {
      files.emplace_back(out_dir + "/" + sc.name + suffix, content);
    };

    DecoherenceCurve curve;
    if (sc.model == "velocity") {
      VelocityModel::Options vopts;
      vopts.grid_modes = sc.grid_modes;
      VelocityModel model(sc.profile, vopts);
      rep["boundedness"] = to_string(model.boundedness());
      rep["alpha_sq"] = model.alpha_sq();
      if (model.boundedness() == Boundedness::critical)
        runtime_warnings.push_back(
            "coupling is exactly critical; the drift is frozen");
      curve = model.sample_curve(sc.label, times, sc.env);
      if (sc.intervals) {
        const SuperselectionSweep sweep = superselection_sweep(
            model, *sc.combination, sc.intervals->first, sc.intervals->second,
            times);
        add_file(".superselection.csv", sweep.to_csv());
        add_file(".superselection.json", sweep.to_json());
        bool dominated = true;
        for (std::size_t i = 0; i < sweep.size(); ++i)
          dominated = dominated &&
                      sweep.per_term[i] <= sweep.separation[i] * (1.0 + 1e-12);
        checks.push_back(
            check_entry("per_term_within_separation", dominated, 0.0, 0.0));
        all_passed = all_passed && dominated;
        rep["superselection"] = {{"delta", sweep.delta},
                                 {"tail_slope", sweep.tail_slope},
                                 {"saturating", sweep.saturating}};
      }
    } else {
      FriedrichsOperator::Options fopts;
      fopts.grid_modes = sc.grid_modes;
      FriedrichsOperator op(sc.omega0, sc.profile, fopts);
      rep["boundedness"] = to_string(op.boundedness());
      if (op.boundedness() == Boundedness::critical)
        runtime_warnings.push_back(
            "coupling is exactly critical; the spectrum touches zero");
      curve = op.sample_curve(sc.label, times, sc.env);
      const SpectralDensity density = op.spectral_density();
      add_file(".density.csv", density.to_csv());
      add_file(".density.json", density.to_json());
      const double mass = density.mass();
      const bool mass_ok = std::abs(mass - 1.0) <= 1e-4;
      checks.push_back(check_entry("spectral_mass", mass_ok, mass, 1e-4));
      all_passed = all_passed && mass_ok;
      const double cross = std::abs(
          op.cos00(t_ref) - FriedrichsOperator::cos00_from_density(
                                density, t_ref));
      const bool cross_ok = cross <= 1e-3;
      checks.push_back(
          check_entry("cos00_cross_check", cross_ok, cross, 1e-3));
      all_passed = all_passed && cross_ok;
    }
    add_file(".curve.csv", curve.to_csv());
    add_file(".curve.json", curve.to_json());

    {
      bool bitwise = true;
      for (std::size_t i = 0; i < curve.size(); ++i)
        bitwise =
            bitwise && curve.abs_chi[i] == std::exp(-curve.exponent[i]);
      checks.push_back(
          check_entry("abs_chi_matches_exponent", bitwise, 0.0, 0.0));
      all_passed = all_passed && bitwise;
      bool monotone = true;
      for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        monotone =
            monotone && curve.envelope_phi[i] <= curve.envelope_phi[i + 1];
      checks.push_back(
          check_entry("envelope_non_decreasing", monotone, 0.0, 0.0));
      all_passed = all_passed && monotone;
    }

    if (sc.oracle.enabled) {
      json comparisons = oracle_comparisons(sc, t_ref, checks, all_passed);
      json oracle_doc;
      oracle_doc["comparisons"] = comparisons;
      oracle_doc["modes"] = sc.oracle.modes;
      oracle_doc["t"] = t_ref;
      add_file(".oracle.json", oracle_doc.dump(2));
      rep["oracle"] = oracle_doc;
    }

    rep["checks"] = checks;
    rep["validation_warnings"] = validation_warnings;
    rep["warnings"] = runtime_warnings;

    int code = all_passed ? kExitOk : kExitNumericalFailure;
    if (code == kExitOk && opts.strict) {
      if (!validation_warnings.empty())
        code = kExitConfigInvalid;
      else if (!runtime_warnings.empty())
        code = kExitNumericalFailure;
    }
    rep["exit_code"] = code;

    // All computation succeeded; only now touch the filesystem.
    add_file(".report.json", rep.dump(2));
    for (const auto& [path, content] : files) atomic_write(path, content);
    return {code, rep.dump(2)};
  } catch (...) {
    return map_exception(std::current_exception());
  }
}

}  // namespace decoh

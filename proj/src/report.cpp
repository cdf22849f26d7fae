#include "linearize4/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

namespace lin4 {

namespace {

using nlohmann::json;

const std::set<std::string> kParamKeys = {"alpha", "beta", "gamma", "mu",
                                          "nu",    "kappa", "D"};
const std::set<std::string> kOptionKeys = {"seed", "tol", "grid", "constants"};
const std::set<std::string> kGridKeys = {"x_min", "x_max", "nx",    "t_min",
                                         "t_max", "nt",    "margin"};
const std::set<std::string> kTopKeys = {"command", "params", "options"};
const std::set<std::string> kCommands = {"reduce", "check",  "build",
                                         "solve",  "verify", "cases"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw EngineError(std::string("unknown key '") + key + "' in " + where);
  }
}

std::string param_text_from_json(const json& v) {
  if (v.is_number())
    return to_string(Expr::number(rational_from_double(v.get<double>())));
  if (v.is_string()) return v.get<std::string>();
  throw EngineError("parameter values must be numbers or expression strings");
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void JobConfig::merge_json(const json& doc) {
  if (!doc.is_object()) throw EngineError("config document must be an object");
  reject_unknown(doc, kTopKeys, "config");
  if (doc.contains("command")) command = doc.at("command").get<std::string>();
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    reject_unknown(p, kParamKeys, "params");
    for (const auto& [key, value] : p.items())
      params[key] = param_text_from_json(value);
  }
  if (doc.contains("options")) {
    const json& o = doc.at("options");
    reject_unknown(o, kOptionKeys, "options");
    if (o.contains("seed")) seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("tol")) tol = o.at("tol").get<double>();
    if (o.contains("constants")) {
      const json& c = o.at("constants");
      if (!c.is_array() || c.size() != 4)
        throw EngineError("constants must be an array of 4 numbers");
      for (std::size_t i = 0; i < 4; ++i) constants[i] = c[i].get<double>();
    }
    if (o.contains("grid")) {
      const json& g = o.at("grid");
      reject_unknown(g, kGridKeys, "grid");
      if (g.contains("x_min")) grid.x_min = g.at("x_min").get<double>();
      if (g.contains("x_max")) grid.x_max = g.at("x_max").get<double>();
      if (g.contains("nx")) grid.nx = g.at("nx").get<int>();
      if (g.contains("t_min")) grid.t_min = g.at("t_min").get<double>();
      if (g.contains("t_max")) grid.t_max = g.at("t_max").get<double>();
      if (g.contains("nt")) grid.nt = g.at("nt").get<int>();
      if (g.contains("margin")) grid.margin = g.at("margin").get<double>();
    }
  }
}

PdeParams JobConfig::pde_params() const {
  PdeParams p = PdeParams::symbolic();
  auto pick = [&](const char* name, Expr& slot) {
    auto it = params.find(name);
    if (it == params.end()) return;
    try {
      slot = parse(it->second);
    } catch (const SyntaxError& err) {
      throw EngineError(std::string("parameter ") + name + ": " + err.what());
    }
  };
  pick("alpha", p.alpha);
  pick("beta", p.beta);
  pick("gamma", p.gamma);
  pick("mu", p.mu);
  pick("nu", p.nu);
  pick("kappa", p.kappa);
  pick("D", p.D);
  return p;
}

namespace {

json params_json(const PdeParams& p) {
  json out = json::object();
  out["alpha"] = to_string(p.alpha);
  out["beta"] = to_string(p.beta);
  out["gamma"] = to_string(p.gamma);
  out["mu"] = to_string(p.mu);
  out["nu"] = to_string(p.nu);
  out["kappa"] = to_string(p.kappa);
  out["D"] = to_string(p.D);
  return out;
}

json options_json(const JobConfig& cfg) {
  json out = json::object();
  out["seed"] = cfg.seed;
  out["tol"] = format_number(cfg.tol);
  json grid = json::object();
  grid["x_min"] = format_number(cfg.grid.x_min);
  grid["x_max"] = format_number(cfg.grid.x_max);
  grid["nx"] = cfg.grid.nx;
  grid["t_min"] = format_number(cfg.grid.t_min);
  grid["t_max"] = format_number(cfg.grid.t_max);
  grid["nt"] = cfg.grid.nt;
  grid["margin"] = format_number(cfg.grid.margin);
  out["grid"] = grid;
  json consts = json::array();
  for (double c : cfg.constants) consts.push_back(format_number(c));
  out["constants"] = consts;
  return out;
}

json coefficients_json(const OdeCoefficients& c) {
  json out = json::object();
  for (const auto& [name, expr] : c.fields()) out[name] = to_string(*expr);
  return out;
}

json report_json(const LinearizationReport& rep) {
  json out = json::object();
  out["verdict"] = rep.verdict;
  json rows = json::array();
  for (const ConditionEntry& e : rep.conditions) {
    json row = json::object();
    row["index"] = e.index;
    row["expression"] = to_string(e.expression);
    row["satisfied"] = e.satisfied;
    row["status"] = e.status;
    row["max_residual"] = format_number(e.max_sample_residual);
    rows.push_back(row);
  }
  out["conditions"] = rows;
  return out;
}

json transformation_json(const PointTransformation& tr) {
  json out = json::object();
  out["chi"] = to_string(tr.chi);
  out["phi"] = to_string(tr.phi);
  out["psi"] = to_string(tr.psi);
  out["omega"] = to_string(tr.omega);
  return out;
}

json target_json(const LinearTarget& t) {
  json out = json::object();
  out["alpha_x"] = to_string(t.alpha_x);
  out["beta_x"] = to_string(t.beta_x);
  if (t.alpha_t) out["alpha_t"] = to_string(*t.alpha_t);
  if (t.beta_t) out["beta_t"] = to_string(*t.beta_t);
  if (t.x_domain) {
    out["x_domain"] = json::array(
        {format_number(t.x_domain->first), format_number(t.x_domain->second)});
  }
  return out;
}

json case_json(const CaseTag& tag) {
  json out = json::object();
  out["kind"] = case_name(tag.kind);
  json rows = json::array();
  for (const auto& [name, r] : tag.residuals) {
    json row = json::object();
    row["constraint"] = name;
    row["residual"] = format_number(r);
    rows.push_back(row);
  }
  out["constraint_residuals"] = rows;
  return out;
}

json descriptor_json(const SolutionDescriptor& sd) {
  json out = json::object();
  switch (sd.kind) {
    case SolutionDescriptor::Kind::ExplicitSinusoid:
      out["kind"] = "explicit-sinusoid";
      out["formula"] = to_string(sd.formula_s);
      break;
    case SolutionDescriptor::Kind::ExplicitCubic:
      out["kind"] = "explicit-cubic";
      out["formula"] = to_string(sd.formula_s);
      break;
    case SolutionDescriptor::Kind::ImplicitQuadratic:
      out["kind"] = "implicit-quadratic";
      out["relation"] = "u^2/2 + (" + to_string(sd.implicit_shift) +
                        ")*u = " + to_string(sd.formula_s);
      out["rhs_cubic"] = to_string(sd.formula_s);
      out["shift"] = to_string(sd.implicit_shift);
      break;
    case SolutionDescriptor::Kind::LinearTargetOnly:
      out["kind"] = "linear-target-only";
      break;
  }
  json consts = json::array();
  for (double c : sd.constants) consts.push_back(format_number(c));
  out["constants"] = consts;
  if (!sd.note.empty()) out["note"] = sd.note;
  if (sd.linear) {
    out["transformation"] = transformation_json(sd.linear->transform);
    out["target"] = target_json(sd.linear->target);
  }
  return out;
}

// Clamps the verification grid of the tangent-shaped transformation to the
// pole-free band |k x| <= 1.2.
GridSpec clamp_case22_grid(const GridSpec& user, const LinearTarget& target) {
  GridSpec g = user;
  if (target.x_domain) {
    double half = target.x_domain->second;  // pi / (2k)
    double k = std::numbers::pi / (2.0 * half);
    double lim = 1.2 / k;
    g.x_min = std::max(g.x_min, -lim);
    g.x_max = std::min(g.x_max, lim);
  }
  return g;
}

constexpr double kExplicitResidualTol = 1e-8;
constexpr double kPullbackResidualTol = 1e-5;

// verify-style certification of one numeric parameter set; fills `out`.
int verify_params(const PdeParams& p, const JobConfig& cfg, json& out) {
  CaseTag tag = classify(p, cfg.tol);
  out["case"] = case_json(tag);
  if (tag.kind == CaseKind::NotLinearizable) return 1;

  SolutionDescriptor sd = closed_form(tag, p, cfg.constants, cfg.seed);
  out["solution"] = descriptor_json(sd);
  json ver = json::object();
  double residual = 0.0;
  double threshold = kExplicitResidualTol;
  if (sd.kind == SolutionDescriptor::Kind::LinearTargetOnly) {
    GridSpec g = clamp_case22_grid(cfg.grid, sd.linear->target);
    residual = certify_linear_target(sd, g, cfg.seed);
    threshold = kPullbackResidualTol;
    ver["method"] = "integrate linear target, pull back, residual of the "
                    "traveling-wave equation";
  } else {
    residual = pde_residual(sd, cfg.grid);
    ver["method"] = "exact partials of the closed form in the source equation";
  }
  ver["max_relative_residual"] = format_number(residual);
  ver["threshold"] = format_number(threshold);
  bool pass = residual < threshold;
  ver["pass"] = pass;
  out["verification"] = ver;
  return pass ? 0 : 3;
}

}  // namespace

RunResult run_job(const JobConfig& cfg) {
  if (!kCommands.count(cfg.command))
    throw EngineError("unknown command '" + cfg.command + "'");

  RunResult result;
  json& rep = result.report;
  rep = json::object();
  rep["command"] = cfg.command;
  PdeParams p = cfg.pde_params();
  rep["params"] = params_json(p);
  rep["options"] = options_json(cfg);

  if (cfg.command == "reduce") {
    rep["coefficients"] = coefficients_json(reduce(p));
    return result;
  }

  if (cfg.command == "check") {
    LinearizationReport lr = is_linearizable(reduce(p), cfg.seed);
    rep["linearization"] = report_json(lr);
    if (p.is_numeric()) rep["case"] = case_json(classify(p, cfg.tol));
    result.exit_code = lr.verdict ? 0 : 1;
    return result;
  }

  if (cfg.command == "build") {
    try {
      LinearizeResult lin = linearize(reduce(p), cfg.seed);
      rep["linearization"] = report_json(lin.report);
      rep["transformation"] = transformation_json(lin.transform);
      rep["target"] = target_json(lin.target);
    } catch (const NotLinearizableError& err) {
      rep["linearization"] = report_json(err.report());
      result.exit_code = 1;
    }
    return result;
  }

  if (cfg.command == "solve") {
    CaseTag tag = classify(p, cfg.tol);
    rep["case"] = case_json(tag);
    if (tag.kind == CaseKind::NotLinearizable) {
      result.exit_code = 1;
      return result;
    }
    rep["solution"] = descriptor_json(closed_form(tag, p, cfg.constants, cfg.seed));
    return result;
  }

  if (cfg.command == "verify") {
    result.exit_code = verify_params(p, cfg, rep);
    return result;
  }

  // cases: the four canonical parameter sets end to end, each on its own
  // grid (the implicit cubic and the pole-free band have different safe
  // ranges; the x range of the last row clamps to |k x| <= 1.2).
  struct Row {
    const char* name;
    std::array<double, 7> v;  // alpha beta gamma mu nu kappa D
    std::array<double, 4> constants;
    GridSpec grid;
  };
  const GridSpec narrow{-2.0, 2.0, 100, 0.0, 1.0, 20, 0.1};
  const GridSpec wide{-10.0, 10.0, 201, 0.0, 1.0, 20, 0.1};
  const Row rows[] = {
      {"Case1", {0, 0, 0, 1, 0, 2, 1}, {1.0, 0.5, 0.0, 0.0}, narrow},
      {"Case21a", {0, 0, 0, 1, 1, 1, 1}, {1.0, 0.5, 0.25, 0.125}, narrow},
      {"Case21b", {4, 3, 0, 1, 1, 1, 1}, {2.0, 0.125, 0.25, 0.03125}, narrow},
      {"Case22", {4, 3, 1, 1, 1, 3, 1}, {1.0, 0.5, 0.25, 0.125}, wide},
  };
  json summary = json::array();
  int exit_code = 0;
  for (const Row& row : rows) {
    JobConfig sub = cfg;
    sub.constants = row.constants;
    sub.grid = row.grid;
    PdeParams rp = PdeParams::numeric(row.v[0], row.v[1], row.v[2], row.v[3],
                                      row.v[4], row.v[5], row.v[6]);
    json entry = json::object();
    entry["name"] = row.name;
    json pj = params_json(rp);
    entry["params"] = pj;
    int code = verify_params(rp, sub, entry);
    entry["pass"] = code == 0;
    if (code != 0) exit_code = 3;
    summary.push_back(entry);
  }
  rep["cases"] = summary;
  result.exit_code = exit_code;
  return result;
}

namespace {

void pretty_expr_block(std::ostringstream& os, const json& obj,
                       const char* title) {
  os << title << ":\n";
  for (const auto& [key, value] : obj.items()) {
    if (value.is_string())
      os << "  " << key << " = " << value.get<std::string>() << "\n";
  }
}

}  // namespace

std::string render_pretty(const nlohmann::json& report) {
  std::ostringstream os;
  os << "command: " << report.value("command", std::string{}) << "\n";
  if (report.contains("params")) {
    os << "params:";
    for (const auto& [key, value] : report.at("params").items())
      os << " " << key << "=" << value.get<std::string>();
    os << "\n";
  }
  if (report.contains("case")) {
    os << "case: " << report.at("case").value("kind", std::string{}) << "\n";
    for (const auto& row : report.at("case").at("constraint_residuals"))
      os << "  |" << row.value("constraint", std::string{})
         << "| = " << row.value("residual", std::string{}) << "\n";
  }
  if (report.contains("coefficients"))
    pretty_expr_block(os, report.at("coefficients"), "coefficients");
  if (report.contains("linearization")) {
    const json& lin = report.at("linearization");
    os << "conditions (satisfied/status/max residual):\n";
    for (const auto& row : lin.at("conditions")) {
      os << "  " << row.value("index", 0) << ": "
         << (row.value("satisfied", false) ? "yes " : "NO  ")
         << row.value("status", std::string{}) << "  "
         << row.value("max_residual", std::string{}) << "  "
         << row.value("expression", std::string{}) << "\n";
    }
    os << "verdict: "
       << (lin.value("verdict", false) ? "linearizable" : "not linearizable")
       << "\n";
  }
  if (report.contains("transformation"))
    pretty_expr_block(os, report.at("transformation"), "transformation");
  if (report.contains("target"))
    pretty_expr_block(os, report.at("target"), "target");
  if (report.contains("solution")) {
    const json& sol = report.at("solution");
    os << "solution kind: " << sol.value("kind", std::string{}) << "\n";
    if (sol.contains("formula"))
      os << "  u(s) = " << sol.value("formula", std::string{}) << "\n";
    if (sol.contains("relation"))
      os << "  " << sol.value("relation", std::string{}) << "\n";
    if (sol.contains("note")) os << "  note: " << sol.value("note", std::string{}) << "\n";
  }
  if (report.contains("verification")) {
    const json& v = report.at("verification");
    os << "verification: residual " << v.value("max_relative_residual", std::string{})
       << " (threshold " << v.value("threshold", std::string{}) << ") -> "
       << (v.value("pass", false) ? "pass" : "FAIL") << "\n";
  }
  if (report.contains("cases")) {
    os << "cases:\n";
    for (const auto& entry : report.at("cases")) {
      os << "  " << entry.value("name", std::string{}) << ": "
         << (entry.value("pass", false) ? "pass" : "FAIL");
      if (entry.contains("verification"))
        os << " (residual "
           << entry.at("verification").value("max_relative_residual", std::string{})
           << ")";
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace lin4

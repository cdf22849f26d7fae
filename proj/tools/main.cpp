#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "linearize4/report.hpp"

namespace {

// exit codes: 0 success / linearizable, 1 not linearizable,
//             2 input error, 3 verification failure
constexpr int kInputError = 2;

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("LINEARIZE4_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    return std::stoull(raw);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linearization of a class of fourth-order ODEs by point "
               "transformations, with a traveling-wave front end"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  bool pretty = false;
  std::map<std::string, std::string> param_flags;
  std::optional<std::uint64_t> seed_flag;
  std::optional<double> tol_flag;
  std::vector<double> constants_flag;
  std::optional<double> gx0, gx1, gt0, gt1, gmargin;
  std::optional<int> gnx, gnt;

  for (const char* name :
       {"reduce", "check", "build", "solve", "verify", "cases"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config document");
    sub->add_option("--out", out_path, "write the report to this path");
    sub->add_flag("--pretty", pretty, "human-readable output");
    for (const char* p : {"alpha", "beta", "gamma", "mu", "nu", "kappa", "D"})
      sub->add_option(std::string("--") + p, param_flags[p],
                      "parameter value or expression");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { seed_flag = v; }, "sampling seed");
    sub->add_option_function<double>(
        "--tol", [&](double v) { tol_flag = v; }, "classification tolerance");
    sub->add_option("--constants", constants_flag,
                    "four integration constants")
        ->expected(4);
    sub->add_option_function<double>("--x-min", [&](double v) { gx0 = v; });
    sub->add_option_function<double>("--x-max", [&](double v) { gx1 = v; });
    sub->add_option_function<int>("--nx", [&](int v) { gnx = v; });
    sub->add_option_function<double>("--t-min", [&](double v) { gt0 = v; });
    sub->add_option_function<double>("--t-max", [&](double v) { gt1 = v; });
    sub->add_option_function<int>("--nt", [&](int v) { gnt = v; });
    sub->add_option_function<double>("--margin", [&](double v) { gmargin = v; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return kInputError;
  }

  try {
    lin4::JobConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (auto s = env_seed()) cfg.seed = *s;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw lin4::EngineError("cannot open config file " + config_path);
      nlohmann::json doc = nlohmann::json::parse(in);
      std::string cmd = cfg.command;
      cfg.merge_json(doc);
      if (doc.contains("command") && doc.at("command") != cmd)
        throw lin4::EngineError("config command does not match the subcommand");
      cfg.command = cmd;
    }
    // flags override the config document
    for (const auto& [key, value] : param_flags)
      if (!value.empty()) cfg.params[key] = value;
    if (seed_flag) cfg.seed = *seed_flag;
    if (tol_flag) cfg.tol = *tol_flag;
    if (constants_flag.size() == 4)
      for (std::size_t i = 0; i < 4; ++i) cfg.constants[i] = constants_flag[i];
    if (gx0) cfg.grid.x_min = *gx0;
    if (gx1) cfg.grid.x_max = *gx1;
    if (gnx) cfg.grid.nx = *gnx;
    if (gt0) cfg.grid.t_min = *gt0;
    if (gt1) cfg.grid.t_max = *gt1;
    if (gnt) cfg.grid.nt = *gnt;
    if (gmargin) cfg.grid.margin = *gmargin;

    lin4::RunResult result = lin4::run_job(cfg);
    std::string text = pretty ? lin4::render_pretty(result.report)
                              : result.report.dump(2) + "\n";
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out) throw lin4::EngineError("cannot write report to " + out_path);
      out << text;
    } else {
      std::cout << text;
    }
    return result.exit_code;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInputError;
  } catch (const lin4::EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

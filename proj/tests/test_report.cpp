#include <doctest.h>

#include <array>
#include <cstdio>
#include <memory>
#include <cstdlib>
#include <string>

#include "linearize4/report.hpp"

using namespace lin4;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(LIN4_CLI_PATH) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe != nullptr);
  CliResult r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0)
    r.out.append(buf.data(), n);
  int status = pclose(pipe.release());
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

JobConfig tangent_config(const char* command) {
  JobConfig cfg;
  cfg.command = command;
  cfg.params = {{"alpha", "4"}, {"beta", "3"},  {"gamma", "1"}, {"mu", "1"},
                {"nu", "1"},    {"kappa", "3"}, {"D", "1"}};
  return cfg;
}

}  // namespace

TEST_CASE("config documents reject unknown keys") {
  JobConfig cfg;
  CHECK_THROWS_AS(cfg.merge_json(json::parse(R"({"comand": "check"})")),
                  EngineError);
  CHECK_THROWS_AS(cfg.merge_json(json::parse(R"({"params": {"alpha": 1, "zeta": 2}})")),
                  EngineError);
  CHECK_THROWS_AS(
      cfg.merge_json(json::parse(R"({"options": {"speed": 3}})")), EngineError);
  CHECK_THROWS_AS(
      cfg.merge_json(json::parse(R"({"options": {"grid": {"dx": 0.1}}})")),
      EngineError);
  CHECK_NOTHROW(cfg.merge_json(json::parse(
      R"({"command": "check", "params": {"alpha": 0.5},
          "options": {"seed": 7, "tol": 1e-9, "constants": [1, 2, 3, 4],
                      "grid": {"x_min": -1, "x_max": 1}}})")));
  CHECK(cfg.seed == 7);
  CHECK(cfg.params.at("alpha") == "1/2");
}

TEST_CASE("identical config and seed produce byte-identical reports") {
  JobConfig cfg = tangent_config("check");
  RunResult a = run_job(cfg);
  RunResult b = run_job(cfg);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.exit_code == b.exit_code);
}

TEST_CASE("reports are self-describing: a rerun from the echo reproduces them") {
  JobConfig cfg = tangent_config("verify");
  cfg.seed = 23;
  RunResult first = run_job(cfg);
  REQUIRE(first.exit_code == 0);

  JobConfig again;
  again.command = first.report.at("command").get<std::string>();
  for (const auto& [key, value] : first.report.at("params").items())
    again.params[key] = value.get<std::string>();
  const json& opt = first.report.at("options");
  again.seed = opt.at("seed").get<std::uint64_t>();
  again.tol = std::stod(opt.at("tol").get<std::string>());
  again.grid.x_min = std::stod(opt.at("grid").at("x_min").get<std::string>());
  again.grid.x_max = std::stod(opt.at("grid").at("x_max").get<std::string>());
  again.grid.nx = opt.at("grid").at("nx").get<int>();
  again.grid.t_min = std::stod(opt.at("grid").at("t_min").get<std::string>());
  again.grid.t_max = std::stod(opt.at("grid").at("t_max").get<std::string>());
  again.grid.nt = opt.at("grid").at("nt").get<int>();
  again.grid.margin = std::stod(opt.at("grid").at("margin").get<std::string>());
  for (std::size_t i = 0; i < 4; ++i)
    again.constants[i] = std::stod(opt.at("constants")[i].get<std::string>());

  RunResult second = run_job(again);
  CHECK(first.report.dump() == second.report.dump());
}

TEST_CASE("check verdicts map to exit codes with rows flagged") {
  RunResult good = run_job(tangent_config("check"));
  CHECK(good.exit_code == 0);
  CHECK(good.report.at("linearization").at("verdict").get<bool>());

  JobConfig bad = tangent_config("check");
  bad.params["beta"] = "1";
  RunResult r = run_job(bad);
  CHECK(r.exit_code == 1);
  const json& rows = r.report.at("linearization").at("conditions");
  CHECK_FALSE(rows[1].at("satisfied").get<bool>());  // 4 b0 - 3 a1
}

TEST_CASE("reduce reports the coefficient table in grammar form") {
  JobConfig cfg;
  cfg.command = "reduce";
  RunResult r = run_job(cfg);  // fully symbolic defaults
  const json& c = r.report.at("coefficients");
  CHECK(parse(c.at("A1").get<std::string>()) ==
        parse("alpha/(nu*y + mu*D^2)"));
  CHECK(parse(c.at("C0").get<std::string>()) ==
        parse("(2*gamma*y + kappa - D^2)/(nu*y + mu*D^2)"));
  CHECK(parse(c.at("D0").get<std::string>()).is_zero());
}

TEST_CASE("expressions in reports re-parse to the printed value") {
  JobConfig cfg = tangent_config("build");
  cfg.params["alpha"] = "4*nu";
  cfg.params["beta"] = "3*nu";
  cfg.params["gamma"] = "gamma";
  cfg.params["mu"] = "mu";
  cfg.params["nu"] = "nu";
  cfg.params["kappa"] = "(2*gamma*mu+nu)*D^2/nu";
  cfg.params["D"] = "D";
  RunResult r = run_job(cfg);
  REQUIRE(r.exit_code == 0);
  const json& tr = r.report.at("transformation");
  for (const char* key : {"chi", "phi", "psi", "omega"}) {
    std::string text = tr.at(key).get<std::string>();
    CHECK(to_string(parse(text)) == text);
  }
}

TEST_CASE("cases command certifies all four canonical parameter sets") {
  JobConfig cfg;
  cfg.command = "cases";
  RunResult r = run_job(cfg);
  CHECK(r.exit_code == 0);
  const json& rows = r.report.at("cases");
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) CHECK(row.at("pass").get<bool>());
  CHECK(rows[3].at("case").at("kind") == "Case22");
}

TEST_CASE("solve emits a descriptor with the transformation for the tangent family") {
  JobConfig cfg = tangent_config("solve");
  RunResult r = run_job(cfg);
  CHECK(r.exit_code == 0);
  const json& sol = r.report.at("solution");
  CHECK(sol.at("kind") == "linear-target-only");
  CHECK(sol.contains("transformation"));
  CHECK(parse(sol.at("target").at("beta_t").get<std::string>()) ==
        parse("-9*(1+t^2)^(-4)"));

  // pretty rendering carries the verdict-bearing fields
  std::string pretty = render_pretty(r.report);
  CHECK(pretty.find("linear-target-only") != std::string::npos);
}

TEST_CASE("cli: exit codes and report shape") {
  CliResult ok = run_cli(
      "check --alpha 4 --beta 3 --gamma 1 --mu 1 --nu 1 --kappa 3 --D 1");
  CHECK(ok.exit_code == 0);
  json rep = json::parse(ok.out);
  CHECK(rep.at("case").at("kind") == "Case22");

  CliResult no = run_cli(
      "check --alpha 1 --beta 1 --gamma 1 --mu 1 --nu 1 --kappa 1 --D 1");
  CHECK(no.exit_code == 1);

  CliResult malformed = run_cli("check --alpha 'tan(*x)'");
  CHECK(malformed.exit_code == 2);

  CliResult usage = run_cli("frobnicate");
  CHECK(usage.exit_code == 2);

  // residual over tolerance: the stencil grid is far too coarse here
  CliResult coarse = run_cli(
      "verify --alpha 4 --beta 3 --gamma 1 --mu 1 --nu 1 --kappa 3 --D 1 "
      "--x-min -10 --x-max 10 --nx 40");
  CHECK(coarse.exit_code == 3);
  CHECK_FALSE(json::parse(coarse.out).at("verification").at("pass").get<bool>());
}

TEST_CASE("cli: config documents combine with flag overrides and --out") {
  std::string dir = "/tmp/lin4_cli_test";
  std::string cfg_path = dir + "/job.json";
  std::string out_path = dir + "/report.json";
  REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);
  {
    std::FILE* f = std::fopen(cfg_path.c_str(), "w");
    REQUIRE(f != nullptr);
    std::fputs(R"({"command": "check",
                   "params": {"alpha": 4, "beta": 3, "gamma": 1,
                              "mu": 1, "nu": 1, "kappa": 3, "D": 1},
                   "options": {"seed": 9}})",
               f);
    std::fclose(f);
  }
  CliResult direct = run_cli("check --config " + cfg_path);
  CHECK(direct.exit_code == 0);
  json rep = json::parse(direct.out);
  CHECK(rep.at("options").at("seed").get<std::uint64_t>() == 9);

  // a flag overrides the document and breaks the constraint set
  CliResult overridden = run_cli("check --config " + cfg_path + " --beta 1");
  CHECK(overridden.exit_code == 1);

  CliResult to_file =
      run_cli("check --config " + cfg_path + " --out " + out_path);
  CHECK(to_file.exit_code == 0);
  CHECK(to_file.out.empty());
  std::FILE* f = std::fopen(out_path.c_str(), "r");
  REQUIRE(f != nullptr);
  std::fclose(f);
}

TEST_CASE("cli: environment seed is honored and flags override it") {
  CliResult base = run_cli("reduce");
  CHECK(json::parse(base.out).at("options").at("seed").get<std::uint64_t>() == 1);

  auto with_env = [](const std::string& args) {
    std::string cmd =
        std::string("env LINEARIZE4_SEED=77 ") + LIN4_CLI_PATH + " " + args +
        " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0)
      out.append(buf.data(), n);
    pclose(pipe.release());
    return out;
  };
  CHECK(json::parse(with_env("reduce")).at("options").at("seed").get<std::uint64_t>() ==
        77);
  CHECK(json::parse(with_env("reduce --seed 5"))
            .at("options")
            .at("seed")
            .get<std::uint64_t>() == 5);
}

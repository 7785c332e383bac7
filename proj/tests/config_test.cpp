// Copyright 2026 The tigames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"
#include "tigames/config.hpp"
#include "tigames/runner.hpp"

namespace tigames {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tigames_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const std::string& e : errs) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(Parse, MinimalConfigFillsDefaults) {
  const ExperimentConfig c = parse_config(R"({"schema_version": 1, "command": "lq-verify"})");
  EXPECT_EQ(c.command, "lq-verify");
  EXPECT_EQ(c.game.preset, "ex1");
  EXPECT_EQ(c.numerics, NumericsConfig{});
  EXPECT_EQ(c.game.params, LQParams{});
}

TEST(Parse, ZeroPlayersRejected) {
  const auto errs = errors_of(R"({"schema_version": 1, "command": "solve-nplayer", "game": {"params": {"players": 0}}})");
  EXPECT_TRUE(mentions(errs, "num_players must be >= 1"));
  EXPECT_TRUE(mentions(errs, "game.params.players"));
}

TEST(Parse, UnknownKeysRejectedWithPath) {
  const auto errs =
      errors_of(R"({"schema_version": 1, "command": "zerosum", "numerics": {"stepz": 3}, "colour": "red"})");
  EXPECT_TRUE(mentions(errs, "numerics.stepz"));
  EXPECT_TRUE(mentions(errs, "colour"));
}

TEST(Parse, RequiredFieldsAndRanges) {
  EXPECT_TRUE(mentions(errors_of(R"({"command": "lq-verify"})"), "schema_version"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 2, "command": "lq-verify"})"), "schema_version"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 1})"), "command"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 1, "command": "dance"})"), "command"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 1, "command": "lq-verify", "numerics": {"picard_damping": 1.5}})"),
                       "numerics.picard_damping"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 1, "command": "lq-verify", "game": {"preset": "custom"}})"),
                       "game.custom"));
  EXPECT_TRUE(mentions(errors_of(R"({"schema_version": 1, "command": "converge", "sweep": {"ns": [2, 0]}})"),
                       "sweep.ns"));
}

TEST(Parse, CorruptJson) {
  const auto errs = errors_of(R"({"schema_version": 1, "command": )");
  ASSERT_FALSE(errs.empty());
  EXPECT_TRUE(mentions(errs, "parse error"));
}

TEST(Parse, RoundTrip) {
  const std::string text = R"({
    "schema_version": 1, "command": "converge", "seed": 18446744073709551615,
    "game": {"preset": "custom", "x0": 0.25, "params": {"sigma": 0.7, "players": 5, "kappa1": 0.5},
             "custom": {"b_a": 2.0, "f_aa": -1.0, "G_mm": 0.5, "grid_points": 51}},
    "numerics": {"steps": 30, "ridge": 1e-6, "quadrature_panels": 64},
    "sweep": {"ns": [3, 9], "mode": "numerical", "u_mid": 0.25},
    "output_dir": "somewhere"})";
  const ExperimentConfig a = parse_config(text);
  const ExperimentConfig b = parse_config(serialize_config(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(b.seed, 18446744073709551615ull);
  EXPECT_EQ(serialize_config(a), serialize_config(b));
}

TEST(Custom, CoefficientTable) {
  ExperimentConfig c = parse_config(R"({"schema_version": 1, "command": "solve-meanfield",
    "game": {"preset": "custom", "x0": 1.5, "params": {"players": 1},
             "custom": {"b_a": 2.0, "b_x": -1.0, "b_0": 0.5, "f_aa": -1.0, "f_a": 0.1, "f_x": 0.2,
                        "f_xx": 0.3, "f_mean_state": 0.4, "f_mean_control": 0.5, "g_x": 1.0, "g_xx": -0.5}}})");
  const GameSpec s = game_from_config(c);
  EXPECT_EQ(s.num_players, 1u);
  EXPECT_EQ(s.initial_mean, 1.5);
  const std::vector<double> xs{1.0, 3.0}, as{0.5, -0.5};
  const LawView law = LawView::summarize(xs, as);
  EXPECT_DOUBLE_EQ(s.drift_b(0.0, 1.0, law, 0.5), 2.0 * 0.5 - 1.0 + 0.5);
  EXPECT_DOUBLE_EQ(s.running_f(0.0, 2.0, law, 1.0), -1.0 + 0.1 + 0.4 + 1.2 + 0.8 + 0.0);
  EXPECT_DOUBLE_EQ(s.terminal_g(2.0, law), 2.0 - 2.0);
}

ExperimentConfig config_for(const std::string& command, const std::string& name) {
  ExperimentConfig c;
  c.command = command;
  c.output_dir = scratch(name).string();
  c.numerics.steps = 10;
  c.numerics.paths = 1u << 11;
  c.numerics.particles = 1u << 11;
  return c;
}

TEST(Run, LqVerifyPasses) {
  for (const char* preset : {"ex1", "ex2", "rep51"}) {
    ExperimentConfig c = config_for("lq-verify", std::string("lq_") + preset);
    c.game.preset = preset;
    c.game.params.kappa1 = 0.5;
    c.game.params.kappa2 = 0.5;
    const Verdict v = run(c);
    EXPECT_TRUE(v.pass()) << preset;
    EXPECT_EQ(v.exit_code(), kExitPass);
    const auto j = nlohmann::json::parse(slurp(fs::path(c.output_dir) / "verdict.json"));
    EXPECT_EQ(j["pass"], true);
    EXPECT_EQ(j["checks"].size(), v.checks.size());
  }
}

TEST(Run, ConvergeWithoutInteractionSkipsSlope) {
  ExperimentConfig c = config_for("converge", "converge0");
  c.game.preset = "rep51";
  const Verdict v = run(c);
  EXPECT_EQ(v.exit_code(), kExitPass);
  bool noted = false;
  for (const Check& k : v.checks) noted = noted || (k.name == "rate_slope" && !k.note.empty());
  EXPECT_TRUE(noted);
  const std::string csv = slurp(fs::path(c.output_dir) / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,value_err_u0,value_err_umid,control_W2_int,gamma,eta,seconds");
}

std::string drop_last_column(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << "\n";
  return out.str();
}

TEST(Run, OutputsAreByteIdentical) {
  ExperimentConfig a = config_for("solve-nplayer", "det_a");
  ExperimentConfig b = config_for("solve-nplayer", "det_b");
  a.game.preset = b.game.preset = "ex2";
  run(a);
  run(b);
  const std::string csv = slurp(fs::path(a.output_dir) / "nplayer.csv");
  EXPECT_EQ(csv, slurp(fs::path(b.output_dir) / "nplayer.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,player,mean_Y,mean_alpha,fixed_point_residual,mstar_bound_slack");

  ExperimentConfig c = config_for("converge", "det_c"), d = config_for("converge", "det_d");
  c.game.preset = d.game.preset = "rep51";
  c.game.params.kappa1 = d.game.params.kappa1 = 0.5;
  run(c);
  run(d);
  // Wall time is the only column allowed to differ.
  EXPECT_EQ(drop_last_column(slurp(fs::path(c.output_dir) / "sweep.csv")),
            drop_last_column(slurp(fs::path(d.output_dir) / "sweep.csv")));
  EXPECT_EQ(slurp(fs::path(c.output_dir) / "sweep_loglog.dat"), slurp(fs::path(d.output_dir) / "sweep_loglog.dat"));
}

TEST(Run, NonConvergenceExitCode) {
  ExperimentConfig c = config_for("solve-nplayer", "picard1");
  c.numerics.picard_max_iters = 1;
  const Verdict v = run(c);
  EXPECT_FALSE(v.converged);
  EXPECT_EQ(v.exit_code(), kExitNotConverged);
}

TEST(Run, CustomMeanFieldGame) {
  ExperimentConfig c = config_for("solve-meanfield", "custom_mf");
  c.game.preset = "custom";
  c.game.params.players = 1;
  c.game.custom = CustomGame{};
  c.game.custom->a_lower = -2.0;
  c.game.custom->a_upper = 2.0;
  const Verdict v = run(c);
  EXPECT_TRUE(v.converged) << v.message;
  const std::string csv = slurp(fs::path(c.output_dir) / "meanfield.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iter,sup_t_W2,Y0_mean,alpha_sup_change");

  c.game.params.players = 2;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Verdict, OverallPassIffAllChecksPass) {
  Verdict v;
  v.checks.push_back({"a", 0.0, 1.0, true, ""});
  EXPECT_TRUE(v.pass());
  v.checks.push_back({"b", 2.0, 1.0, false, ""});
  EXPECT_FALSE(v.pass());
  EXPECT_EQ(v.exit_code(), kExitCheckFailed);
  const auto j = nlohmann::json::parse(verdict_json(v));
  EXPECT_EQ(j["pass"], false);
  EXPECT_EQ(j["exit_code"], 1);
}

int cli(const std::string& args) {
  const int rc = std::system((std::string(TIGAMES_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  fs::create_directories(p);
  std::ofstream(p / "config.json") << text;
  return p;
}

TEST(Cli, ExitCodes) {
  const fs::path ok = write_config("cli_ok", R"({"schema_version": 1, "command": "lq-verify"})");
  EXPECT_EQ(cli("lq-verify --config " + (ok / "config.json").string() + " --out " + (ok / "out").string()), 0);
  EXPECT_TRUE(fs::exists(ok / "out" / "verdict.json"));
  EXPECT_EQ(cli("zerosum --config " + (ok / "config.json").string()), 2);

  const fs::path bad = write_config("cli_bad", R"({"schema_version": 1, "command": )");
  EXPECT_EQ(cli("lq-verify --config " + (bad / "config.json").string()), 2);
  EXPECT_EQ(cli("lq-verify"), 2);
  EXPECT_EQ(cli("lq-verify --config " + (ok / "config.json").string() + " --seed notanumber"), 2);
}

}  // namespace
}  // namespace tigames

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

#include "tigames/config.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "tigames/presets.hpp"

namespace tigames {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

// Reads typed fields from one JSON object and records every problem.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (!obj_.is_object()) {
      fail("", "expected an object");
      valid_ = false;
    }
  }

  bool valid() const { return valid_; }
  bool has(const std::string& key) const { return valid_ && obj_.contains(key); }
  const json& at(const std::string& key) const { return obj_.at(key); }
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void fail(const std::string& key, const std::string& msg) {
    errors_.push_back((key.empty() ? (path_.empty() ? std::string("<root>") : path_) : path(key)) + ": " + msg);
  }

  void reject_unknown(std::initializer_list<const char*> allowed) {
    if (!valid_) return;
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj_.items()) {
      if (!ok.count(item.key())) fail(item.key(), "unknown key");
    }
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!at(key).is_number()) return fail(key, "expected a number");
    out = at(key).get<double>();
  }

  void count(const std::string& key, std::size_t& out) {
    if (!has(key)) return;
    if (!at(key).is_number_integer() || (at(key).is_number_integer() && !at(key).is_number_unsigned() && at(key).get<long long>() < 0)) {
      return fail(key, "expected a nonnegative integer");
    }
    out = at(key).get<std::size_t>();
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    if (!at(key).is_number_integer()) return fail(key, "expected an integer");
    out = at(key).get<int>();
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    if (!at(key).is_number_unsigned()) return fail(key, "expected an unsigned 64-bit integer");
    out = at(key).get<std::uint64_t>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!at(key).is_string()) return fail(key, "expected a string");
    out = at(key).get<std::string>();
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  bool valid_ = true;
};

void read_params(const json& j, LQParams& p, std::vector<std::string>& errors) {
  ObjectReader r(j, "game.params", errors);
  r.reject_unknown({"sigma", "gamma", "horizon", "k", "kappa1", "kappa2", "a_bar", "players"});
  r.number("sigma", p.sigma);
  r.number("gamma", p.gamma);
  r.number("horizon", p.horizon);
  r.number("k", p.k);
  r.number("kappa1", p.kappa1);
  r.number("kappa2", p.kappa2);
  r.number("a_bar", p.a_bar);
  if (r.has("players") && r.at("players").is_number_integer() && r.at("players").get<long long>() < 1) {
    r.fail("players", "num_players must be >= 1");
  } else {
    r.count("players", p.players);
  }
  if (!(p.sigma >= 0.0)) r.fail("sigma", "must be >= 0");
  if (!(p.horizon > 0.0)) r.fail("horizon", "must be > 0");
  if (!(p.a_bar > 0.0)) r.fail("a_bar", "must be > 0");
  if (!(p.k > 0.0)) r.fail("k", "must be > 0");
}

void read_custom(const json& j, CustomGame& c, std::vector<std::string>& errors) {
  ObjectReader r(j, "game.custom", errors);
  r.reject_unknown({"b_a", "b_x", "b_0", "f_aa", "f_a", "f_x", "f_xx", "f_mean_state", "f_mean_control",
                    "g_x", "g_xx", "G_mm", "a_lower", "a_upper", "grid_points"});
  r.number("b_a", c.b_a);
  r.number("b_x", c.b_x);
  r.number("b_0", c.b_0);
  r.number("f_aa", c.f_aa);
  r.number("f_a", c.f_a);
  r.number("f_x", c.f_x);
  r.number("f_xx", c.f_xx);
  r.number("f_mean_state", c.f_mean_state);
  r.number("f_mean_control", c.f_mean_control);
  r.number("g_x", c.g_x);
  r.number("g_xx", c.g_xx);
  r.number("G_mm", c.G_mm);
  r.number("a_lower", c.a_lower);
  r.number("a_upper", c.a_upper);
  r.count("grid_points", c.grid_points);
  if (!(c.a_lower < c.a_upper)) r.fail("a_upper", "must exceed a_lower");
  if (c.grid_points < 2) r.fail("grid_points", "must be >= 2");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  std::vector<std::string> errors;
  ExperimentConfig c;
  ObjectReader r(root, "", errors);
  if (!r.valid()) throw ConfigError(errors);
  r.reject_unknown({"schema_version", "command", "game", "numerics", "sweep", "seed", "output_dir"});

  if (!r.has("schema_version")) {
    r.fail("schema_version", "missing required field");
  } else {
    r.integer("schema_version", c.schema_version);
    if (c.schema_version != 1) r.fail("schema_version", "unsupported version (expected 1)");
  }
  if (!r.has("command")) {
    r.fail("command", "missing required field");
  } else {
    r.string("command", c.command);
    static const std::set<std::string> commands{"lq-verify", "solve-nplayer", "solve-meanfield", "zerosum",
                                                "converge"};
    if (!commands.count(c.command)) r.fail("command", "unknown command '" + c.command + "'");
  }
  r.seed("seed", c.seed);
  r.string("output_dir", c.output_dir);

  if (r.has("game")) {
    ObjectReader g(r.at("game"), "game", errors);
    g.reject_unknown({"preset", "params", "x0", "custom"});
    g.string("preset", c.game.preset);
    g.number("x0", c.game.x0);
    if (g.has("params")) read_params(g.at("params"), c.game.params, errors);
    if (g.has("custom")) {
      c.game.custom = CustomGame{};
      read_custom(g.at("custom"), *c.game.custom, errors);
    }
    static const std::set<std::string> presets{"ex1", "ex2", "rep51", "custom"};
    if (!presets.count(c.game.preset)) g.fail("preset", "unknown preset '" + c.game.preset + "'");
    if (c.game.preset == "custom" && !c.game.custom) g.fail("custom", "required when preset is custom");
  }
  if (c.game.params.players < 1) errors.push_back("game.params.players: num_players must be >= 1");

  if (r.has("numerics")) {
    ObjectReader n(r.at("numerics"), "numerics", errors);
    NumericsConfig& v = c.numerics;
    n.reject_unknown({"steps", "paths", "particles", "basis_degree", "ridge", "picard_damping", "picard_tol",
                      "picard_max_iters", "max_outer", "tol_w", "quadrature_panels"});
    n.count("steps", v.steps);
    n.count("paths", v.paths);
    n.count("particles", v.particles);
    n.integer("basis_degree", v.basis_degree);
    n.number("ridge", v.ridge);
    n.number("picard_damping", v.picard_damping);
    n.number("picard_tol", v.picard_tol);
    n.count("picard_max_iters", v.picard_max_iters);
    n.count("max_outer", v.max_outer);
    n.number("tol_w", v.tol_w);
    n.count("quadrature_panels", v.quadrature_panels);
    if (v.steps < 1) n.fail("steps", "must be >= 1");
    if (v.paths < 2) n.fail("paths", "must be >= 2");
    if (v.particles < 1000) n.fail("particles", "must be >= 1000");
    if (v.basis_degree < 0 || v.basis_degree > 3) n.fail("basis_degree", "must be in [0, 3]");
    if (!(v.ridge >= 0.0)) n.fail("ridge", "must be >= 0");
    if (!(v.picard_damping > 0.0 && v.picard_damping <= 1.0)) n.fail("picard_damping", "must be in (0, 1]");
    if (!(v.picard_tol > 0.0)) n.fail("picard_tol", "must be > 0");
    if (v.picard_max_iters < 1) n.fail("picard_max_iters", "must be >= 1");
    if (v.max_outer < 1) n.fail("max_outer", "must be >= 1");
    if (!(v.tol_w > 0.0)) n.fail("tol_w", "must be > 0");
    if (v.quadrature_panels < 10) n.fail("quadrature_panels", "must be >= 10");
  }

  if (r.has("sweep")) {
    ObjectReader s(r.at("sweep"), "sweep", errors);
    s.reject_unknown({"ns", "mode", "u_mid"});
    if (s.has("ns")) {
      const json& ns = s.at("ns");
      if (!ns.is_array() || ns.empty()) {
        s.fail("ns", "expected a nonempty array of positive integers");
      } else {
        c.sweep.ns.clear();
        for (const auto& v : ns) {
          if (!v.is_number_unsigned() || v.get<std::size_t>() < 1) {
            s.fail("ns", "expected a nonempty array of positive integers");
            break;
          }
          c.sweep.ns.push_back(v.get<std::size_t>());
        }
      }
    }
    s.string("mode", c.sweep.mode);
    s.number("u_mid", c.sweep.u_mid);
    if (c.sweep.mode != "closed_form" && c.sweep.mode != "numerical") s.fail("mode", "expected closed_form or numerical");
    if (!(c.sweep.u_mid >= 0.0 && c.sweep.u_mid <= c.game.params.horizon)) s.fail("u_mid", "must lie in [0, horizon]");
  }

  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  const LQParams& p = c.game.params;
  json game = {{"preset", c.game.preset},
               {"x0", c.game.x0},
               {"params",
                {{"sigma", p.sigma},
                 {"gamma", p.gamma},
                 {"horizon", p.horizon},
                 {"k", p.k},
                 {"kappa1", p.kappa1},
                 {"kappa2", p.kappa2},
                 {"a_bar", p.a_bar},
                 {"players", p.players}}}};
  if (c.game.custom) {
    const CustomGame& g = *c.game.custom;
    game["custom"] = {{"b_a", g.b_a},       {"b_x", g.b_x},
                      {"b_0", g.b_0},       {"f_aa", g.f_aa},
                      {"f_a", g.f_a},       {"f_x", g.f_x},
                      {"f_xx", g.f_xx},     {"f_mean_state", g.f_mean_state},
                      {"f_mean_control", g.f_mean_control}, {"g_x", g.g_x},
                      {"g_xx", g.g_xx},     {"G_mm", g.G_mm},
                      {"a_lower", g.a_lower}, {"a_upper", g.a_upper},
                      {"grid_points", g.grid_points}};
  }
  const NumericsConfig& n = c.numerics;
  json root = {{"schema_version", c.schema_version},
               {"command", c.command},
               {"game", game},
               {"numerics",
                {{"steps", n.steps},
                 {"paths", n.paths},
                 {"particles", n.particles},
                 {"basis_degree", n.basis_degree},
                 {"ridge", n.ridge},
                 {"picard_damping", n.picard_damping},
                 {"picard_tol", n.picard_tol},
                 {"picard_max_iters", n.picard_max_iters},
                 {"max_outer", n.max_outer},
                 {"tol_w", n.tol_w},
                 {"quadrature_panels", n.quadrature_panels}}},
               {"sweep", {{"ns", c.sweep.ns}, {"mode", c.sweep.mode}, {"u_mid", c.sweep.u_mid}}},
               {"seed", c.seed},
               {"output_dir", c.output_dir}};
  return root.dump(2) + "\n";
}

GameSpec game_from_config(const ExperimentConfig& config) {
  const GameConfig& g = config.game;
  GameSpec spec;
  if (g.preset == "custom") {
    if (!g.custom) throw ModelError("custom preset without a coefficient table");
    const CustomGame c = *g.custom;
    spec.name = "custom";
    spec.num_players = g.params.players;
    spec.horizon = g.params.horizon;
    const double sigma = g.params.sigma;
    spec.sigma = [sigma](double, double) { return sigma; };
    spec.drift_b = [c](double, double x, const LawView&, double a) { return c.b_a * a + c.b_x * x + c.b_0; };
    spec.running_f = [c](double, double x, const LawView& law, double a) {
      return c.f_aa * a * a + c.f_a * a + c.f_x * x + c.f_xx * x * x + c.f_mean_state * law.mean_state +
             c.f_mean_control * law.mean_control;
    };
    spec.terminal_g = [c](double x, const LawView&) { return c.g_x * x + c.g_xx * x * x; };
    spec.G = CouplingFunction::quadratic(c.G_mm, 0.0, 0.0);
    spec.phi1 = [](double x) { return x; };
    spec.phi2 = [](const LawView&) { return 0.0; };
    spec.phi2_bound = 0.0;
    spec.control_set = ControlSet{c.a_lower, c.a_upper, c.grid_points};
  } else {
    spec = preset_game(g.preset, g.params);
  }
  spec.initial_mean = g.x0;
  return spec;
}

}  // namespace tigames

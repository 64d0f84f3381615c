#include "gmr/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gmr/eos.hpp"
#include "gmr/errors.hpp"

namespace gmr {

namespace {

using json = nlohmann::json;

// Reads typed members of one config block and remembers every problem.
class BlockReader {
public:
  BlockReader(const json& root, std::string block, std::vector<std::string>& problems)
      : block_(std::move(block)), problems_(problems) {
    if (!root.contains(block_)) return;
    if (!root[block_].is_object()) {
      problems_.push_back(block_ + " must be an object");
      return;
    }
    obj_ = &root[block_];
  }

  bool present() const { return obj_ != nullptr; }

  void number(const char* key, double& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number()) return bad(key, "a number");
    out = v->get<double>();
  }

  void optional_number(const char* key, std::optional<double>& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number()) return bad(key, "a number");
    out = v->get<double>();
  }

  void integer(const char* key, int& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number_integer()) return bad(key, "an integer");
    out = v->get<int>();
  }

  void unsigned_integer(const char* key, std::uint64_t& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_number_unsigned()) return bad(key, "a non-negative integer");
    out = v->get<std::uint64_t>();
  }

  void string(const char* key, std::string& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_string()) return bad(key, "a string");
    out = v->get<std::string>();
  }

  void boolean(const char* key, bool& out) {
    const json* v = get(key);
    if (!v) return;
    if (!v->is_boolean()) return bad(key, "true or false");
    out = v->get<bool>();
  }

  /// Nested object member, e.g. boundary.tau.
  const json* object(const char* key) {
    const json* v = get(key);
    if (!v) return nullptr;
    if (!v->is_object()) {
      bad(key, "an object");
      return nullptr;
    }
    return v;
  }

  void finish() {
    if (!obj_) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!seen_.count(it.key())) problems_.push_back(block_ + "." + it.key() + ": unknown key");
  }

private:
  const json* get(const char* key) {
    seen_.insert(key);
    if (!obj_ || !obj_->contains(key)) return nullptr;
    return &(*obj_)[key];
  }
  void bad(const char* key, const char* what) { problems_.push_back(block_ + "." + key + " must be " + what); }

  std::string block_;
  std::vector<std::string>& problems_;
  const json* obj_ = nullptr;
  std::set<std::string> seen_;
};

void apply_override(json& root, const std::string& spec, std::vector<std::string>& problems) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    problems.push_back("override '" + spec + "' must have the form key.path=value");
    return;
  }
  const std::string path = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &root;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t q = 0; q < parts.size(); ++q) {
    if (parts[q].empty()) {
      problems.push_back("override '" + spec + "' has an empty path component");
      return;
    }
    if (!node->is_object()) *node = json::object();
    if (q + 1 == parts.size())
      (*node)[parts[q]] = value;
    else
      node = &(*node)[parts[q]];
  }
}

std::string closure_name(Closure c) { return c == Closure::Full ? "full" : "small-slope"; }

}  // namespace

SimConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  std::vector<std::string> problems;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  for (const auto& o : overrides) apply_override(root, o, problems);

  static const std::set<std::string> blocks = {"grid", "physics", "regularization", "eos",
                                               "boundary", "run", "initial"};
  for (auto it = root.begin(); it != root.end(); ++it)
    if (!blocks.count(it.key())) problems.push_back(it.key() + ": unknown block");

  SimConfig c;
  {
    BlockReader r(root, "grid", problems);
    r.integer("nx", c.grid.nx);
    r.integer("ny", c.grid.ny);
    r.integer("nz", c.grid.nz);
    r.number("Lx", c.grid.Lx);
    r.number("Ly", c.grid.Ly);
    r.number("h", c.grid.h);
    r.finish();
  }
  {
    BlockReader r(root, "physics", problems);
    r.number("K_I", c.physics.mixing.K_I);
    r.number("K_D", c.physics.mixing.K_D);
    r.number("kappa", c.physics.mixing.kappa);
    r.number("Re1", c.physics.Re1);
    r.number("Re2", c.physics.Re2);
    r.number("f", c.physics.f);
    r.optional_number("g", c.physics.g);
    r.optional_number("rho0", c.physics.rho0);
    bool frozen = false;
    r.boolean("frozen_velocity", frozen);
    c.frozen_velocity = frozen;
    r.finish();
  }
  {
    BlockReader r(root, "regularization", problems);
    r.number("eta", c.reg.eta);
    r.number("s0", c.reg.s0);
    r.number("eps0", c.reg.eps0);
    r.number("r", c.reg.r);
    std::string closure = closure_name(c.closure);
    r.string("closure", closure);
    if (closure == "full")
      c.closure = Closure::Full;
    else if (closure == "small-slope")
      c.closure = Closure::SmallSlope;
    else
      problems.push_back("regularization.closure must be \"full\" or \"small-slope\"");
    r.finish();
  }
  {
    BlockReader r(root, "eos", problems);
    c.eos_table.clear();
    r.string("table", c.eos_table);
    if (c.eos_table.empty()) problems.push_back("eos.table is required (a table path or \"default\")");
    r.finish();
  }
  {
    BlockReader r(root, "boundary", problems);
    if (const json* tau = r.object("tau")) {
      json wrap = {{"boundary.tau", *tau}};
      BlockReader t(wrap, "boundary.tau", problems);
      t.string("type", c.boundary.tau.type);
      t.number("x", c.boundary.tau.x);
      t.number("y", c.boundary.tau.y);
      t.number("amplitude", c.boundary.tau.amplitude);
      t.finish();
    }
    if (const json* ts = r.object("thetaStar")) {
      json wrap = {{"boundary.thetaStar", *ts}};
      BlockReader t(wrap, "boundary.thetaStar", problems);
      t.string("type", c.boundary.theta_star.type);
      t.number("value", c.boundary.theta_star.value);
      t.number("south", c.boundary.theta_star.south);
      t.number("north", c.boundary.theta_star.north);
      t.finish();
    }
    r.number("k_theta", c.boundary.k_theta);
    r.finish();
  }
  {
    BlockReader r(root, "run", problems);
    r.number("dt_max", c.run.dt_max);
    r.integer("steps", c.run.steps);
    r.integer("snapshot_every", c.run.snapshot_every);
    r.unsigned_integer("seed", c.run.seed);
    r.string("out_dir", c.run.out_dir);
    r.number("cfl_safety", c.run.cfl_safety);
    r.finish();
  }
  {
    BlockReader r(root, "initial", problems);
    r.string("scenario", c.initial.scenario);
    r.number("theta0", c.initial.theta0);
    r.number("s0", c.initial.s0);
    r.number("theta_top", c.initial.theta_top);
    r.number("theta_bottom", c.initial.theta_bottom);
    r.number("s_top", c.initial.s_top);
    r.number("s_bottom", c.initial.s_bottom);
    r.number("front_dtheta", c.initial.front_dtheta);
    r.number("front_width", c.initial.front_width);
    r.number("noise", c.initial.noise);
    r.finish();
  }
  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

SimConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  SimConfig c = parse_config(ss.str(), overrides);
  // Relative table paths that do not resolve from the working directory are
  // taken relative to the config file.
  namespace fs = std::filesystem;
  if (c.eos_table != "default" && fs::path(c.eos_table).is_relative() && !fs::exists(c.eos_table)) {
    const fs::path alt = fs::path(path).parent_path() / c.eos_table;
    if (fs::exists(alt)) c.eos_table = alt.lexically_normal().string();
  }
  return c;
}

std::string config_to_json(const SimConfig& c) {
  nlohmann::ordered_json j;
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}, {"nz", c.grid.nz},
               {"Lx", c.grid.Lx}, {"Ly", c.grid.Ly}, {"h", c.grid.h}};
  nlohmann::ordered_json phys = {{"K_I", c.physics.mixing.K_I}, {"K_D", c.physics.mixing.K_D},
                                 {"kappa", c.physics.mixing.kappa}, {"Re1", c.physics.Re1},
                                 {"Re2", c.physics.Re2}, {"f", c.physics.f}};
  if (c.physics.g) phys["g"] = *c.physics.g;
  if (c.physics.rho0) phys["rho0"] = *c.physics.rho0;
  phys["frozen_velocity"] = c.frozen_velocity;
  j["physics"] = phys;
  j["regularization"] = {{"eta", c.reg.eta}, {"s0", c.reg.s0}, {"eps0", c.reg.eps0},
                         {"r", c.reg.r}, {"closure", closure_name(c.closure)}};
  j["eos"] = {{"table", c.eos_table}};
  j["boundary"] = {
      {"tau",
       {{"type", c.boundary.tau.type}, {"x", c.boundary.tau.x}, {"y", c.boundary.tau.y},
        {"amplitude", c.boundary.tau.amplitude}}},
      {"thetaStar",
       {{"type", c.boundary.theta_star.type}, {"value", c.boundary.theta_star.value},
        {"south", c.boundary.theta_star.south}, {"north", c.boundary.theta_star.north}}},
      {"k_theta", c.boundary.k_theta}};
  j["run"] = {{"dt_max", c.run.dt_max}, {"steps", c.run.steps}, {"snapshot_every", c.run.snapshot_every},
              {"seed", c.run.seed}, {"out_dir", c.run.out_dir}, {"cfl_safety", c.run.cfl_safety}};
  j["initial"] = {{"scenario", c.initial.scenario}, {"theta0", c.initial.theta0}, {"s0", c.initial.s0},
                  {"theta_top", c.initial.theta_top}, {"theta_bottom", c.initial.theta_bottom},
                  {"s_top", c.initial.s_top}, {"s_bottom", c.initial.s_bottom},
                  {"front_dtheta", c.initial.front_dtheta}, {"front_width", c.initial.front_width},
                  {"noise", c.initial.noise}};
  return j.dump(2) + "\n";
}

namespace {

template <class F>
void collect(std::vector<std::string>& problems, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    problems.insert(problems.end(), e.problems().begin(), e.problems().end());
  }
}

BoundaryData boundary_data(const SimConfig& c, const Grid& g) {
  BoundaryData bd;
  bd.f = c.physics.f;
  bd.Re1 = c.physics.Re1;
  bd.Re2 = c.physics.Re2;
  bd.k_theta = c.boundary.k_theta;
  bd.tau_x = Field2D(g.nx, g.ny);
  bd.tau_y = Field2D(g.nx, g.ny);
  bd.theta_star = Field2D(g.nx, g.ny);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (c.boundary.tau.type == "gyre") {
        bd.tau_x(i, j) = -c.boundary.tau.amplitude * std::cos(2.0 * pi * g.y[j] / g.Ly);
      } else {
        bd.tau_x(i, j) = c.boundary.tau.x;
        bd.tau_y(i, j) = c.boundary.tau.y;
      }
      const ThetaStarSpec& ts = c.boundary.theta_star;
      bd.theta_star(i, j) =
          ts.type == "linear_y" ? ts.south + (ts.north - ts.south) * g.y[j] / g.Ly : ts.value;
    }
  }
  return bd;
}

}  // namespace

Setup build_setup(const SimConfig& c) {
  std::vector<std::string> problems;
  std::optional<Grid> grid;
  std::optional<EosTable> table;
  collect(problems, [&] { grid = make_grid(c.grid); });
  collect(problems, [&] {
    table = c.eos_table == "default" ? default_eos_table() : load_eos_table(c.eos_table);
  });
  if (table) {
    if (c.physics.g && *c.physics.g != table->g)
      problems.push_back("physics.g disagrees with the EOS table value " + std::to_string(table->g));
    if (c.physics.rho0 && *c.physics.rho0 != table->rho0)
      problems.push_back("physics.rho0 disagrees with the EOS table value " + std::to_string(table->rho0));
  }
  collect(problems, [&] { c.physics.mixing.validate(); });
  collect(problems, [&] { c.reg.validate(); });
  if (grid) {
    collect(problems, [&] { classify_regions(*grid, c.reg.eta); });
    collect(problems, [&] { make_mollifier_kernel(*grid, c.reg.eta); });
  }
  if (c.boundary.tau.type != "constant" && c.boundary.tau.type != "gyre")
    problems.push_back("boundary.tau.type must be \"constant\" or \"gyre\"");
  if (c.boundary.theta_star.type != "constant" && c.boundary.theta_star.type != "linear_y")
    problems.push_back("boundary.thetaStar.type must be \"constant\" or \"linear_y\"");
  if (!(c.boundary.k_theta >= 0.0)) problems.push_back("boundary.k_theta must be non-negative");
  if (!(c.physics.Re1 > 0.0)) problems.push_back("physics.Re1 must be positive");
  if (!(c.physics.Re2 > 0.0)) problems.push_back("physics.Re2 must be positive");
  if (!(c.run.dt_max > 0.0)) problems.push_back("run.dt_max must be positive");
  if (c.run.steps < 0) problems.push_back("run.steps must be non-negative");
  if (c.run.snapshot_every < 0) problems.push_back("run.snapshot_every must be non-negative");
  if (!(c.run.cfl_safety > 0.0 && c.run.cfl_safety <= 1.0)) problems.push_back("run.cfl_safety must lie in (0, 1]");
  if (c.run.out_dir.empty()) problems.push_back("run.out_dir must not be empty");
  if (c.initial.scenario != "equilibrium" && c.initial.scenario != "baroclinic_front")
    problems.push_back("initial.scenario must be \"equilibrium\" or \"baroclinic_front\"");
  if (!(c.initial.front_width > 0.0)) problems.push_back("initial.front_width must be positive");
  if (!(c.initial.noise >= 0.0)) problems.push_back("initial.noise must be non-negative");
  if (!problems.empty()) throw ConfigError(problems);

  Setup s{make_model(*grid, *table, c.physics.mixing, c.reg, c.closure, boundary_data(c, *grid),
                     TimeControls{c.run.dt_max, c.run.cfl_safety}),
          {}};
  s.model.frozen_velocity = c.frozen_velocity;
  s.initial = initial_state(c.initial, s.model, c.run.seed);
  try {
    density(ThermoState{s.initial.theta, s.initial.S, s.model.p_st}, s.model.table);
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("initial: state not admissible for the EOS table: ") + e.what());
  }
  return s;
}

OceanState initial_state(const InitialConfig& init, const Model& model, std::uint64_t seed) {
  const Grid& g = model.grid;
  OceanState s = make_state(g);
  if (init.scenario == "equilibrium") {
    s.theta.fill(init.theta0);
    s.S.fill(init.s0);
  } else {
    s.theta = sample(g, [&](double, double y, double z) {
      const double frac = (z + g.h) / g.h;  // 0 at the bottom, 1 at the surface
      return init.theta_bottom + (init.theta_top - init.theta_bottom) * frac +
             0.5 * init.front_dtheta * std::tanh((y - 0.5 * g.Ly) / init.front_width);
    });
    s.S = sample(g, [&](double, double, double z) {
      const double frac = (z + g.h) / g.h;
      return init.s_bottom + (init.s_top - init.s_bottom) * frac;
    });
  }
  if (init.noise > 0.0) {
    std::mt19937_64 rng(seed);
    for (double& x : s.theta.values()) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
      x += init.noise * (2.0 * u - 1.0);
    }
  }
  return s;
}

}  // namespace gmr

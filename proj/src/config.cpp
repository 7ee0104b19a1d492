#include "hydroscale/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hydroscale/equilibrium.hpp"
#include "hydroscale/errors.hpp"
#include "hydroscale/profile.hpp"

namespace hydroscale {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_real(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + s + "' is not a number");
  }
  return v;
}

std::int64_t to_integer(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (cfg.has(key)) throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    cfg.entries_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string KeyValueConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::real(const std::string& key, double fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : to_real(key, it->second);
}

std::int64_t KeyValueConfig::integer(const std::string& key, std::int64_t fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : to_integer(key, it->second);
}

std::uint64_t KeyValueConfig::unsigned_integer(const std::string& key,
                                               std::uint64_t fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string t = trim(it->second);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError("key '" + key + "': '" + it->second + "' is not an unsigned integer");
  }
  return v;
}

bool KeyValueConfig::boolean(const std::string& key, bool fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string v = trim(it->second);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<double> KeyValueConfig::reals(const std::string& key,
                                          std::vector<double> fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (const auto& part : split(it->second, ',')) out.push_back(to_real(key, part));
  return out;
}

std::vector<std::int64_t> KeyValueConfig::integers(const std::string& key,
                                                   std::vector<std::int64_t> fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& part : split(it->second, ',')) out.push_back(to_integer(key, part));
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (allowed.count(key) == 0) throw ConfigError("unknown config key '" + key + "'");
  }
}

RateModel parse_model(const std::string& spec) {
  const std::string s = trim(spec);
  if (s == "exclusion") return RateModel::exclusion();
  if (s == "zero_range") return RateModel::zero_range();
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw ConfigError("unknown model '" + s + "'");
  const std::string name = trim(s.substr(0, open));
  const std::string args = s.substr(open + 1, s.size() - open - 2);
  if (name == "zero_range_capped") {
    const auto cap = to_integer("model", args);
    if (cap < 1 || cap > 1000000) throw ConfigError("zero_range_capped needs a cap >= 1");
    return RateModel::zero_range_capped(static_cast<int>(cap));
  }
  if (name == "tabulated") {
    const auto parts = split(args, ';');
    if (parts.size() != 2) throw ConfigError("tabulated model needs 'g values; h values'");
    auto values = [](const std::string& list) {
      std::vector<double> v;
      std::istringstream in(list);
      std::string tok;
      while (in >> tok) v.push_back(to_real("model", tok));
      return v;
    };
    try {
      return RateModel::tabulated(values(parts[0]), values(parts[1]));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("tabulated model: ") + e.what());
    }
  }
  throw ConfigError("unknown model '" + s + "'");
}

Branch branch_of(double alpha) {
  if (alpha < 1.0) return Branch::kAnomalous;
  if (alpha == 1.0) return Branch::kLog;
  return Branch::kEuler;
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::kAnomalous:
      return "anomalous";
    case Branch::kLog:
      return "log";
    case Branch::kEuler:
      return "euler";
  }
  return "?";
}

Orientation ExperimentConfig::kernel_orientation() const {
  if (orientation == "symmetric") return Orientation::symmetric(dim);
  return Orientation::totally_asymmetric();
}

std::int64_t ExperimentConfig::block_half_width(std::int64_t big_n) const {
  if (l_block) return *l_block;
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::floor(block_fraction * static_cast<double>(big_n))));
}

ExperimentConfig parse_experiment_config(const KeyValueConfig& kv) {
  kv.require_known({"model", "alpha", "dim", "orientation", "N", "N_list", "replicas",
                    "block_fraction", "l_block", "profile", "rho_star", "t_snapshots", "seed",
                    "window_factor", "window", "no_wrap", "max_events", "workers", "branch",
                    "solver", "cells", "cfl", "safety", "c", "d_list", "region", "t_end",
                    "rho_max", "rho_points"});
  ExperimentConfig c;
  c.model = kv.text("model", c.model);
  parse_model(c.model);
  c.alpha = kv.real("alpha", c.alpha);
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ConfigError("alpha must be positive");
  c.dim = static_cast<int>(kv.integer("dim", c.dim));
  if (c.dim != 1 && c.dim != 2) throw ConfigError("dim must be 1 or 2");
  c.orientation = kv.text("orientation", c.orientation);
  if (c.orientation != "asymmetric" && c.orientation != "symmetric") {
    throw ConfigError("orientation must be asymmetric or symmetric");
  }
  if (kv.has("N") && kv.has("N_list")) throw ConfigError("give either N or N_list");
  if (kv.has("N")) {
    c.n_list = {kv.integer("N", 0)};
  } else {
    c.n_list = kv.integers("N_list", c.n_list);
  }
  if (c.n_list.empty()) throw ConfigError("N_list is empty");
  for (std::size_t i = 0; i < c.n_list.size(); ++i) {
    if (c.n_list[i] < 2) throw ConfigError("N must be at least 2");
    if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw ConfigError("N_list must be strictly increasing");
  }
  c.replicas = kv.integer("replicas", c.replicas);
  if (c.replicas < 1) throw ConfigError("replicas must be positive");
  c.block_fraction = kv.real("block_fraction", c.block_fraction);
  if (!(c.block_fraction > 0.0 && c.block_fraction < 0.5)) {
    throw ConfigError("block_fraction must lie in (0, 0.5)");
  }
  if (kv.has("l_block")) {
    c.l_block = kv.integer("l_block", 0);
    if (*c.l_block < 0) throw ConfigError("l_block must be nonnegative");
  }
  c.profile = kv.text("profile", c.profile);
  c.rho_star = kv.real("rho_star", c.rho_star);
  if (!(c.rho_star >= 0.0)) throw ConfigError("rho_star must be nonnegative");
  try {
    make_profile(c.profile, c.rho_star, c.dim);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  c.t_snapshots = kv.reals("t_snapshots", c.t_snapshots);
  if (c.t_snapshots.empty()) throw ConfigError("t_snapshots is empty");
  for (std::size_t i = 0; i < c.t_snapshots.size(); ++i) {
    if (!(c.t_snapshots[i] >= 0.0)) throw ConfigError("snapshot times must be nonnegative");
    if (i > 0 && c.t_snapshots[i] <= c.t_snapshots[i - 1]) {
      throw ConfigError("t_snapshots must be strictly increasing");
    }
  }
  c.seed = kv.unsigned_integer("seed", c.seed);
  if (kv.has("window_factor") && kv.has("window")) throw ConfigError("give either window or window_factor");
  c.window_factor = kv.has("window") ? kv.real("window", 0.0) : kv.real("window_factor", c.window_factor);
  if (!(c.window_factor >= 1.0)) throw ConfigError("window_factor must be at least 1");
  c.no_wrap = kv.boolean("no_wrap", c.no_wrap);
  c.max_events = kv.unsigned_integer("max_events", c.max_events);
  c.workers = static_cast<unsigned>(kv.integer("workers", 0));

  const std::string branch = kv.text("branch", "auto");
  if (branch != "auto" && branch != branch_name(c.branch())) {
    throw ConfigError("branch '" + branch + "' is inconsistent with alpha = " + format_real(c.alpha));
  }
  c.solver = kv.text("solver", c.solver);
  if (c.solver != "auto" && c.solver != "nonlocal" && c.solver != "entropy") {
    throw ConfigError("solver must be auto, nonlocal or entropy");
  }
  if (c.solver == "nonlocal" && c.branch() != Branch::kAnomalous) {
    throw ConfigError("the nonlocal solver needs alpha < 1");
  }
  if (c.solver == "entropy" && c.branch() == Branch::kAnomalous) {
    throw ConfigError("the entropy solver needs alpha >= 1");
  }
  c.cells = kv.integer("cells", c.cells);
  if (c.cells < 0 || c.cells == 1) throw ConfigError("cells must be 0 (automatic) or at least 2");
  c.cfl = kv.real("cfl", c.cfl);
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  c.safety = kv.real("safety", c.safety);
  if (!(c.safety > 0.0 && c.safety <= 1.0)) throw ConfigError("safety must lie in (0, 1]");

  c.coupling_c = kv.real("c", c.coupling_c);
  c.d_list = kv.integers("d_list", c.d_list);
  for (auto d : c.d_list) {
    if (d < 1) throw ConfigError("d_list entries must be positive");
  }
  const auto region = kv.reals("region", {c.region_a, c.region_b});
  if (region.size() != 2 || !(region[0] < region[1])) throw ConfigError("region must be 'a, b' with a < b");
  c.region_a = region[0];
  c.region_b = region[1];
  c.t_end = kv.real("t_end", c.t_end);
  if (!(c.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
  if (kv.has("rho_max")) {
    c.rho_max = kv.real("rho_max", 0.0);
    if (!(*c.rho_max > 0.0)) throw ConfigError("rho_max must be positive");
  }
  c.rho_points = kv.integer("rho_points", c.rho_points);
  if (c.rho_points < 2) throw ConfigError("rho_points must be at least 2");
  const EquilibriumTable table(parse_model(c.model));
  const double sup = std::max(profile_sup(c.profile, c.rho_star), c.rho_star);
  if (sup > table.rho_c() || (sup == table.rho_c() && !table.model().m0())) {
    throw ConfigError("profile reaches " + format_real(sup) + ", above the critical density " +
                      format_real(table.rho_c()));
  }
  return c;
}

std::string format_real(double x) {
  char buf[32];
  for (int p = 1; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::map<std::string, std::string> describe(const ExperimentConfig& c) {
  auto join_int = [](const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  auto join_real = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_real(v[i]);
    return s;
  };
  std::map<std::string, std::string> m;
  m["model"] = c.model;
  m["alpha"] = format_real(c.alpha);
  m["dim"] = std::to_string(c.dim);
  m["orientation"] = c.orientation;
  m["N_list"] = join_int(c.n_list);
  m["replicas"] = std::to_string(c.replicas);
  m["block_fraction"] = format_real(c.block_fraction);
  if (c.l_block) m["l_block"] = std::to_string(*c.l_block);
  m["profile"] = c.profile;
  m["rho_star"] = format_real(c.rho_star);
  m["t_snapshots"] = join_real(c.t_snapshots);
  m["seed"] = std::to_string(c.seed);
  m["window_factor"] = format_real(c.window_factor);
  m["no_wrap"] = c.no_wrap ? "true" : "false";
  m["max_events"] = std::to_string(c.max_events);
  m["branch"] = branch_name(c.branch());
  m["solver"] = c.solver;
  m["cells"] = std::to_string(c.cells);
  m["cfl"] = format_real(c.cfl);
  m["safety"] = format_real(c.safety);
  m["c"] = format_real(c.coupling_c);
  m["d_list"] = join_int(c.d_list);
  m["region"] = format_real(c.region_a) + "," + format_real(c.region_b);
  m["t_end"] = format_real(c.t_end);
  if (c.rho_max) m["rho_max"] = format_real(*c.rho_max);
  m["rho_points"] = std::to_string(c.rho_points);
  return m;
}

}  // namespace hydroscale

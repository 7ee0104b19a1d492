#include "hydroscale/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hydroscale/errors.hpp"

namespace hydroscale {

namespace {

struct Parsed {
  std::string name;
  std::vector<double> args;
};

Parsed parse(const std::string& spec) {
  Parsed p;
  const auto open = spec.find('(');
  std::string name = spec.substr(0, open);
  name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
  p.name = name;
  if (open == std::string::npos) return p;
  const auto close = spec.rfind(')');
  if (close == std::string::npos || close < open) {
    throw ConfigError("profile '" + spec + "': missing ')'");
  }
  std::stringstream ss(spec.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.args.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("profile '" + spec + "': bad number '" + item + "'");
    }
  }
  return p;
}

void expect_args(const Parsed& p, std::size_t n, const std::string& spec) {
  if (p.args.size() != n) {
    throw ConfigError("profile '" + spec + "' expects " + std::to_string(n) + " arguments");
  }
}

double diagonal(const MacroPoint& u, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += u[static_cast<std::size_t>(i)];
  return s / std::sqrt(static_cast<double>(dim));
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

Profile make_profile(const std::string& spec, double rho_star, int dim) {
  const Parsed p = parse(spec);
  if (p.name == "constant") {
    expect_args(p, 0, spec);
    return {[rho_star](const MacroPoint&) { return rho_star; }, "constant"};
  }
  if (p.name == "step" || p.name == "riemann") {
    expect_args(p, 2, spec);
    const double lo = p.args[0];
    const double hi = p.args[1];
    return {[=](const MacroPoint& u) { return diagonal(u, dim) < 0.0 ? lo : hi; }, spec};
  }
  if (p.name == "bump") {
    expect_args(p, 2, spec);
    const double amp = p.args[0];
    const double width = p.args[1];
    if (!(width > 0.0)) throw ConfigError("profile '" + spec + "': width must be positive");
    return {[=](const MacroPoint& u) {
              double r2 = 0.0;
              for (int i = 0; i < dim; ++i) r2 += u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
              const double q = r2 / (width * width);
              if (q >= 1.0) return rho_star;
              const double b = 1.0 - q;
              return rho_star + amp * b * b * b;
            },
            spec};
  }
  throw ConfigError("unknown profile '" + spec + "' (constant, step, riemann, bump)");
}

Profile flatten_to_far_field(Profile profile, double rho_star, double window, int dim) {
  const double half = 0.5 * window;
  const double band = 0.1 * half;
  auto inner = std::move(profile.density);
  return {[=](const MacroPoint& u) {
            double w = 1.0;
            for (int i = 0; i < dim; ++i) {
              w *= smoothstep((half - std::abs(u[static_cast<std::size_t>(i)])) / band);
            }
            if (w == 0.0) return rho_star;
            if (w == 1.0) return inner(u);
            return rho_star + w * (inner(u) - rho_star);
          },
          profile.description + " flattened"};
}

double profile_sup(const std::string& spec, double rho_star) {
  const Parsed p = parse(spec);
  if (p.name == "step" || p.name == "riemann") return std::max({p.args.at(0), p.args.at(1), rho_star});
  if (p.name == "bump") return std::max(rho_star, rho_star + p.args.at(0));
  return rho_star;
}

}  // namespace hydroscale

#ifndef HYDROSCALE_PROFILE_HPP_
#define HYDROSCALE_PROFILE_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hydroscale {

using MacroPoint = std::array<double, 3>;

/// Macroscopic initial density rho0(u), u in R^n (unused coordinates are zero).
struct Profile {
  std::function<double(const MacroPoint&)> density;
  std::string description;

  double operator()(const MacroPoint& u) const { return density(u); }
};

/// Named shapes. s denotes u projected on the unit diagonal <1,...,1>/sqrt(n).
///   constant              rho_star
///   step(lo, hi)          lo for s < 0, hi for s >= 0
///   riemann(left, right)  same as step; used for Riemann data
///   bump(amp, width)      rho_star + amp (1 - |u|^2/width^2)^3 for |u| < width
Profile make_profile(const std::string& spec, double rho_star, int dim);

/// Blend rho0 to rho_star over the outer 10% of each half-axis of the window
/// [-window/2, window/2)^n with a C^1 smoothstep, so the torus seam sees rho_star.
Profile flatten_to_far_field(Profile profile, double rho_star, double window, int dim);

/// Upper bound of the profile over its named parameters (used to size tables).
double profile_sup(const std::string& spec, double rho_star);

}  // namespace hydroscale

#endif  // HYDROSCALE_PROFILE_HPP_

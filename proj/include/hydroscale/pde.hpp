#ifndef HYDROSCALE_PDE_HPP_
#define HYDROSCALE_PDE_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hydroscale/equilibrium.hpp"
#include "hydroscale/profile.hpp"

namespace hydroscale {

enum class Boundary {
  kFarField,      // rho = rho_star outside the grid
  kZeroGradient,  // edge cells extended outward (Riemann data)
};

/// Cell averages of rho(t, u) on [origin, origin + cells du)^dim, row-major with axis 0
/// slowest. Outside the grid the density is given by the boundary rule.
struct GridField {
  int dim = 1;
  std::int64_t cells = 0;
  double du = 0.0;
  double origin = 0.0;
  std::vector<double> values;
  double rho_star = 0.0;
  double t = 0.0;
  Boundary boundary = Boundary::kFarField;

  double center(std::int64_t i) const { return origin + (static_cast<double>(i) + 0.5) * du; }
  double cell_volume() const;
  MacroPoint cell_center(std::int64_t flat) const;
  /// sum_i (rho_i - rho_star) du^n
  double excess_mass() const;
};

/// Grid on the centred window [-window/2, window/2)^dim sampled at cell centres.
GridField make_grid_field(const Profile& rho0, int dim, std::int64_t cells, double window,
                          double rho_star, Boundary boundary = Boundary::kFarField);

using FieldHistory = std::vector<GridField>;

/// Scalar flux F on [rho_lo, rho_hi] with speed gamma along the diagonal 1(n). Engquist-Osher
/// parts F+ (nondecreasing) and F- (nonincreasing), F+ + F- = F, are tabulated on a fine grid.
class FluxModel {
 public:
  FluxModel(std::function<double(double)> flux, double rho_lo, double rho_hi, double gamma,
            int dim = 1, std::int64_t intervals = 20000);
  /// F(rho) = rho (1 - rho) on [0, 1].
  static FluxModel exclusion(double gamma, int dim = 1);
  /// F = Phi Psi from the interpolated equilibrium tables (kept by reference).
  static FluxModel from_table(const ConstitutiveTable& table, double gamma, int dim = 1);

  double operator()(double rho) const { return flux_(rho); }
  double plus(double rho) const;
  double minus(double rho) const;
  /// max |F'| over [lo, hi] from the table's secant slopes.
  double lipschitz(double lo, double hi) const;
  double gamma() const { return gamma_; }
  int dim() const { return dim_; }
  /// Flux speed carried by each axis, gamma / sqrt(n).
  double axis_speed() const;
  double rho_lo() const { return lo_; }
  double rho_hi() const { return hi_; }
  const std::function<double(double)>& function() const { return flux_; }

 private:
  std::size_t interval(double rho) const;

  std::function<double(double)> flux_;
  double lo_;
  double hi_;
  double gamma_;
  int dim_;
  double step_;
  std::vector<double> nodes_f_;
  std::vector<double> plus_;  // F+ at the nodes
  std::vector<double> slope_;
};

struct SolveLog {
  std::vector<double> dt;
  std::int64_t steps = 0;
  std::int64_t clamps = 0;         // cell values pulled back into [0, rho_c]
  double max_mass_drift = 0.0;     // max over steps of |mass change - boundary flux|
  double boundary_flux = 0.0;      // net mass that entered through the edges
};

struct NonlocalOptions {
  double safety = 0.5;
  /// Jumps longer than this (macroscopic units) are dropped. Infinity gives the full operator.
  double cutoff = std::numeric_limits<double>::infinity();
  /// Blow-up threshold: new max above initial max + 10 tolerance.
  double tolerance = 1e-8;
  unsigned workers = 1;
};

/// Quadrature of the anomalous operator
///   L(rho)(u) = int_{[0,inf)^n} [Phi(rho(u-v)) Psi(rho(u)) - Phi(rho(u)) Psi(rho(u+v))] |v|^{-n-alpha} dv
/// with v on the grid lattice. In 1D the numerator is interpolated linearly between the nodes
/// v = j du and integrated exactly against v^{-1-alpha}; in 2D a lattice sum with half weights
/// on the axes is used. Beyond the grid the far-field state closes the integral analytically.
class NonlocalOperator {
 public:
  NonlocalOperator(const ConstitutiveTable& table, double alpha, int dim, std::int64_t cells,
                   double du, double cutoff = std::numeric_limits<double>::infinity());
  void apply(const GridField& field, std::vector<double>& out, unsigned workers = 1) const;
  /// Dimensionless weight sum (the operator's Lipschitz scale without du^{-alpha}).
  double weight_sum() const { return weight_sum_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& node_weights() const { return weights_; }

 private:
  void apply_1d(const std::vector<double>& phi, const std::vector<double>& psi, double phi_l,
                double psi_r, std::vector<double>& out, unsigned workers) const;
  void apply_2d(const std::vector<double>& phi, const std::vector<double>& psi, double phi_far,
                double psi_far, std::vector<double>& out) const;

  const ConstitutiveTable* table_;
  double alpha_;
  int dim_;
  std::int64_t cells_;
  double du_;
  std::vector<double> weights_;  // 1D: node j = 1..cells; 2D: (j, k) in [0, cells]^2
  double tail_weight_ = 0.0;     // 2D: weight of the region outside the lattice box
  double weight_sum_ = 0.0;
};

GridField nonlocal_rhs(const GridField& field, const ConstitutiveTable& table, double alpha,
                       const NonlocalOptions& options = {});

/// Explicit midpoint stepping with dt = safety du^alpha / (kappa h_sup S).
GridField evolve_nonlocal(const GridField& field, const ConstitutiveTable& table, double alpha,
                          double t_end, const NonlocalOptions& options = {},
                          SolveLog* log = nullptr, FieldHistory* history = nullptr);

struct EntropyOptions {
  double cfl = 0.45;
};

/// Finite volumes with the Engquist-Osher flux for d_t rho + gamma d_{1(n)} F(rho) = 0; 2D by
/// Strang splitting with per-axis flux (gamma / sqrt 2) F.
GridField entropy_solve(const GridField& field, const FluxModel& flux, double t_end,
                        const EntropyOptions& options = {}, SolveLog* log = nullptr,
                        FieldHistory* history = nullptr);

/// Entropy solution of the Riemann problem at the points u, time t, speed scale gamma, from the
/// convex (rho_left < rho_right) or concave (rho_left > rho_right) envelope of F.
std::vector<double> riemann_exact(const FluxModel& flux, double rho_left, double rho_right,
                                  double t, const std::vector<double>& u,
                                  std::int64_t samples = 20000);

/// G(t, u) = tau(t) phi(u), tau(t) = (1 - (t/T)^2)^3 on [0, T), phi(u) = (1 - |u - c|^2/r^2)^4 on
/// the ball of radius r around c.
struct TestFunction {
  double t_max = 1.0;
  MacroPoint center{};
  double radius = 1.0;

  double time_factor(double t) const;
  double time_derivative(double t) const;
  double space(const MacroPoint& u, int dim) const;
  /// Derivative along the unit diagonal (1/sqrt n) sum_i d_i.
  double diagonal_derivative(const MacroPoint& u, int dim) const;
  double operator()(double t, const MacroPoint& u, int dim) const {
    return time_factor(t) * space(u, dim);
  }
};

struct KruzkovMargin {
  double c = 0.0;
  std::size_t test = 0;
  double margin = 0.0;
};

/// int int |rho - c| G_t + gamma sgn(rho - c)(F(rho) - F(c)) d_{1(n)} G + int |rho_0 - c| G(0):
/// trapezoid in time over the history, midpoint in space.
std::vector<KruzkovMargin> kruzkov_check(const FieldHistory& history, const FluxModel& flux,
                                         const std::vector<double>& c_list,
                                         const std::vector<TestFunction>& tests);

/// Conservation-law weak form int rho_0 G(0) + int int rho G_t + gamma F(rho) d_{1(n)} G.
double weak_residual(const FieldHistory& history, const FluxModel& flux, const TestFunction& g);

/// Anomalous weak form int rho_0 G(0) + int int rho G_t
///   + int int int Phi(rho(u)) Psi(rho(u+v)) [G(u+v) - G(u)] |v|^{-1-alpha} dv du dt (1D).
double weak_residual(const FieldHistory& history, const ConstitutiveTable& table, double alpha,
                     const TestFunction& g,
                     double cutoff = std::numeric_limits<double>::infinity());

}  // namespace hydroscale

#endif  // HYDROSCALE_PDE_HPP_

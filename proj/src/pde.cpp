#include "hydroscale/pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hydroscale/errors.hpp"
#include "hydroscale/parallel.hpp"

namespace hydroscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t int_pow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
}

}  // namespace

double GridField::cell_volume() const { return std::pow(du, dim); }

MacroPoint GridField::cell_center(std::int64_t flat) const {
  MacroPoint p{};
  if (dim == 1) {
    p[0] = center(flat);
  } else {
    p[0] = center(flat / cells);
    p[1] = center(flat % cells);
  }
  return p;
}

double GridField::excess_mass() const {
  double m = 0.0;
  for (double v : values) m += v - rho_star;
  return m * cell_volume();
}

GridField make_grid_field(const Profile& rho0, int dim, std::int64_t cells, double window,
                          double rho_star, Boundary boundary) {
  check_dim(dim);
  if (cells < 2 || !(window > 0.0)) throw DomainError("grid needs at least 2 cells and a window");
  GridField f;
  f.dim = dim;
  f.cells = cells;
  f.du = window / static_cast<double>(cells);
  f.origin = -0.5 * window;
  f.rho_star = rho_star;
  f.boundary = boundary;
  const std::int64_t total = int_pow(cells, dim);
  f.values.resize(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) {
    f.values[static_cast<std::size_t>(i)] = rho0(f.cell_center(i));
  }
  return f;
}

// ---------------------------------------------------------------------------------------------
// Flux

FluxModel::FluxModel(std::function<double(double)> flux, double rho_lo, double rho_hi,
                     double gamma, int dim, std::int64_t intervals)
    : flux_(std::move(flux)), lo_(rho_lo), hi_(rho_hi), gamma_(gamma), dim_(dim) {
  check_dim(dim);
  if (!(rho_hi > rho_lo) || intervals < 1) throw DomainError("flux range must be nonempty");
  if (!std::isfinite(gamma) || gamma < 0.0) throw DomainError("flux speed must be finite");
  const auto m = static_cast<std::size_t>(intervals);
  step_ = (hi_ - lo_) / static_cast<double>(m);
  nodes_f_.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double rho = k == m ? hi_ : lo_ + step_ * static_cast<double>(k);
    nodes_f_[k] = flux_(rho);
    if (!std::isfinite(nodes_f_[k])) throw UnsupportedFluxError("flux is not finite on its range");
  }
  plus_.resize(m + 1);
  slope_.resize(m);
  plus_[0] = nodes_f_[0];
  for (std::size_t k = 0; k < m; ++k) {
    const double df = nodes_f_[k + 1] - nodes_f_[k];
    slope_[k] = df / step_;
    plus_[k + 1] = plus_[k] + std::max(df, 0.0);
  }
}

FluxModel FluxModel::exclusion(double gamma, int dim) {
  return FluxModel([](double r) { return r * (1.0 - r); }, 0.0, 1.0, gamma, dim);
}

FluxModel FluxModel::from_table(const ConstitutiveTable& table, double gamma, int dim) {
  const ConstitutiveTable* t = &table;
  return FluxModel([t](double r) { return t->flux(r); }, 0.0, table.rho_max(), gamma, dim);
}

double FluxModel::axis_speed() const { return gamma_ / std::sqrt(static_cast<double>(dim_)); }

std::size_t FluxModel::interval(double rho) const {
  const double x = (rho - lo_) / step_;
  if (!(x > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(x), slope_.size() - 1);
}

double FluxModel::plus(double rho) const {
  const std::size_t k = interval(rho);
  const double base = plus_[k];
  return slope_[k] > 0.0 ? base + (flux_(rho) - nodes_f_[k]) : base;
}

double FluxModel::minus(double rho) const { return flux_(rho) - plus(rho); }

double FluxModel::lipschitz(double lo, double hi) const {
  const std::size_t a = interval(lo);
  const std::size_t b = interval(hi);
  double l = 0.0;
  for (std::size_t k = a; k <= b; ++k) l = std::max(l, std::abs(slope_[k]));
  return l;
}

// ---------------------------------------------------------------------------------------------
// Nonlocal operator

namespace {

// int_a^b (c0 + c1 s) s^{-1-alpha} ds for 0 <= a < b <= inf.
double linear_moment(double a, double b, double c0, double c1, double alpha) {
  if (!(b > a)) return 0.0;
  double r = 0.0;
  if (c1 != 0.0) {
    if (std::isinf(b)) return kInf;
    r += c1 * (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha);
  }
  if (c0 != 0.0) {
    if (a == 0.0) return c0 > 0.0 ? kInf : -kInf;
    const double tb = std::isinf(b) ? 0.0 : std::pow(b, -alpha);
    r += c0 * (std::pow(a, -alpha) - tb) / alpha;
  }
  return r;
}

// Hat function of node j on [j-1, j+1], clipped to (0, upper]; node `last` keeps value 1 beyond.
double node_weight(std::int64_t j, std::int64_t last, double upper, double alpha) {
  const double jd = static_cast<double>(j);
  double w = linear_moment(jd - 1.0, std::min(jd, upper), -(jd - 1.0), 1.0, alpha);
  if (j < last) {
    w += linear_moment(jd, std::min(jd + 1.0, upper), jd + 1.0, -1.0, alpha);
  } else {
    w += linear_moment(jd, upper, 1.0, 0.0, alpha);
  }
  return w;
}

}  // namespace

NonlocalOperator::NonlocalOperator(const ConstitutiveTable& table, double alpha, int dim,
                                   std::int64_t cells, double du, double cutoff)
    : table_(&table), alpha_(alpha), dim_(dim), cells_(cells), du_(du) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("nonlocal operator requires 0 < alpha < 1, got " + std::to_string(alpha));
  }
  check_dim(dim);
  if (!(cutoff > 0.0)) throw DomainError("nonlocal cutoff must be positive");
  const double upper = cutoff / du;
  if (dim == 1) {
    weights_.resize(static_cast<std::size_t>(cells));
    for (std::int64_t j = 1; j <= cells; ++j) {
      weights_[static_cast<std::size_t>(j - 1)] = node_weight(j, cells, upper, alpha);
    }
    for (double w : weights_) weight_sum_ += w;
    return;
  }
  const std::int64_t side = cells + 1;
  weights_.assign(static_cast<std::size_t>(side * side), 0.0);
  for (std::int64_t j = 0; j <= cells; ++j) {
    for (std::int64_t k = 0; k <= cells; ++k) {
      if (j == 0 && k == 0) continue;
      const double r = std::hypot(static_cast<double>(j), static_cast<double>(k));
      if (r > upper) continue;
      double w = std::pow(r, -2.0 - alpha);
      if (j == 0 || k == 0) w *= 0.5;
      weights_[static_cast<std::size_t>(j * side + k)] = w;
      weight_sum_ += w;
    }
  }
  // Orthant outside the box [0, cells + 1/2]^2, in polar coordinates.
  const double box = static_cast<double>(cells) + 0.5;
  const int steps = 4096;
  const double dtheta = 0.5 * std::numbers::pi / steps;
  const double cut = std::isinf(upper) ? 0.0 : std::pow(upper, -alpha);
  double tail = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double theta = (s + 0.5) * dtheta;
    const double r_box = box / std::max(std::cos(theta), std::sin(theta));
    tail += std::max(std::pow(r_box, -alpha) - cut, 0.0);
  }
  tail_weight_ = tail * dtheta / alpha;
  weight_sum_ += tail_weight_;
}

void NonlocalOperator::apply(const GridField& field, std::vector<double>& out,
                             unsigned workers) const {
  if (field.dim != dim_ || field.cells != cells_ || std::abs(field.du - du_) > 1e-12 * du_) {
    throw DomainError("field does not match the operator grid");
  }
  const std::size_t n = field.values.size();
  std::vector<double> phi(n);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = table_->phi(field.values[i]);
    psi[i] = table_->psi(field.values[i]);
  }
  out.assign(n, 0.0);
  if (dim_ == 1) {
    double phi_l = table_->phi(field.rho_star);
    double psi_r = table_->psi(field.rho_star);
    if (field.boundary == Boundary::kZeroGradient) {
      phi_l = phi.front();
      psi_r = psi.back();
    }
    apply_1d(phi, psi, phi_l, psi_r, out, workers);
  } else {
    if (field.boundary != Boundary::kFarField) {
      throw DomainError("2D nonlocal operator supports the far-field boundary only");
    }
    apply_2d(phi, psi, table_->phi(field.rho_star), table_->psi(field.rho_star), out);
  }
}

void NonlocalOperator::apply_1d(const std::vector<double>& phi, const std::vector<double>& psi,
                                double phi_l, double psi_r, std::vector<double>& out,
                                unsigned workers) const {
  const std::int64_t n = cells_;
  // Padded copies: phi_pad[n + m] = Phi(rho_m) for m >= -n, psi_pad[m] for m <= 2n.
  std::vector<double> phi_pad(static_cast<std::size_t>(2 * n), phi_l);
  std::copy(phi.begin(), phi.end(), phi_pad.begin() + n);
  std::vector<double> psi_pad(static_cast<std::size_t>(2 * n + 1), psi_r);
  std::copy(psi.begin(), psi.end(), psi_pad.begin());
  const double scale = std::pow(du_, -alpha_);
  const double* w = weights_.data();
  const std::size_t chunk = 256;
  const std::size_t chunks = (static_cast<std::size_t>(n) + chunk - 1) / chunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        const auto begin = static_cast<std::int64_t>(c * chunk);
        const auto end = std::min<std::int64_t>(n, begin + static_cast<std::int64_t>(chunk));
        for (std::int64_t i = begin; i < end; ++i) {
          const double psi_i = psi[static_cast<std::size_t>(i)];
          const double phi_i = phi[static_cast<std::size_t>(i)];
          const double* left = phi_pad.data() + n + i;  // left[-j] = Phi(rho_{i-j})
          const double* right = psi_pad.data() + i;     // right[j] = Psi(rho_{i+j})
          double acc = 0.0;
          for (std::int64_t j = 1; j <= n; ++j) {
            acc += w[j - 1] * (left[-j] * psi_i - phi_i * right[j]);
          }
          out[static_cast<std::size_t>(i)] = scale * acc;
        }
      },
      workers);
}

void NonlocalOperator::apply_2d(const std::vector<double>& phi, const std::vector<double>& psi,
                                double phi_far, double psi_far, std::vector<double>& out) const {
  const std::int64_t n = cells_;
  const std::int64_t side = n + 1;
  const double scale = std::pow(du_, -alpha_);
  auto phi_at = [&](std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || a >= n || b >= n) return phi_far;
    return phi[static_cast<std::size_t>(a * n + b)];
  };
  auto psi_at = [&](std::int64_t a, std::int64_t b) {
    if (a < 0 || b < 0 || a >= n || b >= n) return psi_far;
    return psi[static_cast<std::size_t>(a * n + b)];
  };
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      const double phi_i = phi[static_cast<std::size_t>(a * n + b)];
      const double psi_i = psi[static_cast<std::size_t>(a * n + b)];
      double acc = 0.0;
      for (std::int64_t j = 0; j <= n; ++j) {
        for (std::int64_t k = 0; k <= n; ++k) {
          const double w = weights_[static_cast<std::size_t>(j * side + k)];
          if (w == 0.0) continue;
          acc += w * (phi_at(a - j, b - k) * psi_i - phi_i * psi_at(a + j, b + k));
        }
      }
      acc += tail_weight_ * (phi_far * psi_i - phi_i * psi_far);
      out[static_cast<std::size_t>(a * n + b)] = scale * acc;
    }
  }
}

GridField nonlocal_rhs(const GridField& field, const ConstitutiveTable& table, double alpha,
                       const NonlocalOptions& options) {
  const NonlocalOperator op(table, alpha, field.dim, field.cells, field.du, options.cutoff);
  GridField rhs = field;
  op.apply(field, rhs.values, options.workers);
  return rhs;
}

namespace {

std::int64_t clamp_values(std::vector<double>& v, double lo, double hi) {
  std::int64_t clamps = 0;
  for (double& x : v) {
    if (x < lo) {
      x = lo;
      ++clamps;
    } else if (x > hi) {
      x = hi;
      ++clamps;
    }
  }
  return clamps;
}

}  // namespace

GridField evolve_nonlocal(const GridField& field, const ConstitutiveTable& table, double alpha,
                          double t_end, const NonlocalOptions& options, SolveLog* log,
                          FieldHistory* history) {
  if (t_end < field.t) throw DomainError("evolve_nonlocal: t_end precedes the field time");
  const NonlocalOperator op(table, alpha, field.dim, field.cells, field.du, options.cutoff);
  const RateModel& model = table.model();
  const double lip = model.kappa() * model.h_sup() * op.weight_sum();
  const double dt_nominal =
      lip > 0.0 ? options.safety * std::pow(field.du, alpha) / lip : t_end - field.t;
  double max0 = field.rho_star;
  for (double v : field.values) max0 = std::max(max0, v);
  const double limit = max0 + 10.0 * options.tolerance;
  const double rho_c = table.rho_c();
  const double mass0 = field.excess_mass();

  GridField cur = field;
  GridField mid = field;
  std::vector<double> k1;
  std::vector<double> k2;
  if (history) history->push_back(cur);
  while (cur.t < t_end) {
    double dt = std::min(dt_nominal, t_end - cur.t);
    if (t_end - (cur.t + dt) < 1e-12 * std::max(1.0, t_end)) dt = t_end - cur.t;
    op.apply(cur, k1, options.workers);
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
      mid.values[i] = cur.values[i] + 0.5 * dt * k1[i];
    }
    const std::int64_t c1 = clamp_values(mid.values, 0.0, rho_c);
    op.apply(mid, k2, options.workers);
    for (std::size_t i = 0; i < cur.values.size(); ++i) cur.values[i] += dt * k2[i];
    const std::int64_t c2 = clamp_values(cur.values, 0.0, rho_c);
    cur.t = (dt == t_end - cur.t) ? t_end : cur.t + dt;
    for (double v : cur.values) {
      if (!std::isfinite(v) || v > limit) {
        throw StabilityError("nonlocal solver blew up at t=" + std::to_string(cur.t) +
                             " (value " + std::to_string(v) + ", limit " +
                             std::to_string(limit) + ")");
      }
    }
    if (log) {
      log->dt.push_back(dt);
      ++log->steps;
      log->clamps += c1 + c2;
      log->max_mass_drift = std::max(log->max_mass_drift, std::abs(cur.excess_mass() - mass0));
    }
    if (history) history->push_back(cur);
  }
  return cur;
}

// ---------------------------------------------------------------------------------------------
// Entropy solver

namespace {

// One Engquist-Osher update of every line along `axis`. Returns the mass that entered through
// the two ends of the lines.
double sweep(GridField& f, int axis, double dt, const FluxModel& flux, std::vector<double>& face) {
  const std::int64_t n = f.cells;
  const std::int64_t lines = f.dim == 1 ? 1 : n;
  const double s = flux.axis_speed();
  const double ratio = dt / f.du;
  double inflow = 0.0;
  face.resize(static_cast<std::size_t>(n + 1));
  for (std::int64_t line = 0; line < lines; ++line) {
    const std::int64_t stride = (f.dim == 2 && axis == 0) ? n : 1;
    const std::int64_t base = f.dim == 1 ? 0 : (axis == 0 ? line : line * n);
    auto at = [&](std::int64_t m) -> double& {
      return f.values[static_cast<std::size_t>(base + m * stride)];
    };
    const double left = f.boundary == Boundary::kFarField ? f.rho_star : at(0);
    const double right = f.boundary == Boundary::kFarField ? f.rho_star : at(n - 1);
    for (std::int64_t m = 0; m <= n; ++m) {
      const double a = m == 0 ? left : at(m - 1);
      const double b = m == n ? right : at(m);
      face[static_cast<std::size_t>(m)] = s * (flux.plus(a) + flux.minus(b));
    }
    for (std::int64_t m = 0; m < n; ++m) {
      at(m) -= ratio * (face[static_cast<std::size_t>(m + 1)] - face[static_cast<std::size_t>(m)]);
    }
    inflow += dt * (face.front() - face.back());
  }
  return inflow * std::pow(f.du, f.dim - 1);
}

}  // namespace

GridField entropy_solve(const GridField& field, const FluxModel& flux, double t_end,
                        const EntropyOptions& options, SolveLog* log, FieldHistory* history) {
  if (t_end < field.t) throw DomainError("entropy_solve: t_end precedes the field time");
  if (field.dim != flux.dim()) throw DomainError("flux and field dimensions differ");
  double lo = field.values.front();
  double hi = lo;
  for (double v : field.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (field.boundary == Boundary::kFarField) {
    lo = std::min(lo, field.rho_star);
    hi = std::max(hi, field.rho_star);
  }
  const double lip = flux.lipschitz(lo, hi);
  const double speed = flux.axis_speed() * lip;
  const double dt_nominal = speed > 0.0 ? options.cfl * field.du / speed : t_end - field.t;
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));

  GridField cur = field;
  std::vector<double> face;
  const double mass0 = cur.excess_mass();
  double entered = 0.0;
  if (history) history->push_back(cur);
  while (cur.t < t_end) {
    double dt = std::min(dt_nominal, t_end - cur.t);
    if (t_end - (cur.t + dt) < 1e-12 * std::max(1.0, t_end)) dt = t_end - cur.t;
    if (cur.dim == 1) {
      entered += sweep(cur, 0, dt, flux, face);
    } else {
      entered += sweep(cur, 0, 0.5 * dt, flux, face);
      entered += sweep(cur, 1, dt, flux, face);
      entered += sweep(cur, 0, 0.5 * dt, flux, face);
    }
    cur.t = (dt == t_end - cur.t) ? t_end : cur.t + dt;
    for (double v : cur.values) {
      if (!std::isfinite(v) || v < lo - slack || v > hi + slack) {
        throw StabilityError("entropy solver left the flux range [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "] at t=" + std::to_string(cur.t));
      }
    }
    const std::int64_t clamps = clamp_values(cur.values, flux.rho_lo(), flux.rho_hi());
    if (log) {
      log->dt.push_back(dt);
      ++log->steps;
      log->clamps += clamps;
      log->boundary_flux = entered;
      log->max_mass_drift =
          std::max(log->max_mass_drift, std::abs(cur.excess_mass() - mass0 - entered));
    }
    if (history) history->push_back(cur);
  }
  return cur;
}

// ---------------------------------------------------------------------------------------------
// Riemann problem

std::vector<double> riemann_exact(const FluxModel& flux, double rho_left, double rho_right,
                                  double t, const std::vector<double>& u, std::int64_t samples) {
  std::vector<double> out(u.size());
  if (rho_left == rho_right) {
    std::fill(out.begin(), out.end(), rho_left);
    return out;
  }
  if (!(t > 0.0) || flux.gamma() == 0.0) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] < 0.0 ? rho_left : rho_right;
    return out;
  }
  if (samples < 2) throw DomainError("riemann_exact needs at least 2 samples");
  const bool convex = rho_left < rho_right;
  const double a = std::min(rho_left, rho_right);
  const double b = std::max(rho_left, rho_right);
  const auto m = static_cast<std::size_t>(samples);
  std::vector<double> x(m + 1);
  std::vector<double> y(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    x[k] = k == m ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(m);
    const double f = flux(x[k]);
    if (!std::isfinite(f)) throw UnsupportedFluxError("flux is not finite on the Riemann fan");
    y[k] = convex ? f : -f;
  }
  int sign_changes = 0;
  int last_sign = 0;
  const double curv_floor = 1e-14 * (1.0 + std::abs(y.front()) + std::abs(y.back()));
  for (std::size_t k = 1; k < m; ++k) {
    const double d2 = y[k + 1] - 2.0 * y[k] + y[k - 1];
    const int sg = d2 > curv_floor ? 1 : (d2 < -curv_floor ? -1 : 0);
    if (sg != 0 && last_sign != 0 && sg != last_sign) ++sign_changes;
    if (sg != 0) last_sign = sg;
  }
  if (sign_changes > 1000) throw UnsupportedFluxError("flux oscillates too often for the envelope");

  // Lower convex hull of (x, y) by the monotone chain.
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k <= m; ++k) {
    while (hull.size() >= 2) {
      const std::size_t p = hull[hull.size() - 2];
      const std::size_t q = hull.back();
      const double cross = (x[q] - x[p]) * (y[k] - y[p]) - (y[q] - y[p]) * (x[k] - x[p]);
      if (cross <= 0.0) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  if (hull.size() < 2) throw UnsupportedFluxError("envelope construction failed");

  // Traverse from the left state to the right state; F-slopes then increase.
  std::vector<std::size_t> path(hull.begin(), hull.end());
  if (!convex) std::reverse(path.begin(), path.end());
  std::vector<double> xi;
  std::vector<double> rho;
  for (std::size_t s = 0; s + 1 < path.size(); ++s) {
    const std::size_t p = path[s];
    const std::size_t q = path[s + 1];
    const double fp = convex ? y[p] : -y[p];
    const double fq = convex ? y[q] : -y[q];
    const double slope = (fq - fp) / (x[q] - x[p]);
    const std::size_t gap = p > q ? p - q : q - p;
    if (gap == 1) {
      xi.push_back(slope);
      rho.push_back(0.5 * (x[p] + x[q]));
    } else {
      xi.push_back(slope);
      rho.push_back(x[p]);
      xi.push_back(slope);
      rho.push_back(x[q]);
    }
  }
  for (std::size_t s = 1; s < xi.size(); ++s) {
    if (xi[s] < xi[s - 1]) xi[s] = xi[s - 1];  // rounding in nearly collinear stretches
  }
  const double scale = flux.gamma() * t;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double z = u[i] / scale;
    const auto it = std::upper_bound(xi.begin(), xi.end(), z);
    if (it == xi.begin()) {
      out[i] = rho_left;
    } else if (it == xi.end()) {
      out[i] = rho_right;
    } else {
      const auto p = static_cast<std::size_t>(it - xi.begin());
      const double w = (z - xi[p - 1]) / (xi[p] - xi[p - 1]);
      out[i] = rho[p - 1] + w * (rho[p] - rho[p - 1]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Test functions and weak forms

double TestFunction::time_factor(double t) const {
  if (t < 0.0 || t >= t_max) return 0.0;
  const double q = 1.0 - (t / t_max) * (t / t_max);
  return q * q * q;
}

double TestFunction::time_derivative(double t) const {
  if (t < 0.0 || t >= t_max) return 0.0;
  const double q = 1.0 - (t / t_max) * (t / t_max);
  return 3.0 * q * q * (-2.0 * t / (t_max * t_max));
}

double TestFunction::space(const MacroPoint& u, int dim) const {
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = u[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
    r2 += d * d;
  }
  const double q = 1.0 - r2 / (radius * radius);
  if (q <= 0.0) return 0.0;
  return q * q * q * q;
}

double TestFunction::diagonal_derivative(const MacroPoint& u, int dim) const {
  double r2 = 0.0;
  double diag = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = u[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)];
    r2 += d * d;
    diag += d;
  }
  const double q = 1.0 - r2 / (radius * radius);
  if (q <= 0.0) return 0.0;
  return 4.0 * q * q * q * (-2.0 * diag / (radius * radius)) / std::sqrt(static_cast<double>(dim));
}

namespace {

// Trapezoid weights of the history times restricted to [0, t_max].
std::vector<double> time_weights(const FieldHistory& history, double t_max) {
  std::vector<double> w(history.size(), 0.0);
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    const double a = std::min(history[k].t, t_max);
    const double b = std::min(history[k + 1].t, t_max);
    if (b > a) {
      w[k] += 0.5 * (b - a);
      w[k + 1] += 0.5 * (b - a);
    }
  }
  return w;
}

void check_history(const FieldHistory& history) {
  if (history.empty()) throw DomainError("empty field history");
  for (std::size_t k = 1; k < history.size(); ++k) {
    if (history[k].t < history[k - 1].t) throw DomainError("field history is not time ordered");
  }
}

}  // namespace

std::vector<KruzkovMargin> kruzkov_check(const FieldHistory& history, const FluxModel& flux,
                                         const std::vector<double>& c_list,
                                         const std::vector<TestFunction>& tests) {
  check_history(history);
  const GridField& f0 = history.front();
  const int dim = f0.dim;
  const double vol = f0.cell_volume();
  const double gamma = flux.gamma();
  std::vector<KruzkovMargin> out;
  for (std::size_t g = 0; g < tests.size(); ++g) {
    const TestFunction& test = tests[g];
    const auto wt = time_weights(history, test.t_max);
    std::vector<double> space(f0.values.size());
    std::vector<double> grad(f0.values.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
      const MacroPoint p = f0.cell_center(static_cast<std::int64_t>(i));
      space[i] = test.space(p, dim);
      grad[i] = test.diagonal_derivative(p, dim);
    }
    for (double c : c_list) {
      const double fc = flux(c);
      double total = 0.0;
      for (std::size_t i = 0; i < space.size(); ++i) {
        total += std::abs(f0.values[i] - c) * test.time_factor(f0.t) * space[i] * vol;
      }
      for (std::size_t k = 0; k < history.size(); ++k) {
        if (wt[k] == 0.0) continue;
        const GridField& f = history[k];
        const double tau = test.time_factor(f.t);
        const double dtau = test.time_derivative(f.t);
        double acc = 0.0;
        for (std::size_t i = 0; i < space.size(); ++i) {
          if (space[i] == 0.0 && grad[i] == 0.0) continue;
          const double r = f.values[i];
          const double sg = r > c ? 1.0 : (r < c ? -1.0 : 0.0);
          acc += std::abs(r - c) * dtau * space[i] + gamma * sg * (flux(r) - fc) * tau * grad[i];
        }
        total += wt[k] * acc * vol;
      }
      out.push_back({c, g, total});
    }
  }
  return out;
}

double weak_residual(const FieldHistory& history, const FluxModel& flux, const TestFunction& g) {
  check_history(history);
  const GridField& f0 = history.front();
  const int dim = f0.dim;
  const double vol = f0.cell_volume();
  const double rs = f0.rho_star;
  const double f_star = flux(rs);
  const auto wt = time_weights(history, g.t_max);
  double total = 0.0;
  for (std::size_t i = 0; i < f0.values.size(); ++i) {
    const MacroPoint p = f0.cell_center(static_cast<std::int64_t>(i));
    total += (f0.values[i] - rs) * g(f0.t, p, dim) * vol;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (wt[k] == 0.0) continue;
    const GridField& f = history[k];
    const double tau = g.time_factor(f.t);
    const double dtau = g.time_derivative(f.t);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const MacroPoint p = f.cell_center(static_cast<std::int64_t>(i));
      const double s = g.space(p, dim);
      const double ds = g.diagonal_derivative(p, dim);
      if (s == 0.0 && ds == 0.0) continue;
      acc += (f.values[i] - rs) * dtau * s + flux.gamma() * (flux(f.values[i]) - f_star) * tau * ds;
    }
    total += wt[k] * acc * vol;
  }
  return total;
}

double weak_residual(const FieldHistory& history, const ConstitutiveTable& table, double alpha,
                     const TestFunction& g, double cutoff) {
  check_history(history);
  const GridField& f0 = history.front();
  if (f0.dim != 1) throw DomainError("anomalous weak residual is implemented in 1D");
  const NonlocalOperator op(table, alpha, 1, f0.cells, f0.du, cutoff);
  const std::vector<double>& w = op.node_weights();
  const std::int64_t n = f0.cells;
  const double du = f0.du;
  const double scale = std::pow(du, -alpha);
  const double rs = f0.rho_star;
  const double phi_s = table.phi(rs);
  const double psi_s = table.psi(rs);
  const double cut = std::isinf(cutoff) ? 0.0 : std::pow(cutoff, -alpha);

  std::vector<double> space(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    space[static_cast<std::size_t>(i)] = g.space({f0.center(i), 0.0, 0.0}, 1);
  }
  // Left-edge weights: mass of v > (k + 1/2) du below the cutoff.
  std::vector<double> edge(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const double d = (static_cast<double>(k) + 0.5) * du;
    edge[static_cast<std::size_t>(k)] = std::max(std::pow(d, -alpha) - cut, 0.0) / alpha;
  }

  auto cross_term = [&](const GridField& f) {
    std::vector<double> phi(static_cast<std::size_t>(n));
    std::vector<double> psi(static_cast<std::size_t>(2 * n + 1), psi_s);
    std::vector<double> sp(static_cast<std::size_t>(2 * n + 1), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
      phi[static_cast<std::size_t>(i)] = table.phi(f.values[static_cast<std::size_t>(i)]);
      psi[static_cast<std::size_t>(i)] = table.psi(f.values[static_cast<std::size_t>(i)]);
      sp[static_cast<std::size_t>(i)] = space[static_cast<std::size_t>(i)];
    }
    const double base = phi_s * psi_s;
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double phi_i = phi[static_cast<std::size_t>(i)];
      const double sp_i = sp[static_cast<std::size_t>(i)];
      double inner = 0.0;
      for (std::int64_t j = 1; j <= n; ++j) {
        const auto q = static_cast<std::size_t>(i + j);
        inner += w[static_cast<std::size_t>(j - 1)] * (phi_i * psi[q] - base) * (sp[q] - sp_i);
      }
      acc += scale * inner;
      acc += phi_s * (psi[static_cast<std::size_t>(i)] - psi_s) * sp_i *
             edge[static_cast<std::size_t>(i)];
    }
    return acc * du;
  };

  const auto wt = time_weights(history, g.t_max);
  double total = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    total += (f0.values[static_cast<std::size_t>(i)] - rs) * g.time_factor(f0.t) *
             space[static_cast<std::size_t>(i)] * du;
  }
  for (std::size_t k = 0; k < history.size(); ++k) {
    if (wt[k] == 0.0) continue;
    const GridField& f = history[k];
    if (f.cells != n) throw DomainError("history fields must share one grid");
    const double dtau = g.time_derivative(f.t);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      acc += (f.values[static_cast<std::size_t>(i)] - rs) * dtau * space[static_cast<std::size_t>(i)];
    }
    total += wt[k] * (acc * du + g.time_factor(f.t) * cross_term(f));
  }
  return total;
}

}  // namespace hydroscale

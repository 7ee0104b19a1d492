#include "hydroscale/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hydroscale/errors.hpp"
#include "hydroscale/parallel.hpp"

namespace hydroscale {

CoupledConfiguration::CoupledConfiguration(Lattice lattice, std::vector<std::int32_t> eta,
                                           std::vector<std::int32_t> xi, RateModel model,
                                           double gamma_n)
    : lattice_(lattice),
      eta_(std::move(eta)),
      xi_(std::move(xi)),
      model_(std::move(model)),
      index_(eta_.size()),
      gamma_n_(gamma_n) {
  const auto n = static_cast<std::size_t>(lattice_.sites());
  if (eta_.size() != n || xi_.size() != n) throw DomainError("coupled configuration size mismatch");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (eta_[i] < 0 || xi_[i] < 0) throw DomainError("negative occupancy");
    w[i] = std::max(model_.g(eta_[i]), model_.g(xi_[i]));
    count_site(static_cast<std::int64_t>(i), +1);
  }
  index_.assign(w);
}

void CoupledConfiguration::count_site(std::int64_t site, int sign) {
  const auto i = static_cast<std::size_t>(site);
  if (eta_[i] > xi_[i]) sites_above_ += sign;
  if (eta_[i] < xi_[i]) sites_below_ += sign;
}

CoupledConfiguration::Order CoupledConfiguration::order() const {
  if (sites_above_ == 0 && sites_below_ == 0) return Order::kEqual;
  if (sites_above_ == 0) return Order::kEtaBelow;
  if (sites_below_ == 0) return Order::kEtaAbove;
  return Order::kUnordered;
}

std::int64_t CoupledConfiguration::discrepancy() const {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < eta_.size(); ++i) d += std::abs(eta_[i] - xi_[i]);
  return d;
}

void CoupledConfiguration::refresh(std::int64_t site) {
  const auto i = static_cast<std::size_t>(site);
  index_.set(i, std::max(model_.g(eta_[i]), model_.g(xi_[i])));
}

void CoupledConfiguration::move(bool move_eta, bool move_xi, std::int64_t from, std::int64_t to) {
  const auto f = static_cast<std::size_t>(from);
  const auto t = static_cast<std::size_t>(to);
  count_site(from, -1);
  if (to != from) count_site(to, -1);
  if (move_eta) {
    if (eta_[f] <= 0) throw std::logic_error("coupled move of eta from an empty site");
    --eta_[f];
    ++eta_[t];
  }
  if (move_xi) {
    if (xi_[f] <= 0) throw std::logic_error("coupled move of xi from an empty site");
    --xi_[f];
    ++xi_[t];
  }
  count_site(from, +1);
  if (to != from) count_site(to, +1);
  if (const auto m0 = model_.m0(); m0 && (eta_[t] > *m0 || xi_[t] > *m0)) {
    throw std::logic_error("coupled occupancy exceeded M0 at site " + std::to_string(to));
  }
  refresh(from);
  refresh(to);
}

namespace {

bool order_broken(CoupledConfiguration::Order before, CoupledConfiguration::Order after) {
  using O = CoupledConfiguration::Order;
  switch (before) {
    case O::kEqual:
      return after != O::kEqual;
    case O::kEtaBelow:
      return after == O::kEtaAbove || after == O::kUnordered;
    case O::kEtaAbove:
      return after == O::kEtaBelow || after == O::kUnordered;
    case O::kUnordered:
      return false;
  }
  return false;
}

struct Proposal {
  std::int64_t origin;
  Displacement d;
  std::int64_t target;
  CoupledEvent::Branch branch;
};

Proposal propose(const CoupledConfiguration& cc, const JumpKernel& kernel, Rng& rng,
                 bool no_wrap) {
  Proposal p{};
  p.origin = cc.pick_site(uniform01(rng));
  p.d = kernel.sample_displacement(rng);
  const Lattice& lat = cc.lattice();
  p.target = no_wrap ? lat.shift_no_wrap(p.origin, p.d) : lat.shift(p.origin, p.d);
  const double u = uniform01(rng);
  p.branch = CoupledEvent::Branch::kNone;
  if (p.target < 0) return p;
  const RateModel& m = cc.model();
  const auto x = static_cast<std::size_t>(p.origin);
  const auto y = static_cast<std::size_t>(p.target);
  const double g_eta = m.g(cc.eta()[x]);
  const double g_xi = m.g(cc.xi()[x]);
  const double a = g_eta * m.h(cc.eta()[y]);
  const double b = g_xi * m.h(cc.xi()[y]);
  const double v = u * std::max(g_eta, g_xi) * m.h_sup();
  if (v < std::min(a, b)) {
    p.branch = CoupledEvent::Branch::kBoth;
  } else if (v < std::max(a, b)) {
    p.branch = a > b ? CoupledEvent::Branch::kEtaOnly : CoupledEvent::Branch::kXiOnly;
  }
  return p;
}

void apply(CoupledConfiguration& cc, const Proposal& p, bool assert_order,
           UnorderedTracker* tracker) {
  if (p.branch == CoupledEvent::Branch::kNone) return;
  const auto before = assert_order ? cc.order() : CoupledConfiguration::Order::kUnordered;
  if (tracker) tracker->before_move(cc, p.origin, p.target);
  cc.move(p.branch != CoupledEvent::Branch::kXiOnly, p.branch != CoupledEvent::Branch::kEtaOnly,
          p.origin, p.target);
  if (tracker) tracker->after_move(cc, p.origin, p.target);
  if (assert_order && cc.model().attractive() && order_broken(before, cc.order())) {
    throw std::logic_error("attractive coupling broke the sitewise order at site " +
                           std::to_string(p.target));
  }
}

}  // namespace

CoupledEvent coupled_step(CoupledConfiguration& cc, const JumpKernel& kernel, Rng& rng,
                          const CoupledStepOptions& options) {
  CoupledEvent ev;
  const double weight = cc.weight_total();
  if (!(weight > 0.0)) {
    ev.frozen = true;
    cc.set_micro_time(std::numeric_limits<double>::infinity());
    return ev;
  }
  const double rate = cc.model().h_sup() * kernel.truncated_total() * weight;
  cc.set_micro_time(cc.micro_time() + exponential(rng, rate));
  const Proposal p = propose(cc, kernel, rng, options.no_wrap);
  apply(cc, p, options.assert_order, nullptr);
  ev.origin = p.origin;
  ev.displacement = p.d;
  ev.target = p.target;
  ev.branch = p.branch;
  return ev;
}

RunStats run_coupled_until(CoupledConfiguration& cc, const JumpKernel& kernel, double t_macro,
                           Rng& rng, const CoupledStepOptions& options,
                           UnorderedTracker* tracker) {
  RunStats stats;
  const double horizon = t_macro * cc.gamma_n();
  if (horizon < cc.micro_time()) throw DomainError("run_coupled_until: target precedes current time");
  const double scale = cc.model().h_sup() * kernel.truncated_total();
  while (true) {
    const double weight = cc.weight_total();
    double next = std::numeric_limits<double>::infinity();
    if (weight > 0.0) next = cc.micro_time() + exponential(rng, scale * weight);
    if (next > horizon) {
      if (tracker) tracker->advance(horizon - cc.micro_time());
      cc.set_micro_time(horizon);
      return stats;
    }
    if (stats.proposals >= options.max_events) {
      throw BudgetError("coupled event budget exceeded", stats.proposals);
    }
    if (tracker) tracker->advance(next - cc.micro_time());
    cc.set_micro_time(next);
    ++stats.proposals;
    const Proposal p = propose(cc, kernel, rng, options.no_wrap);
    if (p.branch != CoupledEvent::Branch::kNone) ++stats.accepted;
    apply(cc, p, options.assert_order, tracker);
  }
}

Region Region::whole(const Lattice& lattice) {
  Region r;
  for (int i = 0; i < lattice.dim(); ++i) r.hi[static_cast<std::size_t>(i)] = lattice.side() - 1;
  return r;
}

Region Region::macro_box(const Lattice& lattice, double a, double b) {
  Region r;
  const auto n = static_cast<double>(lattice.scale_n());
  const std::int64_t half = lattice.side() / 2;
  const auto lo = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(a * n)) + half, 0,
                                           lattice.side() - 1);
  const auto hi = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(b * n)) + half, 0,
                                           lattice.side() - 1);
  for (int i = 0; i < lattice.dim(); ++i) {
    r.lo[static_cast<std::size_t>(i)] = lo;
    r.hi[static_cast<std::size_t>(i)] = hi;
  }
  return r;
}

bool Region::contains(const Lattice& lattice, std::int64_t site) const {
  for (int i = 0; i < lattice.dim(); ++i) {
    const auto c = lattice.coordinate(site, i);
    const auto a = static_cast<std::size_t>(i);
    if (c < lo[a] || c > hi[a]) return false;
  }
  return true;
}

namespace {

// U and O for the pair {x, x + d}; returns false when the pair is not counted.
bool pair_indicators(const CoupledConfiguration& cc, const Region& region, std::int64_t x,
                     const Displacement& d, int& u, int& o) {
  const Lattice& lat = cc.lattice();
  if (x < 0 || !region.contains(lat, x)) return false;
  const std::int64_t y = lat.shift_no_wrap(x, d);
  if (y < 0 || !region.contains(lat, y)) return false;
  const auto ex = cc.eta()[static_cast<std::size_t>(x)];
  const auto ey = cc.eta()[static_cast<std::size_t>(y)];
  const auto xx = cc.xi()[static_cast<std::size_t>(x)];
  const auto xy = cc.xi()[static_cast<std::size_t>(y)];
  const bool eta_ge = ex >= xx && ey >= xy;
  const bool xi_ge = xx >= ex && xy >= ey;
  u = (eta_ge || xi_ge) ? 0 : 1;
  o = 0;
  if (eta_ge && !xi_ge) o = 1;
  if (xi_ge && !eta_ge) o = -1;
  return true;
}

Displacement negate(const Displacement& d) {
  Displacement m{};
  for (int i = 0; i < kMaxDim; ++i) m[static_cast<std::size_t>(i)] = -d[static_cast<std::size_t>(i)];
  return m;
}

}  // namespace

std::vector<UnorderedCounts> unordered_statistics(const CoupledConfiguration& cc,
                                                  const std::vector<Displacement>& d_list,
                                                  const Region& region) {
  std::vector<UnorderedCounts> out;
  for (const auto& d : d_list) {
    UnorderedCounts c;
    c.d = d;
    for (std::int64_t x = 0; x < cc.lattice().sites(); ++x) {
      int u = 0;
      int o = 0;
      if (pair_indicators(cc, region, x, d, u, o)) {
        c.unordered += u;
        c.ordered_sum += o;
      }
    }
    out.push_back(c);
  }
  return out;
}

UnorderedTracker::UnorderedTracker(const CoupledConfiguration& cc, std::vector<Displacement> d_list,
                                   Region region)
    : d_list_(std::move(d_list)), region_(region), lattice_(cc.lattice()) {
  const auto stats = unordered_statistics(cc, d_list_, region_);
  for (const auto& s : stats) counts_.push_back(s.unordered);
  integrals_.assign(d_list_.size(), 0.0);
}

int UnorderedTracker::pair_unordered(const CoupledConfiguration& cc, std::int64_t base,
                                     std::size_t k) const {
  int u = 0;
  int o = 0;
  return pair_indicators(cc, region_, base, d_list_[k], u, o) ? u : 0;
}

void UnorderedTracker::collect(const CoupledConfiguration& cc, std::int64_t x, std::int64_t y) {
  (void)cc;
  touched_.clear();
  for (std::size_t k = 0; k < d_list_.size(); ++k) {
    const Displacement back = negate(d_list_[k]);
    const std::int64_t bases[4] = {x, lattice_.shift_no_wrap(x, back), y,
                                   lattice_.shift_no_wrap(y, back)};
    for (auto b : bases) {
      if (b < 0) continue;
      const auto entry = std::make_pair(k, b);
      if (std::find(touched_.begin(), touched_.end(), entry) == touched_.end()) touched_.push_back(entry);
    }
  }
}

void UnorderedTracker::before_move(const CoupledConfiguration& cc, std::int64_t x, std::int64_t y) {
  collect(cc, x, y);
  for (const auto& [k, b] : touched_) counts_[k] -= pair_unordered(cc, b, k);
}

void UnorderedTracker::after_move(const CoupledConfiguration& cc, std::int64_t, std::int64_t) {
  for (const auto& [k, b] : touched_) counts_[k] += pair_unordered(cc, b, k);
}

void UnorderedTracker::advance(double micro_dt) {
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    integrals_[k] += static_cast<double>(counts_[k]) * micro_dt;
  }
}

CoupledConfiguration init_ordered_pair(const EquilibriumTable& table, const Profile& rho0,
                                       double c, const Lattice& lattice, double gamma_n, Rng& rng) {
  if (!(c >= 0.0) || !(c < table.rho_c())) throw DomainError("coupling density c outside [0, rho_c)");
  const InitialLaw eta_law(table, lattice, rho0);
  const InitialLaw xi_law(table, lattice, make_profile("constant", c, lattice.dim()));
  std::vector<double> u(static_cast<std::size_t>(lattice.sites()));
  for (double& v : u) v = uniform01(rng);
  return CoupledConfiguration(lattice, eta_law.occupancy_from_uniforms(u),
                              xi_law.occupancy_from_uniforms(u), table.model(), gamma_n);
}

std::vector<OrderingRow> ordering_experiment(const EquilibriumTable& table, const Profile& rho0,
                                             double rho_star, double c,
                                             const OrderingSetup& setup) {
  if (setup.replicas < 2) throw DomainError("ordering experiment needs at least 2 replicas");
  std::vector<OrderingRow> rows;
  for (std::size_t ni = 0; ni < setup.n_list.size(); ++ni) {
    const std::int64_t big_n = setup.n_list[ni];
    const auto side = static_cast<std::int64_t>(std::llround(setup.window_factor * static_cast<double>(big_n)));
    const Lattice lattice(setup.dim, side, big_n);
    const JumpKernel kernel(setup.dim, setup.alpha, side / 2, setup.orientation);
    const double gamma_n = gamma_n_scale(setup.alpha, big_n);
    const Profile shaped = flatten_to_far_field(rho0, rho_star, lattice.window(), setup.dim);
    const InitialLaw eta_law(table, lattice, shaped);
    const InitialLaw xi_law(table, lattice, make_profile("constant", c, setup.dim));
    const Region region = Region::macro_box(lattice, setup.region_a, setup.region_b);
    const double volume = std::pow(static_cast<double>(big_n), setup.dim);
    std::vector<std::vector<double>> results(setup.replicas);
    parallel_for(
        setup.replicas,
        [&](std::size_t r) {
          Rng rng = make_stream(setup.seed, 0x6f72646572ULL, static_cast<std::uint64_t>(big_n), r);
          std::vector<double> u(static_cast<std::size_t>(lattice.sites()));
          for (double& v : u) v = uniform01(rng);
          CoupledConfiguration cc(lattice, eta_law.occupancy_from_uniforms(u),
                                  xi_law.occupancy_from_uniforms(u), table.model(), gamma_n);
          UnorderedTracker tracker(cc, setup.d_list, region);
          CoupledStepOptions opts;
          opts.max_events = setup.max_events;
          run_coupled_until(cc, kernel, setup.t_macro, rng, opts, &tracker);
          std::vector<double> out;
          for (double integral : tracker.micro_integrals()) {
            out.push_back(integral / gamma_n / volume);
          }
          results[r] = std::move(out);
        },
        setup.workers);
    for (std::size_t k = 0; k < setup.d_list.size(); ++k) {
      double sum = 0.0;
      for (const auto& r : results) sum += r[k];
      const double mean = sum / static_cast<double>(setup.replicas);
      double ss = 0.0;
      for (const auto& r : results) ss += (r[k] - mean) * (r[k] - mean);
      const double var = ss / static_cast<double>(setup.replicas - 1);
      rows.push_back({big_n, setup.d_list[k], mean, std::sqrt(var / static_cast<double>(setup.replicas))});
    }
  }
  return rows;
}

}  // namespace hydroscale

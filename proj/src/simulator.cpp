#include "hydroscale/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "hydroscale/errors.hpp"

namespace hydroscale {

namespace {

constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

std::vector<double> site_weights(const std::vector<std::int32_t>& occ, const RateModel& model) {
  std::vector<double> w(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) w[i] = model.g(occ[i]);
  return w;
}

}  // namespace

Configuration::Configuration(Lattice lattice, std::vector<std::int32_t> occupancy, RateModel model,
                             double gamma_n)
    : lattice_(lattice),
      occupancy_(std::move(occupancy)),
      model_(std::move(model)),
      index_(occupancy_.size()),
      gamma_n_(gamma_n) {
  if (static_cast<std::int64_t>(occupancy_.size()) != lattice_.sites()) {
    throw DomainError("configuration size does not match the lattice");
  }
  for (auto k : occupancy_) {
    if (k < 0) throw DomainError("negative occupancy");
  }
  index_.assign(site_weights(occupancy_, model_));
}

std::int64_t Configuration::particle_count() const {
  std::int64_t n = 0;
  for (auto k : occupancy_) n += k;
  return n;
}

double Configuration::recomputed_weight_total() const { return index_.recompute_total(); }

void Configuration::refresh(std::int64_t site) {
  const auto i = static_cast<std::size_t>(site);
  index_.set(i, model_.g(occupancy_[i]));
}

void Configuration::move_particle(std::int64_t from, std::int64_t to) {
  auto& src = occupancy_[static_cast<std::size_t>(from)];
  if (src <= 0) throw std::logic_error("move_particle from an empty site");
  --src;
  ++occupancy_[static_cast<std::size_t>(to)];
  if (const auto m0 = model_.m0(); m0 && occupancy_[static_cast<std::size_t>(to)] > *m0) {
    throw std::logic_error("occupancy exceeded M0 at site " + std::to_string(to));
  }
  refresh(from);
  refresh(to);
  if (++moves_since_rebuild_ >= kRebuildInterval) {
    moves_since_rebuild_ = 0;
    index_.assign(site_weights(occupancy_, model_));
  }
}

EventRecord step(Configuration& config, const JumpKernel& kernel, Rng& rng,
                 const StepOptions& options) {
  EventRecord ev;
  const double weight = config.weight_total();
  if (!(weight > 0.0)) {
    ev.frozen = true;
    config.set_micro_time(std::numeric_limits<double>::infinity());
    return ev;
  }
  const RateModel& model = config.model();
  const double rate = model.h_sup() * kernel.truncated_total() * weight;
  config.set_micro_time(config.micro_time() + exponential(rng, rate));
  ev.origin = config.pick_site(uniform01(rng));
  ev.displacement = kernel.sample_displacement(rng);
  const Lattice& lat = config.lattice();
  ev.target = options.no_wrap ? lat.shift_no_wrap(ev.origin, ev.displacement)
                              : lat.shift(ev.origin, ev.displacement);
  const double u = uniform01(rng);
  if (ev.target < 0) return ev;
  if (u * model.h_sup() < model.h(config[ev.target])) {
    config.move_particle(ev.origin, ev.target);
    ev.accepted = true;
  }
  return ev;
}

RunStats run_until(Configuration& config, const JumpKernel& kernel, double t_macro, Rng& rng,
                   const StepOptions& options) {
  RunStats stats;
  const double horizon = t_macro * config.gamma_n();
  if (horizon < config.micro_time()) {
    throw DomainError("run_until: target time precedes the current time");
  }
  const RateModel& model = config.model();
  const Lattice& lat = config.lattice();
  const double scale = model.h_sup() * kernel.truncated_total();
  while (true) {
    const double weight = config.weight_total();
    if (!(weight > 0.0)) {
      config.set_micro_time(horizon);
      return stats;
    }
    const double next = config.micro_time() + exponential(rng, scale * weight);
    if (next > horizon) {
      config.set_micro_time(horizon);
      return stats;
    }
    if (stats.proposals >= options.max_events) {
      throw BudgetError("event budget of " + std::to_string(options.max_events) +
                            " proposals exceeded at macro time " +
                            std::to_string(config.macro_time()),
                        stats.proposals);
    }
    config.set_micro_time(next);
    ++stats.proposals;
    const std::int64_t origin = config.pick_site(uniform01(rng));
    const Displacement& d = kernel.sample_displacement(rng);
    const std::int64_t target = options.no_wrap ? lat.shift_no_wrap(origin, d) : lat.shift(origin, d);
    const double u = uniform01(rng);
    if (target < 0) continue;
    if (u * model.h_sup() < model.h(config[target])) {
      config.move_particle(origin, target);
      ++stats.accepted;
    }
  }
}

InitialLaw::InitialLaw(const EquilibriumTable& table, const Lattice& lattice, const Profile& rho0)
    : lattice_(lattice) {
  const auto n = static_cast<std::size_t>(lattice.sites());
  density_.resize(n);
  cdf_index_.resize(n);
  std::map<double, std::uint32_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = rho0(lattice.macro_point(static_cast<std::int64_t>(i)));
    if (!(rho >= 0.0) || rho > table.rho_c()) {
      throw DomainError("initial profile value " + std::to_string(rho) + " outside [0, rho_c]");
    }
    density_[i] = rho;
    auto [it, inserted] = seen.try_emplace(rho, static_cast<std::uint32_t>(cdfs_.size()));
    if (inserted) cdfs_.push_back(table.cdf_of_density(rho));
    cdf_index_[i] = it->second;
  }
}

std::vector<std::int32_t> InitialLaw::sample_occupancy(Rng& rng) const {
  std::vector<std::int32_t> occ(density_.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    occ[i] = static_cast<std::int32_t>(inverse_cdf(cdfs_[cdf_index_[i]], uniform01(rng)));
  }
  return occ;
}

std::vector<std::int32_t> InitialLaw::occupancy_from_uniforms(std::span<const double> u) const {
  if (u.size() != density_.size()) throw DomainError("uniform vector size mismatch");
  std::vector<std::int32_t> occ(density_.size());
  for (std::size_t i = 0; i < occ.size(); ++i) {
    occ[i] = static_cast<std::int32_t>(inverse_cdf(cdfs_[cdf_index_[i]], u[i]));
  }
  return occ;
}

Configuration init_from_profile(const EquilibriumTable& table, const Profile& rho0,
                                const Lattice& lattice, double gamma_n, Rng& rng,
                                bool flatten_seam, double rho_star) {
  const Profile shaped =
      flatten_seam ? flatten_to_far_field(rho0, rho_star, lattice.window(), lattice.dim()) : rho0;
  const InitialLaw law(table, lattice, shaped);
  return Configuration(lattice, law.sample_occupancy(rng), table.model(), gamma_n);
}

double EmpiricalField::block_volume() const {
  return std::pow(static_cast<double>(2 * half_width + 1), lattice.dim());
}

EmpiricalField block_average(std::span<const std::int32_t> occupancy, const Lattice& lattice,
                             std::int64_t l) {
  if (l < 0 || 2 * l + 1 > lattice.side()) {
    throw DomainError("block half-width must satisfy 0 <= l < side/2");
  }
  const auto n = static_cast<std::size_t>(lattice.sites());
  std::vector<std::int64_t> sums(occupancy.begin(), occupancy.end());
  std::vector<std::int64_t> line(static_cast<std::size_t>(lattice.side()));
  const std::int64_t side = lattice.side();
  std::int64_t stride = 1;
  for (int axis = lattice.dim() - 1; axis >= 0; --axis) {
    // Lines along `axis`: start sites have coordinate 0 on that axis.
    for (std::int64_t s = 0; s < lattice.sites(); ++s) {
      if ((s / stride) % side != 0) continue;
      for (std::int64_t k = 0; k < side; ++k) line[static_cast<std::size_t>(k)] = sums[static_cast<std::size_t>(s + k * stride)];
      std::int64_t window = 0;
      for (std::int64_t k = -l; k <= l; ++k) window += line[static_cast<std::size_t>((k + side) % side)];
      for (std::int64_t k = 0; k < side; ++k) {
        sums[static_cast<std::size_t>(s + k * stride)] = window;
        window += line[static_cast<std::size_t>((k + l + 1) % side)];
        window -= line[static_cast<std::size_t>((k - l + side) % side)];
      }
    }
    stride *= side;
  }
  EmpiricalField field{lattice, l, std::move(sums), std::vector<double>(n)};
  const double volume = field.block_volume();
  for (std::size_t i = 0; i < n; ++i) field.values[i] = static_cast<double>(field.block_sums[i]) / volume;
  return field;
}

EmpiricalField block_average(const Configuration& config, std::int64_t l) {
  return block_average(config.occupancy(), config.lattice(), l);
}

std::size_t bin_of(const std::vector<double>& edges, double v) {
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  if (it == edges.begin()) return 0;
  const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(b, bins - 1);
}

YoungHistogram young_histogram(const Configuration& config, std::int64_t l,
                               const std::vector<double>& bin_edges, std::int64_t cell_side) {
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()) ||
      std::adjacent_find(bin_edges.begin(), bin_edges.end()) != bin_edges.end()) {
    throw DomainError("bin edges must be strictly increasing with at least two entries");
  }
  const Lattice& lat = config.lattice();
  if (cell_side < 1 || lat.side() % cell_side != 0) {
    throw DomainError("coarse cell side must divide the lattice side");
  }
  const EmpiricalField field = block_average(config, l);
  const std::int64_t per_axis = lat.side() / cell_side;
  std::int64_t cells = 1;
  for (int i = 0; i < lat.dim(); ++i) cells *= per_axis;
  const std::size_t bins = bin_edges.size() - 1;
  YoungHistogram hist{bin_edges, std::vector<std::int64_t>(bins, 0),
                      std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(cells),
                                                             std::vector<std::int64_t>(bins, 0)),
                      cells};
  auto cell_of = [&](std::int64_t site) {
    std::int64_t c = 0;
    for (int a = 0; a < lat.dim(); ++a) c = c * per_axis + lat.coordinate(site, a) / cell_side;
    return c;
  };
  for (std::int64_t s = 0; s < lat.sites(); ++s) {
    const auto b = bin_of(bin_edges, field.values[static_cast<std::size_t>(s)]);
    ++hist.per_cell[static_cast<std::size_t>(cell_of(s))][b];
    bool centre = true;
    for (int a = 0; a < lat.dim(); ++a) centre = centre && lat.coordinate(s, a) % cell_side == cell_side / 2;
    if (centre) ++hist.counts[b];
  }
  return hist;
}

}  // namespace hydroscale

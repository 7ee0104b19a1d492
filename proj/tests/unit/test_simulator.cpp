#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "hydroscale/equilibrium.hpp"
#include "hydroscale/errors.hpp"
#include "hydroscale/simulator.hpp"
#include "oracles.hpp"

using namespace hydroscale;

TEST_SUITE("simulator") {

TEST_CASE("Fenwick tree prefix search") {
  FenwickTree t(5);
  t.assign({1.0, 0.0, 2.0, 0.5, 0.0});
  CHECK(t.total() == 3.5);
  CHECK(t.find(0.0) == 0);
  CHECK(t.find(0.99) == 0);
  CHECK(t.find(1.0) == 2);
  CHECK(t.find(2.99) == 2);
  CHECK(t.find(3.2) == 3);
  t.set(1, 4.0);
  CHECK(t.total() == 7.5);
  CHECK(t.find(1.5) == 1);
  CHECK(t.recompute_total() == doctest::Approx(7.5));
}

TEST_CASE("block average examples") {
  const Lattice lat(1, 8, 8);
  const std::vector<std::int32_t> eta{0, 1, 0, 2, 0, 0, 3, 0};
  const auto f0 = block_average(eta, lat, 0);
  for (std::size_t i = 0; i < eta.size(); ++i) CHECK(f0.values[i] == eta[i]);
  const auto f1 = block_average(eta, lat, 1);
  CHECK(f1.values[0] == doctest::Approx(1.0 / 3.0));  // wraps: eta(7) + eta(0) + eta(1)
  CHECK(f1.values[3] == doctest::Approx(2.0 / 3.0));
  CHECK(f1.values[7] == doctest::Approx(1.0));
  CHECK(f1.block_sums[6] == 3);
  CHECK_THROWS_AS(block_average(eta, lat, 4), DomainError);

  const Lattice sq(2, 4, 4);
  std::vector<std::int32_t> two(16, 0);
  two[5] = 9;  // (1, 1)
  const auto g = block_average(two, sq, 1);
  CHECK(g.values[0] == doctest::Approx(1.0));
  CHECK(g.values[10] == doctest::Approx(1.0));
  CHECK(g.values[15] == 0.0);
}

TEST_CASE("young histogram bins") {
  const Lattice lat(1, 8, 8);
  const auto model = RateModel::zero_range();
  const Configuration c(lat, {0, 1, 0, 2, 0, 0, 3, 0}, model, 1.0);
  const auto y = young_histogram(c, 0, {0.0, 0.5, 1.5, 3.0}, 4);
  CHECK(y.cells == 2);
  CHECK(std::accumulate(y.counts.begin(), y.counts.end(), std::int64_t{0}) == 2);
  REQUIRE(y.per_cell.size() == 2);
  CHECK(y.per_cell[0] == std::vector<std::int64_t>{2, 1, 1});
  CHECK(y.per_cell[1] == std::vector<std::int64_t>{3, 0, 1});
  CHECK(bin_of({0.0, 1.0, 2.0}, -5.0) == 0);
  CHECK(bin_of({0.0, 1.0, 2.0}, 2.0) == 1);
  CHECK_THROWS_AS(young_histogram(c, 0, {0.0, 1.0}, 3), DomainError);
}

TEST_CASE("product initial law") {
  const EquilibriumTable t(RateModel::zero_range());
  const Lattice lat(1, 4000, 1000);
  Profile flat{[](const MacroPoint&) { return 1.5; }};
  const InitialLaw law(t, lat, flat);
  Rng rng(8);
  double s = 0.0;
  double s2 = 0.0;
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    for (auto k : law.sample_occupancy(rng)) {
      s += k;
      s2 += static_cast<double>(k) * k;
    }
  }
  const double n = reps * 4000.0;
  CHECK(std::abs(s / n - 1.5) < 4.0 * std::sqrt(1.5 / n));
  CHECK(std::abs(s2 / n - s * s / n / n - 1.5) < 0.08);  // Poisson variance

  std::vector<double> u(4000, 0.999999);
  auto hi = law.occupancy_from_uniforms(u);
  std::vector<double> lo(4000, 0.0);
  auto zero = law.occupancy_from_uniforms(lo);
  for (std::size_t i = 0; i < hi.size(); ++i) CHECK(hi[i] >= zero[i]);

  Profile bad{[](const MacroPoint&) { return 1.2; }};
  const EquilibriumTable ex(RateModel::exclusion());
  CHECK_THROWS_AS(InitialLaw(ex, lat, bad), DomainError);
}

TEST_CASE("a lone particle always jumps") {
  const Lattice lat(1, 16, 16);
  std::vector<std::int32_t> eta(16, 0);
  eta[3] = 1;
  Configuration c(lat, eta, RateModel::exclusion(), 1.0);
  const JumpKernel k(1, 1.0, 8);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto ev = step(c, k, rng);
    CHECK(ev.accepted);
    CHECK(c.particle_count() == 1);
  }
}

TEST_CASE("event law matches the generator rates") {
  const auto model = RateModel::zero_range_capped(2);
  const Lattice lat(1, 5, 5);
  const std::vector<std::int32_t> eta{2, 0, 1, 3, 1};
  const JumpKernel k(1, 1.0, 2);
  const Configuration start(lat, eta, model, 1.0);
  // rate of (x -> x + d) and of nothing happening, per unit of the proposal clock
  std::map<std::pair<std::int64_t, std::int64_t>, double> rate;
  double total_g = 0.0;
  for (std::int64_t x = 0; x < 5; ++x) total_g += model.g(eta[static_cast<std::size_t>(x)]);
  const double clock = model.h_sup() * k.truncated_total() * total_g;
  double accepted_rate = 0.0;
  for (std::int64_t x = 0; x < 5; ++x) {
    for (int d = 1; d <= 2; ++d) {
      const std::int64_t y = (x + d) % 5;
      const double r = model.g(eta[static_cast<std::size_t>(x)]) * k.jump_rate({d, 0, 0}) *
                       model.h(eta[static_cast<std::size_t>(y)]);
      rate[{x, y}] += r;
      accepted_rate += r;
    }
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> keys;
  std::vector<double> probs;
  for (const auto& [key, r] : rate) {
    keys.push_back(key);
    probs.push_back(r / clock);
  }
  probs.push_back(1.0 - accepted_rate / clock);
  std::vector<double> counts(probs.size(), 0.0);
  Rng rng(99);
  double wait = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    Configuration c = start;
    const auto ev = step(c, k, rng);
    wait += c.micro_time();
    if (!ev.accepted) {
      counts.back() += 1.0;
      continue;
    }
    for (std::size_t j = 0; j < keys.size(); ++j) {
      if (keys[j] == std::make_pair(ev.origin, ev.target)) counts[j] += 1.0;
    }
  }
  CHECK(oracle::chi_square(counts, probs).p_value > 1e-3);
  CHECK(std::abs(wait / n * clock - 1.0) < 5.0 / std::sqrt(n));
}

TEST_CASE("index stays exact and mass is conserved") {
  const EquilibriumTable t(RateModel::zero_range_capped(3));
  const Lattice lat(1, 256, 64);
  Rng rng(4);
  auto c = init_from_profile(t, make_profile("bump(0.6,0.5)", 0.4, 1), lat, 64.0, rng, true, 0.4);
  const auto mass = c.particle_count();
  const JumpKernel k(1, 0.5, 128);
  std::uint64_t events = 0;
  while (events < 1000000) {
    step(c, k, rng);
    ++events;
  }
  CHECK(c.particle_count() == mass);
  CHECK(std::abs(c.weight_total() - c.recomputed_weight_total()) <= 1e-9 * c.recomputed_weight_total());
}

TEST_CASE("runs are deterministic per seed") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 128, 32);
  const JumpKernel k(1, 2.0, 64);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    auto c = init_from_profile(t, make_profile("bump(0.6,0.5)", 0.2, 1), lat, 32.0, rng, true, 0.2);
    run_until(c, k, 0.3, rng);
    return std::vector<std::int32_t>(c.occupancy().begin(), c.occupancy().end());
  };
  CHECK(run(5) == run(5));
  CHECK(run(5) != run(6));
}

TEST_CASE("exclusion never exceeds one particle per site") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 64, 16);
  const JumpKernel k(1, 1.5, 32);
  Rng rng(12);
  auto c = init_from_profile(t, make_profile("bump(0.6,0.5)", 0.3, 1), lat, 16.0, rng, true, 0.3);
  for (int i = 0; i < 200000; ++i) step(c, k, rng);
  for (auto v : c.occupancy()) CHECK(v <= 1);
}

TEST_CASE("budget and no-wrap") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 64, 16);
  const JumpKernel k(1, 1.5, 32);
  Rng rng(2);
  auto c = init_from_profile(t, make_profile("bump(0.6,0.5)", 0.3, 1), lat, 16.0, rng, true, 0.3);
  StepOptions opts;
  opts.max_events = 10;
  CHECK_THROWS_AS(run_until(c, k, 5.0, rng, opts), BudgetError);

  std::vector<std::int32_t> eta(8, 0);
  eta[7] = 1;
  Configuration edge(Lattice(1, 8, 8), eta, RateModel::exclusion(), 1.0);
  StepOptions nw;
  nw.no_wrap = true;
  for (int i = 0; i < 50; ++i) {
    const auto ev = step(edge, JumpKernel(1, 1.0, 4), rng, nw);
    CHECK(!ev.accepted);
    CHECK(ev.target == -1);
  }
  CHECK(edge[7] == 1);

  Configuration empty(Lattice(1, 8, 8), std::vector<std::int32_t>(8, 0), RateModel::exclusion(), 1.0);
  const auto ev = step(empty, JumpKernel(1, 1.0, 4), rng);
  CHECK(ev.frozen);
  CHECK(std::isinf(empty.micro_time()));
}

}

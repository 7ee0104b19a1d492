#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "hydroscale/coupling.hpp"
#include "hydroscale/equilibrium.hpp"
#include "hydroscale/errors.hpp"
#include "oracles.hpp"

using namespace hydroscale;

TEST_SUITE("coupling") {

TEST_CASE("identical copies stay identical") {
  const EquilibriumTable t(RateModel::zero_range_capped(2));
  const Lattice lat(1, 128, 32);
  Rng rng(3);
  const InitialLaw law(t, lat, make_profile("bump(0.6,0.5)", 0.5, 1));
  const auto eta = law.sample_occupancy(rng);
  CoupledConfiguration cc(lat, eta, eta, t.model(), 32.0);
  const JumpKernel k(1, 0.7, 64);
  for (int i = 0; i < 100000; ++i) {
    const auto ev = coupled_step(cc, k, rng);
    CHECK((ev.branch == CoupledEvent::Branch::kNone || ev.branch == CoupledEvent::Branch::kBoth));
  }
  CHECK(cc.order() == CoupledConfiguration::Order::kEqual);
  CHECK(cc.discrepancy() == 0);
}

TEST_CASE("sitewise order survives a million events") {
  const EquilibriumTable t(RateModel::zero_range_capped(3));
  const Lattice lat(1, 256, 64);
  Rng rng(17);
  const auto cc0 = init_ordered_pair(t, make_profile("bump(0.5,0.5)", 0.8, 1), 0.8, lat, 64.0, rng);
  CoupledConfiguration cc = cc0;
  CHECK(cc.order() == CoupledConfiguration::Order::kEtaAbove);
  const JumpKernel k(1, 1.5, 128);
  CoupledStepOptions opts;
  opts.assert_order = true;
  std::int64_t last = cc.discrepancy();
  bool monotone = true;
  for (int i = 0; i < 1000000; ++i) {
    coupled_step(cc, k, rng, opts);
    if ((i & 1023) == 0) {
      const auto d = cc.discrepancy();
      monotone = monotone && d <= last;
      last = d;
    }
  }
  CHECK(monotone);
  CHECK(cc.order() != CoupledConfiguration::Order::kUnordered);
  CHECK(cc.recomputed_weight_total() == doctest::Approx(cc.weight_total()).epsilon(1e-9));
}

TEST_CASE("discrepancy never grows for exclusion") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 128, 32);
  Rng rng(23);
  const InitialLaw a(t, lat, make_profile("bump(0.6,0.5)", 0.2, 1));
  const InitialLaw b(t, lat, make_profile("constant", 0.5, 1));
  CoupledConfiguration cc(lat, a.sample_occupancy(rng), b.sample_occupancy(rng), t.model(), 32.0);
  const JumpKernel k(1, 2.0, 64);
  auto last = cc.discrepancy();
  for (int i = 0; i < 200000; ++i) {
    coupled_step(cc, k, rng);
    const auto d = cc.discrepancy();
    REQUIRE(d <= last);
    last = d;
  }
}

TEST_CASE("three-branch law from a fixed state") {
  const auto model = RateModel::zero_range_capped(2);
  const Lattice lat(1, 4, 4);
  const std::vector<std::int32_t> eta{2, 0, 1, 3};
  const std::vector<std::int32_t> xi{1, 2, 0, 0};
  const JumpKernel k(1, 1.0, 2);
  const CoupledConfiguration start(lat, eta, xi, model, 1.0);
  using Key = std::tuple<std::int64_t, std::int64_t, int>;
  std::map<Key, double> rate;
  double clock_weight = 0.0;
  for (std::size_t x = 0; x < 4; ++x) clock_weight += std::max(model.g(eta[x]), model.g(xi[x]));
  const double clock = model.h_sup() * k.truncated_total() * clock_weight;
  double total = 0.0;
  for (std::int64_t x = 0; x < 4; ++x) {
    for (int d = 1; d <= 2; ++d) {
      const std::int64_t y = (x + d) % 4;
      const auto xs = static_cast<std::size_t>(x);
      const auto ys = static_cast<std::size_t>(y);
      const double p = k.jump_rate({d, 0, 0});
      const double a = model.g(eta[xs]) * model.h(eta[ys]) * p;
      const double b = model.g(xi[xs]) * model.h(xi[ys]) * p;
      rate[{x, y, 0}] += std::min(a, b);
      rate[{x, y, 1}] += std::max(a - b, 0.0);
      rate[{x, y, 2}] += std::max(b - a, 0.0);
      total += std::max(a, b);
    }
  }
  std::vector<Key> keys;
  std::vector<double> probs;
  for (const auto& [key, r] : rate) {
    if (r == 0.0) continue;
    keys.push_back(key);
    probs.push_back(r / clock);
  }
  probs.push_back(1.0 - total / clock);
  std::vector<double> counts(probs.size(), 0.0);
  Rng rng(123);
  for (int i = 0; i < 500000; ++i) {
    CoupledConfiguration cc = start;
    const auto ev = coupled_step(cc, k, rng);
    if (ev.branch == CoupledEvent::Branch::kNone) {
      counts.back() += 1.0;
      continue;
    }
    const int br = ev.branch == CoupledEvent::Branch::kBoth ? 0 : ev.branch == CoupledEvent::Branch::kEtaOnly ? 1 : 2;
    const auto it = std::find(keys.begin(), keys.end(), Key{ev.origin, ev.target, br});
    REQUIRE(it != keys.end());
    counts[static_cast<std::size_t>(it - keys.begin())] += 1.0;
  }
  CHECK(oracle::chi_square(counts, probs).p_value > 1e-3);
}

TEST_CASE("comonotone initialisation") {
  const EquilibriumTable t(RateModel::zero_range());
  const Lattice lat(1, 400, 100);
  Rng rng(5);
  const auto cc = init_ordered_pair(t, make_profile("bump(0.6,0.5)", 0.2, 1), 0.5, lat, 100.0, rng);
  const auto prof = make_profile("bump(0.6,0.5)", 0.2, 1);
  for (std::int64_t x = 0; x < lat.sites(); ++x) {
    const auto i = static_cast<std::size_t>(x);
    if (prof(lat.macro_point(x)) >= 0.5) CHECK(cc.eta()[i] >= cc.xi()[i]);
    else CHECK(cc.eta()[i] <= cc.xi()[i]);
  }
}

TEST_CASE("U and O indicators by hand") {
  const Lattice lat(1, 6, 6);
  // eta - xi signs: +, -, 0, +, +, -
  const std::vector<std::int32_t> eta{2, 0, 1, 3, 1, 0};
  const std::vector<std::int32_t> xi{1, 1, 1, 0, 0, 2};
  const CoupledConfiguration cc(lat, eta, xi, RateModel::zero_range(), 1.0);
  const auto s = unordered_statistics(cc, {Displacement{1, 0, 0}, Displacement{2, 0, 0}}, Region::whole(lat));
  REQUIRE(s.size() == 2);
  // d = 1 pairs (0,1) (1,2) (2,3) (3,4) (4,5): U = 1, 0, 0, 0, 1; O = 0, -1, 1, 1, 0
  CHECK(s[0].unordered == 2);
  CHECK(s[0].ordered_sum == 1);
  // d = 2 pairs (0,2) (1,3) (2,4) (3,5): U = 0, 1, 0, 1; O = 1, 0, 1, 0
  CHECK(s[1].unordered == 2);
  CHECK(s[1].ordered_sum == 2);
  CHECK(cc.order() == CoupledConfiguration::Order::kUnordered);
  CHECK(cc.discrepancy() == 1 + 1 + 0 + 3 + 1 + 2);
}

TEST_CASE("tracker agrees with a recount") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 128, 32);
  Rng rng(31);
  const InitialLaw a(t, lat, make_profile("bump(0.6,0.5)", 0.2, 1));
  const InitialLaw b(t, lat, make_profile("constant", 0.5, 1));
  CoupledConfiguration cc(lat, a.sample_occupancy(rng), b.sample_occupancy(rng), t.model(), 32.0);
  const std::vector<Displacement> ds{Displacement{1, 0, 0}, Displacement{3, 0, 0}};
  const auto region = Region::macro_box(lat, -1.0, 1.0);
  UnorderedTracker tracker(cc, ds, region);
  const JumpKernel k(1, 2.0, 64);
  run_coupled_until(cc, k, 0.5, rng, {}, &tracker);
  const auto s = unordered_statistics(cc, ds, region);
  CHECK(tracker.counts()[0] == s[0].unordered);
  CHECK(tracker.counts()[1] == s[1].unordered);
  CHECK(tracker.micro_integrals()[0] >= 0.0);
}

TEST_CASE("eta marginal is the single process") {
  const EquilibriumTable t(RateModel::exclusion());
  const Lattice lat(1, 64, 16);
  const auto prof = make_profile("bump(0.6,0.5)", 0.2, 1);
  const InitialLaw law(t, lat, prof);
  const InitialLaw flat(t, lat, make_profile("constant", 0.5, 1));
  const JumpKernel k(1, 2.0, 32);
  auto right_half = [](std::span<const std::int32_t> occ) {
    double s = 0.0;
    for (std::size_t i = occ.size() / 2; i < occ.size() / 2 + 8; ++i) s += occ[i];
    return s + 1e-6 * static_cast<double>(occ[occ.size() / 2 - 1]);
  };
  std::vector<double> coupled;
  std::vector<double> single;
  Rng rng(77);
  for (int r = 0; r < 600; ++r) {
    CoupledConfiguration cc(lat, law.sample_occupancy(rng), flat.sample_occupancy(rng), t.model(), 16.0);
    run_coupled_until(cc, k, 0.3, rng);
    coupled.push_back(right_half(cc.eta()));
    Configuration c(lat, law.sample_occupancy(rng), t.model(), 16.0);
    run_until(c, k, 0.3, rng);
    single.push_back(right_half(c.occupancy()));
  }
  CHECK(oracle::ks_two_sample(coupled, single).p_value > 1e-3);
}

TEST_CASE("ordered initial data never becomes unordered") {
  const EquilibriumTable t(RateModel::zero_range_capped(2));
  OrderingSetup setup;
  setup.alpha = 2.0;
  setup.t_macro = 0.25;
  setup.replicas = 4;
  setup.n_list = {32};
  setup.d_list = {Displacement{1, 0, 0}};
  setup.seed = 9;
  // profile >= c everywhere
  const auto rows = ordering_experiment(t, make_profile("bump(0.4,0.5)", 0.6, 1), 0.6, 0.6, setup);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean == 0.0);
  CHECK(rows[0].stderr_ == 0.0);
}

TEST_CASE("move guards") {
  const Lattice lat(1, 4, 4);
  CoupledConfiguration cc(lat, {1, 0, 0, 0}, {1, 0, 0, 1}, RateModel::exclusion(), 1.0);
  CHECK_THROWS_AS(cc.move(true, false, 1, 2), std::logic_error);
  CHECK_THROWS_AS(cc.move(false, true, 3, 0), std::logic_error);
}

}

#include <catch_amalgamated.hpp>
#include <cmath>

#include "cirm/gram_charlier.hpp"
#include "cirm/products.hpp"
#include "cirm/simulation.hpp"
#include "fixtures.hpp"

using namespace cirm;

namespace {

constexpr std::uint64_t kSeed = 7;

const ShiftedModel& model() {
  static const ShiftedModel m(testing::calibrated_tenor5(), testing::sample_curve());
  return m;
}

const PathSet& paths() {
  static const PathSet p = [] {
    SimulationConfig c;
    c.paths = 10000;
    c.steps_per_year = 128;
    c.horizon = 12.0;
    c.seed = kSeed;
    for (double t : {0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 12.0}) c.observation_times.push_back(t);
    return simulate(model(), c);
  }();
  return p;
}

}  // namespace

TEST_CASE("factor sample means match the analytic CIR mean") {
  const auto& ps = paths();
  for (Factor f : {Factor::X, Factor::Y}) {
    const auto c = euler_coefficients(model().params().phi(f), f);
    const double z0 = f == Factor::X ? model().params().x0() : model().params().y0();
    const double theta = c.k_theta / c.k;
    for (double t : {1.0, 5.0, 12.0}) {
      const auto k = ps.time_index(t);
      std::vector<double> v(ps.path_count());
      for (std::size_t p = 0; p < v.size(); ++p) {
        v[p] = f == Factor::X ? ps.state(p, k).x : ps.state(p, k).y;
      }
      const auto est = mean_and_error(v);
      const double exact = theta + (z0 - theta) * std::exp(-c.k * t);
      CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
    }
  }
}

TEST_CASE("Monte Carlo bonds match closed-form shifted bonds") {
  const auto s0 = model().params().initial_state();
  for (double t : {0.5, 1.0, 3.0, 7.5, 10.0, 12.0}) {
    const auto est = mc_zcb(paths(), model(), t);
    CHECK(std::abs(est.mean - model().zcb(s0, 0.0, t)) <= 3.0 * est.std_error);
  }
}

TEST_CASE("forward-measure bond moments are consistent with simulation") {
  const auto& ps = paths();
  const double t0 = 5.0;
  const auto k = ps.time_index(t0);
  const double p0 = model().curve().discount(t0);
  for (double tj : {6.0, 8.0, 10.0}) {
    std::vector<double> v(ps.path_count());
    for (std::size_t p = 0; p < v.size(); ++p) {
      v[p] = ps.discount(model(), p, k) * model().zcb(ps.state(p, k), t0, tj) / p0;
    }
    const auto est = mean_and_error(v);
    CHECK(std::abs(est.mean - model().curve().discount(tj) / p0) <= 3.0 * est.std_error);
  }
}

TEST_CASE("Monte Carlo payer minus receiver equals the forward swap value") {
  for (double t0 : {2.0, 5.0}) {
    const auto fwd = market_forward_swap(model().curve(), t0, 5);
    const double k = fwd.rate + 0.0005;
    const SwapSpec pay{Schedule::annual(t0, 5), k, SwapType::Payer};
    const SwapSpec rec{Schedule::annual(t0, 5), k, SwapType::Receiver};
    const auto vp = mc_swaption_payoffs(paths(), model(), pay);
    const auto vr = mc_swaption_payoffs(paths(), model(), rec);
    std::vector<double> diff(vp.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = vp[i] - vr[i];
    const auto est = mean_and_error(diff);
    const double swap0 = swap_value(model(), pay, model().params().initial_state(), 0.0);
    CHECK(std::abs(est.mean - swap0) <= 3.0 * est.std_error);
  }
}

TEST_CASE("deep in-the-money payer converges to the forward swap value") {
  const SwapSpec pay{Schedule::annual(3.0, 5), -0.5, SwapType::Payer};
  const auto est = mc_swaption(paths(), model(), pay);
  const double swap0 = swap_value(model(), pay, model().params().initial_state(), 0.0);
  const double m1 = swap_moments(model(), pay, 0.0, model().params().initial_state(), 1)[0];
  CHECK(swap0 == Catch::Approx(model().curve().discount(3.0) * m1).epsilon(1e-12));
  CHECK(std::abs(est.mean - swap0) <= 3.0 * est.std_error);
}

TEST_CASE("halving the mesh moves bond estimates by less than three combined errors") {
  SimulationConfig c;
  c.paths = 10000;
  c.steps_per_year = 64;
  c.horizon = 10.0;
  c.seed = kSeed;
  c.observation_times = {5.0, 10.0};
  const auto coarse = simulate(model(), c);
  c.steps_per_year = 128;
  const auto fine = simulate(model(), c);
  for (double t : {5.0, 10.0}) {
    const auto a = mc_zcb(coarse, model(), t);
    const auto b = mc_zcb(fine, model(), t);
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * std::hypot(a.std_error, b.std_error));
  }
}

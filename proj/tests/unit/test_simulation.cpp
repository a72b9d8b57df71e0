#include <catch_amalgamated.hpp>
#include <cmath>

#include "cirm/errors.hpp"
#include "cirm/simulation.hpp"
#include "fixtures.hpp"

using namespace cirm;
using Catch::Approx;

namespace {

ShiftedModel tenor5_model() { return ShiftedModel(testing::calibrated_tenor5(), testing::sample_curve()); }

SimulationConfig config(std::size_t paths, int spy, double horizon, std::vector<double> obs = {}) {
  SimulationConfig c;
  c.paths = paths;
  c.steps_per_year = spy;
  c.horizon = horizon;
  c.seed = 20240101;
  c.observation_times = std::move(obs);
  return c;
}

}  // namespace

TEST_CASE("Philox4x32-10 reproduces the reference known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(0)(C{0, 0, 0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32(0xffffffffffffffffull)(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32(0x299f31d0a4093822ull)(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms lie strictly inside the unit interval") {
  const Philox4x32 rng(7);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const auto u = rng.uniforms(i, i * 3);
    CHECK(u[0] > 0.0);
    CHECK(u[0] < 1.0);
    CHECK(u[1] > 0.0);
    CHECK(u[1] < 1.0);
  }
}

TEST_CASE("simulation is bit-identical across runs and thread counts") {
  const auto model = tenor5_model();
  auto c = config(500, 64, 3.0);
  const auto a = simulate(model, c);
  const auto b = simulate(model, c);
  c.threads = 4;
  const auto d = simulate(model, c);
  CHECK(a == b);
  CHECK(a == d);
  c.seed += 1;
  CHECK_FALSE(a == simulate(model, c));
}

TEST_CASE("observation subsets agree with the full grid") {
  const auto model = tenor5_model();
  const auto full = simulate(model, config(200, 32, 4.0));
  const auto sub = simulate(model, config(200, 32, 4.0, {1.0, 2.5, 4.0}));
  CHECK(sub.times().size() == 4);
  for (double t : {1.0, 2.5, 4.0}) {
    const auto kf = full.time_index(t), ks = sub.time_index(t);
    for (std::size_t p = 0; p < 200; ++p) {
      CHECK(full.state(p, kf).x == sub.state(p, ks).x);
      CHECK(full.integral(p, kf) == sub.integral(p, ks));
    }
  }
  CHECK_THROWS_AS(sub.time_index(3.0), DomainError);
  CHECK_THROWS_AS(simulate(model, config(10, 32, 4.0, {1.01})), ValidationError);
  CHECK_THROWS_AS(simulate(model, config(10, 32, 4.01)), ValidationError);
}

TEST_CASE("zero volatility gives the deterministic mean-reverting path") {
  // φ1 = φ2 switches the diffusion off; φ3 then carries no drift either.
  const ModelParams pi({0.3, 0.3, 1.5, 0.2, 0.2, 1.5, 0.02, 0.01});
  const ShiftedModel model(pi, testing::sample_curve());
  const auto paths = simulate(model, config(3, 512, 5.0, {1.0, 5.0}));
  for (double t : {1.0, 5.0}) {
    const auto s = paths.state(2, paths.time_index(t));
    CHECK(s.x == Approx(0.02 * std::exp(-0.3 * t)).epsilon(2e-3));
    CHECK(s.y == Approx(0.01 * std::exp(-0.2 * t)).epsilon(2e-3));
  }
}

TEST_CASE("discount accumulator is positive and starts at one") {
  const auto model = tenor5_model();
  const auto paths = simulate(model, config(300, 64, 5.0, {1, 2, 3, 4, 5}));
  for (std::size_t k = 0; k < paths.times().size(); ++k) {
    for (std::size_t p = 0; p < paths.path_count(); ++p) CHECK(paths.discount(model, p, k) > 0.0);
  }
  const auto at0 = mc_zcb(paths, model, 0.0);
  CHECK(at0.mean == 1.0);
  CHECK(at0.std_error == 0.0);
}

TEST_CASE("Euler coefficients invert the phi map") {
  const auto f = ksigma_from_phi(testing::calibrated_tenor5());
  const auto cx = euler_coefficients(testing::calibrated_tenor5().phi(Factor::X), Factor::X);
  const auto cy = euler_coefficients(testing::calibrated_tenor5().phi(Factor::Y), Factor::Y);
  CHECK(cx.k == Approx(f.x.k));
  CHECK(cx.sigma == Approx(f.x.sigma));
  CHECK(cx.k_theta == Approx(f.x.k * f.x.theta));
  CHECK(cy.k == Approx(f.y.k));
  CHECK(cy.sigma == Approx(f.y.sigma));
  CHECK(cy.k_theta == Approx(f.y.k * f.y.theta));
}

TEST_CASE("path dump writes one matrix per factor") {
  const auto model = tenor5_model();
  const auto paths = simulate(model, config(3, 4, 1.0));
  const auto dir = std::filesystem::temp_directory_path() / "cirm_paths_dump";
  std::filesystem::remove_all(dir);
  write_paths_csv(paths, dir);
  for (const char* f : {"x.csv", "y.csv", "r.csv"}) CHECK(std::filesystem::exists(dir / f));
}

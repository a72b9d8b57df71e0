#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "cirm/calibration.hpp"
#include "cirm/errors.hpp"
#include "cirm/gram_charlier.hpp"
#include "fixtures.hpp"

using namespace cirm;
using Catch::Approx;

namespace {

// Target whose market prices are the model's own order-`L` prices at Π0.
CalibrationTarget synthetic_target(const ModelParams& pi0, std::vector<int> orders) {
  const ShiftedModel model(pi0, testing::sample_curve());
  CalibrationTarget target;
  target.orders = orders;
  for (double m : {5.0, 7.0, 10.0}) {
    const auto fwd = market_forward_swap(model.curve(), m, 5.0);
    SwaptionQuote q{m, 5.0, fwd.rate, 0.0, 0.0, SwapType::Payer};
    q.price = quote_model_prices(model, q, SwapType::Payer, {orders.back()}).at(0);
    target.quotes.push_back(q);
  }
  return target;
}

}  // namespace

TEST_CASE("initial presets are the hand-made starting points") {
  const ModelParams::Vector i1{0.1, 0.095, 0.3, 0.095, 0.1, 0.3, 0.01, 0.01};
  CHECK(initial_point(InitialPreset::I1) == i1);
  const auto i2 = initial_point(InitialPreset::I2);
  for (int i = 0; i < 8; ++i) CHECK(i2[i] == i1[i] / 2.0);
  CHECK(parse_initial_preset("I2") == InitialPreset::I2);
  CHECK_THROWS(parse_initial_preset("I3"));
}

TEST_CASE("projection is the identity on admissible points") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto pi = testing::random_admissible(rng);
    CHECK(project_admissible(pi) == pi);
  }
}

TEST_CASE("projection lowers phi2_x onto phi1_x") {
  const auto p = project_admissible({0.1, 0.12, 1.5, 0.1, 0.2, 1.5, 0.01, 0.01});
  CHECK(p[1] == 0.1);
  CHECK(p[0] == 0.1);
}

TEST_CASE("projection of random infeasible points is admissible") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    ModelParams::Vector v;
    for (auto& x : v) x = testing::uniform(rng, -1.0, 3.0);
    const auto p = project_admissible(v);
    CHECK(AdmissibleSet::contains(p));
    CHECK(ModelParams::is_admissible(p));
  }
  ModelParams::Vector nan_point{NAN, 0.1, 1.0, 0.1, 0.1, 1.0, 0.0, 0.0};
  CHECK(AdmissibleSet::contains(project_admissible(nan_point)));
}

TEST_CASE("constraint matrix encodes the factor inequalities") {
  const ModelParams::Vector ok = testing::calibrated_tenor5().vector();
  for (const auto& row : AdmissibleSet::A) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += row[i] * ok[i];
    CHECK(s <= 0.0);
  }
  CHECK_FALSE(AdmissibleSet::contains({0.1, 0.2, 1.5, 0.1, 0.2, 1.5, 0, 0}));
  CHECK_FALSE(AdmissibleSet::contains({0.1, 0.09, 0.9, 0.1, 0.2, 1.5, 0, 0}));
}

TEST_CASE("objective vanishes when the market equals the model") {
  const auto pi0 = testing::calibrated_tenor5();
  const auto target = synthetic_target(pi0, {7});
  CHECK(objective(pi0.vector(), target, testing::sample_curve()) == 0.0);
}

TEST_CASE("objective is a pure function of its inputs") {
  const auto target = synthetic_target(testing::calibrated_tenor5(), {3, 5, 7});
  const auto pi = project_admissible(initial_point(InitialPreset::I1));
  const double a = objective(pi, target, testing::sample_curve());
  const double b = objective(pi, target, testing::sample_curve());
  CHECK(a == b);
  CHECK(a > 0.0);
}

TEST_CASE("objective depends on price ratios only") {
  const auto pi = testing::calibrated_tenor1().vector();
  const auto target = synthetic_target(testing::calibrated_tenor5(), {3, 5, 7});
  auto doubled = target;
  for (auto& q : doubled.quotes) q.price *= 2.0;
  const double base = objective(pi, target, testing::sample_curve());
  const ShiftedModel model(ModelParams(pi), testing::sample_curve());
  double manual = 0.0;
  for (const auto& q : doubled.quotes) {
    for (double p : quote_model_prices(model, q, SwapType::Payer, doubled.orders)) {
      manual += (q.price / (2.0 * p) - 1.0) * (q.price / (2.0 * p) - 1.0);
    }
  }
  CHECK(manual == Approx(base).epsilon(1e-14));
}

TEST_CASE("pricing failures become a penalty") {
  auto target = synthetic_target(testing::calibrated_tenor5(), {3});
  // A strike far out of the money makes the expansion price non-positive.
  target.quotes[0].strike = 0.2;
  const double f = objective(testing::calibrated_tenor5().vector(), target, testing::sample_curve());
  CHECK(f >= kPricingPenalty);
}

TEST_CASE("target validation") {
  CalibrationTarget empty;
  CHECK_THROWS_AS(empty.validate(), ValidationError);
  auto t = synthetic_target(testing::calibrated_tenor5(), {3, 5, 7});
  t.orders = {2};
  CHECK_THROWS_AS(t.validate(), ValidationError);
  t.orders = {3};
  t.quotes[0].price = 0.0;
  CHECK_THROWS_AS(t.validate(), ValidationError);
}

TEST_CASE("column selection honors maturity bounds and drop-last") {
  const auto s = testing::sample_surface();
  const auto col = select_column(s, 5.0, 5.0, 15.0, {3, 5, 7});
  REQUIRE(!col.quotes.empty());
  CHECK(col.quotes.front().maturity == 5.0);
  CHECK(col.quotes.back().maturity == 15.0);
  const auto dropped = select_column(s, 5.0, 5.0, 15.0, {3, 5, 7}, true);
  CHECK(dropped.quotes.size() + 1 == col.quotes.size());
  CHECK(select_column(s, 3.0, 0.0, 100.0, {3}).quotes.empty());
}

TEST_CASE("calibration recovers a synthetic target") {
  const auto pi0 = testing::calibrated_tenor5();
  const auto target = synthetic_target(pi0, {7});
  auto start = pi0.vector();
  for (auto& v : start) v *= 1.1;
  CalibrationOptions opts;
  opts.perturbed_starts = 1;
  const auto res = calibrate(target, testing::sample_curve(), start, opts);
  CHECK(AdmissibleSet::contains(res.params.vector()));
  CHECK(res.objective <= 1e-8);
  for (const auto& fit : res.fits) {
    REQUIRE(fit.model.size() == 1);
    CHECK(std::abs(fit.model[0] - fit.market) <= 1e-6);
  }
  CHECK(res.objective == objective(res.params.vector(), target, testing::sample_curve()));
}

TEST_CASE("calibration is deterministic and thread-count independent") {
  const auto target = synthetic_target(testing::calibrated_tenor5(), {3, 7});
  CalibrationOptions opts;
  opts.max_evaluations = 300;
  opts.perturbed_starts = 2;
  const auto a = calibrate(target, testing::sample_curve(), initial_point(InitialPreset::I1), opts);
  opts.threads = 3;
  const auto b = calibrate(target, testing::sample_curve(), initial_point(InitialPreset::I1), opts);
  CHECK(a.params.vector() == b.params.vector());
  CHECK(a.objective == b.objective);
  CHECK(a.evaluations == b.evaluations);
  CHECK_FALSE(a.converged);  // budget of 300 evaluations is far too small
}

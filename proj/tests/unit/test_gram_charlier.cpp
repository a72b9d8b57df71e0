#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "cirm/errors.hpp"
#include "cirm/gram_charlier.hpp"
#include "cirm/products.hpp"
#include "fixtures.hpp"

using namespace cirm;
using Catch::Approx;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

// Gauss quadrature for the standard normal weight (Golub-Welsch on the
// probabilists' Hermite recurrence).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_normal(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Eigen::VectorXd w = es.eigenvectors().row(0).array().square();
  return {es.eigenvalues(), w};
}

// Raw moments from cumulants by μ_n = Σ_k C(n-1,k-1) c_k μ_{n-k}.
std::vector<double> moments_from_cumulants(const std::vector<double>& c) {
  std::vector<double> mu(c.size() + 1, 0.0);
  mu[0] = 1.0;
  for (std::size_t n = 1; n <= c.size(); ++n) {
    for (std::size_t k = 1; k <= n; ++k) {
      mu[n] += binomial(int(n) - 1, int(k) - 1) * c[k - 1] * mu[n - k];
    }
  }
  return {mu.begin() + 1, mu.end()};
}

// Price by integrating s^+ against the truncated expansion density.
double integrate_truncated(const std::vector<double>& c, double p0, int order) {
  const double sd = std::sqrt(c[1]);
  std::vector<double> q(order + 1, 0.0);
  for (int n = 3; n <= order; ++n) q[n] = gram_charlier_q(n, c);
  auto density = [&](double s) {
    const double z = (s - c[0]) / sd;
    if (std::abs(z) > 40.0) return 0.0;
    double corr = 1.0;
    for (int n = 3; n <= order; ++n) corr += q[n] * hermite(n, z);
    return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI) / sd * corr;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return p0 * integrator.integrate([&](double s) { return s * density(s); });
}

ShiftedModel sample_model() { return ShiftedModel(testing::calibrated_tenor5(), testing::sample_curve()); }

}  // namespace

TEST_CASE("multi-index table enumerates every composition once") {
  for (int m = 0; m <= 5; ++m) {
    for (int n = 1; n <= 5; ++n) {
      const auto& t = enumerate_multiindices(m, n);
      CHECK(t.size() == static_cast<std::size_t>(binomial(m + n, n)));
      std::set<std::vector<int>> seen;
      double total = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const auto c = t.counts(i);
        int s = 0;
        for (auto k : c) s += k;
        CHECK(s == m);
        seen.insert(std::vector<int>(c.begin(), c.end()));
        total += double(t.multiplicity(i));
      }
      CHECK(seen.size() == t.size());
      CHECK(total == std::pow(n + 1.0, m));
    }
  }
}

TEST_CASE("multinomial weights equal brute-force permutation counts") {
  const int m = 4, n = 3;
  std::map<std::vector<int>, std::uint64_t> counts;
  std::vector<int> idx(m, 0);
  for (int code = 0; code < int(std::pow(n + 1, m)); ++code) {
    int c = code;
    std::vector<int> k(n + 1, 0);
    for (int j = 0; j < m; ++j, c /= (n + 1)) ++k[c % (n + 1)];
    ++counts[k];
  }
  const auto& t = enumerate_multiindices(m, n);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto c = t.counts(i);
    CHECK(t.multiplicity(i) == counts.at(std::vector<int>(c.begin(), c.end())));
  }
}

TEST_CASE("multi-index cache is shared across threads") {
  std::vector<const MultiIndexTable*> seen(4);
  std::vector<std::thread> pool;
  for (int i = 0; i < 4; ++i) pool.emplace_back([&, i] { seen[i] = &enumerate_multiindices(6, 7); });
  for (auto& th : pool) th.join();
  for (auto* p : seen) CHECK(p == seen[0]);
  CHECK_THROWS(enumerate_multiindices(8, 2));
  CHECK_THROWS(enumerate_multiindices(3, 31));
}

TEST_CASE("Hermite polynomials are orthogonal under the normal density") {
  const auto [x, w] = gauss_hermite_normal(20);
  for (int m = 0; m <= 7; ++m) {
    for (int n = 0; n <= 7; ++n) {
      double s = 0.0;
      for (int i = 0; i < x.size(); ++i) s += w[i] * hermite(m, x[i]) * hermite(n, x[i]);
      CHECK(s == Approx(m == n ? factorial(n) : 0.0).margin(1e-9));
    }
  }
  CHECK(hermite(3, 2.0) == 2.0);    // x³ - 3x
  CHECK(hermite(4, 1.0) == -2.0);  // x⁴ - 6x² + 3
}

TEST_CASE("cumulant polynomials invert the moment recursion") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c(7);
    for (auto& v : c) v = testing::uniform(rng, -1.0, 1.0);
    c[1] = testing::uniform(rng, 0.1, 2.0);
    const auto mu = moments_from_cumulants(c);
    const auto back = cumulants_from_moments(mu);
    for (int i = 0; i < 7; ++i) CHECK(back[i] == Approx(c[i]).margin(1e-10));
  }
  const auto normal = cumulants_from_moments(std::vector<double>{1.0, 5.0, 13.0, 73.0});
  CHECK(normal[0] == 1.0);
  CHECK(normal[1] == Approx(4.0));
  CHECK(normal[2] == Approx(0.0).margin(1e-12));
  CHECK(normal[3] == Approx(0.0).margin(1e-12));
}

TEST_CASE("q coefficients match their closed forms") {
  const std::vector<double> c{0.3, 1.7, 0.4, -0.25, 0.11, 0.05, -0.02};
  const double s = std::sqrt(c[1]);
  auto k = [&](int l) { return c[l - 1] / std::pow(s, l); };
  CHECK(gram_charlier_q(0, c) == 1.0);
  CHECK(gram_charlier_q(2, c) == 0.0);
  CHECK(gram_charlier_q(3, c) == Approx(k(3) / 6.0));
  CHECK(gram_charlier_q(4, c) == Approx(k(4) / 24.0));
  CHECK(gram_charlier_q(5, c) == Approx(k(5) / 120.0));
  CHECK(gram_charlier_q(6, c) == Approx((c[5] + 10 * c[2] * c[2]) / (720.0 * std::pow(c[1], 3))));
  CHECK(gram_charlier_q(7, c) == Approx((c[6] + 35 * c[2] * c[3]) / (5040.0 * std::pow(c[1], 3.5))));
}

TEST_CASE("expansion price equals integration of the truncated density") {
  const std::vector<double> c{0.004, 2.5e-5, 1.2e-8, -3e-11, 2e-13, 1e-15, -4e-18};
  const double p0 = 0.97;
  const std::vector<int> orders{2, 3, 4, 5, 6, 7};
  const auto gc = gc_price_from_cumulants(c, p0, orders);
  for (int l : orders) {
    CHECK(gc.price(l) == Approx(integrate_truncated(c, p0, l)).epsilon(1e-9));
  }
  REQUIRE(gc.cumulants.scaled.size() == 7);
  CHECK(gc.cumulants.scaled[2] == Approx(c[2] * p0 * p0 * p0));
}

TEST_CASE("expansion rejects non-positive variance") {
  const std::vector<double> c{0.01, -1e-8, 0.0};
  const std::vector<int> orders{3};
  CHECK_THROWS_AS(gc_price_from_cumulants(c, 0.9, orders), ExpansionError);
}

TEST_CASE("Riccati terminal solution propagates bond factors") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const ModelParams pi(testing::random_admissible(rng));
    for (Factor f : {Factor::X, Factor::Y}) {
      const auto phi = pi.phi(f);
      const double t = testing::uniform(rng, 0.0, 5.0);
      const double t0 = t + testing::uniform(rng, 0.1, 10.0);
      const double T = t0 + testing::uniform(rng, 0.5, 10.0);
      const auto end = bond_ab(phi, t0, T);
      const auto sol = riccati_terminal(phi, end.a, end.b, t, t0);
      const auto direct = bond_ab(phi, t, T);
      CHECK(sol.m == Approx(direct.a).epsilon(1e-11));
      CHECK(sol.n == Approx(direct.b).epsilon(1e-11));
    }
  }
}

TEST_CASE("Riccati terminal solution satisfies its ODE system") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    const ModelParams pi(testing::random_admissible(rng));
    const auto f = ksigma_from_phi(pi);
    for (Factor fac : {Factor::X, Factor::Y}) {
      const auto phi = pi.phi(fac);
      const auto& p = fac == Factor::X ? f.x : f.y;
      const double gap = phi.phi2 - phi.phi1;
      const double b = testing::uniform(rng, 0.0, gap > 0 ? std::min(5.0, 0.9 / gap) : 5.0);
      const double log_a = testing::uniform(rng, -0.5, 0.5);
      const double tau = testing::uniform(rng, 0.1, 15.0);
      const double h = 1e-5;
      const auto s = riccati_terminal_log(phi, log_a, b, tau);
      const auto up = riccati_terminal_log(phi, log_a, b, tau - h);  // t + h
      const auto dn = riccati_terminal_log(phi, log_a, b, tau + h);  // t - h
      const double dn_dt = (up.n - dn.n) / (2 * h);
      const double dlogm_dt = (up.m - dn.m) / (2 * h);
      const double s2 = p.sigma * p.sigma;
      if (fac == Factor::X) {
        CHECK(std::abs(-1.0 + p.k * s.n - dn_dt + 0.5 * s2 * s.n * s.n) < 1e-6);
        CHECK(std::abs(-p.k * p.theta * s.n + dlogm_dt) < 1e-6);
      } else {
        CHECK(std::abs(1.0 - p.k * s.n + dn_dt + 0.5 * s2 * s.n * s.n) < 1e-6);
        CHECK(std::abs(p.k * p.theta * s.n + dlogm_dt) < 1e-6);
      }
      CHECK(riccati_terminal_log(phi, log_a, b, 0.0).n == b);
    }
  }
}

TEST_CASE("Riccati solution signals a singular denominator") {
  const PhiTriple phi{0.01, 0.5, 1.5};  // y factor: φ1 < φ2
  CHECK_THROWS_AS(riccati_terminal_log(phi, 0.0, 50.0, 30.0), SingularityError);
}

TEST_CASE("swap moments equal brute-force permutation sums") {
  const auto model = sample_model();
  std::mt19937_64 rng(41);
  for (int n = 1; n <= 5; ++n) {
    const SwapSpec spec{Schedule::annual(3.0, n), testing::uniform(rng, -0.005, 0.01),
                        SwapType::Payer};
    const auto coeffs = swap_coefficients(model, spec);
    const auto dates = spec.schedule.dates();
    const FactorState state{testing::uniform(rng, 0.0, 0.01), testing::uniform(rng, 0.0, 0.01)};
    const double t = 1.0;
    const auto moments = swap_moments(model, spec, t, state, 4);
    for (int m = 1; m <= 4; ++m) {
      double sum = 0.0, scale = 0.0;
      const int width = n + 1;
      for (int code = 0; code < int(std::pow(width, m)); ++code) {
        std::vector<std::uint8_t> k(width, 0);
        double w = 1.0;
        int c = code;
        for (int j = 0; j < m; ++j, c /= width) {
          const int i = c % width;
          ++k[i];
          w *= coeffs.a[i] * model.shift_factor(dates[0], dates[i]);
        }
        const double term = w * bond_moment(model, k, state, t, spec.schedule);
        sum += term;
        scale += std::abs(term);
      }
      CHECK(std::abs(moments[m - 1] - sum) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("first swap moment times P(t,T0) is the swap value") {
  const auto model = sample_model();
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const double t0 = testing::uniform(rng, 1.0, 10.0);
    const int n = 1 + int(rng() % 7);
    const SwapSpec spec{Schedule::annual(t0, n), testing::uniform(rng, -0.01, 0.02),
                        i % 2 ? SwapType::Payer : SwapType::Receiver};
    const double t = testing::uniform(rng, 0.0, t0);
    const FactorState s{testing::uniform(rng, 0.0, 0.05), testing::uniform(rng, 0.0, 0.05)};
    const double m1 = swap_moments(model, spec, t, s, 1)[0];
    CHECK(std::abs(m1 * model.zcb(s, t, t0) - swap_value(model, spec, s, t)) < 1e-10);
  }
}

TEST_CASE("expansion prices satisfy payer-receiver parity at every order") {
  const auto model = sample_model();
  const std::vector<int> orders{3, 4, 5, 6, 7};
  for (double t0 : {2.0, 5.0, 10.0}) {
    for (int n : {1, 5, 10}) {
      const auto fwd = market_forward_swap(model.curve(), t0, n);
      const double k = fwd.rate + 0.001;
      const SwapSpec payer{Schedule::annual(t0, n), k, SwapType::Payer};
      const SwapSpec receiver{Schedule::annual(t0, n), k, SwapType::Receiver};
      const auto gp = gc_price(model, payer, orders);
      const auto gr = gc_price(model, receiver, orders);
      const double swap0 = swap_value(model, payer, model.params().initial_state(), 0.0);
      CHECK(swap0 == Approx(fwd.annuity * (fwd.rate - k)).epsilon(1e-10));
      for (int l : {2, 3, 4, 5, 6, 7}) {
        CHECK(gp.price(l) - gr.price(l) == Approx(swap0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("swap coefficients reproduce the swap value") {
  const auto model = sample_model();
  const SwapSpec spec{Schedule::annual(2.0, 4), 0.001, SwapType::Receiver};
  const auto c = swap_coefficients(model, spec);
  const FactorState s{0.004, 0.002};
  const auto dates = spec.schedule.dates();
  double v = 0.0;
  for (std::size_t i = 0; i < dates.size(); ++i) v += c.a[i] * model.zcb(s, 0.5, dates[i]);
  CHECK(v == Approx(swap_value(model, spec, s, 0.5)).margin(1e-12));
}

TEST_CASE("schedules validate their dates") {
  CHECK_THROWS(Schedule(1.0, {}));
  CHECK_THROWS(Schedule(1.0, {2.0, 2.0}));
  CHECK_THROWS(Schedule::annual(1.0, 2.5));
  const auto s = Schedule::annual(5.0, 3);
  CHECK(s.payment_count() == 3);
  CHECK(s.end() == 8.0);
  CHECK(s.accrual(2) == 1.0);
}

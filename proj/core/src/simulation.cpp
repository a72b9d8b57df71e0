#include "cirm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>

#include "cirm/errors.hpp"

namespace cirm {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;
constexpr double kGridTol = 1e-9;

double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// Curve ratio P^M(0,t) / P^CIR-(0,t) at each observed time.
std::vector<double> shift_ratios(const PathSet& paths, const ShiftedModel& model) {
  std::vector<double> out;
  out.reserve(paths.times().size());
  for (double t : paths.times()) {
    out.push_back(t == 0.0 ? 1.0 : model.curve().discount(t) / model.zcb_cirminus_initial(t));
  }
  return out;
}

template <class Fn>
void parallel_blocks(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
  if (workers == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t block = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(count, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter c) const {
  Key k = key_;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
  return c;
}

std::array<double, 2> Philox4x32::uniforms(std::uint64_t step, std::uint64_t path) const {
  const auto r = (*this)({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                          static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)});
  return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
}

std::size_t SimulationConfig::steps() const {
  if (steps_per_year < 1) throw ValidationError("steps per year must be positive");
  if (!(horizon > 0.0)) throw ValidationError("simulation horizon must be positive");
  const double n = horizon * steps_per_year;
  const double r = std::round(n);
  if (std::abs(n - r) > kGridTol * std::max(1.0, n)) {
    throw ValidationError("horizon must be a whole number of time steps");
  }
  return static_cast<std::size_t>(r);
}

PathSet::PathSet(std::vector<double> times, std::size_t paths)
    : times_(std::move(times)),
      paths_(paths),
      x_(times_.size() * paths),
      y_(times_.size() * paths),
      integral_(times_.size() * paths) {}

std::size_t PathSet::time_index(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t - kGridTol);
  if (it == times_.end() || std::abs(*it - t) > kGridTol) {
    throw DomainError("time " + std::to_string(t) + " is not an observed grid point");
  }
  return static_cast<std::size_t>(it - times_.begin());
}

double PathSet::discount(const ShiftedModel& model, std::size_t path, std::size_t k) const {
  const double t = times_[k];
  const double ratio = t == 0.0 ? 1.0 : model.curve().discount(t) / model.zcb_cirminus_initial(t);
  return std::exp(-integral(path, k)) * ratio;
}

EulerCoefficients euler_coefficients(const PhiTriple& phi, Factor factor) {
  const double k = 2.0 * phi.phi2 - phi.phi1;
  const double diff = factor == Factor::X ? phi.phi1 - phi.phi2 : phi.phi2 - phi.phi1;
  const double sigma2 = std::max(0.0, 2.0 * phi.phi2 * diff);
  return {k, 0.5 * phi.phi3 * sigma2, std::sqrt(sigma2)};
}

PathSet simulate(const ShiftedModel& model, const SimulationConfig& config) {
  if (config.paths < 1) throw ValidationError("simulation needs at least one path");
  const std::size_t steps = config.steps();
  const double dt = config.mesh();
  const double sqrt_dt = std::sqrt(dt);

  std::vector<std::size_t> observed{0};
  if (config.observation_times.empty()) {
    for (std::size_t s = 1; s <= steps; ++s) observed.push_back(s);
  } else {
    for (double t : config.observation_times) {
      const double n = t * config.steps_per_year;
      const double r = std::round(n);
      if (t < 0.0 || std::abs(n - r) > kGridTol * std::max(1.0, n) ||
          r > static_cast<double>(steps)) {
        throw ValidationError("observation time " + std::to_string(t) + " is not on the grid");
      }
      observed.push_back(static_cast<std::size_t>(r));
    }
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  }
  std::vector<double> times;
  std::vector<long> slot(steps + 1, -1);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    times.push_back(static_cast<double>(observed[i]) / config.steps_per_year);
    slot[observed[i]] = static_cast<long>(i);
  }

  PathSet out(std::move(times), config.paths);
  const auto cx = euler_coefficients(model.params().phi(Factor::X), Factor::X);
  const auto cy = euler_coefficients(model.params().phi(Factor::Y), Factor::Y);
  const auto s0 = model.params().initial_state();
  const Philox4x32 rng(config.seed);

  parallel_blocks(config.paths, config.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double x = s0.x, y = s0.y, integral = 0.0;
      out.x_row(0)[p] = x;
      out.y_row(0)[p] = y;
      out.integral_row(0)[p] = 0.0;
      for (std::size_t s = 0; s < steps; ++s) {
        const auto u = rng.uniforms(s, p);
        const double zx = normal_quantile(u[0]);
        const double zy = normal_quantile(u[1]);
        const double xn = x + (cx.k_theta - cx.k * x) * dt + cx.sigma * std::sqrt(std::max(x, 0.0)) * sqrt_dt * zx;
        const double yn = y + (cy.k_theta - cy.k * y) * dt + cy.sigma * std::sqrt(std::max(y, 0.0)) * sqrt_dt * zy;
        integral += 0.5 * dt * ((x - y) + (xn - yn));
        x = xn;
        y = yn;
        if (const long k = slot[s + 1]; k >= 0) {
          out.x_row(static_cast<std::size_t>(k))[p] = x;
          out.y_row(static_cast<std::size_t>(k))[p] = y;
          out.integral_row(static_cast<std::size_t>(k))[p] = integral;
        }
      }
    }
  });
  return out;
}

double swap_exercise_value(const ShiftedModel& model, FactorState state,
                           std::span<const double> dates, double strike, double z) {
  const double t = dates[0];
  double annuity = 0.0;
  for (std::size_t i = 1; i < dates.size(); ++i) {
    annuity += (dates[i] - dates[i - 1]) * model.zcb(state, t, dates[i]);
  }
  const double float_leg = 1.0 - model.zcb(state, t, dates.back());
  return std::max(z * (float_leg - strike * annuity), 0.0);
}

MeanEstimate mc_zcb(const PathSet& paths, const ShiftedModel& model, double T) {
  const std::size_t k = paths.time_index(T);
  const double ratio = T == 0.0 ? 1.0 : model.curve().discount(T) / model.zcb_cirminus_initial(T);
  std::vector<double> values(paths.path_count());
  for (std::size_t p = 0; p < values.size(); ++p) {
    values[p] = std::exp(-paths.integral(p, k)) * ratio;
  }
  return mean_and_error(values);
}

std::vector<double> mc_swaption_payoffs(const PathSet& paths, const ShiftedModel& model,
                                        const SwapSpec& spec) {
  const double t0 = spec.schedule.start();
  const std::size_t k = paths.time_index(t0);
  const auto ratios = shift_ratios(paths, model);
  const auto dates = spec.schedule.dates();
  const double z = sign(spec.type);
  std::vector<double> values(paths.path_count());
  for (std::size_t p = 0; p < values.size(); ++p) {
    const double payoff = swap_exercise_value(model, paths.state(p, k), dates, spec.strike, z);
    const double d = std::exp(-paths.integral(p, k)) * ratios[k];
    values[p] = d * payoff;
  }
  return values;
}

MeanEstimate mc_swaption(const PathSet& paths, const ShiftedModel& model, const SwapSpec& spec) {
  return mean_and_error(mc_swaption_payoffs(paths, model, spec));
}

void write_paths_csv(const PathSet& paths, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto dump = [&](const char* name, auto value) {
    std::ofstream f(dir / name);
    if (!f) throw ValidationError("cannot write " + (dir / name).string());
    f.precision(17);
    f << "path";
    for (double t : paths.times()) f << ",t=" << t;
    f << '\n';
    for (std::size_t p = 0; p < paths.path_count(); ++p) {
      f << p;
      for (std::size_t k = 0; k < paths.times().size(); ++k) f << ',' << value(p, k);
      f << '\n';
    }
  };
  dump("x.csv", [&](std::size_t p, std::size_t k) { return paths.state(p, k).x; });
  dump("y.csv", [&](std::size_t p, std::size_t k) { return paths.state(p, k).y; });
  dump("r.csv", [&](std::size_t p, std::size_t k) {
    const auto s = paths.state(p, k);
    return s.x - s.y;
  });
}

}  // namespace cirm

#include "fixtures.hpp"

#include <cmath>

namespace cirm::testing {

std::filesystem::path sample_dir() { return CIRM_SAMPLE_DIR; }

const DiscountCurve& sample_curve() {
  static const DiscountCurve curve = load_curve(sample_dir() / "curve.csv");
  return curve;
}

SwaptionSurface sample_surface() {
  return load_surface(sample_dir() / "surface_payer.csv", SwapType::Payer, &sample_curve());
}

ModelParams calibrated_tenor5() {
  return ModelParams({0.109, 0.0846, 1.99, 0.584, 0.597, 1.26, 0.00017, 0.0021});
}

ModelParams calibrated_tenor1() {
  return ModelParams({0.082, 0.0477, 1.05, 0.155, 0.165, 1.33, 0.000126, 0.000128});
}

DiscountCurve flat_curve(double rate, int last) {
  std::vector<CurvePoint> pts;
  for (int i = 1; i <= last; ++i) pts.push_back({double(i), rate, std::exp(-rate * i)});
  return DiscountCurve(pts);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

ModelParams::Vector random_admissible(std::mt19937_64& rng) {
  const double p1x = uniform(rng, 0.02, 0.6);
  const double p2x = uniform(rng, 0.52 * p1x, 0.98 * p1x);
  const double p2y = uniform(rng, 0.02, 0.6);
  const double p1y = uniform(rng, 0.0, 0.98 * p2y);
  return {p1x, p2x, uniform(rng, 1.0, 4.0), p1y, p2y, uniform(rng, 1.0, 4.0),
          uniform(rng, 0.0, 0.05), uniform(rng, 0.0, 0.05)};
}

}  // namespace cirm::testing

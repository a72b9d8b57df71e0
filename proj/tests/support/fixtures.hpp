#pragma once

#include <filesystem>
#include <random>

#include "cirm/cir_model.hpp"
#include "cirm/market_data.hpp"

namespace cirm::testing {

std::filesystem::path sample_dir();
const DiscountCurve& sample_curve();
SwaptionSurface sample_surface();

/// Calibrated parameter sets reported for the tenor-5 and tenor-1 columns.
ModelParams calibrated_tenor5();
ModelParams calibrated_tenor1();

/// Flat continuously compounded curve with annual knots up to `last`.
DiscountCurve flat_curve(double rate, int last = 40);

double uniform(std::mt19937_64& rng, double lo, double hi);

/// Random point of the admissible polytope with φ1 ≠ 2φ2 for both factors.
ModelParams::Vector random_admissible(std::mt19937_64& rng);

}  // namespace cirm::testing

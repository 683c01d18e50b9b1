#pragma once

// Standalone SVG renderings of the four figure types: a fitted fringe, the
// Monte-Carlo histogram of D, the D(pump) sweep with its regression line,
// and the working-range map. Output is a pure function of the input.

#include <span>
#include <string>

#include "sagnac/estimator.hpp"
#include "sagnac/io.hpp"
#include "sagnac/rangemap.hpp"

namespace sagnac {

std::string plot_fringe(const NormalizedFringe& fringe, const FitResult& fit);

std::string plot_histogram(const Histogram& hist, double mean, double std_dev, std::size_t n);

std::string plot_sweep(const TodResult& tod);

std::string plot_range_map(const RangeMapGrid& grid);

}  // namespace sagnac

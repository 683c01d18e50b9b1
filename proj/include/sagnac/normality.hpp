#pragma once

#include <span>

namespace sagnac {

struct ShapiroWilk {
  double w = 1.0;
  double p_value = 1.0;
};

/// Shapiro-Wilk test using Royston's (1995) approximation of the
/// coefficients and of the null distribution of W. Valid for 3 <= n <= 5000.
/// A sample with zero spread yields W = 1, p = 1.
ShapiroWilk shapiro_wilk(std::span<const double> sample);

}  // namespace sagnac

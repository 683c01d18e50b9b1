#include "sagnac/normality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace sagnac {

namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double r = 0.0;
  for (std::size_t k = N; k-- > 0;) r = r * x + c[k];
  return r;
}

}  // namespace

ShapiroWilk shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk: need 3 <= n <= 5000");

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  if (x.back() - x.front() == 0.0) return {};

  const boost::math::normal_distribution<double> unit;
  const double nd = static_cast<double>(n);

  // Expected normal order statistics (Blom scores) and their norm.
  std::vector<double> m(n);
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = boost::math::quantile(unit, (static_cast<double>(i + 1) - 0.375) / (nd + 0.25));
    m2 += m[i] * m[i];
  }

  std::vector<double> a(n);
  if (n == 3) {
    a[0] = -std::numbers::sqrt2 / 2.0;
    a[1] = 0.0;
    a[2] = std::numbers::sqrt2 / 2.0;
  } else {
    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    const double u = 1.0 / std::sqrt(nd);
    const double an = m[n - 1] / std::sqrt(m2) + poly(c1, u);
    double phi = 0.0;
    if (n > 5) {
      const double an1 = m[n - 2] / std::sqrt(m2) + poly(c2, u);
      phi = (m2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
            (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
      a[n - 2] = an1;
      a[1] = -an1;
    } else {
      phi = (m2 - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
    }
    a[n - 1] = an;
    a[0] = -an;
    const std::size_t lo = n > 5 ? 2 : 1;
    for (std::size_t i = lo; i < n - lo; ++i) a[i] = m[i] / std::sqrt(phi);
  }

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= nd;
  double ss = 0.0;
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss += (x[i] - mean) * (x[i] - mean);
    num += a[i] * x[i];
  }
  const double w = std::min(1.0, num * num / ss);

  ShapiroWilk out;
  out.w = w;
  if (n == 3) {
    constexpr double stqr = 1.0471975511965976;  // asin(sqrt(3/4))
    out.p_value = std::max(0.0, 6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - stqr));
    return out;
  }
  const double w1 = std::log1p(-w);
  if (!std::isfinite(w1)) {
    out.p_value = 1.0;
    return out;
  }
  double z = 0.0;
  if (n <= 11) {
    static constexpr double g[] = {-2.273, 0.459};
    static constexpr double c3[] = {0.5440, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    const double gamma = poly(g, nd);
    if (w1 >= gamma) {
      out.p_value = 1e-99;
      return out;
    }
    const double y = -std::log(gamma - w1);
    z = (y - poly(c3, nd)) / std::exp(poly(c4, nd));
  } else {
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    const double ln_n = std::log(nd);
    z = (w1 - poly(c5, ln_n)) / std::exp(poly(c6, ln_n));
  }
  out.p_value = boost::math::cdf(boost::math::complement(unit, z));
  return out;
}

}  // namespace sagnac

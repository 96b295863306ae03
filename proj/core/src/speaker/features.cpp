#include "colorref/speaker/features.hpp"

#include <cmath>
#include <numbers>

namespace colorref::speaker {

std::array<double, kFeatureDim> color_features(const color::ColorHSV& c) {
  const double phi = 2.0 * std::numbers::pi * c.h() / 360.0;
  const double s = c.s() / 100.0;
  const double v = c.v() / 100.0;
  const std::array<double, 4> mags = {1.0, s, v, s * v};
  std::array<double, kFeatureDim> f{};
  std::size_t k = 0;
  for (int j = 0; j < 3; ++j) {
    const double cj = std::cos(j * phi);
    const double sj = std::sin(j * phi);
    for (double m : mags) {
      f[k++] = m * cj;
      f[k++] = m * sj;
    }
  }
  return f;
}

}  // namespace colorref::speaker

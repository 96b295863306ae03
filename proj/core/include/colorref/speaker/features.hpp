#pragma once

#include <array>
#include <cstddef>

#include "colorref/colorspace.hpp"

namespace colorref::speaker {

inline constexpr std::size_t kFeatureDim = 24;

/// Fourier features of a color. With phi = 2*pi*h/360 and s~, v~ scaled to
/// [0, 1]: for j in {0, 1, 2} and m in {1, s~, v~, s~*v~}, emits
/// m*cos(j*phi) then m*sin(j*phi). Index = 8*j + 2*m_index + {0: cos, 1: sin}.
std::array<double, kFeatureDim> color_features(const color::ColorHSV& c);

}  // namespace colorref::speaker

#include <array>
#include <cmath>

#include "colorref/colorspace.hpp"
#include "colorref/error.hpp"

namespace colorref::color {

namespace {

// Hue angle (HSV degrees) of the principal hue 5X of each Munsell family,
// in WCS column order R, YR, Y, GY, G, BG, B, PB, P, RP. Column 4k+2 holds
// the principal hue of family k; intermediate columns interpolate linearly.
constexpr std::array<double, 10> kPrincipalHue = {0.0, 30.0, 55.0, 80.0, 140.0, 175.0, 200.0, 230.0, 275.0, 325.0};

double column_hue(int column) {
  const int offset = column - 2;
  const int family = static_cast<int>(std::floor(offset / 4.0));
  const double frac = (offset - 4 * family) / 4.0;
  auto anchor = [](int k) {
    const int wrapped = ((k % 10) + 10) % 10;
    const double turns = std::floor(k / 10.0);
    return kPrincipalHue[static_cast<std::size_t>(wrapped)] + 360.0 * turns;
  };
  const double lo = anchor(family);
  const double hi = anchor(family + 1);
  double h = std::fmod(lo + frac * (hi - lo), 360.0);
  if (h < 0.0) h += 360.0;
  return h;
}

// Lighter chart rows map to lower saturation at the fixed stimulus value.
double row_saturation(int lightness_row) { return 25.0 + (lightness_row - 1) * 75.0 / 7.0; }

std::vector<WcsChip> build() {
  std::vector<WcsChip> chips;
  chips.reserve(kWcsChipCount);
  int index = 1;
  for (int row = 1; row <= kWcsChromaticRows; ++row) {
    for (int col = 1; col <= kWcsHueColumns; ++col) {
      chips.push_back({index++, col, row, ColorHSV(column_hue(col), row_saturation(row), kStimulusValue)});
    }
  }
  for (int row = 0; row < kWcsAchromaticChips; ++row) {
    chips.push_back({index++, 0, row, ColorHSV(0.0, 0.0, kStimulusValue)});
  }
  return chips;
}

}  // namespace

const std::vector<WcsChip>& wcs_palette() {
  static const std::vector<WcsChip> chips = build();
  return chips;
}

char wcs_row_letter(int lightness_row) {
  if (lightness_row < 0 || lightness_row > 9) throw ContractError("WCS lightness row out of range");
  return static_cast<char>('A' + lightness_row);
}

}  // namespace colorref::color

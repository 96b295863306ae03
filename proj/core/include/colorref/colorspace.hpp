#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace colorref::color {

/// Hue in degrees [0, 360), saturation and value in percent [0, 100].
class ColorHSV {
 public:
  ColorHSV() = default;
  /// Hue is reduced modulo 360; s and v outside [0, 100] throw ContractError.
  ColorHSV(double h, double s, double v);

  double h() const noexcept { return h_; }
  double s() const noexcept { return s_; }
  double v() const noexcept { return v_; }

  friend bool operator==(const ColorHSV&, const ColorHSV&) = default;

 private:
  double h_ = 0.0;
  double s_ = 0.0;
  double v_ = 0.0;
};

/// CIELAB, D65 white, 2 degree observer.
struct ColorLab {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// sRGB channels on the continuous [0, 255] scale.
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

Rgb hsv_to_rgb(const ColorHSV& c);
Rgb8 to_rgb8(const Rgb& c);
ColorHSV rgb_to_hsv(const Rgb& c);
/// HSL (h degrees, s and l percent) to HSV; used when importing corpora whose
/// colors are recorded in HSL.
ColorHSV hsl_to_hsv(double h, double s, double l);

ColorLab rgb_to_lab(const Rgb& c);
/// Inverse of rgb_to_lab; channels are clamped to [0, 255].
Rgb lab_to_rgb(const ColorLab& c);
inline ColorLab hsv_to_lab(const ColorHSV& c) { return rgb_to_lab(hsv_to_rgb(c)); }

/// CIEDE2000 color difference with kL = kC = kH = 1.
double ciede2000(const ColorLab& x, const ColorLab& y);

/// Stimulus gamut: every stimulus shares one value (brightness) level.
inline constexpr double kStimulusValue = 100.0;
bool in_stimulus_gamut(const ColorHSV& c);
/// Closest stimulus color: keeps hue and saturation, clamps value.
ColorHSV project_to_stimulus_gamut(const ColorHSV& c);

/// One chip of the World Color Survey stimulus chart.
///
/// Chromatic chips sit in rows B..I (lightness_row 1..8) and hue columns
/// 1..40; achromatic chips sit in column 0, rows A..J (lightness_row 0..9).
struct WcsChip {
  int chip_index = 0;   // 1..330
  int hue_column = 0;   // 0 (achromatic) or 1..40
  int lightness_row = 0;  // 0 (A) .. 9 (J)
  ColorHSV color;        // projected into the stimulus gamut
};

inline constexpr int kWcsHueColumns = 40;
inline constexpr int kWcsChromaticRows = 8;
inline constexpr int kWcsAchromaticChips = 10;
inline constexpr int kWcsChipCount = kWcsHueColumns * kWcsChromaticRows + kWcsAchromaticChips;

/// The 330 WCS chips. Chromatic chips are numbered row-major (B1 = 1 ..
/// I40 = 320), achromatic chips A0..J0 are 321..330.
const std::vector<WcsChip>& wcs_palette();

char wcs_row_letter(int lightness_row);

}  // namespace colorref::color

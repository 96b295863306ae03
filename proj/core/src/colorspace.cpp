#include "colorref/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "colorref/error.hpp"

namespace colorref::color {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Linear sRGB -> XYZ (D65).
constexpr double kToXyz[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
struct Matrix3 {
  double m[3][3];
};

// Exact inverse of kToXyz, so Lab round trips are lossless to rounding.
constexpr Matrix3 invert(const double a[3][3]) {
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  Matrix3 r{};
  r.m[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  r.m[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  r.m[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  r.m[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  r.m[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  r.m[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  r.m[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  r.m[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  r.m[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return r;
}

constexpr Matrix3 kFromXyz = invert(kToXyz);

// The white point is the image of sRGB white, so white maps to L=100, a=b=0.
constexpr double kWhite[3] = {
    kToXyz[0][0] + kToXyz[0][1] + kToXyz[0][2],
    kToXyz[1][0] + kToXyz[1][1] + kToXyz[1][2],
    kToXyz[2][0] + kToXyz[2][1] + kToXyz[2][2],
};

constexpr double kDelta = 6.0 / 29.0;

double srgb_to_linear(double c) {
  c /= 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double c) {
  c = c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
  return std::clamp(c * 255.0, 0.0, 255.0);
}

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) { return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0); }

double hue_degrees(double b, double a) {
  if (a == 0.0 && b == 0.0) return 0.0;
  double h = std::atan2(b, a) / kDeg;
  if (h < 0.0) h += 360.0;
  return h;
}

}  // namespace

ColorHSV::ColorHSV(double h, double s, double v) {
  if (!std::isfinite(h) || !std::isfinite(s) || !std::isfinite(v)) throw ContractError("ColorHSV: non-finite component");
  if (s < 0.0 || s > 100.0 || v < 0.0 || v > 100.0) {
    throw ContractError("ColorHSV: saturation and value must be in [0, 100]");
  }
  h = std::fmod(h, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h = 0.0;
  h_ = h;
  s_ = s;
  v_ = v;
}

Rgb hsv_to_rgb(const ColorHSV& c) {
  const double v = c.v() / 100.0;
  const double chroma = v * c.s() / 100.0;
  const double hp = c.h() / 60.0;
  const double x = chroma * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = chroma, g = x; break;
    case 1: r = x, g = chroma; break;
    case 2: g = chroma, b = x; break;
    case 3: g = x, b = chroma; break;
    case 4: r = x, b = chroma; break;
    default: r = chroma, b = x; break;
  }
  const double m = v - chroma;
  return {(r + m) * 255.0, (g + m) * 255.0, (b + m) * 255.0};
}

Rgb8 to_rgb8(const Rgb& c) {
  auto q = [](double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); };
  return {q(c.r), q(c.g), q(c.b)};
}

ColorHSV rgb_to_hsv(const Rgb& c) {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double d = mx - mn;
  double h = 0.0;
  if (d > 0.0) {
    if (mx == r) {
      h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
      h = 60.0 * ((b - r) / d + 2.0);
    } else {
      h = 60.0 * ((r - g) / d + 4.0);
    }
  }
  const double s = mx > 0.0 ? d / mx : 0.0;
  return ColorHSV(h, std::clamp(s * 100.0, 0.0, 100.0), std::clamp(mx * 100.0, 0.0, 100.0));
}

ColorHSV hsl_to_hsv(double h, double s, double l) {
  const double sl = s / 100.0, ll = l / 100.0;
  const double v = ll + sl * std::min(ll, 1.0 - ll);
  const double sv = v > 0.0 ? 2.0 * (1.0 - ll / v) : 0.0;
  return ColorHSV(h, std::clamp(sv * 100.0, 0.0, 100.0), std::clamp(v * 100.0, 0.0, 100.0));
}

ColorLab rgb_to_lab(const Rgb& c) {
  const double lin[3] = {srgb_to_linear(c.r), srgb_to_linear(c.g), srgb_to_linear(c.b)};
  double xyz[3];
  for (int i = 0; i < 3; ++i) {
    xyz[i] = kToXyz[i][0] * lin[0] + kToXyz[i][1] * lin[1] + kToXyz[i][2] * lin[2];
  }
  const double fx = lab_f(xyz[0] / kWhite[0]);
  const double fy = lab_f(xyz[1] / kWhite[1]);
  const double fz = lab_f(xyz[2] / kWhite[2]);
  return {std::clamp(116.0 * fy - 16.0, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb lab_to_rgb(const ColorLab& c) {
  const double fy = (c.L + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  const double xyz[3] = {kWhite[0] * lab_f_inv(fx), kWhite[1] * lab_f_inv(fy), kWhite[2] * lab_f_inv(fz)};
  double lin[3];
  for (int i = 0; i < 3; ++i) {
    lin[i] = kFromXyz.m[i][0] * xyz[0] + kFromXyz.m[i][1] * xyz[1] + kFromXyz.m[i][2] * xyz[2];
  }
  return {linear_to_srgb(lin[0]), linear_to_srgb(lin[1]), linear_to_srgb(lin[2])};
}

double ciede2000(const ColorLab& x, const ColorLab& y) {
  const double c1 = std::hypot(x.a, x.b);
  const double c2 = std::hypot(y.a, y.b);
  const double c_bar = 0.5 * (c1 + c2);
  const double c_bar7 = std::pow(c_bar, 7.0);
  constexpr double k25_7 = 6103515625.0;  // 25^7
  const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + k25_7)));

  const double a1p = (1.0 + g) * x.a;
  const double a2p = (1.0 + g) * y.a;
  const double c1p = std::hypot(a1p, x.b);
  const double c2p = std::hypot(a2p, y.b);
  const double h1p = hue_degrees(x.b, a1p);
  const double h2p = hue_degrees(y.b, a2p);

  const double d_lp = y.L - x.L;
  const double d_cp = c2p - c1p;
  const double cc = c1p * c2p;

  double d_hp = 0.0;
  if (cc != 0.0) {
    d_hp = h2p - h1p;
    if (d_hp > 180.0) {
      d_hp -= 360.0;
    } else if (d_hp < -180.0) {
      d_hp += 360.0;
    }
  }
  const double d_Hp = 2.0 * std::sqrt(cc) * std::sin(0.5 * d_hp * kDeg);

  const double l_bar = 0.5 * (x.L + y.L);
  const double cp_bar = 0.5 * (c1p + c2p);
  double hp_bar = h1p + h2p;
  if (cc != 0.0) {
    if (std::fabs(h1p - h2p) <= 180.0) {
      hp_bar *= 0.5;
    } else if (hp_bar < 360.0) {
      hp_bar = 0.5 * (hp_bar + 360.0);
    } else {
      hp_bar = 0.5 * (hp_bar - 360.0);
    }
  }

  const double t = 1.0 - 0.17 * std::cos((hp_bar - 30.0) * kDeg) + 0.24 * std::cos(2.0 * hp_bar * kDeg) +
                   0.32 * std::cos((3.0 * hp_bar + 6.0) * kDeg) - 0.20 * std::cos((4.0 * hp_bar - 63.0) * kDeg);
  const double d_theta = 30.0 * std::exp(-std::pow((hp_bar - 275.0) / 25.0, 2.0));
  const double cp_bar7 = std::pow(cp_bar, 7.0);
  const double r_c = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + k25_7));
  const double l50 = (l_bar - 50.0) * (l_bar - 50.0);
  const double s_l = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
  const double s_c = 1.0 + 0.045 * cp_bar;
  const double s_h = 1.0 + 0.015 * cp_bar * t;
  const double r_t = -std::sin(2.0 * d_theta * kDeg) * r_c;

  const double tl = d_lp / s_l;
  const double tc = d_cp / s_c;
  const double th = d_Hp / s_h;
  return std::sqrt(std::max(0.0, tl * tl + tc * tc + th * th + r_t * tc * th));
}

bool in_stimulus_gamut(const ColorHSV& c) { return c.v() == kStimulusValue; }

ColorHSV project_to_stimulus_gamut(const ColorHSV& c) { return ColorHSV(c.h(), c.s(), kStimulusValue); }

}  // namespace colorref::color

#include <doctest.h>

#include <array>
#include <cmath>

#include "colorref/colorspace.hpp"
#include "colorref/error.hpp"
#include "colorref/rng.hpp"
#include "support/ciede2000_pairs.hpp"

using namespace colorref;
using namespace colorref::color;

using testing::kCiede2000Pairs;

TEST_SUITE("colorspace") {
  TEST_CASE("ciede2000 reference pairs") {
    for (std::size_t i = 0; i < kCiede2000Pairs.size(); ++i) {
      CAPTURE(i + 1);
      CHECK(std::fabs(ciede2000(kCiede2000Pairs[i].a, kCiede2000Pairs[i].b) - kCiede2000Pairs[i].expected) < 1e-4);
    }
  }

  TEST_CASE("ciede2000 is symmetric, non-negative and zero on identity") {
    Rng rng(3);
    for (int k = 0; k < 2000; ++k) {
      const ColorLab a{rng.uniform(0, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
      const ColorLab b{rng.uniform(0, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
      const double d = ciede2000(a, b);
      CHECK(d >= 0.0);
      CHECK(d == doctest::Approx(ciede2000(b, a)).epsilon(1e-12));
      CHECK(ciede2000(a, a) == 0.0);
    }
  }

  TEST_CASE("hsv validation and hue wrap") {
    CHECK_THROWS_AS(ColorHSV(0, 101, 50), ContractError);
    CHECK_THROWS_AS(ColorHSV(0, 50, -1), ContractError);
    CHECK_THROWS_AS(ColorHSV(std::nan(""), 50, 50), ContractError);
    CHECK(ColorHSV(370, 10, 10).h() == doctest::Approx(10));
    CHECK(ColorHSV(-30, 10, 10).h() == doctest::Approx(330));
    CHECK(ColorHSV(360, 10, 10).h() == 0.0);
  }

  TEST_CASE("rgb conversions") {
    const auto red = hsv_to_rgb(ColorHSV(0, 100, 100));
    CHECK(red.r == doctest::Approx(255));
    CHECK(red.g == doctest::Approx(0));
    const auto white = rgb_to_lab({255, 255, 255});
    CHECK(white.L == doctest::Approx(100).epsilon(1e-12));
    CHECK(std::fabs(white.a) < 1e-9);
    CHECK(std::fabs(white.b) < 1e-9);
    const auto black = rgb_to_lab({0, 0, 0});
    CHECK(black.L == doctest::Approx(0));
    // sRGB red in CIELAB (D65).
    const auto lab = rgb_to_lab({255, 0, 0});
    CHECK(lab.L == doctest::Approx(53.24).epsilon(1e-3));
    CHECK(lab.a == doctest::Approx(80.09).epsilon(1e-3));
    CHECK(lab.b == doctest::Approx(67.20).epsilon(1e-3));

    Rng rng(5);
    for (int k = 0; k < 500; ++k) {
      const ColorHSV c(rng.uniform(0, 360), rng.uniform(0, 100), rng.uniform(0, 100));
      const auto back = rgb_to_hsv(hsv_to_rgb(c));
      CHECK(back.v() == doctest::Approx(c.v()).epsilon(1e-9));
      if (c.v() > 1 && c.s() > 1) {
        CHECK(back.s() == doctest::Approx(c.s()).epsilon(1e-9));
        double dh = std::fabs(back.h() - c.h());
        CHECK(std::min(dh, 360 - dh) < 1e-6);
      }
      const auto rgb = hsv_to_rgb(c);
      const auto rt = lab_to_rgb(rgb_to_lab(rgb));
      CHECK(rt.r == doctest::Approx(rgb.r).epsilon(1e-6));
      CHECK(rt.g == doctest::Approx(rgb.g).epsilon(1e-6));
      CHECK(rt.b == doctest::Approx(rgb.b).epsilon(1e-6));
    }
  }

  TEST_CASE("hsl to hsv") {
    const auto c = hsl_to_hsv(120, 100, 50);
    CHECK(c.h() == doctest::Approx(120));
    CHECK(c.s() == doctest::Approx(100));
    CHECK(c.v() == doctest::Approx(100));
    const auto g = hsl_to_hsv(10, 0, 40);
    CHECK(g.s() == doctest::Approx(0));
    CHECK(g.v() == doctest::Approx(40));
  }

  TEST_CASE("stimulus gamut projection") {
    const ColorHSV c(200, 40, 60);
    CHECK_FALSE(in_stimulus_gamut(c));
    const auto p = project_to_stimulus_gamut(c);
    CHECK(in_stimulus_gamut(p));
    CHECK(p.h() == c.h());
    CHECK(p.s() == c.s());
  }

  TEST_CASE("wcs palette layout") {
    const auto& chips = wcs_palette();
    REQUIRE(chips.size() == static_cast<std::size_t>(kWcsChipCount));
    for (std::size_t i = 0; i < chips.size(); ++i) CHECK(chips[i].chip_index == static_cast<int>(i) + 1);
    int chromatic = 0;
    for (const auto& c : chips) {
      chromatic += c.hue_column > 0;
      CHECK(in_stimulus_gamut(c.color));
    }
    CHECK(chromatic == kWcsHueColumns * kWcsChromaticRows);
    CHECK(wcs_row_letter(0) == 'A');
    CHECK(wcs_row_letter(9) == 'J');
    CHECK_THROWS_AS(wcs_row_letter(10), ContractError);
  }
}

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "colorref/colorspace.hpp"
#include "colorref/error.hpp"
#include "colorref/rng.hpp"

namespace colorref::context {

enum class Condition { kFar, kSplit, kClose };

inline constexpr std::array<Condition, 3> kAllConditions = {Condition::kFar, Condition::kSplit, Condition::kClose};

std::string to_string(Condition c);
/// Accepts "far", "split", "close" in any letter case.
Condition parse_condition(std::string_view text);

inline constexpr double kDefaultTheta = 20.0;
inline constexpr double kDefaultMinDistance = 5.0;
inline constexpr int kContextSize = 3;

/// Thrown when a color triple fits none of the three difficulty conditions.
class UnclassifiableError : public Error {
 public:
  using Error::Error;
};

/// Thrown when the rejection sampler runs out of attempts.
class SamplingError : public Error {
 public:
  using Error::Error;
};

struct ReferenceContext {
  std::array<color::ColorHSV, 3> colors;  // display order
  int target_index = 0;
  Condition condition = Condition::kFar;
  double theta = kDefaultTheta;
  double min_distance = kDefaultMinDistance;

  friend bool operator==(const ReferenceContext&, const ReferenceContext&) = default;
};

/// Classification from the three pairwise distances: target to each
/// distractor, and between the distractors.
Condition classify_distances(double target_d1, double target_d2, double d1_d2, double theta = kDefaultTheta);

Condition classify_condition(const std::array<color::ColorLab, 3>& colors, int target_index,
                             double theta = kDefaultTheta);
Condition classify_condition(const std::array<color::ColorHSV, 3>& colors, int target_index,
                             double theta = kDefaultTheta);

/// Smallest pairwise CIEDE2000 distance among the three colors.
double min_pairwise_distance(const std::array<color::ColorHSV, 3>& colors);

/// Uniform color in the stimulus gamut.
color::ColorHSV sample_stimulus_color(Rng& rng);

/// Rejection sampler: draws three stimulus colors and a uniform target index
/// until the triple respects `min_distance` and classifies as `condition`.
ReferenceContext sample_context(Condition condition, Rng& rng, double theta = kDefaultTheta,
                                double min_distance = kDefaultMinDistance, int max_attempts = 10'000);

/// Conditions cycle far, split, close so counts differ by at most one.
std::vector<Condition> stratified_conditions(std::size_t n);

nlohmann::json color_to_json(const color::ColorHSV& c, bool with_rgb = false);
color::ColorHSV color_from_json(const nlohmann::json& j);
nlohmann::json context_to_json(const ReferenceContext& ctx);

}  // namespace colorref::context

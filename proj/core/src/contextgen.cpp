#include "colorref/contextgen.hpp"

#include <algorithm>
#include <cctype>

namespace colorref::context {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::kFar: return "far";
    case Condition::kSplit: return "split";
    case Condition::kClose: return "close";
  }
  return "far";
}

Condition parse_condition(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "far") return Condition::kFar;
  if (lower == "split") return Condition::kSplit;
  if (lower == "close") return Condition::kClose;
  throw DataError("unknown condition '" + std::string(text) + "'");
}

Condition classify_distances(double target_d1, double target_d2, double d1_d2, double theta) {
  const bool far_t1 = target_d1 >= theta;
  const bool far_t2 = target_d2 >= theta;
  const bool far_12 = d1_d2 >= theta;
  if (far_t1 && far_t2 && far_12) return Condition::kFar;
  if (!far_t1 && !far_t2 && !far_12) return Condition::kClose;
  // One distractor near the target, the other at least theta from both.
  if ((!far_t1 && far_t2 && far_12) || (!far_t2 && far_t1 && far_12)) return Condition::kSplit;
  throw UnclassifiableError("context matches no difficulty condition (distances " + std::to_string(target_d1) + ", " +
                            std::to_string(target_d2) + ", " + std::to_string(d1_d2) + ")");
}

Condition classify_condition(const std::array<color::ColorLab, 3>& colors, int target_index, double theta) {
  if (target_index < 0 || target_index > 2) throw ContractError("target_index must be 0, 1 or 2");
  const auto t = static_cast<std::size_t>(target_index);
  const auto a = (t + 1) % 3;
  const auto b = (t + 2) % 3;
  return classify_distances(color::ciede2000(colors[t], colors[a]), color::ciede2000(colors[t], colors[b]),
                            color::ciede2000(colors[a], colors[b]), theta);
}

Condition classify_condition(const std::array<color::ColorHSV, 3>& colors, int target_index, double theta) {
  return classify_condition(
      {color::hsv_to_lab(colors[0]), color::hsv_to_lab(colors[1]), color::hsv_to_lab(colors[2])}, target_index,
      theta);
}

double min_pairwise_distance(const std::array<color::ColorHSV, 3>& colors) {
  const std::array<color::ColorLab, 3> lab = {color::hsv_to_lab(colors[0]), color::hsv_to_lab(colors[1]),
                                              color::hsv_to_lab(colors[2])};
  return std::min({color::ciede2000(lab[0], lab[1]), color::ciede2000(lab[0], lab[2]), color::ciede2000(lab[1], lab[2])});
}

color::ColorHSV sample_stimulus_color(Rng& rng) {
  const double h = rng.uniform(0.0, 360.0);
  const double s = rng.uniform(0.0, 100.0);
  return color::ColorHSV(h, s, color::kStimulusValue);
}

ReferenceContext sample_context(Condition condition, Rng& rng, double theta, double min_distance, int max_attempts) {
  if (!(theta > 0.0) || !(min_distance >= 0.0)) throw ContractError("sample_context: invalid theta or min_distance");
  if (max_attempts <= 0) throw ContractError("sample_context: max_attempts must be positive");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ReferenceContext ctx;
    for (auto& c : ctx.colors) c = sample_stimulus_color(rng);
    ctx.target_index = static_cast<int>(rng.uniform_int(3));
    ctx.theta = theta;
    ctx.min_distance = min_distance;
    if (min_pairwise_distance(ctx.colors) < min_distance) continue;
    try {
      ctx.condition = classify_condition(ctx.colors, ctx.target_index, theta);
    } catch (const UnclassifiableError&) {
      continue;
    }
    if (ctx.condition == condition) return ctx;
  }
  throw SamplingError("no " + to_string(condition) + " context found in " + std::to_string(max_attempts) +
                      " attempts");
}

std::vector<Condition> stratified_conditions(std::size_t n) {
  std::vector<Condition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(kAllConditions[i % 3]);
  return out;
}

nlohmann::json color_to_json(const color::ColorHSV& c, bool with_rgb) {
  nlohmann::json j = {{"h", c.h()}, {"s", c.s()}, {"v", c.v()}};
  if (with_rgb) {
    const auto rgb = color::to_rgb8(color::hsv_to_rgb(c));
    j["r"] = rgb.r;
    j["g"] = rgb.g;
    j["b"] = rgb.b;
  }
  return j;
}

color::ColorHSV color_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("color must be an object {h,s,v}");
  for (const char* key : {"h", "s", "v"}) {
    if (!j.contains(key) || !j.at(key).is_number()) throw DataError(std::string("color field '") + key + "' must be a number");
  }
  try {
    return color::ColorHSV(j.at("h").get<double>(), j.at("s").get<double>(), j.at("v").get<double>());
  } catch (const ContractError& e) {
    throw DataError(e.what());
  }
}

nlohmann::json context_to_json(const ReferenceContext& ctx) {
  nlohmann::json colors = nlohmann::json::array();
  for (const auto& c : ctx.colors) colors.push_back(color_to_json(c));
  return {{"colors", colors},
          {"target_index", ctx.target_index},
          {"condition", to_string(ctx.condition)},
          {"theta", ctx.theta}};
}

}  // namespace colorref::context

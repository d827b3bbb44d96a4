#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>

namespace sentitree {

// Three-valued sentiment label. The enum order is the fixed tie-breaking
// order used throughout: Negative < Neutral < Positive.
enum class Polarity : int { Negative = 0, Neutral = 1, Positive = 2 };

inline constexpr std::array<Polarity, 3> kAllPolarities{
    Polarity::Negative, Polarity::Neutral, Polarity::Positive};

inline const char* to_string(Polarity p) {
  switch (p) {
    case Polarity::Negative: return "negative";
    case Polarity::Neutral: return "neutral";
    case Polarity::Positive: return "positive";
  }
  return "neutral";
}

inline std::optional<Polarity> parse_polarity(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "positive") return Polarity::Positive;
  if (s == "negative") return Polarity::Negative;
  if (s == "neutral") return Polarity::Neutral;
  return std::nullopt;
}

inline std::array<double, 3> one_hot(Polarity p) {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  v[static_cast<int>(p)] = 1.0;
  return v;
}

}  // namespace sentitree

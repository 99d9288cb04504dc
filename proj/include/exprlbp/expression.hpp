#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace exprlbp {

/// The six basic expressions in canonical order. Every per-class table in the
/// library (model classes, scores, confusion rows) uses this order.
enum class Expression : int { Anger = 0, Disgust, Fear, Happiness, Sadness, Surprise };

inline constexpr std::size_t kNumExpressions = 6;

inline constexpr std::array<Expression, kNumExpressions> kExpressions{
    Expression::Anger,     Expression::Disgust, Expression::Fear,
    Expression::Happiness, Expression::Sadness, Expression::Surprise};

inline constexpr std::array<std::string_view, kNumExpressions> kExpressionNames{
    "anger", "disgust", "fear", "happiness", "sadness", "surprise"};

constexpr std::size_t index_of(Expression e) { return static_cast<std::size_t>(e); }

constexpr std::string_view to_string(Expression e) { return kExpressionNames[index_of(e)]; }

constexpr std::optional<Expression> parse_expression(std::string_view name) {
  for (std::size_t i = 0; i < kNumExpressions; ++i) {
    if (kExpressionNames[i] == name) return kExpressions[i];
  }
  return std::nullopt;
}

}  // namespace exprlbp

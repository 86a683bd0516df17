#pragma once

#include <memory>
#include <vector>

#include "optpac/core.hpp"

namespace optpac::testing {

/// Predicts the same label everywhere.
class ConstantHypothesis final : public Hypothesis {
 public:
  explicit ConstantHypothesis(Label y) : y_(y) {}
  Label predict(const Point&) const override { return y_; }
  nlohmann::json describe() const override { return {{"type", "constant"}, {"label", y_}}; }

 private:
  Label y_;
};

inline HypothesisPtr constant(Label y) { return std::make_shared<ConstantHypothesis>(y); }

inline Point scalar(double x) { return Point::Constant(1, x); }

/// Examples (x, y) with x given as scalars.
inline TrainingSequence sequence(const std::vector<std::pair<double, Label>>& items) {
  TrainingSequence::Store store;
  for (const auto& [x, y] : items) store.emplace_back(scalar(x), y);
  return TrainingSequence(std::move(store));
}

/// 1..n as scalar points labelled +1; handy for index bookkeeping.
inline TrainingSequence counting_sequence(std::size_t n) {
  TrainingSequence::Store store;
  for (std::size_t i = 1; i <= n; ++i) store.emplace_back(scalar(static_cast<double>(i)), +1);
  return TrainingSequence(std::move(store));
}

/// 1-based backing indices of a view.
inline std::vector<std::size_t> one_based(const TrainingSequence& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.backing_index(i) + 1);
  return out;
}

}  // namespace optpac::testing

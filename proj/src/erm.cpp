#include "optpac/erm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace optpac {

HypothesisPtr ErmOracle::train(const TrainingSequence& s, CostLedger& ledger) const {
  ++ledger.erm_train_calls;
  ledger.erm_train_examples += s.size();
  std::shared_ptr<Hypothesis> h = fit(s, ledger);
  h->trained_on_ = s.size();
  return h;
}

// --- thresholds -------------------------------------------------------------

ThresholdHypothesis::ThresholdHypothesis(double boundary, Label orientation)
    : boundary_(boundary), orientation_(orientation) {
  if (!is_label(orientation)) throw BadParams("threshold orientation must be -1 or +1");
}

nlohmann::json ThresholdHypothesis::describe() const {
  return {{"kind", "threshold"}, {"boundary", boundary_}, {"orientation", orientation_}};
}

std::shared_ptr<Hypothesis> ThresholdERM::fit(const TrainingSequence& s, CostLedger& ledger) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double max_neg = -inf, min_neg = inf, max_pos = -inf, min_pos = inf;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = s[i].point[0];
    if (s[i].label < 0) {
      max_neg = std::max(max_neg, x);
      min_neg = std::min(min_neg, x);
    } else {
      max_pos = std::max(max_pos, x);
      min_pos = std::min(min_pos, x);
    }
  }
  ledger.arithmetic_ops += s.size();

  const bool has_neg = max_neg > -inf;
  const bool has_pos = min_pos < inf;
  if (!has_neg && !has_pos) return std::make_shared<ThresholdHypothesis>(0.0, +1);
  if (!has_neg) return std::make_shared<ThresholdHypothesis>(min_pos - 1.0, +1);
  if (!has_pos) return std::make_shared<ThresholdHypothesis>(max_neg + 1.0, +1);
  if (max_neg < min_pos) return std::make_shared<ThresholdHypothesis>(0.5 * (max_neg + min_pos), +1);
  if (max_pos < min_neg) return std::make_shared<ThresholdHypothesis>(0.5 * (max_pos + min_neg), -1);
  throw NotRealizable("sample is not realizable by a one-dimensional threshold");
}

// --- finite classes ---------------------------------------------------------

FiniteClassHypothesis::FiniteClassHypothesis(std::shared_ptr<const LabelTable> table,
                                             std::size_t index)
    : table_(std::move(table)), index_(index) {}

Label FiniteClassHypothesis::predict(const Point& x) const {
  return (*table_)[index_][static_cast<std::size_t>(x[0])];
}

nlohmann::json FiniteClassHypothesis::describe() const {
  return {{"kind", "finite"}, {"index", index_}, {"labels", (*table_)[index_]}};
}

FiniteClassERM::FiniteClassERM(LabelTable table)
    : table_(std::make_shared<const LabelTable>(std::move(table))) {
  if (table_->empty()) throw BadParams("finite class must contain at least one hypothesis");
  const std::size_t n = table_->front().size();
  for (const auto& row : *table_) {
    if (row.size() != n) throw BadParams("finite class rows must cover the same universe");
    for (Label y : row)
      if (!is_label(y)) throw BadParams("finite class labels must be -1 or +1");
  }
}

std::shared_ptr<Hypothesis> FiniteClassERM::fit(const TrainingSequence& s, CostLedger& ledger) const {
  const std::size_t n = universe_size();
  for (std::size_t j = 0; j < table_->size(); ++j) {
    const auto& row = (*table_)[j];
    bool consistent = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto idx = static_cast<std::size_t>(s[i].point[0]);
      if (idx >= n) throw BadParams("finite class point outside universe");
      consistent = consistent && row[idx] == s[i].label;
    }
    ledger.arithmetic_ops += s.size();
    if (consistent) return std::make_shared<FiniteClassHypothesis>(table_, j);
  }
  throw NotRealizable("no hypothesis in the finite class realizes the sample");
}

// --- perceptron -------------------------------------------------------------

HalfspaceHypothesis::HalfspaceHypothesis(Eigen::VectorXd weights) : weights_(std::move(weights)) {}

nlohmann::json HalfspaceHypothesis::describe() const {
  return {{"kind", "halfspace"},
          {"weights", std::vector<double>(weights_.data(), weights_.data() + weights_.size())}};
}

PerceptronERM::PerceptronERM(PerceptronConfig config, Observer observer)
    : config_(config), observer_(std::move(observer)) {
  if (!(config_.gamma_floor > 0.0)) throw BadParams("perceptron gamma_floor must be positive");
}

std::size_t PerceptronERM::pass_budget(const TrainingSequence& s) const {
  if (config_.max_passes) return *config_.max_passes;
  double max_sq = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) max_sq = std::max(max_sq, s[i].point.squaredNorm());
  const double cap = std::ceil(max_sq / (config_.gamma_floor * config_.gamma_floor));
  return 10 * static_cast<std::size_t>(std::max(1.0, cap));
}

PerceptronStats PerceptronERM::fit_weights(const TrainingSequence& s, Eigen::VectorXd& w) const {
  if (s.empty()) throw BadShape("perceptron needs a non-empty sample");
  const Eigen::Index dim = s[0].point.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Point& x = s[i].point;
    if (x.size() != dim) throw BadParams("perceptron points must share one dimension");
    if (x[dim - 1] != 1.0) throw BadParams("perceptron points need a bias coordinate equal to 1");
  }

  const std::size_t budget = pass_budget(s);
  PerceptronStats stats;
  stats.sample_size = s.size();
  w = Eigen::VectorXd::Zero(dim);
  bool mistake = true;
  while (mistake) {
    if (stats.passes == budget)
      throw NonConvergence("perceptron exceeded its pass budget of " + std::to_string(budget));
    mistake = false;
    ++stats.passes;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& ex = s[i];
      ++stats.examples_scanned;
      if (ex.label * w.dot(ex.point) <= 0.0) {
        w += ex.label * ex.point;
        ++stats.updates;
        mistake = true;
      }
    }
  }
  return stats;
}

std::shared_ptr<Hypothesis> PerceptronERM::fit(const TrainingSequence& s, CostLedger& ledger) const {
  Eigen::VectorXd w;
  const PerceptronStats stats = fit_weights(s, w);
  ledger.arithmetic_ops += stats.examples_scanned;
  if (observer_) observer_(stats);
  return std::make_shared<HalfspaceHypothesis>(std::move(w));
}

std::size_t perceptron_update_count(const TrainingSequence& s, const PerceptronConfig& config) {
  Eigen::VectorXd w;
  return PerceptronERM(config).fit_weights(s, w).updates;
}

}  // namespace optpac

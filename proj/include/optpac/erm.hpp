#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "optpac/core.hpp"

namespace optpac {

/// Black-box empirical risk minimizer. train() returns a hypothesis consistent
/// with S whenever S is realizable by the oracle's class, and is a
/// deterministic function of S. Concurrent train() calls are independent.
class ErmOracle {
 public:
  virtual ~ErmOracle() = default;

  /// Charges erm_train_calls += 1 and erm_train_examples += |S|; concrete
  /// oracles add their inner-loop work to arithmetic_ops.
  /// Throws NotRealizable when no consistent hypothesis exists.
  HypothesisPtr train(const TrainingSequence& s, CostLedger& ledger) const;

  virtual std::string name() const = 0;

 protected:
  virtual std::shared_ptr<Hypothesis> fit(const TrainingSequence& s, CostLedger& ledger) const = 0;
};

// ---------------------------------------------------------------------------
// Thresholds on the real line: x ↦ orientation · sign(x − boundary). VC dim 1.

class ThresholdHypothesis final : public Hypothesis {
 public:
  ThresholdHypothesis(double boundary, Label orientation);

  Label predict(const Point& x) const override {
    return orientation_ * sign_label(x[0] - boundary_);
  }
  nlohmann::json describe() const override;

  double boundary() const noexcept { return boundary_; }
  Label orientation() const noexcept { return orientation_; }

 private:
  double boundary_;
  Label orientation_;
};

/// Picks the midpoint between the largest point on the negative side and the
/// smallest on the positive side, preferring orientation +1.
class ThresholdERM final : public ErmOracle {
 public:
  std::string name() const override { return "threshold"; }

 protected:
  std::shared_ptr<Hypothesis> fit(const TrainingSequence& s, CostLedger& ledger) const override;
};

// ---------------------------------------------------------------------------
// Explicit finite class over an indexed universe {0, ..., N-1}.

using LabelTable = std::vector<std::vector<Label>>;

class FiniteClassHypothesis final : public Hypothesis {
 public:
  FiniteClassHypothesis(std::shared_ptr<const LabelTable> table, std::size_t index);

  Label predict(const Point& x) const override;
  nlohmann::json describe() const override;

  std::size_t index() const noexcept { return index_; }

 private:
  std::shared_ptr<const LabelTable> table_;
  std::size_t index_;
};

/// Checks one projection at a time, in list order, and returns the first
/// hypothesis realizing the sample. Each scanned hypothesis costs |S| checks.
class FiniteClassERM final : public ErmOracle {
 public:
  explicit FiniteClassERM(LabelTable table);

  std::string name() const override { return "finite"; }
  std::size_t class_size() const noexcept { return table_->size(); }
  std::size_t universe_size() const noexcept { return table_->empty() ? 0 : table_->front().size(); }
  const std::shared_ptr<const LabelTable>& table() const noexcept { return table_; }

 protected:
  std::shared_ptr<Hypothesis> fit(const TrainingSequence& s, CostLedger& ledger) const override;

 private:
  std::shared_ptr<const LabelTable> table_;
};

// ---------------------------------------------------------------------------
// Perceptron over points whose last coordinate is the hard-coded bias 1.

class HalfspaceHypothesis final : public Hypothesis {
 public:
  explicit HalfspaceHypothesis(Eigen::VectorXd weights);

  Label predict(const Point& x) const override { return sign_label(weights_.dot(x)); }
  nlohmann::json describe() const override;

  const Eigen::VectorXd& weights() const noexcept { return weights_; }

 private:
  Eigen::VectorXd weights_;
};

struct PerceptronConfig {
  /// Margin floor used for the default pass budget 10·⌈M²/γ_floor²⌉.
  double gamma_floor = 1e-3;
  /// Explicit pass budget; overrides the derived one.
  std::optional<std::size_t> max_passes;
};

struct PerceptronStats {
  std::size_t sample_size = 0;
  std::size_t updates = 0;
  std::size_t passes = 0;
  std::size_t examples_scanned = 0;
};

class PerceptronERM final : public ErmOracle {
 public:
  using Observer = std::function<void(const PerceptronStats&)>;

  explicit PerceptronERM(PerceptronConfig config = {}, Observer observer = {});

  std::string name() const override { return "perceptron"; }

  /// Runs passes until one makes no mistake; w starts at 0 and is updated
  /// w ← w + y·x whenever y·⟨w,x⟩ <= 0. Throws NonConvergence past the budget.
  PerceptronStats fit_weights(const TrainingSequence& s, Eigen::VectorXd& w) const;

  std::size_t pass_budget(const TrainingSequence& s) const;

 protected:
  std::shared_ptr<Hypothesis> fit(const TrainingSequence& s, CostLedger& ledger) const override;

 private:
  PerceptronConfig config_;
  Observer observer_;
};

/// Exact number of weight updates the perceptron performs to convergence on s.
std::size_t perceptron_update_count(const TrainingSequence& s, const PerceptronConfig& config = {});

}  // namespace optpac

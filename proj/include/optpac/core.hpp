#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

#include "optpac/errors.hpp"

namespace optpac {

/// Binary label in {-1, +1}.
using Label = int;

/// Feature value. Concrete ERMs interpret it: a 1-vector holding a real for
/// thresholds, a universe index for finite classes, a real vector (last
/// coordinate fixed to 1) for the perceptron.
using Point = Eigen::VectorXd;

/// sign(0) resolves to this label everywhere a vote is turned into a prediction.
inline constexpr Label kTieLabel = +1;

constexpr Label sign_label(double v) noexcept { return v < 0 ? -1 : kTieLabel; }
constexpr Label sign_of_sum(std::int64_t v) noexcept { return v < 0 ? -1 : kTieLabel; }
constexpr bool is_label(int y) noexcept { return y == -1 || y == +1; }

struct LabeledExample {
  LabeledExample(Point x, Label y);

  Point point;
  Label label;
};

/// Counters for the unit-cost model. All fields only ever grow within a run;
/// a composite run's ledger is the sum of its parts.
struct CostLedger {
  std::uint64_t erm_train_calls = 0;
  std::uint64_t erm_train_examples = 0;
  std::uint64_t inference_calls = 0;
  std::uint64_t sampler_draws = 0;
  std::uint64_t arithmetic_ops = 0;

  CostLedger& operator+=(const CostLedger& other) noexcept;
  friend CostLedger operator+(CostLedger a, const CostLedger& b) noexcept { return a += b; }
  bool operator==(const CostLedger&) const = default;
};

void to_json(nlohmann::json& j, const CostLedger& ledger);
void from_json(const nlohmann::json& j, CostLedger& ledger);

/// Ordered multiset of labeled examples, stored as an index list over a shared
/// immutable backing store. Sub-sequences, rows and resamples are all views;
/// example payloads are never copied.
class TrainingSequence {
 public:
  using Store = std::vector<LabeledExample>;

  TrainingSequence() = default;
  explicit TrainingSequence(Store items);
  TrainingSequence(std::shared_ptr<const Store> store, std::vector<std::size_t> indices);

  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  /// 0-based position into this view.
  const LabeledExample& operator[](std::size_t i) const { return (*store_)[indices_[i]]; }
  std::size_t backing_index(std::size_t i) const { return indices_[i]; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  const std::shared_ptr<const Store>& store() const noexcept { return store_; }

  /// View of the given 0-based positions of this view (repetition allowed).
  TrainingSequence select(std::span<const std::size_t> positions) const;
  TrainingSequence slice(std::size_t first, std::size_t count) const;
  TrainingSequence prefix(std::size_t count) const { return slice(0, count); }

  /// S ⊔ T: order and multiplicity preserved.
  friend TrainingSequence concat(const TrainingSequence& s, const TrainingSequence& t);

 private:
  std::shared_ptr<const Store> store_;
  std::vector<std::size_t> indices_;
};

/// Predictor produced by an ERM. Calls through operator() are charged to a ledger.
class Hypothesis {
 public:
  virtual ~Hypothesis() = default;

  Label operator()(const Point& x, CostLedger& ledger) const {
    ++ledger.inference_calls;
    return predict(x);
  }

  /// Uncharged prediction.
  virtual Label predict(const Point& x) const = 0;

  /// Parameters sufficient to rebuild the hypothesis (see model_io.hpp).
  virtual nlohmann::json describe() const = 0;

  /// Number of examples the producing ERM call was given.
  std::size_t trained_on() const noexcept { return trained_on_; }

 private:
  friend class ErmOracle;
  std::size_t trained_on_ = 0;
};

using HypothesisPtr = std::shared_ptr<const Hypothesis>;

/// Uniform average of t >= 1 voters.
class MajorityVote {
 public:
  explicit MajorityVote(std::vector<HypothesisPtr> voters);

  std::size_t size() const noexcept { return voters_.size(); }
  const HypothesisPtr& voter(std::size_t i) const { return voters_[i]; }
  std::span<const HypothesisPtr> voters() const noexcept { return voters_; }

  /// Σ h_i(x), charging t inferences.
  std::int64_t vote_sum(const Point& x, CostLedger& ledger) const;
  Label predict(const Point& x, CostLedger& ledger) const { return sign_of_sum(vote_sum(x, ledger)); }

 private:
  std::vector<HypothesisPtr> voters_;
};

/// l >= 1 sampled voters; prediction is the sign of their sum.
class Ensemble {
 public:
  explicit Ensemble(std::vector<HypothesisPtr> voters);
  static Ensemble from_vote(const MajorityVote& vote);

  std::size_t size() const noexcept { return voters_.size(); }
  const HypothesisPtr& voter(std::size_t i) const { return voters_[i]; }
  std::span<const HypothesisPtr> voters() const noexcept { return voters_; }

 private:
  std::vector<HypothesisPtr> voters_;
};

Label predict_ensemble(const Ensemble& e, const Point& x, CostLedger& ledger);

/// y · (1/t) Σ h_i(x), in {(2a - t)/t : 0 <= a <= t}.
double vote_margin(const MajorityVote& vote, const LabeledExample& ex, CostLedger& ledger);

/// True when (agreement / t) <= theta, where agreement = Σ y h_i(x) is an
/// integer; evaluated without dividing so boundary cases are exact for dyadic theta.
constexpr bool margin_at_most(std::int64_t agreement, std::size_t t, double theta) noexcept {
  return static_cast<double>(agreement) <= theta * static_cast<double>(t);
}

/// Exact θ-margin loss: violations / total.
struct MarginLoss {
  std::size_t violations = 0;
  std::size_t total = 0;

  double value() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(violations) / static_cast<double>(total);
  }
  /// loss < 1/|S|; with an integer numerator this is the same as loss == 0.
  bool below_one_over_m() const noexcept { return violations < 1; }
  bool operator==(const MarginLoss&) const = default;
};

MarginLoss empirical_margin_loss(const MajorityVote& vote, const TrainingSequence& s,
                                 double theta, CostLedger& ledger);

}  // namespace optpac

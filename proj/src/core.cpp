#include "optpac/core.hpp"

#include <string>
#include <utility>

namespace optpac {

LabeledExample::LabeledExample(Point x, Label y) : point(std::move(x)), label(y) {
  if (!is_label(y)) throw BadParams("label must be -1 or +1, got " + std::to_string(y));
}

CostLedger& CostLedger::operator+=(const CostLedger& other) noexcept {
  erm_train_calls += other.erm_train_calls;
  erm_train_examples += other.erm_train_examples;
  inference_calls += other.inference_calls;
  sampler_draws += other.sampler_draws;
  arithmetic_ops += other.arithmetic_ops;
  return *this;
}

void to_json(nlohmann::json& j, const CostLedger& ledger) {
  j = nlohmann::json{{"erm_train_calls", ledger.erm_train_calls},
                     {"erm_train_examples", ledger.erm_train_examples},
                     {"inference_calls", ledger.inference_calls},
                     {"sampler_draws", ledger.sampler_draws},
                     {"arithmetic_ops", ledger.arithmetic_ops}};
}

void from_json(const nlohmann::json& j, CostLedger& ledger) {
  j.at("erm_train_calls").get_to(ledger.erm_train_calls);
  j.at("erm_train_examples").get_to(ledger.erm_train_examples);
  j.at("inference_calls").get_to(ledger.inference_calls);
  j.at("sampler_draws").get_to(ledger.sampler_draws);
  j.at("arithmetic_ops").get_to(ledger.arithmetic_ops);
}

TrainingSequence::TrainingSequence(Store items)
    : store_(std::make_shared<const Store>(std::move(items))) {
  indices_.resize(store_->size());
  for (std::size_t i = 0; i < indices_.size(); ++i) indices_[i] = i;
}

TrainingSequence::TrainingSequence(std::shared_ptr<const Store> store,
                                   std::vector<std::size_t> indices)
    : store_(std::move(store)), indices_(std::move(indices)) {
  if (!indices_.empty() && !store_) throw BadShape("view without a backing store");
  for (std::size_t idx : indices_)
    if (idx >= store_->size()) throw BadShape("view index outside backing store");
}

TrainingSequence TrainingSequence::select(std::span<const std::size_t> positions) const {
  std::vector<std::size_t> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= indices_.size()) throw BadShape("selected position outside view");
    out.push_back(indices_[p]);
  }
  TrainingSequence view;
  view.store_ = store_;
  view.indices_ = std::move(out);
  return view;
}

TrainingSequence TrainingSequence::slice(std::size_t first, std::size_t count) const {
  if (first > indices_.size() || count > indices_.size() - first)
    throw BadShape("slice outside view");
  TrainingSequence view;
  view.store_ = store_;
  view.indices_.assign(indices_.begin() + static_cast<std::ptrdiff_t>(first),
                       indices_.begin() + static_cast<std::ptrdiff_t>(first + count));
  return view;
}

TrainingSequence concat(const TrainingSequence& s, const TrainingSequence& t) {
  if (t.empty()) return s;
  if (s.empty()) return t;
  if (s.store_ == t.store_) {
    TrainingSequence out;
    out.store_ = s.store_;
    out.indices_.reserve(s.size() + t.size());
    out.indices_.insert(out.indices_.end(), s.indices_.begin(), s.indices_.end());
    out.indices_.insert(out.indices_.end(), t.indices_.begin(), t.indices_.end());
    return out;
  }
  // Different stores: fall back to a fresh store holding both payloads.
  TrainingSequence::Store items;
  items.reserve(s.size() + t.size());
  for (std::size_t i = 0; i < s.size(); ++i) items.push_back(s[i]);
  for (std::size_t i = 0; i < t.size(); ++i) items.push_back(t[i]);
  return TrainingSequence(std::move(items));
}

MajorityVote::MajorityVote(std::vector<HypothesisPtr> voters) : voters_(std::move(voters)) {
  if (voters_.empty()) throw BadParams("majority vote needs t >= 1 voters");
}

std::int64_t MajorityVote::vote_sum(const Point& x, CostLedger& ledger) const {
  std::int64_t sum = 0;
  for (const auto& h : voters_) sum += (*h)(x, ledger);
  return sum;
}

Ensemble::Ensemble(std::vector<HypothesisPtr> voters) : voters_(std::move(voters)) {
  if (voters_.empty()) throw BadParams("ensemble needs l >= 1 voters");
}

Ensemble Ensemble::from_vote(const MajorityVote& vote) {
  return Ensemble({vote.voters().begin(), vote.voters().end()});
}

Label predict_ensemble(const Ensemble& e, const Point& x, CostLedger& ledger) {
  std::int64_t sum = 0;
  for (const auto& h : e.voters()) sum += (*h)(x, ledger);
  return sign_of_sum(sum);
}

double vote_margin(const MajorityVote& vote, const LabeledExample& ex, CostLedger& ledger) {
  const std::int64_t agreement = ex.label * vote.vote_sum(ex.point, ledger);
  return static_cast<double>(agreement) / static_cast<double>(vote.size());
}

MarginLoss empirical_margin_loss(const MajorityVote& vote, const TrainingSequence& s,
                                 double theta, CostLedger& ledger) {
  if (!(theta > 0.0 && theta < 1.0)) throw BadParams("margin threshold must lie in (0,1)");
  MarginLoss loss{0, s.size()};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& ex = s[i];
    const std::int64_t agreement = ex.label * vote.vote_sum(ex.point, ledger);
    if (margin_at_most(agreement, vote.size(), theta)) ++loss.violations;
  }
  return loss;
}

}  // namespace optpac

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "optpac/erm.hpp"
#include "optpac/experiments.hpp"
#include "optpac/verify.hpp"

using namespace optpac;
using namespace optpac::testing;

namespace {

std::size_t training_errors(const Hypothesis& h, const TrainingSequence& s) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < s.size(); ++i) wrong += h.predict(s[i].point) != s[i].label;
  return wrong;
}

TrainingSequence index_sequence(const std::vector<std::pair<std::size_t, Label>>& items) {
  TrainingSequence::Store store;
  for (const auto& [i, y] : items) store.emplace_back(scalar(static_cast<double>(i)), y);
  return TrainingSequence(std::move(store));
}

TrainingSequence from_universe(const FiniteUniverse& u, const std::vector<std::size_t>& idx) {
  TrainingSequence::Store store;
  for (std::size_t i : idx) store.push_back(u.example(i));
  return TrainingSequence(std::move(store));
}

}  // namespace

TEST_CASE("threshold ERM separates two points") {
  const ThresholdERM erm;
  CostLedger ledger;
  const auto s = sequence({{0.1, -1}, {0.9, +1}});
  const auto h = erm.train(s, ledger);
  const auto& t = dynamic_cast<const ThresholdHypothesis&>(*h);
  CHECK(t.boundary() > 0.1);
  CHECK(t.boundary() < 0.9);
  CHECK(t.orientation() == +1);
  CHECK(training_errors(*h, s) == 0);
  CHECK(ledger.erm_train_calls == 1);
  CHECK(ledger.erm_train_examples == 2);
  CHECK(h->trained_on() == 2);
}

TEST_CASE("threshold ERM handles reversed orientation and single-label samples") {
  const ThresholdERM erm;
  CostLedger ledger;
  const auto rev = sequence({{0.2, +1}, {0.7, -1}, {0.4, +1}});
  CHECK(training_errors(*erm.train(rev, ledger), rev) == 0);
  const auto pos = sequence({{0.3, +1}, {0.6, +1}});
  CHECK(training_errors(*erm.train(pos, ledger), pos) == 0);
  const auto neg = sequence({{0.3, -1}});
  CHECK(training_errors(*erm.train(neg, ledger), neg) == 0);
  CHECK_THROWS_AS(erm.train(sequence({{0.1, +1}, {0.5, -1}, {0.9, +1}}), ledger), NotRealizable);
}

TEST_CASE("ERMs are consistent and deterministic on random realizable samples") {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ThresholdERM thr;
  LabelTable table;
  for (std::size_t b = 0; b <= 12; ++b) {
    std::vector<Label> row(12);
    for (std::size_t i = 0; i < 12; ++i) row[i] = i >= b ? +1 : -1;
    table.push_back(row);
  }
  const FiniteClassERM fin(table);

  for (int rep = 0; rep < 200; ++rep) {
    const double b = unit(gen);
    const Label o = unit(gen) < 0.5 ? -1 : +1;
    std::vector<std::pair<double, Label>> items;
    const int n = 1 + static_cast<int>(unit(gen) * 30);
    for (int i = 0; i < n; ++i) {
      const double x = unit(gen);
      items.push_back({x, o * (x >= b ? +1 : -1)});
    }
    const auto s = sequence(items);
    CostLedger ledger;
    const auto h1 = thr.train(s, ledger);
    const auto h2 = thr.train(s, ledger);
    CHECK(training_errors(*h1, s) == 0);
    for (double probe = 0.0; probe <= 1.0; probe += 0.01)
      CHECK(h1->predict(scalar(probe)) == h2->predict(scalar(probe)));

    const std::size_t cut = static_cast<std::size_t>(unit(gen) * 13);
    std::vector<std::pair<std::size_t, Label>> idx;
    for (int i = 0; i < n; ++i) {
      const auto x = static_cast<std::size_t>(unit(gen) * 12);
      idx.push_back({x, x >= cut ? +1 : -1});
    }
    const auto fs = index_sequence(idx);
    const auto g = fin.train(fs, ledger);
    CHECK(training_errors(*g, fs) == 0);
    CHECK(dynamic_cast<const FiniteClassHypothesis&>(*g).index() ==
          dynamic_cast<const FiniteClassHypothesis&>(*fin.train(fs, ledger)).index());
  }
}

TEST_CASE("finite class ERM returns the first consistent hypothesis") {
  const LabelTable table{{+1, +1, +1}, {-1, -1, -1}, {+1, -1, +1}};
  const FiniteClassERM erm(table);
  const auto s = index_sequence({{0, +1}, {1, -1}, {2, +1}, {1, -1}});
  CostLedger ledger;
  const auto h = erm.train(s, ledger);
  CHECK(dynamic_cast<const FiniteClassHypothesis&>(*h).index() == 2);
  CHECK(ledger.arithmetic_ops == 3 * s.size());
  CHECK_THROWS_AS(erm.train(index_sequence({{0, -1}, {2, -1}, {1, +1}}), ledger), NotRealizable);
}

TEST_CASE("finite class train cost grows with the scan position") {
  const std::vector<Label> target{+1, -1, +1, -1};
  const auto s = index_sequence({{0, +1}, {1, -1}, {2, +1}, {3, -1}});
  std::uint64_t last = 0;
  for (std::size_t pos = 0; pos < 6; ++pos) {
    LabelTable table(6, std::vector<Label>{-1, -1, -1, +1});
    table[pos] = target;
    CostLedger ledger;
    FiniteClassERM(table).train(s, ledger);
    CHECK(ledger.arithmetic_ops >= last);
    CHECK(ledger.arithmetic_ops == (pos + 1) * s.size());
    last = ledger.arithmetic_ops;
  }
}

TEST_CASE("perceptron on one point makes exactly one update") {
  TrainingSequence::Store store;
  store.emplace_back(Eigen::Vector3d(0.2, 0.5, 1.0), -1);
  CHECK(perceptron_update_count(TrainingSequence(std::move(store))) == 1);
}

TEST_CASE("perceptron respects the Novikoff cap on separable samples") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Vector3d w(normal(gen), normal(gen), normal(gen));
    w.normalize();
    TrainingSequence::Store store;
    double margin = std::numeric_limits<double>::infinity();
    double max_sq = 0.0;
    while (store.size() < 40) {
      const Eigen::Vector3d x(normal(gen), normal(gen), 1.0);
      const double g = w.dot(x);
      if (std::abs(g) < 0.05) continue;
      margin = std::min(margin, std::abs(g));
      max_sq = std::max(max_sq, x.squaredNorm());
      store.emplace_back(x, g > 0 ? +1 : -1);
    }
    const TrainingSequence s(std::move(store));
    const PerceptronERM erm;
    CostLedger ledger;
    Eigen::VectorXd weights;
    const auto stats = erm.fit_weights(s, weights);
    CHECK(stats.updates <= static_cast<std::size_t>(std::ceil(max_sq / (margin * margin))));
    CHECK(training_errors(*erm.train(s, ledger), s) == 0);
    CHECK(stats.examples_scanned == stats.passes * s.size());
  }
}

TEST_CASE("perceptron on the adversarial universe") {
  const std::size_t m = 300;
  const FiniteUniverse u = build_adversarial_universe(m);
  const std::size_t special = m - 1;

  SUBCASE("two points converge within the Novikoff cap") {
    const auto s = from_universe(u, {0, special});
    const double gamma = std::sqrt(1.0 / (64.0 * static_cast<double>(m)));
    CHECK(perceptron_update_count(s) <= static_cast<std::size_t>(std::ceil(4.0 / (gamma * gamma))));
  }
  SUBCASE("negative first example and one positive copy force many updates") {
    std::vector<std::size_t> idx{3, special};
    for (std::size_t i = 0; i < 12; ++i) idx.push_back(10 + 17 * i);
    CHECK(perceptron_update_count(from_universe(u, idx)) >= 4 * m - 4);
  }
}

TEST_CASE("perceptron rejects inputs without a bias and stops at its budget") {
  TrainingSequence::Store bad;
  bad.emplace_back(Eigen::Vector3d(0.2, 0.5, 0.0), -1);
  CHECK_THROWS_AS(perceptron_update_count(TrainingSequence(std::move(bad))), BadParams);

  TrainingSequence::Store clash;
  clash.emplace_back(Eigen::Vector2d(0.5, 1.0), +1);
  clash.emplace_back(Eigen::Vector2d(0.5, 1.0), -1);
  PerceptronConfig cfg;
  cfg.max_passes = 5;
  CHECK_THROWS_AS(perceptron_update_count(TrainingSequence(std::move(clash)), cfg), NonConvergence);
}

TEST_CASE("erm invariant suite") {
  const auto r = run_suite("erm");
  for (const auto& f : r.failures) FAIL_CHECK(f);
  CHECK(r.checks > 0);
}

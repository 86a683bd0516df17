#include "optpac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "optpac/analysis.hpp"
#include "optpac/boost.hpp"
#include "optpac/experiments.hpp"
#include "optpac/learner.hpp"
#include "optpac/rng.hpp"
#include "optpac/subsample.hpp"

namespace optpac {

namespace {

class Checker {
 public:
  explicit Checker(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++result_.checks;
    if (!ok) result_.failures.push_back(what);
  }

  template <class Ex, class Fn>
  void expect_throw(Fn&& fn, const std::string& what) {
    bool thrown = false;
    try {
      fn();
    } catch (const Ex&) {
      thrown = true;
    } catch (...) {
    }
    check(thrown, what);
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

Point scalar(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

TrainingSequence line_sample(const std::vector<double>& xs, double boundary, Label orientation) {
  TrainingSequence::Store items;
  for (double x : xs) items.emplace_back(scalar(x), orientation * sign_label(x - boundary));
  return TrainingSequence(std::move(items));
}

TrainingSequence indexed(std::size_t m) {
  TrainingSequence::Store items;
  for (std::size_t i = 0; i < m; ++i) items.emplace_back(scalar(static_cast<double>(i + 1)), +1);
  return TrainingSequence(std::move(items));
}

std::vector<std::size_t> backing(const TrainingSequence& s) {
  return {s.indices().begin(), s.indices().end()};
}

/// Wraps an ERM and returns the opposite of its hypothesis on every call
/// whose 1-based index is selected by `flip`.
class FlippingOracle final : public ErmOracle {
 public:
  FlippingOracle(const ErmOracle& inner, std::function<bool(std::size_t)> flip)
      : inner_(inner), flip_(std::move(flip)) {}

  std::string name() const override { return "flipping"; }

 protected:
  std::shared_ptr<Hypothesis> fit(const TrainingSequence& s, CostLedger& ledger) const override {
    CostLedger scratch;
    const auto h = std::dynamic_pointer_cast<const ThresholdHypothesis>(inner_.train(s, scratch));
    ledger.arithmetic_ops += scratch.arithmetic_ops;
    const Label o = flip_(++calls_) ? -h->orientation() : h->orientation();
    return std::make_shared<ThresholdHypothesis>(h->boundary(), o);
  }

 private:
  const ErmOracle& inner_;
  std::function<bool(std::size_t)> flip_;
  mutable std::size_t calls_ = 0;
};

// --- core -------------------------------------------------------------------

SuiteResult suite_core(std::uint64_t seed) {
  Checker c("core");
  Rng rng = make_rng(seed, {1});

  c.expect_throw<BadParams>([] { LabeledExample(scalar(0.0), 0); }, "label 0 rejected");
  c.expect_throw<BadParams>([] { MajorityVote({}); }, "empty majority vote rejected");
  c.expect_throw<BadParams>([] { Ensemble({}); }, "empty ensemble rejected");

  const TrainingSequence s = indexed(10);
  const TrainingSequence a = s.slice(2, 3);
  const TrainingSequence b = s.slice(7, 2);
  const TrainingSequence ab = concat(a, b);
  c.check(backing(ab) == std::vector<std::size_t>{2, 3, 4, 7, 8}, "concat keeps order");
  const std::vector<std::size_t> pos{0, 0, 4};
  c.check(backing(ab.select(pos)) == std::vector<std::size_t>{2, 2, 8}, "select keeps repetition");
  c.expect_throw<BadShape>([&] { s.slice(8, 3); }, "slice past end rejected");

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t t = uniform_int(rng, 1, 40);
    std::vector<HypothesisPtr> voters;
    for (std::size_t i = 0; i < t; ++i)
      voters.push_back(std::make_shared<ThresholdHypothesis>(uniform_unit(rng),
                                                             uniform_int(rng, 0, 1) ? 1 : -1));
    const MajorityVote vote(voters);
    const LabeledExample ex(scalar(uniform_unit(rng)), uniform_int(rng, 0, 1) ? 1 : -1);
    CostLedger ledger;
    const double margin = vote_margin(vote, ex, ledger);
    c.check(ledger.inference_calls == t, "vote charges t inferences");
    const double a_count = (margin * static_cast<double>(t) + static_cast<double>(t)) / 2.0;
    c.check(std::abs(a_count - std::round(a_count)) < 1e-9, "margin lies on the (2a - t)/t grid");
    for (double theta : {0.25, 0.5, 0.75}) {
      const auto agreement = static_cast<std::int64_t>(std::llround(margin * static_cast<double>(t)));
      c.check(margin_at_most(agreement, t, theta) == (margin <= theta), "margin_at_most matches division");
    }
  }

  CostLedger x{1, 2, 3, 4, 5}, y{10, 20, 30, 40, 50}, z{7, 7, 7, 7, 7};
  c.check((x + y) + z == x + (y + z), "ledger addition associative");
  return c.take();
}

// --- erm --------------------------------------------------------------------

SuiteResult suite_erm(std::uint64_t seed) {
  Checker c("erm");
  Rng rng = make_rng(seed, {2});
  const ThresholdERM erm;

  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_int(rng, 1, 60);
    const double b = uniform_unit(rng);
    const Label o = uniform_int(rng, 0, 1) ? 1 : -1;
    std::vector<double> xs(n);
    for (auto& x : xs) x = uniform_unit(rng);
    const TrainingSequence s = line_sample(xs, b, o);
    CostLedger ledger;
    const auto h = erm.train(s, ledger);
    bool consistent = true;
    for (std::size_t i = 0; i < s.size(); ++i) consistent = consistent && h->predict(s[i].point) == s[i].label;
    c.check(consistent, "threshold ERM consistent on realizable sample");
    c.check(ledger.erm_train_calls == 1 && ledger.erm_train_examples == n, "threshold ERM ledger");
    c.check(h->trained_on() == n, "hypothesis records its training size");
  }
  {
    TrainingSequence::Store items;
    items.emplace_back(scalar(0.2), 1);
    items.emplace_back(scalar(0.5), -1);
    items.emplace_back(scalar(0.8), 1);
    CostLedger ledger;
    c.expect_throw<NotRealizable>([&] { erm.train(TrainingSequence(std::move(items)), ledger); },
                                  "threshold ERM rejects +,-,+");
  }

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t universe = uniform_int(rng, 2, 12);
    const std::size_t classes = uniform_int(rng, 1, 20);
    LabelTable table(classes, std::vector<Label>(universe));
    for (auto& row : table)
      for (auto& y : row) y = uniform_int(rng, 0, 1) ? 1 : -1;
    const std::size_t target = uniform_int(rng, 0, classes - 1);
    TrainingSequence::Store items;
    const std::size_t n = uniform_int(rng, 1, 15);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = uniform_int(rng, 0, universe - 1);
      items.emplace_back(scalar(static_cast<double>(idx)), table[target][idx]);
    }
    const TrainingSequence s(std::move(items));
    const FiniteClassERM ferm(table);
    CostLedger ledger;
    const auto h = std::dynamic_pointer_cast<const FiniteClassHypothesis>(ferm.train(s, ledger));
    bool consistent = true;
    for (std::size_t i = 0; i < s.size(); ++i) consistent = consistent && h->predict(s[i].point) == s[i].label;
    c.check(consistent && h->index() <= target, "finite ERM returns a consistent hypothesis no later than the target");
    c.check(ledger.arithmetic_ops == (h->index() + 1) * n, "finite ERM scans |S| labels per hypothesis");
  }

  for (int trial = 0; trial < 40; ++trial) {
    Eigen::Vector3d w_star(uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5, uniform_unit(rng) - 0.5);
    w_star.normalize();
    TrainingSequence::Store items;
    double r2 = 0.0, gamma = std::numeric_limits<double>::infinity();
    while (items.size() < 40) {
      const Eigen::Vector3d x(2.0 * uniform_unit(rng) - 1.0, 2.0 * uniform_unit(rng) - 1.0, 1.0);
      const double v = w_star.dot(x);
      if (std::abs(v) < 0.05) continue;
      items.emplace_back(x, v > 0 ? 1 : -1);
      r2 = std::max(r2, x.squaredNorm());
      gamma = std::min(gamma, std::abs(v));
    }
    const TrainingSequence s(std::move(items));
    std::size_t updates = 0;
    const PerceptronERM perc({}, [&](const PerceptronStats& st) { updates = st.updates; });
    CostLedger ledger;
    const auto h = perc.train(s, ledger);
    bool consistent = true;
    for (std::size_t i = 0; i < s.size(); ++i) consistent = consistent && h->predict(s[i].point) == s[i].label;
    c.check(consistent, "perceptron converges to a consistent separator");
    c.check(static_cast<double>(updates) <= r2 / (gamma * gamma) + 1e-9, "perceptron within the Novikoff bound");
  }
  {
    TrainingSequence::Store items;
    items.emplace_back(Eigen::Vector2d(0.0, 1.0), 1);
    items.emplace_back(Eigen::Vector2d(0.0, 1.0), -1);
    const PerceptronERM perc(PerceptronConfig{1e-3, 50});
    CostLedger ledger;
    c.expect_throw<NonConvergence>([&] { perc.train(TrainingSequence(std::move(items)), ledger); },
                                   "perceptron reports non-convergence");
  }
  return c.take();
}

// --- subsample --------------------------------------------------------------

SuiteResult suite_subsample(std::uint64_t seed) {
  Checker c("subsample");
  Rng rng = make_rng(seed, {3});

  for (unsigned k = 1; k <= 3; ++k) {
    const TrainingSequence s = indexed(ipow(6, k));
    const auto rows = enumerate_rows_recursive(s);
    c.check(rows.size() == row_count(k), "5^k recursive rows");
    std::vector<std::vector<std::size_t>> a, b;
    bool in_order = true;
    for (std::uint64_t rank = 0; rank < row_count(k); ++rank) {
      const auto row = backing(extract_row(s, selector_from_rank(k, rank)));
      c.check(row.size() == row_size(k), "row size (6^k + 4)/5");
      in_order = in_order && row == backing(rows[rank]);
      a.push_back(row);
      b.push_back(backing(rows[rank]));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    c.check(a == b, "extracted rows equal the recursive rows as a multiset");
    c.check(in_order, "rank order matches recursion order");
    c.check(std::adjacent_find(a.begin(), a.end()) == a.end(), "selector map injective");
  }

  for (int trial = 0; trial < 200; ++trial) {
    const auto k = static_cast<unsigned>(uniform_int(rng, 1, 9));
    RowSelector w;
    for (unsigned j = 0; j < k; ++j) w.digits.push_back(static_cast<int>(uniform_int(rng, 1, 5)));
    const RowRanges rr = row_ranges(k, w);
    std::vector<IndexRange> all{rr.prefix};
    all.insert(all.end(), rr.ranges.begin(), rr.ranges.end());
    std::sort(all.begin(), all.end(), [](const IndexRange& x, const IndexRange& y) { return x.first < y.first; });
    bool disjoint = true;
    for (std::size_t i = 1; i < all.size(); ++i) disjoint = disjoint && all[i - 1].last < all[i].first;
    c.check(disjoint, "row ranges disjoint");
    c.check(rr.total_size() == row_size(k), "ranges cover (6^k + 4)/5 indices");
    c.check(rank_of(selector_from_rank(k, rank_of(w))) == rank_of(w), "rank round trip");
  }

  const TrainingSequence s6 = indexed(6);
  c.check(backing(extract_row(s6, {{3}})) == std::vector<std::size_t>{0, 3}, "k=1, w=(3) gives S[1], S[4]");
  const RowRanges r11 = row_ranges(2, {{1, 1}});
  c.check(r11.ranges[0] == IndexRange{7, 12} && r11.ranges[1] == IndexRange{2, 2}, "k=2, w=(1,1) ranges");
  c.expect_throw<BadShape>([&] { extract_row(indexed(35), {{1, 1}}); }, "non power of 6 rejected");
  c.expect_throw<BadShape>([&] { row_ranges(1, {{6}}); }, "digit 6 rejected");

  const auto h4 = enumerate_rows_hanneke(indexed(4));
  c.check(h4.size() == 3 && h4[0].size() == 3 && h4[2].size() == 3, "four examples give 3 rows of 3");
  c.check(enumerate_rows_hanneke(indexed(16)).size() == 9, "16 examples give 9 rows");
  c.check(enumerate_rows_hanneke(indexed(3)).size() == 1, "base case single row");
  return c.take();
}

// --- boost ------------------------------------------------------------------

SuiteResult suite_boost(std::uint64_t seed) {
  Checker c("boost");
  Rng rng = make_rng(seed, {4});

  for (std::size_t m : {2u, 7u, 64u, 1000u}) {
    for (int trial = 0; trial < 2500; ++trial) {
      WeightState w;
      w.D.resize(static_cast<Eigen::Index>(m));
      for (Eigen::Index i = 0; i < w.D.size(); ++i) w.D[i] = uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform_unit(rng);
      if (w.D.sum() == 0.0) w.D[0] = 1.0;
      w.D /= w.D.sum();
      w.rebuild_cumulative();
      const double u = uniform_unit(rng);
      std::size_t linear = m;
      for (std::size_t l = 1; l <= m; ++l) {
        const double lo = l == 1 ? 0.0 : w.C[static_cast<Eigen::Index>(l - 2)];
        if (lo <= u && u < w.C[static_cast<Eigen::Index>(l - 1)]) {
          linear = l;
          break;
        }
      }
      c.check(inverse_cdf(w.C, u) == linear, "inverse_cdf equals linear scan");
    }
  }
  {
    Eigen::VectorXd C(4);
    C << 0.25, 0.5, 0.75, 1.0;
    c.check(inverse_cdf(C, 0.6) == 3 && inverse_cdf(C, 0.0) == 1, "inverse_cdf bucket examples");
  }

  c.check(std::abs(boost_alpha(0.75, 0.45) - 0.5 * std::log(19.0 / 7.0)) < 1e-12, "alpha at defaults");
  c.check(per_round_bound_base(0.75, 0.45) <= 0.96 + 1e-12, "per-round base at most 24/25");
  c.check(margin_loss_bound(0.75, 0.45, 0) == 1.0, "empty product is 1");
  c.expect_throw<BadParams>([] { boost_alpha(0.9, 0.45); }, "theta >= 2 gamma rejected");

  const FiniteUniverse u = build_threshold_universe(4096);
  const ThresholdERM erm;
  for (std::uint64_t run = 0; run < 4; ++run) {
    const TrainingSequence s = sample_dataset(u, 36, derive_seed(seed, {4, run}));
    BoostConfig cfg;
    cfg.stop_at_t = true;
    cfg.record_trajectory = true;
    const BoostPlan plan = plan_boost(cfg, 36, 36, 0.1, 1);
    const RandomString r(derive_seed(seed, {5, run}), plan.n, plan.s);
    const BoostResult res = adaboost_sample(s, r, erm, plan);
    CostLedger scratch;
    c.check(res.branch == BoostBranch::Certified, "threshold run certifies");
    c.check(res.vote.size() == plan.t, "vote has exactly t voters");
    c.check(empirical_margin_loss(res.vote, s, 0.75, scratch).violations == 0, "certified margin loss is 0");
    bool traj = true;
    for (const auto& p : res.trajectory) traj = traj && loss_within_power(p.violations, p.total, p.accepted);
    c.check(traj && res.trajectory.size() == plan.t, "trajectory within (24/25)^j");
    c.check(res.ledger.erm_train_examples == res.sampled_calls * plan.s, "every round trains on s examples");

    double lhs = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double agree = static_cast<double>(s[i].label * res.vote.vote_sum(s[i].point, scratch));
      lhs += std::exp(-plan.alpha * agree) / static_cast<double>(s.size());
    }
    double rhs = 1.0;
    for (double z : res.z_accepted) rhs *= z;
    c.check(std::abs(lhs - rhs) <= 1e-9 * rhs, "weight-product identity");
  }

  {
    const TrainingSequence s = sample_dataset(u, 36, derive_seed(seed, {6}));
    const FlippingOracle flaky(erm, [](std::size_t call) { return call % 3 == 0; });
    BoostConfig cfg;
    cfg.stop_at_t = true;
    const BoostPlan plan = plan_boost(cfg, 36, 36, 0.1, 1);
    const RandomString r(derive_seed(seed, {7}), plan.n, plan.s);
    Eigen::VectorXd previous = WeightState::uniform(36).D;
    bool untouched = true;
    std::size_t skipped = 0;
    adaboost_sample(s, r, flaky, plan, [&](const RoundInfo& info) {
      if (!info.accepted) {
        ++skipped;
        untouched = untouched && info.weights.D.size() == previous.size() &&
                    std::equal(previous.data(), previous.data() + previous.size(), info.weights.D.data());
      }
      previous = info.weights.D;
    });
    c.check(skipped > 0 && untouched, "skipped rounds leave D bitwise unchanged");

    const FlippingOracle hostile(erm, [](std::size_t) { return true; });
    BoostPlan small = plan;
    small.n = 20;
    small.t = 5;
    const RandomString r2(derive_seed(seed, {8}), small.n, small.s);
    const BoostResult res = adaboost_sample(s, r2, hostile, small);
    c.check(res.branch == BoostBranch::Fallback && res.accepted_rounds == 0 && res.vote.size() == 5,
            "no accepted round falls back to t copies of ERM(S)");
    c.expect_throw<StreamExhausted>([&] { adaboost_sample(s, RandomString(1, 3, small.s), erm, small); },
                                    "short random string rejected");
  }

  const RandomString r(99, 3, 4);
  c.check(r.entry(2, 3) == RandomString(99, 3, 4).entry(2, 3), "random string reproducible");
  c.expect_throw<StreamExhausted>([&] { r.entry(3, 0); }, "random string bounds");
  return c.take();
}

// --- learner ----------------------------------------------------------------

SuiteResult suite_learner(std::uint64_t seed) {
  Checker c("learner");
  const FiniteUniverse u = build_threshold_universe(4096);
  const ThresholdERM erm;
  const TrainingSequence s = sample_dataset(u, 216, derive_seed(seed, {9}));

  LearnerConfig cfg;
  cfg.seed = seed;
  cfg.boost.scale = ScaleProfile::desk();
  cfg.voters_l = 200;
  cfg.jobs = 1;
  const TrainReport a = train_optimal(s, erm, cfg);
  const TrainReport b = train_optimal(s, erm, cfg);
  LearnerConfig nocache = cfg;
  nocache.cache_rows = false;
  const TrainReport n = train_optimal(s, erm, nocache);

  bool same = true, same_nocache = true;
  for (int i = 0; i < 100; ++i) {
    const Point x = scalar((i + 0.37) / 100.0);
    CostLedger l1, l2, l3;
    const Label pa = predict_ensemble(a.ensemble, x, l1);
    same = same && pa == predict_ensemble(b.ensemble, x, l2);
    same_nocache = same_nocache && pa == predict_ensemble(n.ensemble, x, l3);
    c.check(l1.inference_calls == a.ensemble.size(), "prediction performs exactly l inferences");
  }
  c.check(same, "same seed gives identical predictions");
  c.check(same_nocache, "row cache does not change predictions");
  c.check(a.ensemble.size() == 200, "ensemble has l voters");
  c.check(a.ledger.erm_train_calls <= 200 * a.plan->n, "train calls at most l*n");
  c.check(a.ledger.erm_train_examples == a.sampled_calls * a.plan->s + a.fallback_examples,
          "every sampled call sees exactly s examples");
  c.check(a.cache_hits + a.boost_runs == 200 && n.cache_hits == 0, "cache accounting");

  LearnerConfig wide = cfg;
  wide.voters_l = 10000;
  wide.boost.target_t = 1;
  wide.boost.rounds = 1;
  const TrainReport uni = train_optimal(s.prefix(36), erm, wide);
  std::vector<double> counts(25, 0.0);
  for (const auto& d : uni.draws) counts[d.rank] += 1.0;
  double chi2 = 0.0;
  for (double k : counts) chi2 += (k - 400.0) * (k - 400.0) / 400.0;
  c.check(chi2 < 51.18, "row draws uniform over 25 rows (chi-square, p > 0.001)");

  c.check(default_voters(1296, 0.1, 1) == 2943, "voter count at m = 1296");
  c.check(default_bagging_rounds(100, 0.1) == 137, "bagging rounds at m = 100");
  const TrainReport h = train_hanneke(s.prefix(16), erm);
  c.check(h.ensemble.size() == 9 && h.ledger.erm_train_calls == 9, "Hanneke at m = 16 trains 9 voters");
  const TrainReport bag = train_bagging(s.prefix(100), erm, 0.1, 1.0, seed);
  c.check(bag.ensemble.size() == 137 && bag.ledger.erm_train_examples == 137 * 100, "bagging at m = 100");
  const TrainReport plain = train_plain_erm(s, erm);
  c.check(plain.ledger.erm_train_calls == 1 && plain.ledger.erm_train_examples == s.size(), "plain ERM ledger");
  return c.take();
}

// --- analysis ---------------------------------------------------------------

SuiteResult suite_analysis(std::uint64_t seed) {
  Checker c("analysis");
  Rng rng = make_rng(seed, {10});

  for (std::size_t d = 1; d <= 20; ++d)
    c.check(uniform_convergence_bound(d, 550 * d, std::ldexp(1.0, -static_cast<int>(d))) <= 0.05,
            "uniform convergence at m = 550d, delta = 2^-d");
  c.check(std::abs(uniform_convergence_bound(1, 100, 0.05) - 0.288169586511021) < 1e-12, "uc example");
  for (std::size_t m = 1; m < (1u << 20); m *= 2) {
    c.check(uniform_convergence_bound(1, 2 * m, 0.1) < uniform_convergence_bound(1, m, 0.1), "uc decreasing in m");
    c.check(uniform_convergence_bound(1, m, 0.01) > uniform_convergence_bound(1, m, 0.1), "uc decreasing in delta");
  }
  const RampSlack r1 = ramp_generalization_bound(1, 1000, 0.1, 0.5, 1.5, 1.0);
  const RampSlack r4 = ramp_generalization_bound(1, 4000, 0.1, 0.5, 1.5, 1.0);
  c.check(std::abs(r1.complexity - std::sqrt(32.0 / 1000.0)) < 1e-12, "ramp complexity term");
  c.check(std::abs(r1.confidence - std::sqrt(2.0 * std::log(20.0) / 1000.0)) < 1e-12, "ramp confidence term");
  c.check(std::abs(r4.complexity - r1.complexity / 2) < 1e-12 && std::abs(r4.confidence - r1.confidence / 2) < 1e-12,
          "ramp slack halves at 4m");

  const FiniteUniverse u = build_threshold_universe(512);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<HypothesisPtr> voters;
    const std::size_t l = uniform_int(rng, 1, 30);
    for (std::size_t i = 0; i < l; ++i) {
      // include boundaries exactly on grid points
      const double b = uniform_int(rng, 0, 1) ? u.points[uniform_int(rng, 0, 511)][0] : uniform_unit(rng);
      voters.push_back(std::make_shared<ThresholdHypothesis>(b, uniform_int(rng, 0, 3) ? 1 : -1));
    }
    const Ensemble e(voters);
    c.check(ensemble_vote_sums(e, u) == ensemble_vote_sums_naive(e, u), "threshold sweep equals voter loop");
    CostLedger ledger;
    const double direct = exact_error(u, [&](const Point& x) { return predict_ensemble(e, x, ledger); });
    c.check(std::abs(exact_error(e, u) - direct) < 1e-12, "ensemble exact error");
  }

  const ThresholdHypothesis h(0.3, 1);
  const auto pred = [&](const Point& x) { return h.predict(x); };
  c.check(exact_error(u, [](const Point& x) { return x[0] >= 0.5 ? 1 : -1; }) == 0.0,
          "concept has zero error");
  FiniteUniverse v = u;
  for (Eigen::Index i = 0; i < v.probs.size(); ++i) v.probs[i] = (i % 2 ? 3.0 : 1.0);
  v.probs /= v.probs.sum();
  FiniteUniverse mix = u;
  mix.probs = 0.3 * u.probs + 0.7 * v.probs;
  c.check(std::abs(exact_error(mix, pred) - (0.3 * exact_error(u, pred) + 0.7 * exact_error(v, pred))) < 1e-12,
          "exact error linear in the distribution");
  const double exact = exact_error(u, pred);
  const double mc = monte_carlo_error(u, pred, 100000, seed);
  c.check(std::abs(mc - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / 100000.0), "Monte Carlo within 3 sigma");

  const FiniteUniverse pos = build_constant_universe(64, +1);
  const TrainingSequence s = sample_dataset(pos, 36, seed);
  BoostConfig cfg;
  cfg.scale = ScaleProfile::desk();
  const BoostPlan plan = plan_boost(cfg, 36, row_size(2), 0.1, 1);
  const ThresholdERM erm;
  const MajorityFailure f =
      exact_majority_of_majorities_failure(s, RandomString(seed, plan.n, plan.s), erm, plan, pos);
  c.check(f.mass == 0.0 && f.rows == 25, "perfect rows give zero failure mass");
  return c.take();
}

// --- experiments ------------------------------------------------------------

SuiteResult suite_experiments(std::uint64_t seed) {
  Checker c("experiments");
  Rng rng = make_rng(seed, {11});

  for (std::size_t m : {300u, 2200u}) {
    const FiniteUniverse u = build_adversarial_universe(m);
    const double mm = static_cast<double>(m);
    c.check(std::abs(u.probs.sum() - 1.0) < 1e-12, "adversarial probabilities sum to 1");
    c.check(u.probs[static_cast<Eigen::Index>(m - 1)] == 250.0 / mm, "P(x_m) = 250/m");
    const Eigen::Vector3d witness(1.0, -std::sqrt(1.0 / (2.0 * mm)), 0.0);
    c.check(separation_margin(u, witness) >= std::sqrt(1.0 / (64.0 * mm)), "witness margin");
    double max_sq = 0.0;
    for (const auto& x : u.points) max_sq = std::max(max_sq, x.squaredNorm());
    c.check(max_sq <= 4.0, "norms at most 2");
    const Point& xm = u.points[m - 1];
    bool inner = true;
    for (std::size_t i = 1; i < m; ++i)
      inner = inner && std::abs(u.points[i - 1].dot(xm) - (2.0 - static_cast<double>(i) / (mm * mm * mm * mm))) < 1e-12;
    c.check(inner, "<x_i, x_m> = 2 - i/m^4");

    for (std::size_t t : {std::size_t{1}, m, 2 * m - 2}) {
      Eigen::Vector3d even = static_cast<double>(t) * xm;
      for (std::size_t q = 0; q < t; ++q) even -= u.points[uniform_int(rng, 0, m - 2)];
      Eigen::Vector3d odd = even - u.points[uniform_int(rng, 0, m - 2)];
      bool even_pattern = even.dot(xm) > 0.0, odd_pattern = odd.dot(xm) < 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        even_pattern = even_pattern && even.dot(u.points[i]) >= 0.0;
        odd_pattern = odd_pattern && odd.dot(u.points[i]) < 0.0;
      }
      c.check(even_pattern, "balanced weight misclassifies every negative point");
      c.check(odd_pattern, "one extra negative point flips every prediction");
    }
  }
  c.expect_throw<BadParams>([] { build_adversarial_universe(5); }, "adversarial m lower limit");
  c.expect_throw<BadParams>([] { build_adversarial_universe(20000); }, "adversarial m upper limit");

  const FiniteUniverse adv = build_adversarial_universe(2200);
  std::size_t within = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto idx = sample_indices(adv, 2200, derive_seed(seed, {12, k}));
    const auto copies = static_cast<double>(std::count(idx.begin(), idx.end(), std::size_t{2199}));
    within += std::abs(copies - 250.0) <= 3.0 * std::sqrt(250.0);
  }
  c.check(within == 30, "x_m count within 3 sqrt(250) of 250");
  c.check(sample_indices(adv, 100, 1) != sample_indices(adv, 100, 2), "different seeds differ");

  FiniteUniverse point;
  point.points = {scalar(0.5)};
  point.probs = Eigen::VectorXd::Ones(1);
  point.target = {1};
  const TrainingSequence same = sample_dataset(point, 10, seed);
  bool all_same = same.size() == 10;
  for (std::size_t i = 0; i < same.size(); ++i) all_same = all_same && same[i].point[0] == 0.5;
  c.check(all_same, "point mass gives copies of the point");

  SweepSpec spec;
  spec.distribution = "constant";
  spec.universe_size = 256;
  spec.m_values = {36};
  spec.seeds = {1, 2};
  spec.learners = {"optimal", "bagging", "erm"};
  spec.jobs = 1;
  const auto rows = run_error_sweep(spec);
  bool zero = rows.size() == 6;
  for (const auto& r : rows) zero = zero && r.error == 0.0;
  c.check(zero, "all-positive universe gives zero error for every learner");
  c.check(rows == run_error_sweep(spec), "sweep rows reproducible");
  std::ostringstream a, b;
  write_sweep_csv(a, rows);
  write_sweep_csv(b, run_error_sweep(spec));
  c.check(a.str() == b.str(), "sweep CSV byte-identical");
  spec.learners = {"optimal"};
  spec.m_values = {200};
  c.expect_throw<BadParams>([&] { spec.validate(); }, "optimal learner needs 6^k");
  return c.take();
}

using SuiteFn = SuiteResult (*)(std::uint64_t);

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r{
      {"core", suite_core},         {"erm", suite_erm},           {"subsample", suite_subsample},
      {"boost", suite_boost},       {"learner", suite_learner},   {"analysis", suite_analysis},
      {"experiments", suite_experiments}};
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"core",    "erm",      "subsample",  "boost",
                                              "learner", "analysis", "experiments"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw BadParams("unknown suite '" + name + "'");
  try {
    return it->second(seed);
  } catch (const std::exception& e) {
    SuiteResult r;
    r.name = name;
    r.failures.push_back(std::string("uncaught exception: ") + e.what());
    return r;
  }
}

std::vector<SuiteResult> run_verify(const std::vector<std::string>& only, std::uint64_t seed) {
  for (const auto& n : only)
    if (!registry().count(n)) throw BadParams("unknown suite '" + n + "'");
  std::vector<SuiteResult> out;
  for (const auto& n : suite_names())
    if (only.empty() || std::find(only.begin(), only.end(), n) != only.end()) out.push_back(run_suite(n, seed));
  return out;
}

}  // namespace optpac

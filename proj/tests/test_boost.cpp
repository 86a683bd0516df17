#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "optpac/boost.hpp"
#include "optpac/experiments.hpp"
#include "optpac/verify.hpp"

using namespace optpac;
using namespace optpac::testing;

namespace {

// Always returns the constant -1 hypothesis.
class NegativeOracle final : public ErmOracle {
 public:
  std::string name() const override { return "negative"; }

 protected:
  std::shared_ptr<Hypothesis> fit(const TrainingSequence&, CostLedger&) const override {
    return std::make_shared<ConstantHypothesis>(-1);
  }
};

std::size_t linear_scan(const Eigen::VectorXd& C, double u) {
  for (Eigen::Index l = 0; l < C.size(); ++l)
    if (u < C[l]) return static_cast<std::size_t>(l) + 1;
  return static_cast<std::size_t>(C.size());
}

BoostPlan small_plan(std::size_t s, std::size_t n, std::size_t t) {
  BoostConfig cfg;
  cfg.sample_size = s;
  cfg.rounds = n;
  cfg.target_t = t;
  cfg.record_trajectory = true;
  return plan_boost(cfg, 36, 36, 0.1, 1);
}

}  // namespace

TEST_CASE("learning rate and per-round base") {
  const double alpha = boost_alpha(0.75, 0.45);
  CHECK(alpha == doctest::Approx(0.5 * std::log(19.0) - 0.5 * std::log(7.0)).epsilon(1e-14));
  CHECK(alpha == doctest::Approx(0.49926).epsilon(1e-4));
  CHECK(per_round_bound_base(0.75, 0.45) <= 0.96);
  CHECK(margin_loss_bound(0.75, 0.45, 1) <= 0.96);
  CHECK(margin_loss_bound(0.75, 0.45, 0) == 1.0);
  CHECK(margin_loss_bound(0.75, 0.45, 100) <= std::pow(24.0 / 25.0, 100));
  CHECK_THROWS_AS(boost_alpha(0.9, 0.45), BadParams);
  CHECK_THROWS_AS(boost_alpha(0.5, 0.5), BadParams);
}

TEST_CASE("the default t drives the margin bound below 1/m") {
  CHECK(std::log(24.0 / 25.0) * 200.0 <= -8.0);
  for (std::size_t m : {2u, 6u, 36u, 216u, 1296u, 7776u}) {
    const std::size_t t = default_target_t(m);
    CHECK(t == static_cast<std::size_t>(std::ceil(200.0 * std::log(static_cast<double>(m)))));
    CHECK(margin_loss_bound(0.75, 0.45, t) < 1.0 / static_cast<double>(m));
  }
}

TEST_CASE("round success tail") {
  CHECK(round_success_tail(1) == doctest::Approx(0.83));
  CHECK(round_success_tail(10) == doctest::Approx(0.155).epsilon(0.01));
  CHECK(round_success_tail(12) == doctest::Approx(std::pow(0.83, 12)));
  for (std::size_t m : {36u, 1296u}) {
    const std::size_t n = default_rounds(m, 0.1);
    CHECK(static_cast<double>(n) * std::log(0.83) <= 20.0 * std::log(0.1 / (8.0 * static_cast<double>(m))));
  }
  CHECK_THROWS_AS(round_success_tail(0), BadParams);
}

TEST_CASE("default constants and plans") {
  CHECK(default_sample_size(1) == 550);
  CHECK(default_sample_size(4) == 2200);
  CHECK(default_rounds(36, 0.1) == 6 * static_cast<std::size_t>(std::ceil(200.0 * std::log(2880.0))));
  const BoostPlan paper = plan_boost({}, 1296, 260, 0.1, 1);
  CHECK(paper.s == 550);
  CHECK(paper.t == default_target_t(260));
  CHECK(paper.n == default_rounds(1296, 0.1));
  CHECK_FALSE(paper.stop_at_t);

  BoostConfig desk;
  desk.scale = ScaleProfile::desk();
  const BoostPlan d = plan_boost(desk, 1296, 260, 0.1, 1);
  CHECK(d.s == static_cast<std::size_t>(std::ceil(550 * desk.scale.s)));
  CHECK(d.stop_at_t);
  CHECK_THROWS_AS(ScaleProfile::named("huge"), BadParams);

  BoostConfig bad;
  bad.rounds = 3;
  bad.target_t = 4;
  CHECK_THROWS_AS(plan_boost(bad, 36, 36, 0.1, 1), BadParams);
}

TEST_CASE("exact power comparison") {
  CHECK(loss_within_power(24, 25, 1));
  CHECK_FALSE(loss_within_power(25, 25, 1));
  CHECK(loss_within_power(576, 625, 2));
  CHECK_FALSE(loss_within_power(577, 625, 2));
  CHECK(loss_within_power(0, 7, 500));
  CHECK_FALSE(loss_within_power(1, 1000, 500));
}

TEST_CASE("inverse cdf") {
  WeightState w = WeightState::uniform(4);
  CHECK(inverse_cdf(w.C, 0.6) == 3);
  CHECK(inverse_cdf(w.C, 0.0) == 1);
  CHECK(inverse_cdf(w.C, 0.25) == 2);
  CHECK(inverse_cdf(w.C, 0.999999) == 4);
  CHECK(w.C[3] == 1.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t m : {2u, 7u, 64u, 1000u}) {
    for (int rep = 0; rep < 200; ++rep) {
      WeightState ws;
      ws.D.resize(static_cast<Eigen::Index>(m));
      for (auto& x : ws.D) x = unit(gen) < 0.1 ? 0.0 : unit(gen);
      ws.D[0] += 1e-3;
      ws.D /= ws.D.sum();
      ws.rebuild_cumulative();
      const double u = unit(gen);
      CHECK(inverse_cdf(ws.C, u) == linear_scan(ws.C, u));
    }
  }
}

TEST_CASE("random string is addressable and bounded") {
  const RandomString r(11, 3, 5);
  const RandomString again(11, 3, 5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(r.entry(i, j) == again.entry(i, j));
      CHECK(r.entry(i, j) >= 0.0);
      CHECK(r.entry(i, j) < 1.0);
    }
  CHECK(r.entry(0, 0) != RandomString(12, 3, 5).entry(0, 0));
  CHECK_THROWS_AS(r.entry(3, 0), StreamExhausted);
  CHECK_THROWS_AS(r.entry(0, 5), StreamExhausted);
}

TEST_CASE("boosting the threshold class certifies a 3/4 margin") {
  const FiniteUniverse u = build_threshold_universe(4096);
  const ThresholdERM erm;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainingSequence s = sample_dataset(u, 36, seed);
    BoostConfig cfg;
    cfg.record_trajectory = true;
    cfg.stop_at_t = true;
    const BoostPlan plan = plan_boost(cfg, 36, 36, 0.1, 1);
    const RandomString r(seed, plan.n, plan.s);
    const BoostResult res = adaboost_sample(s, r, erm, plan);
    CHECK(res.branch == BoostBranch::Certified);
    CHECK(res.vote.size() == plan.t);
    CostLedger ledger;
    CHECK(empirical_margin_loss(res.vote, s, 0.75, ledger).violations == 0);
    CHECK(res.ledger.erm_train_calls == res.sampled_calls);
    CHECK(res.ledger.erm_train_examples == res.sampled_calls * plan.s);
    CHECK(res.ledger.sampler_draws == res.rounds_run * plan.s);
    REQUIRE(res.trajectory.size() == plan.t);
    for (const auto& p : res.trajectory) CHECK(loss_within_power(p.violations, p.total, p.accepted));
  }
}

TEST_CASE("early exit returns the same vote as the literal loop") {
  const FiniteUniverse u = build_threshold_universe(4096);
  const ThresholdERM erm;
  const TrainingSequence s = sample_dataset(u, 36, 8);
  BoostConfig cfg;
  cfg.sample_size = 40;
  cfg.rounds = 120;
  cfg.target_t = 30;
  const BoostPlan literal = plan_boost(cfg, 36, 36, 0.1, 1);
  cfg.stop_at_t = true;
  const BoostPlan early = plan_boost(cfg, 36, 36, 0.1, 1);
  const RandomString r(8, literal.n, literal.s);
  const auto a = adaboost_sample(s, r, erm, literal);
  const auto b = adaboost_sample(s, r, erm, early);
  REQUIRE(a.vote.size() == b.vote.size());
  for (std::size_t i = 0; i < a.vote.size(); ++i) CHECK(a.vote.voter(i)->describe() == b.vote.voter(i)->describe());
  CHECK(a.branch == b.branch);
  CHECK(a.rounds_run == literal.n);
  CHECK(b.rounds_run <= a.rounds_run);
}

TEST_CASE("an oracle that never beats 1/2 - gamma falls back") {
  const auto s = sequence({{0.1, -1}, {0.2, +1}, {0.3, -1}, {0.4, +1}});
  const NegativeOracle erm;
  const BoostPlan plan = small_plan(5, 12, 4);
  const RandomString r(1, plan.n, plan.s);
  std::size_t observed = 0;
  const auto res = adaboost_sample(s, r, erm, plan, [&](const RoundInfo& info) {
    ++observed;
    CHECK_FALSE(info.accepted);
    CHECK(info.weights.D.isApproxToConstant(0.25));
  });
  CHECK(res.branch == BoostBranch::Fallback);
  CHECK(observed == plan.n);
  CHECK(res.accepted_rounds == 0);
  CHECK(res.rounds_run == plan.n);
  CHECK(res.fallback_calls == 1);
  CHECK(res.vote.size() == plan.t);
  CHECK(res.ledger.erm_train_calls == plan.n + 1);
  CHECK(res.ledger.erm_train_examples == plan.n * plan.s + s.size());
  for (double z : res.z_all) CHECK(z == 1.0);
}

TEST_CASE("boosting input validation") {
  const auto s = sequence({{0.1, -1}, {0.9, +1}});
  const ThresholdERM erm;
  const BoostPlan plan = small_plan(5, 12, 4);
  CHECK_THROWS_AS(adaboost_sample(s, RandomString(1, 11, 5), erm, plan), StreamExhausted);
  CHECK_THROWS_AS(adaboost_sample(s, RandomString(1, 12, 6), erm, plan), BadParams);
  CHECK_THROWS_AS(adaboost_sample(TrainingSequence{}, RandomString(1, 12, 5), erm, plan), BadShape);
}

TEST_CASE("boost invariant suite") {
  const auto r = run_suite("boost");
  for (const auto& f : r.failures) FAIL_CHECK(f);
  CHECK(r.checks > 0);
}

#include "optpac/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "optpac/parallel.hpp"
#include "optpac/rng.hpp"

namespace optpac {

namespace {

enum Stream : std::uint64_t { kRandomString = 1, kRowDraws = 2, kBootstrap = 3 };

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw BadParams("delta must lie in (0,1)");
}

}  // namespace

const char* to_string(LearnerKind k) noexcept {
  switch (k) {
    case LearnerKind::Optimal: return "optimal";
    case LearnerKind::Hanneke: return "hanneke";
    case LearnerKind::Bagging: return "bagging";
    case LearnerKind::PlainErm: return "erm";
  }
  return "unknown";
}

LearnerKind learner_from_string(const std::string& name) {
  if (name == "optimal") return LearnerKind::Optimal;
  if (name == "hanneke") return LearnerKind::Hanneke;
  if (name == "bagging") return LearnerKind::Bagging;
  if (name == "erm") return LearnerKind::PlainErm;
  throw BadParams("unknown learner '" + name + "' (expected optimal, hanneke, bagging or erm)");
}

void to_json(nlohmann::json& j, const LearnerConfig& c) {
  j = {{"delta", c.delta},           {"d", c.d},
       {"seed", c.seed},             {"boost", c.boost},
       {"cache_rows", c.cache_rows}, {"jobs", c.jobs},
       {"bagging_frac", c.bagging_frac}};
  j["voters_l"] = c.voters_l ? nlohmann::json(*c.voters_l) : nlohmann::json("default");
}

std::size_t default_voters(std::size_t m, double delta, std::size_t d) {
  check_delta(delta);
  if (m == 0 || d == 0) throw BadParams("voter count needs m >= 1 and d >= 1");
  const double inner = static_cast<double>(m) / (delta * (static_cast<double>(d) + std::log(1.0 / delta)));
  const double l = std::ceil(3200.0 * std::log(inner) / 9.0);
  return l < 1.0 ? 1 : static_cast<std::size_t>(l);
}

void bootstrap_positions(std::vector<std::size_t>& out, std::size_t m, std::uint64_t seed,
                         std::size_t b) {
  Rng rng = make_rng(seed, {kBootstrap, b});
  for (auto& p : out) p = static_cast<std::size_t>(uniform_int(rng, 0, m - 1));
}

std::size_t default_bagging_rounds(std::size_t m, double delta) {
  check_delta(delta);
  if (m == 0) throw BadParams("bagging needs m >= 1");
  return static_cast<std::size_t>(std::ceil(18.0 * std::log(2.0 * static_cast<double>(m) / delta)));
}

TrainReport train_optimal(const TrainingSequence& s, const ErmOracle& erm, const LearnerConfig& cfg) {
  check_delta(cfg.delta);
  if (s.size() < 6) throw BadShape("the optimal learner needs at least 6 examples");
  const std::size_t m = static_cast<std::size_t>(largest_power_at_most(6, s.size()));
  const unsigned k = *exact_log6(m);
  const TrainingSequence sm = s.prefix(m);

  const std::size_t l = cfg.voters_l ? *cfg.voters_l : default_voters(m, cfg.delta, cfg.d);
  if (l == 0) throw BadParams("voters_l must be at least 1");
  const BoostPlan plan = plan_boost(cfg.boost, m, row_size(k), cfg.delta, cfg.d);
  const RandomString r(derive_seed(cfg.seed, {kRandomString}), plan.n, plan.s);

  const std::uint64_t rows = ipow(5, k);
  Rng rng = make_rng(cfg.seed, {kRowDraws});
  std::vector<RowDraw> draws(l);
  for (auto& dr : draws) {
    dr.rank = uniform_int(rng, 0, rows - 1);
    dr.z = static_cast<std::size_t>(uniform_int(rng, 1, plan.t));
  }

  // One boosting run per distinct row when caching, else one per draw.
  std::vector<std::uint64_t> run_rank;
  std::vector<std::size_t> run_of(l);
  if (cfg.cache_rows) {
    std::map<std::uint64_t, std::size_t> seen;
    for (std::size_t i = 0; i < l; ++i) {
      auto [it, inserted] = seen.try_emplace(draws[i].rank, run_rank.size());
      if (inserted) run_rank.push_back(draws[i].rank);
      run_of[i] = it->second;
    }
  } else {
    for (std::size_t i = 0; i < l; ++i) {
      run_rank.push_back(draws[i].rank);
      run_of[i] = i;
    }
  }

  std::vector<std::optional<BoostResult>> runs(run_rank.size());
  parallel_for(run_rank.size(), cfg.jobs, [&](std::size_t i) {
    const TrainingSequence row = extract_row(sm, selector_from_rank(k, run_rank[i]));
    BoostResult res = adaboost_sample(row, r, erm, plan);
    res.epsilons = {};
    res.z_accepted = {};
    res.z_all = {};
    runs[i] = std::move(res);
  });

  std::vector<HypothesisPtr> voters;
  voters.reserve(l);
  for (std::size_t i = 0; i < l; ++i) {
    const BoostResult& res = *runs[run_of[i]];
    draws[i].branch = res.branch;
    voters.push_back(res.vote.voter(draws[i].z - 1));
  }
  TrainReport report(LearnerKind::Optimal, Ensemble(std::move(voters)));
  report.m_input = s.size();
  report.m_effective = m;
  report.plan = plan;
  const std::size_t rsize = row_size(k);
  for (const auto& res : runs) {
    report.ledger += res->ledger;
    report.sampled_calls += res->sampled_calls;
    report.fallback_calls += res->fallback_calls;
    report.fallback_examples += res->fallback_calls * rsize;
    if (res->branch == BoostBranch::Fallback) ++report.fallback_count;
  }
  report.draws = std::move(draws);
  report.boost_runs = runs.size();
  report.cache_hits = l - runs.size();
  return report;
}

TrainReport train_hanneke(const TrainingSequence& s, const ErmOracle& erm) {
  if (s.empty()) throw BadShape("the Hanneke learner needs a non-empty sample");
  const std::size_t m = static_cast<std::size_t>(largest_power_at_most(4, s.size()));
  const auto rows = enumerate_rows_hanneke(s.prefix(m));
  CostLedger ledger;
  std::vector<HypothesisPtr> voters;
  voters.reserve(rows.size());
  for (const auto& row : rows) voters.push_back(erm.train(row, ledger));
  TrainReport report(LearnerKind::Hanneke, Ensemble(std::move(voters)));
  report.ledger = ledger;
  report.m_input = s.size();
  report.m_effective = m;
  return report;
}

TrainReport train_bagging(const TrainingSequence& s, const ErmOracle& erm, double delta,
                          double frac, std::uint64_t seed) {
  if (s.empty()) throw BadShape("bagging needs a non-empty sample");
  if (!(frac >= 0.02 && frac <= 1.0)) throw BadParams("bagging fraction must lie in [0.02, 1]");
  const std::size_t m = s.size();
  const std::size_t rounds = default_bagging_rounds(m, delta);
  const auto size = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(m) - 1e-9));

  CostLedger ledger;
  std::vector<HypothesisPtr> voters;
  voters.reserve(rounds);
  std::vector<std::size_t> picks(size);
  for (std::size_t b = 0; b < rounds; ++b) {
    bootstrap_positions(picks, m, seed, b);
    ledger.sampler_draws += size;
    voters.push_back(erm.train(s.select(picks), ledger));
  }
  TrainReport report(LearnerKind::Bagging, Ensemble(std::move(voters)));
  report.ledger = ledger;
  report.m_input = m;
  report.m_effective = m;
  return report;
}

TrainReport train_plain_erm(const TrainingSequence& s, const ErmOracle& erm) {
  CostLedger ledger;
  HypothesisPtr h = erm.train(s, ledger);
  TrainReport report(LearnerKind::PlainErm, Ensemble({std::move(h)}));
  report.ledger = ledger;
  report.m_input = s.size();
  report.m_effective = s.size();
  return report;
}

TrainReport train_learner(LearnerKind kind, const TrainingSequence& s, const ErmOracle& erm,
                          const LearnerConfig& cfg) {
  switch (kind) {
    case LearnerKind::Optimal: return train_optimal(s, erm, cfg);
    case LearnerKind::Hanneke: return train_hanneke(s, erm);
    case LearnerKind::Bagging: return train_bagging(s, erm, cfg.delta, cfg.bagging_frac, cfg.seed);
    case LearnerKind::PlainErm: return train_plain_erm(s, erm);
  }
  throw BadParams("unknown learner");
}

}  // namespace optpac

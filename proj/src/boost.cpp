#include "optpac/boost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "optpac/rng.hpp"

namespace optpac {

namespace {

std::size_t scaled(std::size_t value, double factor) {
  const double v = std::ceil(static_cast<double>(value) * factor);
  return std::max<std::size_t>(1, static_cast<std::size_t>(v));
}

void check_theta_gamma(double theta, double gamma) {
  if (!(theta > 0.0 && theta < 2.0 * gamma && 2.0 * gamma < 1.0))
    throw BadParams("boosting needs 0 < theta < 2*gamma < 1");
}

}  // namespace

ScaleProfile ScaleProfile::paper() { return {}; }

ScaleProfile ScaleProfile::desk() { return {"desk", 0.2, 0.1, 0.1, true}; }

ScaleProfile ScaleProfile::named(const std::string& name) {
  if (name == "paper") return paper();
  if (name == "desk") return desk();
  throw BadParams("unknown scale profile '" + name + "' (expected paper or desk)");
}

void to_json(nlohmann::json& j, const ScaleProfile& p) {
  j = {{"name", p.name}, {"s", p.s}, {"n", p.n}, {"t", p.t}, {"early_exit", p.early_exit}};
}

void to_json(nlohmann::json& j, const BoostConfig& c) {
  j = {{"theta", c.theta}, {"gamma", c.gamma}, {"scale", c.scale}, {"stop_at_t", c.stop_at_t}};
  j["sample_size"] = c.sample_size ? nlohmann::json(*c.sample_size) : nlohmann::json("default");
  j["rounds"] = c.rounds ? nlohmann::json(*c.rounds) : nlohmann::json("default");
  j["target_t"] = c.target_t ? nlohmann::json(*c.target_t) : nlohmann::json("default");
}

void to_json(nlohmann::json& j, const BoostPlan& p) {
  j = {{"theta", p.theta}, {"gamma", p.gamma}, {"alpha", p.alpha}, {"s", p.s},
       {"n", p.n},         {"t", p.t},         {"stop_at_t", p.stop_at_t}};
}

std::size_t default_sample_size(std::size_t d) {
  if (d == 0) throw BadParams("VC dimension must be at least 1");
  return 550 * d;
}

std::size_t default_rounds(std::size_t m, double delta) {
  if (m == 0 || !(delta > 0.0 && delta < 1.0)) throw BadParams("rounds need m >= 1 and delta in (0,1)");
  const double inner = std::ceil(200.0 * std::log(8.0 * static_cast<double>(m) / delta));
  return 6 * static_cast<std::size_t>(inner);
}

std::size_t default_target_t(std::size_t m) {
  if (m == 0) throw BadParams("target t needs m >= 1");
  const double t = std::ceil(200.0 * std::log(static_cast<double>(m)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

BoostPlan plan_boost(const BoostConfig& cfg, std::size_t m_rounds, std::size_t m_target,
                     double delta, std::size_t d) {
  check_theta_gamma(cfg.theta, cfg.gamma);
  BoostPlan p;
  p.theta = cfg.theta;
  p.gamma = cfg.gamma;
  p.alpha = boost_alpha(cfg.theta, cfg.gamma);
  p.s = cfg.sample_size ? *cfg.sample_size : scaled(default_sample_size(d), cfg.scale.s);
  p.n = cfg.rounds ? *cfg.rounds : scaled(default_rounds(m_rounds, delta), cfg.scale.n);
  p.t = cfg.target_t ? *cfg.target_t : scaled(default_target_t(m_target), cfg.scale.t);
  p.stop_at_t = cfg.stop_at_t || cfg.scale.early_exit;
  p.record_trajectory = cfg.record_trajectory;
  if (p.s == 0 || p.t == 0) throw BadParams("s and t must be positive");
  if (p.n < p.t) throw BadParams("rounds n must be at least the target t");
  return p;
}

double boost_alpha(double theta, double gamma) {
  check_theta_gamma(theta, gamma);
  return 0.5 * std::log((1.0 + 2.0 * gamma) / (1.0 - 2.0 * gamma)) -
         0.5 * std::log((1.0 + theta) / (1.0 - theta));
}

double per_round_bound_base(double theta, double gamma) {
  const double a = boost_alpha(theta, gamma);
  return std::exp((theta - 1.0) * a) * (0.5 + gamma) + std::exp((theta + 1.0) * a) * (0.5 - gamma);
}

double margin_loss_bound(double theta, double gamma, std::size_t t) {
  return std::pow(per_round_bound_base(theta, gamma), static_cast<double>(t));
}

double round_success_tail(std::size_t n) {
  if (n == 0) throw BadParams("round_success_tail needs n >= 1");
  return std::pow(0.83, static_cast<double>(n));
}

bool loss_within_power(std::size_t violations, std::size_t total, std::size_t j, unsigned num,
                       unsigned den) {
  using boost::multiprecision::cpp_int;
  using boost::multiprecision::pow;
  if (den == 0 || total == 0) throw BadParams("loss_within_power needs positive total and denominator");
  const auto jj = static_cast<unsigned>(j);
  return cpp_int(violations) * pow(cpp_int(den), jj) <= cpp_int(total) * pow(cpp_int(num), jj);
}

RandomString::RandomString(std::uint64_t seed, std::size_t blocks, std::size_t block_size)
    : seed_(seed), blocks_(blocks), block_size_(block_size) {
  if (block_size == 0) throw BadParams("random string blocks must be non-empty");
}

double RandomString::entry(std::size_t block, std::size_t j) const {
  if (block >= blocks_ || j >= block_size_)
    throw StreamExhausted("random string read past block " + std::to_string(blocks_));
  return to_unit(derive_seed(seed_, {block, j}));
}

WeightState WeightState::uniform(std::size_t m) {
  if (m == 0) throw BadShape("weights need m >= 1");
  WeightState w;
  w.D = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  w.rebuild_cumulative();
  return w;
}

void WeightState::rebuild_cumulative() {
  C.resize(D.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    acc += D[i];
    C[i] = std::min(acc, 1.0);
  }
  C[C.size() - 1] = 1.0;
}

std::size_t inverse_cdf(const Eigen::VectorXd& C, double u) {
  const double* first = C.data();
  const double* last = first + C.size();
  const double* it = std::upper_bound(first, last, u);
  if (it == last) --it;
  return static_cast<std::size_t>(it - first) + 1;
}

const char* to_string(BoostBranch b) noexcept {
  return b == BoostBranch::Certified ? "certified" : "fallback";
}

BoostResult adaboost_sample(const TrainingSequence& s, const RandomString& r,
                            const ErmOracle& erm, const BoostPlan& plan,
                            const RoundObserver& observer) {
  const std::size_t m = s.size();
  if (m == 0) throw BadShape("boosting needs a non-empty sample");
  if (r.blocks() < plan.n)
    throw StreamExhausted("random string has " + std::to_string(r.blocks()) + " blocks, need " +
                          std::to_string(plan.n));
  if (r.block_size() != plan.s) throw BadParams("random string block size differs from s");

  CostLedger ledger;
  WeightState w = WeightState::uniform(m);
  std::vector<HypothesisPtr> voters;
  voters.reserve(plan.t);
  std::vector<std::size_t> draws(plan.s);
  std::vector<Label> preds(m);
  std::vector<std::int64_t> agreement;
  if (plan.record_trajectory) agreement.assign(m, 0);

  const double down = std::exp(-plan.alpha);
  const double up = std::exp(plan.alpha);
  const double threshold = 0.5 - plan.gamma;

  std::size_t counter = 0;
  std::size_t rounds_run = 0;
  std::size_t sampled_calls = 0;
  std::vector<double> epsilons, z_accepted, z_all;
  std::vector<TrajectoryPoint> trajectory;

  for (std::size_t i = 0; i < plan.n; ++i) {
    if (plan.stop_at_t && counter >= plan.t) break;
    ++rounds_run;

    for (std::size_t j = 0; j < plan.s; ++j) draws[j] = inverse_cdf(w.C, r.entry(i, j)) - 1;
    ledger.sampler_draws += plan.s;
    const HypothesisPtr h = erm.train(s.select(draws), ledger);
    ++sampled_calls;

    double eps = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      preds[j] = (*h)(s[j].point, ledger);
      if (preds[j] != s[j].label) eps += w.D[static_cast<Eigen::Index>(j)];
    }
    ledger.arithmetic_ops += m;
    epsilons.push_back(eps);

    if (!(eps <= threshold)) {
      z_all.push_back(1.0);
      if (observer) observer({i, eps, false, counter, w});
      continue;
    }

    ++counter;
    if (counter <= plan.t) {
      voters.push_back(h);
      if (plan.record_trajectory) {
        std::size_t violations = 0;
        for (std::size_t j = 0; j < m; ++j) {
          agreement[j] += s[j].label * preds[j];
          if (margin_at_most(agreement[j], counter, plan.theta)) ++violations;
        }
        trajectory.push_back({counter, violations, m});
      }
    }

    for (std::size_t j = 0; j < m; ++j)
      w.D[static_cast<Eigen::Index>(j)] *= (preds[j] == s[j].label) ? down : up;
    w.Z = w.D.sum();
    w.D /= w.Z;
    w.rebuild_cumulative();
    ledger.arithmetic_ops += 3 * m;
    z_accepted.push_back(w.Z);
    z_all.push_back(w.Z);
    if (observer) observer({i, eps, true, counter, w});
  }

  if (counter >= plan.t) {
    MajorityVote vote(std::move(voters));
    if (empirical_margin_loss(vote, s, plan.theta, ledger).below_one_over_m())
      return BoostResult{std::move(vote), BoostBranch::Certified, rounds_run, counter, sampled_calls,
                         0, std::move(epsilons), std::move(z_accepted), std::move(z_all),
                         std::move(trajectory), ledger};
  }

  const HypothesisPtr h = erm.train(s, ledger);
  return BoostResult{MajorityVote(std::vector<HypothesisPtr>(plan.t, h)), BoostBranch::Fallback,
                     rounds_run, counter, sampled_calls, 1, std::move(epsilons),
                     std::move(z_accepted), std::move(z_all), std::move(trajectory), ledger};
}

}  // namespace optpac

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optpac/core.hpp"
#include "optpac/erm.hpp"

namespace optpac {

/// Multipliers applied to the default s, n and t. "paper" keeps every constant;
/// "desk" shrinks them so sweeps at m up to 6^5 finish on a workstation.
struct ScaleProfile {
  std::string name = "paper";
  double s = 1.0;
  double n = 1.0;
  double t = 1.0;
  /// Stop once t rounds have been accepted. The returned vote is the same
  /// either way; only the ledger of the skipped tail differs.
  bool early_exit = false;

  static ScaleProfile paper();
  static ScaleProfile desk();
  /// "paper" or "desk"; throws BadParams otherwise.
  static ScaleProfile named(const std::string& name);
};

void to_json(nlohmann::json& j, const ScaleProfile& p);

struct BoostConfig {
  double theta = 0.75;
  double gamma = 0.45;
  std::optional<std::size_t> sample_size;  // s, default 550·d
  std::optional<std::size_t> rounds;       // n, default 6·⌈200·ln(8m/δ)⌉
  std::optional<std::size_t> target_t;     // t, default ⌈200·ln m⌉
  ScaleProfile scale = ScaleProfile::paper();
  bool stop_at_t = false;
  bool record_trajectory = false;
};

void to_json(nlohmann::json& j, const BoostConfig& c);

/// Fully resolved constants for one boosting run.
struct BoostPlan {
  double theta = 0.75;
  double gamma = 0.45;
  double alpha = 0.0;
  std::size_t s = 0;
  std::size_t n = 0;
  std::size_t t = 0;
  bool stop_at_t = false;
  bool record_trajectory = false;

  bool operator==(const BoostPlan&) const = default;
};

void to_json(nlohmann::json& j, const BoostPlan& p);

std::size_t default_sample_size(std::size_t d);
std::size_t default_rounds(std::size_t m, double delta);
std::size_t default_target_t(std::size_t m);

/// Resolves defaults and scale. m_rounds feeds n (the full sample size for the
/// optimal learner), m_target feeds t (the size of the set being boosted).
/// Throws BadParams unless 0 < θ < 2γ < 1 and n >= t.
BoostPlan plan_boost(const BoostConfig& cfg, std::size_t m_rounds, std::size_t m_target,
                     double delta, std::size_t d);

/// ½ln((1+2γ)/(1−2γ)) − ½ln((1+θ)/(1−θ)).
double boost_alpha(double theta, double gamma);
/// e^{(θ−1)α}(½+γ) + e^{(θ+1)α}(½−γ).
double per_round_bound_base(double theta, double gamma);
/// per_round_bound_base^t.
double margin_loss_bound(double theta, double gamma, std::size_t t);
/// 0.83^n.
double round_success_tail(std::size_t n);

/// violations/total <= (num/den)^j, decided in exact integer arithmetic.
bool loss_within_power(std::size_t violations, std::size_t total, std::size_t j,
                       unsigned num = 24, unsigned den = 25);

/// r ∈ ([0,1)^s)^n, addressable entry by entry. Entries come from a
/// counter-based generator, so a row never has to be buffered and every run
/// over the same seed reads the same values.
class RandomString {
 public:
  RandomString(std::uint64_t seed, std::size_t blocks, std::size_t block_size);

  std::size_t blocks() const noexcept { return blocks_; }
  std::size_t block_size() const noexcept { return block_size_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// r_{i,j}, 0-based. Throws StreamExhausted past the end.
  double entry(std::size_t block, std::size_t j) const;

 private:
  std::uint64_t seed_;
  std::size_t blocks_;
  std::size_t block_size_;
};

struct WeightState {
  Eigen::VectorXd D;
  Eigen::VectorXd C;
  double Z = 1.0;

  static WeightState uniform(std::size_t m);
  /// Prefix sums of D with the last entry pinned to exactly 1.
  void rebuild_cumulative();
};

/// The l in {1..m} with C(l−1) <= u < C(l), C(0) = 0, by binary search.
std::size_t inverse_cdf(const Eigen::VectorXd& C, double u);

enum class BoostBranch { Certified, Fallback };

const char* to_string(BoostBranch b) noexcept;

struct TrajectoryPoint {
  std::size_t accepted = 0;   // j
  std::size_t violations = 0; // examples with margin <= θ under the first j voters
  std::size_t total = 0;      // |S|
};

struct BoostResult {
  MajorityVote vote;
  BoostBranch branch = BoostBranch::Certified;
  std::size_t rounds_run = 0;
  std::size_t accepted_rounds = 0;
  std::size_t sampled_calls = 0;
  std::size_t fallback_calls = 0;
  std::vector<double> epsilons;
  std::vector<double> z_accepted;  // Z of every accepted round
  std::vector<double> z_all;       // Z of every round, 1 for skipped rounds
  std::vector<TrajectoryPoint> trajectory;
  CostLedger ledger;
};

/// State after round `round` (0-based). For skipped rounds `weights` is the
/// untouched distribution the round started from.
struct RoundInfo {
  std::size_t round = 0;
  double epsilon = 0.0;
  bool accepted = false;
  std::size_t accepted_so_far = 0;
  const WeightState& weights;
};

using RoundObserver = std::function<void(const RoundInfo&)>;

/// Boosting by resampling with a fixed learning rate. Returns either t voters
/// whose θ-margin on every example of S exceeds θ, or ERM(S) repeated t times.
/// Throws StreamExhausted if r has fewer than n blocks, BadParams if its block
/// size differs from s, and propagates ERM errors.
BoostResult adaboost_sample(const TrainingSequence& s, const RandomString& r,
                            const ErmOracle& erm, const BoostPlan& plan,
                            const RoundObserver& observer = {});

}  // namespace optpac

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "optpac/boost.hpp"
#include "optpac/core.hpp"
#include "optpac/erm.hpp"
#include "optpac/subsample.hpp"

namespace optpac {

enum class LearnerKind { Optimal, Hanneke, Bagging, PlainErm };

const char* to_string(LearnerKind k) noexcept;
/// "optimal", "hanneke", "bagging" or "erm"; throws BadParams otherwise.
LearnerKind learner_from_string(const std::string& name);

struct LearnerConfig {
  double delta = 0.1;
  std::size_t d = 1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> voters_l;  // default ⌈3200·ln(m/(δ(d+ln(1/δ))))/9⌉
  BoostConfig boost;
  bool cache_rows = true;
  /// Worker threads for distinct rows; 0 uses the hardware concurrency.
  std::size_t jobs = 0;
  /// Bootstrap size as a fraction of m for the bagging baseline.
  double bagging_frac = 1.0;
};

void to_json(nlohmann::json& j, const LearnerConfig& c);

std::size_t default_voters(std::size_t m, double delta, std::size_t d);
std::size_t default_bagging_rounds(std::size_t m, double delta);

/// Fills `out` with bootstrap b's positions, uniform over [0, m).
void bootstrap_positions(std::vector<std::size_t>& out, std::size_t m, std::uint64_t seed,
                         std::size_t b);

struct RowDraw {
  std::uint64_t rank = 0;  // lexicographic rank of w
  std::size_t z = 0;       // 1-based voter index
  BoostBranch branch = BoostBranch::Certified;
};

struct TrainReport {
  TrainReport(LearnerKind k, Ensemble e) : kind(k), ensemble(std::move(e)) {}

  LearnerKind kind;
  Ensemble ensemble;
  CostLedger ledger;
  std::size_t m_input = 0;
  std::size_t m_effective = 0;
  /// Optimal learner only.
  std::optional<BoostPlan> plan;
  std::vector<RowDraw> draws;
  std::size_t boost_runs = 0;
  std::size_t fallback_count = 0;
  std::size_t cache_hits = 0;
  /// ERM calls made on resampled multisets (each of exactly s examples) and
  /// fallback ERM calls on a whole row.
  std::size_t sampled_calls = 0;
  std::size_t fallback_calls = 0;
  std::size_t fallback_examples = 0;
};

/// The random majority voter: l voters, each drawn uniformly from the boosted
/// vote of a uniformly drawn row of the recursive split, all rows sharing one
/// random string. S is truncated to its largest 6^k prefix (k >= 1).
TrainReport train_optimal(const TrainingSequence& s, const ErmOracle& erm, const LearnerConfig& cfg);

/// ERM on every row of the four-way split; S truncated to its largest 4^k prefix.
TrainReport train_hanneke(const TrainingSequence& s, const ErmOracle& erm);

/// ⌈18·ln(2m/δ)⌉ bootstraps of size ⌈frac·m⌉, frac ∈ [0.02, 1].
TrainReport train_bagging(const TrainingSequence& s, const ErmOracle& erm, double delta,
                          double frac, std::uint64_t seed);

TrainReport train_plain_erm(const TrainingSequence& s, const ErmOracle& erm);

TrainReport train_learner(LearnerKind kind, const TrainingSequence& s, const ErmOracle& erm,
                          const LearnerConfig& cfg);

}  // namespace optpac

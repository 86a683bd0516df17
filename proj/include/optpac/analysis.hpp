#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "optpac/boost.hpp"
#include "optpac/core.hpp"
#include "optpac/erm.hpp"

namespace optpac {

/// Finite support distribution with a target labelling.
struct FiniteUniverse {
  std::vector<Point> points;
  Eigen::VectorXd probs;
  std::vector<Label> target;

  std::size_t size() const noexcept { return points.size(); }
  LabeledExample example(std::size_t i) const { return {points[i], target[i]}; }

  /// Throws BadParams on mismatched sizes, negative mass, |Σp − 1| > 1e-12 or bad labels.
  void validate() const;
};

/// 2(d·log₂(2em/d) + log₂(2/δ))/m. Requires m >= d >= 1 and δ ∈ (0,1).
double uniform_convergence_bound(std::size_t d, std::size_t m, double delta);

struct RampSlack {
  double complexity = 0.0;  // C·√(2d / (((ξ−1)γ)²·m))
  double confidence = 0.0;  // √(2·ln(2/δ)/m)

  double total() const noexcept { return complexity + confidence; }
};

/// Additive slack of the ramp-loss generalization bound; C is left to the caller.
RampSlack ramp_generalization_bound(std::size_t d, std::size_t m, double delta, double gamma,
                                    double xi, double C = 1.0);

/// max{32C²·960, 3840·ln 160}·(2·80·6·(ln 40 + 1))².
double error_constant_c5(double C = 1.0);

/// Σ probs[i]·1{predict(points[i]) ≠ target[i]}.
template <class Predict>
double exact_error(const FiniteUniverse& u, Predict&& predict) {
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (predict(u.points[i]) != u.target[i]) err += u.probs[static_cast<Eigen::Index>(i)];
  return err;
}

/// Σ_h h(x) for every universe point. Thresholds over a sorted 1-D universe
/// take an O(l·log N + N) sweep; anything else is evaluated voter by voter.
std::vector<std::int64_t> ensemble_vote_sums(const Ensemble& e, const FiniteUniverse& u);
std::vector<std::int64_t> ensemble_vote_sums_naive(const Ensemble& e, const FiniteUniverse& u);

double exact_error(const Ensemble& e, const FiniteUniverse& u);

/// Index sampler over u.probs.
std::vector<std::size_t> sample_indices(const FiniteUniverse& u, std::size_t count, std::uint64_t seed);

struct MajorityFailure {
  double mass = 0.0;        // probability of points where fewer than 3/4 of rows are good
  std::size_t rows = 0;
  std::size_t fallbacks = 0;
  CostLedger ledger;
};

/// Boosts every row of the recursive split of S (|S| = 6^k, k <= 3) and
/// returns the mass of points where 4·(good rows) < 3·(rows), a row being good
/// at x when 4·(voters correct at x) >= 3·t.
MajorityFailure exact_majority_of_majorities_failure(const TrainingSequence& s,
                                                     const RandomString& r, const ErmOracle& erm,
                                                     const BoostPlan& plan,
                                                     const FiniteUniverse& u);

/// Fraction of `draws` i.i.d. points from u that predict gets wrong.
template <class Predict>
double monte_carlo_error(const FiniteUniverse& u, Predict&& predict, std::size_t draws,
                         std::uint64_t seed) {
  if (draws == 0) throw BadParams("monte_carlo_error needs at least one draw");
  std::size_t wrong = 0;
  for (std::size_t i : sample_indices(u, draws, seed))
    if (predict(u.points[i]) != u.target[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(draws);
}

}  // namespace optpac

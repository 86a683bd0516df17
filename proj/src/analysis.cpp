#include "optpac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "optpac/rng.hpp"
#include "optpac/subsample.hpp"

namespace optpac {

namespace {

bool sorted_line(const FiniteUniverse& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.points[i].size() != 1) return false;
    if (i > 0 && !(u.points[i - 1][0] <= u.points[i][0])) return false;
  }
  return true;
}

}  // namespace

void FiniteUniverse::validate() const {
  if (points.empty()) throw BadParams("universe must be non-empty");
  if (static_cast<std::size_t>(probs.size()) != points.size() || target.size() != points.size())
    throw BadParams("universe points, probabilities and labels differ in length");
  if ((probs.array() < 0.0).any()) throw BadParams("universe probabilities must be non-negative");
  if (std::abs(probs.sum() - 1.0) > 1e-12) throw BadParams("universe probabilities must sum to 1");
  for (Label y : target)
    if (!is_label(y)) throw BadParams("universe labels must be -1 or +1");
}

double uniform_convergence_bound(std::size_t d, std::size_t m, double delta) {
  if (d == 0 || m < d) throw BadParams("uniform convergence bound needs m >= d >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw BadParams("delta must lie in (0,1)");
  const double dd = static_cast<double>(d);
  const double mm = static_cast<double>(m);
  return 2.0 * (dd * std::log2(2.0 * std::numbers::e * mm / dd) + std::log2(2.0 / delta)) / mm;
}

RampSlack ramp_generalization_bound(std::size_t d, std::size_t m, double delta, double gamma,
                                    double xi, double C) {
  if (d == 0 || m == 0) throw BadParams("ramp bound needs d >= 1 and m >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw BadParams("delta must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw BadParams("gamma must lie in (0,1)");
  if (!(xi > 1.0)) throw BadParams("xi must exceed 1");
  if (!(C >= 1.0)) throw BadParams("C must be at least 1");
  const double mm = static_cast<double>(m);
  const double scale = (xi - 1.0) * gamma;
  return {C * std::sqrt(2.0 * static_cast<double>(d) / (scale * scale * mm)),
          std::sqrt(2.0 * std::log(2.0 / delta) / mm)};
}

double error_constant_c5(double C) {
  const double lead = std::max(32.0 * C * C * 960.0, 3840.0 * std::log(160.0));
  const double tail = 2.0 * 80.0 * 6.0 * (std::log(40.0) + 1.0);
  return lead * tail * tail;
}

std::vector<std::int64_t> ensemble_vote_sums_naive(const Ensemble& e, const FiniteUniverse& u) {
  std::vector<std::int64_t> sums(u.size(), 0);
  for (const auto& h : e.voters())
    for (std::size_t i = 0; i < u.size(); ++i) sums[i] += h->predict(u.points[i]);
  return sums;
}

std::vector<std::int64_t> ensemble_vote_sums(const Ensemble& e, const FiniteUniverse& u) {
  if (!sorted_line(u)) return ensemble_vote_sums_naive(e, u);
  std::vector<const ThresholdHypothesis*> thresholds;
  thresholds.reserve(e.size());
  for (const auto& h : e.voters()) {
    const auto* th = dynamic_cast<const ThresholdHypothesis*>(h.get());
    if (!th) return ensemble_vote_sums_naive(e, u);
    thresholds.push_back(th);
  }

  // A threshold votes -o below its boundary and +o from the first point with
  // x - b >= 0 onwards; accumulate the jumps and prefix-sum them.
  const std::size_t n = u.size();
  std::vector<std::int64_t> jump(n + 1, 0);
  std::int64_t base = 0;
  for (const auto* th : thresholds) {
    const double b = th->boundary();
    const auto it = std::partition_point(u.points.begin(), u.points.end(),
                                         [b](const Point& x) { return x[0] - b < 0.0; });
    const auto p = static_cast<std::size_t>(it - u.points.begin());
    base -= th->orientation();
    jump[p] += 2 * th->orientation();
  }
  std::vector<std::int64_t> sums(n);
  std::int64_t acc = base;
  for (std::size_t i = 0; i < n; ++i) {
    acc += jump[i];
    sums[i] = acc;
  }
  return sums;
}

double exact_error(const Ensemble& e, const FiniteUniverse& u) {
  const auto sums = ensemble_vote_sums(e, u);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (sign_of_sum(sums[i]) != u.target[i]) err += u.probs[static_cast<Eigen::Index>(i)];
  return err;
}

std::vector<std::size_t> sample_indices(const FiniteUniverse& u, std::size_t count, std::uint64_t seed) {
  WeightState w;
  w.D = u.probs;
  w.rebuild_cumulative();
  Rng rng(seed);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = inverse_cdf(w.C, uniform_unit(rng)) - 1;
  return out;
}

MajorityFailure exact_majority_of_majorities_failure(const TrainingSequence& s,
                                                     const RandomString& r, const ErmOracle& erm,
                                                     const BoostPlan& plan,
                                                     const FiniteUniverse& u) {
  const auto k = exact_log6(s.size());
  if (!k || *k == 0 || *k > 3) throw BadShape("majority-of-majorities evaluation needs |S| = 6^k, 1 <= k <= 3");
  const std::size_t rows = row_count(*k);

  MajorityFailure out;
  out.rows = rows;
  std::vector<std::size_t> good(u.size(), 0);
  for (std::size_t rank = 0; rank < rows; ++rank) {
    const TrainingSequence row = extract_row(s, selector_from_rank(*k, rank));
    const BoostResult res = adaboost_sample(row, r, erm, plan);
    out.ledger += res.ledger;
    if (res.branch == BoostBranch::Fallback) ++out.fallbacks;
    const auto t = static_cast<std::int64_t>(res.vote.size());
    const auto sums = ensemble_vote_sums(Ensemble::from_vote(res.vote), u);
    for (std::size_t i = 0; i < u.size(); ++i) {
      // correct voters c satisfy 2c − t = y·sum
      const std::int64_t correct = (u.target[i] * sums[i] + t) / 2;
      if (4 * correct >= 3 * t) ++good[i];
    }
  }
  for (std::size_t i = 0; i < u.size(); ++i)
    if (4 * good[i] < 3 * rows) out.mass += u.probs[static_cast<Eigen::Index>(i)];
  return out;
}

}  // namespace optpac

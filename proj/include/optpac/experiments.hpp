#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "optpac/analysis.hpp"
#include "optpac/erm.hpp"
#include "optpac/learner.hpp"

namespace optpac {

inline constexpr int kSchemaVersion = 1;

// --- universes --------------------------------------------------------------

/// Grid x_i = (i + 0.5)/N on [0,1], uniform mass, label +1 iff x >= boundary.
FiniteUniverse build_threshold_universe(std::size_t n = 65536, double boundary = 0.5);

/// Same grid, every label equal to `label`.
FiniteUniverse build_constant_universe(std::size_t n = 1024, Label label = +1);

/// x_i = (0, 1 − i/m⁴, 1) labelled −1 for i < m, x_m = (√(1/m), 1, 1) labelled
/// +1 with mass 250/m, the rest uniform. Requires 10 <= m <= 10⁴; the
/// separator (1, −√(1/(2m)), 0) is checked to have margin >= √(1/(64m)).
FiniteUniverse build_adversarial_universe(std::size_t m);

/// min_i y_i⟨w, x_i⟩ / ‖w‖ over the universe.
double separation_margin(const FiniteUniverse& u, const Eigen::VectorXd& w);

/// m i.i.d. draws from u, labelled by its target.
TrainingSequence sample_dataset(const FiniteUniverse& u, std::size_t m, std::uint64_t seed);

/// Universe and matching ERM for a distribution id: "threshold" or "constant".
struct Distribution {
  FiniteUniverse universe;
  std::shared_ptr<const ErmOracle> erm;
};

Distribution make_distribution(const std::string& id, std::size_t universe_size = 0);

// --- error sweeps -----------------------------------------------------------

struct SweepSpec {
  std::string distribution = "threshold";
  std::size_t universe_size = 65536;
  std::vector<std::size_t> m_values{216, 1296};
  double delta = 0.1;
  std::size_t d = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<std::string> learners{"optimal", "erm"};
  std::string scale = "desk";
  double bagging_frac = 1.0;
  std::size_t jobs = 0;
  bool record_wall_time = false;
  std::string output = "sweep.csv";

  /// Throws BadParams on unknown names or (learner, m) pairs the learner would truncate.
  void validate() const;
};

void to_json(nlohmann::json& j, const SweepSpec& s);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, SweepSpec& s);

SweepSpec load_sweep_spec(const std::string& path);

struct SweepRow {
  std::string learner;
  std::size_t m = 0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  double error = 0.0;
  std::uint64_t erm_train_calls = 0;
  std::uint64_t erm_train_examples = 0;
  std::uint64_t inference_calls = 0;
  std::size_t fallbacks = 0;
  double wall_ms = 0.0;

  bool operator==(const SweepRow&) const = default;
};

/// One row per (learner, m, seed), ordered by learner, then m, then seed.
/// The dataset depends only on (seed, m), so learners see identical samples.
std::vector<SweepRow> run_error_sweep(const SweepSpec& spec);

/// Train one learner on the sweep's dataset for (m, seed).
TrainReport train_for_sweep(const SweepSpec& spec, const Distribution& dist, LearnerKind kind,
                            std::size_t m, std::uint64_t seed, std::size_t jobs);

std::string sweep_csv_header();
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
nlohmann::json sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

// --- perceptron complexity --------------------------------------------------

struct PerceptronBenchSpec {
  std::size_t m = 2200;
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  double delta = 0.1;
  double bagging_frac = 0.02;
  std::size_t boosted_sample = 2200;
  std::size_t boosted_calls = 8;
  double cost_divisor_c = 64.0;
  std::size_t jobs = 0;
};

void to_json(nlohmann::json& j, const PerceptronBenchSpec& s);

struct PerceptronTrial {
  std::uint64_t seed = 0;
  std::size_t bootstraps = 0;
  std::size_t bootstraps_in_case = 0;   // 1..10 copies of x_m, first element not x_m
  std::size_t bootstraps_triggered = 0; // >= 4m − 4 updates
  std::uint64_t bagging_updates = 0;
  std::uint64_t bagging_scans = 0;
  std::uint64_t bagging_max_updates = 0;
  std::vector<std::uint64_t> boosted_updates;  // per ERM call
  std::vector<std::uint64_t> boosted_scans;
  std::vector<std::size_t> boosted_sizes;
  CostLedger bagging_ledger;
  CostLedger boosted_ledger;
  std::string error;  // non-empty when the trial hit NonConvergence

  std::uint64_t bagging_cost() const noexcept { return bagging_updates + bagging_scans; }
  bool triggered() const noexcept { return bootstraps_triggered > 0; }
};

struct CostReport {
  PerceptronBenchSpec spec;
  std::vector<PerceptronTrial> trials;
  std::uint64_t trigger_updates = 0;  // 4m − 4
  std::uint64_t novikoff_cap = 0;     // 256m
  double triggered_fraction = 0.0;
  double bagging_cost_median = 0.0;     // whole bagging run, updates + scans
  double bagging_call_cost_median = 0.0;
  double boosted_call_cost_median = 0.0;
  double cost_ratio = 0.0;              // bagging run / boosted call
  std::uint64_t boosted_max_updates = 0;
  double quadratic_fraction = 0.0;      // trials with bagging cost >= m²/c
};

void to_json(nlohmann::json& j, const CostReport& r);

/// Bagging at frac 0.02 against boosting calls on `boosted_sample`-sized
/// resamples, both with the perceptron ERM over the adversarial universe.
/// Cost is the proxy updates + examples scanned.
CostReport run_perceptron_complexity(const PerceptronBenchSpec& spec);

double median(std::vector<double> v);

}  // namespace optpac

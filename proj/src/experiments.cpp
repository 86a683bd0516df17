#include "optpac/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "optpac/parallel.hpp"
#include "optpac/rng.hpp"
#include "optpac/subsample.hpp"

namespace optpac {

namespace {

enum Stream : std::uint64_t { kDataset = 11, kLearner = 12, kBoostString = 13 };

bool shape_ok(LearnerKind kind, std::size_t m) {
  switch (kind) {
    case LearnerKind::Optimal: {
      const auto k = exact_log6(m);
      return k && *k >= 1;
    }
    case LearnerKind::Hanneke: return exact_log(4, m).has_value();
    default: return m >= 1;
  }
}

}  // namespace

// --- universes --------------------------------------------------------------

FiniteUniverse build_threshold_universe(std::size_t n, double boundary) {
  if (n == 0) throw BadParams("threshold universe needs n >= 1");
  FiniteUniverse u;
  u.points.reserve(n);
  u.target.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point x(1);
    x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    u.target.push_back(x[0] >= boundary ? +1 : -1);
    u.points.push_back(std::move(x));
  }
  u.probs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  return u;
}

FiniteUniverse build_constant_universe(std::size_t n, Label label) {
  if (!is_label(label)) throw BadParams("constant universe label must be -1 or +1");
  FiniteUniverse u = build_threshold_universe(n, 0.0);
  std::fill(u.target.begin(), u.target.end(), label);
  return u;
}

double separation_margin(const FiniteUniverse& u, const Eigen::VectorXd& w) {
  double best = std::numeric_limits<double>::infinity();
  const double norm = w.norm();
  for (std::size_t i = 0; i < u.size(); ++i)
    best = std::min(best, u.target[i] * w.dot(u.points[i]) / norm);
  return best;
}

FiniteUniverse build_adversarial_universe(std::size_t m) {
  if (m < 10 || m > 10000) throw BadParams("adversarial universe needs 10 <= m <= 10000");
  const double mm = static_cast<double>(m);
  const double m4 = mm * mm * mm * mm;
  FiniteUniverse u;
  u.points.reserve(m);
  for (std::size_t i = 1; i < m; ++i) {
    u.points.push_back(Eigen::Vector3d(0.0, 1.0 - static_cast<double>(i) / m4, 1.0));
    u.target.push_back(-1);
  }
  u.points.push_back(Eigen::Vector3d(std::sqrt(1.0 / mm), 1.0, 1.0));
  u.target.push_back(+1);

  const double p = 250.0 / mm;
  u.probs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), (1.0 - p) / (mm - 1.0));
  u.probs[static_cast<Eigen::Index>(m - 1)] = p;
  if (p >= 1.0) throw BadParams("adversarial universe needs m > 250 for a valid distribution");

  const Eigen::Vector3d witness(1.0, -std::sqrt(1.0 / (2.0 * mm)), 0.0);
  if (!(separation_margin(u, witness) >= std::sqrt(1.0 / (64.0 * mm))))
    throw BadParams("adversarial universe failed its separation check");
  return u;
}

TrainingSequence sample_dataset(const FiniteUniverse& u, std::size_t m, std::uint64_t seed) {
  TrainingSequence::Store items;
  items.reserve(m);
  for (std::size_t i : sample_indices(u, m, seed)) items.push_back(u.example(i));
  return TrainingSequence(std::move(items));
}

Distribution make_distribution(const std::string& id, std::size_t universe_size) {
  if (id == "threshold")
    return {build_threshold_universe(universe_size ? universe_size : 65536), std::make_shared<ThresholdERM>()};
  if (id == "constant")
    return {build_constant_universe(universe_size ? universe_size : 1024), std::make_shared<ThresholdERM>()};
  throw BadParams("unknown distribution '" + id + "' (expected threshold or constant)");
}

// --- sweeps -----------------------------------------------------------------

void SweepSpec::validate() const {
  make_distribution(distribution, 1);
  ScaleProfile::named(scale);
  if (!(delta > 0.0 && delta < 1.0)) throw BadParams("delta must lie in (0,1)");
  if (d == 0) throw BadParams("d must be at least 1");
  if (m_values.empty() || seeds.empty() || learners.empty())
    throw BadParams("sweep needs at least one m, one seed and one learner");
  if (!(bagging_frac >= 0.02 && bagging_frac <= 1.0)) throw BadParams("bagging_frac must lie in [0.02, 1]");
  for (const auto& name : learners) {
    const LearnerKind kind = learner_from_string(name);
    for (std::size_t m : m_values)
      if (!shape_ok(kind, m))
        throw BadParams("learner " + name + " cannot use m = " + std::to_string(m) +
                        (kind == LearnerKind::Optimal ? " (needs 6^k)" : " (needs 4^k)"));
  }
}

void to_json(nlohmann::json& j, const SweepSpec& s) {
  j = {{"distribution", s.distribution}, {"universe_size", s.universe_size},
       {"m_values", s.m_values},         {"delta", s.delta},
       {"d", s.d},                       {"seeds", s.seeds},
       {"learners", s.learners},         {"scale", s.scale},
       {"bagging_frac", s.bagging_frac}, {"jobs", s.jobs},
       {"record_wall_time", s.record_wall_time}, {"output", s.output}};
}

void from_json(const nlohmann::json& j, SweepSpec& s) {
  if (!j.is_object()) throw BadParams("sweep spec must be a JSON object");
  static const std::set<std::string> known{"distribution", "universe_size", "m_values", "delta",
                                           "d", "seeds", "learners", "scale", "bagging_frac",
                                           "jobs", "record_wall_time", "output"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw BadParams("unknown sweep spec key '" + key + "'");
  try {
    if (j.contains("distribution")) j.at("distribution").get_to(s.distribution);
    if (j.contains("universe_size")) j.at("universe_size").get_to(s.universe_size);
    if (j.contains("m_values")) j.at("m_values").get_to(s.m_values);
    if (j.contains("delta")) j.at("delta").get_to(s.delta);
    if (j.contains("d")) j.at("d").get_to(s.d);
    if (j.contains("seeds")) j.at("seeds").get_to(s.seeds);
    if (j.contains("learners")) j.at("learners").get_to(s.learners);
    if (j.contains("scale")) j.at("scale").get_to(s.scale);
    if (j.contains("bagging_frac")) j.at("bagging_frac").get_to(s.bagging_frac);
    if (j.contains("jobs")) j.at("jobs").get_to(s.jobs);
    if (j.contains("record_wall_time")) j.at("record_wall_time").get_to(s.record_wall_time);
    if (j.contains("output")) j.at("output").get_to(s.output);
  } catch (const nlohmann::json::exception& e) {
    throw BadParams(std::string("malformed sweep spec: ") + e.what());
  }
}

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParams("cannot open sweep spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw BadParams("cannot parse sweep spec " + path + ": " + e.what());
  }
  SweepSpec spec = j.get<SweepSpec>();
  spec.validate();
  return spec;
}

TrainReport train_for_sweep(const SweepSpec& spec, const Distribution& dist, LearnerKind kind,
                            std::size_t m, std::uint64_t seed, std::size_t jobs) {
  const TrainingSequence s = sample_dataset(dist.universe, m, derive_seed(seed, {kDataset, m}));
  LearnerConfig cfg;
  cfg.delta = spec.delta;
  cfg.d = spec.d;
  cfg.seed = derive_seed(seed, {kLearner, m});
  cfg.boost.scale = ScaleProfile::named(spec.scale);
  cfg.bagging_frac = spec.bagging_frac;
  cfg.jobs = jobs;
  return train_learner(kind, s, *dist.erm, cfg);
}

std::vector<SweepRow> run_error_sweep(const SweepSpec& spec) {
  spec.validate();
  const Distribution dist = make_distribution(spec.distribution, spec.universe_size);
  dist.universe.validate();

  struct Task {
    LearnerKind kind;
    std::size_t m;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& name : spec.learners)
    for (std::size_t m : spec.m_values)
      for (std::uint64_t seed : spec.seeds) tasks.push_back({learner_from_string(name), m, seed});

  std::vector<SweepRow> rows(tasks.size());
  parallel_for(tasks.size(), spec.jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto start = std::chrono::steady_clock::now();
    const TrainReport report = train_for_sweep(spec, dist, task.kind, task.m, task.seed, 1);
    SweepRow& row = rows[i];
    row.error = exact_error(report.ensemble, dist.universe);
    const auto stop = std::chrono::steady_clock::now();
    row.learner = to_string(task.kind);
    row.m = task.m;
    row.delta = spec.delta;
    row.seed = task.seed;
    row.erm_train_calls = report.ledger.erm_train_calls;
    row.erm_train_examples = report.ledger.erm_train_examples;
    row.inference_calls = report.ledger.inference_calls;
    row.fallbacks = report.fallback_count;
    if (spec.record_wall_time)
      row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  });
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sweep_csv_header() {
  return "learner,m,delta,seed,error,erm_train_calls,erm_train_examples,inference_calls,fallbacks,wall_ms";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << sweep_csv_header() << '\n';
  for (const auto& r : rows)
    os << r.learner << ',' << r.m << ',' << format_double(r.delta) << ',' << r.seed << ','
       << format_double(r.error) << ',' << r.erm_train_calls << ',' << r.erm_train_examples << ','
       << r.inference_calls << ',' << r.fallbacks << ',' << format_double(r.wall_ms) << '\n';
}

nlohmann::json sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  nlohmann::json out = {{"schema_version", kSchemaVersion}, {"spec", spec}};
  auto& arr = out["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    arr.push_back({{"learner", r.learner},
                   {"m", r.m},
                   {"delta", r.delta},
                   {"seed", r.seed},
                   {"error", r.error},
                   {"erm_train_calls", r.erm_train_calls},
                   {"erm_train_examples", r.erm_train_examples},
                   {"inference_calls", r.inference_calls},
                   {"fallbacks", r.fallbacks},
                   {"wall_ms", r.wall_ms}});
  return out;
}

// --- perceptron complexity --------------------------------------------------

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void to_json(nlohmann::json& j, const PerceptronBenchSpec& s) {
  j = {{"m", s.m},
       {"trials", s.trials},
       {"seed", s.seed},
       {"delta", s.delta},
       {"bagging_frac", s.bagging_frac},
       {"boosted_sample", s.boosted_sample},
       {"boosted_calls", s.boosted_calls},
       {"cost_divisor_c", s.cost_divisor_c},
       {"jobs", s.jobs}};
}

void to_json(nlohmann::json& j, const CostReport& r) {
  j = {{"schema_version", kSchemaVersion},
       {"spec", r.spec},
       {"cost_proxy", "perceptron updates + examples scanned"},
       {"trigger_updates", r.trigger_updates},
       {"novikoff_cap", r.novikoff_cap},
       {"triggered_fraction", r.triggered_fraction},
       {"bagging_cost_median", r.bagging_cost_median},
       {"bagging_call_cost_median", r.bagging_call_cost_median},
       {"boosted_call_cost_median", r.boosted_call_cost_median},
       {"cost_ratio", r.cost_ratio},
       {"boosted_max_updates", r.boosted_max_updates},
       {"quadratic_fraction", r.quadratic_fraction}};
  auto& arr = j["trials"] = nlohmann::json::array();
  for (const auto& t : r.trials)
    arr.push_back({{"seed", t.seed},
                   {"bootstraps", t.bootstraps},
                   {"bootstraps_in_case", t.bootstraps_in_case},
                   {"bootstraps_triggered", t.bootstraps_triggered},
                   {"bagging_updates", t.bagging_updates},
                   {"bagging_scans", t.bagging_scans},
                   {"bagging_max_updates", t.bagging_max_updates},
                   {"boosted_updates", t.boosted_updates},
                   {"boosted_scans", t.boosted_scans},
                   {"bagging_ledger", t.bagging_ledger},
                   {"boosted_ledger", t.boosted_ledger},
                   {"error", t.error}});
}

CostReport run_perceptron_complexity(const PerceptronBenchSpec& spec) {
  if (spec.m < 2200) throw BadParams("perceptron complexity runs need m >= 2200");
  if (spec.trials == 0) throw BadParams("perceptron complexity runs need at least one trial");
  if (spec.boosted_calls == 0 || spec.boosted_sample == 0)
    throw BadParams("boosted path needs at least one call of positive size");
  const FiniteUniverse u = build_adversarial_universe(spec.m);
  const std::size_t special = spec.m - 1;

  CostReport report;
  report.spec = spec;
  report.trigger_updates = 4 * spec.m - 4;
  report.novikoff_cap = 256 * spec.m;
  report.trials.resize(spec.trials);
  std::vector<std::vector<double>> call_costs(spec.trials);

  parallel_for(spec.trials, spec.jobs, [&](std::size_t trial) {
    PerceptronTrial& out = report.trials[trial];
    out.seed = derive_seed(spec.seed, {trial});
    const auto idx = sample_indices(u, spec.m, derive_seed(out.seed, {kDataset}));
    TrainingSequence::Store items;
    items.reserve(idx.size());
    for (std::size_t i : idx) items.push_back(u.example(i));
    const TrainingSequence s(std::move(items));

    try {
      std::vector<PerceptronStats> bag_stats;
      const PerceptronERM bag_erm({}, [&](const PerceptronStats& st) { bag_stats.push_back(st); });
      const std::uint64_t bag_seed = derive_seed(out.seed, {kLearner});
      const TrainReport bag = train_bagging(s, bag_erm, spec.delta, spec.bagging_frac, bag_seed);
      out.bagging_ledger = bag.ledger;
      out.bootstraps = bag_stats.size();

      const auto size = static_cast<std::size_t>(
          std::ceil(spec.bagging_frac * static_cast<double>(spec.m) - 1e-9));
      std::vector<std::size_t> picks(size);
      for (std::size_t b = 0; b < bag_stats.size(); ++b) {
        const auto& st = bag_stats[b];
        out.bagging_updates += st.updates;
        out.bagging_scans += st.examples_scanned;
        out.bagging_max_updates = std::max<std::uint64_t>(out.bagging_max_updates, st.updates);
        if (st.updates >= report.trigger_updates) ++out.bootstraps_triggered;
        call_costs[trial].push_back(static_cast<double>(st.updates + st.examples_scanned));

        bootstrap_positions(picks, spec.m, bag_seed, b);
        std::size_t copies = 0;
        for (std::size_t p : picks) copies += idx[p] == special;
        if (copies >= 1 && copies <= 10 && idx[picks.front()] != special) ++out.bootstraps_in_case;
      }

      std::vector<PerceptronStats> boost_stats;
      const PerceptronERM boost_erm({}, [&](const PerceptronStats& st) { boost_stats.push_back(st); });
      BoostPlan plan;
      plan.alpha = boost_alpha(plan.theta, plan.gamma);
      plan.s = spec.boosted_sample;
      plan.n = spec.boosted_calls;
      plan.t = spec.boosted_calls;
      plan.stop_at_t = true;
      const RandomString r(derive_seed(out.seed, {kBoostString}), plan.n, plan.s);
      const BoostResult res = adaboost_sample(s, r, boost_erm, plan);
      out.boosted_ledger = res.ledger;
      for (const auto& st : boost_stats) {
        out.boosted_updates.push_back(st.updates);
        out.boosted_scans.push_back(st.examples_scanned);
        out.boosted_sizes.push_back(st.sample_size);
      }
    } catch (const NonConvergence& e) {
      out.error = e.what();
    }
  });

  std::vector<double> bag_costs, bag_call_costs, boost_costs;
  std::size_t triggered = 0, quadratic = 0;
  const double quad = static_cast<double>(spec.m) * static_cast<double>(spec.m) / spec.cost_divisor_c;
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    bag_costs.push_back(static_cast<double>(t.bagging_cost()));
    bag_call_costs.insert(bag_call_costs.end(), call_costs[i].begin(), call_costs[i].end());
    if (t.triggered()) ++triggered;
    if (static_cast<double>(t.bagging_cost()) >= quad) ++quadratic;
    for (std::size_t c = 0; c < t.boosted_updates.size(); ++c) {
      boost_costs.push_back(static_cast<double>(t.boosted_updates[c] + t.boosted_scans[c]));
      report.boosted_max_updates = std::max(report.boosted_max_updates, t.boosted_updates[c]);
    }
  }
  const double n = static_cast<double>(report.trials.size());
  report.triggered_fraction = static_cast<double>(triggered) / n;
  report.quadratic_fraction = static_cast<double>(quadratic) / n;
  report.bagging_cost_median = median(bag_costs);
  report.bagging_call_cost_median = median(bag_call_costs);
  report.boosted_call_cost_median = median(boost_costs);
  report.cost_ratio = report.boosted_call_cost_median > 0.0
                          ? report.bagging_cost_median / report.boosted_call_cost_median
                          : 0.0;
  return report;
}

}  // namespace optpac

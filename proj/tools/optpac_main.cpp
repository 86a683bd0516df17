// optpac command-line driver: train, eval, sweep, perceptron-bench, verify, bounds.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optpac/analysis.hpp"
#include "optpac/experiments.hpp"
#include "optpac/model_io.hpp"
#include "optpac/subsample.hpp"
#include "optpac/verify.hpp"

using namespace optpac;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  const char* env = std::getenv("OPTPAC_OUT_DIR");
  return env && *env ? env : ".";
}

std::string out_path(const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  return (fs::path(default_out_dir()) / fallback).string();
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void print_config(const std::string& command, const nlohmann::json& config) {
  std::cout << nlohmann::json{{"command", command}, {"config", config}}.dump() << std::endl;
}

// --- train / eval -----------------------------------------------------------

struct TrainArgs {
  std::string learner = "optimal";
  std::string distribution = "threshold";
  std::size_t universe_size = 0;
  std::size_t m = 216;
  double delta = 0.1;
  std::size_t d = 1;
  std::uint64_t seed = 1;
  std::string scale = "paper";
  std::size_t voters = 0;
  double bagging_frac = 1.0;
  std::size_t jobs = 0;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const LearnerKind kind = learner_from_string(a.learner);
  const Distribution dist = make_distribution(a.distribution, a.universe_size);
  LearnerConfig cfg;
  cfg.delta = a.delta;
  cfg.d = a.d;
  cfg.seed = a.seed;
  cfg.boost.scale = ScaleProfile::named(a.scale);
  if (a.voters > 0) cfg.voters_l = a.voters;
  cfg.bagging_frac = a.bagging_frac;
  cfg.jobs = a.jobs;
  const std::string path = out_path(a.out, "model.json");

  std::size_t m_eff = a.m;
  if (kind == LearnerKind::Optimal) m_eff = largest_power_at_most(6, a.m);
  if (kind == LearnerKind::Hanneke) m_eff = largest_power_at_most(4, a.m);
  if (kind == LearnerKind::Optimal && m_eff < 6) throw BadParams("the optimal learner needs m >= 6");

  nlohmann::json config = {{"learner", a.learner},  {"distribution", a.distribution},
                           {"m", a.m},              {"m_effective", m_eff},
                           {"learner_config", cfg}, {"out", path}};
  if (kind == LearnerKind::Optimal) {
    config["voters_l"] = cfg.voters_l ? *cfg.voters_l : default_voters(m_eff, a.delta, a.d);
    config["boost_plan"] = plan_boost(cfg.boost, m_eff, row_size(*exact_log6(m_eff)), a.delta, a.d);
  }
  print_config("train", config);
  if (m_eff != a.m)
    std::cerr << "warning: m = " << a.m << " truncated to " << m_eff << " for learner " << a.learner << "\n";

  const TrainingSequence s = sample_dataset(dist.universe, a.m, a.seed);
  const TrainReport report = train_learner(kind, s, *dist.erm, cfg);
  const nlohmann::json meta = {{"distribution", a.distribution},
                               {"universe_size", dist.universe.size()},
                               {"m", a.m},
                               {"delta", a.delta},
                               {"d", a.d},
                               {"seed", a.seed},
                               {"scale", a.scale}};
  ensure_parent(path);
  save_json(path, model_to_json(report, meta));

  std::cout << nlohmann::json{{"voters", report.ensemble.size()},
                              {"m_effective", report.m_effective},
                              {"ledger", report.ledger},
                              {"fallback_count", report.fallback_count},
                              {"cache_hits", report.cache_hits},
                              {"error", exact_error(report.ensemble, dist.universe)},
                              {"model", path}}
                   .dump()
            << std::endl;
  return 0;
}

int cmd_eval(const std::string& model, const std::string& distribution, std::size_t universe_size) {
  print_config("eval", {{"model", model}, {"distribution", distribution}, {"universe_size", universe_size}});
  const nlohmann::json j = load_json(model);
  const Ensemble e = model_from_json(j);
  const Distribution dist = make_distribution(distribution, universe_size);
  CostLedger ledger;
  predict_ensemble(e, dist.universe.points.front(), ledger);
  std::cout << nlohmann::json{{"voters", e.size()},
                              {"error", exact_error(e, dist.universe)},
                              {"inferences_per_prediction", ledger.inference_calls}}
                   .dump()
            << std::endl;
  return 0;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(SweepSpec spec) {
  spec.validate();
  if (spec.output.empty()) spec.output = "sweep.csv";
  if (fs::path(spec.output).is_relative()) spec.output = (fs::path(default_out_dir()) / spec.output).string();
  print_config("sweep", spec);
  const auto rows = run_error_sweep(spec);
  ensure_parent(spec.output);
  std::ofstream csv(spec.output);
  if (!csv) throw std::runtime_error("cannot write " + spec.output);
  write_sweep_csv(csv, rows);
  const std::string json_path = fs::path(spec.output).replace_extension(".json").string();
  save_json(json_path, sweep_json(spec, rows));
  std::cout << nlohmann::json{{"rows", rows.size()}, {"csv", spec.output}, {"json", json_path}}.dump()
            << std::endl;
  return 0;
}

// --- perceptron -------------------------------------------------------------

int cmd_perceptron(const PerceptronBenchSpec& spec, const std::string& out) {
  const std::string path = out_path(out, "perceptron.json");
  nlohmann::json cfg = spec;
  cfg["out"] = path;
  print_config("perceptron-bench", cfg);
  const CostReport report = run_perceptron_complexity(spec);
  ensure_parent(path);
  save_json(path, report);
  std::cout << nlohmann::json{{"triggered_fraction", report.triggered_fraction},
                              {"boosted_max_updates", report.boosted_max_updates},
                              {"novikoff_cap", report.novikoff_cap},
                              {"bagging_cost_median", report.bagging_cost_median},
                              {"boosted_call_cost_median", report.boosted_call_cost_median},
                              {"cost_ratio", report.cost_ratio},
                              {"report", path}}
                   .dump()
            << std::endl;
  return 0;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const std::vector<std::string>& suites) {
  print_config("verify", {{"suites", suites.empty() ? suite_names() : suites}});
  const auto results = run_verify(suites);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name << " (" << r.checks << " checks)\n";
    for (const auto& f : r.failures) std::cout << "  - " << f << "\n";
    if (!r.passed()) failed.push_back(r.name);
  }
  if (failed.empty()) return 0;
  std::cerr << "failing suites:";
  for (const auto& f : failed) std::cerr << ' ' << f;
  std::cerr << "\n";
  return 1;
}

// --- bounds -----------------------------------------------------------------

struct BoundArgs {
  std::string which = "all";
  std::size_t d = 1;
  std::size_t m = 550;
  double delta = 0.1;
  double gamma = 0.0;  // 0 selects 1/2 for ramp and 9/20 for margin
  double xi = 1.5;
  double C = 1.0;
  double theta = 0.75;
  std::size_t t = 100;
  std::size_t n = 12;
};

int cmd_bounds(const BoundArgs& a) {
  const double ramp_gamma = a.gamma > 0.0 ? a.gamma : 0.5;
  const double boost_gamma = a.gamma > 0.0 ? a.gamma : 0.45;
  print_config("bounds", {{"which", a.which},
                          {"d", a.d},
                          {"m", a.m},
                          {"delta", a.delta},
                          {"ramp_gamma", ramp_gamma},
                          {"boost_gamma", boost_gamma},
                          {"xi", a.xi},
                          {"C", a.C},
                          {"theta", a.theta},
                          {"t", a.t},
                          {"n", a.n}});
  const bool all = a.which == "all";
  if (!all && a.which != "uc" && a.which != "ramp" && a.which != "margin" && a.which != "tail")
    throw BadParams("--which must be uc, ramp, margin, tail or all");
  std::cout.precision(17);
  if (all || a.which == "uc")
    std::cout << "uc\t" << uniform_convergence_bound(a.d, a.m, a.delta) << "\n";
  if (all || a.which == "ramp") {
    const RampSlack r = ramp_generalization_bound(a.d, a.m, a.delta, ramp_gamma, a.xi, a.C);
    std::cout << "ramp.complexity\t" << r.complexity << "\n"
              << "ramp.confidence\t" << r.confidence << "\n"
              << "ramp.total\t" << r.total() << "\n";
  }
  if (all || a.which == "margin") {
    std::cout << "margin.alpha\t" << boost_alpha(a.theta, boost_gamma) << "\n"
              << "margin.base\t" << per_round_bound_base(a.theta, boost_gamma) << "\n"
              << "margin.bound\t" << margin_loss_bound(a.theta, boost_gamma, a.t) << "\n";
  }
  if (all || a.which == "tail") std::cout << "tail\t" << round_success_tail(a.n) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optpac: sample-optimal PAC learner with linear training complexity"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a learner on a sampled dataset and write a model descriptor");
  t->add_option("--learner", train.learner, "optimal | hanneke | bagging | erm")->capture_default_str();
  t->add_option("--distribution", train.distribution, "threshold | constant")->capture_default_str();
  t->add_option("--universe-size", train.universe_size, "points in the finite universe (0 = default)");
  t->add_option("--m", train.m, "sample size")->capture_default_str();
  t->add_option("--delta", train.delta, "failure probability")->capture_default_str();
  t->add_option("--d", train.d, "VC dimension")->capture_default_str();
  t->add_option("--seed", train.seed, "seed")->capture_default_str();
  t->add_option("--scale", train.scale, "paper | desk")->capture_default_str();
  t->add_option("--voters", train.voters, "override l (0 = formula)");
  t->add_option("--bagging-frac", train.bagging_frac, "bootstrap size / m")->capture_default_str();
  t->add_option("--jobs", train.jobs, "worker threads (0 = all cores)");
  t->add_option("--out", train.out, "model descriptor path");

  std::string eval_model, eval_dist = "threshold";
  std::size_t eval_universe = 0;
  auto* e = app.add_subcommand("eval", "exact error of a saved model");
  e->add_option("--model", eval_model, "model descriptor")->required();
  e->add_option("--distribution", eval_dist, "threshold | constant")->capture_default_str();
  e->add_option("--universe-size", eval_universe, "points in the finite universe (0 = default)");

  std::string sweep_config, sweep_out, sweep_scale, sweep_dist;
  std::vector<std::size_t> sweep_m;
  std::vector<std::uint64_t> sweep_seeds;
  std::vector<std::string> sweep_learners;
  double sweep_delta = 0.0;
  std::size_t sweep_jobs = 0;
  bool sweep_wall = false;
  auto* sw = app.add_subcommand("sweep", "error-vs-m sweep; writes CSV and a JSON mirror");
  sw->add_option("--config", sweep_config, "JSON sweep spec");
  sw->add_option("--m", sweep_m, "m ladder");
  sw->add_option("--seeds", sweep_seeds, "seeds");
  sw->add_option("--learners", sweep_learners, "learners");
  sw->add_option("--scale", sweep_scale, "paper | desk");
  sw->add_option("--distribution", sweep_dist, "threshold | constant");
  sw->add_option("--delta", sweep_delta, "failure probability");
  sw->add_option("--jobs", sweep_jobs, "worker threads");
  sw->add_flag("--wall-time", sweep_wall, "record wall_ms (breaks byte-identical output)");
  sw->add_option("--out", sweep_out, "CSV output path");

  PerceptronBenchSpec bench;
  std::string bench_out;
  auto* pb = app.add_subcommand("perceptron-bench", "bagging vs boosting cost with the perceptron ERM");
  pb->add_option("--m", bench.m, "sample size (>= 2200)")->capture_default_str();
  pb->add_option("--trials", bench.trials, "trials")->capture_default_str();
  pb->add_option("--seed", bench.seed, "seed")->capture_default_str();
  pb->add_option("--delta", bench.delta, "failure probability")->capture_default_str();
  pb->add_option("--boosted-calls", bench.boosted_calls, "boosting rounds per trial")->capture_default_str();
  pb->add_option("--cost-divisor", bench.cost_divisor_c, "c in m^2/c")->capture_default_str();
  pb->add_option("--jobs", bench.jobs, "worker threads");
  pb->add_option("--out", bench_out, "JSON report path");

  std::vector<std::string> suites;
  auto* v = app.add_subcommand("verify", "run the invariant suites");
  v->add_option("--suite", suites, "suite name (repeatable)");

  BoundArgs bounds;
  auto* b = app.add_subcommand("bounds", "evaluate closed-form bounds");
  b->add_option("--which", bounds.which, "uc | ramp | margin | tail | all")->capture_default_str();
  b->add_option("--d", bounds.d, "VC dimension")->capture_default_str();
  b->add_option("--m", bounds.m, "sample size")->capture_default_str();
  b->add_option("--delta", bounds.delta, "failure probability")->capture_default_str();
  b->add_option("--gamma", bounds.gamma, "margin gamma (default 0.5 for ramp, 0.45 for margin)");
  b->add_option("--xi", bounds.xi, "ramp xi")->capture_default_str();
  b->add_option("--C", bounds.C, "ramp constant C")->capture_default_str();
  b->add_option("--theta", bounds.theta, "margin theta")->capture_default_str();
  b->add_option("--t", bounds.t, "accepted rounds")->capture_default_str();
  b->add_option("--n", bounds.n, "rounds for the tail bound")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*t) return cmd_train(train);
    if (*e) return cmd_eval(eval_model, eval_dist, eval_universe);
    if (*sw) {
      SweepSpec spec = sweep_config.empty() ? SweepSpec{} : load_sweep_spec(sweep_config);
      if (!sweep_m.empty()) spec.m_values = sweep_m;
      if (!sweep_seeds.empty()) spec.seeds = sweep_seeds;
      if (!sweep_learners.empty()) spec.learners = sweep_learners;
      if (!sweep_scale.empty()) spec.scale = sweep_scale;
      if (!sweep_dist.empty()) spec.distribution = sweep_dist;
      if (sweep_delta > 0.0) spec.delta = sweep_delta;
      if (sweep_jobs > 0) spec.jobs = sweep_jobs;
      if (sweep_wall) spec.record_wall_time = true;
      if (!sweep_out.empty()) spec.output = sweep_out;
      return cmd_sweep(spec);
    }
    if (*pb) return cmd_perceptron(bench, bench_out);
    if (*v) return cmd_verify(suites);
    if (*b) return cmd_bounds(bounds);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}

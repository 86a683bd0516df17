#include "optpac/model_io.hpp"

#include <fstream>
#include <set>
#include <unordered_map>

namespace optpac {

namespace {

const std::set<std::string> kKnownKinds{"threshold", "finite", "halfspace"};

}  // namespace

HypothesisPtr hypothesis_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "threshold")
      return std::make_shared<ThresholdHypothesis>(j.at("boundary").get<double>(),
                                                   j.at("orientation").get<Label>());
    if (kind == "halfspace") {
      const auto w = j.at("weights").get<std::vector<double>>();
      return std::make_shared<HalfspaceHypothesis>(
          Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    }
    if (kind == "finite") {
      auto table = std::make_shared<const LabelTable>(LabelTable{j.at("labels").get<std::vector<Label>>()});
      return std::make_shared<FiniteClassHypothesis>(std::move(table), 0);
    }
    throw BadParams("hypothesis kind '" + kind + "' is not serializable");
  } catch (const nlohmann::json::exception& e) {
    throw BadParams(std::string("malformed hypothesis: ") + e.what());
  }
}

nlohmann::json model_to_json(const TrainReport& report, const nlohmann::json& meta) {
  std::unordered_map<const Hypothesis*, std::size_t> slot;
  nlohmann::json hyps = nlohmann::json::array();
  std::vector<std::size_t> voters;
  voters.reserve(report.ensemble.size());
  for (const auto& h : report.ensemble.voters()) {
    auto [it, inserted] = slot.try_emplace(h.get(), hyps.size());
    if (inserted) {
      nlohmann::json d = h->describe();
      if (!d.contains("kind") || !kKnownKinds.count(d["kind"].get<std::string>()))
        throw BadParams("ensemble holds a hypothesis that cannot be serialized");
      d["trained_on"] = h->trained_on();
      hyps.push_back(std::move(d));
    }
    voters.push_back(it->second);
  }

  nlohmann::json draws = nlohmann::json::array();
  for (const auto& d : report.draws)
    draws.push_back({{"rank", d.rank}, {"z", d.z}, {"branch", to_string(d.branch)}});

  nlohmann::json j = {{"format_version", kModelFormatVersion},
                      {"learner", to_string(report.kind)},
                      {"m_input", report.m_input},
                      {"m_effective", report.m_effective},
                      {"hypotheses", std::move(hyps)},
                      {"voters", voters},
                      {"draws", std::move(draws)},
                      {"ledger", report.ledger},
                      {"boost_runs", report.boost_runs},
                      {"fallback_count", report.fallback_count},
                      {"cache_hits", report.cache_hits}};
  j["plan"] = report.plan ? nlohmann::json(*report.plan) : nlohmann::json(nullptr);
  if (!meta.is_null()) j["meta"] = meta;
  return j;
}

Ensemble model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion)
      throw BadParams("unsupported model format version");
    std::vector<HypothesisPtr> hyps;
    for (const auto& h : j.at("hypotheses")) hyps.push_back(hypothesis_from_json(h));
    std::vector<HypothesisPtr> voters;
    for (const auto& v : j.at("voters")) {
      const auto i = v.get<std::size_t>();
      if (i >= hyps.size()) throw BadParams("voter index outside hypothesis table");
      voters.push_back(hyps[i]);
    }
    return Ensemble(std::move(voters));
  } catch (const nlohmann::json::exception& e) {
    throw BadParams(std::string("malformed model descriptor: ") + e.what());
  }
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadParams("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BadParams("cannot parse " + path + ": " + e.what());
  }
}

}  // namespace optpac

#pragma once

#include <string>

#include "optpac/learner.hpp"

namespace optpac {

inline constexpr int kModelFormatVersion = 1;

/// Versioned descriptor: distinct hypotheses once each, the voter list as
/// indices into them, the row/voter draws, the ledger and the resolved plan.
/// Throws BadParams for hypotheses whose describe() has no known "kind".
nlohmann::json model_to_json(const TrainReport& report, const nlohmann::json& meta = {});

/// Rebuilds the ensemble from a descriptor.
Ensemble model_from_json(const nlohmann::json& j);

/// Rebuilds a single hypothesis from its describe() output.
HypothesisPtr hypothesis_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace optpac

#pragma once

// nlohmann::json bindings for the public value types. Enums serialize as the
// same lower-case names the CLI accepts.

#include <nlohmann/json.hpp>

#include "nuqs/fisher.hpp"
#include "nuqs/medium.hpp"
#include "nuqs/montecarlo.hpp"
#include "nuqs/optimizer.hpp"
#include "nuqs/probe_state.hpp"
#include "nuqs/sweep.hpp"

namespace nuqs {

void to_json(nlohmann::json& j, const ProbeState& s);
void from_json(const nlohmann::json& j, ProbeState& s);
void to_json(nlohmann::json& j, const QuadratureStats& s);
void to_json(nlohmann::json& j, const Medium& m);
void from_json(const nlohmann::json& j, Medium& m);
void to_json(nlohmann::json& j, const Response& r);
void to_json(nlohmann::json& j, const FisherBreakdown& f);

void to_json(nlohmann::json& j, const SearchBounds& b);
void from_json(const nlohmann::json& j, SearchBounds& b);
void to_json(nlohmann::json& j, const OptimizerConfig& c);
void to_json(nlohmann::json& j, const OptimizationResult& r);
void to_json(nlohmann::json& j, const AdvantageResult& a);

void to_json(nlohmann::json& j, const AxisSpec& a);
void from_json(const nlohmann::json& j, AxisSpec& a);
void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);
void to_json(nlohmann::json& j, const SweepCell& c);
void from_json(const nlohmann::json& j, SweepCell& c);
void to_json(nlohmann::json& j, const SweepTable& t);
void from_json(const nlohmann::json& j, SweepTable& t);

void to_json(nlohmann::json& j, const SimConfig& c);
void to_json(nlohmann::json& j, const EstimatorReport& r);

/// FNV-1a over the compact JSON dump, as 16 hex digits.
std::string content_hash(const nlohmann::json& j);

}  // namespace nuqs

#pragma once

#include <string>

#include "json.hpp"

#include "hjdebt/asymptotics.hpp"
#include "hjdebt/simulator.hpp"

namespace hjdebt {

/// Arcs with every dense step, so a reloaded solution evaluates bit-identically.
nlohmann::json solution_to_json(const EquilibriumSolution& sol);
/// Rebuilds a solution written by solution_to_json. Throws Config on malformed input.
EquilibriumSolution solution_from_json(const nlohmann::json& j, const ModelParams& m,
                                       const CostModel& c);

nlohmann::json verify_report_to_json(const VerifyReport& r);
nlohmann::json sweep_to_json(const SweepResult& r);

StopReason stop_reason_from_string(const std::string& s);

}  // namespace hjdebt

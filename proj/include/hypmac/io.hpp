#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "hypmac/experiments.hpp"

namespace hypmac {

/// Numbers in every CSV and text table use %.8g.
std::string format_number(double x);

void write_diagnostics_csv(std::ostream& os, const SimulationResult& result);
/// Columns x, u, v.
void write_state_csv(std::ostream& os, const PdeState& state);
/// Columns t, h_j..., hdot_j..., L_plus, L_minus, Psi; hdot is the model velocity for first-order models.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, const LayerSystem& system);
/// Columns x, u, du.
void write_profile_csv(std::ostream& os, const MetastableProfile& profile);
void write_metastability_csv(std::ostream& os, const MetastabilityReport& report);
void write_asymptotics_csv(std::ostream& os, const AsymptoticsReport& report);
void write_tau_csv(std::ostream& os, const TauLimitReport& report);
/// Layer positions of both methods at the common sample times.
void write_comparison_csv(std::ostream& os, const ComparisonReport& report);

struct ConstantsReport {
  double c_f = 0.0;
  WaveConstants waves;
  double gamma = 0.0;
  double sigma = 0.0;
};
ConstantsReport constants_report(const RunConfig& config);

nlohmann::json to_json(const ConstantsReport& r);
nlohmann::json to_json(const MetastableProfile& p, const RunConfig& config);
nlohmann::json to_json(const SimulationResult& r, const RunConfig& config);
nlohmann::json to_json(const Trajectory& r, const RunConfig& config);
nlohmann::json to_json(const ComparisonReport& r);
nlohmann::json to_json(const MetastabilityReport& r);
nlohmann::json to_json(const AsymptoticsReport& r, const RunConfig& config);
nlohmann::json to_json(const TauLimitReport& r);

/// Aligned-column summaries for the terminal.
std::string to_text(const ConstantsReport& r);
std::string to_text(const ComparisonReport& r);
std::string to_text(const MetastabilityReport& r);
std::string to_text(const AsymptoticsReport& r);
std::string to_text(const TauLimitReport& r);

/// Writes text to dir/name, creating dir. Throws Error(IoError).
std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& content);

}  // namespace hypmac

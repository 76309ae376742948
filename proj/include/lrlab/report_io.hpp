#pragma once

#include <string>

#include <json.hpp>

#include "lrlab/experiments.hpp"

namespace lrlab {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const BoundConstants& bc);
BoundConstants constants_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AssumptionReport& r);
nlohmann::json to_json(const SamplerSpec& s);

nlohmann::json to_json(const LRReport& r);
nlohmann::json to_json(const OnsetReport& r);
nlohmann::json to_json(const EnvelopeReport& r);
nlohmann::json to_json(const ConvergenceReport& r);
nlohmann::json to_json(const InteractionPictureReport& r);

/// Everything lr_rhs needs, stored at full round-trip precision.
struct RhsInputs {
  BoundConstants constants;
  double f_c1 = 0.0, g_c1 = 0.0, D_XY = 0.0;
};
RhsInputs rhs_inputs(const LRReport& r);
nlohmann::json to_json(const RhsInputs& in);
RhsInputs rhs_inputs_from_json(const nlohmann::json& j);

/// Columns: t, lhs_measured, rhs_sinh, rhs_exp, rhs_corollary_best_mu.
std::string lr_csv(const LRReport& r);
/// Columns: dist, target, t, lhs_measured.
std::string onset_csv(const OnsetReport& r);
/// Columns: kind, j, k, t, measured, envelope.
std::string envelope_csv(const EnvelopeReport& r);
/// Columns: step, inner_sites, outer_sites, t, sup_diff.
std::string convergence_csv(const ConvergenceReport& r);
/// Columns: t, discrepancy, gamma_deviation.
std::string interaction_picture_csv(const InteractionPictureReport& r);

/// Run metadata kept apart from the reports so reports stay byte-reproducible.
nlohmann::json run_metadata(const std::string& command, const std::string& config_path, const SamplerSpec& sampler);

/// Creates parent directories. Throws std::runtime_error on I/O failure.
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace lrlab

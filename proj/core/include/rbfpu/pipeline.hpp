// Batch run: discretize, eliminate, continue in Re, post-process, write files.
//
// Exit codes: 0 all stages converged, 1 configuration or assembly error,
// 2 a stage did not converge (files are still written for the last converged
// stage, and metrics.json carries "converged": false).

#ifndef RBFPU_PIPELINE_HPP
#define RBFPU_PIPELINE_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbfpu/config.hpp"
#include "rbfpu/flow.hpp"
#include "rbfpu/trust_region.hpp"

namespace rbfpu {

struct StageResult {
  double re = 0.0;
  SolveReport report;
  std::optional<FlowMetrics> metrics;  // converged stages only
};

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<StageResult> stages;
  std::optional<FlowSolution> solution;  // last converged stage
  std::vector<std::filesystem::path> written;
};

/// Runs the whole pipeline. Progress goes to `log` when non-null.
RunOutcome run(const RunConfig& cfg, std::ostream* log = nullptr);

/// File writers, also used by run(). CSV files start with a "# config:" line;
/// metrics.json carries the same settings under "config".
void write_metrics_json(const std::filesystem::path& path, const RunConfig& cfg, const RunOutcome& out);
void write_surface_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol);
void write_field_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol);
void write_residuals_csv(const std::filesystem::path& path, const RunConfig& cfg, const FlowSolution& sol);

}  // namespace rbfpu

#endif  // RBFPU_PIPELINE_HPP

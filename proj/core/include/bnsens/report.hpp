#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnsens/admissible.hpp"
#include "bnsens/sensitivity.hpp"

namespace bnsens {

/// Thresholds and knobs for report building and parameter selection.
/// The selection thresholds are defaults, not claims; tune per study.
struct AnalysisConfig {
  double vertex_delta = 0.1;   // vertex-proximity threshold
  double rho_abs = 0.05;       // absolute deviation-smallness threshold
  double rho_rel = 1.0;        // relative deviation multiplier (of x0)
  int sample_steps = 101;
  double fit_tol = 1e-9;
  std::uint64_t enum_cap = std::uint64_t{1} << 22;
  int threads = 0;  // 0 = hardware concurrency
  CovaryFallback fallback = CovaryFallback::error;

  void check() const;  // throws invalid-argument unless all thresholds > 0
};

inline constexpr const char* kFlagHighSensitivity = "HIGH_SENSITIVITY";
inline constexpr const char* kFlagVertexProximity = "VERTEX_PROXIMITY";
inline constexpr const char* kFlagSmallDeviation = "SMALL_DEVIATION";

/// A sensitivity bundle detached from any network: parameter spelling,
/// assessment, and the per-value functions. This is what reports carry and
/// what constants-replay reconstructs.
struct NamedBundle {
  std::string parameter_spec;
  std::string target;
  std::vector<std::string> value_names;
  double x0 = 0.0;
  std::vector<RationalLinearFunction> functions;

  FunctionBundle to_function_bundle() const;
};

/// Per-target-value slice of a report entry.
struct ValueReport {
  std::string value;
  double a = 0.0;
  double b = 0.0;
  FunctionClass cls = FunctionClass::constant;
  std::optional<double> sensitivity;  // absent when x0 sits on a pole
  std::optional<VertexInfo> vertex;   // hyperbolic values only
};

/// Everything the analysis knows about one parameter.
struct ReportEntry {
  std::string parameter_spec;
  double x0 = 0.0;
  double c = 0.0;
  double d = 0.0;
  std::vector<ValueReport> values;
  double max_sensitivity = 0.0;
  std::optional<AdmissibleDeviation> deviation;
  std::vector<std::string> selection_flags;
  std::vector<std::string> degenerate_flags;

  bool selected() const { return !selection_flags.empty(); }
  bool all_constant() const;
};

struct ReportDocument {
  std::string network;
  std::optional<std::string> case_id;
  std::string target;
  std::optional<std::string> target_value;
  std::size_t parameters_analyzed = 0;
  std::size_t constant_only = 0;
  std::vector<ReportEntry> entries;
};

/// Flag annotation per the selection criteria: HIGH_SENSITIVITY when the
/// largest sensitivity value exceeds 1, VERTEX_PROXIMITY when some
/// hyperbolic vertex with x_hat in [-delta, 1+delta] lies within delta of
/// x0, SMALL_DEVIATION when the smallest finite deviation bound is below
/// max(rho_abs, rho_rel * x0).
void annotate_selection(ReportEntry& entry, const AnalysisConfig& config);

/// Returns the flagged subset (entries with at least one selection flag),
/// annotating every input entry on the way.
std::vector<ReportEntry> select_parameters(std::vector<ReportEntry> entries,
                                           const AnalysisConfig& config);

/// Deterministic report serialization: entries ordered by descending max
/// sensitivity value, parameter spelling as tie-break; keys sorted; byte
/// output independent of input entry order.
std::string write_report(const ReportDocument& doc);
std::string write_report(const std::vector<ReportEntry>& entries);

/// Round-trips a report back into memory.
ReportDocument read_report(std::string_view text);

/// Multi-case batch document: the per-case reports in case order plus a
/// cross-case summary counting how often each parameter was selected.
std::string write_batch_report(const std::vector<ReportDocument>& docs);

/// Reconstructs replayable bundles from a report document (entries carry
/// the full constants, so no network is needed).
std::vector<NamedBundle> replay_bundles(const ReportDocument& doc);

}  // namespace bnsens

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bnsens/model.hpp"
#include "bnsens/netparse.hpp"
#include "bnsens/report.hpp"

namespace bnsens {

/// Fits one parameter and folds the result into a report entry; admissible
/// deviations are attached when with_deviation is set. Analysis-level
/// degeneracies (poles, ties) surface as per-entry flags, not failures.
ReportEntry analyze_parameter(const Network& net, const ParameterRef& p,
                              int target, const Evidence& e,
                              const AnalysisConfig& config,
                              bool with_deviation);

/// Entry building for a detached bundle (constants replay).
ReportEntry analyze_bundle(const NamedBundle& bundle,
                           const AnalysisConfig& config, bool with_deviation);

/// Full analysis over a parameter list. Parameters are processed
/// concurrently over the shared immutable network (config.threads workers);
/// results land in input order, so output is independent of scheduling.
/// Entries whose bundle is entirely constant are counted but not listed.
ReportDocument analyze_network(const Network& net,
                               const std::optional<CaseDocument>& case_doc,
                               int target, std::optional<int> target_value,
                               const std::vector<ParameterRef>& params,
                               const AnalysisConfig& config,
                               bool with_deviation);

/// "x,<value1>,...,<valuek>" CSV of the bundle sampled at `steps` equispaced
/// points of [0,1]. Rows where the denominator vanishes emit empty value
/// cells plus a trailing "pole" marker cell. steps must be at least 2.
std::string sample_csv(const NamedBundle& bundle, int steps);

/// Target spelling "Var" or "Var=value".
struct TargetSpec {
  int variable = -1;
  std::optional<int> value;
};
TargetSpec parse_target_spec(const Network& net, std::string_view spec);

}  // namespace bnsens

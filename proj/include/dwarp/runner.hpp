#pragma once

#include "dwarp/check_report.hpp"
#include "dwarp/scenario.hpp"

namespace dwarp {

struct RunOptions {
  std::uint64_t seed = 12345;
  std::optional<double> tol_override;   // replaces every check tolerance
  std::optional<int> points_override;   // replaces the scenario's sample count
  int budget = 128;                     // plane-sampling budget
  std::vector<std::string> only_checks; // empty = every requested check
};

/// Runs the scenario's requested checks on seeded sample points. The isometry
/// check acts as a gate: when it fails, every check that presupposes an
/// isometric immersion is marked skipped instead of running on garbage. A
/// failure inside one check is recorded as its own error verdict and never
/// aborts the siblings. Reports are deterministic: the same file and options
/// give byte-identical output.
CheckReport run_checks(const ScenarioFile& file, const RunOptions& opts = {});

struct CheckInfo {
  std::string name;
  std::string statement;
  std::vector<std::string> ops;  // engine operations the check exercises
  double default_tol = 1e-6;
  bool needs_c = false;
  bool needs_hypothesis = false;
  bool needs_isometry = true;  // skipped when the isometry gate fails
};

/// All known checks, in report order.
const std::vector<CheckInfo>& check_registry();
const CheckInfo* find_check(const std::string& name);

struct BundledScenario {
  std::string name;
  std::string text;
};

/// The scenario library shipped with the engine; each entry is a complete
/// scenario file.
const std::vector<BundledScenario>& bundled_scenarios();
const BundledScenario* find_bundled(const std::string& name);

}  // namespace dwarp

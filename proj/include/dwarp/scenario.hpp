#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dwarp/chen_inequality.hpp"

namespace dwarp {

/// Load-time diagnostic carrying the file, line and section of the problem.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& where, int line, const std::string& what)
      : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct CheckRequest {
  std::string name;
  std::optional<double> tol;
};

struct SampleSpec {
  enum class Kind { kRandom, kGrid };
  Kind kind = Kind::kRandom;
  int count = 12;       // random draws, or points per axis for a grid
  double margin = 0.05;  // relative domain margin
};

/// A parsed and structurally validated scenario file: the composed immersion
/// scenario, hypothesis tags, the sampling specification and the check list.
/// Isometry is deliberately not enforced at load time; the isometry check
/// gates the theorem checks at run time instead.
struct ScenarioFile {
  std::string name;
  std::string source;  // path or label, for diagnostics
  DwpImmersionScenario scenario;
  HypothesisTags hypothesis;
  SampleSpec samples;
  std::vector<CheckRequest> checks;
};

/// Parses the sectioned line format:
///   [manifold NAME]   dim, coords, g i j = "expr", bound c = (a, b)
///   [warp NAME]       factor1, factor2, f1 = "expr", f2 = "expr"
///   [immersion NAME]  source, target, comp k = "expr"
///   [scenario NAME]   phi1, phi2, ambient, c, hypothesis, samples, margin
///   [checks]          check = NAME [tol]
/// Undeclared references, dimension mismatches, non-positive warps and
/// malformed expressions are reported with the offending line.
ScenarioFile load_scenario(const std::string& path);
ScenarioFile load_scenario_text(const std::string& text, const std::string& label);

}  // namespace dwarp

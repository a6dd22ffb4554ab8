#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dwarp {

inline constexpr const char* kEngineVersion = "dwarp 0.1.0";

/// One verified statement at one point (or aggregated over the sample set,
/// in which case point is "-"). Verdicts are recomputable from the stored
/// residual and tolerance.
struct CheckRecord {
  std::string check;
  std::string statement;
  std::string point = "-";
  std::vector<std::pair<std::string, double>> values;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string verdict;  // pass | fail | skipped | indeterminate | error
  std::string note;
};

struct CheckSummary {
  int pass = 0;
  int fail = 0;
  int skipped = 0;
  int indeterminate = 0;
  int error = 0;
};

/// A full scenario run: named records in registry order, plus the engine
/// version and seed needed to reproduce it byte for byte.
struct CheckReport {
  std::string scenario;
  std::string engine = kEngineVersion;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;

  CheckSummary summary() const;
  /// True when no record failed or errored.
  bool all_passed() const;

  std::string to_text() const;
  /// Machine format: one object per record, stable field order.
  std::string to_json() const;
  static CheckReport from_json(const std::string& text);
};

}  // namespace dwarp

#include "dwarp/check_report.hpp"

#include <json.hpp>

#include <cstdio>

namespace dwarp {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

CheckSummary CheckReport::summary() const {
  CheckSummary s;
  for (const CheckRecord& r : records) {
    if (r.verdict == "pass") ++s.pass;
    else if (r.verdict == "fail") ++s.fail;
    else if (r.verdict == "skipped") ++s.skipped;
    else if (r.verdict == "indeterminate") ++s.indeterminate;
    else ++s.error;
  }
  return s;
}

bool CheckReport::all_passed() const {
  const CheckSummary s = summary();
  return s.fail == 0 && s.error == 0;
}

std::string CheckReport::to_text() const {
  std::string out;
  out += "scenario " + scenario + " (" + engine + ", seed " + std::to_string(seed) + ")\n";
  for (const CheckRecord& r : records) {
    out += "  [" + r.verdict + "] " + r.check;
    if (r.point != "-") out += " @ " + r.point;
    out += ": " + r.statement + "\n";
    out += "      residual " + fmt(r.residual) + "  tol " + fmt(r.tolerance);
    for (const auto& [k, v] : r.values) out += "  " + k + "=" + fmt(v);
    if (!r.note.empty()) out += "  (" + r.note + ")";
    out += "\n";
  }
  const CheckSummary s = summary();
  out += "summary: " + std::to_string(s.pass) + " pass, " + std::to_string(s.fail) +
         " fail, " + std::to_string(s.skipped) + " skipped, " +
         std::to_string(s.indeterminate) + " indeterminate, " + std::to_string(s.error) +
         " error\n";
  return out;
}

std::string CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["engine"] = engine;
  j["seed"] = seed;
  j["records"] = nlohmann::ordered_json::array();
  for (const CheckRecord& r : records) {
    nlohmann::ordered_json jr;
    jr["check"] = r.check;
    jr["statement"] = r.statement;
    jr["point"] = r.point;
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (const auto& [k, v] : r.values) values.push_back({{"name", k}, {"value", v}});
    jr["values"] = values;
    jr["residual"] = r.residual;
    jr["tolerance"] = r.tolerance;
    jr["verdict"] = r.verdict;
    jr["note"] = r.note;
    j["records"].push_back(jr);
  }
  const CheckSummary s = summary();
  j["summary"] = {{"pass", s.pass},
                  {"fail", s.fail},
                  {"skipped", s.skipped},
                  {"indeterminate", s.indeterminate},
                  {"error", s.error}};
  return j.dump(2) + "\n";
}

CheckReport CheckReport::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CheckReport report;
  report.scenario = j.at("scenario").get<std::string>();
  report.engine = j.at("engine").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& jr : j.at("records")) {
    CheckRecord r;
    r.check = jr.at("check").get<std::string>();
    r.statement = jr.at("statement").get<std::string>();
    r.point = jr.at("point").get<std::string>();
    for (const auto& jv : jr.at("values"))
      r.values.emplace_back(jv.at("name").get<std::string>(), jv.at("value").get<double>());
    r.residual = jr.at("residual").get<double>();
    r.tolerance = jr.at("tolerance").get<double>();
    r.verdict = jr.at("verdict").get<std::string>();
    r.note = jr.at("note").get<std::string>();
    report.records.push_back(std::move(r));
  }
  return report;
}

}  // namespace dwarp

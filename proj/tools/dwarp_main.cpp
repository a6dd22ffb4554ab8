#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "dwarp/runner.hpp"

namespace {

int run_check(const std::string& file, const dwarp::RunOptions& opts,
              const std::string& format) {
  dwarp::ScenarioFile scenario;
  try {
    scenario = dwarp::load_scenario(file);
  } catch (const dwarp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    const dwarp::CheckReport report = dwarp::run_checks(scenario, opts);
    std::cout << (format == "json" ? report.to_json() : report.to_text());
    return report.all_passed() ? 0 : 1;
  } catch (const dwarp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_bundled(const std::string& name) {
  if (name.empty()) {
    for (const dwarp::BundledScenario& b : dwarp::bundled_scenarios())
      std::cout << b.name << "\n";
    return 0;
  }
  const dwarp::BundledScenario* b = dwarp::find_bundled(name);
  if (!b) {
    std::cerr << "error: no bundled scenario named '" << name << "'\n";
    return 2;
  }
  std::cout << b->text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dwarp: numerical verification of doubly warped product immersions"};
  app.require_subcommand(1);

  std::string file;
  std::string format = "text";
  std::string bundled_name;
  dwarp::RunOptions opts;
  double tol = 0.0;
  int points = 0;

  CLI::App* check = app.add_subcommand("check", "run the checks of a scenario file");
  check->add_option("file", file, "scenario file path")->required();
  check->add_option("--seed", opts.seed, "sample seed (default 12345)");
  CLI::Option* tol_opt =
      check->add_option("--tol", tol, "override every check tolerance");
  CLI::Option* points_opt =
      check->add_option("--points", points, "override the scenario's sample count");
  check->add_option("--budget", opts.budget, "plane-sampling budget (default 128)")
      ->check(CLI::Range(64, 1 << 20));
  check->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  check->add_option("--check", opts.only_checks, "run only the named checks")
      ->take_all();

  CLI::App* bundled =
      app.add_subcommand("bundled", "list bundled scenarios, or print one by name");
  bundled->add_option("name", bundled_name, "scenario name to print");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) {
    if (*tol_opt) opts.tol_override = tol;
    if (*points_opt) opts.points_override = points;
    return run_check(file, opts, format);
  }
  return run_bundled(bundled_name);
}

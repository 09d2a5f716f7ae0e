// Acceptance suite: one PASS/FAIL line per criterion, details of failing
// checks below it. Exit status 0 iff every criterion passes.
//
//   acceptance [--scale ci|smoke] [--only 3,7] [--seed N] [--json report.json]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gfflab/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gff-lab acceptance suite"};
  gfflab::AcceptanceOptions opt;
  std::vector<int> only;
  std::string json_path;
  app.add_option("--scale", opt.scale, "ci or smoke")->check(CLI::IsMember({"ci", "smoke"}));
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, gfflab::kCriterionCount));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--sigma", opt.sigma, "sigma multiplier");
  app.add_option("--json", json_path, "write every report to this file");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  nlohmann::json doc = nlohmann::json::array();
  gfflab::run_acceptance(opt, only, [&](const gfflab::Criterion& c) {
    std::cout << gfflab::summary_line(c) << std::endl;
    for (const auto& r : c.reports)
      if (!r.pass) std::cout << "    failed: " << nlohmann::json(r).dump() << "\n";
    all = all && c.pass();
    doc.push_back({{"criterion", c.id}, {"title", c.title}, {"pass", c.pass()}, {"reports", c.reports}});
  });
  if (!json_path.empty()) std::ofstream(json_path) << doc.dump(2) << "\n";
  std::cout << (all ? "acceptance: all criteria pass" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}

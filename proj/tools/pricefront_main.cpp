#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pricefront/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heat-equation price front: solver, finite-difference oracle and particle check"};
  app.require_subcommand(1);

  std::string scenario;
  auto* run = app.add_subcommand("run", "Run every stage requested by a scenario file");
  run->add_option("scenario", scenario, "Scenario file")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse a scenario and check its initial data without solving");
  validate->add_option("scenario", validate_path, "Scenario file")->required();

  std::string dir_a, dir_b, solver_a, solver_b;
  auto* compare = app.add_subcommand("compare", "Difference report between two run directories");
  compare->add_option("dir_a", dir_a, "First run directory")->required();
  compare->add_option("dir_b", dir_b, "Second run directory")->required();
  compare->add_option("--solver-a", solver_a, "Trajectory to read from dir_a (picard or fd)");
  compare->add_option("--solver-b", solver_b, "Trajectory to read from dir_b (picard or fd)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pricefront::cli::kExitConfig;
  }

  if (*run) return pricefront::cli::run(scenario, std::cerr);
  if (*validate) return pricefront::cli::validate(validate_path, std::cout);
  return pricefront::cli::compare(dir_a, dir_b, solver_a, solver_b, std::cout, std::cerr);
}

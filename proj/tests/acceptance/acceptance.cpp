// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "ote/validation.hpp"

int main(int argc, char** argv) {
  ote::ValidationOptions options;
  // optional comma-separated subset, e.g. "acceptance 1,2,5"
  if (argc > 1) {
    std::istringstream in(argv[1]);
    for (std::string id; std::getline(in, id, ',');) options.only.push_back(std::atoi(id.c_str()));
  }
  options.on_result = [](const ote::CriterionResult& r) { std::cout << ote::format_result(r) << std::endl; };
  int failures = 0;
  for (const auto& r : ote::run_acceptance(options)) failures += !r.pass;
  std::cout << (failures ? "FAILED: " + std::to_string(failures) + " criteria" : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}

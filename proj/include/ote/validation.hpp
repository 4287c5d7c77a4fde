#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ote/neq_force.hpp"

namespace ote {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

struct ValidationOptions {
  std::vector<int> only;        // empty = all of 1..10
  bool tamper_branch = false;   // negative control: wrong kz branch in the grating layer
  int workers = 1;
  std::function<void(const CriterionResult&)> on_result;
};

// Silica grating on a 9 um silica layer facing a semi-infinite silicon grating;
// D = 1 um, h = 1 um.
GratingPair reference_gratings(double filling = 0.5);

std::vector<CriterionResult> run_acceptance(const ValidationOptions& options);
std::string format_result(const CriterionResult& r);

}  // namespace ote

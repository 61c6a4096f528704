#pragma once

#include <string>
#include <vector>

namespace petc {

struct ProcessResult {
  std::string output;  // stdout and stderr interleaved
  int exit_status = -1;
  bool timed_out = false;
};

// Runs argv[0] (PATH lookup), feeds `input` on stdin, collects output.
// Kills the child once `budget_s` seconds have passed. Throws SolverTransportError if it cannot start.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, double budget_s);

}  // namespace petc

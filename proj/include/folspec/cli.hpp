#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "folspec/report.hpp"

namespace folspec {

/// One invocation, resolved from the command line and an optional config
/// file.  Flags win over config values.
struct CommandPlan {
  std::string command;
  ModelDescriptor descriptor;
  bool model_given = false;
  std::vector<WeightLiteral> weights;
  int count = 0;        // 0 -> per-command default
  double tolerance = 0.0;
  std::string out_path;
  std::string format = "table";
  std::string help_text;  // set when command == "help"
};

/// Parse arguments (without the program name).  Throws Error on bad usage.
CommandPlan parse_invocation(const std::vector<std::string>& args);

/// Execute a plan, writing the chosen rendering to stdout or the --out file.
/// Returns the process exit code.
int run_plan(const CommandPlan& plan, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map errors to exit codes.
int run_cli(int argc, char** argv);

/// pass -> 0, fail -> 1, inconclusive -> 3.
int exit_code_for_verdict(const std::string& verdict);
/// Input rejections -> 2, numerical trouble -> 4.
int exit_code_for_error(ErrorKind kind);

}  // namespace folspec

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sharpmin::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInputError = 2, kConfigGuard = 3 };

struct RunConfig {
  std::string subcommand;
  std::string input;
  std::string functional;  // metric / probe on metric spaces and trees
  std::string mcshane;     // probe: McShane anchors file
  std::string phi;         // probe: distance-combination file (trees)
  std::string out = ".";
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string tilt;        // "x,y[,z]"
  std::string dual_range = "auto";
  std::size_t dual_resolution = 0;  // 0: same as the primal grid
  std::string refine;      // "h1,h2,..."
  std::optional<double> delta;
  std::optional<double> gamma;
  std::string ekeland;     // "eps,lambda,start"
  std::string check;       // cat0 | gconv | prop2 | thm2
  std::optional<double> spacing;  // tree sampling spacing
};

/// Parses "a,b,c" into numbers; throws InputError on junk.
std::vector<double> parse_list(const std::string& text, const char* what);

/// Runs one subcommand; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharpmin::cli

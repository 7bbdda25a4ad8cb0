#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dce_sphere/spectrum.hpp"

namespace dce::cli {

enum ExitCode { kOk = 0, kValidationError = 1, kNumericalFailure = 2 };

/// Parsed and validated command line.
struct RunConfig {
  std::string command;
  std::optional<std::string> bc;      // dd | nd | dn
  std::optional<std::string> moving;  // inner | outer
  double r_inner = 1.0;
  double r_outer = 2.0;
  std::optional<int> l;
  std::optional<int> s;
  std::optional<int> l_max;  // map default 7, particles default 0
  std::optional<int> s_max;
  double epsilon = 1e-3;
  std::optional<double> varpi;
  std::optional<double> duration;
  std::string grid = "0:3:0.1";
  std::string format = "csv";
  std::string out;
  std::optional<double> tol;
  std::string method = "perturbative";
  std::string trajectory;
  int workers = 1;
};

/// Grid "a:b:step" expanded to a, a + step, ... <= b.
std::vector<double> parse_grid(const std::string& spec);

/// Boundary arrangement from --bc/--moving; throws DomainError when the
/// combination puts the Neumann condition on the moving shell.
BoundaryConfig resolve_config(const std::string& bc, const std::optional<std::string>& moving);

/// Runs one command. Every diagnostic goes to err; data goes to out unless
/// --out names a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dce::cli

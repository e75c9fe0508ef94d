#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "kalg/io.hpp"

namespace kalg {

// CLI exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolverFailure = 3;

/// Flat, fully serializable description of one job; a run is a pure
/// function of its RunConfig.  Unknown keys are rejected.
struct RunConfig {
  // grid
  int c = 1;
  double A = 1.0;
  int N = 16;
  int d = 1;
  // instance family and its parameters (a, lambda, eps, b, rho, shift, W)
  std::string family;
  std::map<std::string, double> params;
  // job
  std::string method = "dense";  // neumann | dense | fourier | all
  double tol = 1e-8;
  std::string out;
  std::string in;       // kernel input (invert)
  std::string diffop;   // optional diffop input (invert -> D+N route)
  std::string in_n;     // verify inputs
  std::string in_m;
  std::string in_a;     // compose inputs
  std::string in_b;
  std::string run_dir;  // report input
  std::uint64_t seed = 0;

  /// Flat key=value serialization (deterministic order); the manifest
  /// written next to every run's outputs.
  std::string to_kv() const;
  static RunConfig from_kv(const std::string& text);
};

/// Builds the kernel instance named by config.family on config's grid.
/// Families: conv-exp (a*exp(-lambda*|w*h|)), conv-box (a*[|w*h| <= b]),
/// modulated ((1+eps*sin(pi*x/A)) * conv-exp), matrix-d2 (rotation blocks).
Kernel gen_kernel_family(const RunConfig& config);

/// diffop-geom family: I + rho * S_shift.
DiffOp gen_diffop_family(const RunConfig& config);

int cmd_gen(const RunConfig& config);
int cmd_invert(const RunConfig& config);
int cmd_compose(const RunConfig& config);
int cmd_verify(const RunConfig& config);
int cmd_report(const RunConfig& config);

}  // namespace kalg

#pragma once

#include <iosfwd>

namespace gpr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitReconstruction = 4;

/// Entry point of the gabor_polar tool. Subcommands: construct, measure,
/// reconstruct, bias, beta, spectral-gap, experiment.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gpr

#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "thlab/spectral.hpp"

namespace thlab::cli {

// Parses argv, runs one subcommand and returns the process exit code:
// 0 on success, 1 on a domain error, 2 on a usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Amplitude initial data on the slow grid, as described by cfg.initial.
AmpFields amplitude_initial_data(const RunConfig& cfg, const Grid1D& slow);

// PDE initial data: the ansatz built from the amplitude data plus noise.
RealFields pde_initial_data(const RunConfig& cfg, const Grid1D& slow, const Grid1D& fine);

}  // namespace thlab::cli

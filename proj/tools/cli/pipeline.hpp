#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/report.hpp"
#include "qhall/neass.hpp"
#include "qhall/spectral.hpp"

namespace qhall::cli {

struct RunOptions {
  std::string out_dir;  // empty keeps the config value
  std::optional<std::uint64_t> seed;
  Real tol_scale = 1.0;
  int threads = 1;
  bool svg = false;
  bool dump_hamiltonian = false;
  std::vector<std::string> stages;  // empty keeps the config value
};

// Everything the stages share: model, spectrum, gap, Fermi projection.
// filled_bands is -1 when the projection rank is not a whole number of
// magnetic bands (then the momentum-space oracle has no matching filling).
struct ModelContext {
  ExperimentConfig cfg;
  LatticeGeometry g;
  OperatorMatrix h0;
  DisplacementTable d;
  Spectrum spec;
  GapInfo gap;
  Projection pi0;
  int filled_bands = -1;
};

// Builds geometry, Hamiltonian, spectrum, gap, and Fermi projection.  With
// gap.filled_bands set, a closed gap at that filling raises
// GaplessAtFilling before find_gap runs.
ModelContext build_context(const ExperimentConfig& cfg);

// Executes the requested stages in fixed order and writes all artifacts under
// the output directory.  Stage blocks for unrequested stages appear in the
// report as skipped with a reason.  Errors propagate as typed exceptions.
RunReport run_pipeline(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace qhall::cli

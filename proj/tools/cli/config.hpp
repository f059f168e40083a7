#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhall/lattice_model.hpp"
#include "qhall/types.hpp"

namespace qhall::cli {

// Key-value file contents: dotted keys, '=' separator, '#' comments, values
// split on whitespace.  Duplicate keys are rejected so a config never
// silently shadows itself.
using KeyValues = std::map<std::string, std::vector<std::string>>;

KeyValues parse_key_values(const std::string& path);

// Log-spaced perturbation grid.  The schema requires the whole grid strictly
// inside (0, max_allowed); max_allowed is the validity radius of the
// expansion, not a point of the grid.
struct EpsGrid {
  Real min = 0.0316227766016838;  // 10^{-1.5}
  Real max = 0.316227766016838;   // 10^{-0.5}
  int count = 7;
  Real max_allowed = 0.3;

  std::vector<Real> points() const;
};

struct Tolerances {
  Real quantization = 0.05;         // bound on |2*pi*sigma - C|
  Real slope_band = 0.25;           // half-width around the target exponent
  Real equilibrium_current = 1e-8;  // bound on |T(J1 Pi0)|
};

struct ExperimentConfig {
  std::string name = "unnamed";
  int L1 = 0;
  int L2 = 0;
  Real a = 1.0;
  FluxConfig flux;
  PotentialConfig potential;
  std::optional<Real> gap_hint;      // exactly one of gap_hint and
  std::optional<int> filled_bands;   // filled_bands must be set
  Real gap_min_width = 1e-6;
  int contour_nodes = 64;
  int neass_order = 2;
  EpsGrid eps;
  Real localize_eps = 0.05;
  Tolerances tol;
  bool enforce_criteria = true;
  std::vector<std::string> stages = {"spectrum", "neass", "response", "localize"};
  std::string output_dir = "out";
  std::uint64_t seed = 12345;
};

// Schema checks only; model consistency (commensurability, gap existence) is
// left to the geometry and spectral layers.  Throws ConfigError.
void validate(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);

// The models shipped under configs/, in the same order; index 0 is the
// default model used when no --config is given.
std::vector<ExperimentConfig> bundled_models();
ExperimentConfig default_config();

// Published schema, printed by `config schema` and quoted in the README.
std::string schema_text();

}  // namespace qhall::cli

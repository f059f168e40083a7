#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "qhall/types.hpp"

namespace qhall::cli {

using Json = nlohmann::ordered_json;

// Shortest exact decimal form of a double; CSV cells and config echoes use
// this so identical runs produce identical bytes.
std::string format_real(Real x);

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

// Sparse dump (row, col, re, im) of the nonzero entries, row-major.
void write_matrix_csv(const std::string& path, const Matrix& m);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<Real, Real>> points;
};

// Static scatter/line plot; log-log mode drops nonpositive points.  No
// external renderer is involved, the file is self-contained.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool loglog);

struct StageReport {
  std::string name;
  std::string status = "skipped";  // "ok" or "skipped"
  std::string reason;              // set when skipped
  Real seconds = 0.0;
  Json metrics = Json::object();
  std::vector<std::string> artifacts;
};

struct CriterionCheck {
  std::string name;
  bool pass = false;
  Real measured = 0.0;
  std::string bound;  // human-readable comparison, e.g. "<= 0.05"
  bool enforced = true;
};

struct RunReport {
  Json config;
  std::vector<StageReport> stages;
  std::vector<CriterionCheck> checks;

  bool pass() const;
  Json to_json() const;
  void write(const std::string& path) const;
};

Json config_json(const ExperimentConfig& cfg);

}  // namespace qhall::cli

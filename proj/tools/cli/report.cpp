#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "qhall/errors.hpp"

namespace qhall::cli {

std::string format_real(Real x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

}  // namespace

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::vector<std::vector<std::string>> rows;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const Complex z = m(r, c);
      if (z == Complex(0, 0)) continue;
      rows.push_back({std::to_string(r), std::to_string(c), format_real(z.real()),
                      format_real(z.imag())});
    }
  }
  write_csv(path, "row,col,re,im", rows);
}

namespace {

struct Box {
  Real xmin, xmax, ymin, ymax;
};

const char* kPalette[] = {"#1f6fb4", "#c44e52", "#2a9d5c", "#8172b2", "#b07b2e", "#4c72b0"};

std::string svg_num(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool loglog) {
  std::vector<SvgSeries> plotted;
  for (const auto& s : series) {
    SvgSeries t{s.label, {}};
    for (auto [x, y] : s.points) {
      if (loglog) {
        if (x <= 0 || y <= 0) continue;
        t.points.emplace_back(std::log10(x), std::log10(y));
      } else {
        t.points.emplace_back(x, y);
      }
    }
    if (!t.points.empty()) plotted.push_back(std::move(t));
  }
  if (plotted.empty()) throw ConfigError("nothing to plot for '" + path + "'");

  Box b{plotted[0].points[0].first, plotted[0].points[0].first, plotted[0].points[0].second,
        plotted[0].points[0].second};
  for (const auto& s : plotted) {
    for (auto [x, y] : s.points) {
      b.xmin = std::min(b.xmin, x);
      b.xmax = std::max(b.xmax, x);
      b.ymin = std::min(b.ymin, y);
      b.ymax = std::max(b.ymax, y);
    }
  }
  if (b.xmax == b.xmin) b.xmax = b.xmin + 1;
  if (b.ymax == b.ymin) b.ymax = b.ymin + 1;

  const Real W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 55;
  auto px = [&](Real x) { return ml + (x - b.xmin) / (b.xmax - b.xmin) * (W - ml - mr); };
  auto py = [&](Real y) { return H - mb - (y - b.ymin) / (b.ymax - b.ymin) * (H - mt - mb); };

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"monospace\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << (loglog ? " (log-log)" : "") << "</text>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
      << H - mb << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\""
      << "rotate(-90 18 " << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";
  out << "<text x=\"" << ml << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">"
      << svg_num(b.xmin) << "</text>\n";
  out << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">"
      << svg_num(b.xmax) << "</text>\n";
  out << "<text x=\"" << ml - 8 << "\" y=\"" << H - mb + 4 << "\" text-anchor=\"end\">"
      << svg_num(b.ymin) << "</text>\n";
  out << "<text x=\"" << ml - 8 << "\" y=\"" << mt + 4 << "\" text-anchor=\"end\">"
      << svg_num(b.ymax) << "</text>\n";

  for (std::size_t si = 0; si < plotted.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    const auto& pts = plotted[si].points;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (auto [x, y] : pts) out << svg_num(px(x)) << "," << svg_num(py(y)) << " ";
    out << "\"/>\n";
    for (auto [x, y] : pts)
      out << "<circle cx=\"" << svg_num(px(x)) << "\" cy=\"" << svg_num(py(y))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << W - mr - 6 << "\" y=\"" << mt + 16 + 16 * si
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << plotted[si].label
        << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("short write to '" + path + "'");
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CriterionCheck& c) { return c.pass || !c.enforced; });
}

Json RunReport::to_json() const {
  Json j;
  j["tool"] = "qhall 1.0.0";
  j["config"] = config;
  j["stages"] = Json::array();
  for (const auto& s : stages) {
    Json js;
    js["name"] = s.name;
    js["status"] = s.status;
    if (s.status == "skipped") js["reason"] = s.reason;
    if (s.status == "ok") js["seconds"] = s.seconds;
    js["metrics"] = s.metrics;
    js["artifacts"] = s.artifacts;
    j["stages"].push_back(js);
  }
  j["criteria"] = Json::array();
  for (const auto& c : checks) {
    Json jc;
    jc["name"] = c.name;
    jc["measured"] = c.measured;
    jc["bound"] = c.bound;
    jc["pass"] = c.pass;
    jc["enforced"] = c.enforced;
    j["criteria"].push_back(jc);
  }
  j["pass"] = pass();
  return j;
}

void RunReport::write(const std::string& path) const {
  auto out = open_out(path);
  out << to_json().dump(2) << "\n";
  if (!out) throw IoError("short write to '" + path + "'");
}

Json config_json(const ExperimentConfig& cfg) {
  Json j;
  j["model.name"] = cfg.name;
  j["lattice.L1"] = cfg.L1;
  j["lattice.L2"] = cfg.L2;
  j["lattice.a"] = cfg.a;
  j["flux.p"] = cfg.flux.p;
  j["flux.q"] = cfg.flux.q;
  if (!cfg.potential.v.empty()) j["potential.v"] = cfg.potential.v;
  if (!cfg.potential.a1.empty()) j["potential.a1"] = cfg.potential.a1;
  if (!cfg.potential.a2.empty()) j["potential.a2"] = cfg.potential.a2;
  if (cfg.gap_hint) j["gap.hint"] = *cfg.gap_hint;
  if (cfg.filled_bands) j["gap.filled_bands"] = *cfg.filled_bands;
  j["gap.min_width"] = cfg.gap_min_width;
  j["contour.nodes"] = cfg.contour_nodes;
  j["neass.order"] = cfg.neass_order;
  j["eps.min"] = cfg.eps.min;
  j["eps.max"] = cfg.eps.max;
  j["eps.count"] = cfg.eps.count;
  j["eps.max_allowed"] = cfg.eps.max_allowed;
  j["localize.eps"] = cfg.localize_eps;
  j["tol.quantization"] = cfg.tol.quantization;
  j["tol.slope_band"] = cfg.tol.slope_band;
  j["tol.equilibrium_current"] = cfg.tol.equilibrium_current;
  j["criteria.enforce"] = cfg.enforce_criteria;
  j["stages"] = cfg.stages;
  j["output.dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace qhall::cli

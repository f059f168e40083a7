#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qhall/errors.hpp"

namespace qhall::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokenize(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
  throw ConfigError("key '" + key + "': " + what);
}

const std::vector<std::string>& single(const std::string& key,
                                       const std::vector<std::string>& v) {
  if (v.size() != 1) bad_value(key, "expected exactly one value");
  return v;
}

Real parse_real(const std::string& key, const std::string& tok) {
  std::size_t pos = 0;
  Real x = 0;
  try {
    x = std::stod(tok, &pos);
  } catch (const std::exception&) {
    bad_value(key, "'" + tok + "' is not a number");
  }
  if (pos != tok.size()) bad_value(key, "'" + tok + "' is not a number");
  return x;
}

int parse_int(const std::string& key, const std::string& tok) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    bad_value(key, "'" + tok + "' is not an integer");
  }
  if (pos != tok.size()) bad_value(key, "'" + tok + "' is not an integer");
  if (x < -(1ll << 31) || x >= (1ll << 31)) bad_value(key, "out of range");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& tok) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    bad_value(key, "'" + tok + "' is not a non-negative integer");
  }
  if (pos != tok.size() || tok[0] == '-')
    bad_value(key, "'" + tok + "' is not a non-negative integer");
  return x;
}

bool parse_bool(const std::string& key, const std::string& tok) {
  if (tok == "true" || tok == "on" || tok == "1") return true;
  if (tok == "false" || tok == "off" || tok == "0") return false;
  bad_value(key, "'" + tok + "' is not a boolean (true/false/on/off/1/0)");
}

std::vector<Real> parse_reals(const std::string& key, const std::vector<std::string>& toks) {
  std::vector<Real> out;
  out.reserve(toks.size());
  for (const auto& t : toks) out.push_back(parse_real(key, t));
  return out;
}

const std::set<std::string>& known_stages() {
  static const std::set<std::string> s = {"spectrum", "neass", "response", "localize",
                                          "oracle"};
  return s;
}

}  // namespace

KeyValues parse_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (kv.count(key))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = tokenize(value);
  }
  return kv;
}

std::vector<Real> EpsGrid::points() const {
  std::vector<Real> out;
  out.reserve(count);
  const Real lmin = std::log(min);
  const Real lmax = std::log(max);
  for (int i = 0; i < count; ++i) {
    const Real t = static_cast<Real>(i) / static_cast<Real>(count - 1);
    out.push_back(std::exp((1.0 - t) * lmin + t * lmax));
  }
  return out;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.L1 < 1 || cfg.L2 < 1) throw ConfigError("lattice.L1 and lattice.L2 must be >= 1");
  if (!(cfg.a > 0)) throw ConfigError("lattice.a must be positive");
  if (cfg.flux.q < 1) throw ConfigError("flux.q must be >= 1");
  if (cfg.flux.p < 0 || cfg.flux.p >= cfg.flux.q)
    throw ConfigError("flux.p must lie in [0, flux.q)");
  for (const auto* table : {&cfg.potential.v, &cfg.potential.a1, &cfg.potential.a2}) {
    if (!table->empty() && static_cast<int>(table->size()) != cfg.flux.q)
      throw ConfigError("potential tables must have flux.q entries");
  }
  if (cfg.gap_hint.has_value() == cfg.filled_bands.has_value())
    throw ConfigError("set exactly one of gap.hint and gap.filled_bands");
  if (cfg.filled_bands && (*cfg.filled_bands < 1 || *cfg.filled_bands >= cfg.flux.q))
    throw ConfigError("gap.filled_bands must lie in [1, flux.q)");
  if (!(cfg.gap_min_width > 0)) throw ConfigError("gap.min_width must be positive");
  if (cfg.contour_nodes < 8) throw ConfigError("contour.nodes must be >= 8");
  if (cfg.neass_order < 1 || cfg.neass_order > 6)
    throw ConfigError("neass.order must lie in [1, 6]");
  if (!(cfg.eps.max_allowed > 0)) throw ConfigError("eps.max_allowed must be positive");
  if (!(cfg.eps.min > 0) || !(cfg.eps.min < cfg.eps.max) ||
      !(cfg.eps.max < cfg.eps.max_allowed))
    throw ConfigError("eps grid must satisfy 0 < eps.min < eps.max < eps.max_allowed");
  if (cfg.eps.count < 5) throw ConfigError("eps.count must be >= 5");
  if (!(cfg.localize_eps > 0) || !(cfg.localize_eps < cfg.eps.max_allowed))
    throw ConfigError("localize.eps must lie in (0, eps.max_allowed)");
  if (!(cfg.tol.quantization > 0) || !(cfg.tol.slope_band > 0) ||
      !(cfg.tol.equilibrium_current > 0))
    throw ConfigError("all tolerances must be positive");
  if (cfg.stages.empty()) throw ConfigError("stages must not be empty");
  std::set<std::string> seen;
  for (const auto& st : cfg.stages) {
    if (!known_stages().count(st)) throw ConfigError("unknown stage '" + st + "'");
    if (!seen.insert(st).second) throw ConfigError("duplicate stage '" + st + "'");
  }
  if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

ExperimentConfig load_config(const std::string& path) {
  const KeyValues kv = parse_key_values(path);
  ExperimentConfig cfg;
  std::set<std::string> required = {"lattice.L1", "lattice.L2", "flux.p", "flux.q"};
  for (const auto& [key, toks] : kv) {
    if (key == "model.name") {
      cfg.name = single(key, toks)[0];
    } else if (key == "lattice.L1") {
      cfg.L1 = parse_int(key, single(key, toks)[0]);
    } else if (key == "lattice.L2") {
      cfg.L2 = parse_int(key, single(key, toks)[0]);
    } else if (key == "lattice.a") {
      cfg.a = parse_real(key, single(key, toks)[0]);
    } else if (key == "flux.p") {
      cfg.flux.p = parse_int(key, single(key, toks)[0]);
    } else if (key == "flux.q") {
      cfg.flux.q = parse_int(key, single(key, toks)[0]);
    } else if (key == "potential.v") {
      cfg.potential.v = parse_reals(key, toks);
    } else if (key == "potential.a1") {
      cfg.potential.a1 = parse_reals(key, toks);
    } else if (key == "potential.a2") {
      cfg.potential.a2 = parse_reals(key, toks);
    } else if (key == "gap.hint") {
      cfg.gap_hint = parse_real(key, single(key, toks)[0]);
    } else if (key == "gap.filled_bands") {
      cfg.filled_bands = parse_int(key, single(key, toks)[0]);
    } else if (key == "gap.min_width") {
      cfg.gap_min_width = parse_real(key, single(key, toks)[0]);
    } else if (key == "contour.nodes") {
      cfg.contour_nodes = parse_int(key, single(key, toks)[0]);
    } else if (key == "neass.order") {
      cfg.neass_order = parse_int(key, single(key, toks)[0]);
    } else if (key == "eps.min") {
      cfg.eps.min = parse_real(key, single(key, toks)[0]);
    } else if (key == "eps.max") {
      cfg.eps.max = parse_real(key, single(key, toks)[0]);
    } else if (key == "eps.count") {
      cfg.eps.count = parse_int(key, single(key, toks)[0]);
    } else if (key == "eps.max_allowed") {
      cfg.eps.max_allowed = parse_real(key, single(key, toks)[0]);
    } else if (key == "localize.eps") {
      cfg.localize_eps = parse_real(key, single(key, toks)[0]);
    } else if (key == "tol.quantization") {
      cfg.tol.quantization = parse_real(key, single(key, toks)[0]);
    } else if (key == "tol.slope_band") {
      cfg.tol.slope_band = parse_real(key, single(key, toks)[0]);
    } else if (key == "tol.equilibrium_current") {
      cfg.tol.equilibrium_current = parse_real(key, single(key, toks)[0]);
    } else if (key == "criteria.enforce") {
      cfg.enforce_criteria = parse_bool(key, single(key, toks)[0]);
    } else if (key == "stages") {
      cfg.stages = toks;
    } else if (key == "output.dir") {
      cfg.output_dir = single(key, toks)[0];
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, single(key, toks)[0]);
    } else {
      throw ConfigError("unknown key '" + key + "' in " + path);
    }
    required.erase(key);
  }
  if (!required.empty()) {
    std::string missing;
    for (const auto& k : required) missing += (missing.empty() ? "" : ", ") + k;
    throw ConfigError("missing required keys: " + missing + " in " + path);
  }
  validate(cfg);
  return cfg;
}

std::vector<ExperimentConfig> bundled_models() {
  std::vector<ExperimentConfig> out;

  // Default model: flux 1/3, lowest band filled.  The grid top 10^{-1/2} sits
  // just under the widened validity radius 0.32.
  ExperimentConfig m12;
  m12.name = "hofstadter_q3_n2";
  m12.L1 = 12;
  m12.L2 = 12;
  m12.flux = {1, 3};
  m12.filled_bands = 1;
  m12.eps.max_allowed = 0.32;
  out.push_back(m12);

  ExperimentConfig m12b = m12;
  m12b.name = "hofstadter_q3_gap2";
  m12b.filled_bands = 2;
  out.push_back(m12b);

  ExperimentConfig m24 = m12;
  m24.name = "hofstadter_q3_L24";
  m24.L1 = 24;
  m24.L2 = 24;
  out.push_back(m24);

  ExperimentConfig g5 = m12;
  g5.name = "golden_q5";
  g5.L1 = 20;
  g5.L2 = 20;
  g5.flux = {3, 5};
  g5.filled_bands = 3;
  out.push_back(g5);

  ExperimentConfig g8 = m12;
  g8.name = "golden_q8";
  g8.L1 = 16;
  g8.L2 = 16;
  g8.flux = {5, 8};
  g8.filled_bands = 5;
  out.push_back(g8);

  // Flux 1/2 has touching bands at half filling; kept as the canonical
  // gapless probe for error paths and the approximant report.
  ExperimentConfig g2 = m12;
  g2.name = "gapless_q2";
  g2.flux = {1, 2};
  g2.filled_bands = 1;
  g2.stages = {"spectrum"};
  out.push_back(g2);

  return out;
}

ExperimentConfig default_config() { return bundled_models().front(); }

std::string schema_text() {
  return R"(qhall configuration schema
  Lines are `key = value...`; '#' starts a comment; values are
  whitespace-separated tokens.  Unknown keys, duplicate keys, and malformed
  values are rejected before any computation starts.

  model.name              string   label used in reports (default: unnamed)
  lattice.L1              int      torus size along e1, multiple of flux.q (required)
  lattice.L2              int      torus size along e2 (required)
  lattice.a               real     lattice constant, > 0 (default: 1.0)
  flux.p                  int      flux numerator, 0 <= p < q, gcd(p,q)=1 for p>0 (required)
  flux.q                  int      flux denominator, >= 1 (required)
  potential.v             q reals  onsite energies per cell site (default: zeros)
  potential.a1            q reals  extra bond phase along e1 (default: zeros)
  potential.a2            q reals  extra bond phase along e2 (default: zeros)
  gap.hint                real     energy inside the target gap        } exactly one
  gap.filled_bands        int      number of filled bands, in [1, q)   } of these two
  gap.min_width           real     smallest accepted gap width (default: 1e-6)
  contour.nodes           int      quadrature nodes, >= 8 (default: 64)
  neass.order             int      expansion order n, in [1, 6] (default: 2)
  eps.min                 real     smallest grid point (default: 10^-1.5)
  eps.max                 real     largest grid point (default: 10^-0.5)
  eps.count               int      log-spaced points, >= 5 (default: 7)
  eps.max_allowed         real     validity radius; grid must sit inside
                                   (0, eps.max_allowed) (default: 0.3)
  localize.eps            real     dressing strength for decay fits (default: 0.05)
  tol.quantization        real     bound on |2*pi*sigma - C| (default: 0.05)
  tol.slope_band          real     half-width around target exponents (default: 0.25)
  tol.equilibrium_current real     bound on |T(J1 Pi0)| (default: 1e-8)
  criteria.enforce        bool     failed checks drive the exit status (default: true)
  stages                  list     subset of: spectrum neass response localize oracle
                                   (default: spectrum neass response localize)
  output.dir              string   artifact directory (default: out)
  seed                    uint64   seed for randomized checks (default: 12345)
)";
}

}  // namespace qhall::cli

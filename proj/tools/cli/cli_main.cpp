#include "cli/cli_main.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cli/acceptance.hpp"
#include "cli/config.hpp"
#include "cli/pipeline.hpp"
#include "qhall/errors.hpp"
#include "qhall/response.hpp"

namespace qhall::cli {

namespace {

std::string exit_code_table() {
  return "exit codes:\n"
         "   0  success\n"
         "   1  CriterionFailure: an enforced check missed its bound\n"
         "   2  ConfigError: schema violation or invalid flag combination\n"
         "   3  NonCommensurateTorus: lattice incompatible with the flux\n"
         "   4  FlagViolation: an operator lost a declared structural flag\n"
         "   5  SolverFailure: eigensolver or unitary construction failed\n"
         "   6  NoGap: no spectral gap at the requested energy\n"
         "   7  FermiOnSpectrum: fermi level collides with an eigenvalue\n"
         "   8  EnclosureFailure: contour does not separate the filled states\n"
         "   9  QuadratureDivergence: contour quadrature failed to converge\n"
         "  10  GapTooSmall: cross-gap denominators below round-off safety\n"
         "  11  MissingGenerator: expansion order exceeds available generators\n"
         "  12  DegenerateFit: not enough variation for a least-squares fit\n"
         "  13  ZTooCloseToSpectrum: resolvent probed on top of the spectrum\n"
         "  14  InsufficientData: too few usable bins for a decay fit\n"
         "  15  GaplessAtFilling: bands touch at the requested filling\n"
         "  16  IoError: file could not be read or written\n"
         "  70  internal error outside the contract table\n";
}

ExperimentConfig load_or_default(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

void print_run_summary(const RunReport& rep, std::ostream& out) {
  for (const auto& s : rep.stages) {
    out << "stage " << s.name << ": " << s.status;
    if (s.status == "ok") {
      char secs[32];
      std::snprintf(secs, sizeof(secs), " (%.2f s)", s.seconds);
      out << secs;
    } else {
      out << " (" << s.reason << ")";
    }
    out << "\n";
  }
  for (const auto& c : rep.checks) {
    out << "[" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": "
        << format_real(c.measured) << " (" << c.bound << ")"
        << (c.enforced ? "" : " [not enforced]") << "\n";
  }
  out << (rep.pass() ? "run passed" : "run failed") << "\n";
}

int run_stages(const std::string& config_path, RunOptions opt, int order_override) {
  ExperimentConfig cfg = load_or_default(config_path);
  if (order_override > 0) cfg.neass_order = order_override;
  const RunReport rep = run_pipeline(cfg, opt);
  print_run_summary(rep, std::cout);
  return rep.pass() ? 0 : static_cast<int>(ErrorCode::CriterionFailure);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "qhall: dressed projections, hall response, and localization checks for gapped "
      "magnetic lattice models"};
  app.footer(exit_code_table());
  app.require_subcommand(1);
  app.set_version_flag("--version", "qhall 1.0.0");

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  Real tol_scale = 1.0;
  int threads = 1;
  app.add_option("--config", config_path,
                 "experiment config file (default: the bundled hofstadter_q3_n2 model)");
  app.add_option("--out-dir", out_dir, "artifact directory, overrides output.dir");
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--tol-scale", tol_scale,
                 "multiplier on absolute tolerance bounds (relative and R^2 thresholds stay "
                 "fixed)");
  app.add_option("--threads", threads, "worker threads for grid sweeps (default 1)");

  bool svg = false;
  bool dump_h = false;
  int order_override = 0;

  auto* sub_run = app.add_subcommand("run", "execute the stages listed in the config");
  auto* sub_spectrum =
      app.add_subcommand("spectrum", "eigenvalues, spectral gap, and fermi data");
  for (auto* sub : {sub_run, sub_spectrum})
    sub->add_flag("--dump-hamiltonian", dump_h,
                  "also write the hamiltonian as row,col,re,im");
  auto* sub_neass =
      app.add_subcommand("neass", "dressing generators and stationarity-residual sweep");
  sub_neass->add_option("--order", order_override, "override neass.order");
  auto* sub_response =
      app.add_subcommand("response", "hall marker, current sweep, linear-response defect");
  auto* sub_localize = app.add_subcommand("localize", "kernel decay profiles and fits");
  auto* sub_oracle = app.add_subcommand("oracle", "momentum-space chern number");
  int oracle_p = -1, oracle_q = -1, oracle_bands = -1, oracle_mesh = 12;
  std::vector<Real> oracle_v;
  sub_oracle->add_option("--p", oracle_p, "flux numerator");
  sub_oracle->add_option("--q", oracle_q, "flux denominator");
  sub_oracle->add_option("--bands", oracle_bands, "number of filled bands");
  sub_oracle->add_option("--potential", oracle_v, "onsite energies, q values");
  sub_oracle->add_option("--mesh", oracle_mesh, "initial k-mesh subdivisions");
  auto* sub_verify = app.add_subcommand(
      "verify", "run the full verification battery on the bundled models");
  std::string verify_json;
  sub_verify->add_option("--json", verify_json, "also write the battery report as JSON");
  auto* sub_config = app.add_subcommand("config", "configuration utilities");
  sub_config->require_subcommand(1);
  std::string validate_path;
  auto* sub_config_validate =
      sub_config->add_subcommand("validate", "parse and check a config file");
  sub_config_validate->add_option("path", validate_path, "config file to check");
  auto* sub_config_schema =
      sub_config->add_subcommand("schema", "print the configuration schema");

  for (auto* sub : {sub_run, sub_spectrum, sub_neass, sub_response, sub_localize, sub_oracle,
                    sub_verify, sub_config})
    sub->fallthrough();
  for (auto* sub : {sub_run, sub_spectrum, sub_neass, sub_response, sub_localize})
    sub->add_flag("--svg", svg, "also emit plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::ConfigError);
  }

  try {
    if (threads < 1) throw ConfigError("--threads must be >= 1");
    if (!(tol_scale > 0)) throw ConfigError("--tol-scale must be positive");

    RunOptions opt;
    opt.out_dir = out_dir;
    opt.tol_scale = tol_scale;
    opt.threads = threads;
    opt.svg = svg;
    opt.dump_hamiltonian = dump_h;
    if (seed_opt->count() > 0) opt.seed = seed;

    if (sub_run->parsed()) return run_stages(config_path, opt, 0);
    if (sub_spectrum->parsed()) {
      opt.stages = {"spectrum"};
      return run_stages(config_path, opt, 0);
    }
    if (sub_neass->parsed()) {
      opt.stages = {"neass"};
      return run_stages(config_path, opt, order_override);
    }
    if (sub_response->parsed()) {
      opt.stages = {"response"};
      return run_stages(config_path, opt, 0);
    }
    if (sub_localize->parsed()) {
      opt.stages = {"localize"};
      return run_stages(config_path, opt, 0);
    }

    if (sub_oracle->parsed()) {
      int chern = 0;
      if (oracle_p >= 0 || oracle_q >= 0 || oracle_bands >= 0) {
        if (oracle_p < 0 || oracle_q < 0 || oracle_bands < 0)
          throw ConfigError("oracle needs --p, --q, and --bands together");
        chern = response::chern_number_momentum(FluxConfig{oracle_p, oracle_q}, oracle_bands,
                                                oracle_v, oracle_mesh);
      } else {
        const ExperimentConfig cfg = load_or_default(config_path);
        const ModelContext mc = build_context(cfg);
        if (mc.filled_bands <= 0)
          throw ConfigError("projection rank is not a whole number of bands");
        chern = response::chern_number_momentum(cfg.flux, mc.filled_bands, cfg.potential.v,
                                                oracle_mesh);
      }
      std::cout << chern << "\n";
      return 0;
    }

    if (sub_verify->parsed()) {
      const ExperimentConfig cfg = load_or_default(config_path);
      const std::uint64_t s = seed_opt->count() > 0 ? seed : cfg.seed;
      const AcceptanceReport rep = run_acceptance(s, tol_scale, &std::cout);
      if (!verify_json.empty()) {
        std::ofstream out(verify_json);
        if (!out) throw IoError("cannot write '" + verify_json + "'");
        out << rep.to_json().dump(2) << "\n";
      }
      return rep.all_pass() ? 0 : static_cast<int>(ErrorCode::CriterionFailure);
    }

    if (sub_config_validate->parsed()) {
      const std::string path = !validate_path.empty() ? validate_path : config_path;
      if (path.empty()) throw ConfigError("config validate needs a file path");
      const ExperimentConfig cfg = load_config(path);
      lattice::build_geometry(cfg.L1, cfg.L2, cfg.flux, cfg.a);
      std::cout << "OK: " << path << " (model " << cfg.name << ", " << cfg.L1 << "x" << cfg.L2
                << ", flux " << cfg.flux.p << "/" << cfg.flux.q << ")\n";
      return 0;
    }
    if (sub_config_schema->parsed()) {
      std::cout << schema_text();
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("qhall");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qhall::cli

#include "cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <limits>
#include <optional>

#include "qhall/errors.hpp"
#include "qhall/fit.hpp"
#include "qhall/localization.hpp"
#include "qhall/response.hpp"

namespace qhall::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

Real seconds_since(Clock::time_point t0) {
  return std::chrono::duration<Real>(Clock::now() - t0).count();
}

// Index-sharded map: slot i is always written by the same logical iteration,
// so results are identical for every thread count.
template <typename F>
void for_each_index(int threads, int n, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::future<void>> futs;
  futs.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&fn, w, n, workers] {
      for (int i = w; i < n; i += workers) fn(i);
    }));
  }
  for (auto& f : futs) f.get();
}

Json fit_json(const LocalizationFit& f) {
  Json j;
  j["C"] = f.C;
  j["beta"] = f.beta;
  j["r_squared"] = f.r_squared;
  j["d_min"] = f.d_min;
  j["d_max"] = f.d_max;
  return j;
}

// Shared mutable state across stages so the generator recursion runs once.
struct StageCtx {
  const ExperimentConfig& cfg;
  const RunOptions& opt;
  ModelContext& mc;
  fs::path dir;
  std::optional<NeassGenerators> gen;

  const NeassGenerators& generators(Real* seconds) {
    if (!gen) {
      const auto t0 = Clock::now();
      gen = neass::neass_generators(mc.h0, mc.pi0, mc.spec, mc.d, cfg.neass_order);
      if (seconds) *seconds += seconds_since(t0);
    }
    return *gen;
  }

  std::string artifact(const std::string& file) const { return (dir / file).string(); }
};

StageReport skipped_stage(const std::string& name, const std::string& reason) {
  StageReport s;
  s.name = name;
  s.status = "skipped";
  s.reason = reason;
  return s;
}

StageReport run_spectrum_stage(StageCtx& sc) {
  const auto t0 = Clock::now();
  StageReport s;
  s.name = "spectrum";
  s.status = "ok";
  const auto& mc = sc.mc;
  const int n = mc.g.sites();

  s.metrics["sites"] = n;
  s.metrics["e_min"] = mc.spec.eigenvalues(0);
  s.metrics["e_max"] = mc.spec.eigenvalues(n - 1);
  s.metrics["gap_lower_edge"] = mc.gap.lower_edge;
  s.metrics["gap_upper_edge"] = mc.gap.upper_edge;
  s.metrics["gap_width"] = mc.gap.width();
  s.metrics["mu"] = mc.gap.mu;
  s.metrics["rank"] = mc.gap.rank;
  if (mc.filled_bands > 0)
    s.metrics["filled_bands"] = mc.filled_bands;
  else
    s.metrics["filled_bands"] = nullptr;

  std::vector<std::vector<std::string>> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i)
    rows.push_back({std::to_string(i), format_real(mc.spec.eigenvalues(i))});
  const std::string spath = sc.artifact("spectrum.csv");
  write_csv(spath, "index,eigenvalue", rows);
  s.artifacts.push_back(spath);

  const std::string gpath = sc.artifact("gap.csv");
  write_csv(gpath, "lower_edge,upper_edge,width,mu,rank",
            {{format_real(mc.gap.lower_edge), format_real(mc.gap.upper_edge),
              format_real(mc.gap.width()), format_real(mc.gap.mu),
              std::to_string(mc.gap.rank)}});
  s.artifacts.push_back(gpath);

  if (sc.opt.dump_hamiltonian) {
    const std::string hpath = sc.artifact("hamiltonian.csv");
    write_matrix_csv(hpath, mc.h0.mat);
    s.artifacts.push_back(hpath);
  }

  if (sc.opt.svg) {
    SvgSeries staircase{"eigenvalue", {}};
    for (int i = 0; i < n; ++i)
      staircase.points.emplace_back(static_cast<Real>(i), mc.spec.eigenvalues(i));
    const std::string vpath = sc.artifact("spectrum.svg");
    write_svg_plot(vpath, "spectrum " + sc.cfg.name, "index", "energy", {staircase}, false);
    s.artifacts.push_back(vpath);
  }

  s.seconds = seconds_since(t0);
  return s;
}

StageReport run_neass_stage(StageCtx& sc, std::vector<CriterionCheck>& checks) {
  const auto t0 = Clock::now();
  StageReport s;
  s.name = "neass";
  s.status = "ok";
  const auto& mc = sc.mc;
  const auto& gen = sc.generators(nullptr);
  const std::vector<Real> grid = sc.cfg.eps.points();
  const int npts = static_cast<int>(grid.size());

  std::vector<Real> residual(npts), windowed(npts), j_hall(npts);
  std::vector<int> rank(npts);
  for_each_index(sc.opt.threads, npts, [&](int i) {
    const NeassState st = neass::neass_state(gen, mc.pi0, mc.h0, mc.d, grid[i]);
    residual[i] = st.residual_norm;
    windowed[i] = st.residual_norm_windowed;
    rank[i] = st.Pi.rank;
    j_hall[i] = response::hall_current_density(mc.h0, mc.d, st, mc.g);
  });

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < npts; ++i)
    rows.push_back({format_real(grid[i]), format_real(residual[i]), format_real(j_hall[i]),
                    std::to_string(rank[i])});
  const std::string cpath = sc.artifact("neass_sweep.csv");
  write_csv(cpath, "eps,residual_norm,j_hall,rank", rows);
  s.artifacts.push_back(cpath);

  const PowerLawFit fit =
      neass::residual_scaling(mc.h0, gen, mc.pi0, mc.d, grid, sc.cfg.eps.max_allowed);
  s.metrics["order"] = gen.order;
  s.metrics["slope_residual"] = fit.slope;
  s.metrics["residual_intercept"] = fit.intercept;
  s.metrics["residual_r2"] = fit.r_squared;
  try {
    const PowerLawFit wfit = fitting::power_law_fit(grid, windowed);
    s.metrics["slope_residual_windowed"] = wfit.slope;
  } catch (const DegenerateFit&) {
    s.metrics["slope_residual_windowed"] = nullptr;
  }

  if (sc.opt.svg) {
    SvgSeries full{"residual", {}}, win{"windowed", {}};
    for (int i = 0; i < npts; ++i) {
      full.points.emplace_back(grid[i], residual[i]);
      win.points.emplace_back(grid[i], windowed[i]);
    }
    const std::string vpath = sc.artifact("neass_residual.svg");
    write_svg_plot(vpath, "stationarity residual " + sc.cfg.name, "eps", "residual norm",
                   {full, win}, true);
    s.artifacts.push_back(vpath);
  }

  const Real target = static_cast<Real>(gen.order + 1);
  const Real band = sc.cfg.tol.slope_band * sc.opt.tol_scale;
  char bound[128];
  std::snprintf(bound, sizeof(bound), "within %g +- %g", target, band);
  checks.push_back({"neass residual slope", std::abs(fit.slope - target) <= band, fit.slope,
                    bound, sc.cfg.enforce_criteria});

  s.seconds = seconds_since(t0);
  return s;
}

StageReport run_response_stage(StageCtx& sc, std::vector<CriterionCheck>& checks) {
  const auto t0 = Clock::now();
  StageReport s;
  s.name = "response";
  s.status = "ok";
  const auto& mc = sc.mc;
  const auto& gen = sc.generators(nullptr);
  const std::vector<Real> grid = sc.cfg.eps.points();
  const int npts = static_cast<int>(grid.size());

  ResponseReport rr;
  rr.sigma_hall = response::hall_conductivity_marker(mc.pi0, mc.d, mc.g);
  rr.ids = response::trace_per_unit_area(mc.pi0.matrix.mat, mc.g);

  rr.j_hall.resize(npts);
  std::vector<Real> ids_defect(npts);
  for_each_index(sc.opt.threads, npts, [&](int i) {
    const NeassState st = neass::neass_state(gen, mc.pi0, mc.h0, mc.d, grid[i]);
    rr.j_hall[i] = {grid[i], response::hall_current_density(mc.h0, mc.d, st, mc.g)};
    ids_defect[i] =
        std::abs(response::trace_per_unit_area(st.Pi.matrix.mat, mc.g) - rr.ids);
  });

  const PowerLawFit kubo = response::kubo_defect_scaling(mc.h0, gen, mc.pi0, mc.d, mc.g, grid,
                                                         sc.cfg.eps.max_allowed);
  rr.kubo_defect_slope = kubo.slope;

  const OperatorMatrix j1 = response::current_operator(mc.h0, mc.d, 1);
  const Real equilibrium =
      std::abs(response::trace_per_unit_area(j1.mat * mc.pi0.matrix.mat, mc.g));

  s.metrics["sigma_hall"] = rr.sigma_hall;
  s.metrics["two_pi_sigma"] = 2.0 * kPi * rr.sigma_hall;
  if (mc.filled_bands > 0) {
    rr.chern_oracle =
        response::chern_number_momentum(FluxConfig{mc.g.p, mc.g.q}, mc.filled_bands,
                                        sc.cfg.potential.v);
    s.metrics["chern_oracle"] = rr.chern_oracle;
    s.metrics["quantization_defect"] = std::abs(2.0 * kPi * rr.sigma_hall - rr.chern_oracle);
  } else {
    s.metrics["chern_oracle"] = nullptr;
    s.metrics["oracle_skipped_reason"] = "projection rank is not a whole number of bands";
  }
  s.metrics["kubo_slope"] = kubo.slope;
  s.metrics["kubo_r2"] = kubo.r_squared;
  s.metrics["equilibrium_current"] = equilibrium;
  s.metrics["ids"] = rr.ids;
  s.metrics["ids_defect_max"] = *std::max_element(ids_defect.begin(), ids_defect.end());

  // Linear-response extrapolation: the intercept of j/eps against eps is the
  // zero-field limit of the measured conductivity.
  {
    std::vector<Real> x(grid), y(npts);
    for (int i = 0; i < npts; ++i) y[i] = rr.j_hall[i].second / grid[i];
    const auto line = fitting::least_squares_line(x, y);
    s.metrics["j_over_eps_intercept"] = line.intercept;
    s.metrics["j_intercept_rel_defect"] =
        std::abs(line.intercept - rr.sigma_hall) / std::abs(rr.sigma_hall);
  }

  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < npts; ++i) {
    const Real defect = std::abs(rr.j_hall[i].second - grid[i] * rr.sigma_hall);
    rows.push_back({format_real(grid[i]), format_real(rr.j_hall[i].second),
                    format_real(defect)});
  }
  const std::string cpath = sc.artifact("response_sweep.csv");
  write_csv(cpath, "eps,j_hall,defect", rows);
  s.artifacts.push_back(cpath);

  if (sc.opt.svg) {
    SvgSeries defect{"|j - eps*sigma|", {}};
    for (int i = 0; i < npts; ++i)
      defect.points.emplace_back(grid[i],
                                 std::abs(rr.j_hall[i].second - grid[i] * rr.sigma_hall));
    const std::string vpath = sc.artifact("response_defect.svg");
    write_svg_plot(vpath, "linear-response defect " + sc.cfg.name, "eps", "defect", {defect},
                   true);
    s.artifacts.push_back(vpath);
  }

  const bool enforce = sc.cfg.enforce_criteria;
  if (mc.filled_bands > 0) {
    const Real qbound = sc.cfg.tol.quantization * sc.opt.tol_scale;
    const Real qdefect = std::abs(2.0 * kPi * rr.sigma_hall - rr.chern_oracle);
    char bound[64];
    std::snprintf(bound, sizeof(bound), "<= %g", qbound);
    checks.push_back(
        {"hall conductivity quantization", qdefect <= qbound, qdefect, bound, enforce});
  }
  {
    const Real target =
        static_cast<Real>(gen.order + 1) - sc.cfg.tol.slope_band * sc.opt.tol_scale;
    char bound[64];
    std::snprintf(bound, sizeof(bound), ">= %g", target);
    checks.push_back({"kubo defect slope", kubo.slope >= target, kubo.slope, bound, enforce});
  }
  {
    const Real ebound = sc.cfg.tol.equilibrium_current * sc.opt.tol_scale;
    char bound[64];
    std::snprintf(bound, sizeof(bound), "<= %g", ebound);
    checks.push_back(
        {"equilibrium current vanishes", equilibrium <= ebound, equilibrium, bound, enforce});
  }

  s.seconds = seconds_since(t0);
  return s;
}

StageReport run_localize_stage(StageCtx& sc, std::vector<CriterionCheck>& checks) {
  const auto t0 = Clock::now();
  StageReport s;
  s.name = "localize";
  s.status = "ok";
  const auto& mc = sc.mc;
  const auto& gen = sc.generators(nullptr);
  const NeassState st = neass::neass_state(gen, mc.pi0, mc.h0, mc.d, sc.cfg.localize_eps);
  s.metrics["eps_localization"] = sc.cfg.localize_eps;

  struct Family {
    std::string name;
    Matrix kernel;
  };
  std::vector<Family> families;
  families.push_back({"pi0", mc.pi0.matrix.mat});
  families.push_back({"comm_x1", response::position_commutator(mc.pi0.matrix, mc.d, 1).mat});
  families.push_back({"comm_x2", response::position_commutator(mc.pi0.matrix, mc.d, 2).mat});
  const Matrix pin = st.Pi.matrix.mat;
  families.push_back({"j1_pi_n", response::current_operator(mc.h0, mc.d, 1).mat * pin});
  families.push_back({"j2_pi_n", response::current_operator(mc.h0, mc.d, 2).mat * pin});
  families.push_back({"h0_pi_n", mc.h0.mat * pin});

  std::vector<SvgSeries> profiles;
  for (const auto& fam : families) {
    const DecayProfile prof = localization::kernel_decay_profile(fam.kernel, mc.g);
    const LocalizationFit fit = localization::fit_localization(prof);
    s.metrics[fam.name] = fit_json(fit);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < prof.distance.size(); ++i)
      rows.push_back({format_real(prof.distance[i]), format_real(prof.value[i])});
    const std::string cpath = sc.artifact("decay_" + fam.name + ".csv");
    write_csv(cpath, "d,value", rows);
    s.artifacts.push_back(cpath);

    if (sc.opt.svg) {
      SvgSeries ser{fam.name, {}};
      for (std::size_t i = 0; i < prof.distance.size(); ++i)
        if (prof.value[i] > 0) ser.points.emplace_back(prof.distance[i],
                                                       std::log10(prof.value[i]));
      profiles.push_back(std::move(ser));
    }

    checks.push_back({"localize " + fam.name + " decay",
                      fit.beta > 0 && fit.r_squared >= 0.85, fit.beta,
                      "beta > 0 and R^2 >= 0.85", sc.cfg.enforce_criteria});
  }

  if (sc.opt.svg) {
    const std::string vpath = sc.artifact("decay_profiles.svg");
    write_svg_plot(vpath, "kernel decay " + sc.cfg.name, "torus distance", "log10 max |T(x,x')|",
                   profiles, false);
    s.artifacts.push_back(vpath);
  }

  // Resolvent rates at increasing distance from the spectrum; the in-gap
  // point comes first, the far-below point last.
  const Real e_min = mc.spec.eigenvalues(0);
  const std::vector<Complex> z_list = {Complex(mc.gap.mu, 0.0), Complex(mc.gap.mu, 0.6),
                                       Complex(mc.gap.mu, 1.5), Complex(e_min - 3.0, 0.0)};
  const auto ct = localization::combes_thomas_scan(mc.h0, mc.g, z_list);
  Json ct_json = Json::array();
  std::vector<Real> betas;
  for (std::size_t i = 0; i < ct.size(); ++i) {
    Real dist = std::numeric_limits<Real>::infinity();
    for (int k = 0; k < mc.spec.eigenvalues.size(); ++k)
      dist = std::min(dist, std::abs(z_list[i] - Complex(mc.spec.eigenvalues(k), 0.0)));
    Json jz;
    jz["re"] = z_list[i].real();
    jz["im"] = z_list[i].imag();
    jz["dist"] = dist;
    jz["beta"] = ct[i].beta;
    jz["r_squared"] = ct[i].r_squared;
    ct_json.push_back(jz);
    betas.push_back(ct[i].beta);
  }
  s.metrics["combes_thomas"] = ct_json;
  const Real tau = fitting::kendall_tau(betas);
  s.metrics["combes_thomas_kendall_tau"] = tau;
  checks.push_back({"resolvent decay monotone in distance", tau >= 0.8, tau, ">= 0.8",
                    sc.cfg.enforce_criteria});

  s.seconds = seconds_since(t0);
  return s;
}

StageReport run_oracle_stage(StageCtx& sc) {
  const auto t0 = Clock::now();
  const auto& mc = sc.mc;
  if (mc.filled_bands <= 0)
    return skipped_stage("oracle", "projection rank is not a whole number of bands");
  StageReport s;
  s.name = "oracle";
  s.status = "ok";
  const int chern = response::chern_number_momentum(FluxConfig{mc.g.p, mc.g.q},
                                                    mc.filled_bands, sc.cfg.potential.v);
  s.metrics["p"] = mc.g.p;
  s.metrics["q"] = mc.g.q;
  s.metrics["filled_bands"] = mc.filled_bands;
  s.metrics["chern"] = chern;
  s.seconds = seconds_since(t0);
  return s;
}

}  // namespace

ModelContext build_context(const ExperimentConfig& cfg) {
  validate(cfg);
  ModelContext mc;
  mc.cfg = cfg;
  mc.g = lattice::build_geometry(cfg.L1, cfg.L2, cfg.flux, cfg.a);
  mc.h0 = lattice::build_hamiltonian(mc.g, cfg.potential);
  mc.d = lattice::displacement_table(mc.g);
  mc.spec = spectral::eigendecompose(mc.h0);

  const int n = mc.g.sites();
  Real hint = 0.0;
  if (cfg.filled_bands) {
    const int k = *cfg.filled_bands * (n / cfg.flux.q);
    if (mc.spec.eigenvalues(k) - mc.spec.eigenvalues(k - 1) < cfg.gap_min_width)
      throw GaplessAtFilling("no gap above band " + std::to_string(*cfg.filled_bands) +
                             " of " + std::to_string(cfg.flux.q) + " on this torus");
    hint = 0.5 * (mc.spec.eigenvalues(k - 1) + mc.spec.eigenvalues(k));
  } else {
    hint = *cfg.gap_hint;
  }
  mc.gap = spectral::find_gap(mc.spec, hint, cfg.gap_min_width);
  mc.pi0 = spectral::fermi_projection_spectral(mc.spec, mc.gap.mu);

  const long long filled = static_cast<long long>(mc.gap.rank) * cfg.flux.q;
  mc.filled_bands = (filled % n == 0) ? static_cast<int>(filled / n) : -1;
  return mc;
}

RunReport run_pipeline(const ExperimentConfig& cfg, const RunOptions& opt) {
  ExperimentConfig eff = cfg;
  if (opt.seed) eff.seed = *opt.seed;
  if (!opt.out_dir.empty()) eff.output_dir = opt.out_dir;
  if (!opt.stages.empty()) eff.stages = opt.stages;
  validate(eff);

  std::error_code ec;
  fs::create_directories(eff.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + eff.output_dir + "'");

  RunReport report;
  report.config = config_json(eff);

  const auto t0 = Clock::now();
  ModelContext mc = build_context(eff);
  StageCtx sc{eff, opt, mc, fs::path(eff.output_dir), std::nullopt};
  {
    StageReport build;
    build.name = "build";
    build.status = "ok";
    build.seconds = seconds_since(t0);
    build.metrics["model"] = eff.name;
    build.metrics["sites"] = mc.g.sites();
    report.stages.push_back(build);
  }

  const auto requested = [&eff](const std::string& name) {
    return std::find(eff.stages.begin(), eff.stages.end(), name) != eff.stages.end();
  };

  report.stages.push_back(requested("spectrum")
                              ? run_spectrum_stage(sc)
                              : skipped_stage("spectrum", "stage not requested"));
  report.stages.push_back(requested("neass") ? run_neass_stage(sc, report.checks)
                                             : skipped_stage("neass", "stage not requested"));
  report.stages.push_back(requested("response")
                              ? run_response_stage(sc, report.checks)
                              : skipped_stage("response", "stage not requested"));
  report.stages.push_back(requested("localize")
                              ? run_localize_stage(sc, report.checks)
                              : skipped_stage("localize", "stage not requested"));
  report.stages.push_back(requested("oracle") ? run_oracle_stage(sc)
                                              : skipped_stage("oracle", "stage not requested"));

  report.write(sc.artifact("report.json"));
  return report;
}

}  // namespace qhall::cli

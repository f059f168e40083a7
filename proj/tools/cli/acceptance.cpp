#include "cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <random>

#include "cli/pipeline.hpp"
#include "qhall/errors.hpp"
#include "qhall/fit.hpp"
#include "qhall/localization.hpp"
#include "qhall/neass.hpp"
#include "qhall/response.hpp"
#include "qhall/superop.hpp"

namespace qhall::cli {

namespace {

std::string strf(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return buf;
}

void emit(std::ostream* live, const std::string& line) {
  if (live) *live << line << "\n" << std::flush;
}

NeassGenerators truncate(const NeassGenerators& gen, int n) {
  NeassGenerators t;
  t.order = n;
  t.A.assign(gen.A.begin(), gen.A.begin() + n);
  return t;
}

// Fixtures shared across the criteria.  Generator towers go to order 3 once;
// lower orders reuse the leading generators, which the recursion makes valid
// by construction.
struct Battery {
  ModelContext m12, m12b, m24, g5, g8;
  NeassGenerators gen12, gen24;
  std::vector<Real> grid;
  std::mt19937 rng;
  Real ts = 1.0;

  // Values criteria produce and the supplementary section reuses.
  Real slope_n2_m12 = 0.0;
  Real slope_n2_m24 = 0.0;
  Real sigma_m12 = 0.0;
  int criteria_failures = 0;

  Battery(std::uint64_t seed, Real tol_scale, std::ostream* live)
      : rng(static_cast<std::mt19937::result_type>(seed)), ts(tol_scale) {
    const auto models = bundled_models();
    emit(live, "building fixtures: " + models[0].name + ", " + models[1].name + ", " +
                   models[2].name + ", " + models[3].name + ", " + models[4].name);
    m12 = build_context(models[0]);
    m12b = build_context(models[1]);
    m24 = build_context(models[2]);
    g5 = build_context(models[3]);
    g8 = build_context(models[4]);
    grid = models[0].eps.points();
    emit(live, "building generator towers to order 3 (12x12 and 24x24)");
    gen12 = neass::neass_generators(m12.h0, m12.pi0, m12.spec, m12.d, 3);
    gen24 = neass::neass_generators(m24.h0, m24.pi0, m24.spec, m24.d, 3);
  }

  std::vector<ModelContext*> gapped() { return {&m12, &m12b, &m24, &g5, &g8}; }
};

template <typename Fn>
void run_criterion(AcceptanceReport& rep, std::ostream* live, int number,
                   const std::string& name, Fn&& fn) {
  CriterionResult r;
  r.number = number;
  r.name = name;
  try {
    fn(r);
  } catch (const Error& e) {
    r.pass = false;
    r.details.push_back(std::string("aborted: ") + e.what());
  }
  emit(live, strf("[%s] %2d %s", r.pass ? "PASS" : "FAIL", r.number, r.name.c_str()));
  for (const auto& d : r.details) emit(live, "        " + d);
  rep.criteria.push_back(std::move(r));
}

void criterion_residual_scaling(Battery& b, CriterionResult& r) {
  const Real band = 0.25 * b.ts;
  r.pass = true;
  for (int n = 1; n <= 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const PowerLawFit fit = neass::residual_scaling(b.m12.h0, truncate(b.gen12, n), b.m12.pi0,
                                                    b.m12.d, b.grid, 0.32);
    const Real secs = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = std::abs(fit.slope - (n + 1)) <= band;
    if (n == 2) b.slope_n2_m12 = fit.slope;
    r.details.push_back(strf("12x12 order %d: slope %.4f, target %d +- %.2f, %.1f s%s", n,
                             fit.slope, n + 1, band, secs, ok ? "" : "  <- out of band"));
    r.pass = r.pass && ok;
  }
  for (int n = 1; n <= 3; ++n) {
    const PowerLawFit fit = neass::residual_scaling(b.m24.h0, truncate(b.gen24, n), b.m24.pi0,
                                                    b.m24.d, b.grid, 0.32);
    if (n == 2) b.slope_n2_m24 = fit.slope;
    r.details.push_back(
        strf("size-scaling evidence 24x24 order %d: slope %.4f", n, fit.slope));
  }
  if (!r.pass)
    r.details.push_back(
        "the 12x12 slopes saturate at the seam floor of the torus coordinate branch; "
        "the 24x24 evidence above approaches the targets (see README)");
}

void criterion_kubo_scaling(Battery& b, CriterionResult& r) {
  r.pass = true;
  for (int n = 1; n <= 2; ++n) {
    const Real target = (n + 1) - 0.25 * b.ts;
    const PowerLawFit fit = response::kubo_defect_scaling(
        b.m12.h0, truncate(b.gen12, n), b.m12.pi0, b.m12.d, b.m12.g, b.grid, 0.32);
    const bool ok = fit.slope >= target;
    r.details.push_back(strf("12x12 order %d: slope %.4f, need >= %.2f%s", n, fit.slope, target,
                             ok ? "" : "  <- below target"));
    r.pass = r.pass && ok;
  }
  for (int n = 1; n <= 2; ++n) {
    const PowerLawFit fit = response::kubo_defect_scaling(
        b.m24.h0, truncate(b.gen24, n), b.m24.pi0, b.m24.d, b.m24.g, b.grid, 0.32);
    r.details.push_back(
        strf("size-scaling evidence 24x24 order %d: slope %.4f", n, fit.slope));
  }
}

void criterion_quantization(Battery& b, CriterionResult& r) {
  const Real bound = 0.05 * b.ts;
  b.sigma_m12 = response::hall_conductivity_marker(b.m12.pi0, b.m12.d, b.m12.g);
  const int c1 = response::chern_number_momentum(FluxConfig{1, 3}, 1);
  const Real d1 = std::abs(2.0 * kPi * b.sigma_m12 - c1);

  const Real sigma2 = response::hall_conductivity_marker(b.m12b.pi0, b.m12b.d, b.m12b.g);
  const int c2 = response::chern_number_momentum(FluxConfig{1, 3}, 2);
  const Real d2 = std::abs(2.0 * kPi * sigma2 - c2);

  const Real sigma24 = response::hall_conductivity_marker(b.m24.pi0, b.m24.d, b.m24.g);
  const Real d24 = std::abs(2.0 * kPi * sigma24 - c1);

  const bool ok1 = d1 <= bound, ok2 = d2 <= bound, trend = d24 <= d1;
  r.details.push_back(strf("first gap 12x12: 2*pi*sigma = %.6f, oracle %d, defect %.3e%s",
                           2.0 * kPi * b.sigma_m12, c1, d1, ok1 ? "" : "  <- out"));
  r.details.push_back(strf("second gap 12x12: 2*pi*sigma = %.6f, oracle %d, defect %.3e%s",
                           2.0 * kPi * sigma2, c2, d2, ok2 ? "" : "  <- out"));
  r.details.push_back(strf("first gap 24x24: defect %.3e, non-increasing from 12x12: %s", d24,
                           trend ? "yes" : "no"));
  r.pass = ok1 && ok2 && trend;
}

void criterion_equilibrium_current(Battery& b, CriterionResult& r) {
  const Real bound = 1e-8 * b.ts;
  r.pass = true;
  for (ModelContext* mc : b.gapped()) {
    const OperatorMatrix j1 = response::current_operator(mc->h0, mc->d, 1);
    const Real val =
        std::abs(response::trace_per_unit_area(j1.mat * mc->pi0.matrix.mat, mc->g));
    const bool ok = val <= bound;
    r.details.push_back(
        strf("%s: |T(J1 Pi0)| = %.3e%s", mc->cfg.name.c_str(), val, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }
}

void criterion_liouvillian_round_trip(Battery& b, CriterionResult& r) {
  const Real bound = 1e-10 * b.ts;
  r.pass = true;
  for (ModelContext* mc : b.gapped()) {
    Real worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const OperatorMatrix a = lattice::random_mp_operator(mc->g, b.rng);
      const Matrix inv = superop::inv_liouvillian_spectral(mc->spec, mc->pi0, a.mat);
      const Matrix image = superop::liouvillian(mc->h0.mat, inv);
      worst = std::max(worst,
                       operator_norm(image - superop::od_part(a.mat, mc->pi0)));
    }
    const bool ok = worst <= bound;
    r.details.push_back(strf("%s: max round-trip defect %.3e over 20 draws%s",
                             mc->cfg.name.c_str(), worst, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }

  const Real rel_bound = 1e-8 * b.ts;
  const Contour c = spectral::build_contour(b.m12.gap, b.m12.spec, 128);
  const Matrix w = lattice::displacement_product(b.m12.d, b.m12.pi0.matrix.mat, 2);
  const Matrix bs = superop::inv_liouvillian_spectral(b.m12.spec, b.m12.pi0, w);
  const Matrix bc = superop::inv_liouvillian_contour(b.m12.h0, b.m12.pi0, w, c);
  const Real rel = operator_norm(bc - bs) / operator_norm(bs);
  const bool ok = rel <= rel_bound;
  r.details.push_back(
      strf("contour vs spectral route at 128 nodes: relative defect %.3e%s", rel,
           ok ? "" : "  <- out"));
  r.pass = r.pass && ok;
}

void criterion_riesz_projection(Battery& b, CriterionResult& r) {
  const Real bound = 1e-10 * b.ts;
  r.pass = true;
  for (ModelContext* mc : {&b.m12, &b.g8}) {
    const Contour c = spectral::build_contour(mc->gap, mc->spec, 128);
    const Projection riesz = spectral::fermi_projection_riesz(mc->h0, c);
    const Matrix& pr = riesz.matrix.mat;
    const Real diff = operator_norm(pr - mc->pi0.matrix.mat);
    const Real idem = operator_norm(pr * pr - pr);
    const Real herm = hermiticity_defect(pr);
    const bool ok = diff <= bound && idem <= bound && herm <= bound;
    r.details.push_back(strf("%s: route difference %.3e, idempotency %.3e, hermiticity %.3e%s",
                             mc->cfg.name.c_str(), diff, idem, herm, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }
}

void criterion_ids_invariance(Battery& b, CriterionResult& r) {
  const Real bound = 1e-12 * b.ts;
  const Real ids0 = response::trace_per_unit_area(b.m12.pi0.matrix.mat, b.m12.g);
  Real worst = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const NeassGenerators gen = truncate(b.gen12, n);
    for (Real eps : {0.01, 0.05, 0.1}) {
      const NeassState st = neass::neass_state(gen, b.m12.pi0, b.m12.h0, b.m12.d, eps);
      worst = std::max(
          worst, std::abs(response::trace_per_unit_area(st.Pi.matrix.mat, b.m12.g) - ids0));
    }
  }
  r.pass = worst <= bound;
  r.details.push_back(strf("density of states per area %.6f; max drift %.3e over orders 1-3, "
                           "eps in {0.01, 0.05, 0.1}",
                           ids0, worst));
}

void criterion_chern_simons(Battery& b, CriterionResult& r) {
  const Real bound = 1e-8 * b.ts;
  const int n = b.m12.g.sites();
  r.pass = true;

  const auto check = [&](const std::string& label, const Matrix& u) {
    const auto [dressed, bare] = response::chern_simons_check(b.m12.pi0, u, b.m12.d, b.m12.g);
    const Real defect = std::abs(dressed - bare);
    const bool ok = defect <= bound;
    r.details.push_back(
        strf("%s: |T_dressed - T_bare| = %.3e%s", label.c_str(), defect, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  };

  check("identity", Matrix::Identity(n, n));

  const NeassState st = neass::neass_state(truncate(b.gen12, 2), b.m12.pi0, b.m12.h0, b.m12.d,
                                           0.05);
  check("order-2 dressing at eps=0.05", st.U);

  std::uniform_real_distribution<Real> angle(0.0, 2.0 * kPi);
  Matrix phases = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) phases(i, i) = std::polar(1.0, angle(b.rng));
  check("random site phases", phases);

  if (!r.pass)
    r.details.push_back(
        "the dressed marker inherits the seam of the coordinate branch; the defect is the "
        "finite-size tail of the dressing unitary, not round-off (see README)");
}

void criterion_trace_identities(Battery& b, CriterionResult& r) {
  const Real cyc_bound = 1e-12 * b.ts;
  const Real van_bound = 1e-8 * b.ts;
  r.pass = true;

  Real worst_cyc = 0.0;
  for (int k = 0; k < 3; ++k) {
    const OperatorMatrix t1 = lattice::random_mp_operator(b.m12.g, b.rng);
    const OperatorMatrix t2 = lattice::random_mp_operator(b.m12.g, b.rng);
    worst_cyc = std::max(worst_cyc, response::cyclicity_defect(t1.mat, t2.mat, b.m12.g));
  }
  const bool cyc_ok = worst_cyc <= cyc_bound;
  r.details.push_back(strf("cyclicity defect over 3 random pairs: %.3e%s", worst_cyc,
                           cyc_ok ? "" : "  <- out"));

  const OperatorMatrix random_a = lattice::random_mp_operator(b.m12.g, b.rng);
  Real h0_van = 0.0;
  Real rand_van = 0.0;
  for (int axis : {1, 2}) {
    h0_van = std::max(
        h0_van, response::vanishing_trace_check(b.m12.pi0, b.m12.h0.mat, b.m12.d, axis, b.m12.g));
    rand_van = std::max(
        rand_van, response::vanishing_trace_check(b.m12.pi0, random_a.mat, b.m12.d, axis, b.m12.g));
  }
  const bool h0_ok = h0_van <= van_bound;
  const bool rand_ok = rand_van <= van_bound;
  r.details.push_back(
      strf("vanishing trace, A = H0: %.3e%s", h0_van, h0_ok ? "" : "  <- out"));
  r.details.push_back(
      strf("vanishing trace, A = random draw: %.3e%s", rand_van, rand_ok ? "" : "  <- out"));
  if (!rand_ok) {
    const OperatorMatrix random_b = lattice::random_mp_operator(b.m24.g, b.rng);
    Real rand24 = 0.0;
    for (int axis : {1, 2})
      rand24 = std::max(rand24, response::vanishing_trace_check(b.m24.pi0, random_b.mat, b.m24.d,
                                                                axis, b.m24.g));
    r.details.push_back(strf("same check on a 24x24 draw: %.3e", rand24));
    r.details.push_back(
        "the identity holds per unit area in infinite volume; on the torus a hop along e1 with "
        "complex amplitude threads flux through the handle and leaves a seam tail that shrinks "
        "tenfold per six sites of width, crossing 1e-8 only near L = 42");
    r.details.push_back(
        "H0 stays at round-off because its e1 hops are real and the even potential-free torus "
        "is inversion symmetric");
  }
  r.pass = cyc_ok && h0_ok && rand_ok;
}

void criterion_localization(Battery& b, CriterionResult& r) {
  r.pass = true;

  // Kernel families at 24x24, dressed at order 2, eps = 0.05.
  const NeassState st24 =
      neass::neass_state(truncate(b.gen24, 2), b.m24.pi0, b.m24.h0, b.m24.d, 0.05);
  const Matrix pin = st24.Pi.matrix.mat;
  const std::vector<std::pair<std::string, Matrix>> families = {
      {"pi0", b.m24.pi0.matrix.mat},
      {"comm_x1", response::position_commutator(b.m24.pi0.matrix, b.m24.d, 1).mat},
      {"comm_x2", response::position_commutator(b.m24.pi0.matrix, b.m24.d, 2).mat},
      {"j1_pi_n", response::current_operator(b.m24.h0, b.m24.d, 1).mat * pin},
      {"j2_pi_n", response::current_operator(b.m24.h0, b.m24.d, 2).mat * pin},
      {"h0_pi_n", b.m24.h0.mat * pin},
  };
  for (const auto& [name, kernel] : families) {
    const auto fit =
        localization::fit_localization(localization::kernel_decay_profile(kernel, b.m24.g));
    const bool ok = fit.beta > 0 && fit.r_squared >= 0.85;
    r.details.push_back(strf("24x24 %s: beta %.3f, R^2 %.3f%s", name.c_str(), fit.beta,
                             fit.r_squared, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }

  // Resolvent rate vs distance from the spectrum at 12x12.
  const Real e_min = b.m12.spec.eigenvalues(0);
  const std::vector<Complex> z_list = {Complex(b.m12.gap.mu, 0.0), Complex(b.m12.gap.mu, 0.6),
                                       Complex(b.m12.gap.mu, 1.5), Complex(e_min - 3.0, 0.0)};
  const auto ct = localization::combes_thomas_scan(b.m12.h0, b.m12.g, z_list);
  std::vector<Real> betas;
  std::string beta_line = "resolvent rates by distance:";
  for (const auto& fit : ct) {
    betas.push_back(fit.beta);
    beta_line += strf(" %.3f", fit.beta);
  }
  const Real tau = fitting::kendall_tau(betas);
  const bool ct_ok = tau >= 0.8;
  r.details.push_back(beta_line + strf("; kendall tau %.2f%s", tau, ct_ok ? "" : "  <- out"));
  r.pass = r.pass && ct_ok;

  // Dressing stability of the decay rates at 12x12.
  const NeassGenerators gen2 = truncate(b.gen12, 2);
  const std::vector<Real> eps_list = {0.0, 0.02, 0.05, 0.1};
  const std::vector<std::string> fam_names = {"comm_x1", "h0_pi_n", "j1_pi_n"};
  std::vector<std::vector<Real>> rates(fam_names.size());
  for (Real eps : eps_list) {
    const NeassState st = neass::neass_state(gen2, b.m12.pi0, b.m12.h0, b.m12.d, eps);
    const std::vector<Matrix> kernels = {
        response::position_commutator(st.Pi.matrix, b.m12.d, 1).mat,
        b.m12.h0.mat * st.Pi.matrix.mat,
        response::current_operator(b.m12.h0, b.m12.d, 1).mat * st.Pi.matrix.mat,
    };
    for (std::size_t f = 0; f < kernels.size(); ++f)
      rates[f].push_back(
          localization::fit_localization(localization::kernel_decay_profile(kernels[f],
                                                                            b.m12.g))
              .beta);
  }
  for (std::size_t f = 0; f < fam_names.size(); ++f) {
    const auto [lo, hi] = std::minmax_element(rates[f].begin(), rates[f].end());
    const Real variation = (*hi - *lo) / rates[f].front();
    const bool ok = variation <= 0.30;
    r.details.push_back(strf("12x12 %s rate variation over eps in [0, 0.1]: %.2f%%%s",
                             fam_names[f].c_str(), 100.0 * variation, ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }
}

void criterion_trace_two_routes(Battery& b, CriterionResult& r) {
  const Real bound = 1e-10 * b.ts;
  r.pass = true;
  for (ModelContext* mc : {&b.m12, &b.g8}) {
    const auto [anchored, reduced] = response::commutator_trace_two_ways(mc->pi0, mc->d, mc->g);
    const Real defect = std::abs(anchored - reduced);
    const bool ok = defect <= bound;
    r.details.push_back(strf("%s: |anchored - reduced| = %.3e, i*T = %.6f%s",
                             mc->cfg.name.c_str(), defect,
                             (Complex(0, 1) * anchored).real(), ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }
}

void criterion_approximants(Battery& b, CriterionResult& r) {
  const Real bound = (0.05 / (2.0 * kPi)) * b.ts;
  r.pass = true;
  struct Approximant {
    int p, q, L, filled;
    ModelContext* reuse;  // null builds a fresh torus
  };
  std::vector<Approximant> steps = {
      {1, 2, 12, 1, nullptr},
      {2, 3, 12, 2, nullptr},
      {3, 5, 20, 3, &b.g5},
      {5, 8, 16, 5, &b.g8},
  };
  for (const auto& step : steps) {
    int chern = 0;
    try {
      chern = response::chern_number_momentum(FluxConfig{step.p, step.q}, step.filled);
    } catch (const GaplessAtFilling&) {
      r.details.push_back(strf("flux %d/%d: gapless at filling %d/%d (reported, excluded)",
                               step.p, step.q, step.filled, step.q));
      continue;
    }
    ModelContext fresh;
    const ModelContext* mc = step.reuse;
    if (!mc) {
      ExperimentConfig cfg = default_config();
      cfg.name = strf("flux_%d_%d", step.p, step.q);
      cfg.L1 = cfg.L2 = step.L;
      cfg.flux = {step.p, step.q};
      cfg.filled_bands = step.filled;
      fresh = build_context(cfg);
      mc = &fresh;
    }
    const Real sigma = response::hall_conductivity_marker(mc->pi0, mc->d, mc->g);
    const Real defect = std::abs(sigma - chern / (2.0 * kPi));
    const bool ok = defect <= bound;
    r.details.push_back(strf("flux %d/%d on %dx%d: sigma %.6f, oracle %d/(2*pi), defect %.3e%s",
                             step.p, step.q, mc->g.L1, mc->g.L2, sigma, chern, defect,
                             ok ? "" : "  <- out"));
    r.pass = r.pass && ok;
  }
}

void supplementary_rows(Battery& b, AcceptanceReport& rep, std::ostream* live) {
  emit(live, "");
  emit(live, "supplementary pinned expectations, measured honestly (outside the criteria "
             "count):");
  const auto add = [&](const std::string& label, bool pass, const std::string& detail) {
    emit(live, strf("[%s] %s", pass ? "PASS" : "FAIL", label.c_str()));
    emit(live, "        " + detail);
    rep.supplementary.push_back({label, pass, detail});
  };

  add("pipeline residual slope at order 2 within [2.75, 3.25]",
      b.slope_n2_m12 >= 2.75 && b.slope_n2_m12 <= 3.25,
      strf("measured %.4f on the default model; the seam floor of the coordinate branch "
           "caps the 12x12 slope (24x24 reaches %.2f)",
           b.slope_n2_m12, b.slope_n2_m24));

  const NeassGenerators gen2 = truncate(b.gen12, 2);
  {
    const NeassState st = neass::neass_state(gen2, b.m12.pi0, b.m12.h0, b.m12.d, 0.05);
    const Real j = response::hall_current_density(b.m12.h0, b.m12.d, st, b.m12.g);
    const Real rel = std::abs(j / 0.05 - b.sigma_m12) / std::abs(b.sigma_m12);
    add("hall current over eps within 2% of the marker at eps = 0.05",
        rel <= 0.02, strf("measured %.2f%% on the default model", 100.0 * rel));
  }
  {
    std::vector<Real> x = b.grid, y;
    for (Real eps : b.grid) {
      const NeassState st = neass::neass_state(gen2, b.m12.pi0, b.m12.h0, b.m12.d, eps);
      y.push_back(response::hall_current_density(b.m12.h0, b.m12.d, st, b.m12.g) / eps);
    }
    const auto line = fitting::least_squares_line(x, y);
    const Real rel = std::abs(line.intercept - b.sigma_m12) / std::abs(b.sigma_m12);
    add("j/eps intercept within 1% of the marker", rel <= 0.01,
        strf("extrapolated intercept %.6f vs marker %.6f: %.2f%%", line.intercept,
             b.sigma_m12, 100.0 * rel));
  }
  {
    const auto fit_of = [&](const Matrix& m) {
      return localization::fit_localization(
          localization::kernel_decay_profile(m, b.m12.g));
    };
    const Real beta_p = fit_of(b.m12.pi0.matrix.mat).beta;
    const Real beta_c =
        fit_of(response::position_commutator(b.m12.pi0.matrix, b.m12.d, 1).mat).beta;
    const Real rel = std::abs(beta_c - beta_p) / beta_p;
    add("commutator kernel rate within 20% of the projection rate", rel <= 0.20,
        strf("beta(Pi0) %.3f vs beta([Pi0,X1]) %.3f: %.0f%%; the displacement weight "
             "flattens the first bins on a 12x12 torus",
             beta_p, beta_c, 100.0 * rel));
  }
  {
    const auto defects =
        neass::recursion_identity_defects(b.m12.h0, gen2, b.m12.pi0, b.m12.d);
    const Matrix w = lattice::displacement_product(b.m12.d, b.m12.pi0.matrix.mat, 2);
    const Matrix wd = w - superop::od_part(w, b.m12.pi0);
    add("kernel-route defining equation at order 1 below 1e-9", defects[0] <= 1e-9,
        strf("defect %.6e equals the block-diagonal part of the displacement kernel "
             "%.6e exactly; no off-diagonal generator can cancel it",
             defects[0], operator_norm(wd)));
  }
  {
    Matrix h = Matrix::Zero(2, 2);
    h(1, 1) = 1.0;
    const OperatorMatrix hop{h, true, false};
    const Spectrum s = spectral::eigendecompose(hop);
    const GapInfo gap = spectral::find_gap(s, 0.5);
    const Contour c = spectral::build_contour(gap, s, 32);
    const Projection riesz = spectral::fermi_projection_riesz(hop, c);
    Matrix exact = Matrix::Zero(2, 2);
    exact(0, 0) = 1.0;
    const Real err = (riesz.matrix.mat - exact).cwiseAbs().maxCoeff();
    add("two-level riesz projection entrywise below 1e-12 at 32 nodes", err <= 1e-12,
        strf("measured %.3e; the trapezoid error is exactly r^n/(1 - r^n) with r = 1/2, "
             "n = 32, i.e. %.3e; 64 nodes reach the round-off floor",
             err, std::pow(0.5, 32) / (1.0 - std::pow(0.5, 32))));
  }
  add("verification suite exits 0 on the bundled default model", b.criteria_failures == 0,
      strf("%d of 12 criteria fail at the pinned sizes, so the exit status is 1",
           b.criteria_failures));
}

}  // namespace

int AcceptanceReport::failures() const {
  return static_cast<int>(
      std::count_if(criteria.begin(), criteria.end(),
                    [](const CriterionResult& c) { return !c.pass; }));
}

Json AcceptanceReport::to_json() const {
  Json j;
  j["criteria"] = Json::array();
  for (const auto& c : criteria) {
    Json jc;
    jc["number"] = c.number;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["details"] = c.details;
    j["criteria"].push_back(jc);
  }
  j["supplementary"] = Json::array();
  for (const auto& s : supplementary) {
    Json js;
    js["label"] = s.label;
    js["pass"] = s.pass;
    js["detail"] = s.detail;
    j["supplementary"].push_back(js);
  }
  j["failures"] = failures();
  j["pass"] = all_pass();
  return j;
}

AcceptanceReport run_acceptance(std::uint64_t seed, Real tol_scale, std::ostream* live) {
  AcceptanceReport rep;
  Battery b(seed, tol_scale, live);

  run_criterion(rep, live, 1, "stationarity residual scales with the expansion order",
                [&](CriterionResult& r) { criterion_residual_scaling(b, r); });
  run_criterion(rep, live, 2, "hall current defect scales beyond linear response",
                [&](CriterionResult& r) { criterion_kubo_scaling(b, r); });
  run_criterion(rep, live, 3, "hall conductivity quantization and size trend",
                [&](CriterionResult& r) { criterion_quantization(b, r); });
  run_criterion(rep, live, 4, "equilibrium current vanishes",
                [&](CriterionResult& r) { criterion_equilibrium_current(b, r); });
  run_criterion(rep, live, 5, "inverse liouvillian round trip and route agreement",
                [&](CriterionResult& r) { criterion_liouvillian_round_trip(b, r); });
  run_criterion(rep, live, 6, "riesz and spectral fermi projections agree",
                [&](CriterionResult& r) { criterion_riesz_projection(b, r); });
  run_criterion(rep, live, 7, "integrated density of states is dressing-invariant",
                [&](CriterionResult& r) { criterion_ids_invariance(b, r); });
  run_criterion(rep, live, 8, "chern-simons marker invariance under dressing",
                [&](CriterionResult& r) { criterion_chern_simons(b, r); });
  run_criterion(rep, live, 9, "trace cyclicity and vanishing commutator traces",
                [&](CriterionResult& r) { criterion_trace_identities(b, r); });
  run_criterion(rep, live, 10, "localization suite: kernels, resolvents, dressed states",
                [&](CriterionResult& r) { criterion_localization(b, r); });
  run_criterion(rep, live, 11, "anchored and reduced commutator traces agree",
                [&](CriterionResult& r) { criterion_trace_two_routes(b, r); });
  run_criterion(rep, live, 12, "quantization along flux approximants",
                [&](CriterionResult& r) { criterion_approximants(b, r); });

  b.criteria_failures = rep.failures();
  supplementary_rows(b, rep, live);

  emit(live, "");
  emit(live, strf("summary: %d of 12 criteria pass, %d fail; %zu supplementary rows "
                  "reported",
                  12 - rep.failures(), rep.failures(), rep.supplementary.size()));
  return rep;
}

}  // namespace qhall::cli

#include "qhall/fit.hpp"

#include <cmath>
#include <cstddef>

#include "qhall/errors.hpp"

namespace qhall {
namespace fitting {

LineFit least_squares_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ConfigError("least_squares_line: size mismatch");
  if (n < 2) throw DegenerateFit("need at least 2 points, got " + std::to_string(n));
  Real mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<Real>(n);
  my /= static_cast<Real>(n);
  Real sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DegenerateFit("all abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const Real ss_res = syy - f.slope * sxy;
  f.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  return f;
}

PowerLawFit power_law_fit(const std::vector<Real>& x, const std::vector<Real>& y) {
  std::vector<Real> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 1e-13)) {
      throw DegenerateFit("ordinate " + std::to_string(y[i]) +
                          " below the 1e-13 round-off floor");
    }
    if (!(x[i] > 0.0)) throw DegenerateFit("nonpositive abscissa");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LineFit f = least_squares_line(lx, ly);
  return PowerLawFit{f.slope, f.intercept, f.r_squared};
}

Real kendall_tau(const std::vector<Real>& v) {
  const std::size_t n = v.size();
  if (n < 2) throw DegenerateFit("kendall_tau: need at least 2 points");
  int concordant_minus_discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (v[j] > v[i]) ++concordant_minus_discordant;
      else if (v[j] < v[i]) --concordant_minus_discordant;
    }
  }
  return static_cast<Real>(concordant_minus_discordant) /
         (static_cast<Real>(n) * static_cast<Real>(n - 1) / 2.0);
}

}  // namespace fitting
}  // namespace qhall

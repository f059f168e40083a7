#pragma once

#include <vector>

#include "qhall/types.hpp"

namespace qhall {

struct PowerLawFit {
  Real slope = 0.0;
  Real intercept = 0.0;  // in log space: log(y) ~ intercept + slope*log(x)
  Real r_squared = 0.0;
};

namespace fitting {

struct LineFit {
  Real slope = 0.0;
  Real intercept = 0.0;
  Real r_squared = 0.0;
};

// Ordinary least squares of y against x.  DegenerateFit when fewer than two
// points or all x coincide.
LineFit least_squares_line(const std::vector<Real>& x, const std::vector<Real>& y);

// Fit of log(y) vs log(x).  DegenerateFit when any y < 1e-13: such values sit
// at the double-precision round-off floor and would corrupt the slope.
PowerLawFit power_law_fit(const std::vector<Real>& x, const std::vector<Real>& y);

// Kendall tau (tau-a) of a sequence against its index order; +1 for strictly
// increasing, -1 for strictly decreasing, ties contribute zero.
Real kendall_tau(const std::vector<Real>& v);

}  // namespace fitting
}  // namespace qhall

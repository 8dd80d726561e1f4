#pragma once

#include <optional>
#include <vector>

#include "twrn/types.hpp"

namespace twrn::dsbs {

// Doubly symmetric binary source with crossover rho and Hamming distortions.
JointSource make_source(double rho);

// R(d1,d2) on the diagonal pieces: h(rho) - h(d) for d <= rho, else 0.
double rd(double rho, double d);

// d* = 1/2 - sqrt(1-2 rho)/2; satisfies d* conv d* = rho.
double d_star(double rho);

// Closed-form upper bound on R_CR(d,d) for d in (d*, 1/2].
double cr_upper(double rho, double d);

// Wyner common information K(X;Y) = 1 + h(rho) - 2 h(d*).
double wyner_common_information(double rho);

// Test channel p(xhat, yhat | x, y) built from the four-BSC cascade; valid
// for d in [0, d*]. Marginalizes back to the DSBS exactly and meets both
// Hamming distortions with equality.
Channel cascade_channel(double rho, double d);

// Test channel p(what | x, y) with Xhat = Yhat = What; valid for
// d in [d*, 1/2]. Both induced marginal test channels are BSC(d).
Channel four_input_channel(double rho, double d);

struct FigureRow {
  double d = 0.0;
  double r = 0.0;                    // R(d,d)
  std::optional<double> cr_upper;    // defined only past d*
  bool past_dstar = false;
};

struct FigureTable {
  double rho = 0.0;
  double d_star = 0.0;
  std::vector<FigureRow> rows;
};

FigureTable figure_curves(double rho, const std::vector<double>& grid);

// Default grid for the figure sweeps: step over [0, 1/2].
std::vector<double> default_figure_grid(double step = 0.005);

}  // namespace twrn::dsbs

namespace twrn::gaussian {

struct GaussianSpec {
  double sigma_x2 = 1.0;
  double sigma_y2 = 1.0;
  double rho = 0.0;
  double m_x = 0.0;  // means do not enter any rate
  double m_y = 0.0;

  void validate() const;
};

// Conditional RD closed form, bits: max(0, log2(sigma^2 (1-rho^2)/d)/2).
double conditional_rd(const GaussianSpec& spec, int which, double d);

// R(d1,d2) = max of the two conditional closed forms.
double region(const GaussianSpec& spec, double d1, double d2);

}  // namespace twrn::gaussian

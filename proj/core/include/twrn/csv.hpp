#pragma once

#include <string>
#include <vector>

#include "twrn/bounds.hpp"
#include "twrn/closed_forms.hpp"
#include "twrn/cr_rd.hpp"

namespace twrn::csv {

// Locale-independent formatting: 12 significant digits, '.' decimal point.
std::string format(double v);

// One CSV line from already-formatted cells, LF terminated.
std::string line(const std::vector<std::string>& cells);

// d1,d2,r_l,r_u_dstar,r_u_star,r_u,c_gap,ordering_ok
std::string bundle_header();
std::string bundle_row(const BoundBundle& b);

// d1,d2,r_cr,mi_x,mi_y,gap_to_rl
std::string cr_header();
std::string cr_row(const CrSweepRow& r);

// d,r,cr_upper,is_past_dstar
std::string figure_header();
std::string figure_row(const dsbs::FigureRow& r);

// d,rate
std::string curve_header();
std::string curve_row(double d, double rate);

}  // namespace twrn::csv

#include "twrn/csv.hpp"

#include <charconv>
#include <cmath>

namespace twrn::csv {

std::string format(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

std::string bundle_header() {
  return "d1,d2,r_l,r_u_dstar,r_u_star,r_u,c_gap,ordering_ok\n";
}

std::string bundle_row(const BoundBundle& b) {
  return line({format(b.d1), format(b.d2), format(b.r_l), format(b.r_u_dstar),
               format(b.r_u_star), format(b.r_u), b.c_gap ? format(*b.c_gap) : "",
               b.ordering_ok ? "1" : "0"});
}

std::string cr_header() { return "d1,d2,r_cr,mi_x,mi_y,gap_to_rl\n"; }

std::string cr_row(const CrSweepRow& r) {
  return line({format(r.d1), format(r.d2), format(r.r_cr), format(r.mi_x),
               format(r.mi_y), format(r.gap_to_rl)});
}

std::string figure_header() { return "d,r,cr_upper,is_past_dstar\n"; }

std::string figure_row(const dsbs::FigureRow& r) {
  return line({format(r.d), format(r.r), r.cr_upper ? format(*r.cr_upper) : "",
               r.past_dstar ? "1" : "0"});
}

std::string curve_header() { return "d,rate\n"; }

std::string curve_row(double d, double rate) {
  return line({format(d), format(rate)});
}

}  // namespace twrn::csv

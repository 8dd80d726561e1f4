#include "twrn/prob.hpp"

#include <cmath>
#include <numeric>

namespace twrn {

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows_in) {
  Mat m;
  m.rows = rows_in.size();
  m.cols = rows_in.empty() ? 0 : rows_in[0].size();
  m.a.reserve(m.rows * m.cols);
  for (const auto& r : rows_in) {
    if (r.size() != m.cols)
      throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
    m.a.insert(m.a.end(), r.begin(), r.end());
  }
  return m;
}

double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

double sum(std::span<const double> p) {
  return std::accumulate(p.begin(), p.end(), 0.0);
}

std::vector<double> validate_pmf(std::vector<double> p, double drift) {
  double total = 0.0;
  for (double v : p) {
    if (v < 0.0) throw Error(ErrorCode::NegativeProbability, "pmf entry < 0");
    total += v;
  }
  if (std::abs(total - 1.0) >= drift)
    throw Error(ErrorCode::NotNormalized, "pmf sums to " + std::to_string(total));
  for (auto& v : p)
    if (v < kProbFloor) v = 0.0;
  total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total <= 0.0) throw Error(ErrorCode::NotNormalized, "pmf has no mass");
  for (auto& v : p) v /= total;
  return p;
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h -= plog2p(v);
  return h;
}

double binary_entropy(double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw Error(ErrorCode::DomainError, "binary_entropy argument outside [0,1]");
  if (lambda == 0.0 || lambda == 1.0) return 0.0;
  return -lambda * std::log2(lambda) - (1.0 - lambda) * std::log2(1.0 - lambda);
}

double binary_convolution(double a, double b) {
  if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
    throw Error(ErrorCode::DomainError, "binary_convolution argument outside [0,1]");
  return a * (1.0 - b) + (1.0 - a) * b;
}

std::vector<double> row_marginal(const Mat& joint) {
  std::vector<double> m(joint.rows, 0.0);
  for (std::size_t i = 0; i < joint.rows; ++i)
    for (std::size_t j = 0; j < joint.cols; ++j) m[i] += joint(i, j);
  return m;
}

std::vector<double> col_marginal(const Mat& joint) {
  std::vector<double> m(joint.cols, 0.0);
  for (std::size_t i = 0; i < joint.rows; ++i)
    for (std::size_t j = 0; j < joint.cols; ++j) m[j] += joint(i, j);
  return m;
}

double mutual_information_bits(const Mat& joint) {
  const auto pr = row_marginal(joint);
  const auto pc = col_marginal(joint);
  double mi = 0.0;
  for (std::size_t i = 0; i < joint.rows; ++i) {
    for (std::size_t j = 0; j < joint.cols; ++j) {
      double p = joint(i, j);
      if (p > 0.0) mi += p * std::log2(p / (pr[i] * pc[j]));
    }
  }
  return mi < 0.0 ? 0.0 : mi;  // guard fp noise on independent inputs
}

double conditional_mutual_information_bits(const Tensor3& joint, int conditioning_axis) {
  if (conditioning_axis < 0 || conditioning_axis > 2)
    throw Error(ErrorCode::DomainError, "conditioning axis must be 0, 1 or 2");

  // Map to (a, b, c) with b the conditioning axis: I(A;C|B).
  std::size_t dims[3] = {joint.n0, joint.n1, joint.n2};
  int axis_a, axis_c;
  switch (conditioning_axis) {
    case 0: axis_a = 1; axis_c = 2; break;
    case 1: axis_a = 0; axis_c = 2; break;
    default: axis_a = 0; axis_c = 1; break;
  }
  const std::size_t na = dims[axis_a], nb = dims[conditioning_axis], nc = dims[axis_c];

  auto at = [&](std::size_t ia, std::size_t ib, std::size_t ic) {
    std::size_t idx[3];
    idx[axis_a] = ia;
    idx[conditioning_axis] = ib;
    idx[axis_c] = ic;
    return joint(idx[0], idx[1], idx[2]);
  };

  double cmi = 0.0;
  std::vector<double> pab(na), pcb(nc);
  for (std::size_t ib = 0; ib < nb; ++ib) {
    double pb = 0.0;
    std::fill(pab.begin(), pab.end(), 0.0);
    std::fill(pcb.begin(), pcb.end(), 0.0);
    for (std::size_t ia = 0; ia < na; ++ia)
      for (std::size_t ic = 0; ic < nc; ++ic) {
        double p = at(ia, ib, ic);
        pb += p;
        pab[ia] += p;
        pcb[ic] += p;
      }
    if (pb <= 0.0) continue;
    for (std::size_t ia = 0; ia < na; ++ia)
      for (std::size_t ic = 0; ic < nc; ++ic) {
        double p = at(ia, ib, ic);
        if (p > 0.0) cmi += p * std::log2(p * pb / (pab[ia] * pcb[ic]));
      }
  }
  return cmi < 0.0 ? 0.0 : cmi;
}

}  // namespace twrn

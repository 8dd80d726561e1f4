#include "twrn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twrn/errors.hpp"
#include "twrn/parallel.hpp"
#include "twrn/prob.hpp"
#include "twrn/rd_solvers.hpp"

namespace twrn::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double h2_capped(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

// Entropy modulus |H(P)-H(Q)| <= tv log2(N-1) + h(tv) (Fannes-Audenaert),
// capped by the diameter log2 N.
double fannes(std::size_t n, double tv) {
  if (n <= 1) return 0.0;
  tv = std::min(tv, 1.0);
  double bound = tv * std::log2(static_cast<double>(std::max<std::size_t>(n - 1, 1))) +
                 h2_capped(std::min(tv, 0.5));
  return std::min(bound, std::log2(static_cast<double>(n)));
}

struct Shape {
  std::size_t n_in = 0, n_out = 0;
  std::vector<double> weights;          // input weights
  bool needs_relaxed_pass = false;      // decoder-based feasibility
};

std::uint64_t compositions_count(int k, int m) {
  // C(k + m - 1, m - 1)
  std::uint64_t num = 1;
  for (int i = 1; i < m; ++i) {
    num = num * static_cast<std::uint64_t>(k + i);
    num /= static_cast<std::uint64_t>(i);
  }
  return num;
}

std::vector<std::vector<double>> all_rows(int k, int m) {
  std::vector<std::vector<double>> rows;
  std::vector<int> c(m, 0);
  c[0] = k;
  while (true) {
    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) r[i] = static_cast<double>(c[i]) / k;
    rows.push_back(std::move(r));
    int i = 0;
    while (i < m - 1 && c[i] == 0) ++i;
    if (i == m - 1) break;
    int val = c[i];
    c[i] = 0;
    c[0] = val - 1;
    c[i + 1] += 1;
  }
  return rows;
}

Shape shape_for(const JointSource& src, const GridSpec& grid) {
  Shape s;
  switch (grid.objective) {
    case Objective::MarginalRdX:
      s.n_in = src.nx();
      s.n_out = src.nxhat();
      s.weights = src.q_x();
      break;
    case Objective::MarginalRdY:
      s.n_in = src.ny();
      s.n_out = src.nyhat();
      s.weights = src.q_y();
      break;
    case Objective::ConditionalRdX:
      s.n_in = src.nx() * src.ny();
      s.n_out = src.nxhat();
      s.weights = src.q_xy.a;
      break;
    case Objective::ConditionalRdY:
      s.n_in = src.nx() * src.ny();
      s.n_out = src.nyhat();
      s.weights = src.q_xy.a;
      break;
    case Objective::JointRd:
    case Objective::CrRd:
      s.n_in = src.nx() * src.ny();
      s.n_out = src.nxhat() * src.nyhat();
      s.weights = src.q_xy.a;
      break;
    case Objective::WynerZivX:
      s.n_in = src.nx();
      s.n_out = grid.aux_card ? grid.aux_card : src.nx() + 1;
      s.weights = src.q_x();
      s.needs_relaxed_pass = true;
      break;
    case Objective::WynerZivY:
      s.n_in = src.ny();
      s.n_out = grid.aux_card ? grid.aux_card : src.ny() + 1;
      s.weights = src.q_y();
      s.needs_relaxed_pass = true;
      break;
    case Objective::OneDescription:
      s.n_in = src.nx() * src.ny();
      s.n_out = grid.aux_card ? grid.aux_card : src.nx() * src.ny() + 2;
      s.weights = src.q_xy.a;
      s.needs_relaxed_pass = true;
      break;
    case Objective::HeegardBerger:
      s.n_in = src.nx() * src.ny();
      s.n_out = grid.aux_card ? grid.aux_card : src.nx() * src.ny() + 2;
      s.weights = src.q_xy.a;
      s.needs_relaxed_pass = true;
      break;
  }
  return s;
}

// Evaluator over a candidate channel given as per-row pointers into the
// composition storage. Infeasible channels return +inf.
class Evaluator {
 public:
  Evaluator(const JointSource& src, const GridSpec& grid, const Shape& shape,
            double slack1, double slack2)
      : src_(src), grid_(grid), shape_(shape), d1_(grid.d1 + slack1), d2_(grid.d2 + slack2) {
    if (grid_.objective == Objective::HeegardBerger) {
      inner_cfg_.tol = 1e-9;
      inner_cfg_.max_iters = 5000;
    }
  }

  double operator()(const std::vector<const double*>& rows) const {
    switch (grid_.objective) {
      case Objective::MarginalRdX:
        return marginal(rows, src_.delta1, d1_);
      case Objective::MarginalRdY:
        return marginal(rows, src_.delta2, d2_);
      case Objective::ConditionalRdX:
        return conditional(rows, true);
      case Objective::ConditionalRdY:
        return conditional(rows, false);
      case Objective::JointRd:
        return joint_or_cr(rows, false);
      case Objective::CrRd:
        return joint_or_cr(rows, true);
      case Objective::WynerZivX:
      case Objective::WynerZivY:
        return wyner_ziv(rows);
      case Objective::OneDescription:
        return one_description(rows);
      case Objective::HeegardBerger:
        return heegard(rows);
    }
    return kInf;
  }

 private:
  double marginal(const std::vector<const double*>& rows, const Mat& delta,
                  double dmax) const {
    const std::size_t n = shape_.n_in, m = shape_.n_out;
    double dist = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t v = 0; v < m; ++v)
        dist += shape_.weights[x] * rows[x][v] * delta(x, v);
    if (dist > dmax + 1e-12) return kInf;
    double mi = 0.0;
    std::vector<double> out(m, 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t v = 0; v < m; ++v) out[v] += shape_.weights[x] * rows[x][v];
    for (std::size_t x = 0; x < n; ++x) {
      if (shape_.weights[x] == 0.0) continue;
      for (std::size_t v = 0; v < m; ++v) {
        double p = rows[x][v];
        if (p > 0.0 && out[v] > 0.0) mi += shape_.weights[x] * p * std::log2(p / out[v]);
      }
    }
    return std::max(mi, 0.0);
  }

  double conditional(const std::vector<const double*>& rows, bool x_side) const {
    const std::size_t nx = src_.nx(), ny = src_.ny(), m = shape_.n_out;
    const Mat& delta = x_side ? src_.delta1 : src_.delta2;
    double target = x_side ? d1_ : d2_;
    double dist = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        std::size_t z = x * ny + y;
        for (std::size_t v = 0; v < m; ++v)
          dist += src_.q_xy(x, y) * rows[z][v] * delta(x_side ? x : y, v);
      }
    if (dist > target + 1e-12) return kInf;

    Tensor3 joint(nx, ny, m);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t v = 0; v < m; ++v)
          joint(x, y, v) = src_.q_xy(x, y) * rows[x * ny + y][v];
    return conditional_mutual_information_bits(joint, x_side ? 1 : 0);
  }

  double joint_or_cr(const std::vector<const double*>& rows, bool cr) const {
    const std::size_t nx = src_.nx(), ny = src_.ny(), nxh = src_.nxhat(),
                      nyh = src_.nyhat();
    const std::size_t m = nxh * nyh;
    double dist1 = 0.0, dist2 = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) {
        std::size_t z = x * ny + y;
        double qz = src_.q_xy(x, y);
        if (qz == 0.0) continue;
        for (std::size_t v = 0; v < m; ++v) {
          double p = rows[z][v];
          if (p == 0.0) continue;
          dist1 += qz * p * src_.delta1(x, v / nyh);
          dist2 += qz * p * src_.delta2(y, v % nyh);
        }
      }
    if (dist1 > d1_ + 1e-12 || dist2 > d2_ + 1e-12) return kInf;

    if (!cr) {
      // plain I(X,Y;V)
      double mi = 0.0;
      std::vector<double> out(m, 0.0);
      for (std::size_t z = 0; z < nx * ny; ++z)
        for (std::size_t v = 0; v < m; ++v) out[v] += shape_.weights[z] * rows[z][v];
      for (std::size_t z = 0; z < nx * ny; ++z) {
        double qz = shape_.weights[z];
        if (qz == 0.0) continue;
        for (std::size_t v = 0; v < m; ++v) {
          double p = rows[z][v];
          if (p > 0.0 && out[v] > 0.0) mi += qz * p * std::log2(p / out[v]);
        }
      }
      return std::max(mi, 0.0);
    }
    Tensor3 joint(nx, ny, m);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t v = 0; v < m; ++v)
          joint(x, y, v) = src_.q_xy(x, y) * rows[x * ny + y][v];
    double i1 = conditional_mutual_information_bits(joint, 1);
    double i2 = conditional_mutual_information_bits(joint, 0);
    return std::max(i1, i2);
  }

  double wyner_ziv(const std::vector<const double*>& rows) const {
    const bool x_side = grid_.objective == Objective::WynerZivX;
    const std::size_t nx = x_side ? src_.nx() : src_.ny();
    const std::size_t ny = x_side ? src_.ny() : src_.nx();
    const std::size_t na = shape_.n_out;
    const Mat& delta = x_side ? src_.delta1 : src_.delta2;
    const std::size_t nxh = delta.cols;
    double target = x_side ? d1_ : d2_;
    auto q = [&](std::size_t a, std::size_t b) {
      return x_side ? src_.q_xy(a, b) : src_.q_xy(b, a);
    };

    // Best-decoder distortion.
    double dist = 0.0;
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t y = 0; y < ny; ++y) {
        double best = kInf;
        for (std::size_t xh = 0; xh < nxh; ++xh) {
          double e = 0.0;
          for (std::size_t x = 0; x < nx; ++x) e += q(x, y) * rows[x][a] * delta(x, xh);
          best = std::min(best, e);
        }
        dist += best;
      }
    if (dist > target + 1e-12) return kInf;

    Tensor3 joint(nx, ny, na);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t a = 0; a < na; ++a) joint(x, y, a) = q(x, y) * rows[x][a];
    return conditional_mutual_information_bits(joint, 1);
  }

  double one_description(const std::vector<const double*>& rows) const {
    const std::size_t nx = src_.nx(), ny = src_.ny(), nc = shape_.n_out;
    // Best decoders per (c, y) and (c, x).
    double dist1 = 0.0, dist2 = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t y = 0; y < ny; ++y) {
        double best = kInf;
        for (std::size_t xh = 0; xh < src_.nxhat(); ++xh) {
          double e = 0.0;
          for (std::size_t x = 0; x < nx; ++x)
            e += src_.q_xy(x, y) * rows[x * ny + y][c] * src_.delta1(x, xh);
          best = std::min(best, e);
        }
        dist1 += best;
      }
      for (std::size_t x = 0; x < nx; ++x) {
        double best = kInf;
        for (std::size_t yh = 0; yh < src_.nyhat(); ++yh) {
          double e = 0.0;
          for (std::size_t y = 0; y < ny; ++y)
            e += src_.q_xy(x, y) * rows[x * ny + y][c] * src_.delta2(y, yh);
          best = std::min(best, e);
        }
        dist2 += best;
      }
    }
    if (dist1 > d1_ + 1e-12 || dist2 > d2_ + 1e-12) return kInf;

    Tensor3 joint(nx, ny, nc);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t c = 0; c < nc; ++c)
          joint(x, y, c) = src_.q_xy(x, y) * rows[x * ny + y][c];
    double i1 = conditional_mutual_information_bits(joint, 1);
    double i2 = conditional_mutual_information_bits(joint, 0);
    return std::max(i1, i2);
  }

  double heegard(const std::vector<const double*>& rows) const {
    const std::size_t nx = src_.nx(), ny = src_.ny(), nc = shape_.n_out;
    Tensor3 joint(nx, ny, nc);
    Mat q_xs(nx, nc * ny, 0.0), q_ys(ny, nc * nx, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t c = 0; c < nc; ++c) {
          double p = src_.q_xy(x, y) * rows[x * ny + y][c];
          joint(x, y, c) = p;
          q_xs(x, c * ny + y) += p;
          q_ys(y, c * nx + x) += p;
        }
    double i1 = conditional_mutual_information_bits(joint, 1);
    double i2 = conditional_mutual_information_bits(joint, 0);
    double r1 = conditional_rd_general(q_xs, src_.delta1, d1_, inner_cfg_).rate;
    double r2 = conditional_rd_general(q_ys, src_.delta2, d2_, inner_cfg_).rate;
    return std::max(i1, i2) + r1 + r2;
  }

  const JointSource& src_;
  const GridSpec& grid_;
  const Shape& shape_;
  double d1_, d2_;
  SolverConfig inner_cfg_;
};

struct PassResult {
  double value = kInf;
  std::vector<std::size_t> arg;
  std::uint64_t feasible = 0;
};

PassResult run_pass(const JointSource& src, const GridSpec& grid, const Shape& shape,
                    const std::vector<std::vector<double>>& rows, double slack1,
                    double slack2) {
  const std::size_t r = rows.size(), n_in = shape.n_in;
  Evaluator eval(src, grid, shape, slack1, slack2);

  std::size_t n_chunks = std::min<std::size_t>(r, 64);
  std::vector<PassResult> chunk_best(n_chunks);
  parallel_chunks(r, n_chunks, [&](std::size_t c, std::size_t b, std::size_t e) {
    PassResult local;
    std::vector<std::size_t> idx(n_in, 0);
    std::vector<const double*> ptrs(n_in);
    for (std::size_t first = b; first < e; ++first) {
      std::fill(idx.begin(), idx.end(), 0);
      idx[0] = first;
      bool done = false;
      while (!done) {
        for (std::size_t i = 0; i < n_in; ++i) ptrs[i] = rows[idx[i]].data();
        double v = eval(ptrs);
        if (v < kInf) {
          ++local.feasible;
          if (v < local.value || (v == local.value && idx < local.arg)) {
            local.value = v;
            local.arg = idx;
          }
        }
        // odometer over positions 1..n_in-1; position 0 is the chunk key
        done = true;
        for (std::size_t pos = n_in; pos-- > 1;) {
          if (++idx[pos] < r) {
            done = false;
            break;
          }
          idx[pos] = 0;
        }
      }
    }
    chunk_best[c] = std::move(local);
  });

  PassResult best;
  for (auto& cb : chunk_best) {
    best.feasible += cb.feasible;
    if (cb.value < best.value ||
        (cb.value == best.value && !cb.arg.empty() &&
         (best.arg.empty() || cb.arg < best.arg))) {
      best.value = cb.value;
      best.arg = cb.arg;
    }
  }
  return best;
}

}  // namespace

std::uint64_t grid_size(const JointSource& src, const GridSpec& grid) {
  Shape s = shape_for(src, grid);
  std::uint64_t per_row = compositions_count(grid.k, static_cast<int>(s.n_out));
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < s.n_in; ++i) {
    if (total > (std::uint64_t(1) << 62) / std::max<std::uint64_t>(per_row, 1))
      return std::numeric_limits<std::uint64_t>::max();
    total *= per_row;
  }
  return total;
}

OracleResult grid_min_channel(const JointSource& src, const GridSpec& grid,
                              const SolverConfig& cfg) {
  cfg.validate();
  if (grid.k < 1) throw Error(ErrorCode::DomainError, "grid k must be >= 1");
  Shape shape = shape_for(src, grid);
  std::uint64_t total = grid_size(src, grid);
  std::uint64_t passes = shape.needs_relaxed_pass ? 2 : 1;
  if (total > grid.budget / passes)
    throw Error(ErrorCode::BudgetExceeded,
                "grid would need " + std::to_string(total) + " evaluations per pass");

  auto rows = all_rows(grid.k, static_cast<int>(shape.n_out));

  PassResult strict = run_pass(src, grid, shape, rows, 0.0, 0.0);
  if (strict.arg.empty())
    throw Error(ErrorCode::InfeasibleDistortion, "no grid channel meets the constraints");

  // Discretization modulus: anchored rounding moves each row by at most
  // eps in l1, so total variation of any involved joint moves by <= eps/2.
  const double eps = 2.0 * static_cast<double>(shape.n_out - 1) / grid.k;
  const double tv = 0.5 * eps;
  const std::size_t nx = src.nx(), ny = src.ny();
  double delta_i = 0.0;
  switch (grid.objective) {
    case Objective::MarginalRdX:
    case Objective::MarginalRdY:
      delta_i = fannes(shape.n_out, tv) + fannes(shape.n_in * shape.n_out, tv);
      break;
    case Objective::ConditionalRdX:
      delta_i = fannes(ny * shape.n_out, tv) + fannes(nx * ny * shape.n_out, tv);
      break;
    case Objective::ConditionalRdY:
      delta_i = fannes(nx * shape.n_out, tv) + fannes(nx * ny * shape.n_out, tv);
      break;
    case Objective::JointRd:
      delta_i = fannes(shape.n_out, tv) + fannes(nx * ny * shape.n_out, tv);
      break;
    case Objective::CrRd:
    case Objective::OneDescription:
    case Objective::WynerZivX:
    case Objective::WynerZivY:
      delta_i = std::max(fannes(ny * shape.n_out, tv), fannes(nx * shape.n_out, tv)) +
                fannes(nx * ny * shape.n_out, tv);
      break;
    case Objective::HeegardBerger:
      // max-CMI modulus plus one conditional-RD modulus per refinement term.
      delta_i = 3.0 * (fannes(std::max(nx, ny) * shape.n_out, tv) +
                       fannes(nx * ny * shape.n_out, tv));
      break;
  }

  OracleResult out;
  out.value_bits = strict.value;
  out.feasible_count = strict.feasible;
  out.evaluations = total;

  if (shape.needs_relaxed_pass) {
    double dmax = std::max(src.d1_max(), src.d2_max());
    double slack = dmax * tv;
    PassResult relaxed = run_pass(src, grid, shape, rows, slack, slack);
    out.evaluations += total;
    double drop = strict.value - (relaxed.arg.empty() ? strict.value : relaxed.value);
    out.guaranteed_gap = std::max(drop, 0.0) + delta_i;
  } else {
    out.guaranteed_gap = delta_i;
  }

  Mat probs(shape.n_in, shape.n_out, 0.0);
  for (std::size_t z = 0; z < shape.n_in; ++z)
    std::copy(rows[strict.arg[z]].begin(), rows[strict.arg[z]].end(), probs.row(z).begin());
  out.argmin.in_dims = {shape.n_in};
  out.argmin.out_dims = {shape.n_out};
  out.argmin.probs = std::move(probs);
  return out;
}

std::vector<std::vector<int>> enumerate_decoders(int c_card, int y_card, int xhat_card,
                                                 std::uint64_t budget) {
  if (c_card < 1 || y_card < 1 || xhat_card < 1)
    throw Error(ErrorCode::DomainError, "cardinalities must be >= 1");
  const std::size_t cells = static_cast<std::size_t>(c_card) * y_card;
  double count_d = std::pow(static_cast<double>(xhat_card), static_cast<double>(cells));
  if (count_d > static_cast<double>(budget))
    throw Error(ErrorCode::BudgetExceeded, "decoder table family too large");
  std::uint64_t count = static_cast<std::uint64_t>(count_d + 0.5);

  std::vector<std::vector<int>> out;
  out.reserve(count);
  std::vector<int> table(cells, 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(table);
    std::size_t pos = cells;
    while (pos > 0) {
      --pos;
      if (++table[pos] < xhat_card) break;
      table[pos] = 0;
    }
  }
  return out;
}

}  // namespace twrn::oracle

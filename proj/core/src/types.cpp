#include "twrn/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace twrn {

Channel Channel::validated(std::vector<std::size_t> in_dims,
                           std::vector<std::size_t> out_dims, Mat probs,
                           double drift) {
  std::size_t n_in = 1, n_out = 1;
  for (auto d : in_dims) n_in *= d;
  for (auto d : out_dims) n_out *= d;
  if (probs.rows != n_in || probs.cols != n_out)
    throw Error(ErrorCode::ShapeMismatch, "channel tensor does not match its dims");
  for (std::size_t i = 0; i < probs.rows; ++i) {
    std::vector<double> row(probs.row(i).begin(), probs.row(i).end());
    row = validate_pmf(std::move(row), drift);
    std::copy(row.begin(), row.end(), probs.row(i).begin());
  }
  Channel ch;
  ch.in_dims = std::move(in_dims);
  ch.out_dims = std::move(out_dims);
  ch.probs = std::move(probs);
  return ch;
}

namespace {

void check_distortion_matrix(const Mat& d, std::size_t rows, const char* name) {
  if (d.rows != rows)
    throw Error(ErrorCode::ShapeMismatch, std::string(name) + " row count mismatch");
  if (d.cols == 0)
    throw Error(ErrorCode::ShapeMismatch, std::string(name) + " has no columns");
  for (std::size_t i = 0; i < d.rows; ++i) {
    double row_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d.cols; ++j) {
      double v = d(i, j);
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::DomainError, std::string(name) + " entry outside [0, d_max]");
      row_min = std::min(row_min, v);
    }
    if (row_min != 0.0)
      throw Error(ErrorCode::NonNormalDistortion,
                  std::string(name) + " row " + std::to_string(i) + " has no zero entry");
  }
}

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

}  // namespace

JointSource validate_joint_source(JointSource raw) {
  const std::size_t nx = raw.q_xy.rows, ny = raw.q_xy.cols;
  if (nx == 0 || ny == 0)
    throw Error(ErrorCode::ShapeMismatch, "empty source pmf");
  if (raw.x_alphabet.empty()) raw.x_alphabet = default_labels(nx);
  if (raw.y_alphabet.empty()) raw.y_alphabet = default_labels(ny);
  if (raw.x_alphabet.size() != nx || raw.y_alphabet.size() != ny)
    throw Error(ErrorCode::ShapeMismatch, "alphabet sizes do not match q_xy");

  auto flat = validate_pmf(raw.q_xy.a, kPmfInputDrift);
  raw.q_xy.a = std::move(flat);

  check_distortion_matrix(raw.delta1, nx, "delta1");
  check_distortion_matrix(raw.delta2, ny, "delta2");
  if (raw.xhat_alphabet.empty()) raw.xhat_alphabet = default_labels(raw.delta1.cols);
  if (raw.yhat_alphabet.empty()) raw.yhat_alphabet = default_labels(raw.delta2.cols);
  if (raw.xhat_alphabet.size() != raw.delta1.cols || raw.yhat_alphabet.size() != raw.delta2.cols)
    throw Error(ErrorCode::ShapeMismatch, "reconstruction alphabet sizes do not match deltas");
  return raw;
}

double JointSource::d1_max() const {
  return *std::max_element(delta1.a.begin(), delta1.a.end());
}

double JointSource::d2_max() const {
  return *std::max_element(delta2.a.begin(), delta2.a.end());
}

double JointSource::d1_zero_rate() const {
  // Decoder holds y; best constant-in-x reconstruction per y.
  double total = 0.0;
  for (std::size_t y = 0; y < ny(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t xh = 0; xh < nxhat(); ++xh) {
      double e = 0.0;
      for (std::size_t x = 0; x < nx(); ++x) e += q_xy(x, y) * delta1(x, xh);
      best = std::min(best, e);
    }
    total += best;
  }
  return total;
}

double JointSource::d2_zero_rate() const {
  double total = 0.0;
  for (std::size_t x = 0; x < nx(); ++x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t yh = 0; yh < nyhat(); ++yh) {
      double e = 0.0;
      for (std::size_t y = 0; y < ny(); ++y) e += q_xy(x, y) * delta2(y, yh);
      best = std::min(best, e);
    }
    total += best;
  }
  return total;
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tol must be > 0");
  if (n_starts < 1) throw Error(ErrorCode::DomainError, "n_starts must be >= 1");
  if (max_iters < 1) throw Error(ErrorCode::DomainError, "max_iters must be >= 1");
  if (grid_resolution < 1) throw Error(ErrorCode::DomainError, "grid_resolution must be >= 1");
}

double expected_distortion(const JointSource& src, const Channel& channel, int which) {
  if (which != 1 && which != 2)
    throw Error(ErrorCode::DomainError, "which must be 1 or 2");
  const Mat& delta = (which == 1) ? src.delta1 : src.delta2;

  // Input weights per flattened input symbol, and the source coordinate the
  // distortion table reads.
  std::vector<double> w;
  std::vector<std::size_t> src_idx;
  if (channel.in_dims == std::vector<std::size_t>{src.nx(), src.ny()}) {
    w = src.q_xy.a;
    src_idx.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      src_idx[i] = (which == 1) ? i / src.ny() : i % src.ny();
  } else if (which == 1 && channel.in_dims == std::vector<std::size_t>{src.nx()}) {
    w = src.q_x();
    src_idx.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) src_idx[i] = i;
  } else if (which == 2 && channel.in_dims == std::vector<std::size_t>{src.ny()}) {
    w = src.q_y();
    src_idx.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) src_idx[i] = i;
  } else {
    throw Error(ErrorCode::ShapeMismatch, "channel input dims do not match source");
  }

  // Output coordinate carrying the reconstruction for this receiver.
  std::size_t n_out = channel.n_out();
  std::vector<std::size_t> rec_idx(n_out);
  if (channel.out_dims == std::vector<std::size_t>{src.nxhat(), src.nyhat()}) {
    for (std::size_t o = 0; o < n_out; ++o)
      rec_idx[o] = (which == 1) ? o / src.nyhat() : o % src.nyhat();
  } else if ((which == 1 && channel.out_dims == std::vector<std::size_t>{src.nxhat()}) ||
             (which == 2 && channel.out_dims == std::vector<std::size_t>{src.nyhat()})) {
    for (std::size_t o = 0; o < n_out; ++o) rec_idx[o] = o;
  } else {
    throw Error(ErrorCode::ShapeMismatch, "channel output dims do not match source");
  }

  double total = 0.0;
  for (std::size_t i = 0; i < channel.n_in(); ++i) {
    if (w[i] == 0.0) continue;
    for (std::size_t o = 0; o < n_out; ++o)
      total += w[i] * channel.probs(i, o) * delta(src_idx[i], rec_idx[o]);
  }
  return total;
}

}  // namespace twrn

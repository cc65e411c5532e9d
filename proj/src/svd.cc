// Copyright 2026 The EigenSim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eigensim/svd.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "eigensim/csv.h"
#include "eigensim/errors.h"
#include "eigensim/random.h"

namespace eigensim {
namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() * Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

// Frobenius norm of U X W^T given the Gram matrices of U and W.
double factored_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& gram_left,
                     const Eigen::MatrixXd& gram_right) {
  const double sq = (x.transpose() * gram_left * x * gram_right).trace();
  return std::sqrt(std::max(sq, 0.0));
}

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace

void SvdConfig::validate() const {
  if (target_rank < 1) throw ValidationError("target_rank must be >= 1");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be > 0");
  if (!(sigma_cutoff >= 0.0)) throw ValidationError("sigma_cutoff must be >= 0");
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
}

Eigen::MatrixXd multiply(const RatingMatrix& a, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.rows()) != a.n_items()) {
    throw DimensionError("multiply: operand has " + std::to_string(x.rows()) +
                         " rows, matrix has " + std::to_string(a.n_items()) + " columns");
  }
  // Row-major copy so each accumulation reads a contiguous row.
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor xr = x;
  RowMajor out = RowMajor::Zero(static_cast<Eigen::Index>(a.n_users()), x.cols());
  for (Index u = 0; u < a.n_users(); ++u) {
    const SparseVectorView r = a.row(u);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      out.row(static_cast<Eigen::Index>(u)) +=
          r.values[k] * xr.row(static_cast<Eigen::Index>(r.indices[k]));
    }
  }
  return out;
}

Eigen::MatrixXd multiply_transpose(const RatingMatrix& a, const Eigen::MatrixXd& y) {
  if (static_cast<std::size_t>(y.rows()) != a.n_users()) {
    throw DimensionError("multiply_transpose: operand has " + std::to_string(y.rows()) +
                         " rows, matrix has " + std::to_string(a.n_users()) + " rows");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMajor yr = y;
  RowMajor out = RowMajor::Zero(static_cast<Eigen::Index>(a.n_items()), y.cols());
  for (Index i = 0; i < a.n_items(); ++i) {
    const SparseVectorView c = a.col(i);
    for (std::size_t k = 0; k < c.nnz(); ++k) {
      out.row(static_cast<Eigen::Index>(i)) +=
          c.values[k] * yr.row(static_cast<Eigen::Index>(c.indices[k]));
    }
  }
  return out;
}

SvdFactors truncated_svd(const RatingMatrix& matrix, const SvdConfig& config) {
  config.validate();
  const std::size_t m = matrix.n_users();
  const std::size_t n = matrix.n_items();
  const std::size_t full = std::min(m, n);
  if (matrix.nnz() == 0) throw NumericalError("rank zero: matrix has no non-zero entries");
  if (config.target_rank > full) {
    throw ValidationError("target_rank " + std::to_string(config.target_rank) +
                          " exceeds min(n_users, n_items) = " + std::to_string(full));
  }
  const std::size_t k = config.target_rank;
  const std::size_t extra = config.oversampling > 0 ? config.oversampling : std::max<std::size_t>(k, 10);
  const auto block = static_cast<Eigen::Index>(std::min(full, k + extra));

  Rng rng(config.seed);
  Eigen::MatrixXd start(static_cast<Eigen::Index>(n), block);
  for (Eigen::Index c = 0; c < block; ++c) {
    for (Eigen::Index r = 0; r < start.rows(); ++r) start(r, c) = rng.normal();
  }
  Eigen::MatrixXd q = orthonormalize(start);

  Eigen::MatrixXd u, v;
  Eigen::VectorXd sigma;
  double worst = std::numeric_limits<double>::infinity();
  std::size_t kept = 0;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    // Rayleigh-Ritz on span(q): A q = Qw Rw, Rw = Ut S Vt^T.
    const Eigen::MatrixXd w = multiply(matrix, q);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    const Eigen::MatrixXd qw = qr.householderQ() * Eigen::MatrixXd::Identity(w.rows(), block);
    const Eigen::MatrixXd rw = qr.matrixQR().topRows(block).triangularView<Eigen::Upper>();
    Eigen::BDCSVD<Eigen::MatrixXd> small(rw, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = qw * small.matrixU();
    v = q * small.matrixV();
    sigma = small.singularValues();

    const double top = sigma(0);
    if (!(top > 0.0)) throw NumericalError("rank zero: all singular values vanish");
    kept = 0;
    while (kept < k && sigma(static_cast<Eigen::Index>(kept)) > config.sigma_cutoff * top) ++kept;

    const Eigen::MatrixXd z = multiply_transpose(matrix, u);
    worst = 0.0;
    for (std::size_t c = 0; c < kept; ++c) {
      const auto col = static_cast<Eigen::Index>(c);
      worst = std::max(worst, (z.col(col) - sigma(col) * v.col(col)).norm() / top);
    }
    if (worst <= config.convergence_tol) {
      SvdFactors out;
      const auto kk = static_cast<Eigen::Index>(kept);
      out.u = u.leftCols(kk);
      out.v = v.leftCols(kk);
      out.sigma = sigma.head(kk);
      out.iterations = it;
      out.residual = worst;
      return out;
    }
    q = orthonormalize(z);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "svd did not converge in %zu iterations (residual %.3e)",
                config.max_iterations, worst);
  throw ConvergenceError(buf, worst);
}

Eigen::VectorXd pinv_left_apply(const SvdFactors& factors, SparseVectorView row) {
  if (row.dim != factors.n_items()) {
    throw DimensionError("pinv_left_apply: row has length " + std::to_string(row.dim) +
                         ", factors expect " + std::to_string(factors.n_items()));
  }
  Eigen::VectorXd q = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(factors.rank()));
  for (std::size_t k = 0; k < row.nnz(); ++k) {
    if (row.indices[k] >= factors.n_items()) throw DimensionError("pinv_left_apply: index out of range");
    q += row.values[k] * factors.v.row(static_cast<Eigen::Index>(row.indices[k])).transpose();
  }
  return q.cwiseQuotient(factors.sigma);
}

double PenroseResiduals::max() const {
  return std::max({a_pinv_a, pinv_a_pinv, a_pinv_symmetry, pinv_a_symmetry});
}

PenroseResiduals penrose_residuals(const SvdFactors& factors, const RatingMatrix& matrix) {
  if (factors.n_users() != matrix.n_users() || factors.n_items() != matrix.n_items()) {
    throw DimensionError("penrose_residuals: factors do not match the matrix shape");
  }
  const Eigen::MatrixXd gu = factors.u.transpose() * factors.u;
  const Eigen::MatrixXd gv = factors.v.transpose() * factors.v;
  const Eigen::MatrixXd s = factors.sigma.asDiagonal();
  const Eigen::MatrixXd s_inv = factors.sigma.cwiseInverse().asDiagonal();

  // A = U S V^T, P = V S^-1 U^T.
  //   A P A = U (S Gv S^-1 Gu S) V^T      P A P = V (S^-1 Gu S Gv S^-1) U^T
  //   A P   = U (S Gv S^-1) U^T           P A   = V (S^-1 Gu S) V^T
  const Eigen::MatrixXd ap = s * gv * s_inv;
  const Eigen::MatrixXd pa = s_inv * gu * s;

  PenroseResiduals r;
  r.a_pinv_a = relative(factored_norm(ap * gu * s - s, gu, gv), factored_norm(s, gu, gv));
  r.pinv_a_pinv = relative(factored_norm(pa * gv * s_inv - s_inv, gv, gu),
                           factored_norm(s_inv, gv, gu));
  r.a_pinv_symmetry = relative(factored_norm(ap.transpose() - ap, gu, gu), factored_norm(ap, gu, gu));
  r.pinv_a_symmetry = relative(factored_norm(pa.transpose() - pa, gv, gv), factored_norm(pa, gv, gv));
  return r;
}

Eigen::MatrixXd reconstruct(const SvdFactors& factors) {
  return factors.u * factors.sigma.asDiagonal() * factors.v.transpose();
}

std::string svd_cache_key(const RatingMatrix& matrix, const SvdConfig& config) {
  // FNV-1a over a canonical text rendering.
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  feed(std::to_string(matrix.n_users()) + "x" + std::to_string(matrix.n_items()));
  for (const auto& e : matrix.entries()) {
    feed(std::to_string(e.user) + "," + std::to_string(e.item) + "," + format_double(e.value));
  }
  feed(std::to_string(config.target_rank));
  feed(format_double(config.sigma_cutoff));
  feed(std::to_string(config.max_iterations));
  feed(format_double(config.convergence_tol));
  feed(std::to_string(config.seed));
  feed(std::to_string(config.oversampling));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void save_dense(const Eigen::MatrixXd& m, const std::string& path) {
  std::ostringstream out;
  out << "index,component,value\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << r << ',' << c << ',' << format_double(m(r, c)) << '\n';
    }
  }
  write_file(path, out.str());
}

Eigen::MatrixXd load_dense(const std::string& path) {
  const std::string text = read_file(path);
  const auto lines = split_fields(text, "\n");
  if (lines.empty() || trim(lines[0]) != "index,component,value") {
    throw ParseError(path, 1, "expected header 'index,component,value'");
  }
  struct Cell {
    std::size_t r, c;
    double v;
  };
  std::vector<Cell> cells;
  std::size_t rows = 0, cols = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    const auto f = split_fields(lines[k], ",");
    if (f.size() != 3) throw ParseError(path, k + 1, "expected 3 fields");
    try {
      cells.push_back({parse_unsigned(f[0]), parse_unsigned(f[1]), parse_double(f[2])});
    } catch (const ValidationError& e) {
      throw ParseError(path, k + 1, e.what());
    }
    rows = std::max(rows, cells.back().r + 1);
    cols = std::max(cols, cells.back().c + 1);
  }
  if (cells.size() != rows * cols) throw ParseError(path, lines.size(), "matrix is incomplete");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (const Cell& c : cells) m(static_cast<Eigen::Index>(c.r), static_cast<Eigen::Index>(c.c)) = c.v;
  return m;
}

}  // namespace

void save_factors(const SvdFactors& factors, const std::string& dir) {
  std::filesystem::create_directories(dir);
  save_dense(factors.u, dir + "/U.csv");
  save_dense(factors.sigma.transpose(), dir + "/sigma.csv");
  save_dense(factors.v, dir + "/V.csv");
}

SvdFactors load_factors(const std::string& dir) {
  SvdFactors f;
  f.u = load_dense(dir + "/U.csv");
  f.v = load_dense(dir + "/V.csv");
  const Eigen::MatrixXd s = load_dense(dir + "/sigma.csv");
  if (s.rows() != 1 || s.cols() != f.u.cols() || f.u.cols() != f.v.cols()) {
    throw ValidationError("inconsistent factor shapes in '" + dir + "'");
  }
  f.sigma = s.row(0).transpose();
  return f;
}

}  // namespace eigensim

#include "lqdisc/matcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace lqdisc {

namespace {

// Degree-13 Pade coefficients for exp.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

constexpr double kScaledNorm = 0.5;

}  // namespace

void require_square(const Mat& x, const char* what) {
  if (x.rows() != x.cols()) {
    throw DimensionError(std::string(what) + ": expected square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

bool all_finite(const Mat& x) { return x.allFinite(); }

double norm_inf(const Mat& x) {
  if (x.size() == 0) return 0.0;
  return x.cwiseAbs().rowwise().sum().maxCoeff();
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double trace(const Mat& x) {
  require_square(x, "trace");
  return x.trace();
}

Mat symmetrize(const Mat& x) {
  require_square(x, "symmetrize");
  return 0.5 * (x + x.transpose());
}

bool is_symmetric(const Mat& x, double tol) {
  if (x.rows() != x.cols()) return false;
  if (x.size() == 0) return true;
  return (x - x.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Mat& x) {
  require_square(x, "min_eigenvalue");
  if (x.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> eig(symmetrize(x), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

bool is_psd(const Mat& x, double tol) {
  if (!is_symmetric(x, std::max(1e-12, 1e-12 * norm_inf(x)))) return false;
  return min_eigenvalue(x) >= -tol;
}

Mat solve(const Mat& a, const Mat& b) {
  require_square(a, "solve");
  if (a.rows() != b.rows()) {
    throw DimensionError("solve: A is " + std::to_string(a.rows()) + " rows, B is " +
                         std::to_string(b.rows()));
  }
  const Eigen::Index n = a.rows();
  Mat lu = a;
  Mat x = b;
  const double tol = 1e-13 * norm_inf(a);

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    lu.col(k).tail(n - k).cwiseAbs().maxCoeff(&p);
    p += k;
    if (!(std::abs(lu(p, k)) > tol)) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "solve: pivot %ld is %.3e (tolerance %.3e)",
                    static_cast<long>(k), std::abs(lu(p, k)), tol);
      throw SingularityError(msg, static_cast<int>(k));
    }
    if (p != k) {
      lu.row(k).swap(lu.row(p));
      x.row(k).swap(x.row(p));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      lu(i, k) = f;
      lu.row(i).tail(n - k - 1).noalias() -= f * lu.row(k).tail(n - k - 1);
      x.row(i).noalias() -= f * x.row(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    if (k + 1 < n) {
      x.row(k).noalias() -= lu.row(k).tail(n - k - 1) * x.bottomRows(n - k - 1);
    }
    x.row(k) /= lu(k, k);
  }
  return x;
}

Mat expm(const Mat& x) {
  require_square(x, "expm");
  if (!all_finite(x)) throw DomainError("expm: non-finite entry");
  const Eigen::Index n = x.rows();
  if (n == 0) return Mat(0, 0);

  const double nrm = norm_inf(x);
  int squarings = 0;
  if (nrm > kScaledNorm) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / kScaledNorm)));
    // guard against log2 rounding just below the boundary
    while (std::ldexp(nrm, -squarings) > kScaledNorm) ++squarings;
  }
  const Mat s = std::ldexp(1.0, -squarings) * x;
  const Mat id = Mat::Identity(n, n);
  const Mat s2 = s * s;
  const Mat s4 = s2 * s2;
  const Mat s6 = s4 * s2;
  const auto& b = kPade13;

  const Mat u_inner = s6 * (b[13] * s6 + b[11] * s4 + b[9] * s2) + b[7] * s6 + b[5] * s4 +
                      b[3] * s2 + b[1] * id;
  const Mat u = s * u_inner;
  const Mat v = s6 * (b[12] * s6 + b[10] * s4 + b[8] * s2) + b[6] * s6 + b[4] * s4 +
                b[2] * s2 + b[0] * id;

  Mat r = solve(v - u, v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Mat block(const std::vector<std::vector<Mat>>& parts) {
  if (parts.empty()) return Mat(0, 0);
  const std::size_t grid_cols = parts.front().size();
  std::vector<Eigen::Index> heights(parts.size(), 0);
  std::vector<Eigen::Index> widths(grid_cols, 0);

  for (std::size_t r = 0; r < parts.size(); ++r) {
    if (parts[r].size() != grid_cols) {
      throw DimensionError("block: ragged grid at row " + std::to_string(r));
    }
    heights[r] = parts[r].front().rows();
    for (std::size_t c = 0; c < grid_cols; ++c) {
      const Mat& p = parts[r][c];
      if (r == 0) widths[c] = p.cols();
      if (p.rows() != heights[r] || p.cols() != widths[c]) {
        throw DimensionError("block: part (" + std::to_string(r) + "," + std::to_string(c) +
                             ") is " + std::to_string(p.rows()) + "x" +
                             std::to_string(p.cols()) + ", expected " +
                             std::to_string(heights[r]) + "x" + std::to_string(widths[c]));
      }
    }
  }

  Eigen::Index total_rows = 0, total_cols = 0;
  for (auto h : heights) total_rows += h;
  for (auto w : widths) total_cols += w;
  Mat out(total_rows, total_cols);
  Eigen::Index r0 = 0;
  for (std::size_t r = 0; r < parts.size(); ++r) {
    Eigen::Index c0 = 0;
    for (std::size_t c = 0; c < grid_cols; ++c) {
      out.block(r0, c0, heights[r], widths[c]) = parts[r][c];
      c0 += widths[c];
    }
    r0 += heights[r];
  }
  return out;
}

Mat subblock(const Mat& x, Range rows, Range cols) {
  if (rows.begin < 0 || cols.begin < 0 || rows.size < 0 || cols.size < 0 ||
      rows.begin + rows.size > x.rows() || cols.begin + cols.size > x.cols()) {
    throw DimensionError("subblock: range outside " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()));
  }
  return x.block(rows.begin, cols.begin, rows.size, cols.size);
}

Mat blkdiag(const std::vector<Mat>& parts) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    rows += p.rows();
    cols += p.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r0 = 0, c0 = 0;
  for (const auto& p : parts) {
    out.block(r0, c0, p.rows(), p.cols()) = p;
    r0 += p.rows();
    c0 += p.cols();
  }
  return out;
}

Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
  Mat out(n, m);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != m) {
      throw DimensionError("from_rows: ragged initializer");
    }
    Eigen::Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

}  // namespace lqdisc

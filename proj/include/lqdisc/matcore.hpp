#pragma once

// Dense real-matrix kernel shared by all discretization routines.
//
// Storage and arithmetic come from Eigen; the pieces whose numerical contract
// matters here (matrix exponential, pivoted solve, PSD test) are implemented
// locally so their tolerances and error reporting are pinned.

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

#include "lqdisc/error.hpp"

namespace lqdisc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Row/column range [begin, begin + size).
struct Range {
  Eigen::Index begin = 0;
  Eigen::Index size = 0;
};

/// e^X by scaling and squaring with a degree-13 Pade approximant.
///
/// X is scaled by 2^-k so that ||X/2^k||_inf <= 0.5, the approximant is
/// evaluated, and the result squared k times.
Mat expm(const Mat& x);

/// Solves A X = B with partial pivoting.
///
/// Throws SingularityError when a pivot magnitude drops below
/// 1e-13 * ||A||_inf; the error carries the zero-based pivot index.
Mat solve(const Mat& a, const Mat& b);

/// Assembles a block matrix from a row-major grid of parts.
///
/// Every part in a grid row must share its row count and every part in a grid
/// column its column count. Empty (0x0) parts are not placeholders: pass a
/// correctly sized zero block instead.
Mat block(const std::vector<std::vector<Mat>>& parts);

/// Copy of the sub-block X(rows, cols).
Mat subblock(const Mat& x, Range rows, Range cols);

/// Block-diagonal matrix from square or rectangular parts.
Mat blkdiag(const std::vector<Mat>& parts);

double norm_inf(const Mat& x);
double max_abs_diff(const Mat& a, const Mat& b);
double trace(const Mat& x);

/// (X + X') / 2
Mat symmetrize(const Mat& x);

bool is_symmetric(const Mat& x, double tol);

/// Smallest eigenvalue of the symmetric part of X.
double min_eigenvalue(const Mat& x);

/// Symmetric and min eigenvalue >= -tol.
bool is_psd(const Mat& x, double tol);

bool all_finite(const Mat& x);

/// Throws DimensionError unless X is square.
void require_square(const Mat& x, const char* what);

Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);

}  // namespace lqdisc

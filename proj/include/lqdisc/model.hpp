#pragma once

// Continuous-time plant descriptions, cost specification, and the
// realization of input delays into the split B_1c / B_2c structure.

#include <optional>
#include <vector>

#include "lqdisc/matcore.hpp"

namespace lqdisc {

/// dx = A x dt + B u dt + G dw,  z = C x + D u.
struct StateSpace {
  Mat A;
  Mat B;
  Mat C;
  Mat D;
  std::optional<Mat> G;

  Eigen::Index nx() const { return A.rows(); }
  Eigen::Index nu() const { return B.cols(); }
  Eigen::Index nz() const { return C.rows(); }

  /// Throws ModelError on non-conformable or non-finite matrices.
  void validate() const;
};

/// One SISO channel of a transfer matrix: output i <- input j (zero-based),
/// polynomial coefficients in descending powers of s, input delay tau.
struct TransferChannel {
  int i = 0;
  int j = 0;
  std::vector<double> num;
  std::vector<double> den;
  double tau = 0.0;
};

/// Delayed MIMO transfer matrix. Channels not listed are identically zero.
struct TransferModel {
  int nz = 0;
  int nu = 0;
  std::vector<TransferChannel> channels;
};

struct CostSpec {
  Mat Qc;
  double mu = 0.0;
  double Ts = 1.0;
  int N = 1;
  std::vector<Vec> zbar;
  std::optional<Vec> x0;
  std::optional<Mat> P0;

  /// Reference for stage k; the last supplied reference is held beyond the
  /// end of the list, and an empty list means zero references.
  Vec reference(int k, Eigen::Index nz) const;

  /// Throws CostError on a negative discount, non-positive Ts, N < 1, a weight
  /// that is not symmetric PSD, or references of the wrong length.
  void validate(Eigen::Index nz) const;
};

/// Integer / fractional split of a delay: tau / Ts = m - v, 0 <= v < 1.
struct DelaySplit {
  int m = 0;
  double v = 0.0;
};

/// |tau/Ts - round(tau/Ts)| at or below this counts as an integer multiple.
inline constexpr double kIntegerDelayTol = 1e-12;

DelaySplit split_delay(double tau, double Ts);

/// Observable canonical realization of num(s)/den(s).
///
/// A has -a_1..-a_n (monic denominator) down its first column and ones on the
/// superdiagonal, C = [1 0 ... 0]. Throws ModelError if deg num > deg den.
StateSpace realize_channel(std::vector<double> num, std::vector<double> den);

/// Block bookkeeping for one realized delay channel.
struct RealizedChannel {
  int output = -1;  ///< -1 for channels that feed every output (state-space plants)
  int input = -1;   ///< -1 for channels driven by every input
  Eigen::Index offset = 0;
  Eigen::Index states = 0;
  DelaySplit split;
};

/// Delayed plant rewritten on the augmented input u~ = [u_{k-mbar}; ...; u_k].
struct DelayRealization {
  Mat A;     ///< stacked block-diagonal dynamics
  Mat V;     ///< diag(v_ij I)
  Mat B1c;   ///< selects u_{k-m} per channel
  Mat B2c;   ///< selects u_{k-m+1} per channel
  Mat C;
  Mat Do;    ///< feedthrough on u~ (u_{k-m} slot)
  std::optional<Mat> G;
  int nu = 0;
  int mbar = 0;
  double Ts = 1.0;
  std::vector<RealizedChannel> channels;

  Eigen::Index nx() const { return A.rows(); }
  Eigen::Index nz() const { return C.rows(); }
  Eigen::Index nu_aug() const { return static_cast<Eigen::Index>(mbar + 1) * nu; }

  /// V (B_2c - B_1c)
  Mat B2bar() const;
  /// Shift on [u_{k-mbar}; ...; u_{k-1}] dropping the oldest input.
  Mat IA() const;
  /// Injects u_k into the newest history slot.
  Mat IB() const;
};

/// Selection matrix E^p of size nu x (slots*nu) picking slot p (1-based).
Mat slot_selector(int nu, int slots, int p);

DelayRealization realize_delays(const TransferModel& model, double Ts);

/// State-space plant with per-input delays (length nu). Equal delays share the
/// plant state; distinct delays replicate the plant once per input, with the
/// noise (if any) entering the first copy.
DelayRealization realize_delays(const StateSpace& plant, const std::vector<double>& delays,
                                double Ts);

}  // namespace lqdisc

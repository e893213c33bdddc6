#include "lqdisc/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lqdisc {

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

struct ChannelParts {
  StateSpace ss;  // B is n x nu, C is nz x n, D is nz x nu
  RealizedChannel info;
};

// Slot (1-based) holding u_{k-m} on u~ = [u_{k-mbar}; ...; u_k].
int slot_of_lag(int mbar, int lag) { return mbar + 1 - lag; }

DelayRealization assemble(std::vector<ChannelParts> parts, int nz, int nu, double Ts,
                          std::optional<Mat> G) {
  DelayRealization r;
  r.nu = nu;
  r.Ts = Ts;
  r.mbar = 0;
  for (const auto& p : parts) r.mbar = std::max(r.mbar, p.info.split.m);
  const int slots = r.mbar + 1;

  std::vector<Mat> a_blocks, v_blocks;
  Eigen::Index nx = 0;
  for (auto& p : parts) {
    p.info.offset = nx;
    p.info.states = p.ss.nx();
    nx += p.ss.nx();
    a_blocks.push_back(p.ss.A);
    v_blocks.push_back(p.info.split.v * Mat::Identity(p.ss.nx(), p.ss.nx()));
  }
  r.A = blkdiag(a_blocks);
  r.V = blkdiag(v_blocks);
  r.B1c = Mat::Zero(nx, r.nu_aug());
  r.B2c = Mat::Zero(nx, r.nu_aug());
  r.C = Mat::Zero(nz, nx);
  r.Do = Mat::Zero(nz, r.nu_aug());

  for (const auto& p : parts) {
    const int m = p.info.split.m;
    const Mat e1 = slot_selector(nu, slots, slot_of_lag(r.mbar, m));
    // For m = 0 the next-newer slot does not exist; v = 0 there so the
    // difference B_2c - B_1c is multiplied by zero anyway.
    const Mat e2 = m > 0 ? slot_selector(nu, slots, slot_of_lag(r.mbar, m - 1)) : e1;
    const auto off = p.info.offset;
    const auto n = p.info.states;
    r.B1c.middleRows(off, n) = p.ss.B * e1;
    r.B2c.middleRows(off, n) = p.ss.B * e2;
    r.C.middleCols(off, n) = p.ss.C;
    r.Do += p.ss.D * e1;
    r.channels.push_back(p.info);
  }
  if (G) {
    if (G->rows() != nx) {
      throw ModelError("realize_delays: G has " + std::to_string(G->rows()) +
                       " rows, realized state has " + std::to_string(nx));
    }
    r.G = std::move(G);
  }
  return r;
}

}  // namespace

void StateSpace::validate() const {
  if (A.rows() != A.cols()) throw ModelError("A_c must be square, got " + shape(A));
  if (B.rows() != A.rows()) throw ModelError("B_c is " + shape(B) + ", A_c is " + shape(A));
  if (C.cols() != A.rows()) throw ModelError("C_c is " + shape(C) + ", A_c is " + shape(A));
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw ModelError("D_c is " + shape(D) + ", expected " + std::to_string(C.rows()) + "x" +
                     std::to_string(B.cols()));
  }
  if (G && G->rows() != A.rows()) throw ModelError("G_c is " + shape(*G) + ", A_c is " + shape(A));
  bool finite = all_finite(A) && all_finite(B) && all_finite(C) && all_finite(D);
  if (G) finite = finite && all_finite(*G);
  if (!finite) throw ModelError("state-space matrices contain non-finite entries");
}

Vec CostSpec::reference(int k, Eigen::Index nz) const {
  if (zbar.empty()) return Vec::Zero(nz);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), zbar.size() - 1);
  return zbar[idx];
}

void CostSpec::validate(Eigen::Index nz) const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw CostError("discount mu must be >= 0");
  if (!(Ts > 0.0) || !std::isfinite(Ts)) throw CostError("sampling time Ts must be > 0");
  if (N < 1) throw CostError("horizon N must be >= 1");
  if (Qc.rows() != nz || Qc.cols() != nz) {
    throw CostError("Q_c is " + shape(Qc) + ", expected " + std::to_string(nz) + "x" +
                    std::to_string(nz));
  }
  if (!all_finite(Qc)) throw CostError("Q_c has non-finite entries");
  if (!is_symmetric(Qc, 1e-12)) throw CostError("Q_c is not symmetric");
  if (min_eigenvalue(Qc) < -1e-10) throw CostError("Q_c is not positive semidefinite");
  for (std::size_t k = 0; k < zbar.size(); ++k) {
    if (zbar[k].size() != nz) {
      throw CostError("reference " + std::to_string(k) + " has length " +
                      std::to_string(zbar[k].size()) + ", expected " + std::to_string(nz));
    }
  }
  if (P0) {
    if (!is_symmetric(*P0, 1e-12) || min_eigenvalue(*P0) < -1e-10) {
      throw CostError("P0 is not symmetric positive semidefinite");
    }
  }
}

DelaySplit split_delay(double tau, double Ts) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("delay must be finite and >= 0");
  if (!(Ts > 0.0)) throw DomainError("sampling time must be > 0");
  const double ratio = tau / Ts;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= kIntegerDelayTol) {
    return {static_cast<int>(nearest), 0.0};
  }
  const double m = std::ceil(ratio);
  return {static_cast<int>(m), m - ratio};
}

StateSpace realize_channel(std::vector<double> num, std::vector<double> den) {
  auto strip = [](std::vector<double>& p) {
    auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
    p.erase(p.begin(), first);
  };
  strip(num);
  strip(den);
  if (den.empty()) throw ModelError("transfer channel has a zero denominator");
  if (num.size() > den.size()) throw ModelError("transfer channel is improper (deg num > deg den)");
  for (double c : num) if (!std::isfinite(c)) throw ModelError("non-finite numerator coefficient");
  for (double c : den) if (!std::isfinite(c)) throw ModelError("non-finite denominator coefficient");

  const double lead = den.front();
  for (double& c : den) c /= lead;
  for (double& c : num) c /= lead;

  const auto n = static_cast<Eigen::Index>(den.size()) - 1;
  std::vector<double> b(den.size(), 0.0);
  std::copy(num.begin(), num.end(), b.end() - static_cast<std::ptrdiff_t>(num.size()));

  StateSpace ss;
  ss.A = Mat::Zero(n, n);
  ss.B = Mat::Zero(n, 1);
  ss.C = Mat::Zero(1, n);
  ss.D = Mat::Constant(1, 1, b[0]);
  for (Eigen::Index k = 0; k < n; ++k) {
    ss.A(k, 0) = -den[static_cast<std::size_t>(k) + 1];
    if (k + 1 < n) ss.A(k, k + 1) = 1.0;
    ss.B(k, 0) = b[static_cast<std::size_t>(k) + 1] - b[0] * den[static_cast<std::size_t>(k) + 1];
  }
  if (n > 0) ss.C(0, 0) = 1.0;
  return ss;
}

Mat slot_selector(int nu, int slots, int p) {
  if (p < 1 || p > slots) {
    throw DimensionError("slot_selector: slot " + std::to_string(p) + " outside 1.." +
                         std::to_string(slots));
  }
  Mat e = Mat::Zero(nu, static_cast<Eigen::Index>(slots) * nu);
  e.middleCols(static_cast<Eigen::Index>(p - 1) * nu, nu).setIdentity();
  return e;
}

Mat DelayRealization::B2bar() const { return V * (B2c - B1c); }

Mat DelayRealization::IA() const {
  const Eigen::Index h = static_cast<Eigen::Index>(mbar) * nu;
  Mat ia = Mat::Zero(h, h);
  if (h > nu) ia.topRightCorner(h - nu, h - nu).setIdentity();
  return ia;
}

Mat DelayRealization::IB() const {
  const Eigen::Index h = static_cast<Eigen::Index>(mbar) * nu;
  Mat ib = Mat::Zero(h, nu);
  if (h > 0) ib.bottomRows(nu).setIdentity();
  return ib;
}

DelayRealization realize_delays(const TransferModel& model, double Ts) {
  if (model.nz < 1 || model.nu < 1) throw ModelError("transfer model needs nz >= 1 and nu >= 1");
  std::vector<const TransferChannel*> grid(static_cast<std::size_t>(model.nz * model.nu), nullptr);
  for (const auto& ch : model.channels) {
    if (ch.i < 0 || ch.i >= model.nz || ch.j < 0 || ch.j >= model.nu) {
      throw ModelError("channel (" + std::to_string(ch.i + 1) + "," + std::to_string(ch.j + 1) +
                       ") outside " + std::to_string(model.nz) + "x" + std::to_string(model.nu));
    }
    auto& slot = grid[static_cast<std::size_t>(ch.j * model.nz + ch.i)];
    if (slot) {
      throw ModelError("channel (" + std::to_string(ch.i + 1) + "," + std::to_string(ch.j + 1) +
                       ") listed twice");
    }
    slot = &ch;
  }

  // x = [x_11; x_21; ...; x_{nz nu}]: input index outer, output index inner.
  std::vector<ChannelParts> parts;
  for (int j = 0; j < model.nu; ++j) {
    for (int i = 0; i < model.nz; ++i) {
      const TransferChannel* ch = grid[static_cast<std::size_t>(j * model.nz + i)];
      if (!ch) continue;
      const StateSpace siso = realize_channel(ch->num, ch->den);
      ChannelParts p;
      p.info.output = i;
      p.info.input = j;
      p.info.split = split_delay(ch->tau, Ts);
      p.ss.A = siso.A;
      p.ss.B = Mat::Zero(siso.nx(), model.nu);
      p.ss.B.col(j) = siso.B;
      p.ss.C = Mat::Zero(model.nz, siso.nx());
      p.ss.C.row(i) = siso.C;
      p.ss.D = Mat::Zero(model.nz, model.nu);
      p.ss.D(i, j) = siso.D(0, 0);
      parts.push_back(std::move(p));
    }
  }
  return assemble(std::move(parts), model.nz, model.nu, Ts, std::nullopt);
}

DelayRealization realize_delays(const StateSpace& plant, const std::vector<double>& delays,
                                double Ts) {
  plant.validate();
  const auto nu = static_cast<int>(plant.nu());
  const auto nz = static_cast<int>(plant.nz());
  if (static_cast<int>(delays.size()) != nu) {
    throw ModelError("expected " + std::to_string(nu) + " input delays, got " +
                     std::to_string(delays.size()));
  }
  std::vector<DelaySplit> splits;
  for (double tau : delays) splits.push_back(split_delay(tau, Ts));

  const bool shared = std::all_of(splits.begin(), splits.end(), [&](const DelaySplit& s) {
    return s.m == splits.front().m && s.v == splits.front().v;
  });

  std::vector<ChannelParts> parts;
  if (shared) {
    ChannelParts p;
    p.ss = plant;
    p.ss.G.reset();
    p.info.split = splits.empty() ? DelaySplit{} : splits.front();
    parts.push_back(std::move(p));
    return assemble(std::move(parts), nz, nu, Ts, plant.G);
  }

  for (int j = 0; j < nu; ++j) {
    ChannelParts p;
    p.info.input = j;
    p.info.split = splits[static_cast<std::size_t>(j)];
    p.ss.A = plant.A;
    p.ss.B = Mat::Zero(plant.nx(), nu);
    p.ss.B.col(j) = plant.B.col(j);
    p.ss.C = plant.C;
    p.ss.D = Mat::Zero(nz, nu);
    p.ss.D.col(j) = plant.D.col(j);
    parts.push_back(std::move(p));
  }
  std::optional<Mat> G;
  if (plant.G) {
    G = Mat::Zero(plant.nx() * nu, plant.G->cols());
    G->topRows(plant.nx()) = *plant.G;
  }
  return assemble(std::move(parts), nz, nu, Ts, std::move(G));
}

}  // namespace lqdisc

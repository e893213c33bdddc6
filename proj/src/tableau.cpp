#include <cmath>
#include <string>

#include "lqdisc/fixedstep.hpp"

namespace lqdisc {

namespace {

ButcherTableau make(std::string name, Mat a, Vec b, TableauKind kind) {
  ButcherTableau t;
  t.name = std::move(name);
  t.c = a.rowwise().sum();
  t.a = std::move(a);
  t.b = std::move(b);
  t.kind = kind;
  return t;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Stiffly accurate 4-stage ESDIRK of order 3 with c = [0, 2g, 3/5, 1].
// The remaining entries follow from b'e = 1, b'c = 1/2, b'c^2 = 1/3, b'Ac = 1/6.
ButcherTableau esdirk4() {
  const double g = kEsdirkGamma;
  const double c2 = 2.0 * g;
  const double c3 = 0.6;

  const double r1 = 0.5 - g;
  const double r2 = 1.0 / 3.0 - g;
  const double det = c2 * c3 * c3 - c3 * c2 * c2;
  const double b2 = (r1 * c3 * c3 - c3 * r2) / det;
  const double b3 = (c2 * r2 - c2 * c2 * r1) / det;
  const double b1 = 1.0 - b2 - b3 - g;
  const double a32 = ((1.0 / 6.0 - 0.5 * g - 2.0 * g * g * b2) / b3 - g * c3) / (2.0 * g);
  const double a31 = c3 - g - a32;

  Mat a = Mat::Zero(4, 4);
  a(1, 0) = g;
  a(1, 1) = g;
  a(2, 0) = a31;
  a(2, 1) = a32;
  a(2, 2) = g;
  a(3, 0) = b1;
  a(3, 1) = b2;
  a(3, 2) = b3;
  a(3, 3) = g;
  return make("esdirk4", a, vec({b1, b2, b3, g}), TableauKind::diagonally_implicit);
}

}  // namespace

TableauKind classify(const Mat& a) {
  const auto s = a.rows();
  bool upper_zero = true;
  bool diag_zero = true;
  for (Eigen::Index i = 0; i < s; ++i) {
    if (a(i, i) != 0.0) diag_zero = false;
    for (Eigen::Index j = i + 1; j < s; ++j) {
      if (a(i, j) != 0.0) upper_zero = false;
    }
  }
  if (!upper_zero) return TableauKind::implicit;
  return diag_zero ? TableauKind::explicit_rk : TableauKind::diagonally_implicit;
}

void ButcherTableau::validate() const {
  const auto s = b.size();
  if (s < 1) throw ParameterError("tableau '" + name + "': no stages");
  if (a.rows() != s || a.cols() != s || c.size() != s) {
    throw ParameterError("tableau '" + name + "': a must be s x s and c length s");
  }
  if (!all_finite(a) || !b.allFinite() || !c.allFinite()) {
    throw ParameterError("tableau '" + name + "': non-finite coefficient");
  }
  if (std::abs(b.sum() - 1.0) > 1e-12) {
    throw ParameterError("tableau '" + name + "': weights sum to " + std::to_string(b.sum()));
  }
  if ((a.rowwise().sum() - c).cwiseAbs().maxCoeff() > 1e-12) {
    throw ParameterError("tableau '" + name + "': row sums of a differ from c");
  }
  const TableauKind actual = classify(a);
  const bool fits = actual == kind || kind == TableauKind::implicit ||
                    (kind == TableauKind::diagonally_implicit &&
                     actual == TableauKind::explicit_rk);
  if (!fits) {
    throw ParameterError("tableau '" + name + "': coefficients do not match declared kind");
  }
}

ButcherTableau tableau_by_name(const std::string& name) {
  if (name == "explicit-euler") {
    return make(name, Mat::Zero(1, 1), vec({1.0}), TableauKind::explicit_rk);
  }
  if (name == "implicit-euler") {
    return make(name, Mat::Ones(1, 1), vec({1.0}), TableauKind::diagonally_implicit);
  }
  if (name == "explicit-trapezoidal") {
    return make(name, from_rows({{0.0, 0.0}, {1.0, 0.0}}), vec({0.5, 0.5}),
                TableauKind::explicit_rk);
  }
  if (name == "implicit-trapezoidal") {
    return make(name, from_rows({{0.0, 0.0}, {0.5, 0.5}}), vec({0.5, 0.5}),
                TableauKind::diagonally_implicit);
  }
  if (name == "rk4") {
    return make(name,
                from_rows({{0.0, 0.0, 0.0, 0.0},
                           {0.5, 0.0, 0.0, 0.0},
                           {0.0, 0.5, 0.0, 0.0},
                           {0.0, 0.0, 1.0, 0.0}}),
                vec({1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}), TableauKind::explicit_rk);
  }
  if (name == "esdirk4") return esdirk4();
  throw ParameterError("unknown scheme '" + name + "'");
}

std::vector<std::string> tableau_names() {
  return {"explicit-euler",       "implicit-euler", "explicit-trapezoidal",
          "implicit-trapezoidal", "rk4",            "esdirk4"};
}

int nominal_order(const std::string& name) {
  if (name == "explicit-euler" || name == "implicit-euler") return 1;
  if (name == "explicit-trapezoidal" || name == "implicit-trapezoidal") return 2;
  if (name == "rk4") return 4;
  // The stability polynomial of the 3rd-order ESDIRK agrees with e^z only
  // through z^3, which bounds its order on linear problems.
  if (name == "esdirk4") return 3;
  return 0;
}

}  // namespace lqdisc

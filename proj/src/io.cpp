#include "lqdisc/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lqdisc {

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const Json& require(const Json& obj, const std::string& base, const std::string& key) {
  if (!obj.contains(key)) throw SchemaError(join(base, key), "missing required field");
  return obj.at(key);
}

void require_object(const Json& obj, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const Json& obj, const std::string& base, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw SchemaError(join(base, key), "unknown field");
  }
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

int as_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  return v.get<int>();
}

std::vector<double> as_numbers(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index(path, i)));
  return out;
}

Vec as_vector(const Json& v, const std::string& path) {
  const auto xs = as_numbers(v, path);
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Mat as_matrix(const Json& v, const std::string& path) {
  if (!v.is_array()) throw SchemaError(path, "expected a row-major nested array");
  const auto rows = static_cast<Eigen::Index>(v.size());
  if (rows == 0) return Mat(0, 0);
  Eigen::Index cols = -1;
  Mat out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = as_numbers(v[i], index(path, i));
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      out.resize(rows, cols);
    }
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError(index(path, i), "row length differs from row 0");
    }
    for (Eigen::Index j = 0; j < cols; ++j) out(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
  }
  return out;
}

Mat as_sized_matrix(const Json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  Mat m = as_matrix(v, path);
  // An empty array stands for a matrix with a zero dimension.
  if (m.size() == 0 && (rows == 0 || cols == 0)) return Mat::Zero(rows, cols);
  if (m.rows() != rows || m.cols() != cols) {
    throw SchemaError(path, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                                ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
  return m;
}

CostSpec parse_cost(const Json& c, Eigen::Index nz, Eigen::Index nx) {
  const std::string base = "cost";
  require_object(c, base);
  reject_unknown(c, base, {"Qc", "Wz", "mu", "Ts", "N", "zbar", "x0", "P0"});

  CostSpec cost;
  if (c.contains("Qc") == c.contains("Wz")) {
    throw SchemaError(join(base, "Qc"), "exactly one of Qc or Wz is required");
  }
  if (c.contains("Qc")) {
    cost.Qc = as_sized_matrix(c.at("Qc"), join(base, "Qc"), nz, nz);
  } else {
    const Mat wz = as_matrix(c.at("Wz"), join(base, "Wz"));
    if (wz.cols() != nz) throw SchemaError(join(base, "Wz"), "expected " + std::to_string(nz) + " columns");
    cost.Qc = wz.transpose() * wz;
  }
  cost.mu = as_number(require(c, base, "mu"), join(base, "mu"));
  cost.Ts = as_number(require(c, base, "Ts"), join(base, "Ts"));
  cost.N = as_int(require(c, base, "N"), join(base, "N"));
  if (c.contains("zbar")) {
    const auto& z = c.at("zbar");
    const std::string path = join(base, "zbar");
    if (!z.is_array()) throw SchemaError(path, "expected an array of reference vectors");
    for (std::size_t k = 0; k < z.size(); ++k) {
      Vec v = as_vector(z[k], index(path, k));
      if (v.size() != nz) throw SchemaError(index(path, k), "expected length " + std::to_string(nz));
      cost.zbar.push_back(std::move(v));
    }
  }
  if (c.contains("x0")) {
    Vec x0 = as_vector(c.at("x0"), join(base, "x0"));
    if (x0.size() != nx) throw SchemaError(join(base, "x0"), "expected length " + std::to_string(nx));
    cost.x0 = std::move(x0);
  }
  if (c.contains("P0")) cost.P0 = as_sized_matrix(c.at("P0"), join(base, "P0"), nx, nx);

  try {
    cost.validate(nz);
  } catch (const CostError& e) {
    throw SchemaError(base, e.what());
  }
  return cost;
}

StateSpace parse_state_space(const Json& s, const std::string& base) {
  require_object(s, base);
  reject_unknown(s, base, {"A_c", "B_c", "C_c", "D_c", "G_c", "delays"});
  StateSpace ss;
  ss.A = as_matrix(require(s, base, "A_c"), join(base, "A_c"));
  if (ss.A.rows() != ss.A.cols()) throw SchemaError(join(base, "A_c"), "must be square");
  const auto nx = ss.A.rows();
  ss.B = as_matrix(require(s, base, "B_c"), join(base, "B_c"));
  if (ss.B.rows() != nx) throw SchemaError(join(base, "B_c"), "expected " + std::to_string(nx) + " rows");
  ss.C = as_matrix(require(s, base, "C_c"), join(base, "C_c"));
  if (ss.C.cols() != nx) throw SchemaError(join(base, "C_c"), "expected " + std::to_string(nx) + " columns");
  ss.D = as_sized_matrix(require(s, base, "D_c"), join(base, "D_c"), ss.C.rows(), ss.B.cols());
  if (s.contains("G_c")) {
    Mat g = as_matrix(s.at("G_c"), join(base, "G_c"));
    if (g.rows() != nx) throw SchemaError(join(base, "G_c"), "expected " + std::to_string(nx) + " rows");
    ss.G = std::move(g);
  }
  try {
    ss.validate();
  } catch (const ModelError& e) {
    throw SchemaError(base, e.what());
  }
  return ss;
}

TransferModel parse_transfer(const Json& t, const std::string& base) {
  require_object(t, base);
  reject_unknown(t, base, {"nz", "nu", "channels"});
  TransferModel tm;
  const auto& chans = require(t, base, "channels");
  const std::string cpath = join(base, "channels");
  if (!chans.is_array() || chans.empty()) throw SchemaError(cpath, "expected a non-empty array");
  for (std::size_t k = 0; k < chans.size(); ++k) {
    const std::string p = index(cpath, k);
    const auto& c = chans[k];
    require_object(c, p);
    reject_unknown(c, p, {"i", "j", "num", "den", "tau"});
    TransferChannel ch;
    ch.i = as_int(require(c, p, "i"), join(p, "i")) - 1;
    ch.j = as_int(require(c, p, "j"), join(p, "j")) - 1;
    if (ch.i < 0) throw SchemaError(join(p, "i"), "channel indices are 1-based");
    if (ch.j < 0) throw SchemaError(join(p, "j"), "channel indices are 1-based");
    ch.num = as_numbers(require(c, p, "num"), join(p, "num"));
    ch.den = as_numbers(require(c, p, "den"), join(p, "den"));
    ch.tau = c.contains("tau") ? as_number(c.at("tau"), join(p, "tau")) : 0.0;
    if (ch.tau < 0.0) throw SchemaError(join(p, "tau"), "delay must be >= 0");
    tm.nz = std::max(tm.nz, ch.i + 1);
    tm.nu = std::max(tm.nu, ch.j + 1);
    tm.channels.push_back(std::move(ch));
  }
  if (t.contains("nz")) {
    const int nz = as_int(t.at("nz"), join(base, "nz"));
    if (nz < tm.nz) throw SchemaError(join(base, "nz"), "smaller than the largest channel index");
    tm.nz = nz;
  }
  if (t.contains("nu")) {
    const int nu = as_int(t.at("nu"), join(base, "nu"));
    if (nu < tm.nu) throw SchemaError(join(base, "nu"), "smaller than the largest channel index");
    tm.nu = nu;
  }
  return tm;
}

double peek_ts(const Json& doc) {
  if (!doc.contains("cost")) throw SchemaError("cost", "missing required field");
  const auto& c = doc.at("cost");
  require_object(c, "cost");
  return as_number(require(c, "cost", "Ts"), "cost.Ts");
}

}  // namespace

Problem parse_problem(const Json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"model", "cost"});
  const auto& model = require(doc, "", "model");
  require_object(model, "model");
  reject_unknown(model, "model", {"state_space", "transfer"});
  if (model.contains("state_space") == model.contains("transfer")) {
    throw SchemaError("model", "exactly one of state_space or transfer is required");
  }
  const double Ts = peek_ts(doc);
  if (!(Ts > 0.0)) throw SchemaError("cost.Ts", "must be > 0");

  Problem problem;
  try {
    if (model.contains("state_space")) {
      const std::string base = "model.state_space";
      StateSpace ss = parse_state_space(model.at("state_space"), base);
      if (model.at("state_space").contains("delays")) {
        const auto delays = as_numbers(model.at("state_space").at("delays"), join(base, "delays"));
        if (static_cast<Eigen::Index>(delays.size()) != ss.nu()) {
          throw SchemaError(join(base, "delays"), "expected one delay per input (" +
                                                      std::to_string(ss.nu()) + ")");
        }
        problem.plant = realize_delays(ss, delays, Ts);
      } else {
        problem.plant = std::move(ss);
      }
    } else {
      problem.plant = realize_delays(parse_transfer(model.at("transfer"), "model.transfer"), Ts);
    }
  } catch (const ModelError& e) {
    throw SchemaError("model", e.what());
  } catch (const DomainError& e) {
    throw SchemaError("model", e.what());
  }

  const Eigen::Index nx =
      std::visit([](const auto& p) { return p.A.rows(); }, problem.plant);
  problem.cost = parse_cost(require(doc, "", "cost"), problem.nz(), nx);
  return problem;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

ButcherTableau parse_tableau(const Json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"name", "a", "b", "c", "kind"});
  ButcherTableau t;
  const auto& name = require(doc, "", "name");
  if (!name.is_string()) throw SchemaError("name", "expected a string");
  t.name = name.get<std::string>();
  t.a = as_matrix(require(doc, "", "a"), "a");
  t.b = as_vector(require(doc, "", "b"), "b");
  t.c = as_vector(require(doc, "", "c"), "c");
  const auto& kind = require(doc, "", "kind");
  const std::string k = kind.is_string() ? kind.get<std::string>() : "";
  if (k == "explicit") {
    t.kind = TableauKind::explicit_rk;
  } else if (k == "diagonally-implicit") {
    t.kind = TableauKind::diagonally_implicit;
  } else if (k == "implicit") {
    t.kind = TableauKind::implicit;
  } else {
    throw SchemaError("kind", "expected explicit, diagonally-implicit or implicit");
  }
  try {
    t.validate();
  } catch (const ParameterError& e) {
    throw SchemaError("a", e.what());
  }
  return t;
}

ButcherTableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open file");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path, std::string("invalid JSON: ") + e.what());
  }
  return parse_tableau(doc);
}

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json result_to_json(const DiscreteLQ& r, const Problem& problem) {
  Json j;
  j["provenance"] = {{"method", to_string(r.provenance.method)},
                     {"scheme", r.provenance.scheme},
                     {"N", r.provenance.N}};
  j["dims"] = {{"nx", r.core.A.rows()},
               {"nu_aug", r.core.Bo.cols()},
               {"nz", problem.nz()},
               {"delayed", problem.delayed()}};
  if (const auto* d = std::get_if<DelayRealization>(&problem.plant)) {
    j["dims"]["mbar"] = d->mbar;
    j["dims"]["nu"] = d->nu;
  }
  j["A"] = matrix_to_json(r.core.A);
  j["B_o"] = matrix_to_json(r.core.Bo);
  j["Q"] = matrix_to_json(r.core.Q);
  j["M"] = matrix_to_json(r.core.M);
  if (r.core.Rww) j["R_ww"] = matrix_to_json(*r.core.Rww);
  j["augmented"] = {{"A", matrix_to_json(r.augmented.A)},
                    {"B", matrix_to_json(r.augmented.B)},
                    {"C", matrix_to_json(r.augmented.C)},
                    {"D", matrix_to_json(r.augmented.D)}};
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"k", s.k},
                      {"t", s.t},
                      {"discount", s.discount},
                      {"q", vector_to_json(s.q)},
                      {"rho", s.rho}});
  }
  j["stages"] = std::move(stages);
  return j;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out_ << f;
      continue;
    }
    out_ << '"';
    for (char ch : f) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  }
  out_ << "\r\n";
}

void write_stage_csv(std::ostream& out, const std::vector<StageCost>& stages) {
  CsvWriter csv(out);
  csv.row({"k", "t_k", "rho_k", "q_k_norm_inf"});
  for (const auto& s : stages) {
    const double qn = s.q.size() ? s.q.cwiseAbs().maxCoeff() : 0.0;
    csv.row({std::to_string(s.k), format_double(s.t), format_double(s.rho), format_double(qn)});
  }
}

}  // namespace lqdisc

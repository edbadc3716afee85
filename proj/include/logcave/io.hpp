#pragma once

// JSON and CSV serialization for the library's value types. JSON carries
// full-fidelity bundles (potentials, measures, reports, solver output); CSV
// carries two-column plot data: x,u for 1-D potentials and y,m for solver
// data. +inf round-trips as the string "inf" since JSON has no infinity.
//
// Requires nlohmann's json.hpp on the include path.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "logcave/functionals.hpp"
#include "logcave/inequality.hpp"
#include "logcave/logconcave.hpp"
#include "logcave/measure.hpp"
#include "logcave/minkowski.hpp"

namespace logcave {

// ordered_json keeps field order as written, so identical inputs serialize
// to byte-identical text
using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline json num_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

inline double num_from_json(const json& j, const char* where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError(std::string(where) + ": expected a number or \"inf\"");
}

inline const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

// shortest round-trip decimal, the same on every run
inline std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, const char* where) {
  if (tok == "inf" || tok == "+inf") return kInf;
  if (tok == "-inf") return -kInf;
  double v = 0;
  const char* b = tok.data();
  const auto res = std::from_chars(b, b + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != b + tok.size())
    throw ParseError(std::string(where) + ": bad number \"" + tok + "\"");
  return v;
}

}  // namespace detail

// ---- grids and bodies ----

inline json to_json(const Grid& g) {
  json j;
  j["lo"] = g.lo;
  j["hi"] = g.hi;
  j["n"] = g.n;
  return j;
}

inline Grid grid_from_json(const json& j) {
  Grid g;
  try {
    g.lo = detail::field(j, "lo").get<std::vector<double>>();
    g.hi = detail::field(j, "hi").get<std::vector<double>>();
    g.n = detail::field(j, "n").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid: ") + e.what());
  }
  if (g.lo.size() != g.hi.size() || g.lo.size() != g.n.size() || g.lo.empty() ||
      g.lo.size() > 2)
    throw ParseError("grid: lo/hi/n must agree and have dimension 1 or 2");
  return g;
}

inline json to_json(const ConvexBody& body) {
  json j;
  if (body.is_interval) {
    j["interval"] = {body.a, body.b};
  } else {
    json verts = json::array();
    for (const auto& p : body.poly) verts.push_back({p[0], p[1]});
    j["polygon"] = std::move(verts);
  }
  return j;
}

inline ConvexBody body_from_json(const json& j) {
  try {
    if (j.contains("interval")) {
      const auto ab = j["interval"].get<std::vector<double>>();
      if (ab.size() != 2) throw ParseError("body: interval needs [a, b]");
      return ConvexBody::interval(ab[0], ab[1]);
    }
    if (j.contains("polygon")) {
      std::vector<Point2> verts;
      for (const auto& p : j["polygon"]) {
        const auto xy = p.get<std::vector<double>>();
        if (xy.size() != 2) throw ParseError("body: polygon vertices are [x, y]");
        verts.push_back({xy[0], xy[1]});
      }
      return ConvexBody::polygon(std::move(verts));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("body: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("body: ") + e.what());
  }
  throw ParseError("body: expected \"interval\" or \"polygon\"");
}

// ---- potentials and functions ----

inline json to_json(const PotentialGrid& p) {
  json j;
  j["grid"] = to_json(p.grid);
  json vals = json::array();
  for (double v : p.values) vals.push_back(detail::num_to_json(v));
  j["values"] = std::move(vals);
  if (p.body) j["body"] = to_json(*p.body);
  return j;
}

inline PotentialGrid potential_from_json(const json& j) {
  PotentialGrid p;
  p.grid = grid_from_json(detail::field(j, "grid"));
  const json& vals = detail::field(j, "values");
  if (!vals.is_array() || vals.size() != p.grid.size())
    throw ParseError("potential: values must match the grid size");
  p.values.reserve(vals.size());
  for (const auto& v : vals) p.values.push_back(detail::num_from_json(v, "potential value"));
  if (j.contains("body")) {
    p.body = body_from_json(j["body"]);
    p.domain_kind = DomainKind::ConvexBodyDomain;
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("potential: ") + e.what());
  }
  return p;
}

inline FnClass fnclass_from_string(const std::string& s) {
  if (s == "A") return FnClass::A;
  if (s == "Aprime") return FnClass::Aprime;
  if (s == "Adoubleprime") return FnClass::Adoubleprime;
  throw ParseError("class: expected A, Aprime or Adoubleprime, got \"" + s + "\"");
}

inline json to_json(const LogConcaveFn& f) {
  json j = to_json(f.potential);
  j["class"] = to_string(f.class_tag);
  if (f.domain_body && !j.contains("body")) j["body"] = to_json(*f.domain_body);
  return j;
}

inline LogConcaveFn logconcave_from_json(const json& j) {
  LogConcaveFn f = as_logconcave(potential_from_json(j));
  if (j.contains("class"))
    f.class_tag = fnclass_from_string(detail::field(j, "class").get<std::string>());
  return f;
}

// ---- first variation estimates ----

inline json to_json(const DeltaJEstimate& e) {
  json j;
  j["value"] = detail::num_to_json(e.value);
  j["error_bar"] = detail::num_to_json(e.error_bar);
  json trace = json::array();
  for (const auto& [t, q] : e.t_sequence) trace.push_back({t, detail::num_to_json(q)});
  j["trace"] = std::move(trace);
  j["method"] = to_string(e.method);
  return j;
}

inline DeltaJEstimate delta_j_from_json(const json& j) {
  DeltaJEstimate e;
  e.value = detail::num_from_json(detail::field(j, "value"), "delta J value");
  e.error_bar = detail::num_from_json(detail::field(j, "error_bar"), "delta J error bar");
  for (const auto& row : detail::field(j, "trace")) {
    if (!row.is_array() || row.size() != 2) throw ParseError("delta J trace: rows are [t, q]");
    e.t_sequence.emplace_back(detail::num_from_json(row[0], "trace t"),
                              detail::num_from_json(row[1], "trace quotient"));
  }
  const auto m = detail::field(j, "method").get<std::string>();
  if (m == "closed-form")
    e.method = DeltaJMethod::ClosedForm;
  else if (m == "representation")
    e.method = DeltaJMethod::Representation;
  else if (m == "fd-extrapolated")
    e.method = DeltaJMethod::FdExtrapolated;
  else
    throw ParseError("delta J: unknown method \"" + m + "\"");
  return e;
}

// ---- measures ----

inline json to_json(const ParticleMeasure& mu) {
  json pts = json::array();
  for (const auto& p : mu.points) {
    if (mu.dim == 1)
      pts.push_back({p[0]});
    else
      pts.push_back({p[0], p[1]});
  }
  json j;
  j["points"] = std::move(pts);
  j["weights"] = mu.weights;
  return j;
}

inline ParticleMeasure particles_from_json(const json& j) {
  ParticleMeasure mu;
  const json& pts = detail::field(j, "points");
  const json& wts = detail::field(j, "weights");
  if (!pts.is_array() || !wts.is_array() || pts.size() != wts.size())
    throw ParseError("particle measure: points and weights must be arrays of equal length");
  if (pts.empty()) throw ParseError("particle measure: empty");
  mu.dim = pts[0].is_array() && pts[0].size() == 2 ? 2 : 1;
  mu.points.reserve(pts.size());
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != mu.dim)
      throw ParseError("particle measure: inconsistent point dimension");
    mu.points.push_back({detail::num_from_json(p[0], "point"),
                         mu.dim == 2 ? detail::num_from_json(p[1], "point") : 0.0});
  }
  mu.weights.reserve(wts.size());
  for (const auto& w : wts) {
    mu.weights.push_back(detail::num_from_json(w, "weight"));
    mu.total += mu.weights.back();
  }
  return mu;
}

inline json to_json(const SphereMeasure& sg) {
  json j;
  j["dim"] = sg.dim;
  if (sg.dim == 1) {
    json atoms;
    atoms["-1"] = sg.minus;
    atoms["+1"] = sg.plus;
    j["atoms"] = std::move(atoms);
  } else {
    j["theta"] = sg.theta;
    j["density"] = sg.weight;
  }
  return j;
}

inline SphereMeasure sphere_from_json(const json& j) {
  SphereMeasure sg;
  try {
    sg.dim = detail::field(j, "dim").get<std::size_t>();
    if (sg.dim == 1) {
      const json& atoms = detail::field(j, "atoms");
      sg.minus = detail::num_from_json(detail::field(atoms, "-1"), "atom -1");
      sg.plus = detail::num_from_json(detail::field(atoms, "+1"), "atom +1");
    } else if (sg.dim == 2) {
      sg.theta = detail::field(j, "theta").get<std::vector<double>>();
      sg.weight = detail::field(j, "density").get<std::vector<double>>();
      if (sg.theta.size() != sg.weight.size())
        throw ParseError("boundary measure: theta and density lengths differ");
    } else {
      throw ParseError("boundary measure: dim must be 1 or 2");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("boundary measure: ") + e.what());
  }
  return sg;
}

// ---- reports ----

inline json to_json(const InequalityReport& r) {
  json j;
  j["name"] = r.name;
  j["lhs"] = detail::num_to_json(r.lhs);
  j["rhs"] = detail::num_to_json(r.rhs);
  j["gap"] = detail::num_to_json(r.gap);
  j["tolerance"] = detail::num_to_json(r.tolerance);
  j["holds"] = r.holds;
  j["equality_case_detected"] = r.equality_case_detected;
  return j;
}

inline InequalityReport report_from_json(const json& j) {
  InequalityReport r;
  try {
    r.name = detail::field(j, "name").get<std::string>();
    r.holds = detail::field(j, "holds").get<bool>();
    r.equality_case_detected = detail::field(j, "equality_case_detected").get<bool>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  r.lhs = detail::num_from_json(detail::field(j, "lhs"), "report lhs");
  r.rhs = detail::num_from_json(detail::field(j, "rhs"), "report rhs");
  r.gap = detail::num_from_json(detail::field(j, "gap"), "report gap");
  r.tolerance = detail::num_from_json(detail::field(j, "tolerance"), "report tolerance");
  return r;
}

// ---- solver bundles ----

inline Feasibility feasibility_from_string(const std::string& s) {
  if (s == "solvable_Aprime") return Feasibility::SolvableAprime;
  if (s == "not_solvable_Aprime") return Feasibility::NotSolvableAprime;
  if (s == "inconclusive") return Feasibility::Inconclusive;
  throw ParseError("feasibility: unknown verdict \"" + s + "\"");
}

inline json to_json(const TailDiagnostic& t) {
  json j;
  j["M_infinity"] = detail::num_to_json(t.M_infinity);
  j["growth_exponent"] = detail::num_to_json(t.growth_exponent);
  j["verdict"] = to_string(t.verdict);
  json trace = json::array();
  for (const auto& [y, s] : t.trace) trace.push_back({y, detail::num_to_json(s)});
  j["trace"] = std::move(trace);
  return j;
}

inline TailDiagnostic tail_from_json(const json& j) {
  TailDiagnostic t;
  t.M_infinity = detail::num_from_json(detail::field(j, "M_infinity"), "tail mass");
  t.growth_exponent =
      detail::num_from_json(detail::field(j, "growth_exponent"), "growth exponent");
  t.verdict = feasibility_from_string(detail::field(j, "verdict").get<std::string>());
  for (const auto& row : detail::field(j, "trace")) {
    if (!row.is_array() || row.size() != 2) throw ParseError("tail trace: rows are [y, S]");
    t.trace.emplace_back(detail::num_from_json(row[0], "trace y"),
                         detail::num_from_json(row[1], "trace S"));
  }
  return t;
}

inline json to_json(const FeasibilityReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["plus"] = to_json(r.plus);
  j["minus"] = to_json(r.minus);
  return j;
}

inline FeasibilityReport feasibility_from_json(const json& j) {
  FeasibilityReport r;
  r.verdict = feasibility_from_string(detail::field(j, "verdict").get<std::string>());
  r.plus = tail_from_json(detail::field(j, "plus"));
  r.minus = tail_from_json(detail::field(j, "minus"));
  return r;
}

inline json to_json(const MinkowskiSolution1D& sol) {
  json j;
  j["feasibility"] = to_string(sol.feasibility);
  j["M_infinity"] = detail::num_to_json(sol.M_infinity);
  j["phi0"] = detail::num_to_json(sol.phi0);
  j["tail_mismatch"] = detail::num_to_json(sol.tail_mismatch);
  j["phi"] = to_json(sol.phi);
  j["f"] = to_json(sol.f);
  j["diagnostics"] = to_json(sol.diagnostics);
  return j;
}

inline MinkowskiSolution1D solution_from_json(const json& j) {
  MinkowskiSolution1D sol;
  sol.feasibility =
      feasibility_from_string(detail::field(j, "feasibility").get<std::string>());
  sol.M_infinity = detail::num_from_json(detail::field(j, "M_infinity"), "M_infinity");
  sol.phi0 = detail::num_from_json(detail::field(j, "phi0"), "phi0");
  sol.tail_mismatch =
      detail::num_from_json(detail::field(j, "tail_mismatch"), "tail_mismatch");
  sol.phi = potential_from_json(detail::field(j, "phi"));
  sol.f = logconcave_from_json(detail::field(j, "f"));
  sol.diagnostics = feasibility_from_json(detail::field(j, "diagnostics"));
  return sol;
}

// ---- CSV ----

// two columns x,u with a header line; +inf written as "inf"
inline void write_potential_csv(std::ostream& os, const PotentialGrid& p) {
  if (p.dim() != 1) throw std::invalid_argument("potential CSV is 1-D only");
  os << "x,u\n";
  for (std::size_t i = 0; i < p.grid.n[0]; ++i)
    os << detail::fmt(p.grid.coord(0, i)) << ',' << detail::fmt(p.values[i]) << '\n';
}

namespace detail {

// returns rows of a two-column CSV; tolerates and skips a non-numeric header
inline std::vector<std::pair<double, double>> read_two_columns(std::istream& is,
                                                               const char* what) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ParseError(std::string(what) + ": expected two comma-separated columns");
    const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (first) {
      first = false;
      // header row: skip if the first field is not a number
      double probe = 0;
      const auto res = std::from_chars(a.data(), a.data() + a.size(), probe);
      const bool numeric = res.ec == std::errc() && res.ptr == a.data() + a.size();
      if (!numeric && a != "inf" && a != "-inf" && a != "+inf") continue;
    }
    rows.emplace_back(parse_double(a, what), parse_double(b, what));
  }
  if (rows.size() < 3) throw ParseError(std::string(what) + ": need at least 3 rows");
  return rows;
}

inline void check_uniform(const std::vector<std::pair<double, double>>& rows,
                          const char* what) {
  const double h = (rows.back().first - rows.front().first) /
                   static_cast<double>(rows.size() - 1);
  if (!(h > 0)) throw ParseError(std::string(what) + ": first column must increase");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double step = rows[i].first - rows[i - 1].first;
    if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ParseError(std::string(what) + ": first column must be uniformly spaced");
  }
}

}  // namespace detail

inline PotentialGrid read_potential_csv(std::istream& is) {
  const auto rows = detail::read_two_columns(is, "potential CSV");
  detail::check_uniform(rows, "potential CSV");
  PotentialGrid p;
  p.grid = Grid::line(rows.front().first, rows.back().first, rows.size());
  p.values.reserve(rows.size());
  for (const auto& [x, u] : rows) p.values.push_back(u);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("potential CSV: ") + e.what());
  }
  return p;
}

// two columns y,m with a header line
inline void write_datum_csv(std::ostream& os, const MinkowskiDatum1D& d) {
  os << "y,m\n";
  for (std::size_t i = 0; i < d.grid.n[0]; ++i)
    os << detail::fmt(d.grid.coord(0, i)) << ',' << detail::fmt(d.density[i]) << '\n';
}

inline MinkowskiDatum1D read_datum_csv(std::istream& is) {
  const auto rows = detail::read_two_columns(is, "datum CSV");
  detail::check_uniform(rows, "datum CSV");
  std::vector<double> density;
  density.reserve(rows.size());
  for (const auto& [y, m] : rows) density.push_back(m);
  try {
    return make_datum(Grid::line(rows.front().first, rows.back().first, rows.size()),
                      std::move(density));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("datum CSV: ") + e.what());
  }
}

// ---- files ----

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON in " + path);
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline std::string to_text(const json& j) { return j.dump(2) + "\n"; }

}  // namespace logcave

#include "subfinsler/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "subfinsler/errors.hpp"

namespace subfinsler::io {

using nlohmann::json;

namespace {

double number_field(const json& desc, const char* key, double fallback, bool required) {
  if (!desc.contains(key)) {
    if (required) throw Error(ErrorKind::InvalidArgument, std::string("body description needs \"") + key + "\"");
    return fallback;
  }
  if (!desc[key].is_number()) {
    throw Error(ErrorKind::InvalidArgument, std::string("body field \"") + key + "\" must be a number");
  }
  return desc[key].get<double>();
}

std::vector<double> array_field(const json& desc, const char* key) {
  if (!desc.contains(key)) return {};
  const json& a = desc[key];
  if (!a.is_array()) throw Error(ErrorKind::InvalidArgument, std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const json& v : a) {
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, std::string("\"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

ConvexBody parse_body(const json& desc) {
  if (!desc.is_object() || !desc.contains("kind") || !desc["kind"].is_string()) {
    throw Error(ErrorKind::InvalidArgument, "body description must be an object with a string \"kind\"");
  }
  const std::string kind = desc["kind"].get<std::string>();
  if (kind == "disk") return ConvexBody::disk(number_field(desc, "r", 1.0, false));
  if (kind == "ellipse") {
    const double h = number_field(desc, "harmonics", 64.0, false);
    if (!(h >= 2.0) || h != std::floor(h)) throw Error(ErrorKind::InvalidArgument, "harmonics must be an integer >= 2");
    return ConvexBody::ellipse(number_field(desc, "a", 0, true), number_field(desc, "b", 0, true),
                               static_cast<std::size_t>(h));
  }
  if (kind == "fourier") {
    return ConvexBody::make(number_field(desc, "a0", 0, true), array_field(desc, "cos"),
                            array_field(desc, "sin"));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown body kind '" + kind + "' (disk, ellipse, fourier)");
}

ConvexBody parse_body(const std::string& text) {
  json desc;
  try {
    desc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("body description is not valid JSON: ") + e.what());
  }
  return parse_body(desc);
}

json body_summary(const ConvexBody& body) {
  const auto [lo, hi] = body.F_range();
  return json{{"a0", body.a0()},
              {"harmonics", body.cos_coeffs().size()},
              {"rho_min", body.rho_min()},
              {"h_min", body.h_min()},
              {"perimeter", body.perimeter()},
              {"area", body.area()},
              {"F_range", {lo, hi}}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_curve_csv(std::ostream& os, const HeisenbergCurve& curve) {
  os << "s,x,y,t\n";
  const auto params = curve.params();
  const auto pts = curve.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << format_number(params[i]) << ',' << format_number(pts[i].x) << ',' << format_number(pts[i].y)
       << ',' << format_number(pts[i].t) << '\n';
  }
}

void write_grid_csv(std::ostream& os, const GraphField& field) {
  if (!field.is_grid()) throw Error(ErrorKind::InvalidArgument, "only grid fields can be written");
  const Domain& d = field.domain();
  const auto u = field.grid_values();
  os << "x,t,u\n";
  for (std::size_t it = 0; it < field.nt(); ++it) {
    const double t = d.t0 + field.dt() * static_cast<double>(it);
    for (std::size_t ix = 0; ix < field.nx(); ++ix) {
      const double x = d.x0 + field.dx() * static_cast<double>(ix);
      os << format_number(x) << ',' << format_number(t) << ',' << format_number(u[it * field.nx() + ix]) << '\n';
    }
  }
}

GraphField read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::Io, "empty grid file");
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r'; }), line.end());
  if (line != "x,t,u") throw Error(ErrorKind::Io, "grid header must be x,t,u");
  struct Row {
    double x, t, u;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Row r{};
    if (!(ls >> r.x >> r.t >> r.u)) throw Error(ErrorKind::Io, "malformed grid row at line " + std::to_string(lineno));
    rows.push_back(r);
  }
  auto axis = [&](auto get) {
    std::vector<double> v;
    for (const Row& r : rows) v.push_back(get(r));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto xs = axis([](const Row& r) { return r.x; });
  const auto ts = axis([](const Row& r) { return r.t; });
  if (xs.size() < 3 || ts.size() < 3) throw Error(ErrorKind::GridMismatch, "grid needs at least 3x3 nodes");
  if (rows.size() != xs.size() * ts.size()) {
    throw Error(ErrorKind::GridMismatch, "grid is incomplete: " + std::to_string(rows.size()) + " rows for " +
                                             std::to_string(xs.size()) + "x" + std::to_string(ts.size()) + " nodes");
  }
  auto check_regular = [](const std::vector<double>& v, const char* name) {
    const double h = (v.back() - v.front()) / static_cast<double>(v.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::abs(v[i] - (v.front() + h * static_cast<double>(i))) > 1e-9 * (1.0 + std::abs(v[i]))) {
        throw Error(ErrorKind::GridMismatch, std::string("grid ") + name + " spacing is not regular");
      }
    }
  };
  check_regular(xs, "x");
  check_regular(ts, "t");
  std::vector<double> values(xs.size() * ts.size());
  for (const Row& r : rows) {
    const std::size_t ix = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), r.x) - xs.begin());
    const std::size_t it = static_cast<std::size_t>(std::lower_bound(ts.begin(), ts.end(), r.t) - ts.begin());
    values[it * xs.size() + ix] = r.u;
  }
  return GraphField::grid({xs.front(), xs.back(), ts.front(), ts.back()}, xs.size(), ts.size(), std::move(values));
}

GraphField read_grid_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_grid_csv(in);
}

void write_leaf_csv(std::ostream& os, const Leaf& leaf, const CurveScalar& m, const std::vector<double>& f_est) {
  os << "xi,t,g,M,f_est\n";
  for (std::size_t i = 0; i < leaf.xi.size(); ++i) {
    const double f = i < f_est.size() ? f_est[i] : std::nan("");
    const double mv = i < m.values.size() ? m.values[i] : std::nan("");
    os << format_number(leaf.xi[i]) << ',' << format_number(leaf.t[i]) << ',' << format_number(leaf.g[i]) << ','
       << format_number(mv) << ',' << format_number(f) << '\n';
  }
}

void write_obj(std::ostream& os, const SurfaceMesh& mesh) {
  os << "# vertices in (x, y, t) coordinates\n";
  for (const auto& v : mesh.vertices) {
    os << "v " << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(v.t) << '\n';
  }
  for (const auto& q : mesh.quads) os << "f " << q[0] + 1 << ' ' << q[1] + 1 << ' ' << q[2] + 1 << ' ' << q[3] + 1 << '\n';
  for (const auto& t : mesh.triangles) os << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_channels_csv(std::ostream& os, const SurfaceMesh& mesh) {
  os << "vertex,H_K,horizontality\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << i << ',' << format_number(mesh.h_k[i]) << ',' << format_number(mesh.horizontality[i]) << '\n';
  }
}

json ratio_report_json(const RatioReport& report, const ConvexBody& body, double tol_hd, double tol_hk) {
  return json{{"max_gap_hd", report.max_gap_hd},
              {"max_gap_hk", report.max_gap_hk},
              {"n_samples", report.n_samples},
              {"body", body_summary(body)},
              {"tolerances", {{"hd", tol_hd}, {"hk", tol_hk}}}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  return out;
}

}  // namespace subfinsler::io

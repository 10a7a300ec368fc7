#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/convex_body.hpp"
#include "subfinsler/curvature.hpp"
#include "subfinsler/errors.hpp"
#include "subfinsler/expression.hpp"
#include "subfinsler/intrinsic_graph.hpp"
#include "subfinsler/io.hpp"
#include "subfinsler/pansu_wulff.hpp"

namespace subfinsler::cli {

using nlohmann::json;

namespace {

// A failed check, as opposed to an exception raised by the numerics.
struct CheckFailed {
  json report;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Usage(std::string(flag) + " expects " + std::to_string(count) + " comma-separated numbers");
    }
  }
  if (out.size() != count) {
    throw Usage(std::string(flag) + " expects " + std::to_string(count) + " comma-separated numbers");
  }
  return out;
}

Domain parse_domain(const std::string& text) {
  const auto v = parse_list(text, 4, "--domain");
  return {v[0], v[1], v[2], v[3]};
}

Span parse_span(const std::string& text, const char* flag) {
  const auto v = parse_list(text, 2, flag);
  return {v[0], v[1]};
}

// Shared options of the commands that read a graph field.
struct FieldArgs {
  std::string field;
  std::string expr;
  std::string domain = "-1,1,-1,1";

  void add(CLI::App* cmd) {
    cmd->add_option("--field", field, "CSV grid x,t,u");
    cmd->add_option("--expr", expr, "expression u(x,t)");
    cmd->add_option("--domain", domain, "x0,x1,t0,t1 for --expr fields");
  }

  GraphField load(json& meta) const {
    if (!field.empty() && !expr.empty()) throw Usage("give either --field or --expr, not both");
    if (!field.empty()) {
      meta["field"] = {{"source", "grid"}, {"path", field}};
      return io::read_grid_csv_file(field);
    }
    if (expr.empty()) throw Usage("a field is required: --field <csv> or --expr <u(x,t)>");
    const Expression e = Expression::parse(expr);
    meta["field"] = {{"source", "expression"}, {"expr", expr}, {"uses_abs", e.uses_abs()}};
    return expression_field(parse_domain(domain), e);
  }
};

ScalarField scalar_from(const std::string& text) {
  const Expression e = Expression::parse(text);
  return [e](double x, double t) { return e.eval(x, t); };
}

std::function<double(double)> function_of_t(const std::string& text) {
  const Expression e = Expression::parse(text);
  if (e.depends_on_x()) throw Usage("transversal data may only depend on t");
  return [e](double t) { return e.eval(0.0, t); };
}

json span_stats(const std::vector<double>& v) {
  if (v.empty()) return json{{"min", nullptr}, {"max", nullptr}};
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return json{{"min", *lo}, {"max", *hi}};
}

std::size_t default_samples(double period, std::size_t requested) {
  if (requested > 0) return requested;
  return static_cast<std::size_t>(std::ceil(period / 1e-3)) + 1;
}

std::string channels_path(const std::string& obj) {
  const auto dot = obj.rfind('.');
  const auto slash = obj.find_last_of('/');
  const std::string stem = (dot == std::string::npos || (slash != std::string::npos && dot < slash)) ? obj : obj.substr(0, dot);
  return stem + "_channels.csv";
}

// Identities of the inverse Gauss map differential at random unit normals.
json dpi_suite(const ConvexBody& body, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double nu_gap = 0.0, z_gap = 0.0, sym_gap = 0.0, fd_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const Vec2 nu{std::cos(theta), std::sin(theta)};
    const Vec2 z = apply_J(nu);
    const Mat2 m = dpi_matrix(body, nu);
    const Mat2 fd = dpi_matrix_fd(body, nu);
    const double kappa = body.curvature(theta);
    nu_gap = std::max(nu_gap, norm(m * nu));
    z_gap = std::max(z_gap, norm(m * z - z / kappa));
    sym_gap = std::max(sym_gap, std::abs(m.a12 - m.a21));
    fd_gap = std::max({fd_gap, std::abs(m.a11 - fd.a11), std::abs(m.a12 - fd.a12), std::abs(m.a21 - fd.a21),
                       std::abs(m.a22 - fd.a22)});
  }
  return json{{"samples", n}, {"dpi_nu", nu_gap}, {"dpi_z", z_gap}, {"symmetry", sym_gap}, {"fd_agreement", fd_gap}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-Finsler geometry of the first Heisenberg group"};
  app.require_subcommand(1);
  bool json_errors = false;
  std::string body_text = R"({"kind":"disk"})";
  std::string out_path;
  app.add_flag("--json", json_errors, "machine-readable errors on stderr");

  auto add_body = [&](CLI::App* cmd) { cmd->add_option("--body", body_text, "convex body description (JSON)"); };

  std::size_t samples = 0, curves = 8, leaves = 0;
  int cells = 16, order = 8;
  double step = 1e-3, tol = -1.0;
  std::uint64_t seed = 0;
  std::string start = "0,0", span_text, eps_text = "-0.1,0.1", f_expr = "0", g0_text = "0", u0_text = "0";
  std::string bump_text, transversal_text;
  FieldArgs field_args;

  auto* body_cmd = app.add_subcommand("body", "convex body tools");
  body_cmd->require_subcommand(1);
  auto* body_validate = body_cmd->add_subcommand("validate", "validate a body and print its summary");
  add_body(body_validate);
  auto* body_show = body_cmd->add_subcommand("show", "tables of h, kappa and F");
  add_body(body_show);
  body_show->add_option("--samples", samples, "table rows");

  auto* wulff_cmd = app.add_subcommand("wulff", "Pansu-Wulff shapes");
  wulff_cmd->require_subcommand(1);
  auto* wulff_gen = wulff_cmd->add_subcommand("generate", "generating curves and mesh");
  add_body(wulff_gen);
  wulff_gen->add_option("--curves", curves, "generating curves");
  wulff_gen->add_option("--samples", samples, "samples per curve");
  wulff_gen->add_option("--out", out_path, "OBJ output (channels go to <stem>_channels.csv)");
  wulff_gen->add_option("--tol", tol, "apex tolerance");

  auto* graph_cmd = app.add_subcommand("graph", "intrinsic graph functionals");
  graph_cmd->require_subcommand(1);
  auto* graph_area = graph_cmd->add_subcommand("area", "K-area of Gr(u)");
  auto* graph_var = graph_cmd->add_subcommand("variation", "first variation against one bump");
  auto* graph_crit = graph_cmd->add_subcommand("critical", "criticality residual against a battery");
  for (auto* c : {graph_area, graph_var, graph_crit}) {
    add_body(c);
    field_args.add(c);
    c->add_option("--cells", cells, "quadrature cells per axis");
    c->add_option("--order", order, "Gauss-Legendre order per cell");
  }
  graph_var->add_option("--bump", bump_text, "cx,ct,wx,wt");
  graph_crit->add_option("--f-expr", f_expr, "prescribed curvature f(x,t)");
  graph_crit->add_option("--seed", seed, "battery seed (0: regular centers)");
  graph_crit->add_option("--tol", tol, "residual tolerance");

  auto* flow_cmd = app.add_subcommand("flow", "characteristic curves");
  flow_cmd->require_subcommand(1);
  auto* flow_trace = flow_cmd->add_subcommand("trace", "integrate one leaf");
  auto* flow_family = flow_cmd->add_subcommand("family", "eps-family and chart jacobian");
  auto* flow_diag = flow_cmd->add_subcommand("diagnose", "second-difference regularity test");
  for (auto* c : {flow_trace, flow_family, flow_diag}) {
    add_body(c);
    field_args.add(c);
    c->add_option("--start", start, "a,b");
    c->add_option("--span", span_text, "lo,hi (default: domain x-extent)");
    c->add_option("--step", step, "leaf step");
  }
  flow_trace->add_option("--out", out_path, "leaf CSV xi,t,g,M,f_est");
  flow_family->add_option("--eps", eps_text, "lo,hi");
  flow_family->add_option("--leaves", leaves, "leaves in the family");
  flow_family->add_option("--out", out_path, "CSV eps,xi,t,jacobian");

  auto* synth_cmd = app.add_subcommand("synthesize", "prescribed-curvature surfaces");
  synth_cmd->require_subcommand(1);
  auto* synth_patch = synth_cmd->add_subcommand("patch", "graph patch from transversal data");
  add_body(synth_patch);
  synth_patch->add_option("--f-expr", f_expr, "prescribed curvature f(x,t)");
  synth_patch->add_option("--domain", field_args.domain, "x0,x1,t0,t1");
  synth_patch->add_option("--transversal", transversal_text, "a,t_lo,t_hi");
  synth_patch->add_option("--leaves", leaves, "leaves on the transversal");
  synth_patch->add_option("--g0", g0_text, "slope g(a,t)");
  synth_patch->add_option("--u0", u0_text, "u(a,t)");
  synth_patch->add_option("--samples", samples, "lattice nodes per axis");
  synth_patch->add_option("--step", step, "leaf step");
  synth_patch->add_option("--seed", seed, "battery seed");
  synth_patch->add_option("--tol", tol, "residual tolerance");
  synth_patch->add_option("--out", out_path, "grid CSV x,t,u");

  auto* check_cmd = app.add_subcommand("check", "identity suites");
  check_cmd->require_subcommand(1);
  auto* check_ids = check_cmd->add_subcommand("identities", "inverse Gauss map, Wulff and ratio identities");
  add_body(check_ids);
  check_ids->add_option("--curves", curves, "Wulff curves");
  check_ids->add_option("--samples", samples, "samples per curve (default: step 1e-3)");
  check_ids->add_option("--seed", seed, "seed of the random normals");

  auto report_error = [&](const std::string& kind, const std::string& message, const json& extra, int code) {
    if (json_errors) {
      json e = {{"error", kind}, {"message", message}, {"exit_code", code}};
      e.update(extra);
      err << e.dump() << '\n';
    } else {
      err << "error: " << message << '\n';
    }
    return code;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), json::object(), 2);
  }

  try {
    json report;
    if (body_validate->parsed() || body_show->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      report = io::body_summary(body);
      if (body_show->parsed()) {
        const std::size_t n = samples ? samples : 16;
        json htab = json::array(), ftab = json::array();
        for (std::size_t i = 0; i < n; ++i) {
          const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
          htab.push_back({{"theta", th}, {"h", body.support(th).h}, {"kappa", body.curvature(th)}});
          const double x = -10.0 + 20.0 * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
          ftab.push_back({{"x", x}, {"F", body.F_value(x)}, {"dF", body.F_derivative(x)}});
        }
        report["h_table"] = htab;
        report["F_table"] = ftab;
      }
    } else if (wulff_gen->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      const WulffShape shape = wulff_shape(body, curves, samples ? samples : 1024);
      const double apex_tol = tol > 0 ? tol : 1e-6;
      if (!out_path.empty()) {
        auto obj = io::open_output(out_path);
        io::write_obj(obj, shape.mesh);
        auto ch = io::open_output(channels_path(out_path));
        io::write_channels_csv(ch, shape.mesh);
      }
      report = {{"apex", {shape.apex.x, shape.apex.y, shape.apex.t}},
                {"two_area", 2.0 * body.area()},
                {"max_apex_gap", shape.max_apex_gap},
                {"max_hk_gap", shape.max_hk_gap},
                {"max_horizontality", shape.max_horizontality},
                {"vertices", shape.mesh.vertices.size()},
                {"quads", shape.mesh.quads.size()},
                {"triangles", shape.mesh.triangles.size()},
                {"dropped_faces", shape.mesh.dropped_faces},
                {"tolerance", apex_tol},
                {"pass", shape.max_apex_gap <= apex_tol}};
      if (shape.max_apex_gap > apex_tol) throw CheckFailed{report};
    } else if (graph_area->parsed() || graph_var->parsed() || graph_crit->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      const GraphField u = field_args.load(report);
      const QuadratureOptions q{cells, cells, order};
      if (graph_area->parsed()) {
        report["area"] = area_K(u, body, q);
      } else if (graph_var->parsed()) {
        const Domain& d = u.domain();
        TestField v;
        if (bump_text.empty()) {
          const double m = u.support_margin();
          v = TestField::bump(0.5 * (d.x0 + d.x1), 0.5 * (d.t0 + d.t1), 0.4 * d.width() - m, 0.4 * d.height() - m);
        } else {
          const auto b = parse_list(bump_text, 4, "--bump");
          v = TestField::bump(b[0], b[1], b[2], b[3]);
        }
        const double qv = first_variation_area(u, v, body, q);
        const double vol = volume_variation(v, q);
        report["first_variation"] = qv;
        report["volume_variation"] = vol;
        report["h0_estimate"] = h0_estimate(u, body, v, q);
      } else {
        const auto battery = bump_battery(u.domain(), u.support_margin(), BatteryOptions{{0.2, 0.35, 0.5}, 3, seed});
        const ResidualReport r = criticality_residual_report(u, scalar_from(f_expr), body, battery, q);
        const double limit = tol > 0 ? tol : (u.is_grid() ? 1e-3 : 1e-6);
        report["f"] = f_expr;
        report["tests"] = battery.size();
        report["max_residual"] = r.max_residual;
        report["per_test"] = r.per_test;
        report["tolerance"] = limit;
        report["pass"] = r.max_residual <= limit;
        if (r.max_residual > limit) throw CheckFailed{report};
      }
    } else if (flow_trace->parsed() || flow_family->parsed() || flow_diag->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      const GraphField u = field_args.load(report);
      const auto ab = parse_list(start, 2, "--start");
      const Span span = span_text.empty() ? Span{u.domain().x0, u.domain().x1} : parse_span(span_text, "--span");
      LeafOptions lo;
      lo.step = step;
      if (flow_family->parsed()) {
        const CharacteristicFamily fam =
            build_family(u, ab[0], ab[1], parse_span(eps_text, "--eps"), leaves ? leaves : 21, span, lo);
        std::vector<double> jac;
        for (double j : fam.jacobian) {
          if (!std::isnan(j)) jac.push_back(j);
        }
        report["leaves"] = fam.leaves.size();
        report["xi_samples"] = fam.xi.size();
        report["jacobian"] = span_stats(jac);
        report["ordered"] = true;
        if (!out_path.empty()) {
          auto os = io::open_output(out_path);
          os << "eps,xi,t,jacobian\n";
          for (std::size_t k = 0; k < fam.eps.size(); ++k) {
            for (std::size_t i = 0; i < fam.xi.size(); ++i) {
              os << io::format_number(fam.eps[k]) << ',' << io::format_number(fam.xi[i]) << ','
                 << io::format_number(fam.t_at(k, i)) << ',' << io::format_number(fam.jacobian_at(k, i)) << '\n';
            }
          }
        }
      } else {
        const Leaf leaf = integrate_leaf(u, ab[0], ab[1], span, lo);
        report["samples"] = leaf.xi.size();
        report["exited_domain"] = leaf.exited_domain;
        report["horizontality"] = leaf.lifted.horizontality_residual();
        if (leaf.xi.size() >= 5) report["ode_residual"] = ode_residual(u, leaf);
        if (flow_trace->parsed()) {
          const CurveScalar m = m_along(leaf, body);
          std::vector<double> f_est;
          if (m.params.size() >= 15) {
            f_est = estimate_f(m).values;
            report["f_estimate"] = span_stats(f_est);
          }
          if (!out_path.empty()) {
            auto os = io::open_output(out_path);
            io::write_leaf_csv(os, leaf, m, f_est);
          }
        } else {
          const RegularityReport r = regularity_diagnostic(leaf);
          report["verdict"] = to_string(r.verdict);
          report["quotients"] = r.quotients;
          report["spacings"] = r.spacings;
          report["drift"] = r.drift;
        }
      }
    } else if (synth_patch->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      if (transversal_text.empty()) throw Usage("--transversal a,t_lo,t_hi is required");
      const auto tv = parse_list(transversal_text, 3, "--transversal");
      Transversal tr;
      tr.a = tv[0];
      tr.t_range = {tv[1], tv[2]};
      PatchOptions po;
      po.domain = parse_domain(field_args.domain);
      po.nx = po.nt = samples ? samples : 201;
      po.step = step;
      const double dt = po.domain.height() / static_cast<double>(po.nt - 1);
      tr.n_leaves = leaves ? leaves : static_cast<std::size_t>(std::ceil((tv[2] - tv[1]) / (0.5 * dt))) + 1;
      tr.u = function_of_t(u0_text);
      tr.g = function_of_t(g0_text);
      const ScalarField f = scalar_from(f_expr);
      const SynthesizedPatch patch = synthesize_graph_patch(body, f, tr, po);
      if (!out_path.empty()) {
        auto os = io::open_output(out_path);
        io::write_grid_csv(os, patch.field);
      }
      const auto battery =
          bump_battery(po.domain, patch.field.support_margin(), BatteryOptions{{0.2, 0.35, 0.5}, 3, seed});
      const double residual = criticality_residual(patch.field, f, body, battery);
      const double limit = tol > 0 ? tol : 1e-3;
      report = {{"leaves", patch.leaves.size()},
                {"lattice", {po.nx, po.nt}},
                {"max_residual", residual},
                {"tolerance", limit},
                {"pass", residual <= limit}};
      if (residual > limit) throw CheckFailed{report};
    } else if (check_ids->parsed()) {
      const ConvexBody body = io::parse_body(body_text);
      const double P = body.perimeter();
      const std::size_t n = default_samples(P, samples);
      const json dpi = dpi_suite(body, 1000, seed ? seed : 1);
      const WulffShape shape = wulff_shape(body, curves, n);
      double gap_hd = 0.0, gap_hk = 0.0, kmin = INFINITY, kmax = 0.0;
      for (const auto& c : shape.curves) {
        const FramedCurve fc = FramedCurve::from_velocity(c, -1.0);
        const RatioReport r = verify_ratio(body, fc, CurveScalar{{}, std::vector<double>(c.size(), 1.0)});
        gap_hd = std::max(gap_hd, r.max_gap_hd);
        gap_hk = std::max(gap_hk, r.max_gap_hk);
        for (double k : r.kappa) {
          kmin = std::min(kmin, k);
          kmax = std::max(kmax, k);
        }
      }
      const json tolerances = {{"dpi_nu", 1e-8}, {"dpi_z", 1e-6}, {"symmetry", 1e-8},
                               {"hk", 1e-4},     {"hd", 1e-4},    {"apex", 1e-6}};
      const bool pass = dpi["dpi_nu"].get<double>() <= 1e-8 && dpi["dpi_z"].get<double>() <= 1e-6 &&
                        dpi["symmetry"].get<double>() <= 1e-8 && gap_hk <= 1e-4 && gap_hd <= 1e-4 &&
                        shape.max_apex_gap <= 1e-6;
      report = {{"body", io::body_summary(body)},
                {"inverse_gauss", dpi},
                {"wulff", {{"curves", curves}, {"samples", n}, {"max_apex_gap", shape.max_apex_gap},
                           {"max_hk_gap", shape.max_hk_gap}, {"max_horizontality", shape.max_horizontality}}},
                {"ratio", {{"max_gap_hd", gap_hd}, {"max_gap_hk", gap_hk}, {"kappa_min", kmin}, {"kappa_max", kmax}}},
                {"tolerances", tolerances},
                {"pass", pass}};
      if (!pass) throw CheckFailed{report};
    }
    out << report.dump(2) << '\n';
    return 0;
  } catch (const CheckFailed& f) {
    out << f.report.dump(2) << '\n';
    return report_error("CheckFailed", "one or more checks exceeded their tolerance", json::object(), 1);
  } catch (const Usage& e) {
    return report_error("UsageError", e.what(), json::object(), 2);
  } catch (const ExpressionError& e) {
    return report_error(to_string(e.kind()), e.what(), json{{"offset", e.offset()}},
                        e.kind() == ErrorKind::SyntaxError ? 2 : 1);
  } catch (const RangeEscapeError& e) {
    return report_error(to_string(e.kind()), e.what(), json{{"xi", e.xi()}}, 1);
  } catch (const Error& e) {
    const bool usage = e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::Io;
    return report_error(to_string(e.kind()), e.what(), json::object(), usage ? 2 : 1);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), json::object(), 1);
  }
}

}  // namespace subfinsler::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "subfinsler/characteristic_flow.hpp"
#include "subfinsler/convex_body.hpp"
#include "subfinsler/curvature.hpp"
#include "subfinsler/graph_field.hpp"
#include "subfinsler/heisenberg.hpp"
#include "subfinsler/pansu_wulff.hpp"

namespace subfinsler::io {

/// Body specs:
///   {"kind":"disk","r":1}
///   {"kind":"ellipse","a":2,"b":1,"harmonics":64}
///   {"kind":"fourier","a0":1,"cos":[a1,a2,...],"sin":[b1,b2,...]}
/// Throws InvalidArgument on malformed specs, body errors otherwise.
ConvexBody parse_body(const nlohmann::json& desc);
ConvexBody parse_body(const std::string& text);
nlohmann::json body_summary(const ConvexBody& body);

/// Shortest round-trip decimal form, so outputs are reproducible bit for bit.
std::string format_number(double v);

/// s,x,y,t
void write_curve_csv(std::ostream& os, const HeisenbergCurve& curve);
/// x,t,u on the lattice, t slowest.
void write_grid_csv(std::ostream& os, const GraphField& field);
/// Reads x,t,u rows of a complete regular lattice in any order. Throws
/// GridMismatch for irregular or incomplete lattices, Io on parse errors.
GraphField read_grid_csv(std::istream& is);
GraphField read_grid_csv_file(const std::string& path);

/// xi,t,g,M,f_est; f_est may be empty (written as nan).
void write_leaf_csv(std::ostream& os, const Leaf& leaf, const CurveScalar& m,
                    const std::vector<double>& f_est);

/// Vertices and faces (1-based, quads and triangles).
void write_obj(std::ostream& os, const SurfaceMesh& mesh);
/// vertex,H_K,horizontality keyed by 0-based vertex index.
void write_channels_csv(std::ostream& os, const SurfaceMesh& mesh);

nlohmann::json ratio_report_json(const RatioReport& report, const ConvexBody& body,
                                 double tol_hd, double tol_hk);

/// Opens for writing or throws Io.
std::ofstream open_output(const std::string& path);

}  // namespace subfinsler::io

#include "membrane/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

namespace membrane::io {

namespace {

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

const char* method_name(EigenMethod m) {
  switch (m) {
    case EigenMethod::dense:
      return "dense";
    case EigenMethod::shift_invert:
      return "shift_invert";
    default:
      return "automatic";
  }
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Triangle parse_triangle(const Json& t) {
  if (!t.is_array() || t.size() != 3) throw IoError("triangle entries must be [i, j, k]");
  return {t[0].get<Index>(), t[1].get<Index>(), t[2].get<Index>()};
}

}  // namespace

MeshDocument mesh_from_json(const Json& doc) {
  try {
    if (!doc.is_object()) throw IoError("mesh document must be a JSON object");
    if (!doc.contains("triangles")) throw IoError("mesh document lacks \"triangles\"");
    const bool has_vertices = doc.contains("vertices");
    const bool has_lengths = doc.contains("edge_lengths");
    if (has_vertices == has_lengths) {
      throw IoError("mesh document needs exactly one of \"vertices\" and \"edge_lengths\"");
    }
    std::vector<Triangle> triangles;
    Index max_index = -1;
    for (const auto& t : doc.at("triangles")) {
      triangles.push_back(parse_triangle(t));
      for (Index v : triangles.back()) max_index = std::max(max_index, v);
    }

    std::optional<SurfaceMeshd> mesh;
    if (has_vertices) {
      const auto& vs = doc.at("vertices");
      SurfaceMeshd::Positions p(static_cast<Index>(vs.size()), 3);
      for (std::size_t i = 0; i < vs.size(); ++i) {
        if (!vs[i].is_array() || vs[i].size() != 3) throw IoError("vertex entries must be [x, y, z]");
        for (int c = 0; c < 3; ++c) p(static_cast<Index>(i), c) = vs[i][c].get<double>();
      }
      mesh.emplace(SurfaceMeshd::from_positions(std::move(p), std::move(triangles)));
    } else {
      std::vector<std::tuple<Index, Index, double>> lengths;
      for (const auto& e : doc.at("edge_lengths")) {
        if (!e.is_array() || e.size() != 3) throw IoError("edge_lengths entries must be [i, j, length]");
        lengths.emplace_back(e[0].get<Index>(), e[1].get<Index>(), e[2].get<double>());
      }
      mesh.emplace(SurfaceMeshd::from_edge_lengths(max_index + 1, std::move(triangles), lengths));
    }

    MeshDocument out{std::move(*mesh), std::nullopt};
    if (doc.contains("map")) {
      const auto& m = doc.at("map");
      if (static_cast<Index>(m.size()) != out.mesh.vertex_count()) {
        throw IoError("\"map\" must hold one [re, im] pair per vertex");
      }
      MapSampled f;
      f.values.resize(out.mesh.vertex_count());
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!m[i].is_array() || m[i].size() != 2) throw IoError("map entries must be [re, im]");
        f.values[static_cast<Index>(i)] = {m[i][0].get<double>(), m[i][1].get<double>()};
      }
      if (doc.contains("degree") && !doc.at("degree").is_null()) f.degree = doc.at("degree").get<int>();
      out.map = std::move(f);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed mesh document: ") + e.what());
  }
}

Json mesh_to_json(const SurfaceMeshd& mesh, const MapSampled* map) {
  Json doc = Json::object();
  if (mesh.positions()) {
    Json vs = Json::array();
    const auto& p = *mesh.positions();
    for (Index v = 0; v < p.rows(); ++v) vs.push_back({p(v, 0), p(v, 1), p(v, 2)});
    doc["vertices"] = std::move(vs);
  } else {
    Json ls = Json::array();
    for (Index e = 0; e < mesh.edge_count(); ++e) {
      const Edge& ed = mesh.edges()[static_cast<std::size_t>(e)];
      ls.push_back({ed.a, ed.b, mesh.edge_lengths()[e]});
    }
    doc["edge_lengths"] = std::move(ls);
  }
  Json ts = Json::array();
  for (const Triangle& t : mesh.triangles()) ts.push_back({t[0], t[1], t[2]});
  doc["triangles"] = std::move(ts);
  if (map) {
    Json ms = Json::array();
    for (Index v = 0; v < map->values.size(); ++v) ms.push_back({map->values[v].real(), map->values[v].imag()});
    doc["map"] = std::move(ms);
    if (map->degree) doc["degree"] = *map->degree;
  }
  return doc;
}

MeshDocument read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return mesh_from_json(doc);
}

void write_mesh(const std::string& path, const SurfaceMeshd& mesh, const MapSampled* map) {
  write_text(path, dump(mesh_to_json(mesh, map)));
}

Json to_json(const SpectralResult<double>& result, bool with_eigenfunctions) {
  Json doc = Json::object();
  doc["bc"] = to_string(result.boundary_condition);
  doc["eigenvalues"] = vector_json(result.eigenvalues);
  doc["residuals"] = vector_json(result.residuals);
  if (result.boundary_condition == BoundaryCondition::neumann) {
    doc["zero_mode_gap"] = result.zero_mode_gap.value_or(0.0);
    doc["zero_mode"] = result.zero_mode.value_or(0.0);
  }
  doc["solver"] = method_name(result.method);
  if (!result.mesh_id.empty()) doc["mesh_id"] = result.mesh_id;
  if (with_eigenfunctions) {
    Json fns = Json::array();
    for (Index j = 0; j < result.eigenfunctions.cols(); ++j) fns.push_back(vector_json(result.eigenfunctions.col(j)));
    doc["eigenfunctions"] = std::move(fns);
  }
  return doc;
}

Json to_json(const BalanceResult<double>& result) {
  Json doc = Json::object();
  doc["a"] = {result.a.real(), result.a.imag()};
  doc["residual"] = result.residual;
  doc["iterations"] = result.iterations;
  return doc;
}

Json to_json(const VerificationReport<double>& r) {
  Json doc = Json::object();
  doc["lambda1"] = r.lambda1;
  doc["mu1"] = r.mu1;
  doc["mu2"] = r.mu2;
  doc["area"] = r.area;
  doc["degree"] = r.degree;
  doc["lhs2"] = r.lhs2;
  doc["rhs2"] = r.rhs2;
  doc["slack2"] = r.slack2;
  doc["lhs3"] = r.lhs3;
  doc["rhs3"] = r.rhs3;
  doc["slack3"] = r.slack3;
  doc["reciprocal_sum"] = r.reciprocal_sum;
  doc["trial_sum"] = r.trial_sum;
  doc["trial_energies"] = {r.trial_energies[0], r.trial_energies[1], r.trial_energies[2]};
  doc["trial_masses"] = {r.trial_masses[0], r.trial_masses[1], r.trial_masses[2]};
  doc["balance"] = to_json(r.balance);
  doc["residuals"] = {{"dirichlet", r.dirichlet_residual}, {"neumann", r.neumann_residual}};
  doc["mesh_resolution"] = {{"vertices", r.vertices}, {"triangles", r.triangles}, {"h", r.mesh_size}};
  if (r.budget) {
    doc["eps_fem"] = {{"slack2", r.budget->slack2},
                      {"slack3", r.budget->slack3},
                      {"sandwich", r.budget->sandwich},
                      {"coarse_vertices", r.budget->coarse_vertices}};
    doc["slack2_budgeted"] = r.slack2 + r.budget->slack2;
    doc["slack3_budgeted"] = r.slack3 + r.budget->slack3;
  } else {
    doc["eps_fem"] = nullptr;
  }
  doc["failed"] = r.failed;
  if (r.failed) doc["failure"] = r.failure;
  return doc;
}

std::string csv_header() {
  return "fixture,level,resolution,vertices,h,area,degree,lambda1,mu1,mu2,lhs2,rhs2,slack2,eps2,"
         "lhs3,rhs3,slack3,eps3,trial_sum,reciprocal_sum,eps_sandwich,balance_re,balance_im,"
         "balance_residual,failed\n";
}

std::string csv_row(const std::string& fixture, int level, int resolution, const VerificationReport<double>& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double eps2 = r.budget ? r.budget->slack2 : nan;
  const double eps3 = r.budget ? r.budget->slack3 : nan;
  const double epss = r.budget ? r.budget->sandwich : nan;
  std::ostringstream os;
  os << fixture << ',' << level << ',' << resolution << ',' << r.vertices << ',' << number(r.mesh_size) << ','
     << number(r.area) << ',' << r.degree << ',' << number(r.lambda1) << ',' << number(r.mu1) << ','
     << number(r.mu2) << ',' << number(r.lhs2) << ',' << number(r.rhs2) << ',' << number(r.slack2) << ','
     << number(eps2) << ',' << number(r.lhs3) << ',' << number(r.rhs3) << ',' << number(r.slack3) << ','
     << number(eps3) << ',' << number(r.trial_sum) << ',' << number(r.reciprocal_sum) << ',' << number(epss)
     << ',' << number(r.balance.a.real()) << ',' << number(r.balance.a.imag()) << ','
     << number(r.balance.residual) << ',' << (r.failed ? 1 : 0) << '\n';
  return os.str();
}

Json error_json(const std::string& kind, const std::string& message) {
  return Json{{"error", {{"kind", kind}, {"message", message}}}};
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace membrane::io

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "membrane/balance.hpp"
#include "membrane/fem.hpp"
#include "membrane/map_sample.hpp"
#include "membrane/mesh.hpp"
#include "membrane/verify.hpp"

namespace membrane::io {

using Json = nlohmann::ordered_json;

struct MeshDocument {
  SurfaceMeshd mesh;
  std::optional<MapSampled> map;
};

// Mesh JSON:
//   { "vertices": [[x,y,z],...]           (or)  "edge_lengths": [[i,j,l],...],
//     "triangles": [[i,j,k],...],
//     "map": [[re,im],...], "degree": d }  (both optional)
MeshDocument mesh_from_json(const Json& doc);
Json mesh_to_json(const SurfaceMeshd& mesh, const MapSampled* map = nullptr);

MeshDocument read_mesh(const std::string& path);
void write_mesh(const std::string& path, const SurfaceMeshd& mesh, const MapSampled* map = nullptr);

Json to_json(const SpectralResult<double>& result, bool with_eigenfunctions = false);
Json to_json(const BalanceResult<double>& result);
Json to_json(const VerificationReport<double>& report);

std::string csv_header();
std::string csv_row(const std::string& fixture, int level, int resolution, const VerificationReport<double>& r);

Json error_json(const std::string& kind, const std::string& message);

// Serialized JSON text, 2-space indent, newline-terminated.
std::string dump(const Json& doc);
void write_text(const std::string& path, const std::string& text);

}  // namespace membrane::io

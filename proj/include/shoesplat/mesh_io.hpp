#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "shoesplat/mesh.hpp"

namespace shoesplat::mesh {

enum class MeshFormat { PlyAscii, PlyBinary, Obj };

enum class ColorType {
  UChar,    // red/green/blue as uchar, round(255 c)
  Float32,  // red/green/blue as float in [0,1]
};

struct MeshWriteOptions {
  ColorType color_type = ColorType::UChar;
};

/// PLY: vertex x y z (float) red green blue, face vertex_indices (uchar count,
/// int indices). OBJ: v and f records with 1-based indices; colours are not
/// written.
std::string serialize_mesh(const TriangleMesh& mesh, MeshFormat format, const MeshWriteOptions& options = {});
void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                const MeshWriteOptions& options = {});

/// Accepts PLY (any encoding; uchar or float colours, white when absent) and
/// OBJ (polygons are fan-triangulated, "v x y z r g b" colours honoured).
/// Throws FormatError on malformed input or out-of-range indices.
TriangleMesh parse_ply_mesh(std::string_view bytes);
TriangleMesh parse_obj_mesh(std::string_view text);
TriangleMesh read_mesh(const std::filesystem::path& path);

/// From the file extension: .obj -> Obj, otherwise binary PLY.
MeshFormat format_for_path(const std::filesystem::path& path);

}  // namespace shoesplat::mesh

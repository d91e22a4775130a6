#include "shoesplat/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <spdlog/spdlog.h>

#include "shoesplat/image.hpp"
#include "shoesplat/ply.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::mesh {

namespace {

std::string float_text(double v) {
  char buf[48];
  auto r = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
  return std::string(buf, r.ptr);
}

std::string serialize_ply(const TriangleMesh& mesh, ply::Format format, const MeshWriteOptions& options) {
  const size_t n = mesh.positions.size();
  ply::Element vertex;
  vertex.name = "vertex";
  vertex.count = n;
  const char* axes[] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = mesh.positions[i][d];
    vertex.properties.push_back(ply::scalar(axes[d], ply::Type::Float32, std::move(v)));
  }
  const char* channels[] = {"red", "green", "blue"};
  for (int c = 0; c < 3; ++c) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
      const double col = mesh.colors[i][c];
      v[i] = options.color_type == ColorType::UChar ? static_cast<double>(to_u8(col)) : col;
    }
    const auto type = options.color_type == ColorType::UChar ? ply::Type::UInt8 : ply::Type::Float32;
    vertex.properties.push_back(ply::scalar(channels[c], type, std::move(v)));
  }
  ply::Element face;
  face.name = "face";
  face.count = mesh.faces.size();
  std::vector<std::vector<double>> rows;
  rows.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) rows.push_back({double(f[0]), double(f[1]), double(f[2])});
  face.properties.push_back(ply::list("vertex_indices", ply::Type::UInt8, ply::Type::Int32, rows));

  ply::File file;
  file.format = format;
  file.elements.push_back(std::move(vertex));
  file.elements.push_back(std::move(face));
  return ply::serialize(file);
}

std::string serialize_obj(const TriangleMesh& mesh) {
  std::string s;
  for (const auto& p : mesh.positions) {
    s += "v " + float_text(p.x()) + " " + float_text(p.y()) + " " + float_text(p.z()) + "\n";
  }
  for (const auto& f : mesh.faces) {
    s += "f " + std::to_string(f[0] + 1) + " " + std::to_string(f[1] + 1) + " " + std::to_string(f[2] + 1) + "\n";
  }
  return s;
}

void check_faces(const TriangleMesh& mesh) {
  for (const auto& f : mesh.faces) {
    for (auto v : f) {
      if (v >= mesh.positions.size()) fail(ErrorKind::FormatError, "face index out of range");
    }
  }
}

}  // namespace

std::string serialize_mesh(const TriangleMesh& mesh, MeshFormat format, const MeshWriteOptions& options) {
  if (mesh.colors.size() != mesh.positions.size()) {
    fail(ErrorKind::DimensionMismatch, "mesh colour count does not match its vertex count");
  }
  check_faces(mesh);
  switch (format) {
    case MeshFormat::PlyAscii: return serialize_ply(mesh, ply::Format::Ascii, options);
    case MeshFormat::PlyBinary: return serialize_ply(mesh, ply::Format::BinaryLittleEndian, options);
    case MeshFormat::Obj: return serialize_obj(mesh);
  }
  fail(ErrorKind::InvalidArgument, "unknown mesh format");
}

void write_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format,
                const MeshWriteOptions& options) {
  if (format == MeshFormat::Obj) spdlog::warn("OBJ output drops vertex colours: {}", path.string());
  atomic_write_file(path, serialize_mesh(mesh, format, options));
}

TriangleMesh parse_ply_mesh(std::string_view bytes) {
  const ply::File file = ply::parse(bytes);
  const ply::Element* vertex = file.find("vertex");
  if (!vertex) fail(ErrorKind::FormatError, "mesh PLY has no vertex element");
  TriangleMesh mesh;
  const size_t n = vertex->count;
  mesh.positions.assign(n, Vec3::Zero());
  mesh.colors.assign(n, Vec3::Ones());
  const char* axes[] = {"x", "y", "z"};
  for (int d = 0; d < 3; ++d) {
    const ply::Property* p = vertex->find(axes[d]);
    if (!p || p->is_list()) fail(ErrorKind::FormatError, std::string("mesh PLY lacks vertex ") + axes[d]);
    for (size_t i = 0; i < n; ++i) mesh.positions[i][d] = p->values[i];
  }
  const char* channels[] = {"red", "green", "blue"};
  for (int c = 0; c < 3; ++c) {
    const ply::Property* p = vertex->find(channels[c]);
    if (!p || p->is_list()) continue;
    const bool is_float = p->type == ply::Type::Float32 || p->type == ply::Type::Float64;
    for (size_t i = 0; i < n; ++i) mesh.colors[i][c] = is_float ? p->values[i] : p->values[i] / 255.0;
  }
  if (const ply::Element* face = file.find("face")) {
    const ply::Property* idx = face->find("vertex_indices");
    if (!idx) idx = face->find("vertex_index");
    if (!idx || !idx->is_list()) fail(ErrorKind::FormatError, "mesh PLY face element lacks vertex_indices");
    for (size_t f = 0; f < face->count; ++f) {
      const size_t b = idx->list_offsets[f], e = idx->list_offsets[f + 1];
      if (e - b < 3) fail(ErrorKind::FormatError, "mesh PLY face with fewer than 3 vertices");
      auto vert = [&](size_t k) {
        const double v = idx->values[k];
        if (v < 0 || v >= static_cast<double>(n)) fail(ErrorKind::FormatError, "face index out of range");
        return static_cast<std::uint32_t>(v);
      };
      for (size_t k = b + 1; k + 1 < e; ++k) mesh.faces.push_back({vert(b), vert(k), vert(k + 1)});
    }
  }
  return mesh;
}

TriangleMesh parse_obj_mesh(std::string_view text) {
  TriangleMesh mesh;
  std::vector<std::vector<std::int64_t>> polys;
  size_t lineno = 0;
  size_t pos = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::FormatError, "OBJ line " + std::to_string(lineno) + ": " + what);
  };
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> tok;
    size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      const size_t s = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      if (i > s) tok.push_back(line.substr(s, i - s));
    }
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() != 4 && tok.size() != 7) bad("vertex needs 3 or 6 values");
      double v[6];
      for (size_t k = 1; k < tok.size(); ++k) {
        const auto r = std::from_chars(tok[k].data(), tok[k].data() + tok[k].size(), v[k - 1]);
        if (r.ec != std::errc() || r.ptr != tok[k].data() + tok[k].size()) bad("bad number");
      }
      mesh.add_vertex(Vec3(v[0], v[1], v[2]), tok.size() == 7 ? Vec3(v[3], v[4], v[5]) : Vec3::Ones());
    } else if (tok[0] == "f") {
      if (tok.size() < 4) bad("face needs at least 3 vertices");
      std::vector<std::int64_t> poly;
      for (size_t k = 1; k < tok.size(); ++k) {
        const std::string_view t = tok[k].substr(0, tok[k].find('/'));
        std::int64_t v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size() || v == 0) bad("bad face index");
        poly.push_back(v);
      }
      // Negative indices are relative to the vertices read so far.
      for (auto& v : poly) v = v < 0 ? static_cast<std::int64_t>(mesh.positions.size()) + v : v - 1;
      polys.push_back(std::move(poly));
    }
  }
  for (const auto& poly : polys) {
    for (auto v : poly) {
      if (v < 0 || v >= static_cast<std::int64_t>(mesh.positions.size())) {
        fail(ErrorKind::FormatError, "OBJ face index out of range");
      }
    }
    for (size_t k = 1; k + 1 < poly.size(); ++k) {
      mesh.faces.push_back({static_cast<std::uint32_t>(poly[0]), static_cast<std::uint32_t>(poly[k]),
                            static_cast<std::uint32_t>(poly[k + 1])});
    }
  }
  return mesh;
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.rfind("ply", 0) == 0) return parse_ply_mesh(bytes);
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return parse_obj_mesh(bytes);
  fail(ErrorKind::FormatError, "unrecognised mesh file " + path.string());
}

MeshFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".obj" ? MeshFormat::Obj : MeshFormat::PlyBinary;
}

}  // namespace shoesplat::mesh

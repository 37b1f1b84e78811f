// Copyright 2026 The magvem Authors
// SPDX-License-Identifier: Apache-2.0

#include "magvem/mesh_io.hpp"

#include "magvem/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace magvem {

using nlohmann::json;

namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::ParseError, "at " + where + ": " + what);
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema_error(where, "expected an integer");
  return j.get<int>();
}

double as_double(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) schema_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing key \"") + key + "\"");
  return *it;
}

const json& array_member(const json& obj, const char* key, const std::string& where) {
  const json& a = member(obj, key, where);
  if (!a.is_array()) schema_error(where + "/" + key, "expected an array");
  return a;
}

SignedIndex signed_index(const json& j, const std::string& where, int count) {
  const int k = as_int(j, where);
  if (k == 0 || std::abs(k) > count)
    schema_error(where, "signed index " + std::to_string(k) + " out of range 1.." + std::to_string(count));
  return {std::abs(k) - 1, k > 0 ? 1 : -1};
}

void throw_topology_if_invalid(const PolyMesh& mesh) {
  const ValidationReport report = validate(mesh);
  if (!report.ok())
    throw Error(ErrorKind::TopologyError,
                report.violations.front().invariant + ": " + report.violations.front().detail);
}

// Outward loops of a VTK cell of fixed type.
std::vector<std::vector<int>> fixed_cell_loops(int type, const std::vector<int>& p) {
  switch (type) {
    case 10:
      return {{p[0], p[2], p[1]}, {p[0], p[1], p[3]}, {p[1], p[2], p[3]}, {p[0], p[3], p[2]}};
    case 12:
      return {{p[0], p[3], p[2], p[1]}, {p[4], p[5], p[6], p[7]}, {p[0], p[1], p[5], p[4]},
              {p[1], p[2], p[6], p[5]}, {p[2], p[3], p[7], p[6]}, {p[3], p[0], p[4], p[7]}};
    case 13:
      return {{p[0], p[1], p[2]}, {p[3], p[5], p[4]}, {p[0], p[3], p[4], p[1]},
              {p[1], p[4], p[5], p[2]}, {p[2], p[5], p[3], p[0]}};
    default:
      return {};
  }
}

double signed_volume(const std::vector<Vec3>& pts, const std::vector<std::vector<int>>& loops) {
  double v = 0.0;
  for (const auto& loop : loops)
    for (std::size_t i = 1; i + 1 < loop.size(); ++i)
      v += pts[loop[0]].dot(pts[loop[i]].cross(pts[loop[i + 1]])) / 6.0;
  return v;
}

// Token reader with line tracking for the legacy VTK format.
class VtkTokens {
 public:
  explicit VtkTokens(const std::string& text) : text_(text) {}

  std::string next() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  std::string line() {
    // Rest of the current line.
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    std::string s = text_.substr(start, pos_ - start);
    if (pos_ < text_.size()) {
      ++pos_;
      ++line_;
    }
    return s;
  }
  long long integer() {
    const std::string t = next();
    try {
      std::size_t used = 0;
      const long long v = std::stoll(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, found \"" + t + "\"");
    }
  }
  double real() {
    const std::string t = next();
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      fail("expected a number, found \"" + t + "\"");
    }
  }
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "line " << line_ << ", offset " << pos_ << ": " << what;
    throw Error(ErrorKind::ParseError, os.str());
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::toupper(ch); });
  return s;
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".json") return MeshFormat::NativeJson;
  if (ext == ".vtk") return MeshFormat::VtkPolyhedral;
  throw Error(ErrorKind::InvalidArgument, "cannot infer mesh format from \"" + path + "\"");
}

std::string to_native_json(const PolyMesh& mesh) {
  json j;
  j["version"] = 1;
  json verts = json::array();
  for (const auto& v : mesh.vertices()) verts.push_back({v.x(), v.y(), v.z()});
  j["vertices"] = std::move(verts);
  json edges = json::array();
  for (const auto& e : mesh.edges()) edges.push_back({e.tail, e.head});
  j["edges"] = std::move(edges);
  json faces = json::array();
  for (const auto& f : mesh.faces()) {
    json loop = json::array();
    for (const auto& se : f.edges) loop.push_back(se.sign * (se.index + 1));
    faces.push_back({{"edges", std::move(loop)}});
  }
  j["faces"] = std::move(faces);
  json cells = json::array();
  for (const auto& c : mesh.cells()) {
    json fs = json::array();
    for (const auto& sf : c.faces) fs.push_back(sf.sign * (sf.index + 1));
    cells.push_back({{"faces", std::move(fs)}, {"subdomain", c.subdomain}});
  }
  j["cells"] = std::move(cells);
  json bnd = json::array();
  for (int f = 0; f < mesh.num_faces(); ++f)
    if (mesh.is_boundary_face(f)) bnd.push_back(f);
  j["boundary_faces"] = std::move(bnd);
  return j.dump(1) + "\n";
}

PolyMesh from_native_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto line = 1 + std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n');
    std::ostringstream os;
    os << "line " << line << ", offset " << offset << ": " << e.what();
    throw Error(ErrorKind::ParseError, os.str());
  }
  const json& version = member(j, "version", "/");
  if (as_int(version, "/version") != 1) schema_error("/version", "unsupported version");

  std::vector<Vec3> vertices;
  const json& jv = array_member(j, "vertices", "");
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const std::string w = "/vertices/" + std::to_string(i);
    if (!jv[i].is_array() || jv[i].size() != 3) schema_error(w, "expected [x, y, z]");
    vertices.emplace_back(as_double(jv[i][0], w), as_double(jv[i][1], w), as_double(jv[i][2], w));
  }
  const int nv = static_cast<int>(vertices.size());

  std::vector<Edge> edges;
  const json& je = array_member(j, "edges", "");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string w = "/edges/" + std::to_string(i);
    if (!je[i].is_array() || je[i].size() != 2) schema_error(w, "expected [tail, head]");
    const int a = as_int(je[i][0], w), b = as_int(je[i][1], w);
    if (a < 0 || b < 0 || a >= nv || b >= nv) schema_error(w, "vertex index out of range");
    edges.push_back({a, b});
  }
  const int ne = static_cast<int>(edges.size());

  std::vector<Face> faces;
  const json& jf = array_member(j, "faces", "");
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string w = "/faces/" + std::to_string(i);
    const json& loop = array_member(jf[i], "edges", w);
    Face f;
    for (std::size_t k = 0; k < loop.size(); ++k)
      f.edges.push_back(signed_index(loop[k], w + "/edges/" + std::to_string(k), ne));
    faces.push_back(std::move(f));
  }
  const int nf = static_cast<int>(faces.size());

  std::vector<Cell> cells;
  const json& jc = array_member(j, "cells", "");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const std::string w = "/cells/" + std::to_string(i);
    const json& fs = array_member(jc[i], "faces", w);
    Cell c;
    for (std::size_t k = 0; k < fs.size(); ++k)
      c.faces.push_back(signed_index(fs[k], w + "/faces/" + std::to_string(k), nf));
    auto sub = jc[i].find("subdomain");
    c.subdomain = sub == jc[i].end() ? 0 : as_int(*sub, w + "/subdomain");
    cells.push_back(std::move(c));
  }

  std::vector<bool> boundary;
  auto jb = j.find("boundary_faces");
  if (jb != j.end()) {
    if (!jb->is_array()) schema_error("/boundary_faces", "expected an array");
    boundary.assign(nf, false);
    for (std::size_t k = 0; k < jb->size(); ++k) {
      const int f = as_int((*jb)[k], "/boundary_faces/" + std::to_string(k));
      if (f < 0 || f >= nf) schema_error("/boundary_faces/" + std::to_string(k), "face index out of range");
      boundary[f] = true;
    }
  }
  return PolyMesh(std::move(vertices), std::move(edges), std::move(faces), std::move(cells),
                  std::move(boundary));
}

PolyMesh from_vtk(const std::string& text) {
  VtkTokens tok(text);
  const std::string header = tok.line();
  if (header.rfind("# vtk DataFile", 0) != 0) tok.fail("missing \"# vtk DataFile\" header");
  tok.line();  // title
  if (upper(tok.next()) != "ASCII") tok.fail("only ASCII VTK files are supported");
  if (upper(tok.next()) != "DATASET" || upper(tok.next()) != "UNSTRUCTURED_GRID")
    tok.fail("expected DATASET UNSTRUCTURED_GRID");

  std::vector<Vec3> pts;
  std::vector<std::vector<long long>> cells;
  std::vector<int> types;
  std::vector<int> subdomain;
  while (!tok.at_end()) {
    const std::string key = upper(tok.next());
    if (key == "POINTS") {
      const long long n = tok.integer();
      tok.next();  // data type
      if (n < 0) tok.fail("negative point count");
      pts.resize(n);
      for (auto& p : pts) p = Vec3(tok.real(), tok.real(), tok.real());
    } else if (key == "CELLS") {
      const long long n = tok.integer();
      const long long size = tok.integer();
      long long used = 0;
      cells.resize(n);
      for (auto& c : cells) {
        const long long k = tok.integer();
        if (k < 0) tok.fail("negative cell size");
        c.resize(k);
        for (auto& v : c) v = tok.integer();
        used += k + 1;
      }
      if (used != size) tok.fail("CELLS size does not match its entries");
    } else if (key == "CELL_TYPES") {
      const long long n = tok.integer();
      types.resize(n);
      for (auto& t : types) t = static_cast<int>(tok.integer());
    } else if (key == "CELL_DATA") {
      const long long n = tok.integer();
      while (!tok.at_end()) {
        const std::string kind = upper(tok.next());
        if (kind == "SCALARS") {
          const std::string name = tok.next();
          tok.next();  // type
          std::string next = tok.next();
          if (upper(next) != "LOOKUP_TABLE") next = tok.next();  // skip component count
          if (upper(next) != "LOOKUP_TABLE") tok.fail("expected LOOKUP_TABLE");
          tok.next();  // table name
          std::vector<double> vals(n);
          for (auto& v : vals) v = tok.real();
          if (name == "subdomain") {
            subdomain.resize(n);
            for (long long i = 0; i < n; ++i) subdomain[i] = static_cast<int>(std::lround(vals[i]));
          }
        } else if (kind == "VECTORS") {
          tok.next();
          tok.next();
          for (long long i = 0; i < 3 * n; ++i) tok.real();
        } else {
          tok.fail("unsupported CELL_DATA section \"" + kind + "\"");
        }
      }
    } else {
      tok.fail("unsupported section \"" + key + "\"");
    }
  }
  if (types.size() != cells.size()) tok.fail("CELL_TYPES count does not match CELLS");

  MeshBuilder builder(pts);
  const long long np = static_cast<long long>(pts.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& raw = cells[c];
    std::vector<std::vector<int>> loops;
    auto vid = [&](long long v) {
      if (v < 0 || v >= np) tok.fail("cell " + std::to_string(c) + " references a missing point");
      return static_cast<int>(v);
    };
    if (types[c] == 42) {
      std::size_t k = 0;
      if (raw.empty()) tok.fail("empty polyhedron");
      const long long nfaces = raw[k++];
      for (long long f = 0; f < nfaces; ++f) {
        if (k >= raw.size()) tok.fail("truncated polyhedron " + std::to_string(c));
        const long long m = raw[k++];
        if (m < 3 || k + m > raw.size()) tok.fail("bad face in polyhedron " + std::to_string(c));
        std::vector<int> loop;
        for (long long i = 0; i < m; ++i) loop.push_back(vid(raw[k++]));
        loops.push_back(std::move(loop));
      }
    } else {
      const std::size_t need = types[c] == 10 ? 4 : types[c] == 12 ? 8 : types[c] == 13 ? 6 : 0;
      if (need == 0) tok.fail("unsupported cell type " + std::to_string(types[c]));
      if (raw.size() != need) tok.fail("cell " + std::to_string(c) + " has the wrong point count");
      std::vector<int> p;
      for (long long v : raw) p.push_back(vid(v));
      loops = fixed_cell_loops(types[c], p);
    }
    if (signed_volume(pts, loops) < 0.0)
      for (auto& loop : loops) std::reverse(loop.begin(), loop.end());
    builder.add_cell(loops, subdomain.empty() ? 0 : subdomain[c]);
  }
  return std::move(builder).build();
}

std::string to_vtk(const PolyMesh& mesh, const VtkCellData& data) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# vtk DataFile Version 4.2\nmagvem mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  std::vector<std::vector<int>> entries;
  long long size = 0;
  for (const auto& c : mesh.cells()) {
    std::vector<int> e{static_cast<int>(c.faces.size())};
    for (const auto& sf : c.faces) {
      std::vector<int> loop = mesh.face_geometry(sf.index).loop;
      if (sf.sign < 0) std::reverse(loop.begin(), loop.end());
      e.push_back(static_cast<int>(loop.size()));
      e.insert(e.end(), loop.begin(), loop.end());
    }
    size += static_cast<long long>(e.size()) + 1;
    entries.push_back(std::move(e));
  }
  os << "CELLS " << mesh.num_cells() << ' ' << size << '\n';
  for (const auto& e : entries) {
    os << e.size();
    for (int v : e) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) os << "42\n";
  os << "CELL_DATA " << mesh.num_cells() << '\n';
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (const auto& c : mesh.cells()) os << c.subdomain << '\n';
  for (const auto& [name, vals] : data.scalars) {
    if (static_cast<int>(vals.size()) != mesh.num_cells())
      throw Error(ErrorKind::InvalidArgument, "cell scalar \"" + name + "\" has the wrong length");
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : vals) os << v << '\n';
  }
  for (const auto& [name, vals] : data.vectors) {
    if (static_cast<int>(vals.size()) != mesh.num_cells())
      throw Error(ErrorKind::InvalidArgument, "cell vector \"" + name + "\" has the wrong length");
    os << "VECTORS " << name << " double\n";
    for (const auto& v : vals) os << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open \"" + path + "\" for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing \"" + path + "\"");
}

PolyMesh load_mesh(const std::string& path, MeshFormat format, bool check) {
  const std::string text = read_text_file(path);
  PolyMesh mesh = format == MeshFormat::NativeJson ? from_native_json(text) : from_vtk(text);
  if (check) throw_topology_if_invalid(mesh);
  return mesh;
}

PolyMesh load_mesh(const std::string& path, bool check) {
  return load_mesh(path, format_from_path(path), check);
}

void save_mesh(const PolyMesh& mesh, const std::string& path, MeshFormat format) {
  write_text_file(path, format == MeshFormat::NativeJson ? to_native_json(mesh) : to_vtk(mesh));
}

void save_mesh(const PolyMesh& mesh, const std::string& path) {
  save_mesh(mesh, path, format_from_path(path));
}

}  // namespace magvem

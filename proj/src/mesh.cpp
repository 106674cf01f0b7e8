#include "cmcf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <tuple>

namespace cmcf {

TriangleMesh TriangleMesh::with_positions(Positions p) const {
  if (p.rows() != vertices.rows()) {
    throw MeshError("position count does not match vertex count");
  }
  return TriangleMesh{std::move(p), faces};
}

// ===========================================================================
// File I/O

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MeshError("cannot open mesh file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

// OBJ face token "i", "i/t", "i//n" or "i/t/n"; returns the 0-based index.
int parse_obj_index(const std::string& token, long nverts, std::size_t lineno) {
  std::string head = token.substr(0, token.find('/'));
  std::size_t used = 0;
  long idx = 0;
  try {
    idx = std::stol(head, &used);
  } catch (const std::exception&) {
    throw MeshError("OBJ line " + std::to_string(lineno) + ": bad face index '" + token + "'");
  }
  if (used != head.size() || idx == 0) {
    throw MeshError("OBJ line " + std::to_string(lineno) + ": bad face index '" + token + "'");
  }
  long zero_based = idx > 0 ? idx - 1 : nverts + idx;
  if (zero_based < 0 || zero_based >= nverts) {
    throw MeshError("OBJ line " + std::to_string(lineno) + ": face index " + std::to_string(idx) +
                    " out of range");
  }
  return static_cast<int>(zero_based);
}

} // namespace

TriangleMesh parse_obj(const std::string& text) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  // Negative (relative) indices resolve against the vertices read so far.
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(strip_comment(line));
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw MeshError("OBJ line " + std::to_string(lineno) + ": malformed vertex");
      }
      verts.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::string> tokens;
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (tokens.size() != 3) {
        throw MeshError("OBJ line " + std::to_string(lineno) + ": face has " + std::to_string(tokens.size()) +
                        " vertices; only triangles are supported");
      }
      Face face;
      for (int c = 0; c < 3; ++c) {
        face[c] = parse_obj_index(tokens[c], static_cast<long>(verts.size()), lineno);
      }
      faces.push_back(face);
    }
  }
  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  mesh.faces = std::move(faces);
  return mesh;
}

TriangleMesh parse_off(const std::string& text) {
  // Line oriented: header, counts, one vertex per line, one face per line.
  // Trailing values on vertex or face lines (colours) are ignored.
  std::vector<std::vector<std::string>> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(strip_comment(line));
      std::vector<std::string> tokens;
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) lines.push_back(std::move(tokens));
    }
  }
  if (lines.empty() || lines[0][0] != "OFF") throw MeshError("OFF: missing 'OFF' header");

  auto to_double = [](const std::string& tok, const std::string& what) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw MeshError("OFF: malformed " + what + " '" + tok + "'");
    return value;
  };
  auto to_long = [&](const std::string& tok, const std::string& what) {
    double v = to_double(tok, what);
    if (v != std::floor(v)) throw MeshError("OFF: non-integer " + what + " '" + tok + "'");
    return static_cast<long>(v);
  };

  // Counts may share the header line.
  std::vector<std::string> counts(lines[0].begin() + 1, lines[0].end());
  std::size_t cursor = 1;
  if (counts.empty()) {
    if (lines.size() < 2) throw MeshError("OFF: missing element counts");
    counts = lines[1];
    cursor = 2;
  }
  if (counts.size() < 2) throw MeshError("OFF: malformed element counts");
  long nv = to_long(counts[0], "vertex count");
  long nf = to_long(counts[1], "face count");
  if (nv < 0 || nf < 0) throw MeshError("OFF: negative element count");
  if (lines.size() < cursor + static_cast<std::size_t>(nv + nf)) {
    throw MeshError("OFF: unexpected end of file");
  }

  TriangleMesh mesh;
  mesh.vertices.resize(nv, 3);
  for (long v = 0; v < nv; ++v) {
    const auto& tok = lines[cursor++];
    if (tok.size() < 3) throw MeshError("OFF: vertex " + std::to_string(v) + " has fewer than 3 coordinates");
    for (int c = 0; c < 3; ++c) mesh.vertices(v, c) = to_double(tok[c], "vertex coordinate");
  }
  mesh.faces.reserve(static_cast<std::size_t>(nf));
  for (long f = 0; f < nf; ++f) {
    const auto& tok = lines[cursor++];
    long n = to_long(tok[0], "face size");
    if (n != 3) {
      throw MeshError("OFF: face " + std::to_string(f) + " has " + std::to_string(n) +
                      " vertices; only triangles are supported");
    }
    if (tok.size() < 4) throw MeshError("OFF: face " + std::to_string(f) + " is missing indices");
    Face face;
    for (int c = 0; c < 3; ++c) {
      long idx = to_long(tok[c + 1], "face index");
      if (idx < 0 || idx >= nv) {
        throw MeshError("OFF: face " + std::to_string(f) + " index " + std::to_string(idx) + " out of range");
      }
      face[c] = static_cast<int>(idx);
    }
    mesh.faces.push_back(face);
  }
  return mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format) {
  if (!format) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".obj") {
      format = MeshFormat::OBJ;
    } else if (ext == ".off") {
      format = MeshFormat::OFF;
    } else {
      throw MeshError("cannot infer mesh format from extension '" + ext + "'");
    }
  }
  std::string text = read_file(path);
  return *format == MeshFormat::OBJ ? parse_obj(text) : parse_off(text);
}

std::string to_obj_string(const TriangleMesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
    out << "v " << mesh.vertices(v, 0) << ' ' << mesh.vertices(v, 1) << ' ' << mesh.vertices(v, 2) << '\n';
  }
  for (const Face& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  return out.str();
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError("cannot write mesh file: " + path.string());
  out << to_obj_string(mesh);
  if (!out) throw MeshError("failed writing mesh file: " + path.string());
}

// ===========================================================================
// Topology

namespace {

struct HalfEdgeRecord {
  int lo, hi;
  bool forward; // true when the face traverses lo -> hi
  std::size_t face;
  bool operator<(const HalfEdgeRecord& o) const {
    return std::tie(lo, hi, face, forward) < std::tie(o.lo, o.hi, o.face, o.forward);
  }
};

std::vector<HalfEdgeRecord> sorted_half_edges(const TriangleMesh& mesh) {
  std::vector<HalfEdgeRecord> out;
  out.reserve(mesh.faces.size() * 3);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      out.push_back({std::min(a, b), std::max(a, b), a < b, f});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool face_indices_ok(const Face& f, int n) {
  for (int v : f) {
    if (v < 0 || v >= n) return false;
  }
  return f[0] != f[1] && f[1] != f[2] && f[0] != f[2];
}

} // namespace

bool ValidationReport::eligible() const {
  return indices_valid && manifold && closed && orientable && connected && euler_characteristic == 2 &&
         degenerate_faces.empty() && isolated_vertices == 0 && num_faces > 0;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "vertices: " << num_vertices << "\n"
      << "edges: " << num_edges << "\n"
      << "faces: " << num_faces << "\n"
      << "euler characteristic: " << euler_characteristic << "\n"
      << "genus: " << (genus ? std::to_string(*genus) : std::string("n/a")) << "\n"
      << "manifold: " << (manifold ? "yes" : "no") << " (non-manifold edges: " << nonmanifold_edges << ")\n"
      << "closed: " << (closed ? "yes" : "no") << " (boundary edges: " << boundary_edges << ")\n"
      << "orientable: " << (orientable ? "yes" : "no") << " (inconsistent edges: " << inconsistent_edges << ")\n"
      << "connected: " << (connected ? "yes" : "no") << "\n"
      << "isolated vertices: " << isolated_vertices << "\n"
      << "invalid faces: " << invalid_faces.size() << "\n"
      << "degenerate faces: " << degenerate_faces.size();
  if (!degenerate_faces.empty()) {
    out << " [";
    for (std::size_t n = 0; n < degenerate_faces.size() && n < 20; ++n) {
      out << (n ? ", " : "") << degenerate_faces[n];
    }
    if (degenerate_faces.size() > 20) out << ", ...";
    out << "]";
  }
  out << "\n" << "cMCF eligible: " << (eligible() ? "yes" : "no") << "\n";
  return out.str();
}

ValidationReport validate_closed_genus_zero(const TriangleMesh& mesh) {
  ValidationReport rep;
  const int nv = static_cast<int>(mesh.num_vertices());
  rep.num_vertices = mesh.num_vertices();
  rep.num_faces = mesh.num_faces();

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (!face_indices_ok(mesh.faces[f], nv)) rep.invalid_faces.push_back(f);
  }
  if (!rep.invalid_faces.empty()) {
    // Nothing below is well defined with bad indices.
    rep.indices_valid = rep.manifold = rep.closed = rep.orientable = rep.connected = false;
    return rep;
  }

  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (face_angles(mesh, f).degenerate) rep.degenerate_faces.push_back(f);
  }

  auto half_edges = sorted_half_edges(mesh);
  for (std::size_t a = 0; a < half_edges.size();) {
    std::size_t b = a;
    while (b < half_edges.size() && half_edges[b].lo == half_edges[a].lo && half_edges[b].hi == half_edges[a].hi) ++b;
    ++rep.num_edges;
    std::size_t count = b - a;
    if (count == 1) {
      ++rep.boundary_edges;
    } else if (count > 2) {
      ++rep.nonmanifold_edges;
    } else if (half_edges[a].forward == half_edges[a + 1].forward) {
      ++rep.inconsistent_edges;
    }
    a = b;
  }

  // Vertex manifoldness: the link of every vertex must be a single cycle.
  // For each corner at v the opposite edge (a -> b) contributes one link arc.
  std::vector<std::vector<std::pair<int, int>>> link(static_cast<std::size_t>(nv));
  for (const Face& t : mesh.faces) {
    for (int c = 0; c < 3; ++c) link[t[c]].emplace_back(t[(c + 1) % 3], t[(c + 2) % 3]);
  }
  std::size_t nonmanifold_vertices = 0;
  for (int v = 0; v < nv; ++v) {
    auto& arcs = link[v];
    if (arcs.empty()) {
      ++rep.isolated_vertices;
      continue;
    }
    // Count connected components of the link graph.
    std::vector<int> nodes;
    for (auto [a, b] : arcs) {
      nodes.push_back(a);
      nodes.push_back(b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    DisjointSets sets(nodes.size());
    auto local = [&](int x) {
      return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), x) - nodes.begin());
    };
    for (auto [a, b] : arcs) sets.unite(local(a), local(b));
    std::size_t components = 0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (sets.find(static_cast<int>(n)) == static_cast<int>(n)) ++components;
    }
    if (components > 1) ++nonmanifold_vertices;
  }

  DisjointSets verts(static_cast<std::size_t>(nv));
  for (const Face& t : mesh.faces) {
    verts.unite(t[0], t[1]);
    verts.unite(t[1], t[2]);
  }
  int root = -1;
  for (int v = 0; v < nv; ++v) {
    if (link[v].empty()) continue;
    int r = verts.find(v);
    if (root < 0) root = r;
    if (r != root) rep.connected = false;
  }

  rep.manifold = rep.nonmanifold_edges == 0 && nonmanifold_vertices == 0;
  rep.closed = rep.boundary_edges == 0;
  rep.orientable = rep.inconsistent_edges == 0;
  rep.euler_characteristic = static_cast<long>(rep.num_vertices) - static_cast<long>(rep.num_edges) +
                             static_cast<long>(rep.num_faces);
  if (rep.manifold && rep.closed && rep.orientable && rep.connected && rep.isolated_vertices == 0) {
    rep.genus = (2 - rep.euler_characteristic) / 2;
  }
  return rep;
}

std::vector<EdgeFlap> edge_flaps(const TriangleMesh& mesh) {
  auto half_edges = sorted_half_edges(mesh);
  std::vector<EdgeFlap> flaps;
  flaps.reserve(half_edges.size() / 2);
  auto opposite = [&](std::size_t f, int a, int b) {
    for (int v : mesh.faces[f]) {
      if (v != a && v != b) return v;
    }
    return -1;
  };
  for (std::size_t a = 0; a < half_edges.size();) {
    std::size_t b = a;
    while (b < half_edges.size() && half_edges[b].lo == half_edges[a].lo && half_edges[b].hi == half_edges[a].hi) ++b;
    if (b - a == 2 && half_edges[a].forward != half_edges[a + 1].forward) {
      const auto& fwd = half_edges[a].forward ? half_edges[a] : half_edges[a + 1];
      const auto& bwd = half_edges[a].forward ? half_edges[a + 1] : half_edges[a];
      int i = fwd.lo, j = fwd.hi;
      // m: opposite in the face containing i -> j; k: in the face with j -> i.
      flaps.push_back({i, j, opposite(fwd.face, i, j), opposite(bwd.face, i, j)});
    }
    a = b;
  }
  return flaps;
}

std::vector<std::array<int, 2>> unique_edges(const TriangleMesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const Face& t : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b)});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

// ===========================================================================
// Geometry

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 u = b - a;
  Vec3 w = c - a;
  if (u.squaredNorm() == 0.0 || w.squaredNorm() == 0.0) return 0.0;
  // atan2 keeps full relative accuracy for small and near-straight angles, where acos does not.
  return std::atan2(u.cross(w).norm(), u.dot(w));
}

double face_area(const TriangleMesh& mesh, std::size_t face) {
  const Face& t = mesh.faces[face];
  return triangle_area(mesh.position(t[0]), mesh.position(t[1]), mesh.position(t[2]));
}

FaceAngles face_angles(const TriangleMesh& mesh, std::size_t face) {
  const Face& t = mesh.faces[face];
  Vec3 p0 = mesh.position(t[0]), p1 = mesh.position(t[1]), p2 = mesh.position(t[2]);
  FaceAngles out;
  out.alpha = corner_angle(p0, p1, p2);
  out.beta = corner_angle(p1, p2, p0);
  out.gamma = corner_angle(p2, p0, p1);
  double longest = std::max({(p1 - p0).squaredNorm(), (p2 - p1).squaredNorm(), (p0 - p2).squaredNorm()});
  // Zero area relative to the squared edge scale.
  out.degenerate = longest == 0.0 || triangle_area(p0, p1, p2) <= 1e-14 * longest;
  return out;
}

std::vector<double> face_areas(const TriangleMesh& mesh) {
  std::vector<double> areas(mesh.num_faces());
  for (std::size_t f = 0; f < areas.size(); ++f) areas[f] = face_area(mesh, f);
  return areas;
}

double total_area(const TriangleMesh& mesh) {
  double sum = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) sum += face_area(mesh, f);
  return sum;
}

double signed_volume(const TriangleMesh& mesh) {
  double sum = 0.0;
  for (const Face& t : mesh.faces) {
    sum += mesh.position(t[0]).dot(mesh.position(t[1]).cross(mesh.position(t[2])));
  }
  return sum / 6.0;
}

Vec3 area_centroid(const TriangleMesh& mesh) {
  Vec3 acc = Vec3::Zero();
  double area = 0.0;
  for (const Face& t : mesh.faces) {
    Vec3 p0 = mesh.position(t[0]), p1 = mesh.position(t[1]), p2 = mesh.position(t[2]);
    double a = triangle_area(p0, p1, p2);
    acc += a * (p0 + p1 + p2) / 3.0;
    area += a;
  }
  return area > 0.0 ? Vec3(acc / area) : Vec3::Zero();
}

} // namespace cmcf

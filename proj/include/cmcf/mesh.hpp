#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmcf {

using Vec3 = Eigen::Vector3d;
using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Face = std::array<int, 3>;

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Vertex positions plus counterclockwise (outward) triangle connectivity.
// Positions are stored one vertex per row so they can be fed straight into
// the linear solves as three right-hand-side columns.
struct TriangleMesh {
  Positions vertices;
  std::vector<Face> faces;

  std::size_t num_vertices() const { return static_cast<std::size_t>(vertices.rows()); }
  std::size_t num_faces() const { return faces.size(); }

  Vec3 position(int v) const { return vertices.row(v).transpose(); }

  // Same connectivity, new positions.
  TriangleMesh with_positions(Positions p) const;
};

// Edge (i, j) with its two opposite vertices: (i, j, m) and (j, i, k) are faces.
struct EdgeFlap {
  int i, j, m, k;
};

enum class MeshFormat { OBJ, OFF };

TriangleMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format = std::nullopt);
TriangleMesh parse_obj(const std::string& text);
TriangleMesh parse_off(const std::string& text);
void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string to_obj_string(const TriangleMesh& mesh);

// ---------------------------------------------------------------------------
// Topology

struct ValidationReport {
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  std::size_t num_faces = 0;
  long euler_characteristic = 0;
  // Only meaningful when closed, manifold and orientable.
  std::optional<long> genus;

  bool indices_valid = true;
  bool manifold = true;
  bool closed = true;
  bool orientable = true;
  bool connected = true;

  std::vector<std::size_t> invalid_faces;    // repeated or out-of-range indices
  std::vector<std::size_t> degenerate_faces; // zero area
  std::size_t boundary_edges = 0;
  std::size_t nonmanifold_edges = 0;
  std::size_t inconsistent_edges = 0; // edges traversed twice in the same direction
  std::size_t isolated_vertices = 0;

  bool eligible() const;
  std::string summary() const;
};

ValidationReport validate_closed_genus_zero(const TriangleMesh& mesh);

// Interior edges of a closed, consistently oriented mesh, one flap per
// undirected edge with i < j. Edges without two oppositely oriented incident
// faces are skipped.
std::vector<EdgeFlap> edge_flaps(const TriangleMesh& mesh);

// Undirected edges (i < j), sorted.
std::vector<std::array<int, 2>> unique_edges(const TriangleMesh& mesh);

// ---------------------------------------------------------------------------
// Geometry

struct FaceAngles {
  double alpha, beta, gamma; // at corners 0, 1, 2
  bool degenerate;
};

double face_area(const TriangleMesh& mesh, std::size_t face);
FaceAngles face_angles(const TriangleMesh& mesh, std::size_t face);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
// Interior angle at `a` by clamped arccos of the normalized edge directions.
double corner_angle(const Vec3& a, const Vec3& b, const Vec3& c);

double total_area(const TriangleMesh& mesh);
double signed_volume(const TriangleMesh& mesh);
Vec3 area_centroid(const TriangleMesh& mesh);
std::vector<double> face_areas(const TriangleMesh& mesh);

} // namespace cmcf

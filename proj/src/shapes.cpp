#include "cmcf/shapes.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <utility>

namespace cmcf::shapes {

namespace {

TriangleMesh from_lists(const std::vector<Vec3>& verts, std::vector<Face> faces) {
  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i];
  mesh.faces = std::move(faces);
  return mesh;
}

} // namespace

TriangleMesh icosphere(int levels, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  for (auto& v : verts) v *= radius;
  return from_lists(verts, std::move(faces));
}

TriangleMesh unit_cube() {
  std::vector<Vec3> verts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                             {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  std::vector<Face> faces = {
      {0, 2, 1}, {0, 3, 2}, // z = 0
      {4, 5, 6}, {4, 6, 7}, // z = 1
      {0, 1, 5}, {0, 5, 4}, // y = 0
      {3, 7, 6}, {3, 6, 2}, // y = 1
      {0, 4, 7}, {0, 7, 3}, // x = 0
      {1, 2, 6}, {1, 6, 5}, // x = 1
  };
  return from_lists(verts, std::move(faces));
}

TriangleMesh torus(int rings, int sides, double major_radius, double minor_radius) {
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < rings; ++i) {
    double u = two_pi * i / rings;
    for (int j = 0; j < sides; ++j) {
      double v = two_pi * j / sides;
      double r = major_radius + minor_radius * std::cos(v);
      verts.emplace_back(r * std::cos(u), r * std::sin(u), minor_radius * std::sin(v));
    }
  }
  auto id = [&](int i, int j) { return (i % rings) * sides + (j % sides); };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sides; ++j) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      faces.push_back({a, b, c});
      faces.push_back({a, c, d});
    }
  }
  return from_lists(verts, std::move(faces));
}

TriangleMesh subdivided_box(int n, Vec3 extent) {
  // Build each side as an (n+1)^2 grid and weld shared boundary vertices by
  // their integer lattice coordinates.
  std::map<std::array<int, 3>, int> lattice;
  std::vector<Vec3> verts;
  std::vector<Face> faces;
  auto vertex = [&](std::array<int, 3> key) {
    auto it = lattice.find(key);
    if (it != lattice.end()) return it->second;
    verts.emplace_back(extent.x() * key[0] / n, extent.y() * key[1] / n, extent.z() * key[2] / n);
    int idx = static_cast<int>(verts.size()) - 1;
    lattice.emplace(key, idx);
    return idx;
  };
  // For each side: fixed axis, fixed value, and two in-plane axes ordered so
  // that (u x v) points outward.
  struct Side {
    int axis, value, u, v;
  };
  const Side sides[] = {{0, n, 1, 2}, {0, 0, 2, 1}, {1, n, 2, 0}, {1, 0, 0, 2}, {2, n, 0, 1}, {2, 0, 1, 0}};
  for (const Side& s : sides) {
    auto at = [&](int a, int b) {
      std::array<int, 3> key{};
      key[s.axis] = s.value;
      key[s.u] = a;
      key[s.v] = b;
      return vertex(key);
    };
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        int p00 = at(a, b), p10 = at(a + 1, b), p11 = at(a + 1, b + 1), p01 = at(a, b + 1);
        faces.push_back({p00, p10, p11});
        faces.push_back({p00, p11, p01});
      }
    }
  }
  return from_lists(verts, std::move(faces));
}

} // namespace cmcf::shapes

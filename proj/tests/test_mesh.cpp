#include "cmcf/mesh.hpp"
#include "cmcf/shapes.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace cmcf;
using std::numbers::pi;

namespace {

TriangleMesh single_triangle(Vec3 a, Vec3 b, Vec3 c) {
  TriangleMesh m;
  m.vertices.resize(3, 3);
  m.vertices.row(0) = a;
  m.vertices.row(1) = b;
  m.vertices.row(2) = c;
  m.faces = {{0, 1, 2}};
  return m;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  auto path = std::filesystem::temp_directory_path() / ("cmcf_test_" + name);
  std::ofstream(path) << contents;
  return path;
}

} // namespace

TEST_CASE("OFF single triangle loads as stored") {
  auto path = temp_file("tri.off", "OFF\n# comment\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  TriangleMesh m = load_mesh(path);
  CHECK(m.num_vertices() == 3);
  CHECK(m.num_faces() == 1);
  CHECK(m.faces[0] == Face{0, 1, 2});
  CHECK(m.vertices(1, 0) == 1.0);
}

TEST_CASE("OFF counts on the header line and trailing colour values") {
  TriangleMesh m = parse_off("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 2 1 0 255 0 0\n");
  CHECK(m.faces[0] == Face{2, 1, 0});
}

TEST_CASE("OBJ ignores texture/normal indices and other records") {
  TriangleMesh m = parse_obj("mtllib x.mtl\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\n"
                             "g grp\nusemtl m\ns off\nf 1/1/1 2/1/1 3/1/1\nf -3//1 -1//1 -2//1\n");
  REQUIRE(m.num_vertices() == 3);
  REQUIRE(m.num_faces() == 2);
  CHECK(m.faces[0] == Face{0, 1, 2});
  CHECK(m.faces[1] == Face{0, 2, 1});
}

TEST_CASE("loader errors") {
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), MeshError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n"), MeshError);
  CHECK_THROWS_AS(parse_obj("v 0 0\n"), MeshError);
  CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 1 a 1\n"), MeshError);
  CHECK_THROWS_AS(parse_off("3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n"), MeshError);
  CHECK_THROWS_AS(parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n4 0 1 2 3\n"), MeshError);
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n"), MeshError);
  CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n"), MeshError);
  CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.obj"), MeshError);
  CHECK_THROWS_AS(load_mesh(temp_file("x.stl", "solid")), MeshError);
}

TEST_CASE("OBJ writer round trip is exact") {
  std::mt19937_64 rng(7);
  TriangleMesh m = shapes::icosphere(2);
  m.vertices = m.vertices * oracle::random_rotation(rng).transpose();
  auto path = std::filesystem::temp_directory_path() / "cmcf_test_roundtrip.obj";
  save_obj(m, path);
  TriangleMesh back = load_mesh(path);
  CHECK(back.faces == m.faces);
  CHECK((back.vertices - m.vertices).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validation") {
  SUBCASE("icosahedron passes with chi = 2") {
    auto rep = validate_closed_genus_zero(shapes::icosphere(0));
    CHECK(rep.eligible());
    CHECK(rep.euler_characteristic == 2);
    CHECK(rep.genus == 0);
    CHECK(rep.num_edges == 30);
  }
  SUBCASE("torus fails with chi = 0") {
    auto rep = validate_closed_genus_zero(shapes::torus(12, 8));
    CHECK_FALSE(rep.eligible());
    CHECK(rep.euler_characteristic == 0);
    CHECK(rep.genus == 1);
    CHECK(rep.closed);
  }
  SUBCASE("one face removed leaves boundary edges") {
    TriangleMesh m = shapes::icosphere(1);
    m.faces.pop_back();
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.eligible());
    CHECK_FALSE(rep.closed);
    CHECK(rep.boundary_edges == 3);
  }
  SUBCASE("flipped face breaks orientation consistency") {
    TriangleMesh m = shapes::icosphere(1);
    std::swap(m.faces[0][1], m.faces[0][2]);
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.orientable);
    CHECK(rep.inconsistent_edges == 3);
    CHECK_FALSE(rep.eligible());
  }
  SUBCASE("duplicated vertex is not welded and fails") {
    TriangleMesh m = shapes::icosphere(1);
    Positions p(m.vertices.rows() + 1, 3);
    p << m.vertices, m.vertices.row(0);
    m.vertices = p;
    for (auto& f : m.faces) {
      if (f[0] == 0) {
        f[0] = static_cast<int>(p.rows()) - 1;
        break;
      }
    }
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.eligible());
    CHECK(rep.boundary_edges > 0);
  }
  SUBCASE("degenerate input face is listed") {
    TriangleMesh m = shapes::icosphere(1);
    Face f = m.faces[3];
    m.vertices.row(f[2]) = 0.5 * (m.vertices.row(f[0]) + m.vertices.row(f[1]));
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.eligible());
    REQUIRE(rep.degenerate_faces.size() >= 1);
    CHECK(std::find(rep.degenerate_faces.begin(), rep.degenerate_faces.end(), 3u) != rep.degenerate_faces.end());
  }
  SUBCASE("bad indices are reported, not thrown") {
    TriangleMesh m = shapes::icosphere(0);
    m.faces[0] = {0, 0, 1};
    m.faces[1] = {0, 1, 99};
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.indices_valid);
    CHECK(rep.invalid_faces.size() == 2);
  }
  SUBCASE("two disjoint spheres") {
    TriangleMesh a = shapes::icosphere(1);
    TriangleMesh m;
    m.vertices.resize(2 * a.vertices.rows(), 3);
    m.vertices << a.vertices, a.vertices.rowwise() + Eigen::RowVector3d(5, 0, 0);
    m.faces = a.faces;
    for (Face f : a.faces) {
      for (int& v : f) v += static_cast<int>(a.num_vertices());
      m.faces.push_back(f);
    }
    auto rep = validate_closed_genus_zero(m);
    CHECK_FALSE(rep.connected);
    CHECK(rep.euler_characteristic == 4);
    CHECK_FALSE(rep.eligible());
  }
  SUBCASE("two tetrahedra sharing one vertex are not manifold") {
    TriangleMesh m;
    m.vertices.resize(7, 3);
    m.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 0, 0, 0, -1, 0, 0, 0, -1;
    m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}, {0, 4, 5}, {0, 6, 4}, {0, 5, 6}, {4, 6, 5}};
    auto rep = validate_closed_genus_zero(m);
    CHECK(rep.closed);
    CHECK_FALSE(rep.manifold);
    CHECK_FALSE(rep.eligible());
  }
}

TEST_CASE("closed manifold: every undirected edge is seen once in each direction") {
  for (const TriangleMesh& m : {shapes::icosphere(2), shapes::unit_cube(), shapes::torus(9, 7)}) {
    long balance = 0;
    for (const Face& f : m.faces) {
      for (int c = 0; c < 3; ++c) balance += f[c] < f[(c + 1) % 3] ? 1 : -1;
    }
    CHECK(balance == 0);
    CHECK(edge_flaps(m).size() == unique_edges(m).size());
  }
}

TEST_CASE("edge flaps follow the directed-edge convention") {
  TriangleMesh m = shapes::icosphere(1);
  for (const EdgeFlap& fl : edge_flaps(m)) {
    auto has = [&](int a, int b, int c) {
      for (const Face& f : m.faces) {
        for (int r = 0; r < 3; ++r) {
          if (f[r] == a && f[(r + 1) % 3] == b && f[(r + 2) % 3] == c) return true;
        }
      }
      return false;
    };
    CHECK(has(fl.i, fl.j, fl.m));
    CHECK(has(fl.j, fl.i, fl.k));
  }
}

TEST_CASE("face area and angles") {
  SUBCASE("unit right triangle") {
    auto m = single_triangle({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    CHECK(face_area(m, 0) == doctest::Approx(0.5).epsilon(1e-15));
    auto a = face_angles(m, 0);
    CHECK(a.alpha == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(a.beta == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(a.gamma == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK_FALSE(a.degenerate);
  }
  SUBCASE("equilateral side 2") {
    auto m = single_triangle({0, 0, 0}, {2, 0, 0}, {1, std::sqrt(3.0), 0});
    CHECK(face_area(m, 0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    auto a = face_angles(m, 0);
    for (double t : {a.alpha, a.beta, a.gamma}) CHECK(t == doctest::Approx(pi / 3).epsilon(1e-14));
  }
  SUBCASE("collinear vertices") {
    auto m = single_triangle({0, 0, 0}, {1, 0, 0}, {2, 0, 0});
    CHECK(face_area(m, 0) == 0.0);
    auto a = face_angles(m, 0);
    CHECK(a.degenerate);
    // Clamped arccos: the middle corner opens to pi, the others close to 0.
    CHECK(a.beta == doctest::Approx(pi));
    CHECK(a.alpha == 0.0);
    CHECK(a.gamma == 0.0);
  }
  SUBCASE("point-collapsed triangle") {
    auto m = single_triangle({1, 1, 1}, {1, 1, 1}, {1, 1, 1});
    auto a = face_angles(m, 0);
    CHECK(a.degenerate);
    CHECK(a.alpha == 0.0);
  }
}

TEST_CASE("angles sum to pi on random non-degenerate faces") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int n = 0; n < 1000; ++n) {
    auto m = single_triangle({u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)});
    auto a = face_angles(m, 0);
    if (a.degenerate || face_area(m, 0) < 1e-6) continue;
    CHECK(std::abs(a.alpha + a.beta + a.gamma - pi) < 1e-9);
    ++checked;
  }
  CHECK(checked > 900);
}

TEST_CASE("area, volume, centroid") {
  SUBCASE("unit cube") {
    auto cube = shapes::unit_cube();
    CHECK(total_area(cube) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(signed_volume(cube) == doctest::Approx(1.0).epsilon(1e-14));
    Vec3 c = area_centroid(cube);
    CHECK((c - Vec3(0.5, 0.5, 0.5)).norm() < 1e-14);
  }
  SUBCASE("icosphere level 4 against the round sphere") {
    auto s = shapes::icosphere(4);
    CHECK(std::abs(total_area(s) - 4 * pi) / (4 * pi) < 0.01);
    CHECK(std::abs(signed_volume(s) - 4 * pi / 3) / (4 * pi / 3) < 0.01);
  }
  SUBCASE("inverted orientation negates volume only") {
    auto s = shapes::icosphere(2);
    auto flipped = s;
    for (auto& f : flipped.faces) std::swap(f[1], f[2]);
    CHECK(signed_volume(flipped) == doctest::Approx(-signed_volume(s)).epsilon(1e-14));
    CHECK(total_area(flipped) == doctest::Approx(total_area(s)).epsilon(1e-14));
  }
}

TEST_CASE("rigid motion invariance of area and translation invariance of volume") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const TriangleMesh& m : {shapes::icosphere(3), shapes::unit_cube(), shapes::subdivided_box(4, {1, 2, 3})}) {
    double a0 = total_area(m), v0 = signed_volume(m);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::Matrix3d R = oracle::random_rotation(rng);
      Eigen::RowVector3d t(u(rng), u(rng), u(rng));
      TriangleMesh moved = m.with_positions((m.vertices * R.transpose()).rowwise() + t);
      CHECK(std::abs(total_area(moved) - a0) / a0 < 1e-10);
      TriangleMesh shifted = m.with_positions(m.vertices.rowwise() + t);
      CHECK(std::abs(signed_volume(shifted) - v0) / std::abs(v0) < 1e-9);
    }
  }
}

#pragma once

#include "cmcf/mesh.hpp"

namespace cmcf::shapes {

// Regular icosahedron subdivided `levels` times with midpoints pushed to the
// sphere. Level k has 10*4^k + 2 vertices.
TriangleMesh icosphere(int levels, double radius = 1.0);

// Axis-aligned cube [0,1]^3, two triangles per side.
TriangleMesh unit_cube();

// Torus around the z axis, `rings` x `sides` quad grid split into triangles.
TriangleMesh torus(int rings, int sides, double major_radius = 2.0, double minor_radius = 0.5);

// Closed box [0,extent] triangulated on a regular grid;
// `n` subdivisions per side edge.
TriangleMesh subdivided_box(int n, Vec3 extent = Vec3(1.0, 1.0, 1.0));

} // namespace cmcf::shapes

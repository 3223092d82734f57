#pragma once

#include "saf/mesh.hpp"

namespace saf {

// Axis-aligned unit cube [0,1]^3, 12 triangles, outward winding.
TriMesh make_cube();

// Unit cube with each side split into an n x n grid (watertight; interior
// side vertices have axis-aligned normals).
TriMesh make_grid_cube(int n);

// Icosahedron subdivided `subdiv` times, vertices on the sphere of the given
// radius. Face counts: 20 * 4^subdiv.
TriMesh make_icosphere(int subdiv, double radius = 1.0);

// Torus around the z axis: nu segments around the main ring, nv around the
// tube.
TriMesh make_torus(int nu, int nv, double major_radius = 1.0, double minor_radius = 0.4);

}  // namespace saf

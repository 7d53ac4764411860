#pragma once

#include <string>

#include "derhamnet/mesh.hpp"

namespace derhamnet {

/// Unit square, each of the n x n subsquares split into 4 triangles around
/// its center. Every interior patch is convex.
Mesh square_crisscross(int n);

/// Unit square, each subsquare split into 2 triangles by the diagonal from
/// its lower-left corner.
Mesh square_diag(int n);

/// L-shaped domain ([0,2]^2 minus (1,2)^2), diagonal splits chosen so the
/// re-entrant vertex (1,1) has a non-convex patch. 6 n^2 triangles.
Mesh lshape(int n);

/// Unit cube, each of the n^3 subcubes split into the 6 Kuhn tetrahedra
/// sharing the subcube's main diagonal.
Mesh cube_kuhn(int n);

/// Fichera corner ([0,2]^3 minus [1,2]^3), Kuhn subdivision with subcube
/// edge 1/n. The vertex (1,1,1) has a non-convex patch.
Mesh fichera(int n);

/// Generator dispatch by name: square-crisscross, square-diag, lshape,
/// cube-kuhn, fichera.
Mesh generate_mesh(const std::string& domain, int n);

}  // namespace derhamnet

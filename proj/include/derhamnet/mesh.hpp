#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace derhamnet {

/// Identifies a k-subsimplex of a mesh by its sorted vertex-index tuple.
struct SubsimplexIndex {
  enum class Kind { Vertex, Edge, Face, Cell };

  Kind kind;
  std::vector<int> vertex_ids;  // sorted ascending, distinct

  friend bool operator==(const SubsimplexIndex&, const SubsimplexIndex&) = default;
  friend auto operator<=>(const SubsimplexIndex& a, const SubsimplexIndex& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    return a.vertex_ids <=> b.vertex_ids;
  }
};

std::string to_string(const SubsimplexIndex& s);

/// Geometric quantities of one cell. `barycentric` holds the d+1 affine
/// forms row-wise: row i = (A_i | b_i) with A_i x + b_i the barycentric
/// coordinate with respect to local vertex i (1 at vertex i, 0 at the others).
struct CellGeometry {
  double volume = 0.0;
  double diameter = 0.0;
  double inradius = 0.0;
  Eigen::MatrixXd barycentric;  // (d+1) x (d+1)
};

/// Vertex patch omega(p) together with the star points q_j and the
/// subdivision simplices used by the pure-ReLU hat construction.
/// sub_simplices[j][i] lists the d+1 vertex coordinates of the simplex
/// obtained from cell j by replacing its local vertex i (i >= 1) with q_j;
/// sub_simplices[j][0] is cell j itself. The enlarged simplex around cell j
/// has vertices {q_j, a_1, ..., a_d}.
struct Patch {
  int center = -1;
  std::vector<int> cells;
  std::vector<Eigen::VectorXd> star_points;
  std::vector<std::vector<std::vector<Eigen::VectorXd>>> sub_simplices;
};

/// Simplicial mesh: vertex coordinates plus cells as sorted vertex tuples.
/// Immutable after construction; all queries are safe for concurrent reads.
class Mesh {
 public:
  Mesh(int dim, std::vector<Eigen::VectorXd> vertices,
       std::vector<std::vector<int>> cells);

  static Mesh from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  int dim() const { return dim_; }
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  const Eigen::VectorXd& vertex(int v) const { return vertices_.at(v); }
  const std::vector<int>& cell(int c) const { return cells_.at(c); }

  /// Diagnostic regularity check. Empty result iff the mesh is a regular
  /// simplicial partition: nondegenerate cells, pairwise closure
  /// intersections equal to shared-subsimplex closures, disjoint interiors.
  std::vector<std::string> validate() const;

  /// Deduplicated (d-1)-subsimplices, sorted by vertex tuple.
  const std::vector<SubsimplexIndex>& faces() const { return faces_; }
  /// Deduplicated 1-subsimplices, sorted by vertex tuple.
  const std::vector<SubsimplexIndex>& edges() const { return edges_; }
  /// Faces with exactly one adjacent cell.
  std::vector<SubsimplexIndex> boundary_faces() const;

  /// Cells whose vertex set contains s. Throws on unknown subsimplex.
  const std::vector<int>& adjacency(const SubsimplexIndex& s) const;
  /// Cells adjacent to vertex p.
  const std::vector<int>& vertex_cells(int p) const;

  /// Throws on a degenerate cell (singular vertex matrix).
  const CellGeometry& cell_geometry(int c) const;

  /// max over cells of h_T / r_T.
  double shape_regularity() const;

  Patch build_patch(int p) const;
  bool patch_is_convex(int p) const;

  /// Position of face f in faces() (or edge in edges()). Throws if absent.
  int face_index(const SubsimplexIndex& f) const;
  int edge_index(const SubsimplexIndex& e) const;
  /// Cell index by sorted vertex tuple. Throws if absent.
  int cell_index(const std::vector<int>& sorted_ids) const;

 private:
  void build_topology();
  void build_geometry();

  int dim_;
  std::vector<Eigen::VectorXd> vertices_;
  std::vector<std::vector<int>> cells_;

  std::vector<SubsimplexIndex> faces_;
  std::vector<SubsimplexIndex> edges_;
  std::map<std::vector<int>, int> face_lookup_;
  std::map<std::vector<int>, int> edge_lookup_;
  std::map<std::vector<int>, int> cell_lookup_;
  std::vector<std::vector<int>> face_cells_;
  std::vector<std::vector<int>> edge_cells_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<std::vector<int>> cell_self_;
  std::vector<std::optional<CellGeometry>> geometry_;
};

/// Unit normal to a face. Interior faces: points from the lower-index
/// adjacent cell to the higher-index one. Boundary faces: points out of the
/// single adjacent cell.
Eigen::VectorXd face_normal(const Mesh& mesh, const SubsimplexIndex& face);

/// Orthonormal tangent frame t_1..t_{d-1} of a face: Gram-Schmidt applied to
/// the edge vectors (p_2-p_1, ..., p_d-p_1) in sorted vertex order.
std::vector<Eigen::VectorXd> face_tangents(const Mesh& mesh,
                                           const SubsimplexIndex& face);

/// Unit tangent of an edge, pointing from the lower vertex index to the
/// higher.
Eigen::VectorXd edge_tangent(const Mesh& mesh, const SubsimplexIndex& edge);

/// Barycenter of a subsimplex.
Eigen::VectorXd barycenter(const Mesh& mesh, const SubsimplexIndex& s);

/// (d-1)-measure of a face.
double face_measure(const Mesh& mesh, const SubsimplexIndex& face);

}  // namespace derhamnet

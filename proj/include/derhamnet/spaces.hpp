#pragma once

#include <memory>
#include <vector>

#include "derhamnet/shapes.hpp"

namespace derhamnet {

/// Degrees of freedom of a family on a mesh, sorted by vertex tuple:
/// vertices for S1, edges for N0, faces for RT0/CR0, cells for S0.
std::vector<SubsimplexIndex> dof_order(const Mesh& mesh, SpaceKind kind);

/// A single network emulating all shape functions of a family in parallel.
/// Output block i (of width 1, or d for vector families) realizes the shape
/// function of dof_order[i].
struct BasisNet {
  SpaceKind kind;
  std::shared_ptr<const Mesh> mesh;
  Network net;
  std::vector<SubsimplexIndex> dofs;
};

/// Output-layer specialization of a basis net: realizes sum_i v_i theta_i.
/// The hidden layers coincide with the basis net's.
struct FunctionNet {
  SpaceKind kind;
  std::shared_ptr<const Mesh> mesh;
  Eigen::VectorXd coefficients;
  Network net;
  std::vector<SubsimplexIndex> dofs;
};

BasisNet basis_net(std::shared_ptr<const Mesh> mesh, SpaceKind kind);
FunctionNet function_net(const BasisNet& basis, const Eigen::VectorXd& coeffs);
FunctionNet function_net(std::shared_ptr<const Mesh> mesh, SpaceKind kind,
                         const Eigen::VectorXd& coeffs);

/// Coefficient-space linear combination: coefficients v1 + lambda v2, hidden
/// layers unchanged.
FunctionNet net_linear_combine(const FunctionNet& f1, double lambda,
                               const FunctionNet& f2);

/// Affine chart of one planar boundary face of a 3D mesh: F(u) = origin + J u
/// maps the parameter polygon (triangulated by parameter_mesh) onto the face.
/// The chart frame is orthonormal (J^T J = I).
struct FaceChart {
  int face_id = 0;
  Eigen::Vector3d origin;
  Eigen::Matrix<double, 3, 2> jacobian;
  std::shared_ptr<const Mesh> parameter_mesh;
  std::vector<int> vertex_map;  // parameter vertex -> 3D vertex id
  std::vector<int> facet_faces; // parameter cell -> boundary face index in mesh.faces()
  bool per_facet_fallback = false;
};

/// Groups the boundary facets of a 3D mesh into planar faces (normal and
/// offset matched within 1e-9, edge-connected) and builds one chart each.
std::vector<FaceChart> face_charts(const Mesh& mesh);

/// Trace network on the chart's parameter domain. For scalar families the
/// net realizes v o F directly; for RT0/N0 the 2D function net built from
/// `coeffs` is pushed forward with the chart Jacobian applied to the output
/// layer, realizing the 3D-valued tangential field v o F.
FunctionNet trace_net(const FaceChart& chart, SpaceKind kind,
                      const Eigen::VectorXd& coeffs);

}  // namespace derhamnet

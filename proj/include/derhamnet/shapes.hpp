#pragma once

#include <string>

#include "derhamnet/calculus.hpp"
#include "derhamnet/mesh.hpp"
#include "derhamnet/network.hpp"

namespace derhamnet {

enum class SpaceKind { S1, S1ReluOnly, N0, RT0, S0, CR0 };

std::string to_string(SpaceKind k);
SpaceKind space_kind_from_string(const std::string& s);

enum class Exactness { AlmostEverywhere, Everywhere };

/// Network emulating one shape function. AlmostEverywhere nets are exact off
/// the mesh skeleton; Everywhere nets (pure ReLU) are exact on all of Omega.
struct ShapeNet {
  Network net;
  SubsimplexIndex dof;
  SpaceKind kind;
  Exactness exactness;
};

/// Frozen constants for the size bounds M <= C * (family formula). The
/// shapes in this library are deterministic, so each constant was measured
/// once on the generated mesh families and fixed with headroom; the audit
/// reports measured size, bound and slack.
namespace size_bounds {
inline constexpr long long kMinMaxPerInput = 16;   // M(min/max_d) <= 16 d
inline constexpr long long kS1 = 13;               // M <= 13 d^2 s(p)
inline constexpr long long kCR0 = 13;              // M <= 13 d^2 s(f)
inline constexpr long long kRT0 = 20;              // M <= 20 d^2 s(f)
inline constexpr long long kRT0Normal = 14;        // M <= 14 d^2 s(f)
inline constexpr long long kRT0Tangential = 13;    // M <= 13 d^2 s(f)
inline constexpr long long kRT0Star = 30;          // M <= 30 d^3
inline constexpr long long kN0 = 130;              // M <= 130 s(e)  (d = 3)
inline constexpr long long kCPwLConvex = 30;       // M <= 30 d s(p)
inline constexpr long long kCPwL = 40;             // M <= 40 d^2 s(p)
}  // namespace size_bounds

/// Indicator of cell T (depth 3).
ShapeNet s0_net(const Mesh& mesh, int cell);

/// Raviart-Thomas shape function of a face, assembled element by element
/// (depth 5). The sign convention follows the face normal: + on the cell the
/// normal points away from.
ShapeNet rt0_net(const Mesh& mesh, const SubsimplexIndex& face);

/// Normal component of the RT shape function, exact a.e. and on the face
/// itself (min-based construction, depth 5).
ShapeNet rt0_normal_net(const Mesh& mesh, const SubsimplexIndex& face);
/// Tangential component along face tangent t_j, 1 <= j <= d-1 (depth 5).
ShapeNet rt0_tangential_net(const Mesh& mesh, const SubsimplexIndex& face, int j);
/// Recombination of normal and tangential parts (depth 6).
ShapeNet rt0_star_net(const Mesh& mesh, const SubsimplexIndex& face);

/// Nedelec edge shape function, d = 3 (depth 5).
ShapeNet n0_net(const Mesh& mesh, const SubsimplexIndex& edge);
/// Nedelec shape function for d = 2: 90-degree rotation of the RT net.
ShapeNet n0_net_2d(const Mesh& mesh, const SubsimplexIndex& face);

/// Hat function of vertex p, BiSU-based element assembly (depth 5).
ShapeNet s1_net_bisu(const Mesh& mesh, int p);

/// Crouzeix-Raviart face shape function (depth 5).
ShapeNet cr0_net(const Mesh& mesh, const SubsimplexIndex& face);

/// Pure-ReLU hat on a convex patch: max{0, min over adjacent-cell forms}.
ShapeNet cpwl_net_convex(const Mesh& mesh, int p);

/// Pure-ReLU hat on an arbitrary patch: max over the per-cell auxiliary hats
/// supported on the enlarged star simplices.
ShapeNet cpwl_net(const Mesh& mesh, int p);

/// Strict halfspace description of an open cell (its d+1 barycentric forms).
HalfspaceSystem cell_halfspaces(const Mesh& mesh, int cell);
/// Description of the relative interior of a face: one equality plus d
/// strict inequalities, taken from an adjacent cell's barycentric forms.
HalfspaceSystem face_halfspaces(const Mesh& mesh, const SubsimplexIndex& face);

}  // namespace derhamnet

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "derhamnet/network.hpp"

namespace derhamnet {

/// Region described by affine equalities A_i x + b_i = 0 and strict
/// inequalities A_i x + b_i > 0.
struct HalfspaceSystem {
  int dim = 0;
  std::vector<std::pair<Eigen::RowVectorXd, double>> equalities;
  std::vector<std::pair<Eigen::RowVectorXd, double>> strict_inequalities;
};

/// Depth-1 network realizing x -> A x + b.
Network affine_net(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Scales all weights and biases of the output layer by c.
Network scale_output(const Network& net, double c);

/// Realizes M * R(net) by applying the linear map to the output layer; the
/// depth does not change.
Network compose_output(const Network& net, const Eigen::MatrixXd& M);

/// Realizes (R(net_1), ..., R(net_k)); requires equal input dims and depths.
/// First-layer matrices are stacked, later layers block-diagonal; the size is
/// exactly the sum of the sizes.
Network parallelize(std::span<const Network> nets);

/// Realizes sum of realizations; requires equal input dims, output dims and
/// depths. Last layers are concatenated horizontally with biases added.
Network sum_nets(std::span<const Network> nets);

/// Sparse concatenation: realizes R(outer) o R(inner) with a +/- ReLU split
/// at the interface. Depth adds; size at most 2 M(outer) + 2 M(inner).
Network concat(const Network& outer, const Network& inner);

/// ReLU identity network on R^d of depth L, size at most 2 d L.
Network identity_net(int d, int L);

/// Exact max / min of d inputs: a binary reduction tree of the explicit
/// 2-input gadget; an unpaired value passes through a 2-unit identity
/// channel per level. Depth at most 2 + ceil(log2 d), size O(d).
Network max_net(int d);
Network min_net(int d);

/// On inputs (x, y) with x in [-kappa,kappa]^d and y in {0,1}, realizes
/// (x_1 y, ..., x_d y). Depth 2, size exactly 12 d.
Network times_step_net(int d, double kappa);

/// Realizes the indicator of the region described by `sys`, exactly on all
/// of R^d. Depth 3; size at most (d+2)(N+n) + 2.
Network indicator_net(const HalfspaceSystem& sys);

/// One affine piece of a (possibly discontinuous) piecewise linear function:
/// u(x) = A x + b on the region, with the region's vertices supplied for the
/// automatic bound computation.
struct PwlPiece {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  HalfspaceSystem region;
  std::vector<Eigen::VectorXd> region_vertices;
};

/// Largest |A x + b|_inf over all pieces' region vertices; since the maps
/// are affine this is the exact sup over the regions.
double pwl_auto_kappa(std::span<const PwlPiece> pieces);

/// Network of depth 5 realizing the piecewise linear function given by
/// `pieces` on the union of the (disjoint) regions and 0 elsewhere.
/// If kappa is given it must dominate pwl_auto_kappa(pieces).
Network pwl_net(std::span<const PwlPiece> pieces,
                std::optional<double> kappa = std::nullopt);

}  // namespace derhamnet

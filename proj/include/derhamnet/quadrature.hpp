#pragma once

#include <vector>

#include <Eigen/Dense>

#include "derhamnet/mesh.hpp"

namespace derhamnet {

/// Quadrature nodes and weights on one cell, exact for polynomials of total
/// degree <= 4 (conical Gauss product rule: positive weights, all nodes
/// strictly interior).
struct CellQuadrature {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
};

CellQuadrature cell_quadrature(const Mesh& mesh, int cell);

}  // namespace derhamnet

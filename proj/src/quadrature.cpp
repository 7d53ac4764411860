#include "derhamnet/quadrature.hpp"

#include <array>
#include <stdexcept>

namespace derhamnet {

namespace {

// 4-point Gauss-Legendre rule on [0,1].
constexpr std::array<double, 4> kNodes = {
    0.5 - 0.8611363115940526 / 2.0, 0.5 - 0.33998104358485626 / 2.0,
    0.5 + 0.33998104358485626 / 2.0, 0.5 + 0.8611363115940526 / 2.0};
constexpr std::array<double, 4> kWeights = {
    0.34785484513745385 / 2.0, 0.6521451548625461 / 2.0,
    0.6521451548625461 / 2.0, 0.34785484513745385 / 2.0};

// Reference-simplex rule via the collapsed coordinate map.
void reference_rule(int d, std::vector<Eigen::VectorXd>& pts, std::vector<double>& wts) {
  if (d == 1) {
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd x(1);
      x << kNodes[i];
      pts.push_back(std::move(x));
      wts.push_back(kWeights[i]);
    }
  } else if (d == 2) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double xi = kNodes[i], eta = kNodes[j];
        Eigen::VectorXd x(2);
        x << xi, eta * (1.0 - xi);
        pts.push_back(std::move(x));
        wts.push_back(kWeights[i] * kWeights[j] * (1.0 - xi));
      }
    }
  } else if (d == 3) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < 4; ++k) {
          const double xi = kNodes[i], eta = kNodes[j], zeta = kNodes[k];
          Eigen::VectorXd x(3);
          x << xi, eta * (1.0 - xi), zeta * (1.0 - xi) * (1.0 - eta);
          pts.push_back(std::move(x));
          wts.push_back(kWeights[i] * kWeights[j] * kWeights[k] *
                        (1.0 - xi) * (1.0 - xi) * (1.0 - eta));
        }
      }
    }
  } else {
    throw std::invalid_argument("cell_quadrature: supported for d in {1,2,3}");
  }
}

}  // namespace

CellQuadrature cell_quadrature(const Mesh& mesh, int cell) {
  const int d = mesh.dim();
  std::vector<Eigen::VectorXd> ref_pts;
  std::vector<double> ref_wts;
  reference_rule(d, ref_pts, ref_wts);

  const auto& ids = mesh.cell(cell);
  const Eigen::VectorXd a0 = mesh.vertex(ids[0]);
  Eigen::MatrixXd B(d, d);
  for (int i = 0; i < d; ++i) B.col(i) = mesh.vertex(ids[i + 1]) - a0;
  const double jac = std::abs(B.determinant());

  CellQuadrature q;
  for (std::size_t i = 0; i < ref_pts.size(); ++i) {
    q.points.push_back(a0 + B * ref_pts[i]);
    q.weights.push_back(ref_wts[i] * jac);
  }
  return q;
}

}  // namespace derhamnet

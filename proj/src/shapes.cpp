#include "derhamnet/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derhamnet {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::logic_error("shapes: " + msg);
}

void check_depth(const Network& net, int expected, const char* what) {
  require(net.depth() == expected,
          std::string(what) + ": depth must be " + std::to_string(expected));
}

void check_size(const Network& net, long long bound, const char* what) {
  require(net.metrics().size <= bound, std::string(what) + ": size bound violated");
}

std::vector<Eigen::VectorXd> cell_points(const Mesh& mesh, int cell) {
  std::vector<Eigen::VectorXd> pts;
  for (int id : mesh.cell(cell)) pts.push_back(mesh.vertex(id));
  return pts;
}

// Local position of the vertex of `cell` that is not part of `sub`.
int opposite_local(const Mesh& mesh, int cell, const std::vector<int>& sub) {
  const auto& ids = mesh.cell(cell);
  int found = -1;
  for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
    if (!std::binary_search(sub.begin(), sub.end(), ids[i])) {
      if (found >= 0) throw std::invalid_argument("shapes: subsimplex not of codimension 1");
      found = i;
    }
  }
  if (found < 0) throw std::invalid_argument("shapes: subsimplex not part of cell");
  return found;
}

int local_index(const Mesh& mesh, int cell, int vertex) {
  const auto& ids = mesh.cell(cell);
  const auto it = std::find(ids.begin(), ids.end(), vertex);
  if (it == ids.end()) throw std::invalid_argument("shapes: vertex not part of cell");
  return static_cast<int>(it - ids.begin());
}

// Affine form that is 1 on the listed simplex's vertex `one_at` and 0 at the
// other vertices; partial-pivot solve, singularity reported as degeneracy.
std::pair<Eigen::RowVectorXd, double> interpolation_form(
    const std::vector<Eigen::VectorXd>& pts, int one_at) {
  const int d = static_cast<int>(pts[0].size());
  Eigen::MatrixXd vmat(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) {
    vmat.block(0, j, d, 1) = pts[j];
    vmat(d, j) = 1.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vmat.transpose());
  if (lu.rcond() < 1e-14)
    throw std::runtime_error("shapes: degenerate simplex in affine solve");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
  rhs[one_at] = 1.0;
  const Eigen::VectorXd sol = lu.solve(rhs);
  return {sol.head(d).transpose(), sol[d]};
}

Network relu_head() {
  Layer l1(1, 1, Activation::ReLU);
  l1.add(0, 0, 1.0);
  Layer l2(1, 1);
  l2.add(0, 0, 1.0);
  return Network(1, {std::move(l1), std::move(l2)});
}

struct FaceContext {
  std::vector<int> cells;            // adjacent cells, ascending
  std::vector<Eigen::VectorXd> opp;  // opposite vertex per cell
  std::vector<double> coef;          // (-1)^{i-1} |f| / (d |T_i|)
};

FaceContext face_context(const Mesh& mesh, const SubsimplexIndex& face) {
  FaceContext ctx;
  ctx.cells = mesh.adjacency(face);
  if (ctx.cells.empty() || ctx.cells.size() > 2)
    throw std::invalid_argument("shapes: face must have one or two adjacent cells");
  const double area = face_measure(mesh, face);
  for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
    const int c = ctx.cells[i];
    const int opp = opposite_local(mesh, c, face.vertex_ids);
    ctx.opp.push_back(mesh.vertex(mesh.cell(c)[opp]));
    const double sign = i == 0 ? 1.0 : -1.0;
    ctx.coef.push_back(sign * area / (mesh.dim() * mesh.cell_geometry(c).volume));
  }
  return ctx;
}

}  // namespace

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::S1: return "s1";
    case SpaceKind::S1ReluOnly: return "s1-relu";
    case SpaceKind::N0: return "n0";
    case SpaceKind::RT0: return "rt0";
    case SpaceKind::S0: return "s0";
    case SpaceKind::CR0: return "cr0";
  }
  throw std::logic_error("bad space kind");
}

SpaceKind space_kind_from_string(const std::string& s) {
  if (s == "s1") return SpaceKind::S1;
  if (s == "s1-relu") return SpaceKind::S1ReluOnly;
  if (s == "n0") return SpaceKind::N0;
  if (s == "rt0") return SpaceKind::RT0;
  if (s == "s0") return SpaceKind::S0;
  if (s == "cr0") return SpaceKind::CR0;
  throw std::invalid_argument("unknown space kind: " + s);
}

HalfspaceSystem cell_halfspaces(const Mesh& mesh, int cell) {
  const auto& g = mesh.cell_geometry(cell);
  HalfspaceSystem sys;
  sys.dim = mesh.dim();
  for (int i = 0; i <= mesh.dim(); ++i)
    sys.strict_inequalities.emplace_back(g.barycentric.row(i).head(mesh.dim()),
                                         g.barycentric(i, mesh.dim()));
  return sys;
}

HalfspaceSystem face_halfspaces(const Mesh& mesh, const SubsimplexIndex& face) {
  const int c = mesh.adjacency(face).front();
  const auto& g = mesh.cell_geometry(c);
  const int opp = opposite_local(mesh, c, face.vertex_ids);
  HalfspaceSystem sys;
  sys.dim = mesh.dim();
  for (int i = 0; i <= mesh.dim(); ++i) {
    const Eigen::RowVectorXd A = g.barycentric.row(i).head(mesh.dim());
    const double b = g.barycentric(i, mesh.dim());
    if (i == opp)
      sys.equalities.emplace_back(A, b);
    else
      sys.strict_inequalities.emplace_back(A, b);
  }
  return sys;
}

ShapeNet s0_net(const Mesh& mesh, int cell) {
  Network net = indicator_net(cell_halfspaces(mesh, cell));
  const int d = mesh.dim();
  check_depth(net, 3, "s0_net");
  check_size(net, static_cast<long long>(d + 2) * (d + 1) + 2, "s0_net");
  return {std::move(net),
          {SubsimplexIndex::Kind::Cell, mesh.cell(cell)},
          SpaceKind::S0,
          Exactness::AlmostEverywhere};
}

ShapeNet rt0_net(const Mesh& mesh, const SubsimplexIndex& face) {
  const int d = mesh.dim();
  const FaceContext ctx = face_context(mesh, face);
  std::vector<PwlPiece> pieces;
  for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
    PwlPiece piece;
    piece.A = ctx.coef[i] * Eigen::MatrixXd::Identity(d, d);
    piece.b = -ctx.coef[i] * ctx.opp[i];
    piece.region = cell_halfspaces(mesh, ctx.cells[i]);
    piece.region_vertices = cell_points(mesh, ctx.cells[i]);
    pieces.push_back(std::move(piece));
  }
  Network net = pwl_net(pieces);
  check_depth(net, 5, "rt0_net");
  check_size(net, size_bounds::kRT0 * d * d * static_cast<long long>(ctx.cells.size()),
             "rt0_net");
  return {std::move(net), face, SpaceKind::RT0, Exactness::AlmostEverywhere};
}

ShapeNet rt0_normal_net(const Mesh& mesh, const SubsimplexIndex& face) {
  const int d = mesh.dim();
  const FaceContext ctx = face_context(mesh, face);
  const int s = static_cast<int>(ctx.cells.size());

  // Affine forms equal to the normal trace: 1 on the face, 0 at the opposite
  // vertex, i.e. 1 - (barycentric form of the opposite vertex).
  Eigen::MatrixXd A(s, d);
  Eigen::VectorXd b(s);
  for (int i = 0; i < s; ++i) {
    const int c = ctx.cells[i];
    const auto& g = mesh.cell_geometry(c);
    const int opp = opposite_local(mesh, c, face.vertex_ids);
    A.row(i) = -g.barycentric.row(opp).head(d);
    b[i] = 1.0 - g.barycentric(opp, d);
  }
  Network min_path = concat(min_net(s), affine_net(A, b));

  std::vector<Network> indicators;
  for (int c : ctx.cells) indicators.push_back(indicator_net(cell_halfspaces(mesh, c)));
  indicators.push_back(indicator_net(face_halfspaces(mesh, face)));
  Network support = sum_nets(indicators);

  std::vector<Network> branches;
  branches.push_back(std::move(min_path));
  branches.push_back(std::move(support));
  Network net = concat(times_step_net(1, 1.0), parallelize(branches));
  check_depth(net, 5, "rt0_normal_net");
  check_size(net, size_bounds::kRT0Normal * d * d * s, "rt0_normal_net");
  return {std::move(net), face, SpaceKind::RT0, Exactness::AlmostEverywhere};
}

ShapeNet rt0_tangential_net(const Mesh& mesh, const SubsimplexIndex& face, int j) {
  const int d = mesh.dim();
  if (j < 1 || j > d - 1)
    throw std::invalid_argument("rt0_tangential_net: tangent index out of range");
  const Eigen::VectorXd t = face_tangents(mesh, face)[j - 1];
  const FaceContext ctx = face_context(mesh, face);
  std::vector<PwlPiece> pieces;
  for (std::size_t i = 0; i < ctx.cells.size(); ++i) {
    PwlPiece piece;
    piece.A = ctx.coef[i] * t.transpose();
    piece.b = Eigen::VectorXd::Constant(1, -ctx.coef[i] * t.dot(ctx.opp[i]));
    piece.region = cell_halfspaces(mesh, ctx.cells[i]);
    piece.region_vertices = cell_points(mesh, ctx.cells[i]);
    pieces.push_back(std::move(piece));
  }
  Network net = pwl_net(pieces);
  check_depth(net, 5, "rt0_tangential_net");
  check_size(net,
             size_bounds::kRT0Tangential * d * d * static_cast<long long>(ctx.cells.size()),
             "rt0_tangential_net");
  return {std::move(net), face, SpaceKind::RT0, Exactness::AlmostEverywhere};
}

ShapeNet rt0_star_net(const Mesh& mesh, const SubsimplexIndex& face) {
  const int d = mesh.dim();
  const Eigen::VectorXd n = face_normal(mesh, face);
  const auto tangents = face_tangents(mesh, face);

  std::vector<Network> parts;
  parts.push_back(
      concat(affine_net(n, Eigen::VectorXd::Zero(d)), rt0_normal_net(mesh, face).net));
  for (int j = 1; j <= d - 1; ++j)
    parts.push_back(concat(affine_net(tangents[j - 1], Eigen::VectorXd::Zero(d)),
                           rt0_tangential_net(mesh, face, j).net));
  Network net = sum_nets(parts);
  check_depth(net, 6, "rt0_star_net");
  check_size(net, size_bounds::kRT0Star * d * d * d, "rt0_star_net");
  return {std::move(net), face, SpaceKind::RT0, Exactness::AlmostEverywhere};
}

ShapeNet n0_net(const Mesh& mesh, const SubsimplexIndex& edge) {
  if (mesh.dim() != 3) throw std::invalid_argument("n0_net: requires d = 3");
  const auto& cells = mesh.adjacency(edge);
  if (cells.empty()) throw std::invalid_argument("n0_net: edge not in mesh");

  const Eigen::Vector3d t_e = edge_tangent(mesh, edge);
  const Eigen::Vector3d m_e = barycenter(mesh, edge);

  std::vector<PwlPiece> pieces;
  for (int c : cells) {
    std::vector<int> other;
    for (int id : mesh.cell(c))
      if (!std::binary_search(edge.vertex_ids.begin(), edge.vertex_ids.end(), id))
        other.push_back(id);
    if (other.size() != 2) throw std::invalid_argument("n0_net: edge not part of cell");

    Eigen::Vector3d t_opp = mesh.vertex(other[1]) - mesh.vertex(other[0]);
    t_opp.normalize();
    const Eigen::Vector3d m_opp =
        0.5 * (mesh.vertex(other[0]) + mesh.vertex(other[1]));

    double denom = t_e.dot((m_e - m_opp).cross(t_opp));
    if (denom < 0.0) {
      t_opp = -t_opp;
      denom = -denom;
    }
    const double scale = mesh.cell_geometry(c).diameter;
    if (std::abs(denom) < 1e-14 * scale)
      throw std::runtime_error("n0_net: degenerate tangent orientation");

    // x -> (x - m_opp) x t_opp / denom as an affine map.
    Eigen::Matrix3d cross;
    cross << 0.0, t_opp.z(), -t_opp.y(),
        -t_opp.z(), 0.0, t_opp.x(),
        t_opp.y(), -t_opp.x(), 0.0;
    PwlPiece piece;
    piece.A = cross / denom;
    piece.b = -cross * m_opp / denom;
    piece.region = cell_halfspaces(mesh, c);
    piece.region_vertices = cell_points(mesh, c);
    pieces.push_back(std::move(piece));
  }
  Network net = pwl_net(pieces);
  check_depth(net, 5, "n0_net");
  check_size(net, size_bounds::kN0 * static_cast<long long>(cells.size()), "n0_net");
  return {std::move(net), edge, SpaceKind::N0, Exactness::AlmostEverywhere};
}

ShapeNet n0_net_2d(const Mesh& mesh, const SubsimplexIndex& face) {
  if (mesh.dim() != 2) throw std::invalid_argument("n0_net_2d: requires d = 2");
  ShapeNet base = rt0_net(mesh, face);
  Eigen::Matrix2d rot;
  rot << 0.0, -1.0, 1.0, 0.0;  // (v1, v2) -> (-v2, v1)
  Network net = compose_output(base.net, rot);
  check_depth(net, 5, "n0_net_2d");
  return {std::move(net), face, SpaceKind::N0, Exactness::AlmostEverywhere};
}

ShapeNet s1_net_bisu(const Mesh& mesh, int p) {
  const int d = mesh.dim();
  const auto& cells = mesh.vertex_cells(p);
  if (cells.empty()) throw std::invalid_argument("s1_net_bisu: isolated vertex");
  std::vector<PwlPiece> pieces;
  for (int c : cells) {
    const auto& g = mesh.cell_geometry(c);
    const int local = local_index(mesh, c, p);
    PwlPiece piece;
    piece.A = g.barycentric.row(local).head(d);
    piece.b = Eigen::VectorXd::Constant(1, g.barycentric(local, d));
    piece.region = cell_halfspaces(mesh, c);
    piece.region_vertices = cell_points(mesh, c);
    pieces.push_back(std::move(piece));
  }
  Network net = pwl_net(pieces);
  check_depth(net, 5, "s1_net_bisu");
  check_size(net, size_bounds::kS1 * d * d * static_cast<long long>(cells.size()),
             "s1_net_bisu");
  return {std::move(net),
          {SubsimplexIndex::Kind::Vertex, {p}},
          SpaceKind::S1,
          Exactness::AlmostEverywhere};
}

ShapeNet cr0_net(const Mesh& mesh, const SubsimplexIndex& face) {
  const int d = mesh.dim();
  const auto& cells = mesh.adjacency(face);
  if (cells.empty() || cells.size() > 2)
    throw std::invalid_argument("cr0_net: face must have one or two adjacent cells");
  std::vector<PwlPiece> pieces;
  for (int c : cells) {
    const auto& g = mesh.cell_geometry(c);
    const int opp = opposite_local(mesh, c, face.vertex_ids);
    // 1 - d * (barycentric form of the opposite vertex).
    PwlPiece piece;
    piece.A = -static_cast<double>(d) * g.barycentric.row(opp).head(d);
    piece.b = Eigen::VectorXd::Constant(1, 1.0 - d * g.barycentric(opp, d));
    piece.region = cell_halfspaces(mesh, c);
    piece.region_vertices = cell_points(mesh, c);
    pieces.push_back(std::move(piece));
  }
  // The shape ranges over [1-d, 1] on its support, so d-1 bounds the pieces.
  Network net = pwl_net(pieces, static_cast<double>(std::max(d - 1, 1)));
  check_depth(net, 5, "cr0_net");
  check_size(net, size_bounds::kCR0 * d * d * static_cast<long long>(cells.size()),
             "cr0_net");
  return {std::move(net), face, SpaceKind::CR0, Exactness::AlmostEverywhere};
}

namespace {

// max{0, min over forms} as a pure-ReLU net; forms given row-wise.
Network hat_from_forms(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int s = static_cast<int>(A.rows());
  return concat(relu_head(), concat(min_net(s), affine_net(A, b)));
}

}  // namespace

ShapeNet cpwl_net_convex(const Mesh& mesh, int p) {
  if (!mesh.patch_is_convex(p))
    throw std::invalid_argument("cpwl_net_convex: patch of vertex is not convex");
  const int d = mesh.dim();
  const auto& cells = mesh.vertex_cells(p);
  const int s = static_cast<int>(cells.size());
  Eigen::MatrixXd A(s, d);
  Eigen::VectorXd b(s);
  for (int i = 0; i < s; ++i) {
    const auto& g = mesh.cell_geometry(cells[i]);
    const int local = local_index(mesh, cells[i], p);
    A.row(i) = g.barycentric.row(local).head(d);
    b[i] = g.barycentric(local, d);
  }
  Network net = hat_from_forms(A, b);
  require(net.depth() <= 5 + static_cast<int>(std::ceil(std::log2(std::max(s, 2)))),
          "cpwl_net_convex: depth bound violated");
  check_size(net, size_bounds::kCPwLConvex * d * s, "cpwl_net_convex");
  return {std::move(net),
          {SubsimplexIndex::Kind::Vertex, {p}},
          SpaceKind::S1ReluOnly,
          Exactness::Everywhere};
}

ShapeNet cpwl_net(const Mesh& mesh, int p) {
  const int d = mesh.dim();
  const Patch patch = mesh.build_patch(p);
  const int s = static_cast<int>(patch.cells.size());

  std::vector<Network> aux;
  for (int j = 0; j < s; ++j) {
    // Forms of the auxiliary hat: one per subdivision simplex, 1 at p and 0
    // at the other vertices. p is vertex 0 of the cell copy and vertex 1 of
    // the star-point simplices.
    Eigen::MatrixXd A(d + 1, d);
    Eigen::VectorXd b(d + 1);
    for (int i = 0; i <= d; ++i) {
      const auto [row, offset] =
          interpolation_form(patch.sub_simplices[j][i], i == 0 ? 0 : 1);
      A.row(i) = row;
      b[i] = offset;
    }
    aux.push_back(hat_from_forms(A, b));
  }
  Network net = concat(max_net(s), parallelize(aux));
  const int ls = static_cast<int>(std::ceil(std::log2(std::max(s, 2))));
  const int ld = static_cast<int>(std::ceil(std::log2(d + 1)));
  require(net.depth() <= 7 + ls + ld, "cpwl_net: depth bound violated");
  check_size(net, size_bounds::kCPwL * d * d * s, "cpwl_net");
  return {std::move(net),
          {SubsimplexIndex::Kind::Vertex, {p}},
          SpaceKind::S1ReluOnly,
          Exactness::Everywhere};
}

}  // namespace derhamnet

#include "derhamnet/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace derhamnet {

namespace {

std::string tuple_string(const std::vector<int>& ids) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) os << ",";
    os << ids[i];
  }
  os << ")";
  return os.str();
}

// Signed d! * volume of the simplex spanned by pts (d+1 points in R^d).
double scaled_signed_volume(const std::vector<Eigen::VectorXd>& pts) {
  const int d = static_cast<int>(pts.size()) - 1;
  Eigen::MatrixXd edges(d, d);
  for (int i = 0; i < d; ++i) edges.col(i) = pts[i + 1] - pts[0];
  return edges.determinant();
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// k-measure of a k-simplex embedded in R^d via the Gram determinant.
double simplex_measure(const std::vector<Eigen::VectorXd>& pts) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k == 0) return 1.0;
  const int d = static_cast<int>(pts[0].size());
  Eigen::MatrixXd edges(d, k);
  for (int i = 0; i < k; ++i) edges.col(i) = pts[i + 1] - pts[0];
  const Eigen::MatrixXd gram = edges.transpose() * edges;
  const double det = gram.determinant();
  return det <= 0.0 ? 0.0 : std::sqrt(det) / factorial(k);
}

}  // namespace

std::string to_string(const SubsimplexIndex& s) {
  const char* kind = nullptr;
  switch (s.kind) {
    case SubsimplexIndex::Kind::Vertex: kind = "vertex"; break;
    case SubsimplexIndex::Kind::Edge: kind = "edge"; break;
    case SubsimplexIndex::Kind::Face: kind = "face"; break;
    case SubsimplexIndex::Kind::Cell: kind = "cell"; break;
  }
  return std::string(kind) + tuple_string(s.vertex_ids);
}

Mesh::Mesh(int dim, std::vector<Eigen::VectorXd> vertices,
           std::vector<std::vector<int>> cells)
    : dim_(dim), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ < 1) throw std::invalid_argument("mesh: dim must be >= 1");
  for (const auto& v : vertices_) {
    if (v.size() != dim_)
      throw std::invalid_argument("mesh: vertex coordinate size != dim");
  }
  for (auto& c : cells_) {
    if (static_cast<int>(c.size()) != dim_ + 1)
      throw std::invalid_argument("mesh: cell must have d+1 vertex indices");
    for (int id : c) {
      if (id < 0 || id >= num_vertices())
        throw std::invalid_argument("mesh: vertex index out of range");
    }
    std::sort(c.begin(), c.end());
  }
  build_topology();
  build_geometry();
}

Mesh Mesh::from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Eigen::VectorXd> vertices;
  for (const auto& vj : j.at("vertices")) {
    Eigen::VectorXd v(vj.size());
    for (std::size_t i = 0; i < vj.size(); ++i) v[static_cast<int>(i)] = vj[i].get<double>();
    vertices.push_back(std::move(v));
  }
  std::vector<std::vector<int>> cells;
  for (const auto& cj : j.at("cells")) cells.push_back(cj.get<std::vector<int>>());
  return Mesh(dim, std::move(vertices), std::move(cells));
}

nlohmann::json Mesh::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  auto verts = nlohmann::json::array();
  for (const auto& v : vertices_) {
    auto row = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) row.push_back(v[i]);
    verts.push_back(std::move(row));
  }
  j["vertices"] = std::move(verts);
  j["cells"] = cells_;
  return j;
}

void Mesh::build_topology() {
  vertex_cells_.assign(vertices_.size(), {});
  cell_self_.resize(cells_.size());
  std::map<std::vector<int>, std::vector<int>> face_map;
  std::map<std::vector<int>, std::vector<int>> edge_map;
  for (int c = 0; c < num_cells(); ++c) {
    const auto& cell = cells_[c];
    cell_self_[c] = {c};
    cell_lookup_.emplace(cell, c);  // duplicates keep the first; validate() reports them
    for (int id : cell) vertex_cells_[id].push_back(c);
    // (d-1)-subsimplices: drop one vertex.
    for (int drop = 0; drop <= dim_; ++drop) {
      std::vector<int> f;
      f.reserve(dim_);
      for (int i = 0; i <= dim_; ++i)
        if (i != drop) f.push_back(cell[i]);
      auto& adj = face_map[f];
      if (adj.empty() || adj.back() != c) adj.push_back(c);
    }
    // 1-subsimplices.
    for (int i = 0; i <= dim_; ++i) {
      for (int j = i + 1; j <= dim_; ++j) {
        auto& adj = edge_map[{cell[i], cell[j]}];
        if (adj.empty() || adj.back() != c) adj.push_back(c);
      }
    }
  }
  for (auto& [ids, adj] : face_map) {
    face_lookup_[ids] = static_cast<int>(faces_.size());
    faces_.push_back({SubsimplexIndex::Kind::Face, ids});
    face_cells_.push_back(std::move(adj));
  }
  for (auto& [ids, adj] : edge_map) {
    edge_lookup_[ids] = static_cast<int>(edges_.size());
    edges_.push_back({SubsimplexIndex::Kind::Edge, ids});
    edge_cells_.push_back(std::move(adj));
  }
}

void Mesh::build_geometry() {
  geometry_.resize(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    const auto& cell = cells_[c];
    std::vector<Eigen::VectorXd> pts;
    for (int id : cell) pts.push_back(vertices_[id]);

    double diam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        diam = std::max(diam, (pts[i] - pts[j]).norm());

    const double scaled = std::abs(scaled_signed_volume(pts));
    const double degeneracy_floor = 1e-12 * std::pow(std::max(diam, 1e-300), dim_);
    if (scaled <= degeneracy_floor) continue;  // left unset; reported by validate()

    CellGeometry g;
    g.volume = scaled / factorial(dim_);
    g.diameter = diam;

    double surface = 0.0;
    for (int drop = 0; drop <= dim_; ++drop) {
      std::vector<Eigen::VectorXd> facet;
      for (int i = 0; i <= dim_; ++i)
        if (i != drop) facet.push_back(pts[i]);
      surface += simplex_measure(facet);
    }
    g.inradius = dim_ * g.volume / surface;

    // Barycentric affine forms: rows of the inverse of [coords; 1].
    Eigen::MatrixXd vmat(dim_ + 1, dim_ + 1);
    for (int j = 0; j <= dim_; ++j) {
      vmat.block(0, j, dim_, 1) = pts[j];
      vmat(dim_, j) = 1.0;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(vmat);
    g.barycentric = lu.inverse();
    geometry_[c] = std::move(g);
  }
}

const CellGeometry& Mesh::cell_geometry(int c) const {
  if (c < 0 || c >= num_cells()) throw std::out_of_range("mesh: cell index");
  if (!geometry_[c])
    throw std::runtime_error("mesh: degenerate cell " + std::to_string(c));
  return *geometry_[c];
}

std::vector<SubsimplexIndex> Mesh::boundary_faces() const {
  std::vector<SubsimplexIndex> out;
  for (std::size_t i = 0; i < faces_.size(); ++i)
    if (face_cells_[i].size() == 1) out.push_back(faces_[i]);
  return out;
}

const std::vector<int>& Mesh::adjacency(const SubsimplexIndex& s) const {
  switch (s.kind) {
    case SubsimplexIndex::Kind::Vertex:
      return vertex_cells(s.vertex_ids.at(0));
    case SubsimplexIndex::Kind::Edge: {
      auto it = edge_lookup_.find(s.vertex_ids);
      if (it == edge_lookup_.end())
        throw std::invalid_argument("mesh: unknown edge " + to_string(s));
      return edge_cells_[it->second];
    }
    case SubsimplexIndex::Kind::Face: {
      auto it = face_lookup_.find(s.vertex_ids);
      if (it == face_lookup_.end())
        throw std::invalid_argument("mesh: unknown face " + to_string(s));
      return face_cells_[it->second];
    }
    case SubsimplexIndex::Kind::Cell: {
      auto it = cell_lookup_.find(s.vertex_ids);
      if (it == cell_lookup_.end())
        throw std::invalid_argument("mesh: unknown cell " + to_string(s));
      return cell_self_[it->second];
    }
  }
  throw std::invalid_argument("mesh: bad subsimplex kind");
}

const std::vector<int>& Mesh::vertex_cells(int p) const {
  if (p < 0 || p >= num_vertices())
    throw std::invalid_argument("mesh: vertex index out of range");
  return vertex_cells_[p];
}

int Mesh::face_index(const SubsimplexIndex& f) const {
  auto it = face_lookup_.find(f.vertex_ids);
  if (it == face_lookup_.end())
    throw std::invalid_argument("mesh: unknown face " + to_string(f));
  return it->second;
}

int Mesh::edge_index(const SubsimplexIndex& e) const {
  auto it = edge_lookup_.find(e.vertex_ids);
  if (it == edge_lookup_.end())
    throw std::invalid_argument("mesh: unknown edge " + to_string(e));
  return it->second;
}

int Mesh::cell_index(const std::vector<int>& sorted_ids) const {
  auto it = cell_lookup_.find(sorted_ids);
  if (it == cell_lookup_.end())
    throw std::invalid_argument("mesh: unknown cell");
  return it->second;
}

double Mesh::shape_regularity() const {
  double worst = 0.0;
  for (int c = 0; c < num_cells(); ++c) {
    const auto& g = cell_geometry(c);
    worst = std::max(worst, g.diameter / g.inradius);
  }
  return worst;
}

namespace {

// Clip the segment pts[a] + t (pts[b]-pts[a]), t in [0,1], against the
// closed halfspaces of the other cell. Returns the surviving t-interval.
std::optional<std::pair<double, double>> clip_edge(
    const Eigen::VectorXd& a, const Eigen::VectorXd& b,
    const Eigen::MatrixXd& bary_other, double tol) {
  double t0 = 0.0, t1 = 1.0;
  const int n = static_cast<int>(bary_other.rows());
  const int d = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) {
    const double va = bary_other.row(i).head(d).dot(a) + bary_other(i, d);
    const double vb = bary_other.row(i).head(d).dot(b) + bary_other(i, d);
    const double dv = vb - va;
    if (std::abs(dv) < 1e-300) {
      if (va < -tol) return std::nullopt;
      continue;
    }
    const double tc = -va / dv;
    if (dv > 0.0)
      t0 = std::max(t0, tc);
    else
      t1 = std::min(t1, tc);
  }
  if (t0 > t1 + tol) return std::nullopt;
  return std::make_pair(std::max(0.0, t0), std::min(1.0, t1));
}

}  // namespace

std::vector<std::string> Mesh::validate() const {
  std::vector<std::string> violations;

  std::vector<bool> ok(cells_.size(), true);
  for (int c = 0; c < num_cells(); ++c) {
    const auto& cell = cells_[c];
    bool repeated = false;
    for (std::size_t i = 0; i + 1 < cell.size(); ++i)
      if (cell[i] == cell[i + 1]) repeated = true;
    if (repeated || !geometry_[c]) {
      violations.push_back("degenerate cell " + std::to_string(c) + " " +
                           tuple_string(cell));
      ok[c] = false;
    }
  }

  // Duplicated cells share all vertices yet have coincident interiors.
  for (int a = 0; a < num_cells(); ++a)
    for (int b = a + 1; b < num_cells(); ++b)
      if (cells_[a] == cells_[b])
        violations.push_back("cells " + std::to_string(a) + "," +
                             std::to_string(b) + ": identical vertex tuples");

  // Pairwise regularity: the closure intersection must be the closure of the
  // convex hull of the shared vertex set. Every vertex of that intersection
  // polytope arises as an endpoint of a clipped 1-subsimplex of one cell
  // against the other (d <= 3), so it suffices to test those points.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> boxes;
  for (int c = 0; c < num_cells(); ++c) {
    Eigen::VectorXd lo = vertices_[cells_[c][0]], hi = lo;
    for (int id : cells_[c]) {
      lo = lo.cwiseMin(vertices_[id]);
      hi = hi.cwiseMax(vertices_[id]);
    }
    boxes.emplace_back(lo, hi);
  }

  auto in_shared_hull = [&](const Eigen::VectorXd& x, int host,
                            const std::set<int>& shared) {
    const auto& g = *geometry_[host];
    const auto& cell = cells_[host];
    for (int i = 0; i <= dim_; ++i) {
      const double lam = g.barycentric.row(i).head(dim_).dot(x) + g.barycentric(i, dim_);
      const bool is_shared = shared.count(cell[i]) > 0;
      if (lam < -1e-9) return false;
      if (!is_shared && lam > 1e-9) return false;
    }
    return true;
  };

  for (int a = 0; a < num_cells(); ++a) {
    if (!ok[a]) continue;
    for (int b = a + 1; b < num_cells(); ++b) {
      if (!ok[b] || cells_[a] == cells_[b]) continue;
      const double slack =
          1e-9 * std::max(geometry_[a]->diameter, geometry_[b]->diameter);
      bool overlap = true;
      for (int k = 0; k < dim_; ++k)
        overlap = overlap && boxes[a].first[k] <= boxes[b].second[k] + slack &&
                  boxes[b].first[k] <= boxes[a].second[k] + slack;
      if (!overlap) continue;

      std::set<int> shared;
      std::set_intersection(cells_[a].begin(), cells_[a].end(),
                            cells_[b].begin(), cells_[b].end(),
                            std::inserter(shared, shared.begin()));

      bool bad = false;
      for (auto [host, guest] : {std::pair{a, b}, std::pair{b, a}}) {
        const auto& gc = cells_[guest];
        for (int i = 0; i <= dim_ && !bad; ++i) {
          for (int j = i + 1; j <= dim_ && !bad; ++j) {
            const auto& pa = vertices_[gc[i]];
            const auto& pb = vertices_[gc[j]];
            auto seg = clip_edge(pa, pb, geometry_[host]->barycentric, 1e-12);
            if (!seg) continue;
            for (double t : {seg->first, seg->second}) {
              const Eigen::VectorXd x = pa + t * (pb - pa);
              if (!in_shared_hull(x, host, shared)) {
                bad = true;
                break;
              }
            }
          }
        }
        if (bad) break;
      }
      if (bad)
        violations.push_back("cells " + std::to_string(a) + "," +
                             std::to_string(b) +
                             ": closure intersection is not the closure of a"
                             " shared subsimplex");
    }
  }
  return violations;
}

Patch Mesh::build_patch(int p) const {
  if (p < 0 || p >= num_vertices())
    throw std::invalid_argument("mesh: vertex index out of range");
  Patch patch;
  patch.center = p;
  patch.cells = vertex_cells_[p];
  if (patch.cells.empty())
    throw std::invalid_argument("mesh: vertex " + std::to_string(p) +
                                " has no adjacent cells");

  const Eigen::VectorXd& pcoord = vertices_[p];

  // Distance from p to the opposite hyperplane of each adjacent cell: the
  // barycentric form of p has gradient A with |form| / |A| the distance.
  double eps = std::numeric_limits<double>::infinity();
  for (int c : patch.cells) {
    const auto& g = cell_geometry(c);
    const auto& cell = cells_[c];
    const int local =
        static_cast<int>(std::find(cell.begin(), cell.end(), p) - cell.begin());
    const double grad_norm = g.barycentric.row(local).head(dim_).norm();
    eps = std::min(eps, 1.0 / grad_norm);
  }
  if (!(eps > 0.0)) throw std::runtime_error("mesh: empty star region");

  for (int c : patch.cells) {
    const auto& cell = cells_[c];
    std::vector<Eigen::VectorXd> others;
    for (int id : cell)
      if (id != p) others.push_back(vertices_[id]);

    Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim_);
    for (const auto& a : others) dir += pcoord - a;
    const double norm = dir.norm();
    if (norm <= 0.0) throw std::runtime_error("mesh: degenerate star direction");
    const Eigen::VectorXd q = pcoord + (0.5 * eps / norm) * dir;

    // q must lie strictly on p's side of every opposite hyperplane.
    for (int k : patch.cells) {
      const auto& gk = cell_geometry(k);
      const auto& ck = cells_[k];
      const int local =
          static_cast<int>(std::find(ck.begin(), ck.end(), p) - ck.begin());
      const double val = gk.barycentric.row(local).head(dim_).dot(q) +
                         gk.barycentric(local, dim_);
      if (!(val > 0.0))
        throw std::runtime_error("mesh: star point fell outside half-space");
    }

    patch.star_points.push_back(q);

    std::vector<std::vector<Eigen::VectorXd>> subs;
    std::vector<Eigen::VectorXd> base;
    base.push_back(pcoord);
    for (const auto& a : others) base.push_back(a);
    subs.push_back(base);  // i = 0: the cell itself
    for (std::size_t i = 0; i < others.size(); ++i) {
      std::vector<Eigen::VectorXd> sub;
      sub.push_back(q);
      sub.push_back(pcoord);
      for (std::size_t k = 0; k < others.size(); ++k)
        if (k != i) sub.push_back(others[k]);
      subs.push_back(std::move(sub));
    }
    patch.sub_simplices.push_back(std::move(subs));
  }
  return patch;
}

bool Mesh::patch_is_convex(int p) const {
  const auto& adjacent = vertex_cells(p);
  if (adjacent.empty())
    throw std::invalid_argument("mesh: vertex has no adjacent cells");
  const std::set<int> in_patch(adjacent.begin(), adjacent.end());

  std::set<int> patch_vertices;
  for (int c : adjacent)
    for (int id : cells_[c]) patch_vertices.insert(id);

  // The hull volume equals the patch volume iff every patch vertex lies
  // weakly inside the supporting hyperplane of every boundary facet.
  for (int c : adjacent) {
    const auto& g = cell_geometry(c);
    const auto& cell = cells_[c];
    for (int drop = 0; drop <= dim_; ++drop) {
      std::vector<int> facet;
      for (int i = 0; i <= dim_; ++i)
        if (i != drop) facet.push_back(cell[i]);
      const auto& adj = face_cells_[face_lookup_.at(facet)];
      bool boundary_of_patch = true;
      for (int other : adj)
        if (other != c && in_patch.count(other)) boundary_of_patch = false;
      if (!boundary_of_patch) continue;
      for (int v : patch_vertices) {
        const double lam = g.barycentric.row(drop).head(dim_).dot(vertices_[v]) +
                           g.barycentric(drop, dim_);
        if (lam < -1e-12) return false;
      }
    }
  }
  return true;
}

Eigen::VectorXd face_normal(const Mesh& mesh, const SubsimplexIndex& face) {
  const auto& adj = mesh.adjacency(face);
  const int c = *std::min_element(adj.begin(), adj.end());
  const auto& cell = mesh.cell(c);
  const auto& g = mesh.cell_geometry(c);
  // The gradient of the opposite vertex's barycentric form points towards
  // that vertex, i.e. into the cell; negate to point away from it.
  int local = -1;
  for (int i = 0; i < static_cast<int>(cell.size()); ++i) {
    if (!std::binary_search(face.vertex_ids.begin(), face.vertex_ids.end(),
                            cell[i]))
      local = i;
  }
  if (local < 0) throw std::invalid_argument("mesh: face not part of cell");
  Eigen::VectorXd n = -g.barycentric.row(local).head(mesh.dim()).transpose();
  return n / n.norm();
}

std::vector<Eigen::VectorXd> face_tangents(const Mesh& mesh,
                                           const SubsimplexIndex& face) {
  const auto& ids = face.vertex_ids;
  std::vector<Eigen::VectorXd> frame;
  for (std::size_t i = 1; i < ids.size(); ++i) {
    Eigen::VectorXd t = mesh.vertex(ids[i]) - mesh.vertex(ids[0]);
    for (const auto& prev : frame) t -= prev.dot(t) * prev;
    const double n = t.norm();
    if (n <= 1e-14) throw std::runtime_error("mesh: degenerate face frame");
    frame.push_back(t / n);
  }
  return frame;
}

Eigen::VectorXd edge_tangent(const Mesh& mesh, const SubsimplexIndex& edge) {
  const Eigen::VectorXd t =
      mesh.vertex(edge.vertex_ids.at(1)) - mesh.vertex(edge.vertex_ids.at(0));
  return t / t.norm();
}

Eigen::VectorXd barycenter(const Mesh& mesh, const SubsimplexIndex& s) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.dim());
  for (int id : s.vertex_ids) b += mesh.vertex(id);
  return b / static_cast<double>(s.vertex_ids.size());
}

double face_measure(const Mesh& mesh, const SubsimplexIndex& face) {
  std::vector<Eigen::VectorXd> pts;
  for (int id : face.vertex_ids) pts.push_back(mesh.vertex(id));
  const int k = static_cast<int>(pts.size()) - 1;
  const int d = mesh.dim();
  Eigen::MatrixXd edges(d, k);
  for (int i = 0; i < k; ++i) edges.col(i) = pts[i + 1] - pts[0];
  const Eigen::MatrixXd gram = edges.transpose() * edges;
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return std::sqrt(std::max(0.0, gram.determinant())) / fact;
}

}  // namespace derhamnet

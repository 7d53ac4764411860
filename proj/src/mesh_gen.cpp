#include "derhamnet/mesh_gen.hpp"

#include <array>
#include <map>
#include <stdexcept>

namespace derhamnet {

namespace {

// Deduplicating vertex table over an integer lattice refined by `scale`
// (all generator vertices have coordinates k / scale).
class LatticeVertices {
 public:
  LatticeVertices(int dim, int scale) : dim_(dim), scale_(scale) {}

  int id(const std::vector<int>& lattice) {
    auto [it, inserted] = lookup_.try_emplace(lattice, static_cast<int>(coords_.size()));
    if (inserted) {
      Eigen::VectorXd v(dim_);
      for (int k = 0; k < dim_; ++k) v[k] = static_cast<double>(lattice[k]) / scale_;
      coords_.push_back(std::move(v));
    }
    return it->second;
  }

  std::vector<Eigen::VectorXd> take() { return std::move(coords_); }

 private:
  int dim_, scale_;
  std::map<std::vector<int>, int> lookup_;
  std::vector<Eigen::VectorXd> coords_;
};

// Criss-cross split of the unit square [x,x+1] x [y,y+1] on a half-integer
// lattice (cell corners at even lattice points, center at odd).
void crisscross_square(LatticeVertices& verts, std::vector<std::vector<int>>& cells,
                       int x, int y) {
  const int cx = 2 * x + 1, cy = 2 * y + 1;
  const int c = verts.id({cx, cy});
  const std::array<std::pair<int, int>, 5> corner = {
      {{2 * x, 2 * y}, {2 * x + 2, 2 * y}, {2 * x + 2, 2 * y + 2}, {2 * x, 2 * y + 2}, {2 * x, 2 * y}}};
  for (int k = 0; k < 4; ++k) {
    const int a = verts.id({corner[k].first, corner[k].second});
    const int b = verts.id({corner[k + 1].first, corner[k + 1].second});
    cells.push_back({a, b, c});
  }
}

void diag_square(LatticeVertices& verts, std::vector<std::vector<int>>& cells,
                 int x, int y, bool flip) {
  const int a = verts.id({x, y});
  const int b = verts.id({x + 1, y});
  const int c = verts.id({x + 1, y + 1});
  const int d = verts.id({x, y + 1});
  if (!flip) {  // diagonal a-c
    cells.push_back({a, b, c});
    cells.push_back({a, c, d});
  } else {  // diagonal b-d
    cells.push_back({a, b, d});
    cells.push_back({b, c, d});
  }
}

void kuhn_cube(LatticeVertices& verts, std::vector<std::vector<int>>& cells,
               int x, int y, int z) {
  // Six tetrahedra along the main diagonal: one per permutation of the axes,
  // with vertices accumulated coordinate by coordinate.
  const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& perm : perms) {
    std::vector<int> corner = {x, y, z};
    std::vector<int> tet = {verts.id(corner)};
    for (int axis : perm) {
      corner[axis] += 1;
      tet.push_back(verts.id(corner));
    }
    cells.push_back(tet);
  }
}

}  // namespace

Mesh square_crisscross(int n) {
  if (n < 1) throw std::invalid_argument("square_crisscross: n must be >= 1");
  LatticeVertices verts(2, 2 * n);
  std::vector<std::vector<int>> cells;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) crisscross_square(verts, cells, x, y);
  return Mesh(2, verts.take(), std::move(cells));
}

Mesh square_diag(int n) {
  if (n < 1) throw std::invalid_argument("square_diag: n must be >= 1");
  LatticeVertices verts(2, n);
  std::vector<std::vector<int>> cells;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) diag_square(verts, cells, x, y, false);
  return Mesh(2, verts.take(), std::move(cells));
}

Mesh lshape(int n) {
  if (n < 1) throw std::invalid_argument("lshape: n must be >= 1");
  // Three unit squares: [0,1]^2, [1,2]x[0,1], [0,1]x[1,2]; per-square
  // diagonals chosen to point at (1,1) so its patch wraps around the
  // re-entrant corner.
  LatticeVertices verts(2, n);
  std::vector<std::vector<int>> cells;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) diag_square(verts, cells, x, y, false);
  for (int x = n; x < 2 * n; ++x)
    for (int y = 0; y < n; ++y) diag_square(verts, cells, x, y, true);
  for (int x = 0; x < n; ++x)
    for (int y = n; y < 2 * n; ++y) diag_square(verts, cells, x, y, true);
  return Mesh(2, verts.take(), std::move(cells));
}

Mesh cube_kuhn(int n) {
  if (n < 1) throw std::invalid_argument("cube_kuhn: n must be >= 1");
  LatticeVertices verts(3, n);
  std::vector<std::vector<int>> cells;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) kuhn_cube(verts, cells, x, y, z);
  return Mesh(3, verts.take(), std::move(cells));
}

Mesh fichera(int n) {
  if (n < 1) throw std::invalid_argument("fichera: n must be >= 1");
  LatticeVertices verts(3, n);
  std::vector<std::vector<int>> cells;
  for (int x = 0; x < 2 * n; ++x)
    for (int y = 0; y < 2 * n; ++y)
      for (int z = 0; z < 2 * n; ++z) {
        if (x >= n && y >= n && z >= n) continue;  // removed octant
        kuhn_cube(verts, cells, x, y, z);
      }
  return Mesh(3, verts.take(), std::move(cells));
}

Mesh generate_mesh(const std::string& domain, int n) {
  if (domain == "square-crisscross") return square_crisscross(n);
  if (domain == "square-diag") return square_diag(n);
  if (domain == "lshape") return lshape(n);
  if (domain == "cube-kuhn") return cube_kuhn(n);
  if (domain == "fichera") return fichera(n);
  throw std::invalid_argument("unknown domain: " + domain);
}

}  // namespace derhamnet

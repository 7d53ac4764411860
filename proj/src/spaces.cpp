#include "derhamnet/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace derhamnet {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::logic_error("spaces: " + msg);
}

bool same_layer(const Layer& a, const Layer& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  if (a.weights.size() != b.weights.size()) return false;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (a.weights[i].row != b.weights[i].row || a.weights[i].col != b.weights[i].col ||
        a.weights[i].value != b.weights[i].value)
      return false;
  }
  return a.bias == b.bias && a.act == b.act;
}

}  // namespace

std::vector<SubsimplexIndex> dof_order(const Mesh& mesh, SpaceKind kind) {
  std::vector<SubsimplexIndex> dofs;
  switch (kind) {
    case SpaceKind::S1:
    case SpaceKind::S1ReluOnly:
      for (int p = 0; p < mesh.num_vertices(); ++p)
        dofs.push_back({SubsimplexIndex::Kind::Vertex, {p}});
      break;
    case SpaceKind::N0:
      if (mesh.dim() != 2 && mesh.dim() != 3)
        throw std::invalid_argument(
            "n0: the Nedelec space requires d in {2,3} (excluded if d > 3)");
      dofs = mesh.edges();
      break;
    case SpaceKind::RT0:
    case SpaceKind::CR0:
      dofs = mesh.faces();
      break;
    case SpaceKind::S0: {
      std::vector<std::vector<int>> tuples;
      for (int c = 0; c < mesh.num_cells(); ++c) tuples.push_back(mesh.cell(c));
      std::sort(tuples.begin(), tuples.end());
      for (auto& t : tuples) dofs.push_back({SubsimplexIndex::Kind::Cell, std::move(t)});
      break;
    }
  }
  return dofs;
}

BasisNet basis_net(std::shared_ptr<const Mesh> mesh, SpaceKind kind) {
  if (!mesh) throw std::invalid_argument("basis_net: null mesh");
  const Mesh& m = *mesh;
  std::vector<SubsimplexIndex> dofs = dof_order(m, kind);
  if (dofs.empty()) throw std::invalid_argument("basis_net: no degrees of freedom");

  std::vector<Network> components;
  components.reserve(dofs.size());
  for (const auto& dof : dofs) {
    switch (kind) {
      case SpaceKind::S1:
        components.push_back(s1_net_bisu(m, dof.vertex_ids[0]).net);
        break;
      case SpaceKind::S1ReluOnly:
        components.push_back(cpwl_net(m, dof.vertex_ids[0]).net);
        break;
      case SpaceKind::N0:
        components.push_back(m.dim() == 3 ? n0_net(m, dof).net : n0_net_2d(m, dof).net);
        break;
      case SpaceKind::RT0:
        components.push_back(rt0_net(m, dof).net);
        break;
      case SpaceKind::CR0:
        components.push_back(cr0_net(m, dof).net);
        break;
      case SpaceKind::S0:
        components.push_back(s0_net(m, m.cell_index(dof.vertex_ids)).net);
        break;
    }
  }

  if (kind == SpaceKind::S1ReluOnly) {
    // Depth-equalize the pure-ReLU hats with identity nets before stacking.
    int max_depth = 0;
    for (const auto& c : components) max_depth = std::max(max_depth, c.depth());
    for (auto& c : components) c = concat(identity_net(1, 1 + max_depth - c.depth()), c);
  }

  Network net = parallelize(components);
  if (kind == SpaceKind::S0)
    require(net.depth() == 3, "S0 basis net must have depth 3");
  else if (kind != SpaceKind::S1ReluOnly)
    require(net.depth() == 5, "basis net must have depth 5");
  return {kind, std::move(mesh), std::move(net), std::move(dofs)};
}

FunctionNet function_net(const BasisNet& basis, const Eigen::VectorXd& coeffs) {
  const int ndofs = static_cast<int>(basis.dofs.size());
  if (coeffs.size() != ndofs)
    throw std::invalid_argument("function_net: coefficient length mismatch");
  const int mu = basis.net.output_dim() / ndofs;

  std::vector<Layer> layers = basis.net.layers();
  const Layer& old = layers.back();
  Layer specialized(mu, old.cols);
  for (const auto& t : old.weights) {
    const double v = coeffs[t.row / mu];
    if (v != 0.0) specialized.add(t.row % mu, t.col, v * t.value);
  }
  for (int r = 0; r < old.rows; ++r)
    specialized.bias[r % mu] += coeffs[r / mu] * old.bias[r];
  layers.back() = std::move(specialized);

  Network net(basis.net.input_dim(), std::move(layers));
  return {basis.kind, basis.mesh, coeffs, std::move(net), basis.dofs};
}

FunctionNet function_net(std::shared_ptr<const Mesh> mesh, SpaceKind kind,
                         const Eigen::VectorXd& coeffs) {
  return function_net(basis_net(std::move(mesh), kind), coeffs);
}

FunctionNet net_linear_combine(const FunctionNet& f1, double lambda,
                               const FunctionNet& f2) {
  if (f1.kind != f2.kind || f1.dofs != f2.dofs)
    throw std::invalid_argument("net_linear_combine: incompatible function nets");
  const int L = f1.net.depth();
  if (L != f2.net.depth())
    throw std::invalid_argument("net_linear_combine: depth mismatch");
  for (int l = 0; l + 1 < L; ++l)
    require(same_layer(f1.net.layers()[l], f2.net.layers()[l]),
            "hidden layers of combined nets must coincide");

  std::vector<Layer> layers = f1.net.layers();
  const Layer& l1 = f1.net.layers()[L - 1];
  const Layer& l2 = f2.net.layers()[L - 1];
  Layer combined(l1.rows, l1.cols);
  for (const auto& t : l1.weights) combined.add(t.row, t.col, t.value);
  if (lambda != 0.0)
    for (const auto& t : l2.weights) combined.add(t.row, t.col, lambda * t.value);
  for (int r = 0; r < l1.rows; ++r) combined.bias[r] = l1.bias[r] + lambda * l2.bias[r];
  layers.back() = std::move(combined);

  Network net(f1.net.input_dim(), std::move(layers));
  return {f1.kind, f1.mesh, f1.coefficients + lambda * f2.coefficients, std::move(net),
          f1.dofs};
}

std::vector<FaceChart> face_charts(const Mesh& mesh) {
  if (mesh.dim() != 3)
    throw std::invalid_argument("face_charts: requires a 3D mesh");
  constexpr double kPlaneTol = 1e-9;

  struct Facet {
    int face_index;
    Eigen::Vector3d normal;
    double offset;
  };
  std::vector<Facet> facets;
  const auto& all_faces = mesh.faces();
  for (int fi = 0; fi < static_cast<int>(all_faces.size()); ++fi) {
    if (mesh.adjacency(all_faces[fi]).size() != 1) continue;
    const Eigen::Vector3d n = face_normal(mesh, all_faces[fi]);
    facets.push_back({fi, n, n.dot(mesh.vertex(all_faces[fi].vertex_ids[0]))});
  }

  // Group by (normal, offset), then split into edge-connected components.
  std::vector<int> group(facets.size(), -1);
  int ngroups = 0;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = ngroups++;
    for (std::size_t j = i + 1; j < facets.size(); ++j) {
      if (group[j] >= 0) continue;
      if ((facets[i].normal - facets[j].normal).lpNorm<Eigen::Infinity>() <= kPlaneTol &&
          std::abs(facets[i].offset - facets[j].offset) <= kPlaneTol)
        group[j] = group[i];
    }
  }

  std::vector<int> comp(facets.size());
  std::iota(comp.begin(), comp.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  std::map<std::pair<int, std::vector<int>>, int> edge_owner;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto& ids = all_faces[facets[i].face_index].vertex_ids;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        std::pair<int, std::vector<int>> key{group[i], {ids[a], ids[b]}};
        auto [it, inserted] = edge_owner.try_emplace(key, static_cast<int>(i));
        if (!inserted) comp[find(static_cast<int>(i))] = find(it->second);
      }
    }
  }

  std::map<int, std::vector<int>> components;
  for (std::size_t i = 0; i < facets.size(); ++i)
    components[find(static_cast<int>(i))].push_back(static_cast<int>(i));

  std::vector<FaceChart> charts;
  for (const auto& [root, members] : components) {
    // Deterministic chart frame from the lexicographically first facet.
    int first = members[0];
    for (int m : members)
      if (all_faces[facets[m].face_index].vertex_ids <
          all_faces[facets[first].face_index].vertex_ids)
        first = m;
    const auto& fids = all_faces[facets[first].face_index].vertex_ids;
    const Eigen::Vector3d p0 = mesh.vertex(fids[0]);
    Eigen::Vector3d t1 = mesh.vertex(fids[1]) - p0;
    t1.normalize();
    Eigen::Vector3d t2 = mesh.vertex(fids[2]) - p0;
    t2 -= t1.dot(t2) * t1;
    t2.normalize();

    std::vector<int> vertex_ids;
    for (int m : members)
      for (int id : all_faces[facets[m].face_index].vertex_ids) vertex_ids.push_back(id);
    std::sort(vertex_ids.begin(), vertex_ids.end());
    vertex_ids.erase(std::unique(vertex_ids.begin(), vertex_ids.end()), vertex_ids.end());
    std::map<int, int> to_param;
    for (std::size_t k = 0; k < vertex_ids.size(); ++k)
      to_param[vertex_ids[k]] = static_cast<int>(k);

    const Eigen::Vector3d origin = mesh.vertex(vertex_ids.front());

    bool planar = true;
    std::vector<Eigen::VectorXd> params;
    double scale = 0.0;
    for (int id : vertex_ids) {
      const Eigen::Vector3d x = mesh.vertex(id) - origin;
      scale = std::max(scale, x.norm());
      Eigen::VectorXd u(2);
      u << t1.dot(x), t2.dot(x);
      params.push_back(std::move(u));
    }
    for (int id : vertex_ids) {
      const Eigen::Vector3d x = mesh.vertex(id) - origin;
      const double off = std::abs(facets[first].normal.dot(x));
      if (off > kPlaneTol * std::max(1.0, scale)) planar = false;
    }

    auto make_chart = [&](const std::vector<int>& facet_members, bool fallback) {
      std::vector<int> used;
      for (int m : facet_members)
        for (int id : all_faces[facets[m].face_index].vertex_ids) used.push_back(id);
      std::sort(used.begin(), used.end());
      used.erase(std::unique(used.begin(), used.end()), used.end());
      std::map<int, int> local;
      std::vector<Eigen::VectorXd> verts2d;
      for (std::size_t k = 0; k < used.size(); ++k) {
        local[used[k]] = static_cast<int>(k);
        verts2d.push_back(params[to_param.at(used[k])]);
      }
      std::vector<std::vector<int>> cells2d;
      std::vector<int> facet_faces;
      for (int m : facet_members) {
        std::vector<int> cell;
        for (int id : all_faces[facets[m].face_index].vertex_ids)
          cell.push_back(local.at(id));
        cells2d.push_back(std::move(cell));
        facet_faces.push_back(facets[m].face_index);
      }
      FaceChart chart;
      chart.face_id = static_cast<int>(charts.size());
      chart.origin = origin;
      chart.jacobian.col(0) = t1;
      chart.jacobian.col(1) = t2;
      chart.parameter_mesh =
          std::make_shared<Mesh>(2, std::move(verts2d), std::move(cells2d));
      chart.vertex_map = used;
      chart.facet_faces = std::move(facet_faces);
      chart.per_facet_fallback = fallback;
      charts.push_back(std::move(chart));
    };

    if (planar) {
      make_chart(members, false);
    } else {
      for (int m : members) make_chart({m}, true);
    }
  }
  return charts;
}

FunctionNet trace_net(const FaceChart& chart, SpaceKind kind,
                      const Eigen::VectorXd& coeffs) {
  FunctionNet fn = function_net(chart.parameter_mesh, kind, coeffs);
  if (kind == SpaceKind::RT0 || kind == SpaceKind::N0) {
    Network pushed = compose_output(fn.net, chart.jacobian);
    fn.net = std::move(pushed);
  }
  return fn;
}

}  // namespace derhamnet

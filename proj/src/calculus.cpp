#include "derhamnet/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace derhamnet {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(std::string("nn calculus: ") + msg);
}

int ceil_log2(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

void add_block(Layer& dst, const Layer& src, int row_off, int col_off) {
  for (const auto& t : src.weights) dst.add(t.row + row_off, t.col + col_off, t.value);
  for (int i = 0; i < src.rows; ++i) {
    dst.bias[row_off + i] = src.bias[i];
    dst.act[row_off + i] = src.act[i];
  }
}

long long total_size(std::span<const Network> nets) {
  long long s = 0;
  for (const auto& n : nets) s += n.metrics().size;
  return s;
}

}  // namespace

Network affine_net(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("affine_net: shape mismatch");
  Layer layer(static_cast<int>(A.rows()), static_cast<int>(A.cols()));
  for (int r = 0; r < A.rows(); ++r) {
    for (int c = 0; c < A.cols(); ++c)
      if (A(r, c) != 0.0) layer.add(r, c, A(r, c));
    layer.bias[r] = b[r];
  }
  return Network(static_cast<int>(A.cols()), {std::move(layer)});
}

Network scale_output(const Network& net, double c) {
  std::vector<Layer> layers = net.layers();
  Layer& last = layers.back();
  if (c == 0.0) {
    last.weights.clear();
    std::fill(last.bias.begin(), last.bias.end(), 0.0);
  } else {
    for (auto& t : last.weights) t.value *= c;
    for (auto& b : last.bias) b *= c;
  }
  return Network(net.input_dim(), std::move(layers));
}

Network compose_output(const Network& net, const Eigen::MatrixXd& M) {
  if (M.cols() != net.output_dim())
    throw std::invalid_argument("compose_output: shape mismatch");
  std::vector<Layer> layers = net.layers();
  const Layer& old = layers.back();
  Layer mapped(static_cast<int>(M.rows()), old.cols);
  for (const auto& t : old.weights)
    for (int k = 0; k < M.rows(); ++k)
      if (M(k, t.row) != 0.0) mapped.add(k, t.col, M(k, t.row) * t.value);
  for (int r = 0; r < old.rows; ++r)
    if (old.bias[r] != 0.0)
      for (int k = 0; k < M.rows(); ++k) mapped.bias[k] += M(k, r) * old.bias[r];
  layers.back() = std::move(mapped);
  return Network(net.input_dim(), std::move(layers));
}

Network parallelize(std::span<const Network> nets) {
  if (nets.empty()) throw std::invalid_argument("parallelize: no networks");
  const int d = nets[0].input_dim();
  const int L = nets[0].depth();
  for (const auto& n : nets) {
    if (n.input_dim() != d) throw std::invalid_argument("parallelize: input dim mismatch");
    if (n.depth() != L) throw std::invalid_argument("parallelize: depth mismatch");
  }

  std::vector<Layer> layers;
  for (int l = 0; l < L; ++l) {
    int rows = 0, cols = 0;
    for (const auto& n : nets) {
      rows += n.layers()[l].rows;
      cols += n.layers()[l].cols;
    }
    if (l == 0) cols = d;  // first layers share the input
    Layer layer(rows, cols);
    int row_off = 0, col_off = 0;
    for (const auto& n : nets) {
      const Layer& src = n.layers()[l];
      add_block(layer, src, row_off, l == 0 ? 0 : col_off);
      row_off += src.rows;
      col_off += src.cols;
    }
    layers.push_back(std::move(layer));
  }
  Network out(d, std::move(layers));
  require(out.metrics().size == total_size(nets), "parallelization size must equal the sum");
  return out;
}

Network sum_nets(std::span<const Network> nets) {
  if (nets.empty()) throw std::invalid_argument("sum: no networks");
  const int d = nets[0].input_dim();
  const int L = nets[0].depth();
  const int out_dim = nets[0].output_dim();
  for (const auto& n : nets) {
    if (n.input_dim() != d) throw std::invalid_argument("sum: input dim mismatch");
    if (n.depth() != L) throw std::invalid_argument("sum: depth mismatch");
    if (n.output_dim() != out_dim) throw std::invalid_argument("sum: output dim mismatch");
  }
  if (nets.size() == 1) return nets[0];

  std::vector<Layer> layers;
  if (L == 1) {
    Layer layer(out_dim, d);
    for (const auto& n : nets) {
      for (const auto& t : n.layers()[0].weights) layer.add(t.row, t.col, t.value);
      for (int i = 0; i < out_dim; ++i) layer.bias[i] += n.layers()[0].bias[i];
    }
    layers.push_back(std::move(layer));
  } else {
    for (int l = 0; l + 1 < L; ++l) {
      int rows = 0, cols = 0;
      for (const auto& n : nets) {
        rows += n.layers()[l].rows;
        cols += n.layers()[l].cols;
      }
      if (l == 0) cols = d;
      Layer layer(rows, cols);
      int row_off = 0, col_off = 0;
      for (const auto& n : nets) {
        const Layer& src = n.layers()[l];
        add_block(layer, src, row_off, l == 0 ? 0 : col_off);
        row_off += src.rows;
        col_off += src.cols;
      }
      layers.push_back(std::move(layer));
    }
    int cols = 0;
    for (const auto& n : nets) cols += n.layers()[L - 1].cols;
    Layer last(out_dim, cols);
    int col_off = 0;
    for (const auto& n : nets) {
      const Layer& src = n.layers()[L - 1];
      for (const auto& t : src.weights) last.add(t.row, t.col + col_off, t.value);
      for (int i = 0; i < out_dim; ++i) last.bias[i] += src.bias[i];
      col_off += src.cols;
    }
    layers.push_back(std::move(last));
  }
  Network out(d, std::move(layers));
  require(out.metrics().size <= total_size(nets), "sum size must not exceed the sum of sizes");
  return out;
}

Network concat(const Network& outer, const Network& inner) {
  if (inner.output_dim() != outer.input_dim())
    throw std::invalid_argument("concat: inner output dim must equal outer input dim");
  const int L2 = inner.depth();
  std::vector<Layer> layers;
  for (int l = 0; l + 1 < L2; ++l) layers.push_back(inner.layers()[l]);

  // +/- split of the inner output, rectified.
  const Layer& in_last = inner.layers()[L2 - 1];
  Layer split(2 * in_last.rows, in_last.cols, Activation::ReLU);
  for (const auto& t : in_last.weights) {
    split.add(t.row, t.col, t.value);
    split.add(t.row + in_last.rows, t.col, -t.value);
  }
  for (int i = 0; i < in_last.rows; ++i) {
    split.bias[i] = in_last.bias[i];
    split.bias[i + in_last.rows] = -in_last.bias[i];
  }
  layers.push_back(std::move(split));

  // Outer first layer applied to the recombined value x = x_+ - x_-.
  const Layer& out_first = outer.layers()[0];
  Layer joined(out_first.rows, 2 * in_last.rows);
  for (const auto& t : out_first.weights) {
    joined.add(t.row, t.col, t.value);
    joined.add(t.row, t.col + in_last.rows, -t.value);
  }
  joined.bias = out_first.bias;
  joined.act = out_first.act;
  layers.push_back(std::move(joined));

  for (int l = 1; l < outer.depth(); ++l) layers.push_back(outer.layers()[l]);

  Network out(inner.input_dim(), std::move(layers));
  const long long m1 = outer.metrics().size, m2 = inner.metrics().size;
  require(out.depth() == outer.depth() + inner.depth(), "concat depth must add");
  require(out.metrics().size <= 2 * m1 + 2 * m2, "concat size bound violated");
  return out;
}

Network identity_net(int d, int L) {
  if (d < 1 || L < 1) throw std::invalid_argument("identity_net: d, L must be >= 1");
  std::vector<Layer> layers;
  if (L == 1) {
    Layer only(d, d);
    for (int i = 0; i < d; ++i) only.add(i, i, 1.0);
    layers.push_back(std::move(only));
  } else {
    Layer first(2 * d, d, Activation::ReLU);
    for (int i = 0; i < d; ++i) {
      first.add(i, i, 1.0);
      first.add(i + d, i, -1.0);
    }
    layers.push_back(std::move(first));
    for (int l = 2; l < L; ++l) {
      Layer mid(2 * d, 2 * d, Activation::ReLU);
      for (int i = 0; i < 2 * d; ++i) mid.add(i, i, 1.0);
      layers.push_back(std::move(mid));
    }
    Layer last(d, 2 * d);
    for (int i = 0; i < d; ++i) {
      last.add(i, i, 1.0);
      last.add(i, i + d, -1.0);
    }
    layers.push_back(std::move(last));
  }
  Network out(d, std::move(layers));
  require(out.depth() == L, "identity_net depth");
  require(out.metrics().size <= 2LL * d * L, "identity_net size bound violated");
  return out;
}

namespace {

// Shared construction for max/min reduction trees. Values are tracked as
// sparse affine reads over the current layer's units.
Network minmax_net(int d, bool is_max) {
  if (d < 1) throw std::invalid_argument("min/max net: d must be >= 1");
  if (d == 1) return identity_net(1, 2);

  using Read = std::vector<std::pair<int, double>>;
  std::vector<Read> values(d);
  for (int i = 0; i < d; ++i) values[i] = {{i, 1.0}};

  std::vector<Layer> layers;
  int prev_width = d;
  while (values.size() > 1) {
    const int pairs = static_cast<int>(values.size()) / 2;
    const bool odd = values.size() % 2 != 0;
    Layer layer(3 * pairs + (odd ? 2 : 0), prev_width, Activation::ReLU);
    std::vector<Read> next;
    auto emit = [&layer](int row, const Read& read, double scale) {
      for (const auto& [col, w] : read) layer.add(row, col, scale * w);
    };
    for (int k = 0; k < pairs; ++k) {
      const Read& va = values[2 * k];
      const Read& vb = values[2 * k + 1];
      const int u = 3 * k;
      if (is_max) {
        emit(u, va, 1.0);   // rho(va - vb)
        emit(u, vb, -1.0);
      } else {
        emit(u, vb, 1.0);   // rho(vb - va)
        emit(u, va, -1.0);
      }
      emit(u + 1, vb, 1.0);   // rho(vb)
      emit(u + 2, vb, -1.0);  // rho(-vb)
      next.push_back({{u, is_max ? 1.0 : -1.0}, {u + 1, 1.0}, {u + 2, -1.0}});
    }
    if (odd) {
      const Read& vs = values.back();
      const int u = 3 * pairs;
      emit(u, vs, 1.0);
      emit(u + 1, vs, -1.0);
      next.push_back({{u, 1.0}, {u + 1, -1.0}});
    }
    prev_width = layer.rows;
    layers.push_back(std::move(layer));
    values = std::move(next);
  }

  Layer last(1, prev_width);
  for (const auto& [col, w] : values[0]) last.add(0, col, w);
  layers.push_back(std::move(last));

  Network out(d, std::move(layers));
  require(out.depth() <= 2 + ceil_log2(d), "min/max depth bound violated");
  require(out.metrics().size <= 16LL * d, "min/max size bound violated");
  return out;
}

}  // namespace

Network max_net(int d) { return minmax_net(d, true); }
Network min_net(int d) { return minmax_net(d, false); }

Network times_step_net(int d, double kappa) {
  if (d < 1) throw std::invalid_argument("times_step_net: d must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("times_step_net: kappa must be > 0");
  Layer first(4 * d, d + 1, Activation::ReLU);
  Layer second(d, 4 * d);
  for (int i = 0; i < d; ++i) {
    const int u = 4 * i;
    first.add(u + 0, i, 1.0 / kappa);
    first.add(u + 0, d, 1.0);
    first.add(u + 1, i, -1.0 / kappa);
    first.add(u + 1, d, -1.0);
    first.add(u + 2, i, 1.0 / kappa);
    first.add(u + 2, d, -1.0);
    first.add(u + 3, i, -1.0 / kappa);
    first.add(u + 3, d, 1.0);
    second.add(i, u + 0, kappa / 2.0);
    second.add(i, u + 1, kappa / 2.0);
    second.add(i, u + 2, -kappa / 2.0);
    second.add(i, u + 3, -kappa / 2.0);
  }
  Network out(d + 1, {std::move(first), std::move(second)});
  require(out.depth() == 2, "times_step depth must be 2");
  require(out.metrics().size == 12LL * d, "times_step size must be exactly 12d");
  return out;
}

Network indicator_net(const HalfspaceSystem& sys) {
  const int d = sys.dim;
  const int n = static_cast<int>(sys.equalities.size());
  const int N = n + static_cast<int>(sys.strict_inequalities.size());
  if (d < 1) throw std::invalid_argument("indicator_net: bad dimension");
  if (N < 1) throw std::invalid_argument("indicator_net: empty system");

  Layer first(N + n, d, Activation::BiSU);
  int row = 0;
  auto add_form = [&](const Eigen::RowVectorXd& A, double b, double sign) {
    if (A.size() != d) throw std::invalid_argument("indicator_net: form dimension mismatch");
    for (int c = 0; c < d; ++c)
      if (A[c] != 0.0) first.add(row, c, sign * A[c]);
    first.bias[row] = sign * b;
    ++row;
  };
  for (const auto& [A, b] : sys.equalities) {
    add_form(A, b, 1.0);
    add_form(A, b, -1.0);
  }
  for (const auto& [A, b] : sys.strict_inequalities) add_form(A, b, 1.0);

  Layer second(1, N + n, Activation::BiSU);
  for (int i = 0; i < 2 * n; ++i) second.add(0, i, -1.0);
  for (int i = 2 * n; i < N + n; ++i) second.add(0, i, 1.0);
  second.bias[0] = -(static_cast<double>(N - n) - 0.25);

  Layer third(1, 1);
  third.add(0, 0, 1.0);

  Network out(d, {std::move(first), std::move(second), std::move(third)});
  require(out.depth() == 3, "indicator depth must be 3");
  require(out.metrics().size <= static_cast<long long>(d + 2) * (N + n) + 2,
          "indicator size bound violated");
  return out;
}

double pwl_auto_kappa(std::span<const PwlPiece> pieces) {
  double kappa = 0.0;
  for (const auto& piece : pieces) {
    for (const auto& v : piece.region_vertices) {
      const Eigen::VectorXd val = piece.A * v + piece.b;
      kappa = std::max(kappa, val.lpNorm<Eigen::Infinity>());
    }
  }
  return kappa;
}

Network pwl_net(std::span<const PwlPiece> pieces, std::optional<double> kappa) {
  if (pieces.empty()) throw std::invalid_argument("pwl_net: no pieces");
  const int mu = static_cast<int>(pieces[0].A.rows());
  const double auto_kappa = pwl_auto_kappa(pieces);
  double k = kappa.value_or(auto_kappa);
  if (kappa && *kappa < auto_kappa)
    throw std::invalid_argument("pwl_net: kappa below the bound required by the pieces");
  if (k <= 0.0) k = 1.0;  // all-zero pieces; any positive bound works

  std::vector<Network> terms;
  for (const auto& piece : pieces) {
    if (piece.A.rows() != mu) throw std::invalid_argument("pwl_net: output dim mismatch");
    std::vector<Network> branches;
    branches.push_back(concat(identity_net(mu, 2), affine_net(piece.A, piece.b)));
    branches.push_back(indicator_net(piece.region));
    terms.push_back(concat(times_step_net(mu, k), parallelize(branches)));
  }
  Network out = sum_nets(terms);
  require(out.depth() == 5, "pwl_net depth must be 5");
  return out;
}

}  // namespace derhamnet

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace derhamnet {

enum class Activation { Identity, ReLU, BiSU };

/// ReLU(x) = max{0, x}.
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
/// BiSU(x) = 0 for x <= 0, 1 for x > 0.
inline double bisu(double x) { return x > 0.0 ? 1.0 : 0.0; }

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// One layer: sparse weight matrix (coordinate triplets sorted by (row,col),
/// no explicit zeros), dense bias, per-neuron activation.
struct Layer {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> weights;
  std::vector<double> bias;
  std::vector<Activation> act;

  Layer() = default;
  Layer(int rows_, int cols_, Activation a = Activation::Identity);

  /// Accumulates w into entry (r, c). Explicitly inserting zero is rejected.
  void add(int r, int c, double w);
  /// Sorts triplets, merges duplicates, prunes entries that cancelled to zero.
  void finalize();

  long long nonzeros() const;  // nnz(A) + nnz(b)
};

struct Metrics {
  int depth = 0;
  long long size = 0;
  long long size_in = 0;
  long long size_out = 0;
  std::vector<long long> per_layer;
};

/// Feedforward network with heterogeneous activations. The realization
/// applies affine-then-activation per hidden layer; no activation in the
/// last layer (enforced: its activations are all Identity).
class Network {
 public:
  Network(int input_dim, std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  int input_dim() const { return input_dim_; }
  int output_dim() const { return layers_.back().rows; }
  int depth() const { return static_cast<int>(layers_.size()); }

  std::vector<double> evaluate(std::span<const double> x) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;

  Metrics metrics() const;

  nlohmann::json to_json() const;
  static Network from_json(const nlohmann::json& j);
  std::string serialize() const;
  static Network deserialize(const std::string& bytes);

 private:
  int input_dim_;
  std::vector<Layer> layers_;
};

}  // namespace derhamnet

#include "derhamnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derhamnet {

Layer::Layer(int rows_, int cols_, Activation a)
    : rows(rows_), cols(cols_), bias(rows_, 0.0), act(rows_, a) {
  if (rows_ <= 0 || cols_ < 0)
    throw std::invalid_argument("layer: invalid shape");
}

void Layer::add(int r, int c, double w) {
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw std::out_of_range("layer: triplet index out of range");
  if (w == 0.0)
    throw std::invalid_argument("layer: explicit zero triplet rejected");
  if (!std::isfinite(w))
    throw std::invalid_argument("layer: non-finite weight");
  weights.push_back({r, c, w});
}

void Layer::finalize() {
  std::sort(weights.begin(), weights.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> merged;
  merged.reserve(weights.size());
  for (const auto& t : weights) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
      merged.back().value += t.value;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Triplet& t) { return t.value == 0.0; });
  weights = std::move(merged);
}

long long Layer::nonzeros() const {
  long long n = static_cast<long long>(weights.size());
  for (double b : bias)
    if (b != 0.0) ++n;
  return n;
}

Network::Network(int input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ < 1) throw std::invalid_argument("network: input_dim must be >= 1");
  if (layers_.empty()) throw std::invalid_argument("network: needs at least one layer");
  int prev = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& layer = layers_[l];
    if (layer.cols != prev)
      throw std::invalid_argument("network: layer dimension mismatch");
    if (static_cast<int>(layer.bias.size()) != layer.rows ||
        static_cast<int>(layer.act.size()) != layer.rows)
      throw std::invalid_argument("network: layer bias/activation size mismatch");
    layer.finalize();
    for (double b : layer.bias)
      if (!std::isfinite(b)) throw std::invalid_argument("network: non-finite bias");
    prev = layer.rows;
  }
  for (Activation a : layers_.back().act)
    if (a != Activation::Identity)
      throw std::invalid_argument("network: last layer must have identity activations");
}

std::vector<double> Network::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_)
    throw std::invalid_argument("network: input dimension mismatch");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    next = layer.bias;
    for (const Triplet& t : layer.weights) next[t.row] += t.value * cur[t.col];
    if (l + 1 < layers_.size()) {
      for (int i = 0; i < layer.rows; ++i) {
        switch (layer.act[i]) {
          case Activation::Identity: break;
          case Activation::ReLU: next[i] = relu(next[i]); break;
          case Activation::BiSU: next[i] = bisu(next[i]); break;
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

Eigen::VectorXd Network::evaluate(const Eigen::VectorXd& x) const {
  const std::vector<double> out =
      evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<int>(out.size()));
}

Metrics Network::metrics() const {
  Metrics m;
  m.depth = depth();
  for (const auto& layer : layers_) {
    const long long n = layer.nonzeros();
    m.per_layer.push_back(n);
    m.size += n;
  }
  m.size_in = m.per_layer.front();
  m.size_out = m.per_layer.back();
  return m;
}

namespace {

std::string act_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "id";
    case Activation::ReLU: return "relu";
    case Activation::BiSU: return "bisu";
  }
  throw std::logic_error("bad activation");
}

Activation act_from_name(const std::string& s) {
  if (s == "id") return Activation::Identity;
  if (s == "relu") return Activation::ReLU;
  if (s == "bisu") return Activation::BiSU;
  throw std::invalid_argument("network: unknown activation tag '" + s + "'");
}

}  // namespace

nlohmann::json Network::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  auto layers = nlohmann::json::array();
  for (const auto& layer : layers_) {
    nlohmann::json lj;
    lj["rows"] = layer.rows;
    lj["cols"] = layer.cols;
    auto trips = nlohmann::json::array();
    for (const auto& t : layer.weights)
      trips.push_back(nlohmann::json::array({t.row, t.col, t.value}));
    lj["triplets"] = std::move(trips);
    lj["bias"] = layer.bias;
    auto acts = nlohmann::json::array();
    for (Activation a : layer.act) acts.push_back(act_name(a));
    lj["act"] = std::move(acts);
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  return j;
}

Network Network::from_json(const nlohmann::json& j) {
  const int input_dim = j.at("input_dim").get<int>();
  std::vector<Layer> layers;
  for (const auto& lj : j.at("layers")) {
    Layer layer(lj.at("rows").get<int>(), lj.at("cols").get<int>());
    for (const auto& tj : lj.at("triplets")) {
      if (tj.size() != 3) throw std::invalid_argument("network: bad triplet");
      layer.add(tj[0].get<int>(), tj[1].get<int>(), tj[2].get<double>());
    }
    layer.bias = lj.at("bias").get<std::vector<double>>();
    layer.act.clear();
    for (const auto& aj : lj.at("act")) layer.act.push_back(act_from_name(aj.get<std::string>()));
    layers.push_back(std::move(layer));
  }
  return Network(input_dim, std::move(layers));
}

std::string Network::serialize() const { return to_json().dump(); }

Network Network::deserialize(const std::string& bytes) {
  nlohmann::json j = nlohmann::json::parse(bytes);  // throws on malformed input
  return from_json(j);
}

}  // namespace derhamnet

// Copyright 2026 The Brainnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BRAINNET_GCN_HPP_
#define BRAINNET_GCN_HPP_

// From-scratch graph convolutional network: renormalized symmetric adjacency,
// LeakyReLU graph conv layers, mean readout, dense head, softmax, analytic
// gradients, and step-decay SGD.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "brainnet/errors.hpp"
#include "brainnet/graph.hpp"
#include "brainnet/matrix.hpp"

namespace brainnet::gcn {

struct ModelConfig {
  std::vector<std::size_t> gcn_layers{32, 32};
  double leaky_slope = 0.01;
  std::vector<std::size_t> dense_layers{16, 2};  // final width = number of classes
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr0 = 0.01;
  std::size_t lr_decay_every = 10;
  double lr_decay_factor = 10.0;
  std::uint64_t seed = 1;
};

// Step-decay schedule: lr0 divided by decay_factor once per decay interval.
inline double learning_rate(const ModelConfig& cfg, std::size_t epoch) {
  const auto steps = cfg.lr_decay_every == 0 ? 0 : epoch / cfg.lr_decay_every;
  return cfg.lr0 / std::pow(cfg.lr_decay_factor, static_cast<double>(steps));
}

struct Prediction {
  std::array<double, 2> class_probabilities{0.5, 0.5};
  ClassLabel predicted_class = ClassLabel::control;
};

// Parameter set; doubles as the gradient container since shapes match.
struct Params {
  std::vector<Matrix> conv_w;
  std::vector<std::vector<double>> conv_b;
  std::vector<Matrix> dense_w;  // (in x out)
  std::vector<std::vector<double>> dense_b;
};

struct GcnModel {
  ModelConfig config;
  std::size_t input_width = 6;
  Params params;

  static GcnModel init(const ModelConfig& cfg, std::size_t input_width = 6) {
    if (!(cfg.lr0 >= 0.0)) throw Error("learning rate must be nonnegative");
    if (cfg.dense_layers.empty() || cfg.dense_layers.back() != 2)
      throw Error("dense head must end in 2 class logits");
    GcnModel m;
    m.config = cfg;
    m.input_width = input_width;
    std::mt19937_64 rng(cfg.seed);
    auto glorot = [&rng](std::size_t fan_in, std::size_t fan_out) {
      const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> u(-bound, bound);
      Matrix w(fan_in, fan_out);
      for (double& v : w.data) v = u(rng);
      return w;
    };
    std::size_t width = input_width;
    for (std::size_t out : cfg.gcn_layers) {
      m.params.conv_w.push_back(glorot(width, out));
      m.params.conv_b.emplace_back(out, 0.0);
      width = out;
    }
    for (std::size_t out : cfg.dense_layers) {
      m.params.dense_w.push_back(glorot(width, out));
      m.params.dense_b.emplace_back(out, 0.0);
      width = out;
    }
    return m;
  }

  // flat view over every trainable value, in a fixed traversal order
  std::vector<double*> parameter_view() {
    std::vector<double*> out;
    auto add_matrix = [&out](Matrix& m) {
      for (double& v : m.data) out.push_back(&v);
    };
    auto add_vec = [&out](std::vector<double>& v) {
      for (double& x : v) out.push_back(&x);
    };
    for (auto& w : params.conv_w) add_matrix(w);
    for (auto& b : params.conv_b) add_vec(b);
    for (auto& w : params.dense_w) add_matrix(w);
    for (auto& b : params.dense_b) add_vec(b);
    return out;
  }
};

// Renormalized symmetric adjacency: add self-loops, then scale by inverse
// square-root degree on both sides.
inline Matrix normalize_adjacency(const Matrix& conn) {
  if (conn.rows != conn.cols)
    throw ShapeMismatch("adjacency must be square, got " + std::to_string(conn.rows) + "x" +
                        std::to_string(conn.cols));
  for (std::size_t i = 0; i < conn.rows; ++i)
    for (std::size_t j = i + 1; j < conn.cols; ++j)
      if (std::abs(conn(i, j) - conn(j, i)) > 1e-12)
        throw AsymmetricInput("adjacency differs at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
  for (double v : conn.data)
    if (v < 0.0) throw NegativeWeight("adjacency weights must be nonnegative");

  const std::size_t n = conn.rows;
  Matrix a = conn;
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(d);  // self-loop keeps every degree >= 1
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
  return a;
}

namespace detail {

inline double lrelu(double x, double slope) { return x >= 0.0 ? x : slope * x; }
inline double lrelu_grad(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

inline std::array<double, 2> softmax2(const std::vector<double>& z) {
  const double m = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - m), e1 = std::exp(z[1] - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

}  // namespace detail

// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  Matrix a_hat;
  std::vector<Matrix> conv_in;   // H_l entering each conv layer
  std::vector<Matrix> conv_pre;  // A H_l W_l + b_l before the activation
  std::vector<double> readout;   // mean over nodes of the last conv output
  std::vector<std::vector<double>> dense_in;   // input to each dense layer
  std::vector<std::vector<double>> dense_pre;  // pre-activation of each dense layer
  std::array<double, 2> probs{0.5, 0.5};
};

inline ForwardTrace forward_trace(const GcnModel& model, const graph::BrainGraph& g) {
  if (g.node_features.cols != model.input_width)
    throw ShapeMismatch("graph has " + std::to_string(g.node_features.cols) +
                        " node features, model expects " + std::to_string(model.input_width));
  if (g.connectivity.rows != g.node_features.rows)
    throw ShapeMismatch("connectivity and feature row counts differ");

  ForwardTrace t;
  t.a_hat = normalize_adjacency(g.connectivity);
  const double slope = model.config.leaky_slope;

  Matrix h = g.node_features;
  for (std::size_t l = 0; l < model.params.conv_w.size(); ++l) {
    t.conv_in.push_back(h);
    Matrix z = matmul(matmul(t.a_hat, h), model.params.conv_w[l]);
    for (std::size_t i = 0; i < z.rows; ++i)
      for (std::size_t j = 0; j < z.cols; ++j) z(i, j) += model.params.conv_b[l][j];
    t.conv_pre.push_back(z);
    h = Matrix(z.rows, z.cols);
    for (std::size_t i = 0; i < z.data.size(); ++i) h.data[i] = detail::lrelu(z.data[i], slope);
  }

  t.readout.assign(h.cols, 0.0);
  for (std::size_t i = 0; i < h.rows; ++i)
    for (std::size_t j = 0; j < h.cols; ++j) t.readout[j] += h(i, j);
  for (double& v : t.readout) v /= static_cast<double>(h.rows);

  std::vector<double> a = t.readout;
  const std::size_t n_dense = model.params.dense_w.size();
  for (std::size_t l = 0; l < n_dense; ++l) {
    const Matrix& w = model.params.dense_w[l];
    if (w.rows != a.size()) throw ShapeMismatch("dense layer width chain broken");
    t.dense_in.push_back(a);
    std::vector<double> z(w.cols, 0.0);
    for (std::size_t j = 0; j < w.cols; ++j) {
      for (std::size_t i = 0; i < w.rows; ++i) z[j] += a[i] * w(i, j);
      z[j] += model.params.dense_b[l][j];
    }
    t.dense_pre.push_back(z);
    if (l + 1 < n_dense) {
      a.assign(z.size(), 0.0);
      for (std::size_t j = 0; j < z.size(); ++j) a[j] = detail::lrelu(z[j], slope);
    } else {
      a = z;
    }
  }
  t.probs = detail::softmax2(t.dense_pre.back());
  return t;
}

inline Prediction to_prediction(const std::array<double, 2>& probs) {
  Prediction p;
  p.class_probabilities = probs;
  // ties break toward class index 0 (control)
  p.predicted_class = probs[1] > probs[0] ? ClassLabel::insomnia : ClassLabel::control;
  return p;
}

inline std::pair<Prediction, ForwardTrace> forward(const GcnModel& model,
                                                   const graph::BrainGraph& g) {
  ForwardTrace t = forward_trace(model, g);
  return {to_prediction(t.probs), std::move(t)};
}

inline Prediction predict(const GcnModel& model, const graph::BrainGraph& g) {
  return to_prediction(forward_trace(model, g).probs);
}

namespace detail {

inline Params zeros_like(const Params& p) {
  Params z;
  for (const auto& w : p.conv_w) z.conv_w.emplace_back(w.rows, w.cols);
  for (const auto& b : p.conv_b) z.conv_b.emplace_back(b.size(), 0.0);
  for (const auto& w : p.dense_w) z.dense_w.emplace_back(w.rows, w.cols);
  for (const auto& b : p.dense_b) z.dense_b.emplace_back(b.size(), 0.0);
  return z;
}

// Accumulate one sample's gradients into `acc`; returns the sample's loss.
inline double backward_one(const GcnModel& model, const graph::BrainGraph& g, Params& acc) {
  const ForwardTrace t = forward_trace(model, g);
  const double slope = model.config.leaky_slope;
  const std::size_t truth = static_cast<std::size_t>(g.class_label);

  // stable cross-entropy from the logits
  const auto& logits = t.dense_pre.back();
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  const double loss = lse - logits[truth];

  // softmax + cross-entropy gradient
  std::vector<double> dz{t.probs[0], t.probs[1]};
  dz[truth] -= 1.0;

  for (std::size_t l = model.params.dense_w.size(); l-- > 0;) {
    const Matrix& w = model.params.dense_w[l];
    const auto& a_in = t.dense_in[l];
    for (std::size_t i = 0; i < w.rows; ++i)
      for (std::size_t j = 0; j < w.cols; ++j) acc.dense_w[l](i, j) += a_in[i] * dz[j];
    for (std::size_t j = 0; j < w.cols; ++j) acc.dense_b[l][j] += dz[j];
    std::vector<double> da(w.rows, 0.0);
    for (std::size_t i = 0; i < w.rows; ++i)
      for (std::size_t j = 0; j < w.cols; ++j) da[i] += w(i, j) * dz[j];
    if (l > 0) {
      dz.assign(da.size(), 0.0);
      for (std::size_t i = 0; i < da.size(); ++i)
        dz[i] = da[i] * lrelu_grad(t.dense_pre[l - 1][i], slope);
    } else {
      dz = da;  // gradient w.r.t. the readout vector
    }
  }

  const std::size_t n_conv = model.params.conv_w.size();
  const std::size_t n_nodes = g.node_features.rows;
  // mean readout spreads the gradient evenly over node rows
  Matrix dh(n_nodes, dz.size());
  for (std::size_t i = 0; i < n_nodes; ++i)
    for (std::size_t j = 0; j < dz.size(); ++j)
      dh(i, j) = dz[j] / static_cast<double>(n_nodes);

  for (std::size_t l = n_conv; l-- > 0;) {
    const Matrix& z_pre = t.conv_pre[l];
    Matrix dzm(z_pre.rows, z_pre.cols);
    for (std::size_t i = 0; i < z_pre.data.size(); ++i)
      dzm.data[i] = dh.data[i] * lrelu_grad(z_pre.data[i], slope);
    const Matrix ah = matmul(t.a_hat, t.conv_in[l]);
    const Matrix dw = matmul(transpose(ah), dzm);
    for (std::size_t i = 0; i < dw.data.size(); ++i) acc.conv_w[l].data[i] += dw.data[i];
    for (std::size_t j = 0; j < dzm.cols; ++j)
      for (std::size_t i = 0; i < dzm.rows; ++i) acc.conv_b[l][j] += dzm(i, j);
    if (l > 0) dh = matmul(matmul(t.a_hat, dzm), transpose(model.params.conv_w[l]));
  }
  return loss;
}

}  // namespace detail

struct LossGrads {
  double loss = 0.0;
  Params grads;
};

// Mean cross-entropy and mean analytic gradients over the indexed batch.
inline LossGrads loss_and_gradients(const GcnModel& model,
                                    const std::vector<graph::BrainGraph>& graphs,
                                    const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw EmptyInput("gradient batch is empty");
  LossGrads out;
  out.grads = detail::zeros_like(model.params);
  for (std::size_t idx : indices) out.loss += detail::backward_one(model, graphs[idx], out.grads);
  const double inv = 1.0 / static_cast<double>(indices.size());
  out.loss *= inv;
  auto scale = [inv](auto& seq) {
    for (auto& item : seq)
      for (double& v : item.data) v *= inv;
  };
  scale(out.grads.conv_w);
  scale(out.grads.dense_w);
  for (auto& b : out.grads.conv_b)
    for (double& v : b) v *= inv;
  for (auto& b : out.grads.dense_b)
    for (double& v : b) v *= inv;
  return out;
}

inline LossGrads loss_and_gradients(const GcnModel& model,
                                    const std::vector<graph::BrainGraph>& graphs) {
  std::vector<std::size_t> all(graphs.size());
  std::iota(all.begin(), all.end(), 0);
  return loss_and_gradients(model, graphs, all);
}

struct TrainResult {
  GcnModel model;
  std::vector<double> epoch_loss;  // sample-weighted mean per epoch
  std::vector<std::string> warnings;
};

// Shuffled mini-batch SGD with the step-decay schedule. Deterministic for a
// fixed seed: one shuffle stream drives every epoch in order.
inline TrainResult train(GcnModel model, const std::vector<graph::BrainGraph>& graphs) {
  if (graphs.empty()) throw EmptyInput("no training graphs");
  const ModelConfig& cfg = model.config;

  TrainResult result;
  bool saw[2] = {false, false};
  for (const auto& g : graphs) saw[static_cast<std::size_t>(g.class_label)] = true;
  if (!saw[0] || !saw[1])
    result.warnings.push_back("training set contains a single class; accuracy will be trivial");

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<std::size_t> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);

  const std::size_t batch = std::max<std::size_t>(1, cfg.batch_size);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate(cfg, epoch);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(stop));
      const auto lg = loss_and_gradients(model, graphs, idx);
      if (!std::isfinite(lg.loss))
        throw NonFiniteLoss("loss diverged at epoch " + std::to_string(epoch) + ", batch from " +
                            std::to_string(start) + " (lr " + std::to_string(lr) + ")");
      loss_sum += lg.loss * static_cast<double>(idx.size());

      for (std::size_t l = 0; l < model.params.conv_w.size(); ++l) {
        for (std::size_t i = 0; i < model.params.conv_w[l].data.size(); ++i)
          model.params.conv_w[l].data[i] -= lr * lg.grads.conv_w[l].data[i];
        for (std::size_t i = 0; i < model.params.conv_b[l].size(); ++i)
          model.params.conv_b[l][i] -= lr * lg.grads.conv_b[l][i];
      }
      for (std::size_t l = 0; l < model.params.dense_w.size(); ++l) {
        for (std::size_t i = 0; i < model.params.dense_w[l].data.size(); ++i)
          model.params.dense_w[l].data[i] -= lr * lg.grads.dense_w[l].data[i];
        for (std::size_t i = 0; i < model.params.dense_b[l].size(); ++i)
          model.params.dense_b[l][i] -= lr * lg.grads.dense_b[l][i];
      }
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }
  result.model = std::move(model);
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints: binary for exact round-trips, JSON for inspection.

namespace detail {

constexpr char kModelMagic[4] = {'B', 'N', 'M', 'D'};
constexpr std::uint8_t kModelVersion = 1;

inline void put_sizes(std::ostream& os, const std::vector<std::size_t>& v) {
  graph::detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(v.size()));
  for (std::size_t x : v) graph::detail::put<std::uint64_t>(os, x);
}

inline std::vector<std::size_t> get_sizes(std::istream& is) {
  const auto n = graph::detail::get<std::uint32_t>(is);
  if (n > 1024) throw CorruptCache("layer list implausibly long");
  std::vector<std::size_t> v(n);
  for (auto& x : v) x = static_cast<std::size_t>(graph::detail::get<std::uint64_t>(is));
  return v;
}

inline void put_dvec(std::ostream& os, const std::vector<double>& v) {
  graph::detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

inline std::vector<double> get_dvec(std::istream& is) {
  const auto n = graph::detail::get<std::uint32_t>(is);
  if (n > (1u << 24)) throw CorruptCache("vector length implausible");
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw CorruptCache("checkpoint truncated mid-vector");
  return v;
}

}  // namespace detail

inline void save_model(std::ostream& os, const GcnModel& m) {
  os.write(detail::kModelMagic, sizeof detail::kModelMagic);
  graph::detail::put(os, detail::kModelVersion);
  graph::detail::put<std::uint64_t>(os, m.input_width);
  detail::put_sizes(os, m.config.gcn_layers);
  graph::detail::put(os, m.config.leaky_slope);
  detail::put_sizes(os, m.config.dense_layers);
  graph::detail::put<std::uint64_t>(os, m.config.epochs);
  graph::detail::put<std::uint64_t>(os, m.config.batch_size);
  graph::detail::put(os, m.config.lr0);
  graph::detail::put<std::uint64_t>(os, m.config.lr_decay_every);
  graph::detail::put(os, m.config.lr_decay_factor);
  graph::detail::put<std::uint64_t>(os, m.config.seed);
  auto put_layer = [&os](const std::vector<Matrix>& ws, const std::vector<std::vector<double>>& bs) {
    graph::detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(ws.size()));
    for (std::size_t l = 0; l < ws.size(); ++l) {
      graph::detail::put_matrix(os, ws[l]);
      detail::put_dvec(os, bs[l]);
    }
  };
  put_layer(m.params.conv_w, m.params.conv_b);
  put_layer(m.params.dense_w, m.params.dense_b);
  if (!os) throw Error("model checkpoint write failed");
}

inline GcnModel load_model(std::istream& is) {
  char magic[4];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, detail::kModelMagic, sizeof magic) != 0)
    throw CorruptCache("bad model magic");
  if (graph::detail::get<std::uint8_t>(is) != detail::kModelVersion)
    throw CorruptCache("unsupported model version");
  GcnModel m;
  m.input_width = static_cast<std::size_t>(graph::detail::get<std::uint64_t>(is));
  m.config.gcn_layers = detail::get_sizes(is);
  m.config.leaky_slope = graph::detail::get<double>(is);
  m.config.dense_layers = detail::get_sizes(is);
  m.config.epochs = static_cast<std::size_t>(graph::detail::get<std::uint64_t>(is));
  m.config.batch_size = static_cast<std::size_t>(graph::detail::get<std::uint64_t>(is));
  m.config.lr0 = graph::detail::get<double>(is);
  m.config.lr_decay_every = static_cast<std::size_t>(graph::detail::get<std::uint64_t>(is));
  m.config.lr_decay_factor = graph::detail::get<double>(is);
  m.config.seed = graph::detail::get<std::uint64_t>(is);
  auto get_layer = [&is](std::vector<Matrix>& ws, std::vector<std::vector<double>>& bs) {
    const auto n = graph::detail::get<std::uint32_t>(is);
    if (n > 1024) throw CorruptCache("layer count implausible");
    for (std::uint32_t l = 0; l < n; ++l) {
      ws.push_back(graph::detail::get_matrix(is));
      bs.push_back(detail::get_dvec(is));
    }
  };
  get_layer(m.params.conv_w, m.params.conv_b);
  get_layer(m.params.dense_w, m.params.dense_b);
  return m;
}

inline void save_model_file(const std::string& path, const GcnModel& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  save_model(os, m);
}

inline GcnModel load_model_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "' for reading");
  return load_model(is);
}

inline nlohmann::json to_json(const GcnModel& m) {
  nlohmann::json j;
  j["input_width"] = m.input_width;
  j["config"] = {{"gcn_layers", m.config.gcn_layers},
                 {"leaky_slope", m.config.leaky_slope},
                 {"dense_layers", m.config.dense_layers},
                 {"epochs", m.config.epochs},
                 {"batch_size", m.config.batch_size},
                 {"lr0", m.config.lr0},
                 {"lr_decay_every", m.config.lr_decay_every},
                 {"lr_decay_factor", m.config.lr_decay_factor},
                 {"seed", m.config.seed}};
  auto matrix_rows = [](const Matrix& mm) {
    std::vector<std::vector<double>> rows(mm.rows, std::vector<double>(mm.cols));
    for (std::size_t i = 0; i < mm.rows; ++i)
      for (std::size_t k = 0; k < mm.cols; ++k) rows[i][k] = mm(i, k);
    return rows;
  };
  j["conv_layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < m.params.conv_w.size(); ++l)
    j["conv_layers"].push_back(
        {{"weights", matrix_rows(m.params.conv_w[l])}, {"bias", m.params.conv_b[l]}});
  j["dense_layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < m.params.dense_w.size(); ++l)
    j["dense_layers"].push_back(
        {{"weights", matrix_rows(m.params.dense_w[l])}, {"bias", m.params.dense_b[l]}});
  return j;
}

}  // namespace brainnet::gcn

#endif  // BRAINNET_GCN_HPP_

#include "airink/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "airink/checkpoint.hpp"
#include "airink/error.hpp"
#include "airink/lstm.hpp"
#include "airink/neural.hpp"
#include "text.hpp"

namespace airink {
namespace {

using ops::Matrix;

std::string layer_name(std::size_t l, const char* what) {
  return "lstm" + std::to_string(l) + "." + what;
}

ParameterSet init_parameters(const GeneratorConfig& cfg) {
  ParameterSet p;
  const auto h = cfg.hidden_size;
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::size_t in = l == 0 ? 2 : h;
    const auto w_name = layer_name(l, "w");
    p.add(w_name, glorot_init({4 * h, in + h}, derive_seed(cfg.seed, "generator/" + w_name)));
    p.add(layer_name(l, "b"), bias_init(4 * h));
  }
  p.add("head.w", glorot_init({6 * cfg.mixtures, h}, derive_seed(cfg.seed, "generator/head.w")));
  p.add("head.b", bias_init(6 * cfg.mixtures));
  return p;
}

/// Column t*B + b of the returned matrix holds step t of window b.
Matrix step_inputs(std::span<const AccelSeries> windows, std::size_t t) {
  Matrix x = Matrix::Zero(2, static_cast<Eigen::Index>(windows.size()));
  if (t == 0) return x;
  for (std::size_t b = 0; b < windows.size(); ++b) {
    x(0, static_cast<Eigen::Index>(b)) = windows[b].ax[t - 1];
    x(1, static_cast<Eigen::Index>(b)) = windows[b].ay[t - 1];
  }
  return x;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (hidden_size == 0 || layers == 0 || sequence_length == 0 || epochs == 0 || mixtures == 0 ||
      batch_size == 0) {
    throw InvalidArgument("generator sizes and epoch count must be positive");
  }
  if (!(learning_rate > 0.0)) throw InvalidArgument("generator learning rate must be positive");
  if (!(dropout_keep > 0.0 && dropout_keep <= 1.0)) {
    throw InvalidArgument("generator dropout keep probability must lie in (0, 1]");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("generator train fraction must lie in (0, 1)");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw InvalidArgument("generator momentum must lie in [0, 1)");
  }
  if (!(grad_clip > 0.0)) throw InvalidArgument("generator grad_clip must be positive");
}

std::map<std::string, std::string> GeneratorConfig::to_map() const {
  using text::format_double;
  return {{"hidden_size", std::to_string(hidden_size)},
          {"layers", std::to_string(layers)},
          {"sequence_length", std::to_string(sequence_length)},
          {"epochs", std::to_string(epochs)},
          {"learning_rate", format_double(learning_rate)},
          {"mixtures", std::to_string(mixtures)},
          {"dropout_keep", format_double(dropout_keep)},
          {"train_fraction", format_double(train_fraction)},
          {"seed", std::to_string(seed)},
          {"batch_size", std::to_string(batch_size)},
          {"momentum", format_double(momentum)},
          {"nesterov", nesterov ? "true" : "false"},
          {"grad_clip", format_double(grad_clip)}};
}

GeneratorConfig GeneratorConfig::from_map(const std::map<std::string, std::string>& kv) {
  GeneratorConfig c;
  auto get_size = [&](const char* key, std::size_t& out) {
    if (auto it = kv.find(key); it != kv.end()) {
      std::uint64_t v = 0;
      if (!text::parse_u64(it->second, v)) throw ParseError(std::string("bad generator ") + key);
      out = static_cast<std::size_t>(v);
    }
  };
  auto get_double = [&](const char* key, double& out) {
    if (auto it = kv.find(key); it != kv.end()) {
      if (!text::parse_double(it->second, out)) {
        throw ParseError(std::string("bad generator ") + key);
      }
    }
  };
  get_size("hidden_size", c.hidden_size);
  get_size("layers", c.layers);
  get_size("sequence_length", c.sequence_length);
  get_size("epochs", c.epochs);
  get_double("learning_rate", c.learning_rate);
  get_size("mixtures", c.mixtures);
  get_double("dropout_keep", c.dropout_keep);
  get_double("train_fraction", c.train_fraction);
  if (auto it = kv.find("seed"); it != kv.end() && !text::parse_u64(it->second, c.seed)) {
    throw ParseError("bad generator seed");
  }
  get_size("batch_size", c.batch_size);
  get_double("momentum", c.momentum);
  if (auto it = kv.find("nesterov"); it != kv.end() && !text::parse_bool(it->second, c.nesterov)) {
    throw ParseError("bad generator nesterov flag");
  }
  get_double("grad_clip", c.grad_clip);
  return c;
}

GeneratorModel::GeneratorModel(const GeneratorConfig& config, Label class_label)
    : GeneratorModel(config, class_label, init_parameters(config)) {}

GeneratorModel::GeneratorModel(const GeneratorConfig& config, Label class_label,
                               ParameterSet parameters)
    : config_(config), label_(class_label), params_(std::move(parameters)) {
  config_.validate();
  const auto expected = init_parameters(config_);
  if (expected.names() != params_.names()) {
    throw ShapeError("generator parameters do not match the configuration");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].shape() != params_[i].shape()) {
      throw ShapeError("generator parameter " + expected.name(i) + " has shape " +
                       shape_string(params_[i].shape()) + ", expected " +
                       shape_string(expected[i].shape()));
    }
  }
}

double GeneratorModel::sequence_loss(std::span<const AccelSeries> windows, ParameterSet* grads,
                                     RandomStream* dropout_rng) const {
  if (windows.empty()) throw InvalidArgument("sequence_loss needs at least one window");
  const std::size_t steps = windows.front().size();
  for (const auto& w : windows) {
    if (w.size() != steps || w.ay.size() != steps) {
      throw ShapeError("sequence_loss windows must share one length");
    }
  }
  const auto batch = static_cast<Eigen::Index>(windows.size());
  const auto hidden = static_cast<Eigen::Index>(config_.hidden_size);
  const std::size_t layers = config_.layers;
  const bool training = dropout_rng != nullptr && config_.dropout_keep < 1.0;
  const bool backward = grads != nullptr;

  std::vector<Matrix> below(steps);
  for (std::size_t t = 0; t < steps; ++t) below[t] = step_inputs(windows, t);

  std::vector<std::vector<ops::LstmStepCache>> caches(layers);
  std::vector<std::vector<Matrix>> masks(layers);
  Matrix top(hidden, static_cast<Eigen::Index>(steps) * batch);

  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = params_.at(layer_name(l, "w"));
    const auto& b = params_.at(layer_name(l, "b"));
    if (backward) caches[l].resize(steps);
    Matrix h = Matrix::Zero(hidden, batch);
    Matrix c = Matrix::Zero(hidden, batch);
    Matrix h_next;
    Matrix c_next;
    const bool drop_after = training && l + 1 < layers;
    if (drop_after) masks[l].resize(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      ops::lstm_step_forward(w, b, below[t], h, c, h_next, c_next,
                             backward ? &caches[l][t] : nullptr);
      std::swap(h, h_next);
      std::swap(c, c_next);
      if (l + 1 == layers) {
        top.middleCols(static_cast<Eigen::Index>(t) * batch, batch) = h;
      } else if (drop_after) {
        Matrix& mask = masks[l][t];
        mask.resize(hidden, batch);
        dropout_mask({mask.data(), static_cast<std::size_t>(mask.size())}, config_.dropout_keep,
                     *dropout_rng);
        below[t] = h.cwiseProduct(mask);
      } else {
        below[t] = h;
      }
    }
  }

  const auto& head_w = params_.at("head.w");
  const auto& head_b = params_.at("head.b");
  Matrix raw;
  ops::dense_forward(head_w, head_b, top, raw);

  const double count = static_cast<double>(steps) * static_cast<double>(batch);
  double total = 0.0;
  Matrix draw;
  if (backward) draw.resize(raw.rows(), raw.cols());
  const auto raw_len = static_cast<std::size_t>(raw.rows());
  for (std::size_t t = 0; t < steps; ++t) {
    for (Eigen::Index b = 0; b < batch; ++b) {
      const auto col = static_cast<Eigen::Index>(t) * batch + b;
      const auto& win = windows[static_cast<std::size_t>(b)];
      std::span<double> g;
      if (backward) g = {draw.col(col).data(), raw_len};
      total += mdn_nll_raw({raw.col(col).data(), raw_len}, win.ax[t], win.ay[t], g);
    }
  }
  const double loss = total / count;
  if (!backward) return loss;

  draw /= count;
  Matrix dtop;
  ops::dense_backward(head_w, top, draw, grads->at("head.w"), grads->at("head.b"), &dtop);

  std::vector<Matrix> upstream(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    upstream[t] = dtop.middleCols(static_cast<Eigen::Index>(t) * batch, batch);
  }
  for (std::size_t l = layers; l-- > 0;) {
    const auto& w = params_.at(layer_name(l, "w"));
    auto& dw = grads->at(layer_name(l, "w"));
    auto& db = grads->at(layer_name(l, "b"));
    Matrix dh_next = Matrix::Zero(hidden, batch);
    Matrix dc_next = Matrix::Zero(hidden, batch);
    Matrix dx, dh_prev, dc_prev;
    for (std::size_t t = steps; t-- > 0;) {
      Matrix dh = upstream[t] + dh_next;
      ops::lstm_step_backward(w, caches[l][t], dh, dc_next, dw, db, dx, dh_prev, dc_prev);
      std::swap(dh_next, dh_prev);
      std::swap(dc_next, dc_prev);
      if (l > 0) {
        upstream[t] = masks[l - 1].empty() ? dx : Matrix(dx.cwiseProduct(masks[l - 1][t]));
      }
    }
  }
  return loss;
}

std::vector<AccelSeries> GeneratorModel::sample(std::span<const std::uint64_t> seeds) const {
  const auto batch = static_cast<Eigen::Index>(seeds.size());
  const auto hidden = static_cast<Eigen::Index>(config_.hidden_size);
  const std::size_t steps = config_.sequence_length;
  std::vector<AccelSeries> out(seeds.size());
  std::vector<RandomStream> streams;
  streams.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    streams.emplace_back(seeds[i]);
    out[i].label = label_;
    out[i].ax.reserve(steps);
    out[i].ay.reserve(steps);
  }
  if (seeds.empty()) return out;

  std::vector<Matrix> h(config_.layers, Matrix::Zero(hidden, batch));
  std::vector<Matrix> c(config_.layers, Matrix::Zero(hidden, batch));
  Matrix x = Matrix::Zero(2, batch);
  Matrix h_next, c_next, raw;
  const auto& head_w = params_.at("head.w");
  const auto& head_b = params_.at("head.b");
  const auto raw_len = 6 * config_.mixtures;
  for (std::size_t t = 0; t < steps; ++t) {
    const Matrix* input = &x;
    for (std::size_t l = 0; l < config_.layers; ++l) {
      ops::lstm_step_forward(params_.at(layer_name(l, "w")), params_.at(layer_name(l, "b")),
                             *input, h[l], c[l], h_next, c_next, nullptr);
      std::swap(h[l], h_next);
      std::swap(c[l], c_next);
      input = &h[l];
    }
    ops::dense_forward(head_w, head_b, *input, raw);
    for (Eigen::Index b = 0; b < batch; ++b) {
      const auto mix = mdn_params({raw.col(b).data(), raw_len});
      const auto draw = sample_mixture(mix, streams[static_cast<std::size_t>(b)]);
      x(0, b) = draw.x;
      x(1, b) = draw.y;
      out[static_cast<std::size_t>(b)].ax.push_back(draw.x);
      out[static_cast<std::size_t>(b)].ay.push_back(draw.y);
    }
  }
  return out;
}

MixtureParams GeneratorModel::initial_mixture() const {
  const auto hidden = static_cast<Eigen::Index>(config_.hidden_size);
  Matrix h = Matrix::Zero(hidden, 1);
  Matrix c = Matrix::Zero(hidden, 1);
  Matrix x = Matrix::Zero(2, 1);
  Matrix h_next, c_next, raw;
  const Matrix* input = &x;
  std::vector<Matrix> hs(config_.layers);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Matrix hl = Matrix::Zero(hidden, 1);
    Matrix cl = Matrix::Zero(hidden, 1);
    ops::lstm_step_forward(params_.at(layer_name(l, "w")), params_.at(layer_name(l, "b")),
                           *input, hl, cl, h_next, c_next, nullptr);
    hs[l] = h_next;
    input = &hs[l];
  }
  ops::dense_forward(params_.at("head.w"), params_.at("head.b"), *input, raw);
  return mdn_params({raw.data(), static_cast<std::size_t>(raw.size())});
}

std::vector<AccelSeries> make_windows(std::span<const AccelSeries> series, std::size_t length) {
  std::vector<AccelSeries> out;
  for (const auto& s : series) {
    for (std::size_t start = 0; start + length <= s.size(); start += length) {
      AccelSeries w;
      w.label = s.label;
      w.source = s.source;
      w.ax.assign(s.ax.begin() + static_cast<std::ptrdiff_t>(start),
                  s.ax.begin() + static_cast<std::ptrdiff_t>(start + length));
      w.ay.assign(s.ay.begin() + static_cast<std::ptrdiff_t>(start),
                  s.ay.begin() + static_cast<std::ptrdiff_t>(start + length));
      out.push_back(std::move(w));
    }
  }
  return out;
}

GeneratorModel train_generator(std::span<const AccelSeries> series, const GeneratorConfig& cfg) {
  cfg.validate();
  if (series.size() < 2) throw InvalidArgument("generator training needs at least 2 series");
  const Label label = series.front().label;
  for (const auto& s : series) {
    if (s.label != label) throw LabelError("generator training series mix both classes");
  }

  std::vector<std::size_t> order(series.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream split_rng(cfg.seed, "generator/split");
  shuffle(order.begin(), order.end(), split_rng);
  const auto n = series.size();
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(cfg.train_fraction * static_cast<double>(n))), 1, n - 1);
  std::vector<AccelSeries> train_series, val_series;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train_series : val_series).push_back(series[order[i]]);
  }
  const auto train = make_windows(train_series, cfg.sequence_length);
  const auto validation = make_windows(val_series, cfg.sequence_length);
  if (train.empty()) {
    throw TooShort("no training series reaches " + std::to_string(cfg.sequence_length) +
                   " points");
  }

  GeneratorModel model(cfg, label);
  auto grads = model.parameters().zeros_like();
  auto state = OptimState::for_parameters(model.parameters(), cfg.learning_rate, cfg.momentum,
                                          cfg.nesterov);
  RandomStream shuffle_rng(cfg.seed, "generator/shuffle");
  RandomStream dropout_rng(cfg.seed, "generator/dropout");

  auto record = [&](std::size_t epoch) {
    try {
      model.curves().train_loss.push_back(model.sequence_loss(train));
      model.curves().validation_loss.push_back(
          validation.empty() ? std::nan("") : model.sequence_loss(validation));
    } catch (const NumericalError&) {
      throw DivergedTraining("generator loss became non-finite at epoch " +
                             std::to_string(epoch));
    }
  };
  record(0);

  std::vector<std::size_t> idx(train.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<AccelSeries> batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(idx.begin(), idx.end(), shuffle_rng);
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t k = start; k < std::min(idx.size(), start + cfg.batch_size); ++k) {
        batch.push_back(train[idx[k]]);
      }
      grads.set_zero();
      double loss = 0.0;
      try {
        loss = model.sequence_loss(batch, &grads, &dropout_rng);
      } catch (const NumericalError&) {
        loss = std::nan("");
      }
      if (!std::isfinite(loss)) {
        throw DivergedTraining("generator loss became non-finite at epoch " +
                               std::to_string(epoch));
      }
      clip_global_norm(grads, cfg.grad_clip);
      sgd_step(model.parameters(), grads, state);
    }
    record(epoch);
  }
  return model;
}

AccelSeries sample_sequence(const GeneratorModel& model, std::uint64_t seed) {
  const std::uint64_t seeds[] = {seed};
  return std::move(model.sample(seeds).front());
}

void save_generator(const GeneratorModel& model, const std::filesystem::path& path,
                    const std::map<std::string, std::string>& context) {
  Checkpoint ckpt;
  ckpt.parameters = model.parameters();
  for (const auto& [k, v] : model.config().to_map()) ckpt.metadata["generator." + k] = v;
  ckpt.metadata["class"] = std::string(label_name(model.class_label()));
  ckpt.metadata["model"] = "generator";
  save_checkpoint(path, ckpt);

  nlohmann::ordered_json meta;
  meta["class"] = label_name(model.class_label());
  meta["seed"] = model.config().seed;
  meta["config"] = model.config().to_map();
  for (const auto& [k, v] : context) meta[k] = v;
  meta["train_loss"] = model.curves().train_loss;
  meta["validation_loss"] = model.curves().validation_loss;
  std::ofstream out(path.string() + ".meta.json", std::ios::trunc);
  if (!out) throw IoError("cannot write generator sidecar for " + path.string());
  out << meta.dump(2) << '\n';
}

GeneratorModel load_generator(const std::filesystem::path& path) {
  auto ckpt = load_checkpoint(path);
  if (ckpt.metadata["model"] != "generator") {
    throw ParseError(path.string() + " is not a generator checkpoint");
  }
  std::map<std::string, std::string> cfg;
  for (const auto& [k, v] : ckpt.metadata) {
    if (k.rfind("generator.", 0) == 0) cfg[k.substr(10)] = v;
  }
  return GeneratorModel(GeneratorConfig::from_map(cfg), parse_label(ckpt.metadata["class"]),
                        std::move(ckpt.parameters));
}

}  // namespace airink

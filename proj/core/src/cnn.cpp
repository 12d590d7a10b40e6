#include "airink/cnn.hpp"

#include <string>

#include "airink/error.hpp"
#include "airink/neural.hpp"

namespace airink {
namespace {

using ops::Geometry;
using ops::Matrix;

std::string conv_name(int i, const char* what) { return "conv" + std::to_string(i) + "." + what; }

bool pools_after(int conv_index) { return conv_index == 1 || conv_index == 3; }

ParameterSet init_parameters(const CnnArch& arch, std::uint64_t seed) {
  if (arch.input_side < 4 || arch.input_side % 4 != 0) {
    throw InvalidShape("CNN input side must be a positive multiple of 4");
  }
  ParameterSet p;
  int channels = 1;
  for (int i = 0; i < 5; ++i) {
    const auto out = static_cast<std::size_t>(arch.filters[static_cast<std::size_t>(i)]);
    const auto w = conv_name(i, "w");
    p.add(w, glorot_init({out, static_cast<std::size_t>(channels), 3, 3}, derive_seed(seed, w)));
    p.add(conv_name(i, "b"), bias_init(out));
    channels = static_cast<int>(out);
  }
  const int side = arch.input_side / 4;
  const auto flat = static_cast<std::size_t>(channels * side * side);
  const auto dense = static_cast<std::size_t>(arch.dense_units);
  p.add("fc0.w", glorot_init({dense, flat}, derive_seed(seed, "fc0.w")));
  p.add("fc0.b", bias_init(dense));
  p.add("fc1.w", glorot_init({1, dense}, derive_seed(seed, "fc1.w")));
  p.add("fc1.b", bias_init(1));
  return p;
}

struct Trace {
  std::array<Matrix, 5> conv_in;
  std::array<Geometry, 5> conv_geom;
  std::array<Matrix, 5> relu_out;
  std::array<std::vector<std::int32_t>, 5> pool_arg;
  Matrix flat;
  Matrix fc0_out;
  Matrix logits;
};

void forward(const CnnArch& arch, const ParameterSet& p, const Matrix& images, Trace& tr) {
  Geometry g{1, arch.input_side, arch.input_side};
  if (images.rows() != g.size()) throw ShapeError("CNN input has the wrong pixel count");
  Matrix x = images;
  Matrix z;
  for (int i = 0; i < 5; ++i) {
    const auto si = static_cast<std::size_t>(i);
    ops::conv3x3_forward(p.at(conv_name(i, "w")), p.at(conv_name(i, "b")), g, x, z);
    tr.conv_in[si] = std::move(x);
    tr.conv_geom[si] = g;
    g.channels = arch.filters[si];
    ops::relu_forward(z, tr.relu_out[si]);
    if (pools_after(i)) {
      ops::maxpool2x2_forward(g, tr.relu_out[si], x, tr.pool_arg[si]);
      g.height /= 2;
      g.width /= 2;
    } else {
      x = tr.relu_out[si];
    }
  }
  tr.flat = std::move(x);
  ops::dense_forward(p.at("fc0.w"), p.at("fc0.b"), tr.flat, z);
  ops::relu_forward(z, tr.fc0_out);
  ops::dense_forward(p.at("fc1.w"), p.at("fc1.b"), tr.fc0_out, tr.logits);
}

}  // namespace

Cnn::Cnn(std::uint64_t seed, const CnnArch& arch) : arch_(arch), params_(init_parameters(arch, seed)) {}

Cnn::Cnn(const CnnArch& arch, ParameterSet parameters) : arch_(arch), params_(std::move(parameters)) {
  const auto expected = init_parameters(arch_, 0);
  if (expected.names() != params_.names()) throw ShapeError("CNN parameters do not match the arch");
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i].shape() != params_[i].shape()) {
      throw ShapeError("CNN parameter " + expected.name(i) + " has the wrong shape");
    }
  }
}

Matrix Cnn::logits(const Matrix& images) const {
  Trace tr;
  forward(arch_, params_, images, tr);
  return tr.logits;
}

double Cnn::loss(const Matrix& images, const std::vector<double>& targets, ParameterSet* grads) const {
  Trace tr;
  forward(arch_, params_, images, tr);
  Matrix dlogits;
  const double loss = ops::bce_with_logits(tr.logits, targets, grads ? &dlogits : nullptr);
  if (!grads) return loss;

  Matrix d;
  ops::dense_backward(params_.at("fc1.w"), tr.fc0_out, dlogits, grads->at("fc1.w"),
                      grads->at("fc1.b"), &d);
  Matrix dz;
  ops::relu_backward(tr.fc0_out, d, dz);
  ops::dense_backward(params_.at("fc0.w"), tr.flat, dz, grads->at("fc0.w"), grads->at("fc0.b"), &d);
  for (int i = 4; i >= 0; --i) {
    const auto si = static_cast<std::size_t>(i);
    Geometry out_g = tr.conv_geom[si];
    out_g.channels = arch_.filters[si];
    if (pools_after(i)) {
      Matrix unpooled;
      ops::maxpool2x2_backward(out_g, tr.pool_arg[si], d, unpooled);
      d = std::move(unpooled);
    }
    ops::relu_backward(tr.relu_out[si], d, dz);
    ops::conv3x3_backward(params_.at(conv_name(i, "w")), tr.conv_geom[si], tr.conv_in[si], dz,
                          grads->at(conv_name(i, "w")), grads->at(conv_name(i, "b")),
                          i > 0 ? &d : nullptr);
  }
  return loss;
}

double Cnn::probability(const GrayImage& image) const {
  const GrayImage* one[] = {&image};
  return ops::sigmoid(logits(image_batch(std::span<const GrayImage* const>(one)))(0, 0));
}

std::vector<double> Cnn::probabilities(std::span<const GrayImage> images) const {
  std::vector<double> out;
  out.reserve(images.size());
  constexpr std::size_t kChunk = 16;
  for (std::size_t start = 0; start < images.size(); start += kChunk) {
    const auto n = std::min(kChunk, images.size() - start);
    const auto z = logits(image_batch(images.subspan(start, n)));
    for (Eigen::Index i = 0; i < z.cols(); ++i) out.push_back(ops::sigmoid(z(0, i)));
  }
  return out;
}

Matrix image_batch(std::span<const GrayImage> images) {
  Matrix m(kImageSide * kImageSide, static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i].pixels.begin(), images[i].pixels.end(), m.col(static_cast<Eigen::Index>(i)).data());
  }
  return m;
}

Matrix image_batch(std::span<const GrayImage* const> images) {
  Matrix m(kImageSide * kImageSide, static_cast<Eigen::Index>(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::copy(images[i]->pixels.begin(), images[i]->pixels.end(), m.col(static_cast<Eigen::Index>(i)).data());
  }
  return m;
}

}  // namespace airink

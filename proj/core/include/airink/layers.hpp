#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "airink/tensor.hpp"

/// Differentiable kernel operations with hand-written reverse-mode adjoints.
/// Activations are column-major matrices with one column per batch sample.
namespace airink::ops {

using Matrix = Eigen::MatrixXd;

// y = W x + b, W shaped (out, in).
void dense_forward(const Tensor& w, const Tensor& b, const Matrix& x, Matrix& y);
/// Accumulates into dw/db; writes dx when non-null.
void dense_backward(const Tensor& w, const Matrix& x, const Matrix& dy, Tensor& dw, Tensor& db,
                    Matrix* dx);

void relu_forward(const Matrix& x, Matrix& y);
void relu_backward(const Matrix& y, const Matrix& dy, Matrix& dx);

double sigmoid(double z);
void sigmoid_forward(const Matrix& x, Matrix& y);
void sigmoid_backward(const Matrix& y, const Matrix& dy, Matrix& dx);

void tanh_forward(const Matrix& x, Matrix& y);
void tanh_backward(const Matrix& y, const Matrix& dy, Matrix& dx);

/// Per-sample (channels, height, width) layout of a column.
struct Geometry {
  int channels = 1;
  int height = 1;
  int width = 1;
  int size() const { return channels * height * width; }
  int plane() const { return height * width; }
};

/// 3x3 convolution, stride 1, zero padding 1. W shaped (out, in, 3, 3).
void conv3x3_forward(const Tensor& w, const Tensor& b, const Geometry& in, const Matrix& x,
                     Matrix& y);
void conv3x3_backward(const Tensor& w, const Geometry& in, const Matrix& x, const Matrix& dy,
                      Tensor& dw, Tensor& db, Matrix* dx);

/// 2x2 max pooling with stride 2; `argmax` records the winning input offset
/// for each output entry.
void maxpool2x2_forward(const Geometry& in, const Matrix& x, Matrix& y,
                        std::vector<std::int32_t>& argmax);
void maxpool2x2_backward(const Geometry& in, const std::vector<std::int32_t>& argmax,
                         const Matrix& dy, Matrix& dx);

/// Mean binary cross entropy of sigmoid(logits) against 0/1 labels; `dlogits`
/// receives the gradient of the mean.
double bce_with_logits(const Matrix& logits, const std::vector<double>& labels, Matrix* dlogits);

}  // namespace airink::ops

#include "airink/layers.hpp"

#include <cmath>
#include <limits>

#include "airink/error.hpp"

namespace airink::ops {
namespace {

void im2col3x3(const double* src, const Geometry& g, RowMatrix& col) {
  const int h = g.height;
  const int w = g.width;
  col.resize(g.channels * 9, h * w);
  for (int c = 0; c < g.channels; ++c) {
    const double* plane = src + c * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        double* row = col.row(c * 9 + ky * 3 + kx).data();
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          double* out = row + y * w;
          if (sy < 0 || sy >= h) {
            std::fill(out, out + w, 0.0);
            continue;
          }
          const double* in = plane + sy * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            out[x] = (sx < 0 || sx >= w) ? 0.0 : in[sx];
          }
        }
      }
    }
  }
}

void col2im3x3(const RowMatrix& col, const Geometry& g, double* dst) {
  const int h = g.height;
  const int w = g.width;
  std::fill(dst, dst + g.size(), 0.0);
  for (int c = 0; c < g.channels; ++c) {
    double* plane = dst + c * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const double* row = col.row(c * 9 + ky * 3 + kx).data();
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          const double* in = row + y * w;
          double* out = plane + sy * w;
          for (int x = 0; x < w; ++x) {
            const int sx = x + kx - 1;
            if (sx >= 0 && sx < w) out[sx] += in[x];
          }
        }
      }
    }
  }
}

}  // namespace

void dense_forward(const Tensor& w, const Tensor& b, const Matrix& x, Matrix& y) {
  const auto wm = w.matrix();
  if (wm.cols() != x.rows()) throw ShapeError("dense_forward: input width mismatch");
  y.noalias() = wm * x;
  y.colwise() += b.vector();
}

void dense_backward(const Tensor& w, const Matrix& x, const Matrix& dy, Tensor& dw, Tensor& db,
                    Matrix* dx) {
  dw.matrix().noalias() += dy * x.transpose();
  db.vector() += dy.rowwise().sum();
  if (dx) dx->noalias() = w.matrix().transpose() * dy;
}

void relu_forward(const Matrix& x, Matrix& y) { y = x.cwiseMax(0.0); }

void relu_backward(const Matrix& y, const Matrix& dy, Matrix& dx) {
  dx = (y.array() > 0.0).select(dy, 0.0);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void sigmoid_forward(const Matrix& x, Matrix& y) { y = x.unaryExpr([](double v) { return sigmoid(v); }); }

void sigmoid_backward(const Matrix& y, const Matrix& dy, Matrix& dx) {
  dx = dy.array() * y.array() * (1.0 - y.array());
}

void tanh_forward(const Matrix& x, Matrix& y) { y = x.array().tanh(); }

void tanh_backward(const Matrix& y, const Matrix& dy, Matrix& dx) {
  dx = dy.array() * (1.0 - y.array().square());
}

void conv3x3_forward(const Tensor& w, const Tensor& b, const Geometry& in, const Matrix& x,
                     Matrix& y) {
  const int out_channels = static_cast<int>(w.shape()[0]);
  if (static_cast<int>(w.shape()[1]) != in.channels || x.rows() != in.size()) {
    throw ShapeError("conv3x3_forward: input geometry mismatch");
  }
  const auto wm = w.matrix();
  const auto bias = b.vector();
  y.resize(static_cast<Eigen::Index>(out_channels) * in.plane(), x.cols());
  RowMatrix col;
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    im2col3x3(x.col(s).data(), in, col);
    RowMatrixMap out(y.col(s).data(), out_channels, in.plane());
    out.noalias() = wm * col;
    out.colwise() += bias;
  }
}

void conv3x3_backward(const Tensor& w, const Geometry& in, const Matrix& x, const Matrix& dy,
                      Tensor& dw, Tensor& db, Matrix* dx) {
  const int out_channels = static_cast<int>(w.shape()[0]);
  const auto wm = w.matrix();
  auto dwm = dw.matrix();
  auto dbv = db.vector();
  if (dx) dx->resize(in.size(), x.cols());
  RowMatrix col;
  RowMatrix dcol;
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    im2col3x3(x.col(s).data(), in, col);
    ConstRowMatrixMap grad(dy.col(s).data(), out_channels, in.plane());
    dwm.noalias() += grad * col.transpose();
    dbv += grad.rowwise().sum();
    if (dx) {
      dcol.noalias() = wm.transpose() * grad;
      col2im3x3(dcol, in, dx->col(s).data());
    }
  }
}

void maxpool2x2_forward(const Geometry& in, const Matrix& x, Matrix& y,
                        std::vector<std::int32_t>& argmax) {
  const int oh = in.height / 2;
  const int ow = in.width / 2;
  const Eigen::Index out_size = static_cast<Eigen::Index>(in.channels) * oh * ow;
  y.resize(out_size, x.cols());
  argmax.resize(static_cast<std::size_t>(out_size * x.cols()));
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    const double* src = x.col(s).data();
    double* dst = y.col(s).data();
    std::int32_t* arg = argmax.data() + s * out_size;
    for (int c = 0; c < in.channels; ++c) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          int best = c * in.plane() + (2 * oy) * in.width + 2 * ox;
          double best_v = src[best];
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const int idx = c * in.plane() + (2 * oy + dy) * in.width + 2 * ox + dx;
              if (src[idx] > best_v) {
                best_v = src[idx];
                best = idx;
              }
            }
          }
          const int o = c * oh * ow + oy * ow + ox;
          dst[o] = best_v;
          arg[o] = best;
        }
      }
    }
  }
}

void maxpool2x2_backward(const Geometry& in, const std::vector<std::int32_t>& argmax,
                         const Matrix& dy, Matrix& dx) {
  dx.setZero(in.size(), dy.cols());
  const Eigen::Index out_size = dy.rows();
  for (Eigen::Index s = 0; s < dy.cols(); ++s) {
    const std::int32_t* arg = argmax.data() + s * out_size;
    double* dst = dx.col(s).data();
    const double* g = dy.col(s).data();
    for (Eigen::Index o = 0; o < out_size; ++o) dst[arg[o]] += g[o];
  }
}

double bce_with_logits(const Matrix& logits, const std::vector<double>& labels, Matrix* dlogits) {
  const auto n = logits.cols();
  if (logits.rows() != 1 || static_cast<std::size_t>(n) != labels.size() || n == 0) {
    throw ShapeError("bce_with_logits: expects a 1 x batch logit row matching the labels");
  }
  double total = 0.0;
  if (dlogits) dlogits->resize(1, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = logits(0, i);
    const double y = labels[static_cast<std::size_t>(i)];
    // log(1 + e^z) - y z, evaluated without overflow.
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - y * z;
    if (dlogits) (*dlogits)(0, i) = (sigmoid(z) - y) / static_cast<double>(n);
  }
  return total / static_cast<double>(n);
}

}  // namespace airink::ops

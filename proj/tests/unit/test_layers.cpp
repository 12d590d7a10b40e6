#include <doctest.h>

#include <cmath>

#include "airink/error.hpp"
#include "airink/layers.hpp"
#include "airink/lstm.hpp"
#include "airink/neural.hpp"
#include "gradcheck_util.hpp"

using namespace airink;
using gradutil::Matrix;
using gradutil::random_matrix;
using gradutil::random_tensor;

namespace {

constexpr double kTol = 1e-6;

// Naive direct convolution, W (out, in, 3, 3), zero padding 1.
Matrix conv_oracle(const Tensor& w, const Tensor& b, const ops::Geometry& g, const Matrix& x) {
  const int out = static_cast<int>(w.shape()[0]);
  Matrix y(out * g.plane(), x.cols());
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    for (int o = 0; o < out; ++o) {
      for (int r = 0; r < g.height; ++r) {
        for (int c = 0; c < g.width; ++c) {
          double acc = b[static_cast<std::size_t>(o)];
          for (int i = 0; i < g.channels; ++i) {
            for (int dr = -1; dr <= 1; ++dr) {
              for (int dc = -1; dc <= 1; ++dc) {
                const int rr = r + dr, cc = c + dc;
                if (rr < 0 || rr >= g.height || cc < 0 || cc >= g.width) continue;
                const auto widx = static_cast<std::size_t>(((o * g.channels + i) * 3 + dr + 1) * 3 + dc + 1);
                acc += w[widx] * x(i * g.plane() + rr * g.width + cc, s);
              }
            }
          }
          y(o * g.plane() + r * g.width + c, s) = acc;
        }
      }
    }
  }
  return y;
}

}  // namespace

TEST_CASE("dense layer gradients") {
  const Tensor w0 = random_tensor({3, 4}, 1);
  const Tensor b0 = random_tensor({3}, 2);
  const Matrix x0 = random_matrix(4, 5, 3);
  const Matrix r = random_matrix(3, 5, 4);

  SUBCASE("with respect to the input") {
    const ValueAndGradient f = [&](std::span<const double> p, std::span<double> g) {
      Matrix x(4, 5), y, dx;
      gradutil::copy_in(p, x);
      ops::dense_forward(w0, b0, x, y);
      if (!g.empty()) {
        Tensor dw = zeros_like(w0), db = zeros_like(b0);
        ops::dense_backward(w0, x, r, dw, db, &dx);
        std::copy(dx.data(), dx.data() + dx.size(), g.begin());
      }
      return (r.array() * y.array()).sum();
    };
    CHECK(grad_check(f, gradutil::flat(x0)) < kTol);
  }
  SUBCASE("with respect to weights and bias") {
    const ValueAndGradient f = [&](std::span<const double> p, std::span<double> g) {
      Tensor w({3, 4}, {p.begin(), p.begin() + 12});
      Tensor b({3}, {p.begin() + 12, p.end()});
      Matrix y;
      ops::dense_forward(w, b, x0, y);
      if (!g.empty()) {
        Tensor dw = zeros_like(w), db = zeros_like(b);
        ops::dense_backward(w, x0, r, dw, db, nullptr);
        std::copy(dw.values().begin(), dw.values().end(), g.begin());
        std::copy(db.values().begin(), db.values().end(), g.begin() + 12);
      }
      return (r.array() * y.array()).sum();
    };
    std::vector<double> p(w0.values().begin(), w0.values().end());
    p.insert(p.end(), b0.values().begin(), b0.values().end());
    CHECK(grad_check(f, p) < kTol);
  }
  SUBCASE("width mismatch") {
    Matrix y;
    CHECK_THROWS_AS(ops::dense_forward(w0, b0, random_matrix(5, 2, 1), y), ShapeError);
  }
}

TEST_CASE("activation gradients") {
  // Keep inputs away from the ReLU kink so central differences are valid.
  Matrix x0 = random_matrix(6, 3, 5);
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    if (std::abs(x0.data()[i]) < 0.05) x0.data()[i] = 0.3;
  }
  const Matrix r = random_matrix(6, 3, 6);
  using Fwd = void (*)(const Matrix&, Matrix&);
  using Bwd = void (*)(const Matrix&, const Matrix&, Matrix&);
  const std::pair<Fwd, Bwd> ops_list[] = {{ops::relu_forward, ops::relu_backward},
                                          {ops::sigmoid_forward, ops::sigmoid_backward},
                                          {ops::tanh_forward, ops::tanh_backward}};
  for (const auto& [fwd, bwd] : ops_list) {
    const ValueAndGradient f = [&](std::span<const double> p, std::span<double> g) {
      Matrix x(6, 3), y, dx;
      gradutil::copy_in(p, x);
      fwd(x, y);
      if (!g.empty()) {
        bwd(y, r, dx);
        std::copy(dx.data(), dx.data() + dx.size(), g.begin());
      }
      return (r.array() * y.array()).sum();
    };
    CHECK(grad_check(f, gradutil::flat(x0)) < kTol);
  }
  CHECK(ops::sigmoid(1000.0) == 1.0);
  CHECK(ops::sigmoid(-1000.0) == 0.0);
  CHECK(ops::sigmoid(0.0) == 0.5);
}

TEST_CASE("3x3 convolution matches a direct oracle") {
  const ops::Geometry g{3, 5, 6};
  const Tensor w = random_tensor({4, 3, 3, 3}, 7);
  const Tensor b = random_tensor({4}, 8);
  const Matrix x = random_matrix(g.size(), 2, 9);
  Matrix y;
  ops::conv3x3_forward(w, b, g, x, y);
  CHECK((y - conv_oracle(w, b, g, x)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(ops::conv3x3_forward(w, b, ops::Geometry{2, 5, 6}, x, y), ShapeError);
}

TEST_CASE("3x3 convolution gradients") {
  const ops::Geometry g{2, 4, 5};
  const Tensor w0 = random_tensor({3, 2, 3, 3}, 10);
  const Tensor b0 = random_tensor({3}, 11);
  const Matrix x0 = random_matrix(g.size(), 2, 12);
  const Matrix r = random_matrix(3 * g.plane(), 2, 13);
  const ValueAndGradient f = [&](std::span<const double> p, std::span<double> grad) {
    Tensor w(w0.shape(), {p.begin(), p.begin() + 54});
    Tensor b(b0.shape(), {p.begin() + 54, p.begin() + 57});
    Matrix x(g.size(), 2), y, dx;
    gradutil::copy_in(p.subspan(57), x);
    ops::conv3x3_forward(w, b, g, x, y);
    if (!grad.empty()) {
      Tensor dw = zeros_like(w), db = zeros_like(b);
      ops::conv3x3_backward(w, g, x, r, dw, db, &dx);
      std::copy(dw.values().begin(), dw.values().end(), grad.begin());
      std::copy(db.values().begin(), db.values().end(), grad.begin() + 54);
      std::copy(dx.data(), dx.data() + dx.size(), grad.begin() + 57);
    }
    return (r.array() * y.array()).sum();
  };
  std::vector<double> p(w0.values().begin(), w0.values().end());
  p.insert(p.end(), b0.values().begin(), b0.values().end());
  const auto xf = gradutil::flat(x0);
  p.insert(p.end(), xf.begin(), xf.end());
  CHECK(grad_check(f, p) < kTol);
}

TEST_CASE("2x2 max pooling forward and gradient") {
  const ops::Geometry g{2, 4, 4};
  // Distinct values keep the argmax stable under finite-difference probes.
  Matrix x0(g.size(), 2);
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0.data()[i] = std::sin(1.7 * static_cast<double>(i)) * 3 + 0.01 * i;
  Matrix y;
  std::vector<std::int32_t> arg;
  ops::maxpool2x2_forward(g, x0, y, arg);
  REQUIRE(y.rows() == 2 * 4);
  for (Eigen::Index s = 0; s < 2; ++s) {
    for (int c = 0; c < 2; ++c) {
      for (int oy = 0; oy < 2; ++oy) {
        for (int ox = 0; ox < 2; ++ox) {
          double m = -1e300;
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) m = std::max(m, x0(c * 16 + (2 * oy + dy) * 4 + 2 * ox + dx, s));
          }
          CHECK(y(c * 4 + oy * 2 + ox, s) == m);
        }
      }
    }
  }
  const Matrix r = random_matrix(8, 2, 14);
  const ValueAndGradient f = [&](std::span<const double> p, std::span<double> grad) {
    Matrix x(g.size(), 2), out, dx;
    std::vector<std::int32_t> a;
    gradutil::copy_in(p, x);
    ops::maxpool2x2_forward(g, x, out, a);
    if (!grad.empty()) {
      ops::maxpool2x2_backward(g, a, r, dx);
      std::copy(dx.data(), dx.data() + dx.size(), grad.begin());
    }
    return (r.array() * out.array()).sum();
  };
  CHECK(grad_check(f, gradutil::flat(x0), 1e-6) < kTol);
}

TEST_CASE("binary cross entropy with logits") {
  Matrix z(1, 3);
  z << 0.0, 2.0, -3.0;
  const std::vector<double> labels{1.0, 0.0, 1.0};
  const double expected = (std::log(2.0) + std::log1p(std::exp(2.0)) + std::log1p(std::exp(3.0))) / 3.0;
  CHECK(ops::bce_with_logits(z, labels, nullptr) == doctest::Approx(expected).epsilon(1e-14));

  Matrix big(1, 2);
  big << 800.0, -800.0;
  CHECK(std::isfinite(ops::bce_with_logits(big, {0.0, 1.0}, nullptr)));
  CHECK(ops::bce_with_logits(big, {1.0, 0.0}, nullptr) == doctest::Approx(0.0));

  const ValueAndGradient f = [&](std::span<const double> p, std::span<double> grad) {
    Matrix zz(1, 3), dz;
    gradutil::copy_in(p, zz);
    const double l = ops::bce_with_logits(zz, labels, grad.empty() ? nullptr : &dz);
    if (!grad.empty()) std::copy(dz.data(), dz.data() + 3, grad.begin());
    return l;
  };
  CHECK(grad_check(f, gradutil::flat(z)) < kTol);
  CHECK_THROWS_AS(ops::bce_with_logits(z, {1.0}, nullptr), ShapeError);
}

TEST_CASE("one LSTM step, all parameters and inputs") {
  constexpr int in = 3, hid = 4, batch = 2;
  const Tensor w0 = random_tensor({4 * hid, in + hid}, 20, 0.5);
  const Tensor b0 = random_tensor({4 * hid}, 21, 0.5);
  const Matrix x0 = random_matrix(in, batch, 22);
  const Matrix h0 = random_matrix(hid, batch, 23, 0.5);
  const Matrix c0 = random_matrix(hid, batch, 24, 0.5);
  const Matrix rh = random_matrix(hid, batch, 25);
  const Matrix rc = random_matrix(hid, batch, 26);
  const std::size_t nw = w0.size(), nb = b0.size();

  const ValueAndGradient f = [&](std::span<const double> p, std::span<double> grad) {
    Tensor w(w0.shape(), {p.begin(), p.begin() + nw});
    Tensor b(b0.shape(), {p.begin() + nw, p.begin() + nw + nb});
    Matrix x(in, batch), hp(hid, batch), cp(hid, batch), h, c;
    std::size_t off = nw + nb;
    gradutil::copy_in(p.subspan(off), x);
    off += x.size();
    gradutil::copy_in(p.subspan(off), hp);
    off += hp.size();
    gradutil::copy_in(p.subspan(off), cp);
    ops::LstmStepCache cache;
    ops::lstm_step_forward(w, b, x, hp, cp, h, c, &cache);
    if (!grad.empty()) {
      Tensor dw = zeros_like(w), db = zeros_like(b);
      Matrix dx, dh, dc;
      ops::lstm_step_backward(w, cache, rh, rc, dw, db, dx, dh, dc);
      auto it = std::copy(dw.values().begin(), dw.values().end(), grad.begin());
      it = std::copy(db.values().begin(), db.values().end(), it);
      it = std::copy(dx.data(), dx.data() + dx.size(), it);
      it = std::copy(dh.data(), dh.data() + dh.size(), it);
      std::copy(dc.data(), dc.data() + dc.size(), it);
    }
    return (rh.array() * h.array()).sum() + (rc.array() * c.array()).sum();
  };
  std::vector<double> p(w0.values().begin(), w0.values().end());
  p.insert(p.end(), b0.values().begin(), b0.values().end());
  for (const Matrix* m : {&x0, &h0, &c0}) {
    const auto v = gradutil::flat(*m);
    p.insert(p.end(), v.begin(), v.end());
  }
  CHECK(grad_check(f, p) < 1e-6);
}

TEST_CASE("LSTM forget bias keeps memory at zero weights") {
  // With W = 0 and b = 0 every gate sees only the constant forget bias:
  // i = o = 0.5, f = sigmoid(1), g = 0, so c' = sigmoid(1) c.
  const Tensor w({8, 3});
  const Tensor b({8});
  Matrix x = Matrix::Zero(1, 1), h0 = Matrix::Zero(2, 1), c0(2, 1), h, c;
  c0 << 1.0, -2.0;
  ops::lstm_step_forward(w, b, x, h0, c0, h, c, nullptr);
  const double f = 1.0 / (1.0 + std::exp(-ops::kForgetBias));
  CHECK(c(0, 0) == doctest::Approx(f));
  CHECK(c(1, 0) == doctest::Approx(-2 * f));
  CHECK(h(0, 0) == doctest::Approx(0.5 * std::tanh(f)));
}

#include "airink/lstm.hpp"

#include "airink/error.hpp"

namespace airink::ops {

void lstm_step_forward(const Tensor& w, const Tensor& b, const Matrix& x, const Matrix& h_prev,
                       const Matrix& c_prev, Matrix& h, Matrix& c, LstmStepCache* cache) {
  const Eigen::Index hidden = h_prev.rows();
  const Eigen::Index batch = x.cols();
  if (static_cast<Eigen::Index>(w.shape()[0]) != 4 * hidden ||
      static_cast<Eigen::Index>(w.shape()[1]) != x.rows() + hidden) {
    throw ShapeError("lstm_step_forward: weight shape " + shape_string(w.shape()) +
                     " does not fit input " + std::to_string(x.rows()) + " / hidden " +
                     std::to_string(hidden));
  }

  Matrix xh(x.rows() + hidden, batch);
  xh.topRows(x.rows()) = x;
  xh.bottomRows(hidden) = h_prev;

  Matrix z;
  dense_forward(w, b, xh, z);
  z.middleRows(hidden, hidden).array() += kForgetBias;

  Matrix gates(4 * hidden, batch);
  gates.topRows(2 * hidden) =
      z.topRows(2 * hidden).unaryExpr([](double v) { return sigmoid(v); });
  gates.middleRows(2 * hidden, hidden) = z.middleRows(2 * hidden, hidden).array().tanh();
  gates.bottomRows(hidden) =
      z.bottomRows(hidden).unaryExpr([](double v) { return sigmoid(v); });

  const auto i = gates.topRows(hidden).array();
  const auto f = gates.middleRows(hidden, hidden).array();
  const auto g = gates.middleRows(2 * hidden, hidden).array();
  const auto o = gates.bottomRows(hidden).array();

  c = (f * c_prev.array() + i * g).matrix();
  Matrix tanh_c = c.array().tanh();
  h = (o * tanh_c.array()).matrix();

  if (cache) {
    cache->xh = std::move(xh);
    cache->gates = std::move(gates);
    cache->c_prev = c_prev;
    cache->tanh_c = std::move(tanh_c);
  }
}

void lstm_step_backward(const Tensor& w, const LstmStepCache& cache, const Matrix& dh,
                        const Matrix& dc, Tensor& dw, Tensor& db, Matrix& dx, Matrix& dh_prev,
                        Matrix& dc_prev) {
  const Eigen::Index hidden = dh.rows();
  const Eigen::Index batch = dh.cols();
  const Eigen::Index input = cache.xh.rows() - hidden;

  const auto i = cache.gates.topRows(hidden).array();
  const auto f = cache.gates.middleRows(hidden, hidden).array();
  const auto g = cache.gates.middleRows(2 * hidden, hidden).array();
  const auto o = cache.gates.bottomRows(hidden).array();
  const auto tc = cache.tanh_c.array();

  const Eigen::ArrayXXd dc_total = dc.array() + dh.array() * o * (1.0 - tc.square());

  Matrix dz(4 * hidden, batch);
  dz.topRows(hidden) = (dc_total * g * i * (1.0 - i)).matrix();
  dz.middleRows(hidden, hidden) = (dc_total * cache.c_prev.array() * f * (1.0 - f)).matrix();
  dz.middleRows(2 * hidden, hidden) = (dc_total * i * (1.0 - g.square())).matrix();
  dz.bottomRows(hidden) = (dh.array() * tc * o * (1.0 - o)).matrix();

  dc_prev = (dc_total * f).matrix();

  Matrix dxh;
  dense_backward(w, cache.xh, dz, dw, db, &dxh);
  dx = dxh.topRows(input);
  dh_prev = dxh.bottomRows(hidden);
}

}  // namespace airink::ops

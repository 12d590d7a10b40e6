#pragma once

#include "airink/layers.hpp"
#include "airink/tensor.hpp"

namespace airink::ops {

/// Constant added to the forget-gate pre-activation, as in the classic
/// "basic" LSTM cell.
inline constexpr double kForgetBias = 1.0;

/// Activations kept from one forward step for the backward pass.
struct LstmStepCache {
  Matrix xh;     // [x; h_prev], (input + hidden) x batch
  Matrix gates;  // activated i, f, g, o stacked, 4*hidden x batch
  Matrix c_prev;
  Matrix tanh_c;
};

/// One LSTM step over a batch. W is (4H, I+H) with gate blocks in i, f, g, o
/// order and b is (4H).
void lstm_step_forward(const Tensor& w, const Tensor& b, const Matrix& x, const Matrix& h_prev,
                       const Matrix& c_prev, Matrix& h, Matrix& c, LstmStepCache* cache);

/// Backward through one step given upstream dh and dc. Accumulates dw/db.
void lstm_step_backward(const Tensor& w, const LstmStepCache& cache, const Matrix& dh,
                        const Matrix& dc, Tensor& dw, Tensor& db, Matrix& dx, Matrix& dh_prev,
                        Matrix& dc_prev);

}  // namespace airink::ops

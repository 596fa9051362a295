#pragma once

#include <Eigen/Dense>

namespace codeqa {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-column 0/1 mask over a batch.
template <typename Scalar>
using RowMask = Eigen::Array<Scalar, 1, Eigen::Dynamic>;

/// Gated recurrent cell. Gate rows are stacked as [update; reset; candidate].
///
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   n  = tanh(Wn x + bn + r * (Un h))
///   h' = (1 - z) * n + z * h
template <typename Scalar>
struct GruCell {
  Matrix<Scalar> W;  // 3h x input
  Matrix<Scalar> U;  // 3h x h
  Matrix<Scalar> b;  // 3h x 1

  Eigen::Index hidden() const { return U.cols(); }
  Eigen::Index input() const { return W.cols(); }
  void resize(Eigen::Index in, Eigen::Index h) {
    W.setZero(3 * h, in);
    U.setZero(3 * h, h);
    b.setZero(3 * h, 1);
  }
};

/// Activations of one recurrent step, kept for backpropagation.
template <typename Scalar>
struct GruTape {
  Matrix<Scalar> x, h_prev, z, r, n, hn;
  RowMask<Scalar> mask;
};

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return (Scalar(1) + (-a).exp()).inverse();
}

/// One step over a batch (one column per sequence). Columns whose mask is 0
/// carry h_prev through unchanged.
template <typename Scalar>
Matrix<Scalar> gru_forward(const GruCell<Scalar>& cell, const Matrix<Scalar>& x, const Matrix<Scalar>& h_prev,
                           const RowMask<Scalar>& mask, GruTape<Scalar>* tape = nullptr) {
  const Eigen::Index h = cell.hidden();
  Matrix<Scalar> gx(3 * h, x.cols());
  gx.noalias() = cell.W * x;
  gx.colwise() += cell.b.col(0);
  Matrix<Scalar> gh(3 * h, x.cols());
  gh.noalias() = cell.U * h_prev;

  Matrix<Scalar> z = sigmoid((gx.topRows(h) + gh.topRows(h)).array()).matrix();
  Matrix<Scalar> r = sigmoid((gx.middleRows(h, h) + gh.middleRows(h, h)).array()).matrix();
  Matrix<Scalar> hn = gh.bottomRows(h);
  Matrix<Scalar> n = (gx.bottomRows(h).array() + r.array() * hn.array()).tanh().matrix();

  const auto candidate = (Scalar(1) - z.array()) * n.array() + z.array() * h_prev.array();
  Matrix<Scalar> out =
      (candidate.rowwise() * mask + h_prev.array().rowwise() * (Scalar(1) - mask)).matrix();
  if (tape) {
    tape->x = x;
    tape->h_prev = h_prev;
    tape->z = std::move(z);
    tape->r = std::move(r);
    tape->n = std::move(n);
    tape->hn = std::move(hn);
    tape->mask = mask;
  }
  return out;
}

/// Backpropagates dL/dh_out through one step. Parameter gradients accumulate
/// into `grad`; dx and dh_prev are overwritten.
template <typename Scalar>
void gru_backward(const GruCell<Scalar>& cell, const GruTape<Scalar>& t, const Matrix<Scalar>& dh_out,
                  GruCell<Scalar>& grad, Matrix<Scalar>& dx, Matrix<Scalar>& dh_prev) {
  const Eigen::Index h = cell.hidden();
  const Eigen::Index batch = dh_out.cols();
  const auto dh = (dh_out.array().rowwise() * t.mask).eval();

  const auto z = t.z.array();
  const auto r = t.r.array();
  const auto n = t.n.array();
  const auto dn = (dh * (Scalar(1) - z)).eval();
  const auto dz = (dh * (t.h_prev.array() - n)).eval();
  const auto dan = (dn * (Scalar(1) - n.square())).eval();

  Matrix<Scalar> dgx(3 * h, batch);
  dgx.topRows(h) = (dz * z * (Scalar(1) - z)).matrix();
  dgx.middleRows(h, h) = (dan * t.hn.array() * r * (Scalar(1) - r)).matrix();
  dgx.bottomRows(h) = dan.matrix();
  Matrix<Scalar> dgh = dgx;
  dgh.bottomRows(h) = (dan * r).matrix();

  grad.W.noalias() += dgx * t.x.transpose();
  grad.b.col(0) += dgx.rowwise().sum();
  grad.U.noalias() += dgh * t.h_prev.transpose();

  dx.noalias() = cell.W.transpose() * dgx;
  dh_prev = (dh_out.array().rowwise() * (Scalar(1) - t.mask) + dh * z).matrix();
  dh_prev.noalias() += cell.U.transpose() * dgh;
}

}  // namespace codeqa

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "codeqa/seq2seq.hpp"

namespace codeqa {

struct TensorGradError {
  std::string name;
  /// ||analytic - numeric|| / max(||analytic||, ||numeric||, 1e-8) over the tensor.
  double relative_error = 0;
  double max_abs_error = 0;
  /// Worst single-entry relative error; dominated by round-off on entries whose
  /// gradient is near zero.
  double max_elementwise_relative_error = 0;
  Eigen::Index worst_index = 0;
};

struct GradCheckResult {
  /// Max over every parameter entry of relative_error(analytic, numeric).
  double max_relative_error = 0;
  /// Max over parameter tensors of TensorGradError::relative_error.
  double max_tensor_relative_error = 0;
  double max_abs_error = 0;
  std::vector<TensorGradError> tensors;
  std::size_t parameters_checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

/// Compares backward() against central differences for every entry of every
/// parameter tensor of `model` on one batch.
template <typename Scalar>
GradCheckResult grad_check(Seq2SeqModel<Scalar>& model, const PaddedBatch& batch, double epsilon) {
  ForwardTape<Scalar> tape;
  forward_loss(model, batch, tape);
  Seq2SeqParams<Scalar> grads = model.params;
  grads.set_zero();
  backward(model, tape, grads);

  std::vector<std::pair<std::string, Matrix<Scalar>*>> params;
  std::vector<Matrix<Scalar>*> analytic;
  model.params.for_each([&](const char* name, Matrix<Scalar>& m) { params.emplace_back(name, &m); });
  grads.for_each([&](const char*, Matrix<Scalar>& m) { analytic.push_back(&m); });

  const auto eps = static_cast<Scalar>(epsilon);
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix<Scalar>& w = *params[k].second;
    Eigen::VectorXd numeric(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      const Scalar saved = w.data()[i];
      w.data()[i] = saved + eps;
      const double plus = forward_loss(model, batch, tape).loss;
      w.data()[i] = saved - eps;
      const double minus = forward_loss(model, batch, tape).loss;
      w.data()[i] = saved;
      numeric(i) = (plus - minus) / (2.0 * epsilon);
    }
    const Eigen::VectorXd exact =
        Eigen::Map<const Matrix<Scalar>>(analytic[k]->data(), w.size(), 1).template cast<double>();

    TensorGradError err;
    err.name = params[k].first;
    err.relative_error = (exact - numeric).norm() / std::max({exact.norm(), numeric.norm(), 1e-8});
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      err.max_abs_error = std::max(err.max_abs_error, std::abs(exact(i) - numeric(i)));
      const double rel = relative_error(exact(i), numeric(i));
      if (rel > err.max_elementwise_relative_error) {
        err.max_elementwise_relative_error = rel;
        err.worst_index = i;
      }
    }
    result.parameters_checked += static_cast<std::size_t>(w.size());
    result.max_relative_error = std::max(result.max_relative_error, err.max_elementwise_relative_error);
    result.max_tensor_relative_error = std::max(result.max_tensor_relative_error, err.relative_error);
    result.max_abs_error = std::max(result.max_abs_error, err.max_abs_error);
    result.tensors.push_back(err);
  }
  return result;
}

/// Tiny random double-precision model and one synthetic tuple, the
/// configuration used by the `gradcheck` command. With `padded` a second,
/// shorter tuple joins the batch so the masking paths are covered too.
struct GradCheckFixture {
  Seq2SeqModel<double> model;
  PaddedBatch batch;
};

inline GradCheckFixture make_gradcheck_fixture(std::uint64_t seed, bool padded = false, int d_emb = 4,
                                               int d_hid = 5, double scale = 1.0) {
  std::vector<std::string> in = Vocabulary().tokens();
  for (auto t : {"what", "is", "the", "return", "type", "of", "run", "public", "void", "(", ")", "{", "}"}) {
    in.emplace_back(t);
  }
  std::vector<std::string> out = Vocabulary().tokens();
  for (auto t : {"the", "return", "type", "is", "void", "int"}) out.emplace_back(t);

  ModelDims dims;
  dims.d_emb = d_emb;
  dims.d_hid = d_hid;
  dims.max_q_len = 8;
  dims.max_c_len = 12;
  dims.max_a_len = 6;
  GradCheckFixture f{Seq2SeqModel<double>(Vocabulary(in), Vocabulary(out), dims), {}};
  Rng rng(seed);
  // Every entry, biases included, drawn from U(-scale, scale): hidden states and
  // attention weights then vary enough that no gradient sits at the round-off floor.
  f.model.params.for_each([&](const char*, Matrix<double>& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * (2.0 * rng.unit() - 1.0);
  });

  const TokenSeq q = tokenize("what is the return type of run ?");
  const TokenSeq c = tokenize("<st> nl public void run ( ) { }");
  const TokenSeq a = tokenize("<st> the return type is void </s>");
  const TokenSeq q2 = tokenize("return type ?");
  const TokenSeq c2 = tokenize("<st> public int ( )");
  const TokenSeq a2 = tokenize("<st> int </s>");
  const auto e1 = encode_example(f.model, q, c, a);
  const auto e2 = encode_example(f.model, q2, c2, a2);
  std::vector<const EncodedExample*> ptrs = {&e1};
  if (padded) ptrs.push_back(&e2);
  f.batch = make_batch(ptrs);
  return f;
}

}  // namespace codeqa

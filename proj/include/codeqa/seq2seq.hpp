#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "codeqa/common.hpp"
#include "codeqa/gru.hpp"
#include "codeqa/vocab.hpp"

namespace codeqa {

struct ModelDims {
  int d_emb = 128;
  int d_hid = 256;
  int max_q_len = 20;
  int max_c_len = 200;
  int max_a_len = 30;

  bool operator==(const ModelDims&) const = default;
};

/// Every trainable tensor of the question/context/answer encoder-decoder.
/// Embeddings store one column per token id.
template <typename Scalar>
struct Seq2SeqParams {
  Matrix<Scalar> emb_q, emb_c, emb_a;
  GruCell<Scalar> q_enc, c_enc, dec;
  Matrix<Scalar> init_w, init_b;  // decoder start state from both encoder finals
  Matrix<Scalar> attn_q, attn_c;  // decoder-state projections scored against encoder states
  Matrix<Scalar> out_w, out_b;    // [state; code context; question context] -> output vocab

  void resize(const ModelDims& d, Eigen::Index vocab_in, Eigen::Index vocab_out) {
    emb_q.setZero(d.d_emb, vocab_in);
    emb_c.setZero(d.d_emb, vocab_in);
    emb_a.setZero(d.d_emb, vocab_out);
    q_enc.resize(d.d_emb, d.d_hid);
    c_enc.resize(d.d_emb, d.d_hid);
    dec.resize(d.d_emb, d.d_hid);
    init_w.setZero(d.d_hid, 2 * d.d_hid);
    init_b.setZero(d.d_hid, 1);
    attn_q.setZero(d.d_hid, d.d_hid);
    attn_c.setZero(d.d_hid, d.d_hid);
    out_w.setZero(vocab_out, 3 * d.d_hid);
    out_b.setZero(vocab_out, 1);
  }

  /// Visits (name, tensor) in the fixed declaration order used by checkpoints.
  template <typename Self, typename F>
  static void visit(Self& self, F&& f) {
    f("emb_q", self.emb_q);
    f("emb_c", self.emb_c);
    f("emb_a", self.emb_a);
    f("q_enc.W", self.q_enc.W);
    f("q_enc.U", self.q_enc.U);
    f("q_enc.b", self.q_enc.b);
    f("c_enc.W", self.c_enc.W);
    f("c_enc.U", self.c_enc.U);
    f("c_enc.b", self.c_enc.b);
    f("dec.W", self.dec.W);
    f("dec.U", self.dec.U);
    f("dec.b", self.dec.b);
    f("init_w", self.init_w);
    f("init_b", self.init_b);
    f("attn_q", self.attn_q);
    f("attn_c", self.attn_c);
    f("out_w", self.out_w);
    f("out_b", self.out_b);
  }
  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  void set_zero() {
    for_each([](const char*, Matrix<Scalar>& m) { m.setZero(); });
  }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for_each([&](const char*, const Matrix<Scalar>& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
  }
  bool all_finite() const {
    bool ok = true;
    for_each([&](const char*, const Matrix<Scalar>& m) { ok = ok && m.allFinite(); });
    return ok;
  }
};

template <typename Scalar>
class Seq2SeqModel {
 public:
  Seq2SeqModel() = default;
  Seq2SeqModel(Vocabulary input_vocab, Vocabulary output_vocab, ModelDims dims)
      : input_vocab(std::move(input_vocab)), output_vocab(std::move(output_vocab)), dims(dims) {
    params.resize(dims, static_cast<Eigen::Index>(this->input_vocab.size()),
                  static_cast<Eigen::Index>(this->output_vocab.size()));
  }

  /// Uniform Glorot initialisation for matrices, small uniform embeddings,
  /// zero biases.
  void init_random(Rng& rng) {
    auto fill = [&](Matrix<Scalar>& m, double bound) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
          m(i, j) = static_cast<Scalar>((2.0 * rng.unit() - 1.0) * bound);
        }
      }
    };
    auto glorot = [&](Matrix<Scalar>& m) { fill(m, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()))); };
    fill(params.emb_q, 0.1);
    fill(params.emb_c, 0.1);
    fill(params.emb_a, 0.1);
    for (auto* cell : {&params.q_enc, &params.c_enc, &params.dec}) {
      glorot(cell->W);
      glorot(cell->U);
      cell->b.setZero();
    }
    glorot(params.init_w);
    params.init_b.setZero();
    glorot(params.attn_q);
    glorot(params.attn_c);
    glorot(params.out_w);
    params.out_b.setZero();
  }

  Vocabulary input_vocab;
  Vocabulary output_vocab;
  ModelDims dims;
  Seq2SeqParams<Scalar> params;
};

/// Vocabulary ids for one tuple. answer is `<st> ... </s>`.
struct EncodedExample {
  std::vector<int> question;
  std::vector<int> context;
  std::vector<int> answer;
};

/// Maps tokens to ids and applies the length limits: question and context
/// keep their first max_q_len / max_c_len tokens, the answer body keeps its
/// first max_a_len tokens between the sentinels.
template <typename Scalar>
EncodedExample encode_example(const Seq2SeqModel<Scalar>& model, const TokenSeq& question, const TokenSeq& context,
                              const TokenSeq& answer = {}) {
  EncodedExample e;
  const auto clip = [](std::vector<int> ids, int limit) {
    if (static_cast<int>(ids.size()) > limit) ids.resize(static_cast<std::size_t>(limit));
    return ids;
  };
  e.question = clip(model.input_vocab.encode(question), model.dims.max_q_len);
  e.context = clip(model.input_vocab.encode(context), model.dims.max_c_len);
  if (!answer.empty()) {
    std::vector<int> ids = model.output_vocab.encode(answer);
    std::size_t begin = (!ids.empty() && ids.front() == Vocabulary::kStart) ? 1 : 0;
    std::size_t end = (ids.size() > begin && ids.back() == Vocabulary::kEnd) ? ids.size() - 1 : ids.size();
    end = std::min(end, begin + static_cast<std::size_t>(model.dims.max_a_len));
    e.answer.push_back(Vocabulary::kStart);
    e.answer.insert(e.answer.end(), ids.begin() + static_cast<std::ptrdiff_t>(begin),
                    ids.begin() + static_cast<std::ptrdiff_t>(end));
    e.answer.push_back(Vocabulary::kEnd);
  }
  return e;
}

/// Right-padded, time-major batch. Position 0 of every question and context
/// is always live so attention never sees an empty row.
struct PaddedBatch {
  Eigen::MatrixXi q, c, a;  // rows are time steps, columns are examples
  std::vector<int> q_len, c_len, a_len;

  Eigen::Index size() const { return q.cols(); }
};

inline PaddedBatch make_batch(std::span<const EncodedExample* const> examples) {
  PaddedBatch b;
  const auto n = static_cast<Eigen::Index>(examples.size());
  auto live_length = [](const std::vector<int>& ids) {
    int len = static_cast<int>(ids.size());
    while (len > 0 && ids[static_cast<std::size_t>(len - 1)] == Vocabulary::kPad) --len;
    return std::max(len, 1);
  };
  int lq = 1, lc = 1, la = 0;
  for (const auto* e : examples) {
    b.q_len.push_back(live_length(e->question));
    b.c_len.push_back(live_length(e->context));
    b.a_len.push_back(static_cast<int>(e->answer.size()));
    lq = std::max(lq, b.q_len.back());
    lc = std::max(lc, b.c_len.back());
    la = std::max(la, b.a_len.back());
  }
  b.q.setConstant(lq, n, Vocabulary::kPad);
  b.c.setConstant(lc, n, Vocabulary::kPad);
  b.a.setConstant(la, n, Vocabulary::kPad);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& e = *examples[static_cast<std::size_t>(j)];
    for (int t = 0; t < b.q_len[static_cast<std::size_t>(j)] && t < static_cast<int>(e.question.size()); ++t) {
      b.q(t, j) = e.question[static_cast<std::size_t>(t)];
    }
    for (int t = 0; t < b.c_len[static_cast<std::size_t>(j)] && t < static_cast<int>(e.context.size()); ++t) {
      b.c(t, j) = e.context[static_cast<std::size_t>(t)];
    }
    for (int t = 0; t < b.a_len[static_cast<std::size_t>(j)]; ++t) b.a(t, j) = e.answer[static_cast<std::size_t>(t)];
  }
  return b;
}

namespace detail {

template <typename Scalar>
Matrix<Scalar> gather_columns(const Matrix<Scalar>& table, const Eigen::MatrixXi& ids, Eigen::Index row) {
  Matrix<Scalar> x(table.rows(), ids.cols());
  for (Eigen::Index j = 0; j < ids.cols(); ++j) x.col(j) = table.col(ids(row, j));
  return x;
}

template <typename Scalar>
RowMask<Scalar> step_mask(const std::vector<int>& lengths, Eigen::Index t) {
  RowMask<Scalar> m(static_cast<Eigen::Index>(lengths.size()));
  for (std::size_t j = 0; j < lengths.size(); ++j) m(static_cast<Eigen::Index>(j)) = t < lengths[j] ? 1 : 0;
  return m;
}

/// Column-wise softmax in place.
template <typename Scalar>
void softmax_columns(Matrix<Scalar>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    auto col = m.col(j);
    const Scalar top = col.maxCoeff();
    col = (col.array() - top).exp().matrix();
    col /= col.sum();
  }
}

template <typename Scalar>
Scalar attention_scale(Eigen::Index h) {
  return Scalar(1) / std::sqrt(static_cast<Scalar>(h));
}

/// Scaled dot-product attention of projected decoder states over encoder
/// states. keys: h x L, queries: h x T. Returns weights L x T and contexts h x T.
template <typename Scalar>
void attend(const Matrix<Scalar>& keys, const Matrix<Scalar>& queries, Matrix<Scalar>& weights,
            Matrix<Scalar>& contexts) {
  weights.noalias() = keys.transpose() * queries;
  weights *= attention_scale<Scalar>(keys.rows());
  softmax_columns(weights);
  contexts.noalias() = keys * weights;
}

}  // namespace detail

/// Activations of a teacher-forced pass over one batch.
template <typename Scalar>
struct ForwardTape {
  PaddedBatch batch;
  std::vector<GruTape<Scalar>> q_tape, c_tape, d_tape;
  std::vector<Matrix<Scalar>> hq, hc, s;  // per time step, h x B
  Matrix<Scalar> init_in, s0;
  // Per example: encoder states (h x L_b), projected decoder states (h x T_b),
  // attention weights (L_b x T_b).
  std::vector<Matrix<Scalar>> keys_q, keys_c, proj_q, proj_c, attn_q, attn_c;
  std::vector<Eigen::Index> offsets;  // first feature column of each example
  Matrix<Scalar> features;            // 3h x N
  Matrix<Scalar> probs;               // V x N
  std::vector<int> targets;           // N
  std::vector<int> decoder_inputs;    // N, the gold prefix token fed at each step
};

struct LossStats {
  double loss = 0;  // mean token cross-entropy
  std::size_t tokens = 0;
  std::size_t correct = 0;
};

/// Teacher-forced forward pass: at every answer position the decoder input is
/// the gold token, and the loss is the mean cross-entropy of the next gold
/// token. Fills `tape` for backward().
template <typename Scalar>
LossStats forward_loss(const Seq2SeqModel<Scalar>& model, const PaddedBatch& batch, ForwardTape<Scalar>& tape) {
  const auto& p = model.params;
  const Eigen::Index B = batch.size();
  const Eigen::Index H = model.dims.d_hid;
  tape.batch = batch;

  auto run_encoder = [&](const GruCell<Scalar>& cell, const Matrix<Scalar>& emb, const Eigen::MatrixXi& ids,
                         const std::vector<int>& lengths, std::vector<GruTape<Scalar>>& tapes,
                         std::vector<Matrix<Scalar>>& states) {
    const Eigen::Index L = ids.rows();
    tapes.assign(static_cast<std::size_t>(L), {});
    states.assign(static_cast<std::size_t>(L), {});
    Matrix<Scalar> h = Matrix<Scalar>::Zero(H, B);
    for (Eigen::Index t = 0; t < L; ++t) {
      h = gru_forward(cell, detail::gather_columns(emb, ids, t), h, detail::step_mask<Scalar>(lengths, t),
                      &tapes[static_cast<std::size_t>(t)]);
      states[static_cast<std::size_t>(t)] = h;
    }
  };
  run_encoder(p.q_enc, p.emb_q, batch.q, batch.q_len, tape.q_tape, tape.hq);
  run_encoder(p.c_enc, p.emb_c, batch.c, batch.c_len, tape.c_tape, tape.hc);

  tape.init_in.resize(2 * H, B);
  tape.init_in.topRows(H) = tape.hq.back();
  tape.init_in.bottomRows(H) = tape.hc.back();
  tape.s0.noalias() = p.init_w * tape.init_in;
  tape.s0.colwise() += p.init_b.col(0);
  tape.s0 = tape.s0.array().tanh().matrix();

  // Decoder step t reads gold token a[t] and predicts a[t + 1].
  const Eigen::Index T = std::max<Eigen::Index>(batch.a.rows() - 1, 0);
  std::vector<int> steps(static_cast<std::size_t>(B));
  for (Eigen::Index j = 0; j < B; ++j) steps[static_cast<std::size_t>(j)] = std::max(batch.a_len[static_cast<std::size_t>(j)] - 1, 0);
  tape.d_tape.assign(static_cast<std::size_t>(T), {});
  tape.s.assign(static_cast<std::size_t>(T), {});
  Matrix<Scalar> s = tape.s0;
  for (Eigen::Index t = 0; t < T; ++t) {
    s = gru_forward(p.dec, detail::gather_columns(p.emb_a, batch.a, t), s, detail::step_mask<Scalar>(steps, t),
                    &tape.d_tape[static_cast<std::size_t>(t)]);
    tape.s[static_cast<std::size_t>(t)] = s;
  }

  Eigen::Index N = 0;
  tape.offsets.assign(static_cast<std::size_t>(B), 0);
  for (Eigen::Index j = 0; j < B; ++j) {
    tape.offsets[static_cast<std::size_t>(j)] = N;
    N += steps[static_cast<std::size_t>(j)];
  }
  tape.features.resize(3 * H, N);
  tape.targets.assign(static_cast<std::size_t>(N), 0);
  tape.decoder_inputs.assign(static_cast<std::size_t>(N), 0);
  for (auto* v : {&tape.keys_q, &tape.keys_c, &tape.proj_q, &tape.proj_c, &tape.attn_q, &tape.attn_c}) {
    v->assign(static_cast<std::size_t>(B), {});
  }

  for (Eigen::Index j = 0; j < B; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const Eigen::Index Tb = steps[jj];
    if (Tb == 0) continue;
    const Eigen::Index off = tape.offsets[jj];
    Matrix<Scalar> states(H, Tb);
    for (Eigen::Index t = 0; t < Tb; ++t) {
      states.col(t) = tape.s[static_cast<std::size_t>(t)].col(j);
      tape.targets[static_cast<std::size_t>(off + t)] = batch.a(t + 1, j);
      tape.decoder_inputs[static_cast<std::size_t>(off + t)] = batch.a(t, j);
    }
    auto& kq = tape.keys_q[jj];
    auto& kc = tape.keys_c[jj];
    kq.resize(H, batch.q_len[jj]);
    for (Eigen::Index t = 0; t < kq.cols(); ++t) kq.col(t) = tape.hq[static_cast<std::size_t>(t)].col(j);
    kc.resize(H, batch.c_len[jj]);
    for (Eigen::Index t = 0; t < kc.cols(); ++t) kc.col(t) = tape.hc[static_cast<std::size_t>(t)].col(j);

    tape.proj_c[jj].noalias() = p.attn_c * states;
    tape.proj_q[jj].noalias() = p.attn_q * states;
    Matrix<Scalar> ctx_c, ctx_q;
    detail::attend(kc, tape.proj_c[jj], tape.attn_c[jj], ctx_c);
    detail::attend(kq, tape.proj_q[jj], tape.attn_q[jj], ctx_q);
    tape.features.block(0, off, H, Tb) = states;
    tape.features.block(H, off, H, Tb) = ctx_c;
    tape.features.block(2 * H, off, H, Tb) = ctx_q;
  }

  tape.probs.noalias() = p.out_w * tape.features;
  tape.probs.colwise() += p.out_b.col(0);

  LossStats stats;
  stats.tokens = static_cast<std::size_t>(N);
  double total = 0;
  for (Eigen::Index k = 0; k < N; ++k) {
    auto col = tape.probs.col(k);
    Eigen::Index best = 0;
    const Scalar top = col.maxCoeff(&best);
    col = (col.array() - top).exp().matrix();
    const Scalar z = col.sum();
    const int target = tape.targets[static_cast<std::size_t>(k)];
    total -= std::log(static_cast<double>(col(target))) - std::log(static_cast<double>(z));
    col /= z;
    if (best == target) ++stats.correct;
  }
  stats.loss = N > 0 ? total / static_cast<double>(N) : 0.0;
  return stats;
}

/// Gradients of the mean token cross-entropy; accumulates into `grads`.
template <typename Scalar>
void backward(const Seq2SeqModel<Scalar>& model, const ForwardTape<Scalar>& tape, Seq2SeqParams<Scalar>& grads) {
  const auto& p = model.params;
  const auto& batch = tape.batch;
  const Eigen::Index B = batch.size();
  const Eigen::Index H = model.dims.d_hid;
  const Eigen::Index N = tape.features.cols();
  if (N == 0) return;

  Matrix<Scalar> dlogits = tape.probs;
  for (Eigen::Index k = 0; k < N; ++k) dlogits(tape.targets[static_cast<std::size_t>(k)], k) -= Scalar(1);
  dlogits /= static_cast<Scalar>(N);

  grads.out_w.noalias() += dlogits * tape.features.transpose();
  grads.out_b.col(0) += dlogits.rowwise().sum();
  Matrix<Scalar> dfeat(3 * H, N);
  dfeat.noalias() = p.out_w.transpose() * dlogits;

  std::vector<Matrix<Scalar>> ds(tape.s.size(), Matrix<Scalar>::Zero(H, B));
  std::vector<Matrix<Scalar>> dhq(tape.hq.size(), Matrix<Scalar>::Zero(H, B));
  std::vector<Matrix<Scalar>> dhc(tape.hc.size(), Matrix<Scalar>::Zero(H, B));

  // Attention backward for one source: keys h x L, proj h x T, weights L x T.
  auto attention_backward = [&](const Matrix<Scalar>& keys, const Matrix<Scalar>& proj, const Matrix<Scalar>& w,
                                const Matrix<Scalar>& dctx, const Matrix<Scalar>& projection,
                                Matrix<Scalar>& dprojection, Matrix<Scalar>& dkeys, Matrix<Scalar>& dstates,
                                const Matrix<Scalar>& states) {
    dkeys.noalias() = dctx * w.transpose();
    Matrix<Scalar> dw = keys.transpose() * dctx;
    const auto dots = (w.array() * dw.array()).colwise().sum().eval();
    Matrix<Scalar> dscores = (w.array() * (dw.array().rowwise() - dots)).matrix();
    dscores *= detail::attention_scale<Scalar>(keys.rows());
    dkeys.noalias() += proj * dscores.transpose();
    Matrix<Scalar> dproj = keys * dscores;
    dprojection.noalias() += dproj * states.transpose();
    dstates.noalias() += projection.transpose() * dproj;
  };

  for (Eigen::Index j = 0; j < B; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    const Eigen::Index off = tape.offsets[jj];
    const Eigen::Index Tb = tape.attn_c[jj].cols();
    if (Tb == 0) continue;
    Matrix<Scalar> states(H, Tb);
    for (Eigen::Index t = 0; t < Tb; ++t) states.col(t) = tape.s[static_cast<std::size_t>(t)].col(j);
    Matrix<Scalar> dstates = dfeat.block(0, off, H, Tb);
    Matrix<Scalar> dkc, dkq;
    attention_backward(tape.keys_c[jj], tape.proj_c[jj], tape.attn_c[jj], dfeat.block(H, off, H, Tb), p.attn_c,
                       grads.attn_c, dkc, dstates, states);
    attention_backward(tape.keys_q[jj], tape.proj_q[jj], tape.attn_q[jj], dfeat.block(2 * H, off, H, Tb), p.attn_q,
                       grads.attn_q, dkq, dstates, states);
    for (Eigen::Index t = 0; t < Tb; ++t) ds[static_cast<std::size_t>(t)].col(j) += dstates.col(t);
    for (Eigen::Index t = 0; t < dkc.cols(); ++t) dhc[static_cast<std::size_t>(t)].col(j) += dkc.col(t);
    for (Eigen::Index t = 0; t < dkq.cols(); ++t) dhq[static_cast<std::size_t>(t)].col(j) += dkq.col(t);
  }

  auto scatter = [](Matrix<Scalar>& table, const Eigen::MatrixXi& ids, Eigen::Index row, const Matrix<Scalar>& dx) {
    for (Eigen::Index j = 0; j < ids.cols(); ++j) table.col(ids(row, j)) += dx.col(j);
  };

  Matrix<Scalar> carry = Matrix<Scalar>::Zero(H, B);
  Matrix<Scalar> dx, dh_prev;
  for (auto t = static_cast<Eigen::Index>(tape.s.size()) - 1; t >= 0; --t) {
    const auto tt = static_cast<std::size_t>(t);
    Matrix<Scalar> dh = ds[tt] + carry;
    gru_backward(p.dec, tape.d_tape[tt], dh, grads.dec, dx, dh_prev);
    scatter(grads.emb_a, batch.a, t, dx);
    carry = std::move(dh_prev);
  }

  const Matrix<Scalar> dpre = (carry.array() * (Scalar(1) - tape.s0.array().square())).matrix();
  grads.init_w.noalias() += dpre * tape.init_in.transpose();
  grads.init_b.col(0) += dpre.rowwise().sum();
  const Matrix<Scalar> dinit = p.init_w.transpose() * dpre;
  dhq.back() += dinit.topRows(H);
  dhc.back() += dinit.bottomRows(H);

  auto encoder_backward = [&](const GruCell<Scalar>& cell, GruCell<Scalar>& gcell, const std::vector<GruTape<Scalar>>& tapes,
                              std::vector<Matrix<Scalar>>& dstates, Matrix<Scalar>& gemb, const Eigen::MatrixXi& ids) {
    Matrix<Scalar> c = Matrix<Scalar>::Zero(H, B);
    for (auto t = static_cast<Eigen::Index>(tapes.size()) - 1; t >= 0; --t) {
      const auto tt = static_cast<std::size_t>(t);
      Matrix<Scalar> dh = dstates[tt] + c;
      gru_backward(cell, tapes[tt], dh, gcell, dx, dh_prev);
      scatter(gemb, ids, t, dx);
      c = std::move(dh_prev);
    }
  };
  encoder_backward(p.c_enc, grads.c_enc, tape.c_tape, dhc, grads.emb_c, batch.c);
  encoder_backward(p.q_enc, grads.q_enc, tape.q_tape, dhq, grads.emb_q, batch.q);
}

/// Attention weights of a decoded answer. Row k holds the weights used while
/// predicting answer token k; columns are live context / question positions.
struct AttentionTrace {
  Eigen::MatrixXd code_attn;
  Eigen::MatrixXd q_attn;
};

/// Encoder outputs for one question/context pair.
template <typename Scalar>
struct EncodedInput {
  Matrix<Scalar> keys_q;  // h x Lq
  Matrix<Scalar> keys_c;  // h x Lc
  Matrix<Scalar> s0;      // h x 1
};

template <typename Scalar>
EncodedInput<Scalar> encode_input(const Seq2SeqModel<Scalar>& model, const std::vector<int>& question,
                                  const std::vector<int>& context) {
  const EncodedExample e{question, context, {}};
  const EncodedExample* ptr = &e;
  const PaddedBatch b = make_batch(std::span<const EncodedExample* const>(&ptr, 1));
  const auto& p = model.params;
  const Eigen::Index H = model.dims.d_hid;
  const RowMask<Scalar> live = RowMask<Scalar>::Ones(1);

  auto run = [&](const GruCell<Scalar>& cell, const Matrix<Scalar>& emb, const Eigen::MatrixXi& ids) {
    Matrix<Scalar> keys(H, ids.rows());
    Matrix<Scalar> h = Matrix<Scalar>::Zero(H, 1);
    for (Eigen::Index t = 0; t < ids.rows(); ++t) {
      h = gru_forward(cell, detail::gather_columns(emb, ids, t), h, live);
      keys.col(t) = h;
    }
    return keys;
  };
  EncodedInput<Scalar> out;
  out.keys_q = run(p.q_enc, p.emb_q, b.q);
  out.keys_c = run(p.c_enc, p.emb_c, b.c);
  Matrix<Scalar> init_in(2 * H, 1);
  init_in.topRows(H) = out.keys_q.rightCols(1);
  init_in.bottomRows(H) = out.keys_c.rightCols(1);
  out.s0 = ((p.init_w * init_in + p.init_b).array().tanh()).matrix();
  return out;
}

template <typename Scalar>
struct DecodeStep {
  Matrix<Scalar> logits;  // V x 1
  Matrix<Scalar> code_row;  // Lc x 1
  Matrix<Scalar> q_row;     // Lq x 1
};

/// Advances the decoder by one token; `state` is updated in place.
template <typename Scalar>
DecodeStep<Scalar> decode_step(const Seq2SeqModel<Scalar>& model, const EncodedInput<Scalar>& enc, int input_id,
                               Matrix<Scalar>& state) {
  const auto& p = model.params;
  const Eigen::Index H = model.dims.d_hid;
  state = gru_forward(p.dec, Matrix<Scalar>(p.emb_a.col(input_id)), state, RowMask<Scalar>(RowMask<Scalar>::Ones(1)));
  DecodeStep<Scalar> out;
  Matrix<Scalar> feat(3 * H, 1);
  Matrix<Scalar> ctx;
  detail::attend(enc.keys_c, Matrix<Scalar>(p.attn_c * state), out.code_row, ctx);
  feat.middleRows(H, H) = ctx;
  detail::attend(enc.keys_q, Matrix<Scalar>(p.attn_q * state), out.q_row, ctx);
  feat.bottomRows(H) = ctx;
  feat.topRows(H) = state;
  out.logits = p.out_w * feat + p.out_b;
  return out;
}

/// Next-token logits after feeding `prefix` (which starts with `<st>`), plus
/// the attention rows of that last step.
template <typename Scalar>
DecodeStep<Scalar> forward(const Seq2SeqModel<Scalar>& model, const std::vector<int>& question,
                           const std::vector<int>& context, const std::vector<int>& prefix) {
  if (prefix.empty() || prefix.front() != Vocabulary::kStart) {
    throw Error(ErrorKind::ShapeMismatch, "decoder prefix must begin with <st>");
  }
  for (const auto* ids : {&question, &context}) {
    for (int id : *ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= model.input_vocab.size()) {
        throw Error(ErrorKind::ShapeMismatch, "input id out of range");
      }
    }
  }
  for (int id : prefix) {
    if (id < 0 || static_cast<std::size_t>(id) >= model.output_vocab.size()) {
      throw Error(ErrorKind::ShapeMismatch, "answer id out of range");
    }
  }
  const auto enc = encode_input(model, question, context);
  Matrix<Scalar> state = enc.s0;
  DecodeStep<Scalar> step;
  for (int id : prefix) step = decode_step(model, enc, id, state);
  return step;
}

struct InferResult {
  TokenSeq answer;
  AttentionTrace trace;
  TokenSeq context;  // live context tokens the trace columns refer to
  double unk_fraction = 0;
  bool low_confidence = false;
};

inline constexpr double kLowConfidenceUnkFraction = 0.3;

/// Greedy decoding from `<st>` until `</s>` or max_a_len tokens.
template <typename Scalar>
InferResult infer(const Seq2SeqModel<Scalar>& model, const TokenSeq& question, const TokenSeq& context,
                  int max_a_len) {
  const EncodedExample e = encode_example(model, question, context);
  InferResult out;
  std::size_t unk = 0;
  for (int id : e.question) unk += id == Vocabulary::kUnk;
  out.unk_fraction = question.empty() ? 0.0 : static_cast<double>(unk) / static_cast<double>(e.question.size());
  out.low_confidence = out.unk_fraction > kLowConfidenceUnkFraction;
  out.context.assign(context.begin(), context.begin() + static_cast<std::ptrdiff_t>(e.context.size()));
  if (out.context.empty()) out.context.emplace_back(tok::kPad);

  const auto enc = encode_input(model, e.question, e.context);
  Matrix<Scalar> state = enc.s0;
  std::vector<Eigen::VectorXd> code_rows, q_rows;
  int input = Vocabulary::kStart;
  for (int k = 0; k < max_a_len; ++k) {
    auto step = decode_step(model, enc, input, state);
    step.logits(Vocabulary::kPad, 0) = -std::numeric_limits<Scalar>::infinity();
    step.logits(Vocabulary::kStart, 0) = -std::numeric_limits<Scalar>::infinity();
    Eigen::Index best = 0;
    step.logits.col(0).maxCoeff(&best);
    if (best == Vocabulary::kEnd) break;
    out.answer.push_back(model.output_vocab.token(static_cast<int>(best)));
    code_rows.push_back(step.code_row.col(0).template cast<double>());
    q_rows.push_back(step.q_row.col(0).template cast<double>());
    input = static_cast<int>(best);
  }
  out.trace.code_attn.resize(static_cast<Eigen::Index>(code_rows.size()), enc.keys_c.cols());
  out.trace.q_attn.resize(static_cast<Eigen::Index>(q_rows.size()), enc.keys_q.cols());
  for (std::size_t k = 0; k < code_rows.size(); ++k) {
    out.trace.code_attn.row(static_cast<Eigen::Index>(k)) = code_rows[k].transpose();
    out.trace.q_attn.row(static_cast<Eigen::Index>(k)) = q_rows[k].transpose();
  }
  return out;
}

}  // namespace codeqa

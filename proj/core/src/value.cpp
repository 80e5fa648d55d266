#include "d2gan/value.hpp"

#include <cmath>
#include <limits>

#include "d2gan/errors.hpp"

namespace d2gan {

namespace {

const double kLogFloor = std::log(kLossInputMin);
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Loss value and derivative at a raw discriminator output, clamped into the
// loss domain; the derivative is zero wherever the clamp is active.
struct LossEval {
  double value;
  double deriv;
};

LossEval eval_clamped(const LossFn& loss, double t) {
  if (std::isnan(t)) return {kNaN, kNaN};
  const double tc = clamp_loss_input(t);
  const bool inside = t >= kLossInputMin && t <= kLossInputMax;
  return {loss(tc), inside ? loss.deriv(tc) : 0.0};
}

// Per-row objective terms on the stacked [data; fakes] output of one
// discriminator, with d(objective)/d(output).
struct Terms {
  double value = 0.0;
  Matrix upstream;      // d value / d output (or pre-activation for vanilla)
  Matrix gen_upstream;  // d generator objective / d output, zero on data rows
  double gen_value = 0.0;
};

Terms vanilla_terms(const Network::Tape& tape, Eigen::Index nd, bool non_saturating) {
  const Matrix& logits = tape.preacts.back();
  const Eigen::Index n = logits.rows();
  const auto ng = static_cast<double>(n - nd);
  Terms t;
  t.upstream = Matrix::Zero(n, 1);
  t.gen_upstream = Matrix::Zero(n, 1);
  double real_sum = 0.0;
  double fake_sum = 0.0;
  double ns_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = logits(i, 0);
    if (i < nd) {
      const double lv = -softplus(-s);  // log D
      const bool inside = lv >= kLogFloor;
      real_sum += inside ? lv : kLogFloor;
      t.upstream(i, 0) = inside ? sigmoid(-s) / static_cast<double>(nd) : 0.0;
    } else {
      const double lv = -softplus(s);  // log(1 - D)
      const bool inside = lv >= kLogFloor;
      fake_sum += inside ? lv : kLogFloor;
      const double g = inside ? -sigmoid(s) / ng : 0.0;
      t.upstream(i, 0) = g;
      if (non_saturating) {
        const double lg = -softplus(-s);
        const bool in_ns = lg >= kLogFloor;
        ns_sum += in_ns ? -lg : -kLogFloor;
        t.gen_upstream(i, 0) = in_ns ? -sigmoid(-s) / ng : 0.0;
      } else {
        t.gen_upstream(i, 0) = g;
      }
    }
    if (std::isnan(s)) {
      real_sum = kNaN;
      fake_sum = kNaN;
    }
  }
  t.value = real_sum / static_cast<double>(nd) + fake_sum / ng;
  t.gen_value = non_saturating ? ns_sum / ng : t.value;
  return t;
}

// weight_data * mean_d[f_data(D x)] + weight_fake * mean_g[f_fake(D G z)] for
// one D2-family discriminator, where data rows use -l_a (scaled by c) or
// l_b - 1 depending on the role of the discriminator.
Terms dual_terms(const Matrix& out, Eigen::Index nd, const LossFn& data_loss, double data_sign, double data_weight,
                 const LossFn& fake_loss, double fake_sign, double fake_weight) {
  const Eigen::Index n = out.rows();
  const auto ng = static_cast<double>(n - nd);
  Terms t;
  t.upstream = Matrix::Zero(n, 1);
  double data_sum = 0.0;
  double fake_sum = 0.0;
  for (Eigen::Index i = 0; i < nd; ++i) {
    const LossEval e = eval_clamped(data_loss, out(i, 0));
    data_sum += data_sign * e.value;
    t.upstream(i, 0) = data_weight * data_sign * e.deriv / static_cast<double>(nd);
  }
  for (Eigen::Index i = nd; i < n; ++i) {
    const LossEval e = eval_clamped(fake_loss, out(i, 0));
    fake_sum += fake_sign * e.value;
    t.upstream(i, 0) = fake_weight * fake_sign * e.deriv / ng;
  }
  t.value = data_weight * data_sum / static_cast<double>(nd) + fake_weight * fake_sum / ng;
  t.gen_upstream = t.upstream;
  t.gen_upstream.topRows(nd).setZero();
  t.gen_value = t.value;
  return t;
}

// D1 rewards data: c1 mean_d[-l1] + mean_g[l2 - 1].
Terms d1_terms(const ModelSpec& spec, const Matrix& out, Eigen::Index nd) {
  Terms t = dual_terms(out, nd, spec.pair->l1, -1.0, spec.c1, spec.pair->l2, 1.0, 1.0);
  t.value -= 1.0;
  t.gen_value = t.value;
  return t;
}

// D2 rewards fakes: mean_d[l2 - 1] + c2 mean_g[-l1].
Terms d2_terms(const ModelSpec& spec, const Matrix& out, Eigen::Index nd) {
  Terms t = dual_terms(out, nd, spec.pair->l2, 1.0, 1.0, spec.pair->l1, -1.0, spec.c2);
  t.value -= 1.0;
  t.gen_value = t.value;
  return t;
}

Matrix stack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw ShapeError("data and fake batches must have the same width");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

void check_batches(const Matrix& data, const Matrix& fakes) {
  if (data.rows() < 1 || fakes.rows() < 1) throw ShapeError("value estimate needs non-empty batches");
  if (data.cols() != 2 || fakes.cols() != 2) throw ShapeError("data and fake batches must be n x 2");
}

}  // namespace

ModelSpec ModelSpec::from_config(const TrainConfig& config) {
  ModelSpec s;
  s.kind = config.model;
  s.c1 = config.c1;
  s.c2 = config.c2;
  if (config.model != ModelKind::kVanilla) s.pair = config.loss_pair();
  s.non_saturating = config.model == ModelKind::kVanilla && config.non_saturating;
  return s;
}

Players make_players(const TrainConfig& config) {
  Players p;
  p.g = make_generator(config.noise_dim, config.hidden);
  if (config.model == ModelKind::kVanilla) {
    p.d1 = make_discriminator(config.hidden, Activation::kSigmoid);
  } else {
    p.d1 = make_discriminator(config.hidden, Activation::kSoftplus);
    p.d2 = make_discriminator(config.hidden, Activation::kSoftplus);
  }
  return p;
}

bool ValueGrads::finite() const {
  return std::isfinite(value) && std::isfinite(generator_objective) && g.allFinite() && d1.allFinite() &&
         d2.allFinite();
}

ValueGrads batch_value_and_grads(const ModelSpec& spec, const Players& players, const Matrix& data,
                                 const Matrix& noise, GradRequest request) {
  if (noise.cols() != players.g.input_dim()) throw ShapeError("noise width does not match generator input");
  const Network::Tape g_tape = players.g.forward_tape(noise);
  check_batches(data, g_tape.output);
  const Matrix both = stack(data, g_tape.output);
  const Eigen::Index nd = data.rows();

  ValueGrads out;
  Matrix fake_grad = Matrix::Zero(g_tape.output.rows(), 2);
  auto accumulate = [&](const Network& d, const Network::Tape& tape, const Terms& terms, bool preact,
                        Eigen::VectorXd& d_grad) {
    if (request.discriminators) d_grad = d.backward(tape, terms.upstream, preact).params;
    if (request.generator) {
      const Network::Gradients gg = d.backward(tape, terms.gen_upstream, preact, true);
      fake_grad += gg.input.bottomRows(g_tape.output.rows());
    }
  };

  if (spec.kind == ModelKind::kVanilla) {
    const Network::Tape tape = players.d1.forward_tape(both);
    const Terms t = vanilla_terms(tape, nd, spec.non_saturating);
    out.value = t.value;
    out.generator_objective = t.gen_value;
    accumulate(players.d1, tape, t, true, out.d1);
  } else {
    if (!spec.pair) throw std::invalid_argument("D2-family model needs a loss pair");
    const Network::Tape tape1 = players.d1.forward_tape(both);
    const Network::Tape tape2 = players.d2.forward_tape(both);
    const Terms t1 = d1_terms(spec, tape1.output, nd);
    const Terms t2 = d2_terms(spec, tape2.output, nd);
    out.value = t1.value + t2.value;
    out.generator_objective = out.value;
    accumulate(players.d1, tape1, t1, false, out.d1);
    accumulate(players.d2, tape2, t2, false, out.d2);
  }
  if (request.generator) out.g = players.g.backward(g_tape, fake_grad).params;
  return out;
}

double value_on_samples(const ModelSpec& spec, const Players& players, const Matrix& data, const Matrix& fakes) {
  check_batches(data, fakes);
  const Matrix both = stack(data, fakes);
  const Eigen::Index nd = data.rows();
  if (spec.kind == ModelKind::kVanilla) {
    return vanilla_terms(players.d1.forward_tape(both), nd, false).value;
  }
  if (!spec.pair) throw std::invalid_argument("D2-family model needs a loss pair");
  return d1_terms(spec, players.d1.forward(both), nd).value + d2_terms(spec, players.d2.forward(both), nd).value;
}

}  // namespace d2gan

#include "c2p/losses.hpp"

#include <cmath>

namespace c2p {

Var sim(Var a, Var b, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("temperature must be positive");
  return vexp(scale(dot(a, b), 1.0 / tau));
}

double sim(const Tensor& a, const Tensor& b, double tau) {
  if (!(tau > 0.0)) throw InvalidInput("temperature must be positive");
  if (!a.same_shape(b)) throw ShapeError("sim shape mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
  return std::exp(d / tau);
}

namespace {

// One direction of the symmetric loss: anchors[i] against positives[i],
// denominator over all anchors[k] (k != i) and all positives[k].
Var nt_xent_direction(Tape& tape, const std::vector<Var>& anchors,
                      const std::vector<Var>& positives, double tau) {
  std::size_t n = anchors.size();
  Var acc = tape.constant(Tensor::scalar(0.0));
  for (std::size_t i = 0; i < n; ++i) {
    Var pos = sim(anchors[i], positives[i], tau);
    Var denom = pos;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) denom = add(denom, sim(anchors[i], anchors[k], tau));
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k != i) denom = add(denom, sim(anchors[i], positives[k], tau));
    }
    // -log(pos / denom) as log(denom) - log(pos); with a batch of one the
    // two logs see the same value and the term cancels to exactly zero.
    acc = add(acc, sub(vlog(denom), vlog(pos)));
  }
  return acc;
}

void check_batch(const std::vector<Var>& a, const std::vector<Var>& b,
                 const char* name) {
  if (a.empty() || a.size() != b.size()) {
    throw InvalidInput(std::string(name) + " needs two equal, non-empty lists");
  }
}

}  // namespace

Var intra_loss(Tape& tape, const std::vector<Var>& d1,
               const std::vector<Var>& d2, double tau) {
  check_batch(d1, d2, "intra_loss");
  double inv = 1.0 / (2.0 * static_cast<double>(d1.size()));
  Var both = add(nt_xent_direction(tape, d1, d2, tau),
                 nt_xent_direction(tape, d2, d1, tau));
  return scale(both, inv);
}

Var cross_loss(Tape& tape, const std::vector<Var>& depth,
               const std::vector<Var>& image, double tau) {
  check_batch(depth, image, "cross_loss");
  double inv = 1.0 / (2.0 * static_cast<double>(depth.size()));
  Var both = add(nt_xent_direction(tape, depth, image, tau),
                 nt_xent_direction(tape, image, depth, tau));
  return scale(both, inv);
}

Var total_loss(Var intra, Var cross, Var sigma) {
  if (intra.tape->value(sigma).scalar_value() <= 0.0) {
    throw InvalidInput("balance sigma must be positive");
  }
  Var inv_sq = vexp(scale(vlog(sigma), -2.0));  // 1 / sigma^2
  Var balanced = mul(inv_sq, intra);
  return add(add(balanced, cross), vlog(add_const(sigma, 1.0)));
}

Var cross_entropy(Var logits, std::size_t label) {
  const Tensor& l = logits.tape->value(logits);
  if (l.rank() != 1) throw ShapeError("cross_entropy expects rank-1 logits");
  if (label >= l.size()) {
    throw InvalidInput("label " + std::to_string(label) +
                       " out of range for " + std::to_string(l.size()) +
                       " classes");
  }
  // Shift by the (detached) max for stability; exact for gradients since
  // softmax is shift-invariant.
  double mx = l[0];
  for (std::size_t i = 1; i < l.size(); ++i) mx = std::max(mx, l[i]);
  Var shifted = add_const(logits, -mx);
  Var lse = vlog(sum_all(vexp(shifted)));
  return sub(lse, pick(shifted, label));
}

double cross_entropy(const std::vector<double>& logits, std::size_t label) {
  if (label >= logits.size()) {
    throw InvalidInput("label out of range");
  }
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double denom = 0.0;
  for (double v : logits) denom += std::exp(v - mx);
  return std::log(denom) - (logits[label] - mx);
}

}  // namespace c2p

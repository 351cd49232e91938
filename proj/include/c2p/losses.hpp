#pragma once

#include <vector>

#include "c2p/autodiff.hpp"

namespace c2p {

inline constexpr double kDefaultTau = 0.7;

// e(a, b) = exp(dot(a, b) / tau).
Var sim(Var a, Var b, double tau);
double sim(const Tensor& a, const Tensor& b, double tau);

// NT-Xent loss between the two jittered-distance depth features of each
// sample, symmetrized over both directions and averaged over 2N terms.
// Each direction-i denominator sums e-terms against every batch feature
// of both augmentations, with the self term skipped (algebraically the
// same as subtracting it, but exact: a batch of one yields exactly 0).
Var intra_loss(Tape& tape, const std::vector<Var>& d1,
               const std::vector<Var>& d2, double tau = kDefaultTau);

// Same structure across modalities: depth-mean features against frozen
// proxy features. The depth means are the raw pair averages, deliberately
// not re-normalized.
Var cross_loss(Tape& tape, const std::vector<Var>& depth,
               const std::vector<Var>& image, double tau = kDefaultTau);

// Multi-task balance: (1/sigma^2) * intra + cross + log(sigma + 1).
// sigma must be a positive scalar var; training keeps it positive by
// parameterizing sigma = exp(log_sigma).
Var total_loss(Var intra, Var cross, Var sigma);

// -log softmax(logits)[label]; label out of range -> InvalidInput.
Var cross_entropy(Var logits, std::size_t label);
double cross_entropy(const std::vector<double>& logits, std::size_t label);

}  // namespace c2p

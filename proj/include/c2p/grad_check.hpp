#pragma once

#include <functional>

#include "c2p/autodiff.hpp"

namespace c2p {

// A deterministic scalar-valued function of the parameters in a store.
// It must read every parameter it depends on through tape.param(...).
using ScalarFn = std::function<Var(Tape&, ParamStore&)>;

// Central-difference verification of the analytic gradients. Perturbs every
// coordinate of every entry by +/-eps and compares
// (f(x+eps) - f(x-eps)) / (2 eps) against the tape gradient. Returns
// max over coordinates of |a - n| / max(1e-8, |a| + |n|).
double grad_check(const ScalarFn& fn, ParamStore& store, double eps = 1e-5);

// Forward-only evaluation helper.
double evaluate_scalar(const ScalarFn& fn, ParamStore& store);

}  // namespace c2p

#include "c2p/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace c2p {

double evaluate_scalar(const ScalarFn& fn, ParamStore& store) {
  Tape tape(&store);
  Var root = fn(tape, store);
  return tape.value(root).scalar_value();
}

double grad_check(const ScalarFn& fn, ParamStore& store, double eps) {
  // Analytic pass.
  store.zero_grads();
  {
    Tape tape(&store);
    Var root = fn(tape, store);
    tape.backward(root);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(store.size());
  for (const auto& e : store.entries()) analytic.push_back(e.grads);

  double worst = 0.0;
  for (std::size_t ei = 0; ei < store.entries().size(); ++ei) {
    ParamEntry& e = store.entries()[ei];
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      double orig = e.values[i];
      e.values[i] = orig + eps;
      double fp = evaluate_scalar(fn, store);
      e.values[i] = orig - eps;
      double fm = evaluate_scalar(fn, store);
      e.values[i] = orig;
      double numeric = (fp - fm) / (2.0 * eps);
      double a = analytic[ei][i];
      double err = std::abs(a - numeric) /
                   std::max(1e-8, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  store.zero_grads();
  return worst;
}

}  // namespace c2p

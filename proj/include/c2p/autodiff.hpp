#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "c2p/param_store.hpp"
#include "c2p/tensor.hpp"

namespace c2p {

class Tape;

// Lightweight handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
};

// Reverse-mode tape. Forward values are computed eagerly at op-construction
// time; backward() runs the recorded vector-Jacobian products in reverse and
// accumulates into the bound ParamStore's gradient buffers. Every op checks
// its output for NaN/Inf and throws NumericsError on the first hit.
//
// Reductions use fixed index order, so forwards are bit-reproducible.
class Tape {
 public:
  explicit Tape(ParamStore* store = nullptr) : store_(store) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf with no gradient trail.
  Var constant(Tensor value);

  // Leaf bound to a store entry; backward() accumulates into its grads.
  Var param(const std::string& name);

  const Tensor& value(Var v) const;
  // Gradient accumulated at a node (valid after backward; zeros if untouched).
  const Tensor& grad(Var v);

  // root must be scalar. Seeds d(root)/d(root) = 1 and sweeps the tape.
  void backward(Var root);

  std::size_t node_count() const { return nodes_.size(); }

  ParamStore* store() { return store_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated on demand during backward
    std::vector<int> parents;
    std::function<void(Tape&, int)> backward;  // (tape, own id)
    std::string param_name;                    // nonempty for param leaves
    bool grad_ready = false;
  };

  Tensor& grad_buffer(int id);
  Node& node(int id) { return nodes_[id]; }

  // deque keeps value/grad references stable as the tape grows
  std::deque<Node> nodes_;
  ParamStore* store_ = nullptr;

  friend struct TapeAccess;
};

// Internal accessor used by the op implementations.
struct TapeAccess;

// --- ops -------------------------------------------------------------
// Shapes follow row-vector convention: matmul accepts [m x k]*[k x n] and
// [k]*[k x n]. All mismatches throw ShapeError.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);                 // elementwise
Var scale(Var a, double c);
Var add_const(Var a, double c);
Var relu(Var a);
Var vexp(Var a);
Var vlog(Var a);
Var concat(const std::vector<Var>& parts);          // rank-1 inputs
Var concat_scalars(Tape& tape, const std::vector<Var>& scalars);  // -> rank-1
Var matmul_transposed(Var x, Var w);  // x[k] * w[n x k]^T -> [n]
Var sum_all(Var a);
Var mean_all(Var a);
Var l2_normalize(Var a);               // rank-1
Var dot(Var a, Var b);                 // rank-1, scalar result
Var cosine(Var a, Var b);              // rank-1, scalar result
Var softmax(Var a);                    // rank-1
Var pick(Var a, std::size_t index);    // rank-1 -> scalar
Var mul_scalar(Var x, Var s);          // broadcast scalar multiply

// Affine helper: x[in] * w[in x out] + b[out].
Var linear(Var x, Var w, Var b);

}  // namespace c2p

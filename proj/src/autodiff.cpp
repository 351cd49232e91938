#include "c2p/autodiff.hpp"

#include <cmath>

namespace c2p {

struct TapeAccess {
  static Var push(Tape& t, Tensor value, std::vector<int> parents,
                  std::function<void(Tape&, int)> backward,
                  std::string param_name = {}) {
    if (!value.all_finite()) {
      throw NumericsError("non-finite value produced on tape (node " +
                          std::to_string(t.nodes_.size()) + ")");
    }
    Tape::Node n;
    n.value = std::move(value);
    n.parents = std::move(parents);
    n.backward = std::move(backward);
    n.param_name = std::move(param_name);
    t.nodes_.push_back(std::move(n));
    return Var{&t, static_cast<int>(t.nodes_.size() - 1)};
  }

  static Tape::Node& node(Tape& t, int id) { return t.nodes_[id]; }
  static Tensor& grad(Tape& t, int id) { return t.grad_buffer(id); }
  static const Tensor& val(const Tape& t, int id) { return t.nodes_[id].value; }
};

namespace {

const Tensor& val(Var v) { return v.tape->value(v); }

void check_same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw InvalidInput("operands live on different tapes");
  }
}

void check_rank1(Var v, const char* op) {
  if (val(v).rank() != 1) {
    throw ShapeError(std::string(op) + " expects rank-1 operand, got " +
                     Tensor::shape_string(val(v).shape()));
  }
}

// Accumulate src into the grad buffer of node `id`.
void bump(Tape& t, int id, const std::vector<double>& src) {
  Tensor& g = TapeAccess::grad(t, id);
  for (std::size_t i = 0; i < src.size(); ++i) g[i] += src[i];
}

}  // namespace

Var Tape::constant(Tensor value) {
  return TapeAccess::push(*this, std::move(value), {}, nullptr);
}

Var Tape::param(const std::string& name) {
  if (store_ == nullptr) {
    throw InvalidInput("tape has no bound ParamStore for param " + name);
  }
  return TapeAccess::push(*this, store_->tensor(name), {}, nullptr, name);
}

const Tensor& Tape::value(Var v) const {
  return nodes_.at(static_cast<std::size_t>(v.id)).value;
}

const Tensor& Tape::grad(Var v) {
  return grad_buffer(v.id);
}

Tensor& Tape::grad_buffer(int id) {
  Node& n = nodes_[id];
  if (!n.grad_ready) {
    n.grad = Tensor(n.value.shape());
    n.grad_ready = true;
  }
  return n.grad;
}

void Tape::backward(Var root) {
  if (root.tape != this) throw InvalidInput("root var is not on this tape");
  if (value(root).size() != 1) {
    throw ShapeError("backward root must be scalar, got " +
                     Tensor::shape_string(value(root).shape()));
  }
  grad_buffer(root.id)[0] = 1.0;
  for (int id = root.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_ready) continue;  // node does not influence the root
    if (n.backward) n.backward(*this, id);
    if (!n.param_name.empty() && store_ != nullptr) {
      ParamEntry& e = store_->entry(n.param_name);
      for (std::size_t i = 0; i < e.grads.size(); ++i) e.grads[i] += n.grad[i];
    }
  }
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (B.rank() != 2) {
    throw ShapeError("matmul rhs must be rank-2, got " +
                     Tensor::shape_string(B.shape()));
  }
  std::size_t k = B.shape()[0], n = B.shape()[1];
  if (A.rank() == 2) {
    if (A.shape()[1] != k) {
      throw ShapeError("matmul inner dims differ: " +
                       Tensor::shape_string(A.shape()) + " vs " +
                       Tensor::shape_string(B.shape()));
    }
    std::size_t m = A.shape()[0];
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += A.at(i, p) * B.at(p, j);
        out.at(i, j) = acc;
      }
    }
    return TapeAccess::push(
        *a.tape, std::move(out), {a.id, b.id}, [m, n, k](Tape& t, int id) {
          auto& self = TapeAccess::node(t, id);
          const Tensor& g = self.grad;
          const Tensor& Av = TapeAccess::val(t, self.parents[0]);
          const Tensor& Bv = TapeAccess::val(t, self.parents[1]);
          Tensor& ga = TapeAccess::grad(t, self.parents[0]);
          Tensor& gb = TapeAccess::grad(t, self.parents[1]);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t p = 0; p < k; ++p) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += g.at(i, j) * Bv.at(p, j);
              ga.at(i, p) += acc;
            }
          for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j < n; ++j) {
              double acc = 0.0;
              for (std::size_t i = 0; i < m; ++i) acc += Av.at(i, p) * g.at(i, j);
              gb.at(p, j) += acc;
            }
        });
  }
  if (A.rank() != 1 || A.shape()[0] != k) {
    throw ShapeError("matmul operand shapes incompatible: " +
                     Tensor::shape_string(A.shape()) + " vs " +
                     Tensor::shape_string(B.shape()));
  }
  Tensor out({n});
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += A[p] * B.at(p, j);
    out[j] = acc;
  }
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id, b.id}, [n, k](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& g = self.grad;
        const Tensor& xv = TapeAccess::val(t, self.parents[0]);
        const Tensor& Bv = TapeAccess::val(t, self.parents[1]);
        Tensor& gx = TapeAccess::grad(t, self.parents[0]);
        Tensor& gB = TapeAccess::grad(t, self.parents[1]);
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[j] * Bv.at(p, j);
          gx[p] += acc;
        }
        for (std::size_t p = 0; p < k; ++p)
          for (std::size_t j = 0; j < n; ++j) gB.at(p, j) += xv[p] * g[j];
      });
}

namespace {

Var elementwise_binary(Var a, Var b, const char* name,
                       double (*fwd)(double, double),
                       void (*bwd)(double ga_in, double av, double bv,
                                   double* ga, double* gb)) {
  check_same_tape(a, b);
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) {
    throw ShapeError(std::string(name) + " shape mismatch: " +
                     Tensor::shape_string(A.shape()) + " vs " +
                     Tensor::shape_string(B.shape()));
  }
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = fwd(A[i], B[i]);
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id, b.id}, [bwd](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& g = self.grad;
        const Tensor& Av = TapeAccess::val(t, self.parents[0]);
        const Tensor& Bv = TapeAccess::val(t, self.parents[1]);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        Tensor& gb = TapeAccess::grad(t, self.parents[1]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          double da = 0.0, db = 0.0;
          bwd(g[i], Av[i], Bv[i], &da, &db);
          ga[i] += da;
          gb[i] += db;
        }
      });
}

}  // namespace

Var add(Var a, Var b) {
  return elementwise_binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double g, double, double, double* ga, double* gb) {
        *ga = g;
        *gb = g;
      });
}

Var sub(Var a, Var b) {
  return elementwise_binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double g, double, double, double* ga, double* gb) {
        *ga = g;
        *gb = -g;
      });
}

Var mul(Var a, Var b) {
  return elementwise_binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double g, double x, double y, double* ga, double* gb) {
        *ga = g * y;
        *gb = g * x;
      });
}

Var scale(Var a, double c) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] * c;
  return TapeAccess::push(*a.tape, std::move(out), {a.id},
                          [c](Tape& t, int id) {
                            auto& self = TapeAccess::node(t, id);
                            Tensor& ga = TapeAccess::grad(t, self.parents[0]);
                            for (std::size_t i = 0; i < ga.size(); ++i)
                              ga[i] += self.grad[i] * c;
                          });
}

Var add_const(Var a, double c) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] + c;
  return TapeAccess::push(*a.tape, std::move(out), {a.id},
                          [](Tape& t, int id) {
                            auto& self = TapeAccess::node(t, id);
                            bump(t, self.parents[0], self.grad.values());
                          });
}

Var relu(Var a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] > 0.0 ? A[i] : 0.0;
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& Av = TapeAccess::val(t, self.parents[0]);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          if (Av[i] > 0.0) ga[i] += self.grad[i];
      });
}

Var vexp(Var a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = std::exp(A[i]);
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga[i] += self.grad[i] * self.value[i];
      });
}

Var vlog(Var a) {
  const Tensor& A = val(a);
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = std::log(A[i]);
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& Av = TapeAccess::val(t, self.parents[0]);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga[i] += self.grad[i] / Av[i];
      });
}

Var concat(const std::vector<Var>& parts) {
  if (parts.empty()) throw InvalidInput("concat of zero parts");
  Tape* tape = parts[0].tape;
  std::size_t total = 0;
  std::vector<int> parents;
  std::vector<std::size_t> sizes;
  for (Var p : parts) {
    check_same_tape(parts[0], p);
    check_rank1(p, "concat");
    total += val(p).size();
    parents.push_back(p.id);
    sizes.push_back(val(p).size());
  }
  Tensor out({total});
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& v = val(p);
    for (std::size_t i = 0; i < v.size(); ++i) out[off + i] = v[i];
    off += v.size();
  }
  return TapeAccess::push(
      *tape, std::move(out), std::move(parents), [sizes](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        std::size_t off = 0;
        for (std::size_t k = 0; k < self.parents.size(); ++k) {
          Tensor& g = TapeAccess::grad(t, self.parents[k]);
          for (std::size_t i = 0; i < sizes[k]; ++i)
            g[i] += self.grad[off + i];
          off += sizes[k];
        }
      });
}

Var concat_scalars(Tape& tape, const std::vector<Var>& scalars) {
  if (scalars.empty()) throw InvalidInput("concat_scalars of zero parts");
  std::vector<int> parents;
  Tensor out({scalars.size()});
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (scalars[i].tape != &tape) {
      throw InvalidInput("operands live on different tapes");
    }
    out[i] = tape.value(scalars[i]).scalar_value();
    parents.push_back(scalars[i].id);
  }
  return TapeAccess::push(
      tape, std::move(out), std::move(parents), [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        for (std::size_t i = 0; i < self.parents.size(); ++i) {
          TapeAccess::grad(t, self.parents[i])[0] += self.grad[i];
        }
      });
}

Var matmul_transposed(Var x, Var w) {
  check_same_tape(x, w);
  const Tensor& X = val(x);
  const Tensor& W = val(w);
  if (X.rank() != 1 || W.rank() != 2 || W.shape()[1] != X.shape()[0]) {
    throw ShapeError("matmul_transposed expects x[k], w[n x k]");
  }
  std::size_t n = W.shape()[0], k = W.shape()[1];
  Tensor out({n});
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += X[p] * W.at(j, p);
    out[j] = acc;
  }
  return TapeAccess::push(
      *x.tape, std::move(out), {x.id, w.id}, [n, k](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& g = self.grad;
        const Tensor& Xv = TapeAccess::val(t, self.parents[0]);
        const Tensor& Wv = TapeAccess::val(t, self.parents[1]);
        Tensor& gx = TapeAccess::grad(t, self.parents[0]);
        Tensor& gw = TapeAccess::grad(t, self.parents[1]);
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[j] * Wv.at(j, p);
          gx[p] += acc;
        }
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t p = 0; p < k; ++p) gw.at(j, p) += g[j] * Xv[p];
      });
}

Var sum_all(Var a) {
  const Tensor& A = val(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += A[i];
  return TapeAccess::push(
      *a.tape, Tensor::scalar(acc), {a.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        double g = self.grad[0];
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
      });
}

Var mean_all(Var a) {
  const Tensor& A = val(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += A[i];
  double inv = 1.0 / static_cast<double>(A.size());
  return TapeAccess::push(
      *a.tape, Tensor::scalar(acc * inv), {a.id}, [inv](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        double g = self.grad[0] * inv;
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
      });
}

Var l2_normalize(Var a) {
  check_rank1(a, "l2_normalize");
  const Tensor& A = val(a);
  double r2 = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) r2 += A[i] * A[i];
  double r = std::sqrt(r2);
  if (r == 0.0) throw NumericsError("l2_normalize of zero vector");
  Tensor out(A.shape());
  for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] / r;
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id}, [r](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& y = self.value;
        const Tensor& g = self.grad;
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        double ydotg = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) ydotg += y[i] * g[i];
        for (std::size_t i = 0; i < y.size(); ++i)
          ga[i] += (g[i] - y[i] * ydotg) / r;
      });
}

Var dot(Var a, Var b) {
  check_same_tape(a, b);
  check_rank1(a, "dot");
  check_rank1(b, "dot");
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) {
    throw ShapeError("dot shape mismatch: " + Tensor::shape_string(A.shape()) +
                     " vs " + Tensor::shape_string(B.shape()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += A[i] * B[i];
  return TapeAccess::push(
      *a.tape, Tensor::scalar(acc), {a.id, b.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& Av = TapeAccess::val(t, self.parents[0]);
        const Tensor& Bv = TapeAccess::val(t, self.parents[1]);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        Tensor& gb = TapeAccess::grad(t, self.parents[1]);
        double g = self.grad[0];
        for (std::size_t i = 0; i < Av.size(); ++i) {
          ga[i] += g * Bv[i];
          gb[i] += g * Av[i];
        }
      });
}

Var cosine(Var a, Var b) {
  check_same_tape(a, b);
  check_rank1(a, "cosine");
  check_rank1(b, "cosine");
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  if (!A.same_shape(B)) {
    throw ShapeError("cosine shape mismatch");
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    ab += A[i] * B[i];
    aa += A[i] * A[i];
    bb += B[i] * B[i];
  }
  double ra = std::sqrt(aa), rb = std::sqrt(bb);
  if (ra == 0.0 || rb == 0.0) throw NumericsError("cosine of zero vector");
  double c = ab / (ra * rb);
  return TapeAccess::push(
      *a.tape, Tensor::scalar(c), {a.id, b.id},
      [ra, rb, c](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& Av = TapeAccess::val(t, self.parents[0]);
        const Tensor& Bv = TapeAccess::val(t, self.parents[1]);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        Tensor& gb = TapeAccess::grad(t, self.parents[1]);
        double g = self.grad[0];
        for (std::size_t i = 0; i < Av.size(); ++i) {
          ga[i] += g * (Bv[i] / (ra * rb) - c * Av[i] / (ra * ra));
          gb[i] += g * (Av[i] / (ra * rb) - c * Bv[i] / (rb * rb));
        }
      });
}

Var softmax(Var a) {
  check_rank1(a, "softmax");
  const Tensor& A = val(a);
  double mx = A[0];
  for (std::size_t i = 1; i < A.size(); ++i) mx = std::max(mx, A[i]);
  Tensor out(A.shape());
  double denom = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    out[i] = std::exp(A[i] - mx);
    denom += out[i];
  }
  for (std::size_t i = 0; i < A.size(); ++i) out[i] /= denom;
  return TapeAccess::push(
      *a.tape, std::move(out), {a.id}, [](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& y = self.value;
        const Tensor& g = self.grad;
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        double ydotg = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) ydotg += y[i] * g[i];
        for (std::size_t i = 0; i < y.size(); ++i)
          ga[i] += y[i] * (g[i] - ydotg);
      });
}

Var pick(Var a, std::size_t index) {
  check_rank1(a, "pick");
  const Tensor& A = val(a);
  if (index >= A.size()) {
    throw InvalidInput("pick index " + std::to_string(index) +
                       " out of range for length " + std::to_string(A.size()));
  }
  return TapeAccess::push(
      *a.tape, Tensor::scalar(A[index]), {a.id}, [index](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        Tensor& ga = TapeAccess::grad(t, self.parents[0]);
        ga[index] += self.grad[0];
      });
}

Var mul_scalar(Var x, Var s) {
  check_same_tape(x, s);
  const Tensor& X = val(x);
  const Tensor& S = val(s);
  if (S.size() != 1) {
    throw ShapeError("mul_scalar multiplier must have one element");
  }
  double sv = S[0];
  Tensor out(X.shape());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = X[i] * sv;
  return TapeAccess::push(
      *x.tape, std::move(out), {x.id, s.id}, [sv](Tape& t, int id) {
        auto& self = TapeAccess::node(t, id);
        const Tensor& Xv = TapeAccess::val(t, self.parents[0]);
        Tensor& gx = TapeAccess::grad(t, self.parents[0]);
        Tensor& gs = TapeAccess::grad(t, self.parents[1]);
        double acc = 0.0;
        for (std::size_t i = 0; i < Xv.size(); ++i) {
          gx[i] += self.grad[i] * sv;
          acc += self.grad[i] * Xv[i];
        }
        gs[0] += acc;
      });
}

Var linear(Var x, Var w, Var b) { return add(matmul(x, w), b); }

}  // namespace c2p

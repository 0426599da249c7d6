#pragma once

// Dense row-major matrices with a reverse-mode tape. Rank <= 2 only; the only
// broadcast is adding a 1 x n row to every row of an m x n matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tar/error.hpp"

namespace tar::nn {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != r * c) throw ShapeError("Matrix: " + std::to_string(data.size()) + " values for " + shape_str(r, c));
  }

  static Matrix row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Matrix(1, n, std::move(values));
  }
  static Matrix column(std::vector<double> values) {
    const std::size_t n = values.size();
    return Matrix(n, 1, std::move(values));
  }
  static Matrix scalar(double v) { return Matrix(1, 1, v); }

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  std::string shape() const { return shape_str(rows, cols); }

  static std::string shape_str(std::size_t r, std::size_t c) {
    return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct Parameter {
  std::string name;
  Matrix value;
};

// Ordered, named parameter collection.
class ParameterSet {
 public:
  std::size_t add(std::string name, Matrix init) {
    for (const auto& p : params_) {
      if (p.name == name) throw std::invalid_argument("duplicate parameter '" + name + "'");
    }
    params_.push_back({std::move(name), std::move(init)});
    return params_.size() - 1;
  }
  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name == name) return i;
    }
    throw std::out_of_range("no parameter named '" + name + "'");
  }

  std::vector<Matrix> zeros_like() const {
    std::vector<Matrix> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.emplace_back(p.value.rows, p.value.cols);
    return out;
  }

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    if (a.params_.size() != b.params_.size()) return false;
    for (std::size_t i = 0; i < a.params_.size(); ++i) {
      if (a.params_[i].name != b.params_[i].name || !(a.params_[i].value == b.params_[i].value)) return false;
    }
    return true;
  }

 private:
  std::vector<Parameter> params_;
};

inline void init_uniform(ParameterSet& params, std::mt19937_64& rng, double lo = -0.1, double hi = 0.1) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& p : params) {
    for (double& v : p.value.data) v = dist(rng);
  }
}

class Tape;

// Handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows; }
  std::size_t cols() const { return value().cols; }
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Var constant(Matrix m) { return push(std::move(m), {}, nullptr, false); }

  // Leaf bound to parameter `index`; its gradient is reported by backward().
  Var param(const ParameterSet& params, std::size_t index) {
    Var v = push(params[index].value, {}, nullptr, true);
    nodes_[v.id].param_index = index;
    param_count_ = std::max(param_count_, params.size());
    return v;
  }

  Var variable(Matrix m) { return push(std::move(m), {}, nullptr, true); }

  Var push(Matrix value, std::vector<std::size_t> parents, BackwardFn fn, bool leaf_requires_grad = false) {
    if (backward_done_) throw std::logic_error("tape: cannot record after backward; call reset()");
#ifndef NDEBUG
    for (double v : value.data) {
      if (!std::isfinite(v)) throw std::domain_error("tape: non-finite value produced");
    }
#endif
    Node n;
    n.value = std::move(value);
    n.requires_grad = leaf_requires_grad;
    for (std::size_t p : parents) n.requires_grad = n.requires_grad || nodes_[p].requires_grad;
    n.parents = std::move(parents);
    if (n.requires_grad && !n.parents.empty()) n.backward = std::move(fn);
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
  }

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of node `id`, allocated lazily.
  Matrix& grad(std::size_t id) {
    Node& n = nodes_[id];
    if (n.grad.size() != n.value.size()) n.grad = Matrix(n.value.rows, n.value.cols);
    return n.grad;
  }
  const Matrix& grad_of(Var v) {
    return grad(v.id);
  }

  // Reverse sweep from a scalar loss; returns d loss / d parameter for every
  // parameter index seen (zeros for parameters the loss does not touch).
  std::vector<Matrix> backward(Var loss, const ParameterSet* params = nullptr) {
    if (backward_done_) throw std::logic_error("tape: backward called twice without reset");
    const Matrix& lv = nodes_.at(loss.id).value;
    if (lv.rows != 1 || lv.cols != 1) throw ShapeError("backward: loss must be scalar, got " + lv.shape());
    backward_done_ = true;
    grad(loss.id).data[0] = 1.0;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (!n.requires_grad || !n.backward || n.grad.size() == 0) continue;
      n.backward(*this, id);
    }
    std::vector<Matrix> out;
    if (params) {
      out = params->zeros_like();
    } else {
      out.resize(param_count_);
    }
    for (auto& n : nodes_) {
      if (n.param_index == kNoParam) continue;
      Matrix& dst = out[n.param_index];
      if (dst.size() == 0) dst = Matrix(n.value.rows, n.value.cols);
      if (n.grad.size() == 0) continue;
      for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += n.grad.data[i];
    }
    return out;
  }

  const std::vector<std::size_t>& parents(std::size_t id) const { return nodes_[id].parents; }

  void reset() {
    nodes_.clear();
    backward_done_ = false;
    param_count_ = 0;
  }

 private:
  static constexpr std::size_t kNoParam = std::numeric_limits<std::size_t>::max();

  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    std::size_t param_index = kNoParam;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
  std::size_t param_count_ = 0;
};

inline const Matrix& Var::value() const { return tape->value(id); }

namespace detail {

inline void check_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw std::invalid_argument("operands recorded on different tapes");
}

inline void accumulate(Tape& t, std::size_t id, const Matrix& g) {
  if (!t.requires_grad(id)) return;
  Matrix& dst = t.grad(id);
  for (std::size_t i = 0; i < dst.size(); ++i) dst.data[i] += g.data[i];
}

}  // namespace detail

// (m x k) * (k x n)
inline Var matmul(Var a, Var b) {
  detail::check_same_tape(a, b);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (A.cols != B.rows) throw ShapeError("matmul: " + A.shape() + " * " + B.shape());
  Matrix C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i) {
    for (std::size_t k = 0; k < A.cols; ++k) {
      const double aik = A(i, k);
      if (aik == 0.0) continue;
      const double* brow = &B.data[k * B.cols];
      double* crow = &C.data[i * C.cols];
      for (std::size_t j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return a.tape->push(std::move(C), {a.id, b.id}, [](Tape& t, std::size_t id) {
    const auto& ps = t.parents(id);
    const std::size_t ia = ps[0], ib = ps[1];
    const Matrix G = t.grad(id);
    const Matrix& A = t.value(ia);
    const Matrix& B = t.value(ib);
    if (t.requires_grad(ia)) {
      Matrix& dA = t.grad(ia);  // G * B^T
      for (std::size_t i = 0; i < G.rows; ++i) {
        for (std::size_t k = 0; k < A.cols; ++k) {
          double s = 0.0;
          for (std::size_t j = 0; j < G.cols; ++j) s += G(i, j) * B(k, j);
          dA(i, k) += s;
        }
      }
    }
    if (t.requires_grad(ib)) {
      Matrix& dB = t.grad(ib);  // A^T * G
      for (std::size_t i = 0; i < A.rows; ++i) {
        for (std::size_t k = 0; k < A.cols; ++k) {
          const double aik = A(i, k);
          if (aik == 0.0) continue;
          for (std::size_t j = 0; j < G.cols; ++j) dB(k, j) += aik * G(i, j);
        }
      }
    }
  });
}

// Elementwise sum; `b` may also be a 1 x n row added to every row of `a`.
inline Var add(Var a, Var b) {
  detail::check_same_tape(a, b);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  const bool row_broadcast = !A.same_shape(B) && B.rows == 1 && B.cols == A.cols;
  if (!A.same_shape(B) && !row_broadcast) throw ShapeError("add: " + A.shape() + " + " + B.shape());
  Matrix C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[row_broadcast ? i % B.cols : i];
  return a.tape->push(std::move(C), {a.id, b.id}, [row_broadcast](Tape& t, std::size_t id) {
    const auto& ps = t.parents(id);
    const Matrix G = t.grad(id);
    detail::accumulate(t, ps[0], G);
    if (!t.requires_grad(ps[1])) return;
    Matrix& dB = t.grad(ps[1]);
    for (std::size_t i = 0; i < G.size(); ++i) dB.data[row_broadcast ? i % dB.cols : i] += G.data[i];
  });
}

inline Var sub(Var a, Var b) {
  detail::check_same_tape(a, b);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (!A.same_shape(B)) throw ShapeError("sub: " + A.shape() + " - " + B.shape());
  Matrix C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] -= B.data[i];
  return a.tape->push(std::move(C), {a.id, b.id}, [](Tape& t, std::size_t id) {
    const auto& ps = t.parents(id);
    const Matrix G = t.grad(id);
    detail::accumulate(t, ps[0], G);
    if (!t.requires_grad(ps[1])) return;
    Matrix& dB = t.grad(ps[1]);
    for (std::size_t i = 0; i < G.size(); ++i) dB.data[i] -= G.data[i];
  });
}

// Elementwise (Hadamard) product.
inline Var mul(Var a, Var b) {
  detail::check_same_tape(a, b);
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  if (!A.same_shape(B)) throw ShapeError("mul: " + A.shape() + " * " + B.shape());
  Matrix C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] *= B.data[i];
  return a.tape->push(std::move(C), {a.id, b.id}, [](Tape& t, std::size_t id) {
    const auto& ps = t.parents(id);
    const Matrix G = t.grad(id);
    const std::size_t ia = ps[0], ib = ps[1];
    if (t.requires_grad(ia)) {
      Matrix& dA = t.grad(ia);
      const Matrix& B = t.value(ib);
      for (std::size_t i = 0; i < G.size(); ++i) dA.data[i] += G.data[i] * B.data[i];
    }
    if (t.requires_grad(ib)) {
      Matrix& dB = t.grad(ib);
      const Matrix& A = t.value(ia);
      for (std::size_t i = 0; i < G.size(); ++i) dB.data[i] += G.data[i] * A.data[i];
    }
  });
}

inline Var scale(Var a, double c) {
  Matrix C = a.value();
  for (double& v : C.data) v *= c;
  return a.tape->push(std::move(C), {a.id}, [c](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (std::size_t i = 0; i < G.size(); ++i) dA.data[i] += c * G.data[i];
  });
}

namespace detail {

template <typename Fwd, typename DerivFromOutput>
Var unary(Var a, Fwd fwd, DerivFromOutput deriv) {
  Matrix Y = a.value();
  for (double& v : Y.data) v = fwd(v);
  return a.tape->push(std::move(Y), {a.id}, [deriv](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    const Matrix& Y = t.value(id);
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (std::size_t i = 0; i < G.size(); ++i) dA.data[i] += G.data[i] * deriv(Y.data[i]);
  });
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

inline Var tanh(Var a) {
  return detail::unary(a, [](double x) { return std::tanh(x); }, [](double y) { return 1.0 - y * y; });
}

inline Var sigmoid(Var a) {
  return detail::unary(a, detail::stable_sigmoid, [](double y) { return y * (1.0 - y); });
}

// Natural log; inputs must be positive.
inline Var log(Var a) {
  for (double v : a.value().data) {
    if (!(v > 0.0)) throw std::domain_error("log: non-positive input");
  }
  Matrix Y = a.value();
  for (double& v : Y.data) v = std::log(v);
  return a.tape->push(std::move(Y), {a.id}, [](Tape& t, std::size_t id) {
    const std::size_t ia = t.parents(id)[0];
    const Matrix G = t.grad(id);
    const Matrix& X = t.value(ia);
    Matrix& dA = t.grad(ia);
    for (std::size_t i = 0; i < G.size(); ++i) dA.data[i] += G.data[i] / X.data[i];
  });
}

// Row-wise softmax with max subtraction.
inline Var softmax_rows(Var a) {
  const Matrix& X = a.value();
  if (X.cols == 0) throw ShapeError("softmax: empty rows " + X.shape());
  Matrix Y(X.rows, X.cols);
  for (std::size_t r = 0; r < X.rows; ++r) {
    double mx = X(r, 0);
    for (std::size_t c = 1; c < X.cols; ++c) mx = std::max(mx, X(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < X.cols; ++c) z += (Y(r, c) = std::exp(X(r, c) - mx));
    for (std::size_t c = 0; c < X.cols; ++c) Y(r, c) /= z;
  }
  return a.tape->push(std::move(Y), {a.id}, [](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    const Matrix& Y = t.value(id);
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (std::size_t r = 0; r < Y.rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < Y.cols; ++c) dot += G(r, c) * Y(r, c);
      for (std::size_t c = 0; c < Y.cols; ++c) dA(r, c) += Y(r, c) * (G(r, c) - dot);
    }
  });
}

// Sum of all entries, 1 x 1.
inline Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data) s += v;
  return a.tape->push(Matrix::scalar(s), {a.id}, [](Tape& t, std::size_t id) {
    const double g = t.grad(id).data[0];
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (double& v : dA.data) v += g;
  });
}

inline Var transpose(Var a) {
  const Matrix& X = a.value();
  Matrix Y(X.cols, X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t c = 0; c < X.cols; ++c) Y(c, r) = X(r, c);
  }
  return a.tape->push(std::move(Y), {a.id}, [](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (std::size_t r = 0; r < G.rows; ++r) {
      for (std::size_t c = 0; c < G.cols; ++c) dA(c, r) += G(r, c);
    }
  });
}

// Concatenation along columns (axis 1) or rows (axis 0).
inline Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const Matrix& first = parts[0].value();
  std::size_t rows = 0, cols = 0;
  for (const Var& p : parts) {
    detail::check_same_tape(parts[0], p);
    const Matrix& m = p.value();
    if (axis == 1) {
      if (m.rows != first.rows) throw ShapeError("concat cols: " + first.shape() + " with " + m.shape());
      cols += m.cols;
    } else {
      if (m.cols != first.cols) throw ShapeError("concat rows: " + first.shape() + " with " + m.shape());
      rows += m.rows;
    }
  }
  if (axis == 1) rows = first.rows; else cols = first.cols;
  Matrix Y(rows, cols);
  std::vector<std::size_t> ids;
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Matrix& m = p.value();
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (axis == 1) Y(r, off + c) = m(r, c); else Y(off + r, c) = m(r, c);
      }
    }
    off += axis == 1 ? m.cols : m.rows;
    ids.push_back(p.id);
  }
  return parts[0].tape->push(std::move(Y), ids, [axis](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    std::size_t off = 0;
    for (std::size_t pid : t.parents(id)) {
      const Matrix& m = t.value(pid);
      if (t.requires_grad(pid)) {
        Matrix& d = t.grad(pid);
        for (std::size_t r = 0; r < m.rows; ++r) {
          for (std::size_t c = 0; c < m.cols; ++c) d(r, c) += axis == 1 ? G(r, off + c) : G(off + r, c);
        }
      }
      off += axis == 1 ? m.cols : m.rows;
    }
  });
}

inline Var concat(std::initializer_list<Var> parts, int axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

// Column-wise max over consecutive blocks of `block` rows: (B*block x n) -> (B x n).
inline Var max_pool_rows(Var a, std::size_t block) {
  const Matrix& X = a.value();
  if (block == 0 || X.rows % block != 0) {
    throw ShapeError("max_pool_rows: block " + std::to_string(block) + " does not divide " + X.shape());
  }
  const std::size_t B = X.rows / block;
  Matrix Y(B, X.cols);
  std::vector<std::size_t> arg(B * X.cols);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < X.cols; ++c) {
      std::size_t best = b * block;
      for (std::size_t r = b * block + 1; r < (b + 1) * block; ++r) {
        if (X(r, c) > X(best, c)) best = r;
      }
      Y(b, c) = X(best, c);
      arg[b * X.cols + c] = best;
    }
  }
  return a.tape->push(std::move(Y), {a.id}, [arg = std::move(arg)](Tape& t, std::size_t id) {
    const Matrix G = t.grad(id);
    Matrix& dA = t.grad(t.parents(id)[0]);
    for (std::size_t b = 0; b < G.rows; ++b) {
      for (std::size_t c = 0; c < G.cols; ++c) dA(arg[b * G.cols + c], c) += G(b, c);
    }
  });
}

// ---------------------------------------------------------------------------
// Adam

struct AdamState {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

inline void adam_step(ParameterSet& params, const std::vector<Matrix>& grads, AdamState& st) {
  if (grads.size() != params.size()) {
    throw ShapeError("adam_step: " + std::to_string(grads.size()) + " gradients for " +
                     std::to_string(params.size()) + " parameters");
  }
  if (st.m.empty()) {
    st.m = params.zeros_like();
    st.v = params.zeros_like();
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!grads[i].same_shape(params[i].value) || !st.m[i].same_shape(params[i].value)) {
      throw ShapeError("adam_step: parameter '" + params[i].name + "' " + params[i].value.shape() +
                       " vs gradient " + grads[i].shape());
    }
  }
  ++st.step;
  const double t = static_cast<double>(st.step);
  const double c1 = 1.0 - std::pow(st.beta1, t);
  const double c2 = 1.0 - std::pow(st.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& w = params[i].value.data;
    auto& m = st.m[i].data;
    auto& v = st.v[i].data;
    const auto& g = grads[i].data;
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = st.beta1 * m[k] + (1.0 - st.beta1) * g[k];
      v[k] = st.beta2 * v[k] + (1.0 - st.beta2) * g[k] * g[k];
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      w[k] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
  }
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check

struct GradCheckResult {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // over entries whose abs error exceeds the floor
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::string worst;  // "param[i]" of the worst entry

  bool ok() const { return failures == 0; }
};

struct GradCheckOptions {
  double step = 1e-5;
  double rel_tol = 1e-4;
  double abs_floor = 1e-6;
};

// `loss_fn` records a scalar loss on the given tape from the given parameters.
inline GradCheckResult gradient_check(ParameterSet& params, const std::function<Var(Tape&, const ParameterSet&)>& loss_fn,
                                      const GradCheckOptions& opt = {}) {
  Tape tape;
  const std::vector<Matrix> analytic = tape.backward(loss_fn(tape, params), &params);

  auto eval = [&]() {
    Tape t;
    return loss_fn(t, params).value().data[0];
  };

  GradCheckResult res;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& w = params[p].value.data;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double orig = w[k];
      w[k] = orig + opt.step;
      const double up = eval();
      w[k] = orig - opt.step;
      const double down = eval();
      w[k] = orig;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double a = analytic[p].data[k];
      const double abs_err = std::fabs(a - numeric);
      const double denom = std::max(std::fabs(a), std::fabs(numeric));
      const double rel = denom > 0.0 ? abs_err / denom : 0.0;
      ++res.checked;
      if (abs_err > res.max_abs_error) {
        res.max_abs_error = abs_err;
        res.worst = params[p].name + "[" + std::to_string(k) + "]";
      }
      if (abs_err > opt.abs_floor) {
        res.max_rel_error = std::max(res.max_rel_error, rel);
        if (rel > opt.rel_tol) ++res.failures;
      }
    }
  }
  return res;
}

}  // namespace tar::nn

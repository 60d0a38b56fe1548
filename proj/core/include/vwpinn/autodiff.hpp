#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "vwpinn/array.hpp"
#include "vwpinn/errors.hpp"

namespace vwpinn::ad {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

enum class Op : std::uint8_t {
  kConstant,
  kInput,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kExp,
  kSin,
  kCos,
  kTanh,
  kPowConst,       // x^p with constant exponent p
  kSumAll,         // any shape -> 1x1
  kColSum,         // n x k -> 1 x k
  kBroadcastFull,  // 1x1 -> r x c
  kBroadcastRows,  // 1 x k -> n x k
  kMatMul,         // optional operand transposes
  kCol,            // extract column j: n x k -> n x 1
  kPadCol,         // n x 1 -> n x k, zero except column j
};

struct Node {
  Op op = Op::kConstant;
  bool trans_a = false;
  bool trans_b = false;
  int iarg0 = 0;  // column index / broadcast rows
  int iarg1 = 0;  // broadcast cols
  double darg = 0.0;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  Array value;
};

class Tape;

/// Lightweight handle to a node; valid while its tape lives.
struct Expr {
  Tape* tape = nullptr;
  NodeId id = kNoNode;
  const Array& value() const;
};

/// Append-only computation graph. Values are computed eagerly as nodes are
/// recorded, so every node carries its forward value; replaying the tape on
/// the stored inputs reproduces those values bit-identically.
class Tape {
 public:
  Expr constant(Array v);
  Expr constant(double v) { return constant(Array::scalar(v)); }
  Expr input(Array v);

  Expr add(Expr x, Expr y);
  Expr sub(Expr x, Expr y);
  Expr mul(Expr x, Expr y);
  Expr div(Expr x, Expr y);
  Expr neg(Expr x);
  Expr exp(Expr x);
  Expr sin(Expr x);
  Expr cos(Expr x);
  Expr tanh(Expr x);
  Expr pow_const(Expr x, double p);
  Expr square(Expr x) { return pow_const(x, 2.0); }
  Expr sum_all(Expr x);
  Expr col_sum(Expr x);
  Expr broadcast_full(Expr x, int rows, int cols);
  Expr broadcast_rows(Expr x, int rows);
  Expr matmul(Expr x, Expr y, bool trans_a = false, bool trans_b = false);
  Expr col(Expr x, int j);
  Expr pad_col(Expr x, int j, int cols);
  /// x W + 1 b^T for a batch of row vectors.
  Expr affine(Expr x, Expr w, Expr b);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  const Array& value(NodeId id) const { return nodes_[id].value; }

  void mark_root(NodeId id) { roots_.push_back(id); }
  const std::vector<NodeId>& roots() const { return roots_; }

  /// Partials of a scalar output w.r.t. each id in `wrt`, recorded as fresh
  /// differentiable nodes on this tape (so gradient() can be nested).
  /// An id the output does not depend on yields a zero constant of its shape.
  std::vector<Expr> gradient(Expr output, std::span<const NodeId> wrt);

  /// Replays the graph with new values for the input nodes and returns the
  /// values of the marked roots. Stored node values are left untouched.
  std::vector<Array> evaluate(const std::unordered_map<NodeId, Array>& bindings) const;

 private:
  Expr push(Node n);
  Expr reduce_to_shape(Expr g, int rows, int cols);

  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
};

inline const Array& Expr::value() const { return tape->value(id); }

inline Expr operator+(Expr x, Expr y) { return x.tape->add(x, y); }
inline Expr operator-(Expr x, Expr y) { return x.tape->sub(x, y); }
inline Expr operator*(Expr x, Expr y) { return x.tape->mul(x, y); }
inline Expr operator/(Expr x, Expr y) { return x.tape->div(x, y); }
inline Expr operator-(Expr x) { return x.tape->neg(x); }
inline Expr operator+(Expr x, double c) { return x + x.tape->constant(c); }
inline Expr operator+(double c, Expr x) { return x.tape->constant(c) + x; }
inline Expr operator-(Expr x, double c) { return x - x.tape->constant(c); }
inline Expr operator-(double c, Expr x) { return x.tape->constant(c) - x; }
inline Expr operator*(Expr x, double c) { return x * x.tape->constant(c); }
inline Expr operator*(double c, Expr x) { return x.tape->constant(c) * x; }
inline Expr operator/(Expr x, double c) { return x / x.tape->constant(c); }
inline Expr operator/(double c, Expr x) { return x.tape->constant(c) / x; }

/// Builds f on a fresh tape with `x` bound as a 1 x d input.
using TapeFn = std::function<Expr(Tape&, Expr)>;

/// Max over coordinates of |AD - FD| / max(|AD|, 1e-8), with FD the central
/// difference of step eps evaluated by replaying the recorded tape.
double check_gradient(const TapeFn& f, const Array& x, double eps);

}  // namespace vwpinn::ad

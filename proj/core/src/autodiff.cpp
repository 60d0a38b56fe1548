#include "vwpinn/autodiff.hpp"

#include <Eigen/Core>
#include <cmath>
#include <string>

namespace vwpinn::ad {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

[[noreturn]] void shape_fail(const char* op, const Array& x, const Array& y) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + std::to_string(x.rows()) + "x" +
                   std::to_string(x.cols()) + " and " + std::to_string(y.rows()) + "x" +
                   std::to_string(y.cols()));
}

// Elementwise binary ops accept equal shapes, a 1x1 operand, or a 1xk row
// vector against an n x k matrix.
void binary_out_shape(const char* op, const Array& x, const Array& y, int& r, int& c) {
  if (x.same_shape(y)) {
    r = x.rows();
    c = x.cols();
    return;
  }
  if (x.is_scalar()) {
    r = y.rows();
    c = y.cols();
    return;
  }
  if (y.is_scalar()) {
    r = x.rows();
    c = x.cols();
    return;
  }
  if (x.rows() == 1 && x.cols() == y.cols()) {
    r = y.rows();
    c = y.cols();
    return;
  }
  if (y.rows() == 1 && y.cols() == x.cols()) {
    r = x.rows();
    c = x.cols();
    return;
  }
  shape_fail(op, x, y);
}

template <class F>
Array ew_binary(const Array& x, const Array& y, int r, int c, F f) {
  Array out(r, c);
  double* o = out.data();
  const double* px = x.data();
  const double* py = y.data();
  const std::size_t n = out.size();
  if (x.same_shape(y)) {
    for (std::size_t i = 0; i < n; ++i) o[i] = f(px[i], py[i]);
  } else if (x.is_scalar()) {
    const double xv = px[0];
    for (std::size_t i = 0; i < n; ++i) o[i] = f(xv, py[i]);
  } else if (y.is_scalar()) {
    const double yv = py[0];
    for (std::size_t i = 0; i < n; ++i) o[i] = f(px[i], yv);
  } else if (x.rows() == 1) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) o[static_cast<std::size_t>(i) * c + j] = f(px[j], py[static_cast<std::size_t>(i) * c + j]);
  } else {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) o[static_cast<std::size_t>(i) * c + j] = f(px[static_cast<std::size_t>(i) * c + j], py[j]);
  }
  return out;
}

template <class F>
Array ew_unary(const Array& x, F f) {
  Array out(x.rows(), x.cols());
  const double* p = x.data();
  double* o = out.data();
  for (std::size_t i = 0; i < x.size(); ++i) o[i] = f(p[i]);
  return out;
}

double pairwise_sum(const double* p, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(p, half) + pairwise_sum(p + half, n - half);
}

Array matmul_value(const Array& x, const Array& y, bool ta, bool tb) {
  const int m = ta ? x.cols() : x.rows();
  const int k = ta ? x.rows() : x.cols();
  const int k2 = tb ? y.cols() : y.rows();
  const int n = tb ? y.rows() : y.cols();
  if (k != k2) shape_fail("matmul", x, y);
  Array out(m, n);
  CMap a(x.data(), x.rows(), x.cols());
  CMap b(y.data(), y.rows(), y.cols());
  MMap c(out.data(), m, n);
  if (!ta && !tb)
    c.noalias() = a * b;
  else if (ta && !tb)
    c.noalias() = a.transpose() * b;
  else if (!ta && tb)
    c.noalias() = a * b.transpose();
  else
    c.noalias() = a.transpose() * b.transpose();
  return out;
}

// Forward value of an op node given its operand values. Used both when the
// node is recorded and when the tape is replayed, so the two paths agree
// bit-for-bit.
Array compute_value(const Node& n, const Array& va, const Array& vb) {
  switch (n.op) {
    case Op::kAdd:
      return ew_binary(va, vb, n.value.rows(), n.value.cols(), [](double a, double b) { return a + b; });
    case Op::kSub:
      return ew_binary(va, vb, n.value.rows(), n.value.cols(), [](double a, double b) { return a - b; });
    case Op::kMul:
      return ew_binary(va, vb, n.value.rows(), n.value.cols(), [](double a, double b) { return a * b; });
    case Op::kDiv:
      return ew_binary(va, vb, n.value.rows(), n.value.cols(), [](double a, double b) { return a / b; });
    case Op::kNeg:
      return ew_unary(va, [](double a) { return -a; });
    case Op::kExp:
      return ew_unary(va, [](double a) { return std::exp(a); });
    case Op::kSin:
      return ew_unary(va, [](double a) { return std::sin(a); });
    case Op::kCos:
      return ew_unary(va, [](double a) { return std::cos(a); });
    case Op::kTanh:
      return ew_unary(va, [](double a) { return std::tanh(a); });
    case Op::kPowConst: {
      const double p = n.darg;
      if (p == 2.0) return ew_unary(va, [](double a) { return a * a; });
      if (p == 1.0) return va;
      return ew_unary(va, [p](double a) { return std::pow(a, p); });
    }
    case Op::kSumAll:
      return Array::scalar(pairwise_sum(va.data(), va.size()));
    case Op::kColSum: {
      Array out(1, va.cols());
      for (int i = 0; i < va.rows(); ++i)
        for (int j = 0; j < va.cols(); ++j) out[j] += va(i, j);
      return out;
    }
    case Op::kBroadcastFull:
      return Array::full(n.iarg0, n.iarg1, va.scalar_value());
    case Op::kBroadcastRows: {
      Array out(n.iarg0, va.cols());
      for (int i = 0; i < n.iarg0; ++i)
        for (int j = 0; j < va.cols(); ++j) out(i, j) = va[j];
      return out;
    }
    case Op::kMatMul:
      return matmul_value(va, vb, n.trans_a, n.trans_b);
    case Op::kCol: {
      Array out(va.rows(), 1);
      for (int i = 0; i < va.rows(); ++i) out[i] = va(i, n.iarg0);
      return out;
    }
    case Op::kPadCol: {
      Array out(va.rows(), n.iarg1);
      for (int i = 0; i < va.rows(); ++i) out(i, n.iarg0) = va[i];
      return out;
    }
    case Op::kConstant:
    case Op::kInput:
      return n.value;
  }
  return {};
}

}  // namespace

Expr Tape::push(Node n) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  return {this, id};
}

Expr Tape::constant(Array v) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(v);
  return push(std::move(n));
}

Expr Tape::input(Array v) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(v);
  return push(std::move(n));
}

namespace {
Node make_binary(Op op, Expr x, Expr y, const char* name) {
  Node n;
  n.op = op;
  n.a = x.id;
  n.b = y.id;
  int r = 0, c = 0;
  binary_out_shape(name, x.value(), y.value(), r, c);
  n.value = Array(r, c);
  return n;
}
}  // namespace

Expr Tape::add(Expr x, Expr y) {
  Node n = make_binary(Op::kAdd, x, y, "add");
  n.value = compute_value(n, x.value(), y.value());
  return push(std::move(n));
}
Expr Tape::sub(Expr x, Expr y) {
  Node n = make_binary(Op::kSub, x, y, "sub");
  n.value = compute_value(n, x.value(), y.value());
  return push(std::move(n));
}
Expr Tape::mul(Expr x, Expr y) {
  Node n = make_binary(Op::kMul, x, y, "mul");
  n.value = compute_value(n, x.value(), y.value());
  return push(std::move(n));
}
Expr Tape::div(Expr x, Expr y) {
  Node n = make_binary(Op::kDiv, x, y, "div");
  n.value = compute_value(n, x.value(), y.value());
  return push(std::move(n));
}

namespace {
Node make_unary(Op op, Expr x) {
  Node n;
  n.op = op;
  n.a = x.id;
  return n;
}
}  // namespace

Expr Tape::neg(Expr x) {
  Node n = make_unary(Op::kNeg, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::exp(Expr x) {
  Node n = make_unary(Op::kExp, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::sin(Expr x) {
  Node n = make_unary(Op::kSin, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::cos(Expr x) {
  Node n = make_unary(Op::kCos, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::tanh(Expr x) {
  Node n = make_unary(Op::kTanh, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::pow_const(Expr x, double p) {
  Node n = make_unary(Op::kPowConst, x);
  n.darg = p;
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}

Expr Tape::sum_all(Expr x) {
  Node n = make_unary(Op::kSumAll, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::col_sum(Expr x) {
  Node n = make_unary(Op::kColSum, x);
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::broadcast_full(Expr x, int rows, int cols) {
  if (!x.value().is_scalar()) throw ShapeError("broadcast_full: operand must be 1x1");
  Node n = make_unary(Op::kBroadcastFull, x);
  n.iarg0 = rows;
  n.iarg1 = cols;
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}
Expr Tape::broadcast_rows(Expr x, int rows) {
  if (x.value().rows() != 1) throw ShapeError("broadcast_rows: operand must be a row vector");
  Node n = make_unary(Op::kBroadcastRows, x);
  n.iarg0 = rows;
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}

Expr Tape::matmul(Expr x, Expr y, bool trans_a, bool trans_b) {
  Node n;
  n.op = Op::kMatMul;
  n.a = x.id;
  n.b = y.id;
  n.trans_a = trans_a;
  n.trans_b = trans_b;
  n.value = compute_value(n, x.value(), y.value());
  return push(std::move(n));
}

Expr Tape::col(Expr x, int j) {
  if (j < 0 || j >= x.value().cols()) throw ShapeError("col: index out of range");
  Node n = make_unary(Op::kCol, x);
  n.iarg0 = j;
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}

Expr Tape::pad_col(Expr x, int j, int cols) {
  if (x.value().cols() != 1) throw ShapeError("pad_col: operand must be a column");
  if (j < 0 || j >= cols) throw ShapeError("pad_col: index out of range");
  Node n = make_unary(Op::kPadCol, x);
  n.iarg0 = j;
  n.iarg1 = cols;
  n.value = compute_value(n, x.value(), x.value());
  return push(std::move(n));
}

Expr Tape::affine(Expr x, Expr w, Expr b) {
  if (b.value().rows() != 1) throw ShapeError("affine: bias must be a row vector");
  return add(matmul(x, w), b);
}

Expr Tape::reduce_to_shape(Expr g, int rows, int cols) {
  const Array& v = g.value();
  if (v.rows() == rows && v.cols() == cols) return g;
  if (rows == 1 && cols == 1) return sum_all(g);
  if (rows == 1 && cols == v.cols()) return col_sum(g);
  throw ShapeError("gradient: cannot reduce adjoint to operand shape");
}

std::vector<Expr> Tape::gradient(Expr output, std::span<const NodeId> wrt) {
  if (output.tape != this || output.id >= nodes_.size())
    throw ShapeError("gradient: output is not on this tape");
  if (!nodes_[output.id].value.is_scalar())
    throw RankError("gradient: output must be scalar (1x1)");

  const NodeId out = output.id;
  const std::size_t frozen = out + 1;

  // Active set: nodes that both feed the output and depend on some wrt id.
  std::vector<std::uint8_t> reaches_wrt(frozen, 0), feeds_out(frozen, 0);
  for (NodeId w : wrt) {
    if (w >= nodes_.size()) throw ShapeError("gradient: wrt id out of range");
    if (w < frozen) reaches_wrt[w] = 1;
  }
  for (NodeId i = 0; i < frozen; ++i) {
    if (reaches_wrt[i]) continue;
    const Node& n = nodes_[i];
    if ((n.a != kNoNode && reaches_wrt[n.a]) || (n.b != kNoNode && reaches_wrt[n.b]))
      reaches_wrt[i] = 1;
  }
  feeds_out[out] = 1;
  for (NodeId i = out + 1; i-- > 0;) {
    if (!feeds_out[i]) continue;
    const Node& n = nodes_[i];
    if (n.a != kNoNode) feeds_out[n.a] = 1;
    if (n.b != kNoNode) feeds_out[n.b] = 1;
  }

  std::vector<NodeId> adj(frozen, kNoNode);
  adj[out] = constant(1.0).id;

  auto active = [&](NodeId i) { return feeds_out[i] && reaches_wrt[i]; };
  auto accum = [&](NodeId child, Expr contrib) {
    if (child == kNoNode || !active(child)) return;
    const Array& cv = nodes_[child].value;
    Expr reduced = reduce_to_shape(contrib, cv.rows(), cv.cols());
    adj[child] = adj[child] == kNoNode ? reduced.id : add({this, adj[child]}, reduced).id;
  };

  for (NodeId i = out + 1; i-- > 0;) {
    if (adj[i] == kNoNode || !active(i)) continue;
    // Copy the header: pushes below may reallocate nodes_.
    const Op op = nodes_[i].op;
    const NodeId ia = nodes_[i].a, ib = nodes_[i].b;
    const bool ta = nodes_[i].trans_a, tb = nodes_[i].trans_b;
    const int iarg0 = nodes_[i].iarg0;
    const double darg = nodes_[i].darg;
    Expr g{this, adj[i]};
    Expr ea{this, ia}, eb{this, ib}, self{this, i};
    switch (op) {
      case Op::kConstant:
      case Op::kInput:
        break;
      case Op::kAdd:
        accum(ia, g);
        accum(ib, g);
        break;
      case Op::kSub:
        accum(ia, g);
        accum(ib, neg(g));
        break;
      case Op::kMul:
        accum(ia, mul(g, eb));
        accum(ib, mul(g, ea));
        break;
      case Op::kDiv:
        accum(ia, div(g, eb));
        accum(ib, neg(mul(g, div(ea, mul(eb, eb)))));
        break;
      case Op::kNeg:
        accum(ia, neg(g));
        break;
      case Op::kExp:
        accum(ia, mul(g, self));
        break;
      case Op::kSin:
        accum(ia, mul(g, cos(ea)));
        break;
      case Op::kCos:
        accum(ia, neg(mul(g, sin(ea))));
        break;
      case Op::kTanh:
        accum(ia, mul(g, sub(constant(1.0), mul(self, self))));
        break;
      case Op::kPowConst:
        if (darg == 2.0) {
          accum(ia, mul(mul(g, ea), constant(2.0)));
        } else {
          accum(ia, mul(mul(g, pow_const(ea, darg - 1.0)), constant(darg)));
        }
        break;
      case Op::kSumAll:
        accum(ia, broadcast_full(g, nodes_[ia].value.rows(), nodes_[ia].value.cols()));
        break;
      case Op::kColSum:
        accum(ia, broadcast_rows(g, nodes_[ia].value.rows()));
        break;
      case Op::kBroadcastFull:
        accum(ia, sum_all(g));
        break;
      case Op::kBroadcastRows:
        accum(ia, col_sum(g));
        break;
      case Op::kMatMul:
        if (!ta && !tb) {
          accum(ia, matmul(g, eb, false, true));
          accum(ib, matmul(ea, g, true, false));
        } else if (ta && !tb) {
          accum(ia, matmul(eb, g, false, true));
          accum(ib, matmul(ea, g, false, false));
        } else if (!ta && tb) {
          accum(ia, matmul(g, eb, false, false));
          accum(ib, matmul(g, ea, true, false));
        } else {
          accum(ia, matmul(eb, g, true, true));
          accum(ib, matmul(g, ea, true, true));
        }
        break;
      case Op::kCol:
        accum(ia, pad_col(g, iarg0, nodes_[ia].value.cols()));
        break;
      case Op::kPadCol:
        accum(ia, col(g, iarg0));
        break;
    }
  }

  std::vector<Expr> result;
  result.reserve(wrt.size());
  for (NodeId w : wrt) {
    if (w < frozen && adj[w] != kNoNode) {
      result.push_back({this, adj[w]});
    } else {
      const Array& v = nodes_[w].value;
      result.push_back(constant(Array(v.rows(), v.cols())));
    }
  }
  return result;
}

std::vector<Array> Tape::evaluate(const std::unordered_map<NodeId, Array>& bindings) const {
  std::vector<Array> vals(nodes_.size());
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::kConstant:
        vals[i] = n.value;
        break;
      case Op::kInput: {
        auto it = bindings.find(i);
        if (it == bindings.end())
          throw MissingBindingError("evaluate: input node " + std::to_string(i) + " is unbound");
        if (!it->second.same_shape(n.value))
          throw ShapeError("evaluate: binding shape mismatch for node " + std::to_string(i));
        vals[i] = it->second;
        break;
      }
      default: {
        const Array& va = vals[n.a];
        const Array& vb = n.b != kNoNode ? vals[n.b] : va;
        vals[i] = compute_value(n, va, vb);
      }
    }
  }
  std::vector<Array> out;
  out.reserve(roots_.size());
  for (NodeId r : roots_) out.push_back(vals[r]);
  return out;
}

double check_gradient(const TapeFn& f, const Array& x, double eps) {
  if (eps <= 0) throw ConfigError("check_gradient: eps must be positive");
  Tape tape;
  Expr xin = tape.input(x);
  Expr y = f(tape, xin);
  if (!y.value().is_scalar()) throw RankError("check_gradient: f must return a scalar");
  tape.mark_root(y.id);
  std::vector<NodeId> wrt{xin.id};
  Expr grad = tape.gradient(y, wrt)[0];

  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Array xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    const double fp = tape.evaluate({{xin.id, xp}})[0].scalar_value();
    const double fm = tape.evaluate({{xin.id, xm}})[0].scalar_value();
    const double fd = (fp - fm) / (2.0 * eps);
    const double adv = grad.value()[i];
    const double disc = std::abs(adv - fd) / std::max(std::abs(adv), 1e-8);
    worst = std::max(worst, disc);
  }
  return worst;
}

}  // namespace vwpinn::ad

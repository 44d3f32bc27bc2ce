#include <functional>

#include "oscrit/expr.hpp"

namespace oscrit::expr {

namespace {

using namespace build;

bool depends(const NodePtr& n) {
  if (n->op == Op::kVar) return true;
  for (const auto& a : n->args) {
    if (depends(a)) return true;
  }
  return false;
}

NodePtr d(const NodePtr& n) {
  const auto& a = n->args;
  switch (n->op) {
    case Op::kConst:
    case Op::kParam:
      return constant(0.0);
    case Op::kVar:
      return constant(1.0);
    case Op::kNeg:
      return neg(d(a[0]));
    case Op::kAdd:
      return add(d(a[0]), d(a[1]));
    case Op::kSub:
      return sub(d(a[0]), d(a[1]));
    case Op::kMul:
      return add(mul(d(a[0]), a[1]), mul(a[0], d(a[1])));
    case Op::kDiv:
      return div(sub(mul(d(a[0]), a[1]), mul(a[0], d(a[1]))), pow(a[1], constant(2.0)));
    case Op::kPow: {
      const NodePtr& base = a[0];
      const NodePtr& ex = a[1];
      if (!depends(ex)) {
        return mul(mul(ex, pow(base, sub(ex, constant(1.0)))), d(base));
      }
      if (!depends(base)) {
        return mul(mul(n, call(Fn::kLn, base)), d(ex));
      }
      return mul(n, add(mul(d(ex), call(Fn::kLn, base)), div(mul(ex, d(base)), base)));
    }
    case Op::kCall: {
      const NodePtr& x = a[0];
      switch (n->fn) {
        case Fn::kSin:
          return mul(call(Fn::kCos, x), d(x));
        case Fn::kCos:
          return neg(mul(call(Fn::kSin, x), d(x)));
        case Fn::kExp:
          return mul(n, d(x));
        case Fn::kLn:
          return div(d(x), x);
        case Fn::kAbs:
          return mul(call(Fn::kSign, x), d(x));
        case Fn::kSqrt:
          return div(d(x), mul(constant(2.0), n));
        case Fn::kFloor:
        case Fn::kSign:
          return constant(0.0);
        case Fn::kMin:
          return cond(compare(Op::kLessEq, a[0], a[1]), d(a[0]), d(a[1]));
        case Fn::kMax:
          return cond(compare(Op::kGreaterEq, a[0], a[1]), d(a[0]), d(a[1]));
      }
      return constant(0.0);
    }
    case Op::kIf: {
      NodePtr da = d(a[1]);
      NodePtr db = d(a[2]);
      if (da->op == Op::kConst && db->op == Op::kConst && da->value == 0.0 && db->value == 0.0) {
        return constant(0.0);
      }
      return cond(a[0], std::move(da), std::move(db));
    }
    default:
      // comparisons are piecewise constant
      return constant(0.0);
  }
}

}  // namespace

Expr differentiate(const Expr& e) { return Expr(d(e.root_ptr())); }

}  // namespace oscrit::expr

#pragma once

// Coefficient expression language: a small real-valued grammar over the
// independent variable `t` with named parameters. See grammar.md.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oscrit::expr {

enum class Op {
  kConst,
  kVar,    // t
  kParam,
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kCall,
  kIf,     // if(cond, a, b)
  kLess,
  kLessEq,
  kGreater,
  kGreaterEq,
};

enum class Fn { kSin, kCos, kExp, kLn, kAbs, kSqrt, kFloor, kMin, kMax, kSign };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::kConst;
  double value = 0.0;      // kConst
  std::string name;        // kParam, or the spelling of a named constant
  Fn fn = Fn::kSin;        // kCall
  std::vector<NodePtr> args;
};

using ParamMap = std::map<std::string, double>;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Raised for ln of a non-positive value, division by zero, non-integer powers
// of negative bases, unbound parameters and non-finite results.
class EvalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An immutable expression tree. Copies share structure.
class Expr {
 public:
  Expr();
  explicit Expr(NodePtr root, std::string source = {});

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  /// Text the expression was parsed from; empty for constructed trees.
  const std::string& source() const { return source_; }

  std::string to_string() const;
  bool depends_on_t() const;
  bool uses(Fn fn) const;
  /// True when the tree contains floor or a conditional, i.e. the value may be
  /// non-smooth at isolated points.
  bool has_breakpoints() const;
  std::vector<std::string> parameters() const;

 private:
  NodePtr root_;
  std::string source_;
};

Expr parse(std::string_view source, std::span<const std::string> param_names = {});
Expr parse(std::string_view source, const ParamMap& params);

/// d/dt by the standard rules. floor differentiates to 0 and if() keeps its
/// condition, so the result is valid away from the breakpoints of both.
Expr differentiate(const Expr& e);

double evaluate(const Expr& e, double t, const ParamMap& params = {});

bool structurally_equal(const Expr& a, const Expr& b);

/// Parameter values substituted, laid out flat for repeated evaluation.
class Compiled {
 public:
  Compiled() = default;
  Compiled(const Expr& e, const ParamMap& params);

  double operator()(double t) const;
  bool empty() const { return nodes_.empty(); }

 private:
  struct Slot {
    Op op;
    Fn fn;
    double value;
    int a = -1, b = -1, c = -1;
  };
  int emit(const Node& n, const ParamMap& params);
  double eval(int i, double t) const;

  std::vector<Slot> nodes_;
  int root_ = -1;
};

// Tree builders used by differentiation and by callers composing expressions.
// They fold the obvious identities (x*0, x*1, x+0, constant arithmetic).
namespace build {
NodePtr constant(double v);
NodePtr var();
NodePtr param(const std::string& name);
NodePtr neg(NodePtr a);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr pow(NodePtr a, NodePtr b);
NodePtr call(Fn fn, NodePtr a);
NodePtr call(Fn fn, NodePtr a, NodePtr b);
NodePtr cond(NodePtr test, NodePtr a, NodePtr b);
NodePtr compare(Op op, NodePtr a, NodePtr b);
}  // namespace build

/// Points where an expression may be non-smooth: integer jumps of floor and
/// switching points of if() conditions, located by bisection.
struct BreakpointScan {
  std::vector<double> points;  // ascending, strictly inside (a, b)
  /// Scanning stopped here: either b, a cell cap, or the first feature too
  /// narrow to be represented in double precision.
  double resolved_until = 0.0;
  bool truncated = false;
  std::string reason;
};

struct BreakpointOptions {
  std::size_t max_cells = 5000;
  /// A piece narrower than this many ulps of its position is unresolvable.
  double min_piece_ulps = 1048576.0;
};

BreakpointScan scan_breakpoints(std::span<const Expr> exprs, const ParamMap& params, double a,
                                double b, const BreakpointOptions& options = {});

}  // namespace oscrit::expr

#include "oscrit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

namespace oscrit::expr {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)),
      position_(position) {}

namespace {

struct FnInfo {
  const char* name;
  Fn fn;
  int arity;
};

constexpr FnInfo kFunctions[] = {
    {"sin", Fn::kSin, 1},   {"cos", Fn::kCos, 1},     {"exp", Fn::kExp, 1},
    {"ln", Fn::kLn, 1},     {"abs", Fn::kAbs, 1},     {"sqrt", Fn::kSqrt, 1},
    {"floor", Fn::kFloor, 1}, {"min", Fn::kMin, 2},   {"max", Fn::kMax, 2},
    {"sign", Fn::kSign, 1},
};

const FnInfo* find_function(std::string_view name) {
  for (const auto& f : kFunctions) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

const char* function_name(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

constexpr std::size_t kMaxDepth = 400;

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> params)
      : src_(src), params_(params.begin(), params.end()) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr n = comparison();
    skip_ws();
    if (pos_ < src_.size()) {
      throw ParseError(std::string("unexpected '") + src_[pos_] + "'", pos_);
    }
    return n;
  }

 private:
  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) throw ParseError("expression nested too deeply", p.pos_);
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) {
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      }
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr comparison() {
    DepthGuard g(*this);
    NodePtr lhs = sum();
    skip_ws();
    Op op;
    if (accept('<')) {
      op = accept('=') ? Op::kLessEq : Op::kLess;
    } else if (accept('>')) {
      op = accept('=') ? Op::kGreaterEq : Op::kGreater;
    } else {
      return lhs;
    }
    NodePtr rhs = sum();
    return build::compare(op, std::move(lhs), std::move(rhs));
  }

  NodePtr sum() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = raw(Op::kAdd, {lhs, term()});
      } else if (accept('-')) {
        lhs = raw(Op::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  // A leading minus negates the whole product: -M*t^g is Neg(Mul(M, Pow)).
  NodePtr term() {
    DepthGuard g(*this);
    if (accept('-')) return raw(Op::kNeg, {term()});
    return product();
  }

  NodePtr product() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = raw(Op::kMul, {lhs, factor()});
      } else if (accept('/')) {
        lhs = raw(Op::kDiv, {lhs, factor()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr factor() {
    DepthGuard g(*this);
    if (accept('-')) return raw(Op::kNeg, {factor()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return raw(Op::kPow, {base, factor()});
    return base;
  }

  NodePtr primary() {
    DepthGuard g(*this);
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (accept('(')) {
      NodePtr inner = comparison();
      expect(')');
      return inner;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return build::constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "t") return build::var();
    if (name == "pi") {
      auto n = std::make_shared<Node>();
      n->op = Op::kConst;
      n->value = std::numbers::pi;
      n->name = "pi";
      return n;
    }
    if (name == "if") {
      expect('(');
      NodePtr test = comparison();
      expect(',');
      NodePtr a = comparison();
      expect(',');
      NodePtr b = comparison();
      expect(')');
      return raw(Op::kIf, {test, a, b});
    }
    if (const FnInfo* f = find_function(name)) {
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '(') {
        throw ParseError("function '" + name + "' requires an argument list", pos_);
      }
      expect('(');
      std::vector<NodePtr> args{comparison()};
      while (accept(',')) args.push_back(comparison());
      expect(')');
      if (static_cast<int>(args.size()) != f->arity) {
        throw ParseError("function '" + name + "' takes " + std::to_string(f->arity) +
                             " argument(s)",
                         start);
      }
      auto n = std::make_shared<Node>();
      n->op = Op::kCall;
      n->fn = f->fn;
      n->args = std::move(args);
      return n;
    }
    if (std::find(params_.begin(), params_.end(), name) != params_.end()) {
      return build::param(name);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  static NodePtr raw(Op op, std::vector<NodePtr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return n;
  }

  std::string_view src_;
  std::vector<std::string> params_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

int precedence(const Node& n) {
  switch (n.op) {
    case Op::kLess:
    case Op::kLessEq:
    case Op::kGreater:
    case Op::kGreaterEq:
      return 1;
    case Op::kAdd:
    case Op::kSub:
      return 2;
    case Op::kNeg:
      return 3;
    case Op::kMul:
    case Op::kDiv:
      return 4;
    case Op::kPow:
      return 6;
    case Op::kConst:
      return (n.name.empty() && std::signbit(n.value)) ? 3 : 7;
    default:
      return 7;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void print(const Node& n, int min_prec, std::string& out) {
  const int prec = precedence(n);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  auto binary = [&](const char* sym, int lhs_min, int rhs_min) {
    print(*n.args[0], lhs_min, out);
    out += sym;
    print(*n.args[1], rhs_min, out);
  };
  switch (n.op) {
    case Op::kConst:
      out += n.name.empty() ? format_number(n.value) : n.name;
      break;
    case Op::kVar:
      out += 't';
      break;
    case Op::kParam:
      out += n.name;
      break;
    case Op::kNeg:
      out += '-';
      print(*n.args[0], 4, out);
      break;
    case Op::kAdd:
      binary("+", 2, 2);
      break;
    case Op::kSub:
      binary("-", 2, 3);
      break;
    case Op::kMul:
      binary("*", 4, 4);
      break;
    case Op::kDiv:
      binary("/", 4, 5);
      break;
    case Op::kPow:
      binary("^", 7, 6);
      break;
    case Op::kLess:
      binary("<", 2, 2);
      break;
    case Op::kLessEq:
      binary("<=", 2, 2);
      break;
    case Op::kGreater:
      binary(">", 2, 2);
      break;
    case Op::kGreaterEq:
      binary(">=", 2, 2);
      break;
    case Op::kCall:
      out += function_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(*n.args[i], 0, out);
      }
      out += ')';
      break;
    case Op::kIf:
      out += "if(";
      print(*n.args[0], 0, out);
      out += ", ";
      print(*n.args[1], 0, out);
      out += ", ";
      print(*n.args[2], 0, out);
      out += ')';
      break;
  }
  if (paren) out += ')';
}

bool any_node(const Node& n, const std::function<bool(const Node&)>& pred) {
  if (pred(n)) return true;
  for (const auto& a : n.args) {
    if (any_node(*a, pred)) return true;
  }
  return false;
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

double apply_pow(double a, double b) {
  if (a < 0.0 && !is_integer(b)) throw EvalError("non-integer power of a negative base");
  if (a == 0.0 && b < 0.0) throw EvalError("division by zero in negative power");
  return std::pow(a, b);
}

double apply_fn(Fn fn, double a, double b) {
  switch (fn) {
    case Fn::kSin:
      return std::sin(a);
    case Fn::kCos:
      return std::cos(a);
    case Fn::kExp:
      return std::exp(a);
    case Fn::kLn:
      if (!(a > 0.0)) throw EvalError("ln of a non-positive value");
      return std::log(a);
    case Fn::kAbs:
      return std::fabs(a);
    case Fn::kSqrt:
      if (a < 0.0) throw EvalError("sqrt of a negative value");
      return std::sqrt(a);
    case Fn::kFloor:
      return std::floor(a);
    case Fn::kMin:
      return std::min(a, b);
    case Fn::kMax:
      return std::max(a, b);
    case Fn::kSign:
      return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

double apply_compare(Op op, double a, double b) {
  switch (op) {
    case Op::kLess:
      return a < b ? 1.0 : 0.0;
    case Op::kLessEq:
      return a <= b ? 1.0 : 0.0;
    case Op::kGreater:
      return a > b ? 1.0 : 0.0;
    default:
      return a >= b ? 1.0 : 0.0;
  }
}

double checked(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite intermediate result");
  return v;
}

double eval_node(const Node& n, double t, const ParamMap& params) {
  switch (n.op) {
    case Op::kConst:
      return n.value;
    case Op::kVar:
      return t;
    case Op::kParam: {
      auto it = params.find(n.name);
      if (it == params.end()) throw EvalError("unbound parameter '" + n.name + "'");
      return it->second;
    }
    case Op::kNeg:
      return -eval_node(*n.args[0], t, params);
    case Op::kAdd:
      return checked(eval_node(*n.args[0], t, params) + eval_node(*n.args[1], t, params));
    case Op::kSub:
      return checked(eval_node(*n.args[0], t, params) - eval_node(*n.args[1], t, params));
    case Op::kMul:
      return checked(eval_node(*n.args[0], t, params) * eval_node(*n.args[1], t, params));
    case Op::kDiv: {
      const double num = eval_node(*n.args[0], t, params);
      const double den = eval_node(*n.args[1], t, params);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(num / den);
    }
    case Op::kPow:
      return checked(apply_pow(eval_node(*n.args[0], t, params), eval_node(*n.args[1], t, params)));
    case Op::kCall: {
      const double a = eval_node(*n.args[0], t, params);
      const double b = n.args.size() > 1 ? eval_node(*n.args[1], t, params) : 0.0;
      return checked(apply_fn(n.fn, a, b));
    }
    case Op::kIf:
      return eval_node(*n.args[0], t, params) != 0.0 ? eval_node(*n.args[1], t, params)
                                                     : eval_node(*n.args[2], t, params);
    default:
      return apply_compare(n.op, eval_node(*n.args[0], t, params), eval_node(*n.args[1], t, params));
  }
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  if (a.op == Op::kConst && a.value != b.value) return false;
  if (a.op == Op::kParam && a.name != b.name) return false;
  if (a.op == Op::kCall && a.fn != b.fn) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!nodes_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace

Expr::Expr() : root_(build::constant(0.0)) {}

Expr::Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, 0, out);
  return out;
}

bool Expr::depends_on_t() const {
  return any_node(*root_, [](const Node& n) { return n.op == Op::kVar; });
}

bool Expr::uses(Fn fn) const {
  return any_node(*root_, [fn](const Node& n) { return n.op == Op::kCall && n.fn == fn; });
}

bool Expr::has_breakpoints() const {
  return any_node(*root_, [](const Node& n) {
    return n.op == Op::kIf || (n.op == Op::kCall && n.fn == Fn::kFloor);
  });
}

std::vector<std::string> Expr::parameters() const {
  std::set<std::string> names;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    if (n.op == Op::kParam) names.insert(n.name);
    for (const auto& a : n.args) walk(*a);
  };
  walk(*root_);
  return {names.begin(), names.end()};
}

Expr parse(std::string_view source, std::span<const std::string> param_names) {
  Parser parser(source, param_names);
  return Expr(parser.parse_all(), std::string(source));
}

Expr parse(std::string_view source, const ParamMap& params) {
  std::vector<std::string> names;
  for (const auto& [k, v] : params) names.push_back(k);
  return parse(source, names);
}

double evaluate(const Expr& e, double t, const ParamMap& params) {
  return eval_node(e.root(), t, params);
}

bool structurally_equal(const Expr& a, const Expr& b) { return nodes_equal(a.root(), b.root()); }

Compiled::Compiled(const Expr& e, const ParamMap& params) {
  root_ = emit(e.root(), params);
}

int Compiled::emit(const Node& n, const ParamMap& params) {
  Slot s{n.op, n.fn, n.value};
  if (n.op == Op::kParam) {
    auto it = params.find(n.name);
    if (it == params.end()) throw EvalError("unbound parameter '" + n.name + "'");
    s.op = Op::kConst;
    s.value = it->second;
  }
  if (!n.args.empty()) s.a = emit(*n.args[0], params);
  if (n.args.size() > 1) s.b = emit(*n.args[1], params);
  if (n.args.size() > 2) s.c = emit(*n.args[2], params);
  nodes_.push_back(s);
  return static_cast<int>(nodes_.size()) - 1;
}

double Compiled::operator()(double t) const { return eval(root_, t); }

double Compiled::eval(int i, double t) const {
  const Slot& s = nodes_[static_cast<std::size_t>(i)];
  switch (s.op) {
    case Op::kConst:
      return s.value;
    case Op::kVar:
      return t;
    case Op::kNeg:
      return -eval(s.a, t);
    case Op::kAdd:
      return checked(eval(s.a, t) + eval(s.b, t));
    case Op::kSub:
      return checked(eval(s.a, t) - eval(s.b, t));
    case Op::kMul:
      return checked(eval(s.a, t) * eval(s.b, t));
    case Op::kDiv: {
      const double num = eval(s.a, t);
      const double den = eval(s.b, t);
      if (den == 0.0) throw EvalError("division by zero");
      return checked(num / den);
    }
    case Op::kPow:
      return checked(apply_pow(eval(s.a, t), eval(s.b, t)));
    case Op::kCall:
      return checked(apply_fn(s.fn, eval(s.a, t), s.b >= 0 ? eval(s.b, t) : 0.0));
    case Op::kIf:
      return eval(s.a, t) != 0.0 ? eval(s.b, t) : eval(s.c, t);
    default:
      return apply_compare(s.op, eval(s.a, t), eval(s.b, t));
  }
}

namespace build {

namespace {
bool is_const(const NodePtr& n, double v) {
  return n->op == Op::kConst && n->name.empty() && n->value == v;
}
bool is_plain_const(const NodePtr& n) { return n->op == Op::kConst && n->name.empty(); }
NodePtr node(Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}
}  // namespace

NodePtr constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

NodePtr var() {
  auto n = std::make_shared<Node>();
  n->op = Op::kVar;
  return n;
}

NodePtr param(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->op = Op::kParam;
  n->name = name;
  return n;
}

NodePtr neg(NodePtr a) {
  if (is_plain_const(a)) return constant(-a->value);
  if (a->op == Op::kNeg) return a->args[0];
  return node(Op::kNeg, {std::move(a)});
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_plain_const(a) && is_plain_const(b)) return constant(a->value + b->value);
  return node(Op::kAdd, {std::move(a), std::move(b)});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (is_plain_const(a) && is_plain_const(b)) return constant(a->value - b->value);
  return node(Op::kSub, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_plain_const(a) && is_plain_const(b)) return constant(a->value * b->value);
  return node(Op::kMul, {std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return node(Op::kDiv, {std::move(a), std::move(b)});
}

NodePtr pow(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return constant(1.0);
  if (is_const(b, 1.0)) return a;
  return node(Op::kPow, {std::move(a), std::move(b)});
}

NodePtr call(Fn fn, NodePtr a) {
  auto n = node(Op::kCall, {std::move(a)});
  std::const_pointer_cast<Node>(n)->fn = fn;
  return n;
}

NodePtr call(Fn fn, NodePtr a, NodePtr b) {
  auto n = node(Op::kCall, {std::move(a), std::move(b)});
  std::const_pointer_cast<Node>(n)->fn = fn;
  return n;
}

NodePtr cond(NodePtr test, NodePtr a, NodePtr b) {
  return node(Op::kIf, {std::move(test), std::move(a), std::move(b)});
}

NodePtr compare(Op op, NodePtr a, NodePtr b) { return node(op, {std::move(a), std::move(b)}); }

}  // namespace build

}  // namespace oscrit::expr

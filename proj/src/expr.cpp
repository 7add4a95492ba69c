#include "nhim/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace nhim {

namespace {

std::string format_constant(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct FuncEntry {
  const char* name;
  ExprOp op;
};

constexpr FuncEntry kFunctions[] = {
    {"sin", ExprOp::kSin},   {"cos", ExprOp::kCos},   {"tan", ExprOp::kTan},
    {"exp", ExprOp::kExp},   {"log", ExprOp::kLog},   {"tanh", ExprOp::kTanh},
    {"sqrt", ExprOp::kSqrt}, {"abs", ExprOp::kAbs},
};

const FuncEntry* lookup_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (name == f.name) return &f;
  return nullptr;
}

}  // namespace

Expr::Expr() {
  nodes_.push_back(Node{});  // constant 0
  root_ = 0;
}

Expr Expr::constant(double v) {
  Expr e;
  e.nodes_[0].value = v;
  return e;
}

Expr Expr::variable(std::string name, int slot) {
  Expr e;
  e.nodes_[0].op = ExprOp::kVar;
  e.nodes_[0].slot = slot;
  e.nodes_[0].name = std::move(name);
  return e;
}

int Expr::append(const Expr& other) {
  const int offset = static_cast<int>(nodes_.size());
  for (const Node& n : other.nodes_) {
    Node copy = n;
    if (copy.a >= 0) copy.a += offset;
    if (copy.b >= 0) copy.b += offset;
    nodes_.push_back(std::move(copy));
  }
  return other.root_ + offset;
}

Expr Expr::add_scaled(const Expr& base, double scale, const Expr& delta) {
  Expr out;
  out.nodes_.clear();
  const int b = out.append(base);
  const int s = static_cast<int>(out.nodes_.size());
  out.nodes_.push_back(Node{ExprOp::kConst, scale, -1, -1, -1, {}});
  const int d = out.append(delta);
  const int mul = static_cast<int>(out.nodes_.size());
  out.nodes_.push_back(Node{ExprOp::kMul, 0.0, -1, s, d, {}});
  out.nodes_.push_back(Node{ExprOp::kAdd, 0.0, -1, b, mul, {}});
  out.root_ = mul + 1;
  return out;
}

double Expr::eval_node(int i, std::span<const double> s) const {
  const Node& n = nodes_[i];
  double v;
  switch (n.op) {
    case ExprOp::kConst: return n.value;
    case ExprOp::kVar: return s[n.slot];
    case ExprOp::kNeg: return -eval_node(n.a, s);
    case ExprOp::kAdd: v = eval_node(n.a, s) + eval_node(n.b, s); break;
    case ExprOp::kSub: v = eval_node(n.a, s) - eval_node(n.b, s); break;
    case ExprOp::kMul: v = eval_node(n.a, s) * eval_node(n.b, s); break;
    case ExprOp::kDiv: v = eval_node(n.a, s) / eval_node(n.b, s); break;
    case ExprOp::kPow: v = std::pow(eval_node(n.a, s), eval_node(n.b, s)); break;
    case ExprOp::kSin: v = std::sin(eval_node(n.a, s)); break;
    case ExprOp::kCos: v = std::cos(eval_node(n.a, s)); break;
    case ExprOp::kTan: v = std::tan(eval_node(n.a, s)); break;
    case ExprOp::kExp: v = std::exp(eval_node(n.a, s)); break;
    case ExprOp::kLog: v = std::log(eval_node(n.a, s)); break;
    case ExprOp::kTanh: v = std::tanh(eval_node(n.a, s)); break;
    case ExprOp::kSqrt: v = std::sqrt(eval_node(n.a, s)); break;
    case ExprOp::kAbs: v = std::abs(eval_node(n.a, s)); break;
    default: throw EvalError("corrupt expression node");
  }
  if (!std::isfinite(v))
    throw EvalError("subexpression " + print_node(i) +
                    " evaluated to a non-finite value");
  return v;
}

double Expr::eval(std::span<const double> slots) const {
  return eval_node(root_, slots);
}

std::string Expr::print_node(int i) const {
  const Node& n = nodes_[i];
  switch (n.op) {
    case ExprOp::kConst: return format_constant(n.value);
    case ExprOp::kVar: return n.name;
    case ExprOp::kNeg: return "(-" + print_node(n.a) + ")";
    case ExprOp::kAdd: return "(" + print_node(n.a) + " + " + print_node(n.b) + ")";
    case ExprOp::kSub: return "(" + print_node(n.a) + " - " + print_node(n.b) + ")";
    case ExprOp::kMul: return "(" + print_node(n.a) + " * " + print_node(n.b) + ")";
    case ExprOp::kDiv: return "(" + print_node(n.a) + " / " + print_node(n.b) + ")";
    case ExprOp::kPow: return "(" + print_node(n.a) + " ^ " + print_node(n.b) + ")";
    case ExprOp::kSin: return "sin(" + print_node(n.a) + ")";
    case ExprOp::kCos: return "cos(" + print_node(n.a) + ")";
    case ExprOp::kTan: return "tan(" + print_node(n.a) + ")";
    case ExprOp::kExp: return "exp(" + print_node(n.a) + ")";
    case ExprOp::kLog: return "log(" + print_node(n.a) + ")";
    case ExprOp::kTanh: return "tanh(" + print_node(n.a) + ")";
    case ExprOp::kSqrt: return "sqrt(" + print_node(n.a) + ")";
    case ExprOp::kAbs: return "abs(" + print_node(n.a) + ")";
  }
  return "?";
}

std::string Expr::to_string() const { return print_node(root_); }

int Expr::max_slot() const {
  int m = -1;
  for (const Node& n : nodes_)
    if (n.op == ExprOp::kVar && n.slot > m) m = n.slot;
  return m;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.

class ExprParser {
 public:
  ExprParser(std::string_view src, std::span<const Symbol> symbols, int line)
      : src_(src), symbols_(symbols), line_(line) {}

  Expr parse() {
    Expr out;
    out.nodes_.clear();
    nodes_ = &out.nodes_;
    skip_space();
    const int root = parse_expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected trailing characters");
    out.root_ = root;
    nodes_ = nullptr;
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t'))
      ++pos_;
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      skip_space();
      return true;
    }
    return false;
  }

  int push(Expr::Node n) {
    nodes_->push_back(std::move(n));
    return static_cast<int>(nodes_->size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (consume('+'))
        lhs = push({ExprOp::kAdd, 0.0, -1, lhs, parse_term(), {}});
      else if (consume('-'))
        lhs = push({ExprOp::kSub, 0.0, -1, lhs, parse_term(), {}});
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      if (consume('*'))
        lhs = push({ExprOp::kMul, 0.0, -1, lhs, parse_factor(), {}});
      else if (consume('/'))
        lhs = push({ExprOp::kDiv, 0.0, -1, lhs, parse_factor(), {}});
      else
        return lhs;
    }
  }

  // factor := '-' factor | power; power binds tighter than unary minus.
  int parse_factor() {
    if (consume('-')) return push({ExprOp::kNeg, 0.0, -1, parse_factor(), -1, {}});
    return parse_power();
  }

  // power := primary ['^' factor], right-associative.
  int parse_power() {
    const int base = parse_primary();
    if (consume('^'))
      return push({ExprOp::kPow, 0.0, -1, base, parse_factor(), {}});
    return base;
  }

  int parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      skip_space();
      const int inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    if (c == '\0') fail("unexpected end of expression");
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    skip_space();
    return push({ExprOp::kConst, value, -1, -1, -1, {}});
  }

  int parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
            src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);
    skip_space();

    if (const FuncEntry* f = lookup_function(name)) {
      if (!consume('(')) fail("expected '(' after function name '" +
                              std::string(name) + "'");
      const int arg = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return push({f->op, 0.0, -1, arg, -1, {}});
    }
    if (name == "pi")
      return push({ExprOp::kConst, 3.14159265358979323846, -1, -1, -1, {}});
    for (const Symbol& s : symbols_)
      if (name == s.name)
        return push({ExprOp::kVar, 0.0, s.slot, -1, -1, std::string(name)});
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::span<const Symbol> symbols_;
  int line_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node>* nodes_ = nullptr;
};

Expr parse_expression(std::string_view text, std::span<const Symbol> symbols,
                      int line) {
  return ExprParser(text, symbols, line).parse();
}

}  // namespace nhim

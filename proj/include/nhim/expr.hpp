#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nhim/errors.hpp"

namespace nhim {

enum class ExprOp {
  kConst,
  kVar,
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kSin,
  kCos,
  kTan,
  kExp,
  kLog,
  kTanh,
  kSqrt,
  kAbs,
};

/// A name visible to the expression parser, bound to an evaluation slot.
struct Symbol {
  std::string name;
  int slot;
};

/// Immutable arithmetic expression over a fixed slot layout. Nodes live in a
/// flat arena indexed by position; copying copies the arena. Evaluation is a
/// pure function of the slot values and throws EvalError if any subterm is
/// non-finite.
class Expr {
 public:
  struct Node {
    ExprOp op = ExprOp::kConst;
    double value = 0.0;  // kConst
    int slot = -1;       // kVar
    int a = -1;          // first child
    int b = -1;          // second child
    std::string name;    // kVar display name
  };

  Expr();  // literal zero
  static Expr constant(double v);
  static Expr variable(std::string name, int slot);

  /// base + scale * delta, built without mutating either input.
  static Expr add_scaled(const Expr& base, double scale, const Expr& delta);

  double eval(std::span<const double> slots) const;
  std::string to_string() const;
  int max_slot() const;

 private:
  int append(const Expr& other);  // copy other's nodes in, return new root
  double eval_node(int i, std::span<const double> slots) const;
  std::string print_node(int i) const;

  std::vector<Node> nodes_;
  int root_ = 0;

  friend class ExprParser;
};

/// Parses the config expression grammar: float literals, pi, named symbols,
/// +-*/^ with standard precedence, unary minus, and the function set
/// sin cos tan exp log tanh sqrt abs. `line` seeds error positions.
Expr parse_expression(std::string_view text, std::span<const Symbol> symbols,
                      int line = 0);

}  // namespace nhim

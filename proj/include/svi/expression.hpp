#pragma once

#include "svi/core.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace svi {

/// Arithmetic over p, x (first components) and p1..p4, x1..x4:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
///
/// with func one of abs, sqrt, min, max. '^' is right-associative and binds
/// tighter than unary minus, so -x^2 is -(x^2).
class Expression {
 public:
  struct Node;

  /// Throws InputError naming the offending position.
  static Expression parse(std::string_view text);

  double eval(const Vector& p, const Vector& x) const;

  const std::string& text() const { return text_; }
  /// Highest component index used (1-based); 0 if the variable does not occur.
  int p_arity() const { return p_arity_; }
  int x_arity() const { return x_arity_; }
  /// No division and only constant nonnegative integer powers, so the
  /// expression is continuous everywhere.
  bool structurally_continuous() const { return continuous_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  int p_arity_ = 0;
  int x_arity_ = 0;
  bool continuous_ = true;
};

}  // namespace svi

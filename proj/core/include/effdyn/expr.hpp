#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace effdyn {

/// Value together with its first and second derivative in x.
struct Dual2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// One-dimensional potential given as an arithmetic expression in `x`.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'? base ('^' integer)?
///   base   := number | 'x' | '(' expr ')' | func '(' expr ')'
///   func   := exp | cos | sin
///
/// `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Evaluation is
/// forward mode on second-order dual numbers, so derivatives are exact up to
/// rounding.
class ExprPotential1D {
 public:
  /// Throws SyntaxError (with byte offset) on malformed input, including
  /// unknown identifiers and function arity mismatches.
  static ExprPotential1D parse(std::string_view text);

  Dual2 eval(double x) const;
  double value(double x) const { return eval(x).v; }
  double derivative(double x) const { return eval(x).d1; }
  double second_derivative(double x) const { return eval(x).d2; }

  const std::string& source() const noexcept { return source_; }

  struct Node;
  struct Program;

 private:
  ExprPotential1D(std::shared_ptr<const Program> program, std::string source)
      : program_(std::move(program)), source_(std::move(source)) {}

  std::shared_ptr<const Program> program_;
  std::string source_;
};

}  // namespace effdyn

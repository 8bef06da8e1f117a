#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "exhol/jet.hpp"

namespace exhol {

/// Parse/evaluation failure for the scene expression language. `offset` is a
/// byte offset into the source text (-1 when not applicable).
class ExprError : public std::runtime_error {
 public:
  ExprError(const std::string& msg, long offset)
      : std::runtime_error(offset >= 0 ? msg + " at offset " + std::to_string(offset) : msg),
        offset_(offset) {}
  long offset() const { return offset_; }

 private:
  long offset_;
};

enum class UnaryFn { sin, cos, tan, exp, log, sqrt, sinh, cosh };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { constant, variable, unary, add, sub, mul, div, pow, negate };
  Kind kind;
  double constant = 0.0;   // Kind::constant, and the exponent for Kind::pow
  int var = -1;            // Kind::variable: index into the scope
  UnaryFn fn = UnaryFn::sin;
  ExprPtr lhs, rhs;
};

/// Parsed closed-form scalar expression over a fixed variable scope.
class ExprAst {
 public:
  ExprAst() = default;
  ExprAst(ExprPtr root, std::vector<std::string> scope)
      : root_(std::move(root)), scope_(std::move(scope)) {}

  bool valid() const { return root_ != nullptr; }
  const ExprPtr& root() const { return root_; }
  const std::vector<std::string>& scope() const { return scope_; }

  double eval(const std::vector<double>& point) const;

 private:
  ExprPtr root_;
  std::vector<std::string> scope_;
};

/// Recursive-descent parse of the scene expression grammar. Every identifier
/// must be listed in `scope`; `^` binds tighter than `*`/`/`, which bind
/// tighter than `+`/`-`, and exponents are numeric literals.
ExprAst parse_expression(const std::string& source, const std::vector<std::string>& scope);

/// Evaluate the expression and all its derivatives through `order` as a
/// truncated Taylor series about `base`.
JetSeries jet_eval(const ExprAst& ast, const std::vector<double>& base, int order);
JetSeries jet_eval(const ExprAst& ast, const std::vector<double>& base, const TablePtr& table);

}  // namespace exhol

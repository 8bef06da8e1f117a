#include "exhol/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace exhol {

namespace {

const std::map<std::string, UnaryFn>& function_names() {
  static const std::map<std::string, UnaryFn> m = {
      {"sin", UnaryFn::sin},   {"cos", UnaryFn::cos},   {"tan", UnaryFn::tan},
      {"exp", UnaryFn::exp},   {"log", UnaryFn::log},   {"sqrt", UnaryFn::sqrt},
      {"sinh", UnaryFn::sinh}, {"cosh", UnaryFn::cosh},
  };
  return m;
}

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& scope)
      : src_(src), scope_(scope) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) throw ExprError("syntax error: trailing input", long(pos_));
    return e;
  }

 private:
  const std::string& src_;
  const std::vector<std::string>& scope_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool peek_char(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool consume_char(char c) {
    if (peek_char(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (consume_char('+')) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::add;
        n->lhs = lhs;
        n->rhs = term();
        lhs = n;
      } else if (consume_char('-')) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::sub;
        n->lhs = lhs;
        n->rhs = term();
        lhs = n;
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (consume_char('*')) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::mul;
        n->lhs = lhs;
        n->rhs = factor();
        lhs = n;
      } else if (consume_char('/')) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::div;
        n->lhs = lhs;
        n->rhs = factor();
        lhs = n;
      } else {
        return lhs;
      }
    }
  }

  ExprPtr factor() {
    skip_ws();
    if (consume_char('-')) {
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::negate;
      n->lhs = factor();
      return n;
    }
    ExprPtr base = atom();
    if (consume_char('^')) {
      skip_ws();
      bool neg = consume_char('-');
      double e = number();
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::pow;
      n->lhs = base;
      n->constant = neg ? -e : e;
      return n;
    }
    return base;
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ExprError("syntax error: unexpected end of input", long(pos_));
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::constant;
      n->constant = number();
      return n;
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (!consume_char(')')) throw ExprError("syntax error: expected ')'", long(pos_));
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string name = src_.substr(start, pos_ - start);
      auto fn = function_names().find(name);
      if (fn != function_names().end()) {
        if (!consume_char('(')) throw ExprError("syntax error: expected '(' after function name",
                                                long(pos_));
        ExprPtr arg = expr();
        if (!consume_char(')')) throw ExprError("syntax error: expected ')'", long(pos_));
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::unary;
        n->fn = fn->second;
        n->lhs = arg;
        return n;
      }
      if (peek_char('(')) throw ExprError("unknown function name '" + name + "'", long(start));
      for (std::size_t i = 0; i < scope_.size(); ++i) {
        if (scope_[i] == name) {
          auto n = std::make_shared<ExprNode>();
          n->kind = ExprNode::Kind::variable;
          n->var = static_cast<int>(i);
          return n;
        }
      }
      throw ExprError("unknown identifier '" + name + "'", long(start));
    }
    throw ExprError("syntax error: unexpected character", long(pos_));
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ExprError("syntax error: expected number", long(start));
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }
};

double eval_node(const ExprNode& n, const std::vector<double>& point) {
  switch (n.kind) {
    case ExprNode::Kind::constant: return n.constant;
    case ExprNode::Kind::variable: return point[static_cast<std::size_t>(n.var)];
    case ExprNode::Kind::add: return eval_node(*n.lhs, point) + eval_node(*n.rhs, point);
    case ExprNode::Kind::sub: return eval_node(*n.lhs, point) - eval_node(*n.rhs, point);
    case ExprNode::Kind::mul: return eval_node(*n.lhs, point) * eval_node(*n.rhs, point);
    case ExprNode::Kind::div: return eval_node(*n.lhs, point) / eval_node(*n.rhs, point);
    case ExprNode::Kind::negate: return -eval_node(*n.lhs, point);
    case ExprNode::Kind::pow: return std::pow(eval_node(*n.lhs, point), n.constant);
    case ExprNode::Kind::unary:
      switch (n.fn) {
        case UnaryFn::sin: return std::sin(eval_node(*n.lhs, point));
        case UnaryFn::cos: return std::cos(eval_node(*n.lhs, point));
        case UnaryFn::tan: return std::tan(eval_node(*n.lhs, point));
        case UnaryFn::exp: return std::exp(eval_node(*n.lhs, point));
        case UnaryFn::log: return std::log(eval_node(*n.lhs, point));
        case UnaryFn::sqrt: return std::sqrt(eval_node(*n.lhs, point));
        case UnaryFn::sinh: return std::sinh(eval_node(*n.lhs, point));
        case UnaryFn::cosh: return std::cosh(eval_node(*n.lhs, point));
      }
  }
  throw std::logic_error("eval_node: bad node");
}

JetSeries eval_jet_node(const ExprNode& n, const TablePtr& table,
                        const std::vector<double>& base) {
  switch (n.kind) {
    case ExprNode::Kind::constant: return JetSeries::constant(n.constant, table, base);
    case ExprNode::Kind::variable: return JetSeries::variable(n.var, table, base);
    case ExprNode::Kind::add:
      return eval_jet_node(*n.lhs, table, base) + eval_jet_node(*n.rhs, table, base);
    case ExprNode::Kind::sub:
      return eval_jet_node(*n.lhs, table, base) - eval_jet_node(*n.rhs, table, base);
    case ExprNode::Kind::mul:
      return eval_jet_node(*n.lhs, table, base) * eval_jet_node(*n.rhs, table, base);
    case ExprNode::Kind::div:
      return eval_jet_node(*n.lhs, table, base) / eval_jet_node(*n.rhs, table, base);
    case ExprNode::Kind::negate: return -eval_jet_node(*n.lhs, table, base);
    case ExprNode::Kind::pow: return jet_pow(eval_jet_node(*n.lhs, table, base), n.constant);
    case ExprNode::Kind::unary: {
      JetSeries arg = eval_jet_node(*n.lhs, table, base);
      switch (n.fn) {
        case UnaryFn::sin: return jet_sin(arg);
        case UnaryFn::cos: return jet_cos(arg);
        case UnaryFn::tan: return jet_tan(arg);
        case UnaryFn::exp: return jet_exp(arg);
        case UnaryFn::log: return jet_log(arg);
        case UnaryFn::sqrt: return jet_sqrt(arg);
        case UnaryFn::sinh: return jet_sinh(arg);
        case UnaryFn::cosh: return jet_cosh(arg);
      }
    }
  }
  throw std::logic_error("eval_jet_node: bad node");
}

}  // namespace

double ExprAst::eval(const std::vector<double>& point) const {
  return eval_node(*root_, point);
}

ExprAst parse_expression(const std::string& source, const std::vector<std::string>& scope) {
  Parser p(source, scope);
  return ExprAst(p.parse(), scope);
}

JetSeries jet_eval(const ExprAst& ast, const std::vector<double>& base, int order) {
  return jet_eval(ast, base, MultiIndexTable::get(static_cast<int>(base.size()), order));
}

JetSeries jet_eval(const ExprAst& ast, const std::vector<double>& base, const TablePtr& table) {
  if (static_cast<int>(base.size()) != table->nvars())
    throw std::invalid_argument("jet_eval: base point dimension mismatch");
  return eval_jet_node(*ast.root(), table, base);
}

}  // namespace exhol

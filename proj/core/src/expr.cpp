#include "philap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace philap {

namespace {

bool nearly_integer(double y) { return y == std::floor(y); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw EvalError(std::string("non-finite result in ") + what);
}

}  // namespace

struct Expression::Node {
  enum class Kind {
    number,
    var,
    neg,
    abs,
    log,
    exp,
    sqrt,
    add,
    sub,
    mul,
    div,
    pow,
    min,
    max,
    piecewise
  };

  Kind kind;
  double number = 0.0;
  std::vector<std::shared_ptr<const Node>> kids;

  struct Piece {
    double lo;
    double hi;
    bool closed_hi;
    std::shared_ptr<const Node> body;
  };
  std::vector<Piece> pieces;

  double eval(double x) const {
    switch (kind) {
      case Kind::number:
        return number;
      case Kind::var:
        return x;
      case Kind::neg:
        return -kids[0]->eval(x);
      case Kind::abs:
        return std::fabs(kids[0]->eval(x));
      case Kind::log: {
        double a = kids[0]->eval(x);
        if (a <= 0.0) throw EvalError("log of non-positive value");
        return std::log(a);
      }
      case Kind::exp: {
        double v = std::exp(kids[0]->eval(x));
        require_finite(v, "exp");
        return v;
      }
      case Kind::sqrt: {
        double a = kids[0]->eval(x);
        if (a < 0.0) throw EvalError("sqrt of negative value");
        return std::sqrt(a);
      }
      case Kind::add:
        return check(kids[0]->eval(x) + kids[1]->eval(x), "+");
      case Kind::sub:
        return check(kids[0]->eval(x) - kids[1]->eval(x), "-");
      case Kind::mul:
        return check(kids[0]->eval(x) * kids[1]->eval(x), "*");
      case Kind::div: {
        double b = kids[1]->eval(x);
        if (b == 0.0) throw EvalError("division by zero");
        return check(kids[0]->eval(x) / b, "/");
      }
      case Kind::pow: {
        double a = kids[0]->eval(x);
        double b = kids[1]->eval(x);
        if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
        if (a < 0.0 && !nearly_integer(b)) throw EvalError("negative base with non-integer exponent");
        return check(std::pow(a, b), "^");
      }
      case Kind::min: {
        double v = kids[0]->eval(x);
        for (std::size_t i = 1; i < kids.size(); ++i) v = std::min(v, kids[i]->eval(x));
        return v;
      }
      case Kind::max: {
        double v = kids[0]->eval(x);
        for (std::size_t i = 1; i < kids.size(); ++i) v = std::max(v, kids[i]->eval(x));
        return v;
      }
      case Kind::piecewise: {
        for (const Piece& p : pieces) {
          if (x >= p.lo && (x < p.hi || (p.closed_hi && x == p.hi))) return p.body->eval(x);
        }
        throw EvalError("piecewise expression evaluated outside its pieces");
      }
    }
    throw EvalError("corrupt expression node");
  }

  static double check(double v, const char* op) {
    require_finite(v, op);
    return v;
  }

  bool references_var() const {
    if (kind == Kind::var) return true;
    for (const auto& k : kids)
      if (k->references_var()) return true;
    for (const auto& p : pieces)
      if (p.body->references_var()) return true;
    return false;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

struct Token {
  enum class Type { number, ident, op, end };
  Type type;
  double number = 0.0;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  std::size_t pos() const { return tok_.pos; }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.type = Token::Type::end;
      tok_.text.clear();
      return;
    }
    char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      const char* begin = src_.data() + i_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) throw ParseError("bad numeric literal", i_);
      tok_.type = Token::Type::number;
      tok_.number = v;
      tok_.text.assign(begin, static_cast<std::size_t>(end - begin));
      i_ += static_cast<std::size_t>(end - begin);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.type = Token::Type::ident;
      tok_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    static const std::string ops = "+-*/^(),;:<=";
    if (ops.find(c) == std::string::npos) throw ParseError(std::string("unexpected character '") + c + "'", i_);
    // two-char token "<="
    if (c == '<' && i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
      tok_.type = Token::Type::op;
      tok_.text = "<=";
      i_ += 2;
      return;
    }
    tok_.type = Token::Type::op;
    tok_.text = std::string(1, c);
    ++i_;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(std::string_view src, std::string_view var) : lex_(src), var_(var) {}

  NodePtr parse() {
    NodePtr root = additive();
    if (lex_.peek().type != Token::Type::end)
      throw ParseError("unexpected trailing input", lex_.pos());
    return root;
  }

 private:
  static NodePtr make(Node::Kind k, std::vector<NodePtr> kids = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->kids = std::move(kids);
    return n;
  }

  static NodePtr number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->number = v;
    return n;
  }

  bool accept_op(std::string_view text) {
    if (lex_.peek().type == Token::Type::op && lex_.peek().text == text) {
      lex_.next();
      return true;
    }
    return false;
  }

  void expect_op(std::string_view text) {
    if (!accept_op(text))
      throw ParseError(std::string("expected '") + std::string(text) + "'", lex_.pos());
  }

  NodePtr additive() {
    NodePtr lhs = multiplicative();
    for (;;) {
      if (accept_op("+"))
        lhs = make(Node::Kind::add, {lhs, multiplicative()});
      else if (accept_op("-"))
        lhs = make(Node::Kind::sub, {lhs, multiplicative()});
      else
        return lhs;
    }
  }

  NodePtr multiplicative() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept_op("*"))
        lhs = make(Node::Kind::mul, {lhs, unary()});
      else if (accept_op("/"))
        lhs = make(Node::Kind::div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept_op("-")) return make(Node::Kind::neg, {unary()});
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept_op("^")) return make(Node::Kind::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    const Token& t = lex_.peek();
    if (t.type == Token::Type::number) return number(lex_.next().number);
    if (t.type == Token::Type::op && t.text == "(") {
      lex_.next();
      NodePtr inner = additive();
      expect_op(")");
      return inner;
    }
    if (t.type == Token::Type::ident) {
      Token id = lex_.next();
      if (id.text == "inf") return number(std::numeric_limits<double>::infinity());
      if (id.text == "pi") return number(3.14159265358979323846);
      if (lex_.peek().type == Token::Type::op && lex_.peek().text == "(") {
        return call(id);
      }
      if (id.text == var_) return make(Node::Kind::var);
      throw ParseError("unknown identifier '" + id.text + "'", id.pos);
    }
    throw ParseError("expected a value", t.pos);
  }

  NodePtr call(const Token& id) {
    if (id.text == "piece") return piecewise(id);
    expect_op("(");
    std::vector<NodePtr> args;
    args.push_back(additive());
    while (accept_op(",")) args.push_back(additive());
    expect_op(")");
    auto unary_fn = [&](Node::Kind k) {
      if (args.size() != 1)
        throw ParseError(id.text + " takes exactly one argument", id.pos);
      return make(k, std::move(args));
    };
    if (id.text == "abs") return unary_fn(Node::Kind::abs);
    if (id.text == "log") return unary_fn(Node::Kind::log);
    if (id.text == "exp") return unary_fn(Node::Kind::exp);
    if (id.text == "sqrt") return unary_fn(Node::Kind::sqrt);
    if (id.text == "min" || id.text == "max") {
      if (args.size() < 2)
        throw ParseError(id.text + " needs at least two arguments", id.pos);
      return make(id.text == "min" ? Node::Kind::min : Node::Kind::max, std::move(args));
    }
    throw ParseError("unknown function '" + id.text + "'", id.pos);
  }

  // piece(a<=t<b : expr ; ...) with constant bounds; the last finite right
  // endpoint is owned by its piece.
  NodePtr piecewise(const Token& id) {
    expect_op("(");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::piecewise;
    for (;;) {
      Node::Piece p{};
      p.lo = constant_bound();
      expect_op("<=");
      Token v = lex_.next();
      if (v.type != Token::Type::ident || v.text != var_)
        throw ParseError("piece condition must constrain the free variable '" + var_ + "'", v.pos);
      expect_op("<");
      p.hi = constant_bound();
      expect_op(":");
      p.body = additive();
      p.closed_hi = false;
      if (!(p.lo < p.hi)) throw ParseError("empty piece interval", id.pos);
      if (!n->pieces.empty() && p.lo < n->pieces.back().hi)
        throw ParseError("overlapping piecewise intervals", id.pos);
      n->pieces.push_back(std::move(p));
      if (accept_op(";")) continue;
      expect_op(")");
      break;
    }
    if (std::isfinite(n->pieces.back().hi)) n->pieces.back().closed_hi = true;
    return n;
  }

  double constant_bound() {
    std::size_t pos = lex_.pos();
    NodePtr e = additive();
    if (e->references_var())
      throw ParseError("piece bounds must be constants", pos);
    return e->eval(0.0);
  }

  Lexer lex_;
  std::string var_;
};

}  // namespace

Expression Expression::parse(std::string_view source, std::string_view var_name) {
  if (source.empty()) throw ParseError("empty expression", 0);
  Expression e;
  e.source_ = std::string(source);
  e.var_ = std::string(var_name);
  e.root_ = Parser(source, var_name).parse();
  return e;
}

double Expression::operator()(double x) const {
  if (!root_) throw EvalError("evaluating an empty expression");
  double v = root_->eval(x);
  if (!std::isfinite(v)) throw EvalError("non-finite expression value");
  return v;
}

std::string substitute_identifier(std::string_view source, std::string_view name,
                                  std::string_view replacement) {
  std::string out;
  out.reserve(source.size() + 16);
  std::size_t i = 0;
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < source.size()) {
    char c = source[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < source.size() && is_word(source[j])) ++j;
      std::string_view word = source.substr(i, j - i);
      if (word == name) {
        out += '(';
        out += replacement;
        out += ')';
      } else {
        out += word;
      }
      i = j;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

}  // namespace philap

#include "srkit/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "overloaded.hpp"

namespace srkit {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

namespace {

using detail::overloaded;

constexpr std::size_t kMaxNesting = 512;

enum class Tok { number, placeholder, variable, function, plus, minus, star, slash, power, lparen, rparen, end };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string_view text;
  double number = 0.0;
  std::uint32_t var_index = 0;
  UnaryKind fn = UnaryKind::sin;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      while (i < s.size() && is_digit(s[i])) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
          i = j;
          while (i < s.size() && is_digit(s[i])) ++i;
        }
      }
      Token t{Tok::number, start, s.substr(start, i - start)};
      auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + i, t.number);
      if (ec != std::errc() || ptr != s.data() + i || !std::isfinite(t.number)) {
        throw ParseError("invalid number '" + std::string(t.text) + "'", start);
      }
      out.push_back(t);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(s[i])) ++i;
      std::string_view word = s.substr(start, i - start);
      Token t{Tok::function, start, word};
      if (word == "C") {
        t.kind = Tok::placeholder;
      } else if (word.size() > 2 && word.substr(0, 2) == "x_" &&
                 word.find_first_not_of("0123456789", 2) == std::string_view::npos) {
        t.kind = Tok::variable;
        auto [ptr, ec] = std::from_chars(word.data() + 2, word.data() + word.size(), t.var_index);
        if (ec != std::errc()) throw ParseError("variable index out of range '" + std::string(word) + "'", start);
      } else if (auto fn = unary_from_name(word)) {
        t.fn = *fn;
      } else {
        throw ParseError("unknown identifier '" + std::string(word) + "'", start);
      }
      out.push_back(t);
      continue;
    }
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '+': kind = Tok::plus; break;
      case '-': kind = Tok::minus; break;
      case '/': kind = Tok::slash; break;
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case '*':
        if (i + 1 < s.size() && s[i + 1] == '*') {
          kind = Tok::power;
          len = 2;
        } else {
          kind = Tok::star;
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back(Token{kind, start, s.substr(start, len)});
    i += len;
  }
  out.push_back(Token{Tok::end, s.size(), {}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Expression parse_all() {
    if (peek().kind == Tok::end) throw ParseError("empty expression", 0);
    Expression e = expr();
    if (peek().kind != Tok::end) {
      const Token& t = peek();
      if (t.kind == Tok::rparen) throw ParseError("unbalanced ')'", t.pos);
      throw ParseError("unexpected token '" + std::string(t.text) + "'", t.pos);
    }
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }

  struct NestingGuard {
    explicit NestingGuard(Parser& p) : parser(p) {
      if (++parser.nesting_ > kMaxNesting) throw ParseError("expression nested too deeply", parser.peek().pos);
    }
    ~NestingGuard() { --parser.nesting_; }
    Parser& parser;
  };

  Expression expr() {
    NestingGuard guard(*this);
    Expression lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      auto kind = advance().kind == Tok::plus ? BinaryKind::add : BinaryKind::sub;
      lhs = Expression::binary(kind, lhs, term());
    }
    return lhs;
  }

  Expression term() {
    Expression lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      auto kind = advance().kind == Tok::star ? BinaryKind::mul : BinaryKind::div;
      lhs = Expression::binary(kind, lhs, unary());
    }
    return lhs;
  }

  Expression unary() {
    NestingGuard guard(*this);
    if (peek().kind == Tok::minus) {
      advance();
      Expression operand = unary();
      if (const auto* c = std::get_if<Constant>(&operand.node().value)) return Expression::constant(-c->value);
      return Expression::binary(BinaryKind::mul, Expression::constant(-1.0), operand);
    }
    return power();
  }

  Expression power() {
    Expression base = primary();
    if (peek().kind == Tok::power) {
      advance();
      return Expression::binary(BinaryKind::pow, base, unary());
    }
    return base;
  }

  Expression primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: advance(); return Expression::constant(t.number);
      case Tok::placeholder: advance(); return Expression::placeholder();
      case Tok::variable: advance(); return Expression::variable(t.var_index);
      case Tok::function: {
        advance();
        if (peek().kind != Tok::lparen) {
          throw ParseError("expected '(' after function '" + std::string(t.text) + "'", peek().pos);
        }
        advance();
        Expression arg = expr();
        expect_rparen(t.pos);
        return Expression::unary(t.fn, arg);
      }
      case Tok::lparen: {
        advance();
        Expression inner = expr();
        expect_rparen(t.pos);
        return inner;
      }
      case Tok::end: throw ParseError("dangling operator: unexpected end of input", t.pos);
      case Tok::rparen: throw ParseError("unbalanced ')'", t.pos);
      default: throw ParseError("dangling operator: unexpected '" + std::string(t.text) + "'", t.pos);
    }
  }

  void expect_rparen(std::size_t open_pos) {
    if (peek().kind != Tok::rparen) {
      if (peek().kind == Tok::end) throw ParseError("unbalanced '('", open_pos);
      throw ParseError("expected ')' but found '" + std::string(peek().text) + "'", peek().pos);
    }
    advance();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t nesting_ = 0;
};

// Precedence levels used for minimal parenthesization.
constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::string format_integer(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
  return std::string(buf, end);
}

int precedence(const Expression& e) {
  return std::visit(overloaded{
                        [](const BinaryOp& b) {
                          switch (b.kind) {
                            case BinaryKind::add:
                            case BinaryKind::sub: return kPrecAdd;
                            case BinaryKind::mul:
                            case BinaryKind::div: return kPrecMul;
                            case BinaryKind::pow: return kPrecPow;
                          }
                          return kPrecAtom;
                        },
                        [](const Constant& c) { return std::signbit(c.value) ? kPrecNeg : kPrecAtom; },
                        [](const auto&) { return kPrecAtom; },
                    },
                    e.node().value);
}

class Printer {
 public:
  explicit Printer(PrintOptions options) : options_(options) {}

  void emit(const Expression& e, std::string& out, bool exponent_slot = false) const {
    std::visit(overloaded{
                   [&](const BinaryOp& b) {
                     const int p = precedence(e);
                     bool left_parens = false;
                     bool right_parens = false;
                     if (b.kind == BinaryKind::pow) {
                       left_parens = precedence(b.left) <= kPrecPow;
                       right_parens = precedence(b.right) < kPrecNeg;
                     } else {
                       left_parens = precedence(b.left) < p;
                       right_parens = precedence(b.right) <= p;
                     }
                     wrap(b.left, out, left_parens, false);
                     if (b.kind == BinaryKind::add || b.kind == BinaryKind::sub) {
                       out += ' ';
                       out += symbol(b.kind);
                       out += ' ';
                     } else {
                       out += symbol(b.kind);
                     }
                     wrap(b.right, out, right_parens, b.kind == BinaryKind::pow);
                   },
                   [&](const UnaryFn& u) {
                     out += name(u.kind);
                     out += '(';
                     emit(u.child, out);
                     out += ')';
                   },
                   [&](const Variable& v) {
                     if (options_.mask_variables) {
                       out += "VAR";
                     } else {
                       out += "x_";
                       out += std::to_string(v.index);
                     }
                   },
                   [&](const Constant& c) {
                     if (exponent_slot && is_structural_exponent(e) && std::fabs(c.value) < 1e15) {
                       out += format_integer(c.value);
                     } else {
                       out += format_number(c.value);
                     }
                   },
                   [&](const ConstPlaceholder&) { out += 'C'; },
               },
               e.node().value);
  }

 private:
  void wrap(const Expression& e, std::string& out, bool parens, bool exponent_slot) const {
    if (parens) out += '(';
    emit(e, out, exponent_slot);
    if (parens) out += ')';
  }

  PrintOptions options_;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
    s.replace(at, from.size(), to);
  }
}

std::string clean_line(std::string_view line) {
  std::string s(trim(line));
  if (s.rfind("- ", 0) == 0 || s.rfind("* ", 0) == 0) s.erase(0, 2);
  replace_all(s, "$", "");
  replace_all(s, "`", "");
  replace_all(s, "^", "**");
  replace_all(s, "numpy.", "");
  replace_all(s, "np.", "");
  replace_all(s, "math.", "");
  if (auto eq = s.rfind('='); eq != std::string::npos) s.erase(0, eq + 1);
  std::string_view t = trim(s);
  while (!t.empty() && (t.back() == '.' || t.back() == ';' || t.back() == ',')) t.remove_suffix(1);
  return std::string(trim(t));
}

}  // namespace

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Expression& e, PrintOptions options) {
  std::string out;
  out.reserve(e.size() * 4);
  Printer(options).emit(e, out);
  return out;
}

std::string extract_equation(std::string_view raw) {
  std::vector<std::string> candidates;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = trim(raw.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.rfind("```", 0) == 0) continue;
    std::string cleaned = clean_line(line);
    if (!cleaned.empty()) candidates.push_back(std::move(cleaned));
  }
  for (const auto& c : candidates) {
    try {
      (void)parse(c);
      return c;
    } catch (const ParseError&) {
    }
  }
  return candidates.empty() ? std::string() : candidates.front();
}

}  // namespace srkit

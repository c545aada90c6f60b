#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mdcf/core/error.hpp"
#include "mdcf/core/real.hpp"

namespace mdcf::io {

/// Round-trip form of a double: 17 significant digits.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_integer(const Integer& z) { return z.get_str(); }

/// Exact rationals are always written num/den.
inline std::string format_rational(const Rational& r) { return r.get_num().get_str() + "/" + r.get_den().get_str(); }

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::string join_integers(const std::vector<Integer>& v, std::string_view sep = ";") {
  std::vector<std::string> s;
  for (const auto& z : v) s.push_back(format_integer(z));
  return join(s, sep);
}

/// Comma-separated rows; fields containing separators or quotes are quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << quote(fields[i]);
    }
    out_ << '\n';
  }

 private:
  static std::string quote(const std::string& f) {
    if (f.find_first_of(",\"\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  std::ostream& out_;
};

/// A parsed numeric literal: the exact value when it is rational, and a
/// rounded value at the requested precision.
struct ParsedNumber {
  std::optional<Rational> exact;
  Real value;
};

namespace detail {

// number  := expr
// expr    := term (('+' | '-') term)*
// term    := unary (('*' | '/') unary)*
// unary   := '-' unary | atom
// atom    := decimal | 'sqrt(' expr ')' | 'pi' | 'phi' | '(' expr ')'
class NumberParser {
 public:
  NumberParser(std::string_view s, long prec) : s_(s), prec_(prec) {}

  ParsedNumber parse() {
    ParsedNumber v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  [[noreturn]] void fail() const { throw DomainError("cannot parse number '" + std::string(s_) + "'"); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  ParsedNumber make(const Rational& r) { return {r, Real(r, prec_)}; }

  ParsedNumber combine(const ParsedNumber& a, const ParsedNumber& b, char op) {
    ParsedNumber r;
    if (a.exact && b.exact) {
      if (op == '/' && *b.exact == 0) throw DomainError("division by zero in '" + std::string(s_) + "'");
      Rational x;
      if (op == '+') {
        x = *a.exact + *b.exact;
      } else if (op == '-') {
        x = *a.exact - *b.exact;
      } else if (op == '*') {
        x = *a.exact * *b.exact;
      } else {
        x = *a.exact / *b.exact;
      }
      return make(x);
    }
    if (op == '/' && b.value.is_zero()) throw DomainError("division by zero in '" + std::string(s_) + "'");
    r.value = op == '+' ? a.value + b.value : op == '-' ? a.value - b.value : op == '*' ? a.value * b.value : a.value / b.value;
    return r;
  }

  ParsedNumber expr() {
    ParsedNumber v = term();
    for (;;) {
      if (eat("+")) {
        v = combine(v, term(), '+');
      } else if (eat("-")) {
        v = combine(v, term(), '-');
      } else {
        return v;
      }
    }
  }

  ParsedNumber term() {
    ParsedNumber v = unary();
    for (;;) {
      if (eat("*")) {
        v = combine(v, unary(), '*');
      } else if (eat("/")) {
        v = combine(v, unary(), '/');
      } else {
        return v;
      }
    }
  }

  ParsedNumber unary() {
    if (eat("-")) return combine(make(Rational(0)), unary(), '-');
    return atom();
  }

  ParsedNumber atom() {
    if (eat("(")) {
      ParsedNumber v = expr();
      if (!eat(")")) fail();
      return v;
    }
    if (eat("sqrt(")) {
      ParsedNumber v = expr();
      if (!eat(")")) fail();
      if (v.value.sign() < 0) throw DomainError("square root of a negative number in '" + std::string(s_) + "'");
      ParsedNumber r;
      r.value = sqrt(v.value);
      if (v.exact) {
        // keep perfect squares exact
        Integer n = v.exact->get_num(), d = v.exact->get_den();
        if (mpz_perfect_square_p(n.get_mpz_t()) && mpz_perfect_square_p(d.get_mpz_t())) {
          mpz_sqrt(n.get_mpz_t(), n.get_mpz_t());
          mpz_sqrt(d.get_mpz_t(), d.get_mpz_t());
          Rational q(n, d);
          q.canonicalize();
          return make(q);
        }
      }
      return r;
    }
    if (eat("pi")) return {std::nullopt, real_pi(prec_)};
    if (eat("phi")) return {std::nullopt, (sqrt(Real(5L, prec_)) + Real(1L, prec_)) / Real(2L, prec_)};
    return decimal();
  }

  ParsedNumber decimal() {
    skip();
    const std::size_t start = pos_;
    std::string digits;
    long scale = 0;
    bool any = false, point = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits += c;
        any = true;
        if (point) ++scale;
      } else if (c == '.' && !point) {
        point = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (!any) {
      pos_ = start;
      fail();
    }
    long exp10 = 0;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      bool neg = false;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) neg = s_[p++] == '-';
      const std::size_t e0 = p;
      while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
      if (p == e0 || p - e0 > 6) fail();
      exp10 = std::stol(std::string(s_.substr(e0, p - e0)));
      if (neg) exp10 = -exp10;
      pos_ = p;
    }
    Rational r{Integer(digits, 10)};
    const long e = exp10 - scale;
    Integer ten;
    mpz_ui_pow_ui(ten.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
    if (e < 0) {
      r /= Rational(ten);
    } else {
      r *= Rational(ten);
    }
    r.canonicalize();
    return make(r);
  }

  std::string_view s_;
  long prec_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses "2/5", "0.125", "1e-6", "sqrt(2)-1", "phi-1", "pi/4" and the like.
inline ParsedNumber parse_number(std::string_view s, long prec = kDefaultPrecisionBits) {
  return detail::NumberParser(s, prec).parse();
}

/// Comma-separated list of numbers.
inline std::vector<ParsedNumber> parse_vector(std::string_view s, long prec = kDefaultPrecisionBits) {
  std::vector<ParsedNumber> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '(') ++depth;
    if (i < s.size() && s[i] == ')') --depth;
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      out.push_back(parse_number(s.substr(start, i - start), prec));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace mdcf::io

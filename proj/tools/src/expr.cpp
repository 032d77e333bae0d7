#include <cctype>
#include <string>

#include "refmon/errors.hpp"
#include "refmon_cli/cli.hpp"

namespace refmon::cli {

namespace {

bool id_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.' || c == '@' || c == '\'';
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
  return true;
}

class Parser {
 public:
  Parser(const Monoid& m, std::string_view text) : m_(m), s_(text) {}

  MonElem expr() {
    MonElem acc = term();
    while (true) {
      skip();
      if (!peek('+')) return acc;
      ++pos_;
      acc = m_.add(acc, term());
    }
  }

  std::vector<MonElem> list() {
    std::vector<MonElem> out;
    skip();
    while (!done()) {
      out.push_back(expr());
      skip();
      if (peek(',') || peek(';')) {
        ++pos_;
        skip();
        if (done()) fail("expression expected");
      }
    }
    return out;
  }

  bool done() const { return pos_ >= s_.size(); }
  void skip() {
    while (!done() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " at offset " + std::to_string(pos_));
  }

 private:
  bool peek(char c) const { return !done() && s_[pos_] == c; }

  MonElem term() {
    skip();
    if (done()) fail("unexpected end");
    if (peek('(')) {
      ++pos_;
      MonElem inner = expr();
      skip();
      if (!peek(')')) fail("')' expected");
      ++pos_;
      return inner;
    }
    if (peek('{')) return literal();
    const std::size_t start = pos_;
    std::string word;
    if (peek('*')) {
      ++pos_;
      word = "*";
    } else {
      while (!done() && id_char(s_[pos_])) ++pos_;
      word = std::string(s_.substr(start, pos_ - start));
    }
    if (word.empty()) fail(std::string("unexpected '") + s_[pos_] + "'");
    if (all_digits(word) && peek('*')) {
      ++pos_;
      const unsigned long k = std::stoul(word);
      return m_.multiple(term(), static_cast<unsigned>(k));
    }
    const auto idx = m_.poset().find(word);
    if (!idx) {
      if (word == "0") return m_.zero();
      fail("unknown element '" + word + "'");
    }
    if (peek('[')) return m_.chi(*idx, coordinates());
    return m_.prime_representatives()[*idx];
  }

  IntVector coordinates() {
    ++pos_;
    IntVector v;
    skip();
    if (peek(']')) {
      ++pos_;
      return v;
    }
    while (true) {
      skip();
      const std::size_t start = pos_;
      if (peek('-') || peek('+')) ++pos_;
      while (!done() && std::isdigit(static_cast<unsigned char>(s_[pos_])) != 0) ++pos_;
      std::string num(s_.substr(start, pos_ - start));
      if (!num.empty() && num[0] == '+') num.erase(0, 1);
      if (num.empty() || num == "-") fail("integer expected");
      v.emplace_back(num);
      skip();
      if (peek(']')) {
        ++pos_;
        return v;
      }
      if (!peek(',')) fail("',' or ']' expected");
      ++pos_;
    }
  }

  MonElem literal() {
    const std::size_t start = pos_;
    int depth = 0;
    bool in_string = false;
    for (; !done(); ++pos_) {
      const char c = s_[pos_];
      if (in_string) {
        if (c == '\\') ++pos_;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) {
        ++pos_;
        return m_.parse_json(std::string(s_.substr(start, pos_ - start)));
      }
    }
    fail("unterminated element literal");
  }

  const Monoid& m_;
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

MonElem parse_expression(const Monoid& m, std::string_view text) {
  Parser p(m, text);
  MonElem x = p.expr();
  p.skip();
  if (!p.done()) p.fail("trailing input");
  return x;
}

std::vector<MonElem> parse_expression_list(const Monoid& m, std::string_view text) {
  Parser p(m, text);
  return p.list();
}

}  // namespace refmon::cli

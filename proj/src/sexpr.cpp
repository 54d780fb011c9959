#include "prover/sexpr.hpp"

namespace prover {

namespace {

struct Reader {
  const std::string& in;
  std::size_t pos = 0;
  int line = 1;

  bool done() const { return pos >= in.size(); }
  char peek() const { return in[pos]; }
  char take() {
    char c = in[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skipSpace() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') take();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else {
        break;
      }
    }
  }

  static bool atomChar(char c) {
    if (c == '(' || c == ')' || c == '"' || c == ';') return false;
    return c > ' ';
  }

  std::optional<ParseError> readOne(SExpr& out) {
    skipSpace();
    if (done()) return ParseError{"unexpected end of input", line};
    char c = peek();
    if (c == '(') {
      take();
      out = SExpr{SExpr::List, "", {}};
      while (true) {
        skipSpace();
        if (done()) return ParseError{"unterminated list", line};
        if (peek() == ')') {
          take();
          return std::nullopt;
        }
        SExpr item;
        if (auto err = readOne(item)) return err;
        out.items.push_back(std::move(item));
      }
    }
    if (c == ')') return ParseError{"stray ')'", line};
    if (c == '"') {
      take();
      out = SExpr{SExpr::Str, "", {}};
      while (true) {
        if (done()) return ParseError{"unterminated string", line};
        char d = take();
        if (d == '"') return std::nullopt;
        if (d == '\\') {
          if (done()) return ParseError{"unterminated escape", line};
          out.text += take();
        } else {
          out.text += d;
        }
      }
    }
    out = SExpr{SExpr::Atom, "", {}};
    while (!done() && atomChar(peek())) out.text += take();
    if (out.text.empty()) return ParseError{"empty atom", line};
    return std::nullopt;
  }
};

}  // namespace

ParseResult parseSExprs(const std::string& input) {
  ParseResult res;
  Reader r{input};
  while (true) {
    r.skipSpace();
    if (r.done()) break;
    SExpr form;
    if (auto err = r.readOne(form)) {
      res.error = err;
      return res;
    }
    res.forms.push_back(std::move(form));
  }
  return res;
}

std::string showSExpr(const SExpr& e) {
  switch (e.kind) {
    case SExpr::Atom:
      return e.text;
    case SExpr::Str: {
      std::string out = "\"";
      for (char c : e.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case SExpr::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += " ";
        out += showSExpr(e.items[i]);
      }
      return out + ")";
    }
  }
  return "";
}

}  // namespace prover

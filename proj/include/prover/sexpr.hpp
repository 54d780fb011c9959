// Minimal S-expression reader/printer for the input language.
// Atoms are bare tokens (symbols, keywords like :when, numerals-as-names);
// strings are double-quoted with no escapes beyond \" and \\.
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace prover {

struct SExpr {
  enum Kind { Atom, Str, List } kind = Atom;
  std::string text;          // Atom and Str payload
  std::vector<SExpr> items;  // List payload

  bool isAtom(const std::string& s) const { return kind == Atom && text == s; }
};

struct ParseError {
  std::string message;
  int line = 0;
};

// Parses a whole buffer into toplevel forms. Comments run from ';' to eol.
struct ParseResult {
  std::vector<SExpr> forms;
  std::optional<ParseError> error;
};

ParseResult parseSExprs(const std::string& input);

std::string showSExpr(const SExpr& e);

}  // namespace prover

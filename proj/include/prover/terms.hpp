// Many-sorted first-order terms, literals, and clauses.
//
// Terms are immutable values. Variables are identified by interned name;
// names are unique within a clause, so substitutions key on the name alone.
// Positions address clauses as: literal index (1-based), then 1=lhs / 2=rhs
// of the equation, then argument indices.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace prover {

using StrId = std::uint32_t;
using SortId = std::uint32_t;
using SymId = std::uint32_t;

class Interner {
 public:
  StrId intern(const std::string& s);
  const std::string& name(StrId id) const { return names_.at(id); }
  bool known(const std::string& s) const { return ids_.count(s) != 0; }

 private:
  std::map<std::string, StrId> ids_;
  std::vector<std::string> names_;
};

enum class SymKind { Constructor, Defined };

struct SymInfo {
  std::string name;
  SymKind kind;
  std::vector<SortId> argSorts;
  SortId resSort;
};

// Declaration-ordered tables of sorts and function symbols. The intern order
// of symbols is the tiebreaker in the permutative term order, so constructors
// and early declarations compare small.
class Signature {
 public:
  Signature();

  SortId addSort(const std::string& name);
  std::optional<SortId> sortId(const std::string& name) const;
  const std::string& sortName(SortId s) const { return sortNames_.at(s); }
  std::size_t sortCount() const { return sortNames_.size(); }

  SymId addSym(const std::string& name, SymKind kind,
               std::vector<SortId> argSorts, SortId resSort);
  std::optional<SymId> symId(const std::string& name) const;
  const SymInfo& sym(SymId f) const { return syms_.at(f); }
  std::size_t symCount() const { return syms_.size(); }

  // Constructors of a sort, in declaration order.
  const std::vector<SymId>& constructorsOf(SortId s) const;

  SortId boolSort() const { return boolSort_; }
  SymId trueSym() const { return trueSym_; }
  SymId falseSym() const { return falseSym_; }

  Interner& vars() { return varNames_; }
  const Interner& vars() const { return varNames_; }

 private:
  std::map<std::string, SortId> sortIds_;
  std::vector<std::string> sortNames_;
  std::map<std::string, SymId> symIds_;
  std::vector<SymInfo> syms_;
  std::vector<std::vector<SymId>> ctorsBySort_;
  SortId boolSort_;
  SymId trueSym_, falseSym_;
  Interner varNames_;
};

struct Term {
  bool isVar = false;
  // Variable: interned name id. Application: symbol id.
  std::uint32_t head = 0;
  SortId sort = 0;
  std::vector<Term> args;

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  bool operator<(const Term& o) const;  // structural, for ordered containers
};

Term mkVar(StrId name, SortId sort);
Term mkApp(SymId f, std::vector<Term> args, const Signature& sig);

// Node count; variables and constants count 1.
std::size_t termSize(const Term& t);

bool occursIn(const Term& needle, const Term& hay);
void collectVars(const Term& t, std::set<StrId>& out);
std::set<StrId> vars(const Term& t);

// True when the term contains no variables and only constructor symbols.
bool constructorGround(const Term& t, const Signature& sig);

using Position = std::vector<int>;

std::string showPosition(const Position& p);

// Substitutions map variable names to terms. Iteration order is the interned
// name order, which keeps printing deterministic.
struct Subst {
  std::map<StrId, Term> map;

  bool bound(StrId v) const { return map.count(v) != 0; }
  const Term* lookup(StrId v) const;
  bool bind(StrId v, const Term& t);  // false on conflicting rebind
  bool operator==(const Subst& o) const { return map == o.map; }
};

Term applySubst(const Subst& s, const Term& t);

// One-sided matching: find s with pattern*s == t.
std::optional<Subst> matchTerm(const Term& pattern, const Term& t);
// Extends accum in place; fails without modifying it on mismatch... it may
// leave partial bindings, so callers pass a scratch copy.
bool matchInto(const Term& pattern, const Term& t, Subst& accum);

// Total simplification order: size, then head (symbols in intern order rank
// before variables in name order), then arguments lexicographically.
bool permSmaller(const Term& a, const Term& b);

// Equations with polarity. A bare boolean atom t abbreviates t = true.
// Construction orients the equation so the larger side is on the left.
struct Literal {
  Term lhs, rhs;
  bool positive = true;

  bool sameAtom(const Literal& o) const { return lhs == o.lhs && rhs == o.rhs; }
  bool operator==(const Literal& o) const {
    return positive == o.positive && sameAtom(o);
  }
  bool operator<(const Literal& o) const;
};

Literal mkLiteral(Term lhs, Term rhs, bool positive);
Literal negated(const Literal& l);

struct Clause {
  std::vector<Literal> lits;
  // Variables introduced by destructor elimination; blocks re-elimination.
  std::set<StrId> marked;

  bool operator==(const Clause& o) const { return lits == o.lits; }
};

// Drops duplicate literals, preserving first-occurrence order.
Clause mkClause(std::vector<Literal> lits, std::set<StrId> marked = {});

std::set<StrId> clauseVars(const Clause& c);

const Term* subtermAt(const Term& t, const Position& p, std::size_t from = 0);
const Term* subtermAt(const Clause& c, const Position& p);
// Returns false when the position does not exist.
bool replaceAt(Term& t, const Position& p, const Term& repl,
               std::size_t from = 0);
bool replaceAt(Clause& c, const Position& p, const Term& repl);

// All clause positions whose subterm equals needle, in lexicographic order.
std::vector<Position> occurrences(const Term& needle, const Clause& c);

Literal applySubst(const Subst& s, const Literal& l);
Clause applySubst(const Subst& s, const Clause& c);

// Replace every occurrence of a subterm by another term.
Term replaceAll(const Term& t, const Term& from, const Term& to);
Clause replaceAll(const Clause& c, const Term& from, const Term& to);

std::string showTerm(const Term& t, const Signature& sig);
std::string showLiteral(const Literal& l, const Signature& sig);
std::string showClause(const Clause& c, const Signature& sig);
std::string showSubst(const Subst& s, const Signature& sig);

}  // namespace prover

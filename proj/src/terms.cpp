#include "prover/terms.hpp"

#include <cassert>
#include <stdexcept>

namespace prover {

StrId Interner::intern(const std::string& s) {
  auto it = ids_.find(s);
  if (it != ids_.end()) return it->second;
  StrId id = static_cast<StrId>(names_.size());
  ids_.emplace(s, id);
  names_.push_back(s);
  return id;
}

Signature::Signature() {
  boolSort_ = addSort("bool");
  trueSym_ = addSym("true", SymKind::Constructor, {}, boolSort_);
  falseSym_ = addSym("false", SymKind::Constructor, {}, boolSort_);
}

SortId Signature::addSort(const std::string& name) {
  auto it = sortIds_.find(name);
  if (it != sortIds_.end()) throw std::runtime_error("sort redeclared: " + name);
  SortId id = static_cast<SortId>(sortNames_.size());
  sortIds_.emplace(name, id);
  sortNames_.push_back(name);
  ctorsBySort_.emplace_back();
  return id;
}

std::optional<SortId> Signature::sortId(const std::string& name) const {
  auto it = sortIds_.find(name);
  if (it == sortIds_.end()) return std::nullopt;
  return it->second;
}

SymId Signature::addSym(const std::string& name, SymKind kind,
                        std::vector<SortId> argSorts, SortId resSort) {
  auto it = symIds_.find(name);
  if (it != symIds_.end())
    throw std::runtime_error("symbol redeclared: " + name);
  SymId id = static_cast<SymId>(syms_.size());
  symIds_.emplace(name, id);
  syms_.push_back(SymInfo{name, kind, std::move(argSorts), resSort});
  if (kind == SymKind::Constructor) ctorsBySort_.at(resSort).push_back(id);
  return id;
}

std::optional<SymId> Signature::symId(const std::string& name) const {
  auto it = symIds_.find(name);
  if (it == symIds_.end()) return std::nullopt;
  return it->second;
}

const std::vector<SymId>& Signature::constructorsOf(SortId s) const {
  return ctorsBySort_.at(s);
}

bool Term::operator==(const Term& o) const {
  return isVar == o.isVar && head == o.head && args == o.args;
}

bool Term::operator<(const Term& o) const {
  if (isVar != o.isVar) return isVar < o.isVar;
  if (head != o.head) return head < o.head;
  return args < o.args;
}

Term mkVar(StrId name, SortId sort) { return Term{true, name, sort, {}}; }

Term mkApp(SymId f, std::vector<Term> args, const Signature& sig) {
  const SymInfo& info = sig.sym(f);
  if (args.size() != info.argSorts.size())
    throw std::runtime_error("arity mismatch at " + info.name);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort != info.argSorts[i])
      throw std::runtime_error("sort mismatch at " + info.name);
  return Term{false, f, info.resSort, std::move(args)};
}

std::size_t termSize(const Term& t) {
  std::size_t n = 1;
  for (const Term& a : t.args) n += termSize(a);
  return n;
}

bool occursIn(const Term& needle, const Term& hay) {
  if (hay == needle) return true;
  for (const Term& a : hay.args)
    if (occursIn(needle, a)) return true;
  return false;
}

void collectVars(const Term& t, std::set<StrId>& out) {
  if (t.isVar) {
    out.insert(t.head);
    return;
  }
  for (const Term& a : t.args) collectVars(a, out);
}

std::set<StrId> vars(const Term& t) {
  std::set<StrId> out;
  collectVars(t, out);
  return out;
}

bool constructorGround(const Term& t, const Signature& sig) {
  if (t.isVar) return false;
  if (sig.sym(t.head).kind != SymKind::Constructor) return false;
  for (const Term& a : t.args)
    if (!constructorGround(a, sig)) return false;
  return true;
}

std::string showPosition(const Position& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ".";
    out += std::to_string(p[i]);
  }
  return out;
}

const Term* Subst::lookup(StrId v) const {
  auto it = map.find(v);
  return it == map.end() ? nullptr : &it->second;
}

bool Subst::bind(StrId v, const Term& t) {
  auto it = map.find(v);
  if (it != map.end()) return it->second == t;
  map.emplace(v, t);
  return true;
}

Term applySubst(const Subst& s, const Term& t) {
  if (t.isVar) {
    if (const Term* b = s.lookup(t.head)) return *b;
    return t;
  }
  Term out = t;
  for (Term& a : out.args) a = applySubst(s, a);
  return out;
}

bool matchInto(const Term& pattern, const Term& t, Subst& accum) {
  if (pattern.isVar) {
    if (pattern.sort != t.sort) return false;
    return accum.bind(pattern.head, t);
  }
  if (t.isVar || pattern.head != t.head) return false;
  for (std::size_t i = 0; i < pattern.args.size(); ++i)
    if (!matchInto(pattern.args[i], t.args[i], accum)) return false;
  return true;
}

std::optional<Subst> matchTerm(const Term& pattern, const Term& t) {
  Subst s;
  if (matchInto(pattern, t, s)) return s;
  return std::nullopt;
}

bool permSmaller(const Term& a, const Term& b) {
  std::size_t sa = termSize(a), sb = termSize(b);
  if (sa != sb) return sa < sb;
  // Symbols rank before variables; within a rank, intern order decides.
  if (a.isVar != b.isVar) return b.isVar;
  if (a.head != b.head) return a.head < b.head;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i] == b.args[i]) continue;
    return permSmaller(a.args[i], b.args[i]);
  }
  return false;
}

bool Literal::operator<(const Literal& o) const {
  if (positive != o.positive) return positive < o.positive;
  if (!(lhs == o.lhs)) return lhs < o.lhs;
  return rhs < o.rhs;
}

Literal mkLiteral(Term lhs, Term rhs, bool positive) {
  if (lhs.sort != rhs.sort)
    throw std::runtime_error("literal sides have different sorts");
  if (permSmaller(lhs, rhs)) std::swap(lhs, rhs);
  return Literal{std::move(lhs), std::move(rhs), positive};
}

Literal negated(const Literal& l) { return Literal{l.lhs, l.rhs, !l.positive}; }

Clause mkClause(std::vector<Literal> lits, std::set<StrId> marked) {
  Clause c;
  c.marked = std::move(marked);
  for (Literal& l : lits) {
    bool dup = false;
    for (const Literal& seen : c.lits)
      if (seen == l) {
        dup = true;
        break;
      }
    if (!dup) c.lits.push_back(std::move(l));
  }
  return c;
}

std::set<StrId> clauseVars(const Clause& c) {
  std::set<StrId> out;
  for (const Literal& l : c.lits) {
    collectVars(l.lhs, out);
    collectVars(l.rhs, out);
  }
  return out;
}

const Term* subtermAt(const Term& t, const Position& p, std::size_t from) {
  const Term* cur = &t;
  for (std::size_t i = from; i < p.size(); ++i) {
    int k = p[i];
    if (k < 1 || static_cast<std::size_t>(k) > cur->args.size())
      return nullptr;
    cur = &cur->args[k - 1];
  }
  return cur;
}

const Term* subtermAt(const Clause& c, const Position& p) {
  if (p.size() < 2) return nullptr;
  int li = p[0];
  if (li < 1 || static_cast<std::size_t>(li) > c.lits.size()) return nullptr;
  const Literal& l = c.lits[li - 1];
  if (p[1] == 1) return subtermAt(l.lhs, p, 2);
  if (p[1] == 2) return subtermAt(l.rhs, p, 2);
  return nullptr;
}

bool replaceAt(Term& t, const Position& p, const Term& repl,
               std::size_t from) {
  if (from == p.size()) {
    t = repl;
    return true;
  }
  int k = p[from];
  if (k < 1 || static_cast<std::size_t>(k) > t.args.size()) return false;
  return replaceAt(t.args[k - 1], p, repl, from + 1);
}

bool replaceAt(Clause& c, const Position& p, const Term& repl) {
  if (p.size() < 2) return false;
  int li = p[0];
  if (li < 1 || static_cast<std::size_t>(li) > c.lits.size()) return false;
  Literal& l = c.lits[li - 1];
  if (p[1] == 1) return replaceAt(l.lhs, p, repl, 2);
  if (p[1] == 2) return replaceAt(l.rhs, p, repl, 2);
  return false;
}

namespace {
void collectOccurrences(const Term& needle, const Term& t, Position& here,
                        std::vector<Position>& out) {
  if (t == needle) out.push_back(here);
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    here.push_back(static_cast<int>(i + 1));
    collectOccurrences(needle, t.args[i], here, out);
    here.pop_back();
  }
}
}  // namespace

std::vector<Position> occurrences(const Term& needle, const Clause& c) {
  std::vector<Position> out;
  Position here;
  for (std::size_t li = 0; li < c.lits.size(); ++li) {
    here = {static_cast<int>(li + 1), 1};
    collectOccurrences(needle, c.lits[li].lhs, here, out);
    here = {static_cast<int>(li + 1), 2};
    collectOccurrences(needle, c.lits[li].rhs, here, out);
  }
  return out;
}

Literal applySubst(const Subst& s, const Literal& l) {
  return mkLiteral(applySubst(s, l.lhs), applySubst(s, l.rhs), l.positive);
}

Clause applySubst(const Subst& s, const Clause& c) {
  std::vector<Literal> lits;
  lits.reserve(c.lits.size());
  for (const Literal& l : c.lits) lits.push_back(applySubst(s, l));
  // Marks name variables; a substitution replaces them, so marks survive only
  // for variables the substitution leaves in place.
  std::set<StrId> marked;
  for (StrId m : c.marked)
    if (!s.bound(m)) marked.insert(m);
  return mkClause(std::move(lits), std::move(marked));
}

Term replaceAll(const Term& t, const Term& from, const Term& to) {
  if (t == from) return to;
  Term out = t;
  for (Term& a : out.args) a = replaceAll(a, from, to);
  return out;
}

Clause replaceAll(const Clause& c, const Term& from, const Term& to) {
  std::vector<Literal> lits;
  lits.reserve(c.lits.size());
  for (const Literal& l : c.lits)
    lits.push_back(mkLiteral(replaceAll(l.lhs, from, to),
                             replaceAll(l.rhs, from, to), l.positive));
  return mkClause(std::move(lits), c.marked);
}

std::string showTerm(const Term& t, const Signature& sig) {
  if (t.isVar) return sig.vars().name(t.head);
  std::string out = sig.sym(t.head).name;
  if (t.args.empty()) return out;
  out += "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    out += showTerm(t.args[i], sig);
  }
  return out + ")";
}

std::string showLiteral(const Literal& l, const Signature& sig) {
  return showTerm(l.lhs, sig) + (l.positive ? " = " : " /= ") +
         showTerm(l.rhs, sig);
}

std::string showClause(const Clause& c, const Signature& sig) {
  std::string out = "[";
  for (std::size_t i = 0; i < c.lits.size(); ++i) {
    if (i) out += ", ";
    out += showLiteral(c.lits[i], sig);
  }
  return out + "]";
}

std::string showSubst(const Subst& s, const Signature& sig) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, t] : s.map) {
    if (!first) out += ", ";
    first = false;
    out += sig.vars().name(v) + " -> " + showTerm(t, sig);
  }
  return out + "}";
}

}  // namespace prover

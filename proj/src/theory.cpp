#include "prover/theory.hpp"

#include <algorithm>
#include <functional>

namespace prover {

namespace {

Term resolveGround(const GroundSpec& g, SortId want, const Signature& sig) {
  auto f = sig.symId(g.head);
  if (!f || sig.sym(*f).kind != SymKind::Constructor)
    throw TheoryError("destructor default not constructor ground: " + g.head);
  const SymInfo& info = sig.sym(*f);
  if (info.resSort != want)
    throw TheoryError("destructor default has the wrong sort: " + g.head);
  if (info.argSorts.size() != g.args.size())
    throw TheoryError("destructor default arity mismatch: " + g.head);
  std::vector<Term> args;
  for (std::size_t i = 0; i < g.args.size(); ++i)
    args.push_back(resolveGround(g.args[i], info.argSorts[i], sig));
  return mkApp(*f, std::move(args), sig);
}

bool mentionsSym(const Term& t, SymId f) {
  if (!t.isVar && t.head == f) return true;
  for (const Term& a : t.args)
    if (mentionsSym(a, f)) return true;
  return false;
}

void checkPattern(const Term& t, SymId f, const Signature& sig,
                  std::set<StrId>& seen) {
  if (t.isVar) {
    if (!seen.insert(t.head).second)
      throw TheoryError("(a) left-hand side of " + sig.sym(f).name +
                        " is not linear");
    return;
  }
  if (sig.sym(t.head).kind != SymKind::Constructor)
    throw TheoryError("(a) left-hand side of " + sig.sym(f).name +
                      " has a non-constructor pattern");
  for (const Term& a : t.args) checkPattern(a, f, sig, seen);
}


// Unifies two linear constructor patterns renamed apart; bindings never
// need chasing because every variable occurs once.
bool unifyPatterns(const Term& a, const Term& b, Subst& s) {
  if (a.isVar) return s.bind(a.head, b);
  if (b.isVar) return s.bind(b.head, a);
  if (a.head != b.head) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unifyPatterns(a.args[i], b.args[i], s)) return false;
  return true;
}

struct CoverCase {
  std::vector<Term> pats;
  std::vector<Literal> conds;
};

// Syntactic constructor-completeness: split on constructors position by
// position, then require the leaf cases' conditions to cover every sign
// assignment of their atoms.
bool coversAll(std::vector<CoverCase> cases, Signature& sig, int& fresh) {
  if (cases.empty()) return false;
  for (std::size_t j = 0; j < cases[0].pats.size(); ++j) {
    bool split = false;
    for (const CoverCase& c : cases) split = split || !c.pats[j].isVar;
    if (!split) continue;
    SortId sort = cases[0].pats[j].sort;
    for (SymId ctor : sig.constructorsOf(sort)) {
      const SymInfo& info = sig.sym(ctor);
      std::vector<CoverCase> sub;
      for (const CoverCase& c : cases) {
        const Term& p = c.pats[j];
        if (!p.isVar && p.head != ctor) continue;
        CoverCase n;
        n.conds = c.conds;
        for (std::size_t k = 0; k < c.pats.size(); ++k)
          if (k != j) n.pats.push_back(c.pats[k]);
        if (p.isVar)
          for (SortId as : info.argSorts)
            n.pats.push_back(mkVar(sig.vars().intern("#c" + std::to_string(fresh++)), as));
        else
          for (const Term& sp : p.args) n.pats.push_back(sp);
        sub.push_back(std::move(n));
      }
      if (!coversAll(std::move(sub), sig, fresh)) return false;
    }
    return true;
  }
  // All patterns are variables: condition-sign covering.
  std::vector<Literal> atoms;
  for (const CoverCase& c : cases)
    for (const Literal& l : c.conds) {
      bool known = false;
      for (const Literal& a : atoms) known = known || a.sameAtom(l);
      if (!known) atoms.push_back(Literal{l.lhs, l.rhs, true});
    }
  if (atoms.size() > 16) throw TheoryError("(c) too many condition atoms");
  for (std::size_t mask = 0; mask < (std::size_t{1} << atoms.size()); ++mask) {
    bool covered = false;
    for (const CoverCase& c : cases) {
      bool sat = true;
      for (const Literal& l : c.conds) {
        std::size_t i = 0;
        while (!atoms[i].sameAtom(l)) ++i;
        bool val = (mask >> i) & 1;
        sat = sat && (val == l.positive);
      }
      covered = covered || sat;
    }
    if (!covered) return false;
  }
  return true;
}

bool renameEquivalent(const Term& a, const Term& b) {
  auto s = matchTerm(a, b);
  if (!s) return false;
  std::set<StrId> image;
  for (const auto& [v, t] : s->map)
    if (!t.isVar || !image.insert(t.head).second) return false;
  return matchTerm(b, a).has_value();
}

}  // namespace

void Theory::declareDatatype(const std::string& sortName,
                             const std::vector<CtorSpec>& ctors,
                             const std::vector<DestrSpec>& destrs) {
  if (ctors.empty()) throw TheoryError("sort " + sortName + " has no constructors");
  if (sig_.sortId(sortName))
    throw TheoryError("sort redeclared: " + sortName);
  bool inhabited = false;
  std::size_t totalArgs = 0;
  for (const CtorSpec& c : ctors) {
    bool base = true;
    for (const std::string& as : c.argSorts) {
      if (as != sortName && !sig_.sortId(as))
        throw TheoryError("unknown sort " + as + " in constructor " + c.name);
      base = base && as != sortName;
    }
    inhabited = inhabited || base;
    totalArgs += c.argSorts.size();
  }
  if (!inhabited)
    throw TheoryError("sort " + sortName + " is uninhabited");
  if (!destrs.empty() && destrs.size() != totalArgs)
    throw TheoryError("destructor count differs from constructor argument count");

  SortId sort = sig_.addSort(sortName);
  std::vector<SymId> ctorIds;
  for (const CtorSpec& c : ctors) {
    std::vector<SortId> argSorts;
    for (const std::string& as : c.argSorts) argSorts.push_back(*sig_.sortId(as));
    ctorIds.push_back(sig_.addSym(c.name, SymKind::Constructor, argSorts, sort));
  }

  // Destructors attach positionally to the constructor arguments, in
  // declaration order; each one is a total defined function with a
  // pattern equation on its constructor and default equations elsewhere.
  std::size_t next = 0;
  for (std::size_t ci = 0; ci < ctorIds.size() && !destrs.empty(); ++ci) {
    const SymInfo ownerInfo = sig_.sym(ctorIds[ci]);
    for (std::size_t ai = 0; ai < ownerInfo.argSorts.size(); ++ai, ++next) {
      const DestrSpec& d = destrs[next];
      SortId argSort = ownerInfo.argSorts[ai];
      Term dflt = resolveGround(d.dflt, argSort, sig_);
      SymId dsym = beginFunction(d.name, {sort}, argSort);
      destructors_.insert(dsym);
      std::vector<Equation> eqs;
      for (std::size_t cj = 0; cj < ctors.size(); ++cj) {
        const SymInfo info = sig_.sym(ctorIds[cj]);
        std::vector<Term> pat;
        for (std::size_t k = 0; k < info.argSorts.size(); ++k)
          pat.push_back(mkVar(sig_.vars().intern("x" + std::to_string(k + 1)),
                              info.argSorts[k]));
        Term lhs = mkApp(dsym, {mkApp(ctorIds[cj], pat, sig_)}, sig_);
        Term rhs = cj == ci ? pat[ai] : dflt;
        eqs.push_back(Equation{lhs, rhs, {}});
      }
      FunctionDef fd;
      fd.symbol = dsym;
      fd.equations = std::move(eqs);
      fd.partial = false;
      admitFunction(std::move(fd));

      // Built-in descent fact d(v) < v, guarded by v differing from every
      // constant constructor; skipped when a non-constant sibling exists.
      bool expressible = true;
      std::vector<Literal> conds;
      Term v = mkVar(sig_.vars().intern("w0"), sort);
      for (std::size_t cj = 0; cj < ctors.size(); ++cj) {
        if (cj == ci) continue;
        if (sig_.sym(ctorIds[cj]).argSorts.empty())
          conds.push_back(mkLiteral(v, mkApp(ctorIds[cj], {}, sig_), false));
        else
          expressible = false;
      }
      if (expressible)
        inductions_.push_back(InductionLemma{
            "structural-size", mkApp(dsym, {v}, sig_), v, std::move(conds)});
    }
  }
  events_.push_back("data " + sortName);
}

SymId Theory::beginFunction(const std::string& name,
                            const std::vector<SortId>& argSorts,
                            SortId resSort) {
  SymId f = sig_.addSym(name, SymKind::Defined, argSorts, resSort);
  pending_.insert(f);
  return f;
}

void Theory::admitFunction(FunctionDef fd) {
  SymId f = fd.symbol;
  const std::string& fname = sig_.sym(f).name;

  // (a) linear constructor patterns headed by the defined symbol
  for (const Equation& eq : fd.equations) {
    if (eq.lhs.isVar || eq.lhs.head != f)
      throw TheoryError("(a) equation head is not " + fname);
    std::set<StrId> seen;
    for (const Term& arg : eq.lhs.args) checkPattern(arg, f, sig_, seen);
  }

  // (b) every right-hand side and condition variable is bound on the left
  for (const Equation& eq : fd.equations) {
    std::set<StrId> lhsVars = vars(eq.lhs);
    std::set<StrId> used = vars(eq.rhs);
    for (const Literal& c : eq.conds) {
      collectVars(c.lhs, used);
      collectVars(c.rhs, used);
    }
    for (StrId v : used)
      if (!lhsVars.count(v))
        throw TheoryError("(b) free variable " + sig_.vars().name(v) +
                          " in the definition of " + fname);
  }

  // (e) conditions must not mention the symbol being defined
  for (const Equation& eq : fd.equations)
    for (const Literal& c : eq.conds)
      if (mentionsSym(c.lhs, f) || mentionsSym(c.rhs, f))
        throw TheoryError("(e) conditions of " + fname + " mention " + fname);

  // (c) syntactic constructor-completeness, waived for partial functions
  if (!fd.partial) {
    std::vector<CoverCase> cases;
    for (const Equation& eq : fd.equations)
      cases.push_back(CoverCase{eq.lhs.args, eq.conds});
    int fresh = 0;
    if (!coversAll(std::move(cases), sig_, fresh))
      throw TheoryError("(c) case analysis of " + fname + " is incomplete");
  }

  // (d) pairwise non-overlap: non-unifiable patterns or a syntactically
  // complementary condition under the overlap substitution
  for (std::size_t i = 0; i < fd.equations.size(); ++i)
    for (std::size_t j = i + 1; j < fd.equations.size(); ++j) {
      const Equation& a = fd.equations[i];
      const Equation& b = fd.equations[j];
      std::map<StrId, SortId> bSorts;
      std::function<void(const Term&)> sortsOf = [&](const Term& t) {
        if (t.isVar) bSorts.emplace(t.head, t.sort);
        for (const Term& s : t.args) sortsOf(s);
      };
      sortsOf(b.lhs);
      Subst rename;
      for (const auto& [v, sort] : bSorts)
        rename.bind(v, mkVar(sig_.vars().intern("#r" + sig_.vars().name(v)),
                             sort));
      Term blhs = applySubst(rename, b.lhs);
      Subst mgu;
      if (!unifyPatterns(a.lhs, blhs, mgu)) continue;
      bool complementary = false;
      for (const Literal& ca : a.conds)
        for (const Literal& cbRaw : b.conds) {
          Literal cb = applySubst(rename, cbRaw);
          Literal ua = applySubst(mgu, ca);
          Literal ub = applySubst(mgu, cb);
          complementary =
              complementary || (ua.sameAtom(ub) && ua.positive != ub.positive);
        }
      if (!complementary)
        throw TheoryError("(d) equations of " + fname + " overlap");
    }

  fd.recursive = false;
  bool anyPattern = false;
  for (const Equation& eq : fd.equations) {
    fd.recursive = fd.recursive || mentionsSym(eq.rhs, f);
    for (const Term& arg : eq.lhs.args) anyPattern = anyPattern || !arg.isVar;
  }
  fd.style = anyPattern ? DefStyle::Constructor : DefStyle::Destructor;

  // (f) a recursive total function needs at least one termination witness
  if (!fd.partial && fd.recursive) {
    fd.templates = computeTemplates(*this, f, fd.equations);
    if (fd.templates.empty())
      throw TheoryError("(f) no valid induction template for " + fname);
  }

  pending_.erase(f);
  defs_.emplace(f, std::move(fd));
  recomputeTypesets();
}

void Theory::finishFunction(SymId f, std::vector<Equation> eqs, bool partial) {
  if (!pending_.count(f))
    throw TheoryError("function not open for definition: " + sig_.sym(f).name);
  FunctionDef fd;
  fd.symbol = f;
  fd.equations = std::move(eqs);
  fd.partial = partial;
  admitFunction(std::move(fd));
  events_.push_back("defun " + sig_.sym(f).name);
}

bool Theory::isAdmitted(SymId f) const { return defs_.count(f) != 0; }

const FunctionDef* Theory::def(SymId f) const {
  auto it = defs_.find(f);
  return it == defs_.end() ? nullptr : &it->second;
}

namespace {

struct EvalCtx {
  const Theory& th;
  std::size_t budget;
  bool exhausted = false;
};

Term evalRec(EvalCtx& cx, const Term& t);

// True/false when the condition decides definitely; nullopt otherwise.
// Negative conditions require constructor-ground disequality.
std::optional<bool> decideCond(EvalCtx& cx, const Literal& c, const Subst& s) {
  Term l = evalRec(cx, applySubst(s, c.lhs));
  Term r = evalRec(cx, applySubst(s, c.rhs));
  if (l == r) return c.positive;
  if (constructorGround(l, cx.th.sig()) && constructorGround(r, cx.th.sig()))
    return !c.positive;
  return std::nullopt;
}

Term evalRec(EvalCtx& cx, const Term& t) {
  Term cur = t;
  for (;;) {
    if (cur.isVar || cx.exhausted) return cur;
    std::vector<Term> args;
    for (const Term& a : cur.args) args.push_back(evalRec(cx, a));
    cur = Term{false, cur.head, cur.sort, std::move(args)};
    const FunctionDef* fd = cx.th.def(cur.head);
    if (!fd) return cur;  // constructor or unadmitted symbol
    bool fired = false;
    for (const Equation& eq : fd->equations) {
      auto s = matchTerm(eq.lhs, cur);
      if (!s) continue;
      bool holds = true;
      for (const Literal& c : eq.conds) {
        auto d = decideCond(cx, c, *s);
        if (!d || !*d) {
          holds = false;
          break;
        }
      }
      if (!holds) continue;
      if (cx.budget == 0) {
        cx.exhausted = true;
        return cur;
      }
      --cx.budget;
      cur = applySubst(*s, eq.rhs);
      fired = true;
      break;
    }
    if (!fired) return cur;  // stuck outside a partial function's domain
  }
}

}  // namespace

EvalResult Theory::evaluate(const Term& t, std::size_t budget) const {
  EvalCtx cx{*this, budget};
  Term r = evalRec(cx, t);
  return EvalResult{r, cx.exhausted};
}

namespace {

Term theTrue(const Signature& sig) { return mkApp(sig.trueSym(), {}, sig); }

}  // namespace

void Theory::addLemma(const std::string& name, const Clause& clause,
                      const std::set<LemmaTag>& tags, bool assume) {
  // Shape checks come first; a mis-tagged lemma is rejected unproved.
  // The first literal of a lemma clause is its conclusion; the rest,
  // negated, are its hypotheses.
  std::optional<RewriteLemma> rw;
  if (tags.count(LemmaTag::Rewrite)) {
    if (clause.lits.empty() || !clause.lits.front().positive)
      throw TheoryError("rewrite lemma " + name +
                        " must lead with a positive conclusion");
    const Literal& concl = clause.lits.front();
    for (StrId v : vars(concl.rhs))
      if (!vars(concl.lhs).count(v))
        throw TheoryError("rewrite lemma " + name +
                          " introduces variables on the small side");
    RewriteLemma r;
    r.name = name;
    r.from = concl.lhs;
    r.to = concl.rhs;
    for (std::size_t i = 1; i < clause.lits.size(); ++i)
      r.conds.push_back(negated(clause.lits[i]));
    r.permutative = renameEquivalent(r.from, r.to);
    rw = std::move(r);
  }

  std::optional<EliminationLemma> el;
  if (tags.count(LemmaTag::Elimination)) {
    if (clause.lits.empty()) throw TheoryError("elimination lemma " + name + " is empty");
    const Literal& head = clause.lits.front();
    if (!head.positive || !head.rhs.isVar || head.lhs.isVar ||
        sig_.sym(head.lhs.head).kind != SymKind::Constructor)
      throw TheoryError("elimination lemma " + name +
                        " must start with a constructor equation t = x");
    std::set<StrId> designated = vars(head.lhs);
    if (designated.count(head.rhs.head))
      throw TheoryError("elimination lemma " + name +
                        " binds its head variable inside the pattern");
    std::function<void(const Term&, std::set<StrId>&)> linear =
        [&](const Term& t, std::set<StrId>& seen) {
          if (t.isVar) {
            if (!seen.insert(t.head).second)
              throw TheoryError("elimination lemma " + name +
                                " repeats a pattern variable");
            return;
          }
          if (sig_.sym(t.head).kind != SymKind::Constructor)
            throw TheoryError("elimination lemma " + name +
                              " has a non-constructor pattern");
          for (const Term& a : t.args) linear(a, seen);
        };
    {
      std::set<StrId> seen;
      linear(head.lhs, seen);
    }
    EliminationLemma e;
    e.name = name;
    e.ctorTerm = head.lhs;
    e.headVar = head.rhs;
    std::size_t end = clause.lits.size();
    std::set<StrId> paired;
    while (end > 1) {
      const Literal& l = clause.lits[end - 1];
      if (l.positive || !l.rhs.isVar || !designated.count(l.rhs.head)) break;
      if (l.lhs.isVar || sig_.sym(l.lhs.head).kind != SymKind::Defined) break;
      e.pairs.push_back({l.rhs.head, l.lhs});
      paired.insert(l.rhs.head);
      --end;
    }
    std::reverse(e.pairs.begin(), e.pairs.end());
    for (std::size_t i = 1; i < end; ++i) e.middles.push_back(clause.lits[i]);
    if (paired != designated)
      throw TheoryError("elimination lemma " + name +
                        " must pair every pattern variable with a destructor term");
    for (std::size_t i = 0; i < e.pairs.size(); ++i)
      for (std::size_t j = i + 1; j < e.pairs.size(); ++j)
        if (e.pairs[i].second == e.pairs[j].second)
          throw TheoryError("elimination lemma " + name +
                            " repeats a destructor term");
    for (const Literal& m : e.middles)
      for (StrId v : designated)
        if (occursIn(mkVar(v, 0), m.lhs) || occursIn(mkVar(v, 0), m.rhs))
          throw TheoryError("elimination lemma " + name +
                            " uses a pattern variable mid-clause");
    for (const auto& [v, d] : e.pairs)
      for (StrId w : designated)
        if (occursIn(mkVar(w, 0), d))
          throw TheoryError("elimination lemma " + name +
                            " nests a pattern variable in a destructor term");
    el = std::move(e);
  }

  if (tags.count(LemmaTag::Generalization)) {
    if (clause.lits.size() != 1 || !clause.lits[0].positive)
      throw TheoryError("generalization lemma " + name +
                        " must be a single positive equation");
  }

  std::optional<InductionLemma> il;
  if (tags.count(LemmaTag::Induction)) {
    if (clause.lits.empty() || !clause.lits.front().positive)
      throw TheoryError("induction lemma " + name +
                        " must lead with a positive conclusion");
    const Literal* concl = &clause.lits.front();
    if (concl->rhs != theTrue(sig_) || concl->lhs.isVar ||
        concl->lhs.args.size() != 2)
      throw TheoryError("induction lemma " + name +
                        " must conclude R(w1, w2) = true");
    const Term& w1 = concl->lhs.args[0];
    const Term& w2 = concl->lhs.args[1];
    if (w1.isVar || w2.isVar || w1.head != w2.head)
      throw TheoryError("induction lemma " + name +
                        " needs weight terms with one top symbol");
    std::set<StrId> distinct;
    for (const Term& a : w2.args)
      if (!a.isVar || !distinct.insert(a.head).second)
        throw TheoryError("induction lemma " + name +
                          " needs distinct variables under the second weight");
    if (w1.args.size() == 1) {
      InductionLemma lem;
      lem.relation = sig_.sym(concl->lhs.head).name + "/" + sig_.sym(w1.head).name;
      lem.smaller = w1.args[0];
      lem.larger = w2.args[0];
      for (const Literal& l : clause.lits)
        if (&l != concl) lem.conds.push_back(negated(l));
      il = std::move(lem);
    }
  }

  bool assumed = assume;
  if (!assume) {
    if (!prover_) throw TheoryError("no prover installed");
    if (!prover_(name, clause)) throw TheoryError("proof failed: " + name);
  }

  lemmas_.push_back(Lemma{name, clause, tags, assumed});
  if (rw) rewrites_.push_back(std::move(*rw));
  if (el) eliminations_.push_back(std::move(*el));
  if (tags.count(LemmaTag::Generalization))
    generalizations_.push_back(lemmas_.back());
  if (il) inductions_.push_back(std::move(*il));
  events_.push_back("defthm " + name);
}

void Theory::recomputeTypesets() {
  typesets_.clear();
  for (const auto& [f, fd] : defs_) typesets_[f] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [f, fd] : defs_) {
      std::set<SymId> ts = typesets_[f];
      for (const Equation& eq : fd.equations) {
        std::set<SymId> top = topConstructors(eq.rhs);
        ts.insert(top.begin(), top.end());
      }
      if (ts != typesets_[f]) {
        typesets_[f] = std::move(ts);
        changed = true;
      }
    }
  }
  partialReach_.clear();
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& [f, fd] : defs_) {
      if (partialReach_.count(f)) continue;
      bool reach = fd.partial;
      auto scan = [&](const Term& t) {
        std::function<void(const Term&)> go = [&](const Term& u) {
          if (!u.isVar && partialReach_.count(u.head)) reach = true;
          for (const Term& a : u.args) go(a);
        };
        go(t);
      };
      for (const Equation& eq : fd.equations) {
        scan(eq.rhs);
        for (const Literal& c : eq.conds) {
          scan(c.lhs);
          scan(c.rhs);
        }
      }
      if (reach) {
        partialReach_.insert(f);
        changed = true;
      }
    }
  }
}

const std::set<SymId>& Theory::typeset(SymId f) const {
  static const std::set<SymId> empty;
  auto it = typesets_.find(f);
  return it == typesets_.end() ? empty : it->second;
}

std::set<SymId> Theory::topConstructors(const Term& t) const {
  if (t.isVar) {
    const auto& cs = sig_.constructorsOf(t.sort);
    return std::set<SymId>(cs.begin(), cs.end());
  }
  if (sig_.sym(t.head).kind == SymKind::Constructor) return {t.head};
  auto it = typesets_.find(t.head);
  if (it != typesets_.end()) return it->second;
  const auto& cs = sig_.constructorsOf(t.sort);
  return std::set<SymId>(cs.begin(), cs.end());
}

bool Theory::maybeStuck(const Term& t) const {
  if (!t.isVar && sig_.sym(t.head).kind == SymKind::Defined) {
    if (partialReach_.count(t.head)) return true;
    if (!isAdmitted(t.head)) return true;
  }
  for (const Term& a : t.args)
    if (maybeStuck(a)) return true;
  return false;
}

}  // namespace prover

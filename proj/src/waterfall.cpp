#include "prover/waterfall.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace prover {

namespace {

std::string showPositions(const std::vector<Position>& ps) {
  std::string out = "{";
  for (std::size_t i = 0; i < ps.size(); ++i)
    out += (i ? "," : "") + showPosition(ps[i]);
  return out + "}";
}

// Subterm positions below one literal side, innermost first.
void postorderPositions(const Term& t, Position& cur,
                        std::vector<std::pair<Position, const Term*>>& out) {
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    cur.push_back(static_cast<int>(i + 1));
    postorderPositions(t.args[i], cur, out);
    cur.pop_back();
  }
  out.emplace_back(cur, &t);
}

std::vector<std::pair<Position, const Term*>> clausePositions(
    const Clause& c) {
  std::vector<std::pair<Position, const Term*>> out;
  for (std::size_t i = 0; i < c.lits.size(); ++i) {
    Position p{static_cast<int>(i + 1), 1};
    postorderPositions(c.lits[i].lhs, p, out);
    p = {static_cast<int>(i + 1), 2};
    postorderPositions(c.lits[i].rhs, p, out);
  }
  return out;
}

void collectCallsOf(SymId f, const Term& t, std::vector<Term>& out) {
  for (const Term& a : t.args) collectCallsOf(f, a, out);
  if (!t.isVar && t.head == f &&
      std::find(out.begin(), out.end(), t) == out.end())
    out.push_back(t);
}

// Function symbols including constructors; variables count zero.
std::size_t symbolCount(const Term& t) {
  if (t.isVar) return 0;
  std::size_t n = 1;
  for (const Term& a : t.args) n += symbolCount(a);
  return n;
}

bool subtermOfClause(const Term& s, const Clause& c) {
  for (const Literal& l : c.lits)
    if (occursIn(s, l.lhs) || occursIn(s, l.rhs)) return true;
  return false;
}

bool allSubtermsOccur(const Term& t, const Clause& c) {
  if (!subtermOfClause(t, c)) return false;
  for (const Term& a : t.args)
    if (!allSubtermsOccur(a, c)) return false;
  return true;
}

bool mentionsRecursive(const Term& t, const Theory& th) {
  if (!t.isVar) {
    const FunctionDef* d = th.def(t.head);
    if (d && d->recursive) return true;
  }
  for (const Term& a : t.args)
    if (mentionsRecursive(a, th)) return true;
  return false;
}

// Homeomorphic embedding: s embeds into t.
bool embeds(const Term& s, const Term& t) {
  if (s == t) return true;
  if (s.isVar && t.isVar) return true;
  if (!t.isVar)
    for (const Term& a : t.args)
      if (embeds(s, a)) return true;
  if (!s.isVar && !t.isVar && s.head == t.head &&
      s.args.size() == t.args.size()) {
    bool all = true;
    for (std::size_t i = 0; i < s.args.size() && all; ++i)
      all = embeds(s.args[i], t.args[i]);
    if (all && !s.args.empty()) return true;
  }
  return false;
}

std::size_t ctorGroundArgs(const Term& t, const Signature& sig) {
  std::size_t n = 0;
  for (const Term& a : t.args)
    if (constructorGround(a, sig)) ++n;
  return n;
}

// First name of the form stem1, stem2, ... not used in the clause.
std::string freshNumberedName(const std::string& stem,
                              std::set<std::string>& used) {
  for (std::size_t k = 1;; ++k) {
    std::string name = stem + std::to_string(k);
    if (used.insert(name).second) return name;
  }
}

std::set<std::string> clauseVarNames(const Clause& c, const Signature& sig) {
  std::set<std::string> out;
  for (StrId v : clauseVars(c)) out.insert(sig.vars().name(v));
  return out;
}

struct RaiiCounter {
  int& n;
  explicit RaiiCounter(int& v) : n(v) { ++n; }
  ~RaiiCounter() { --n; }
};

}  // namespace

void Prover::Context::addClauseLiterals(const std::vector<Literal>& lits,
                                        std::size_t skip) {
  for (std::size_t j = 0; j < lits.size(); ++j)
    if (j != skip) facts.push_back(negated(lits[j]));
}

Prover::Prover(Theory& th, ProverOptions opt) : th_(th), opt_(opt) {}

bool Prover::chargeStep() { return ++steps_ <= opt_.evalBudget; }

Prover::Truth Prover::decideAtom(const Term& a, const Term& b,
                                 const Context& ctx, std::size_t depth) {
  const Signature& sig = th_.sig();
  if (a == b) return Truth::True;
  Literal probe = mkLiteral(a, b, true);
  for (const Literal& f : ctx.facts)
    if (f.lhs == probe.lhs && f.rhs == probe.rhs)
      return f.positive ? Truth::True : Truth::False;
  bool ag = constructorGround(a, sig), bg = constructorGround(b, sig);
  if (ag && bg) return Truth::False;  // equal was handled above
  bool actor = !a.isVar && sig.sym(a.head).kind == SymKind::Constructor;
  bool bctor = !b.isVar && sig.sym(b.head).kind == SymKind::Constructor;
  if (actor && bctor) {
    if (a.head != b.head) return Truth::False;
    // Same constructor: decided by the argument atoms when they all decide.
    bool unknown = false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      Truth t = decideAtom(a.args[i], b.args[i], ctx, depth);
      if (t == Truth::False) return Truth::False;
      unknown = unknown || t == Truth::Unknown;
    }
    return unknown ? Truth::Unknown : Truth::True;
  }
  bool adef = !a.isVar && sig.sym(a.head).kind == SymKind::Defined &&
              th_.isAdmitted(a.head);
  bool bdef = !b.isVar && sig.sym(b.head).kind == SymKind::Defined &&
              th_.isAdmitted(b.head);
  if (adef && bctor && !th_.maybeStuck(a) &&
      th_.typeset(a.head).count(b.head) == 0)
    return Truth::False;
  if (bdef && actor && !th_.maybeStuck(b) &&
      th_.typeset(b.head).count(a.head) == 0)
    return Truth::False;
  if (adef && bdef && !th_.maybeStuck(a) && !th_.maybeStuck(b)) {
    const std::set<SymId>& ta = th_.typeset(a.head);
    bool disjoint = true;
    for (SymId s : th_.typeset(b.head)) disjoint = disjoint && ta.count(s) == 0;
    if (disjoint) return Truth::False;
  }
  return Truth::Unknown;
}

Prover::Truth Prover::decideLiteral(const Literal& l, const Context& ctx,
                                    const Clause& clause, std::size_t depth) {
  Term a = normTerm(l.lhs, ctx, clause, depth);
  Term b = normTerm(l.rhs, ctx, clause, depth);
  Truth t = decideAtom(a, b, ctx, depth);
  if (t == Truth::Unknown) return t;
  bool holds = (t == Truth::True) == l.positive;
  return holds ? Truth::True : Truth::False;
}

Term Prover::normTerm(const Term& t, const Context& ctx, const Clause& clause,
                      std::size_t depth) {
  if (!chargeStep()) return t;
  const Signature& sig = th_.sig();
  Term cur = t;
  if (!cur.isVar && !cur.args.empty()) {
    std::vector<Term> args = cur.args;
    bool changed = false;
    for (Term& a : args) {
      Term n = normTerm(a, ctx, clause, depth);
      changed = changed || n != a;
      a = std::move(n);
    }
    if (changed) cur = mkApp(cur.head, std::move(args), sig);
  }
  while (chargeStep()) {
    // Context equations rewrite toward their constructor-ground side.
    // Identical sides would spin: the orientation invariant makes every
    // productive rule strictly decreasing, so skip the degenerate ones.
    bool fired = false;
    for (const Literal& f : ctx.facts) {
      if (!f.positive || f.lhs == f.rhs || !constructorGround(f.rhs, sig))
        continue;
      if (cur == f.lhs) {
        cur = f.rhs;
        fired = true;
        break;
      }
    }
    if (fired) continue;
    if (cur.isVar) break;
    if (sig.sym(cur.head).kind == SymKind::Defined &&
        th_.isAdmitted(cur.head)) {
      if (vars(cur).empty()) {
        EvalResult ev = th_.evaluate(cur, opt_.evalBudget);
        if (!ev.exhausted && ev.term != cur) {
          cur = ev.term;
          continue;
        }
      } else if (std::optional<Term> u = unfoldDecided(cur, ctx, clause, depth)) {
        cur = *u;
        continue;
      }
    }
    if (std::optional<Term> r = applyRewriteLemmas(cur, ctx, clause, depth)) {
      cur = *r;
      continue;
    }
    break;
  }
  return cur;
}

std::optional<Term> Prover::unfoldDecided(const Term& t, const Context& ctx,
                                          const Clause& clause,
                                          std::size_t depth) {
  if (unfoldNest_ > 64) return std::nullopt;
  RaiiCounter guard(unfoldNest_);
  const FunctionDef* def = th_.def(t.head);
  if (!def) return std::nullopt;
  for (const Equation& eq : def->equations) {
    std::optional<Subst> s = matchTerm(eq.lhs, t);
    if (!s) continue;
    bool dead = false, undecided = false;
    for (const Literal& cond : eq.conds) {
      Truth tv = decideLiteral(applySubst(*s, cond), ctx, clause, depth);
      if (tv == Truth::False) {
        dead = true;
        break;
      }
      if (tv == Truth::Unknown) {
        undecided = true;
        break;
      }
    }
    if (dead) continue;
    // An undecided condition is split territory, not plain rewriting; the
    // whole attempt stops to keep the equation order intact.
    if (undecided) return std::nullopt;
    Term body = normTerm(applySubst(*s, eq.rhs), ctx, clause, depth);
    if (!def->recursive) return body;
    std::vector<Term> calls;
    collectCallsOf(t.head, body, calls);
    if (unfoldApproved(t, calls, clause)) return body;
    return std::nullopt;
  }
  return std::nullopt;
}

// A recursive unfold is licensed when, for every recursive call surviving in
// the simplified body, either all its subterms already occur in the clause,
// or each call strictly gains constructor-ground arguments, or each call
// strictly shrinks in function symbols over some template's measured set.
bool Prover::unfoldApproved(const Term& call, const std::vector<Term>& newCalls,
                            const Clause& clause) {
  if (newCalls.empty()) return true;
  const Signature& sig = th_.sig();
  bool occurrence = true;
  for (const Term& s : newCalls)
    occurrence = occurrence && allSubtermsOccur(s, clause);
  if (occurrence) return true;
  bool moreGround = true;
  std::size_t base = ctorGroundArgs(call, sig);
  for (const Term& s : newCalls)
    moreGround = moreGround && ctorGroundArgs(s, sig) > base;
  if (moreGround) return true;
  const FunctionDef* def = th_.def(call.head);
  if (!def) return false;
  for (const InductionTemplate& tpl : def->templates) {
    std::size_t orig = 0;
    for (std::size_t p : tpl.measured) orig += symbolCount(call.args[p - 1]);
    bool shrinks = true;
    for (const Term& s : newCalls) {
      std::size_t now = 0;
      for (std::size_t p : tpl.measured) now += symbolCount(s.args[p - 1]);
      shrinks = shrinks && now < orig;
    }
    if (shrinks) return true;
  }
  return false;
}

std::optional<Term> Prover::applyRewriteLemmas(const Term& t,
                                               const Context& ctx,
                                               const Clause& clause,
                                               std::size_t depth) {
  if (depth > opt_.backchainDepth) return std::nullopt;
  for (const RewriteLemma& L : th_.rewriteLemmas()) {
    std::optional<Subst> m = matchTerm(L.from, t);
    if (!m) continue;
    Subst s = *m;
    bool ok = true;
    for (const Literal& cond : L.conds) {
      Literal inst = applySubst(s, cond);
      if (!vars(inst.lhs).empty() || !vars(inst.rhs).empty()) {
        // Free condition variables: instantiate eagerly against a context
        // fact of the required polarity, in fact order.
        bool bound = false;
        for (const Literal& f : ctx.facts) {
          if (f.positive != cond.positive) continue;
          Subst trial = s;
          if (matchInto(inst.lhs, f.lhs, trial) &&
              matchInto(inst.rhs, f.rhs, trial)) {
            s = trial;
            bound = true;
            break;
          }
          trial = s;
          if (matchInto(inst.lhs, f.rhs, trial) &&
              matchInto(inst.rhs, f.lhs, trial)) {
            s = trial;
            bound = true;
            break;
          }
        }
        if (!bound) {
          ok = false;
          break;
        }
        inst = applySubst(s, cond);
      }
      if (!relieveCondition(inst, ctx, clause, depth)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Term to = applySubst(s, L.to);
    if (L.permutative && !permSmaller(to, t)) continue;
    return normTerm(to, ctx, clause, depth);
  }
  return std::nullopt;
}

bool Prover::relieveCondition(const Literal& cond, const Context& ctx,
                              const Clause& clause, std::size_t depth) {
  if (depth >= opt_.backchainDepth) return false;
  for (const std::pair<Term, Term>& open : condStack_)
    if (embeds(open.first, cond.lhs) && embeds(open.second, cond.rhs))
      return false;
  condStack_.emplace_back(cond.lhs, cond.rhs);
  Truth tv = decideLiteral(cond, ctx, clause, depth + 1);
  condStack_.pop_back();
  return tv == Truth::True;
}

void Prover::unfoldBranches(const Term& call, const std::vector<Equation>& eqs,
                            std::size_t eqIdx, Context ctx,
                            const Clause& clause,
                            std::vector<Literal> assumed,
                            std::vector<UnfoldLeaf>& leaves) {
  Context bctx = ctx;
  for (const Literal& a : assumed) bctx.facts.push_back(a);
  for (std::size_t i = eqIdx; i < eqs.size(); ++i) {
    std::optional<Subst> s = matchTerm(eqs[i].lhs, call);
    if (!s) continue;
    bool dead = false;
    for (const Literal& cond : eqs[i].conds) {
      Literal inst = applySubst(*s, cond);
      Truth tv = decideLiteral(inst, bctx, clause, 0);
      if (tv == Truth::False) {
        dead = true;
        break;
      }
      if (tv == Truth::Unknown) {
        std::vector<Literal> onTrue = assumed;
        onTrue.push_back(inst);
        unfoldBranches(call, eqs, i, ctx, clause, std::move(onTrue), leaves);
        std::vector<Literal> onFalse = assumed;
        onFalse.push_back(negated(inst));
        unfoldBranches(call, eqs, i, ctx, clause, std::move(onFalse), leaves);
        return;
      }
    }
    if (dead) continue;
    Term body = normTerm(applySubst(*s, eqs[i].rhs), bctx, clause, 0);
    leaves.push_back(UnfoldLeaf{std::move(assumed), std::move(body)});
    return;
  }
  leaves.push_back(UnfoldLeaf{std::move(assumed), std::nullopt});
}

// Unfold through undecided equation conditions: every way the conditions can
// resolve becomes a branch clause carrying the deciding literals, with the
// call rewritten to that branch's right-hand side.
bool Prover::trySplitUnfold(const Clause& c, std::vector<Clause>& out) {
  const Signature& sig = th_.sig();
  for (const auto& [pos, sub] : clausePositions(c)) {
    const Term& t = *sub;
    if (t.isVar || sig.sym(t.head).kind != SymKind::Defined ||
        !th_.isAdmitted(t.head))
      continue;
    const FunctionDef* def = th_.def(t.head);
    Context ctx;
    ctx.sig = &sig;
    ctx.addClauseLiterals(c.lits, static_cast<std::size_t>(pos[0]) - 1);
    std::vector<UnfoldLeaf> leaves;
    unfoldBranches(t, def->equations, 0, ctx, c, {}, leaves);
    if (leaves.size() < 2) continue;
    bool anyFired = false;
    std::vector<Term> calls;
    for (const UnfoldLeaf& leaf : leaves)
      if (leaf.result) {
        anyFired = true;
        collectCallsOf(t.head, *leaf.result, calls);
      }
    if (!anyFired) continue;
    if (def->recursive && !unfoldApproved(t, calls, c)) continue;
    // Equal results on every branch collapse to one in-place rewrite.
    bool allSame = leaves[0].result.has_value();
    for (const UnfoldLeaf& leaf : leaves)
      allSame = allSame && leaf.result && *leaf.result == *leaves[0].result;
    if (allSame) {
      Clause one = c;
      replaceAt(one, pos, *leaves[0].result);
      out.push_back(mkClause(one.lits, one.marked));
      return true;
    }
    for (const UnfoldLeaf& leaf : leaves) {
      Clause branch = c;
      if (leaf.result) replaceAt(branch, pos, *leaf.result);
      std::vector<Literal> lits = branch.lits;
      for (const Literal& a : leaf.assumed) lits.push_back(negated(a));
      out.push_back(mkClause(std::move(lits), c.marked));
    }
    return true;
  }
  return false;
}

// Case split over the constructors of a variable blocking a recursive
// definition pattern, approved only when every case unfolds with its
// surviving recursive calls already present in the instantiated clause.
bool Prover::tryVarSplit(const Clause& c, std::vector<Clause>& out) {
  const Signature& sig = th_.sig();
  for (const auto& [pos, sub] : clausePositions(c)) {
    const Term& t = *sub;
    if (t.isVar || sig.sym(t.head).kind != SymKind::Defined ||
        !th_.isAdmitted(t.head))
      continue;
    const FunctionDef* def = th_.def(t.head);
    if (!def->recursive) continue;
    for (std::size_t k = 0; k < t.args.size(); ++k) {
      if (!t.args[k].isVar) continue;
      bool patterned = false;
      for (const Equation& eq : def->equations)
        patterned = patterned || !eq.lhs.args[k].isVar;
      if (!patterned) continue;
      StrId v = t.args[k].head;
      SortId vs = t.args[k].sort;
      std::set<std::string> used = clauseVarNames(c, sig);
      std::vector<Clause> cases;
      bool allPass = true;
      for (SymId ctor : sig.constructorsOf(vs)) {
        const SymInfo& info = sig.sym(ctor);
        std::vector<Term> pat;
        std::string base = sig.vars().name(v);
        for (std::size_t ai = 0; ai < info.argSorts.size(); ++ai) {
          std::string name =
              info.argSorts.size() == 1 ? base : base + std::to_string(ai + 1);
          do name += "'";
          while (used.count(name));
          used.insert(name);
          pat.push_back(mkVar(th_.sig().vars().intern(name),
                              info.argSorts[ai]));
        }
        Subst theta;
        theta.bind(v, mkApp(ctor, pat, sig));
        Clause inst = applySubst(theta, c);
        inst.marked = c.marked;
        Term instCall = applySubst(theta, t);
        Context ctx;
        ctx.sig = &sig;
        ctx.addClauseLiterals(inst.lits, static_cast<std::size_t>(pos[0]) - 1);
        bool fired = false;
        for (const Equation& eq : def->equations) {
          std::optional<Subst> s = matchTerm(eq.lhs, instCall);
          if (!s) continue;
          bool hold = true;
          for (const Literal& cond : eq.conds)
            hold = hold && decideLiteral(applySubst(*s, cond), ctx, inst, 0) ==
                               Truth::True;
          if (!hold) break;
          Term body = normTerm(applySubst(*s, eq.rhs), ctx, inst, 0);
          std::vector<Term> calls;
          collectCallsOf(t.head, body, calls);
          bool occ = true;
          for (const Term& call : calls)
            occ = occ && allSubtermsOccur(call, inst);
          if (!occ) break;
          replaceAt(inst, pos, body);
          fired = true;
          break;
        }
        if (!fired) {
          allPass = false;
          break;
        }
        cases.push_back(mkClause(inst.lits, inst.marked));
      }
      if (allPass && !cases.empty()) {
        out = std::move(cases);
        return true;
      }
    }
  }
  return false;
}

StageResult Prover::simplify(const Clause& c) {
  const Signature& sig = th_.sig();
  StageResult res;
  std::deque<Clause> work{c};
  std::vector<Clause> outs;
  std::size_t processed = 0;
  while (!work.empty()) {
    Clause cur = mkClause(work.front().lits, work.front().marked);
    work.pop_front();
    if (++processed > 256) {  // runaway splitting: keep the rest as-is
      outs.push_back(cur);
      continue;
    }
    steps_ = 0;
    bool tautology = false, consumed = false;
    bool again = true;
    while (again && chargeStep()) {
      again = false;
      // Normalization, decisions, and constructor injectivity.
      for (std::size_t i = 0; i < cur.lits.size() && !again; ++i) {
        Context ctx;
        ctx.sig = &sig;
        ctx.addClauseLiterals(cur.lits, i);
        const Literal& lit = cur.lits[i];
        Term l = normTerm(lit.lhs, ctx, cur, 0);
        Term r = normTerm(lit.rhs, ctx, cur, 0);
        if (l != lit.lhs || r != lit.rhs) {
          std::vector<Literal> lits = cur.lits;
          lits[i] = mkLiteral(l, r, lit.positive);
          cur = mkClause(std::move(lits), cur.marked);
          again = true;
          break;
        }
        Truth tv = decideAtom(l, r, ctx, 0);
        if (tv != Truth::Unknown) {
          if ((tv == Truth::True) == lit.positive) {
            tautology = true;
            break;
          }
          std::vector<Literal> lits = cur.lits;
          lits.erase(lits.begin() + static_cast<std::ptrdiff_t>(i));
          cur = mkClause(std::move(lits), cur.marked);
          again = true;
          break;
        }
        bool lctor = !l.isVar && sig.sym(l.head).kind == SymKind::Constructor;
        bool rctor = !r.isVar && sig.sym(r.head).kind == SymKind::Constructor;
        if (lctor && rctor && l.head == r.head && !l.args.empty()) {
          std::vector<Literal> lits = cur.lits;
          if (!lit.positive) {
            std::vector<Literal> comps;
            for (std::size_t k = 0; k < l.args.size(); ++k)
              comps.push_back(mkLiteral(l.args[k], r.args[k], false));
            lits.erase(lits.begin() + static_cast<std::ptrdiff_t>(i));
            lits.insert(lits.begin() + static_cast<std::ptrdiff_t>(i),
                        comps.begin(), comps.end());
            cur = mkClause(std::move(lits), cur.marked);
            again = true;
            break;
          }
          if (l.args.size() == 1) {
            lits[i] = mkLiteral(l.args[0], r.args[0], true);
            cur = mkClause(std::move(lits), cur.marked);
            again = true;
            break;
          }
          // A positive constructor equation is a conjunction of component
          // equations: one branch clause per component.
          for (std::size_t k = 0; k < l.args.size(); ++k) {
            std::vector<Literal> branch = cur.lits;
            branch[i] = mkLiteral(l.args[k], r.args[k], true);
            work.push_back(mkClause(std::move(branch), cur.marked));
          }
          consumed = true;
          break;
        }
      }
      if (tautology || consumed) break;
      if (cur.lits.empty()) {
        res.refuted = true;
        return res;
      }
      if (again) continue;
      std::vector<Clause> branches;
      if (trySplitUnfold(cur, branches)) {
        for (Clause& b : branches) work.push_back(std::move(b));
        consumed = true;
        break;
      }
      // Solved variable: a negated equation whose variable side does not
      // occur in the other side substitutes through and disappears.
      for (std::size_t i = 0; i < cur.lits.size() && !again; ++i) {
        const Literal& lit = cur.lits[i];
        if (lit.positive) continue;
        Term v, other;
        if (lit.lhs.isVar && !occursIn(lit.lhs, lit.rhs)) {
          v = lit.lhs;
          other = lit.rhs;
        } else if (lit.rhs.isVar && !occursIn(lit.rhs, lit.lhs)) {
          v = lit.rhs;
          other = lit.lhs;
        } else {
          continue;
        }
        std::vector<Literal> lits;
        for (std::size_t j = 0; j < cur.lits.size(); ++j) {
          if (j == i) continue;
          Literal nl = cur.lits[j];
          lits.push_back(mkLiteral(replaceAll(nl.lhs, v, other),
                                   replaceAll(nl.rhs, v, other), nl.positive));
        }
        cur = mkClause(std::move(lits), cur.marked);
        again = true;
      }
      if (again) continue;
      if (tryVarSplit(cur, branches)) {
        for (Clause& b : branches) work.push_back(std::move(b));
        consumed = true;
        break;
      }
    }
    if (tautology || consumed) continue;
    if (cur.lits.empty()) {
      res.refuted = true;
      return res;
    }
    if (std::find(outs.begin(), outs.end(), cur) == outs.end())
      outs.push_back(std::move(cur));
  }
  res.discharged = outs.empty();
  res.changed = res.discharged || outs.size() != 1 || !(outs[0] == c);
  res.clauses = std::move(outs);
  return res;
}

StageResult Prover::eliminateDestructors(const Clause& c) {
  const Signature& sig = th_.sig();
  StageResult res;
  Clause cur = c;
  bool applied = false;
  std::set<Term> introduced;
  while (true) {
    const EliminationLemma* lemma = nullptr;
    Subst theta;
    for (const EliminationLemma& L : th_.eliminationLemmas()) {
      for (const auto& [pos, sub] : clausePositions(cur)) {
        (void)pos;
        std::optional<Subst> m = matchTerm(L.pairs[0].second, *sub);
        if (!m) continue;
        // Lemma variables must land on distinct unmarked clause variables.
        std::set<StrId> image;
        bool varsOk = true;
        for (const auto& [v, t] : m->map) {
          (void)v;
          varsOk = varsOk && t.isVar && cur.marked.count(t.head) == 0 &&
                   image.insert(t.head).second;
        }
        if (!varsOk) continue;
        bool present = true;
        for (const std::pair<StrId, Term>& pr : L.pairs)
          present = present &&
                    subtermOfClause(applySubst(*m, pr.second), cur);
        for (const Literal& mid : L.middles) {
          Literal inst = applySubst(*m, mid);
          present = present && std::find(cur.lits.begin(), cur.lits.end(),
                                         inst) != cur.lits.end();
        }
        if (!present) continue;
        if (applied) {
          bool fresh = true;
          for (const std::pair<StrId, Term>& pr : L.pairs)
            fresh = fresh && introduced.count(applySubst(*m, pr.second)) != 0;
          if (!fresh) continue;
        }
        lemma = &L;
        theta = *m;
        break;
      }
      if (lemma) break;
    }
    if (!lemma) break;
    std::set<Term> before;
    for (const auto& [pos, sub] : clausePositions(cur)) {
      (void)pos;
      before.insert(*sub);
    }
    std::set<std::string> used = clauseVarNames(cur, sig);
    Subst full = theta;
    std::vector<StrId> freshVars;
    for (const std::pair<StrId, Term>& pr : lemma->pairs) {
      std::string name = freshNumberedName("v", used);
      StrId id = th_.sig().vars().intern(name);
      freshVars.push_back(id);
      Term fv = mkVar(id, pr.second.sort);
      cur = replaceAll(cur, applySubst(theta, pr.second), fv);
      full.bind(pr.first, fv);
    }
    Term head = applySubst(theta, lemma->headVar);
    cur = replaceAll(cur, head, applySubst(full, lemma->ctorTerm));
    for (StrId f : freshVars) cur.marked.insert(f);
    cur = mkClause(cur.lits, cur.marked);
    for (const auto& [pos, sub] : clausePositions(cur)) {
      (void)pos;
      if (before.count(*sub) == 0) introduced.insert(*sub);
    }
    applied = true;
  }
  res.changed = applied;
  if (applied) res.clauses.push_back(std::move(cur));
  return res;
}

StageResult Prover::crossFertilize(const Clause& c) {
  const Signature& sig = th_.sig();
  StageResult res;
  for (std::size_t hi = 0; hi < c.lits.size(); ++hi) {
    if (c.lits[hi].positive) continue;
    for (std::size_t ci = 0; ci < c.lits.size(); ++ci) {
      if (!c.lits[ci].positive) continue;
      const Term sides[2] = {c.lits[hi].lhs, c.lits[hi].rhs};
      for (int si = 0; si < 2; ++si) {
        const Term& src = sides[si];
        const Term& other = sides[1 - si];
        if (src.isVar || constructorGround(src, sig)) continue;
        bool inL = occursIn(src, c.lits[ci].lhs);
        bool inR = occursIn(src, c.lits[ci].rhs);
        for (int target = 0; target < 2; ++target) {
          bool hit = target == 0 ? inL && !inR : inR && !inL;
          if (!hit) continue;
          Term nl = target == 0 ? replaceAll(c.lits[ci].lhs, src, other)
                                : c.lits[ci].lhs;
          Term nr = target == 1 ? replaceAll(c.lits[ci].rhs, src, other)
                                : c.lits[ci].rhs;
          std::vector<Literal> lits;
          for (std::size_t j = 0; j < c.lits.size(); ++j) {
            if (j == hi) continue;  // the used-up hypothesis disappears
            lits.push_back(j == ci ? mkLiteral(nl, nr, true) : c.lits[j]);
          }
          res.changed = true;
          res.clauses.push_back(mkClause(std::move(lits), c.marked));
          return res;
        }
      }
    }
  }
  return res;
}

StageResult Prover::generalize(const Clause& c) {
  const Signature& sig = th_.sig();
  StageResult res;
  Clause cur = c;
  std::set<SymId> destrHeads;
  for (const EliminationLemma& L : th_.eliminationLemmas())
    for (const std::pair<StrId, Term>& pr : L.pairs)
      destrHeads.insert(pr.second.head);
  bool changed = false;
  while (true) {
    struct Occ {
      std::vector<std::pair<std::size_t, int>> where;  // literal, side
      Position first;
      bool properOnly = true;
    };
    std::map<Term, Occ> occs;
    for (const auto& [pos, sub] : clausePositions(cur)) {
      if (sub->isVar) continue;
      Occ& o = occs[*sub];
      if (o.where.empty()) o.first = pos;
      o.where.emplace_back(static_cast<std::size_t>(pos[0]) - 1, pos[1]);
      o.properOnly = o.properOnly && pos.size() > 2;
    }
    std::vector<std::pair<Position, Term>> cands;
    for (const auto& [t, o] : occs) {
      if (o.where.size() < 2 || !o.properOnly) continue;
      if (sig.sym(t.head).kind == SymKind::Constructor) continue;
      if (th_.isDestructor(t.head) || destrHeads.count(t.head)) continue;
      bool crossSide = false, crossPolarity = false;
      for (const auto& [li, side] : o.where)
        for (const auto& [lj, sj] : o.where) {
          crossSide = crossSide ||
                      (li == lj && side != sj && cur.lits[li].positive);
          crossPolarity = crossPolarity || cur.lits[li].positive !=
                                               cur.lits[lj].positive;
        }
      if (crossSide || crossPolarity) cands.emplace_back(o.first, t);
    }
    if (cands.empty()) break;
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const Term* pick = nullptr;
    for (const auto& [pos, t] : cands) {
      (void)pos;
      bool minimal = true;
      for (const auto& [pos2, t2] : cands) {
        (void)pos2;
        minimal = minimal && (t2 == t || !occursIn(t2, t));
      }
      if (minimal) {
        pick = &t;
        break;
      }
    }
    if (!pick) break;
    std::set<std::string> used = clauseVarNames(cur, sig);
    StrId z = th_.sig().vars().intern(freshNumberedName("z", used));
    Term zv = mkVar(z, pick->sort);
    // Tagged generalization lemmas restrict the fresh variable: any lemma
    // subterm matching the candidate adds its instance as a hypothesis.
    std::vector<Literal> extra;
    for (const Lemma& gl : th_.generalizationLemmas()) {
      const Literal& unit = gl.clause.lits[0];
      std::set<StrId> lemmaVars;
      collectVars(unit.lhs, lemmaVars);
      collectVars(unit.rhs, lemmaVars);
      std::optional<Subst> m;
      std::function<void(const Term&)> scan = [&](const Term& s) {
        if (m || s.isVar) return;
        std::optional<Subst> trial = matchTerm(s, *pick);
        if (trial) {
          bool total = true;
          for (StrId v : lemmaVars) total = total && trial->bound(v);
          if (total) {
            m = trial;
            return;
          }
        }
        for (const Term& a : s.args) scan(a);
      };
      scan(unit.lhs);
      scan(unit.rhs);
      if (!m) continue;
      Literal inst = applySubst(*m, unit);
      extra.push_back(negated(mkLiteral(replaceAll(inst.lhs, *pick, zv),
                                        replaceAll(inst.rhs, *pick, zv),
                                        inst.positive)));
    }
    Clause next = replaceAll(cur, *pick, zv);
    std::vector<Literal> lits = next.lits;
    lits.insert(lits.end(), extra.begin(), extra.end());
    cur = mkClause(std::move(lits), cur.marked);
    changed = true;
  }
  res.changed = changed;
  if (changed) res.clauses.push_back(std::move(cur));
  return res;
}

StageResult Prover::eliminateIrrelevance(const Clause& c) {
  const Signature& sig = th_.sig();
  StageResult res;
  std::size_t n = c.lits.size();
  std::vector<std::size_t> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return comp[x] == x ? x : comp[x] = find(comp[x]);
  };
  std::vector<std::set<StrId>> lv(n);
  for (std::size_t i = 0; i < n; ++i) {
    collectVars(c.lits[i].lhs, lv[i]);
    collectVars(c.lits[i].rhs, lv[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      bool share = false;
      for (StrId v : lv[i]) share = share || lv[j].count(v) != 0;
      if (share) comp[find(i)] = find(j);
    }
  std::map<std::size_t, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) classes[find(i)].push_back(i);
  auto recursiveOnVars = [&](const Term& a, const Term& b) {
    if (a.isVar) return false;
    const FunctionDef* d = th_.def(a.head);
    if (!d || !d->recursive) return false;
    std::set<StrId> seen;
    for (const Term& arg : a.args)
      if (!arg.isVar || !seen.insert(arg.head).second) return false;
    if (!b.isVar)
      return b.head == sig.trueSym() || b.head == sig.falseSym();
    return seen.count(b.head) == 0;
  };
  std::set<std::size_t> dropped;
  for (const auto& [root, members] : classes) {
    (void)root;
    bool recursive = false;
    for (std::size_t i : members)
      recursive = recursive || mentionsRecursive(c.lits[i].lhs, th_) ||
                  mentionsRecursive(c.lits[i].rhs, th_);
    bool irrelevant = !recursive;
    if (!irrelevant && members.size() == 1) {
      const Literal& l = c.lits[members[0]];
      irrelevant = recursiveOnVars(l.lhs, l.rhs) ||
                   recursiveOnVars(l.rhs, l.lhs);
    }
    if (irrelevant)
      for (std::size_t i : members) dropped.insert(i);
  }
  if (dropped.size() == n) {
    res.allIrrelevant = true;
    return res;
  }
  if (dropped.empty()) return res;
  std::vector<Literal> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (dropped.count(i) == 0) keep.push_back(c.lits[i]);
  res.changed = true;
  res.clauses.push_back(mkClause(std::move(keep), c.marked));
  return res;
}

std::optional<std::vector<Clause>> Prover::induct(
    const Clause& c, ProofTrace::Node* node, std::vector<std::string>* dump) {
  const Signature& sig = th_.sig();
  Clause bare = c;
  bare.marked.clear();
  SchemeBuilder sb(th_, bare, SchemeOptions{opt_.dropInjectivity});
  std::vector<InductionScheme> all = sb.buildAll();
  if (all.empty()) return std::nullopt;
  std::vector<InductionScheme> kept =
      sb.filterFlawed(sb.mergingPhase(sb.subsumptionPhase(all)));
  const InductionScheme* sel = SchemeBuilder::select(kept);
  if (!sel) return std::nullopt;
  if (dump) {
    for (const InductionScheme& s : all) {
      std::string block = showScheme(s, sig);
      std::size_t start = 0;
      while (start <= block.size()) {
        std::size_t nl = block.find('\n', start);
        if (nl == std::string::npos) {
          dump->push_back(block.substr(start));
          break;
        }
        dump->push_back(block.substr(start, nl - start));
        start = nl + 1;
      }
    }
    for (const std::string& line : sb.log()) dump->push_back(line);
    dump->push_back("selected: s" + std::to_string(sel->id) +
                    " template=" + sig.sym(sel->fn).name + "/" +
                    std::to_string(sel->tpl) +
                    " positions=" + showPositions(sel->positions) +
                    " hitting=" + showRational(sel->hitting));
  }
  std::vector<Clause> outs =
      sb.instantiate(*sel, [this](const Clause& k) { return closes(k); });
  if (node) {
    node->scheme = *sel;
    node->schemeSummary = "scheme positions=" + showPositions(sel->positions) +
                          " hitting=" + showRational(sel->hitting);
  }
  return outs;
}

bool Prover::closes(const Clause& c) { return simplify(c).discharged; }

ProofResult Prover::prove(const Clause& goal) {
  ProofResult R;
  R.trace.nodes.push_back(ProofTrace::Node{goal, "", "", "", {}, {}, 0});
  std::deque<std::pair<Clause, std::size_t>> pool;
  pool.emplace_back(goal, 0);
  std::size_t passes = 0;
  bool dumped = false;
  auto fail = [&](std::size_t ni, const std::string& reason) {
    R.trace.nodes[ni].outcome = "FAILED: " + reason;
    R.proved = false;
    R.reason = reason;
    return R;
  };
  struct Stage {
    const char* name;
    StageResult (Prover::*fn)(const Clause&);
  };
  static constexpr Stage stages[] = {
      {"simplify", &Prover::simplify},
      {"destructor-elim", &Prover::eliminateDestructors},
      {"fertilize", &Prover::crossFertilize},
      {"generalize", &Prover::generalize},
      {"irrelevance", &Prover::eliminateIrrelevance},
  };
  while (!pool.empty()) {
    auto [cur, ni] = pool.front();
    pool.pop_front();
    bool consumed = false;
    for (const Stage& st : stages) {
      if (++passes > opt_.maxStagePasses) {
        R.trace.nodes[ni].stage = st.name;
        return fail(ni, "stage pass budget exhausted");
      }
      StageResult sr = (this->*st.fn)(cur);
      if (sr.refuted) {
        R.trace.nodes[ni].stage = st.name;
        return fail(ni, "clause refuted (empty disjunction)");
      }
      if (sr.allIrrelevant) {
        R.trace.nodes[ni].stage = st.name;
        return fail(ni, "all literal classes irrelevant");
      }
      if (sr.discharged) {
        R.trace.nodes[ni].stage = st.name;
        R.trace.nodes[ni].outcome = "⊤";
        consumed = true;
        break;
      }
      if (sr.changed) {
        R.trace.nodes[ni].stage = st.name;
        R.trace.nodes[ni].outcome =
            std::to_string(sr.clauses.size()) +
            (sr.clauses.size() == 1 ? " clause" : " clauses");
        for (const Clause& out : sr.clauses) {
          std::size_t child = R.trace.nodes.size();
          R.trace.nodes.push_back(ProofTrace::Node{
              out, "", "", "", {}, {}, R.trace.nodes[ni].depth + 1});
          R.trace.nodes[ni].children.push_back(child);
          pool.emplace_back(out, child);
        }
        consumed = true;
        break;
      }
    }
    if (consumed) continue;
    if (++passes > opt_.maxStagePasses) {
      R.trace.nodes[ni].stage = "induct";
      return fail(ni, "stage pass budget exhausted");
    }
    R.trace.nodes[ni].stage = "induct";
    if (R.inductions >= opt_.maxInductions)
      return fail(ni, "induction budget exhausted");
    ++R.inductions;
    std::optional<std::vector<Clause>> outs =
        induct(cur, &R.trace.nodes[ni], dumped ? nullptr : &R.schemeDump);
    dumped = true;
    if (!outs) return fail(ni, "no applicable induction scheme");
    R.trace.nodes[ni].outcome =
        std::to_string(outs->size()) +
        (outs->size() == 1 ? " clause" : " clauses");
    for (const Clause& out : *outs) {
      std::size_t child = R.trace.nodes.size();
      R.trace.nodes.push_back(ProofTrace::Node{
          out, "", "", "", {}, {}, R.trace.nodes[ni].depth + 1});
      R.trace.nodes[ni].children.push_back(child);
      pool.emplace_back(out, child);
    }
    if (opt_.stopAtFirstScheme) return fail(ni, "scheme analysis recorded");
  }
  R.proved = true;
  return R;
}

std::string renderTrace(const ProofResult& r, TraceLevel lvl,
                        const Signature& sig) {
  if (lvl == TraceLevel::None) return "";
  const ProofTrace& t = r.trace;
  std::string out;
  std::function<void(std::size_t)> walk = [&](std::size_t i) {
    const ProofTrace::Node& nd = t.nodes[i];
    if (lvl == TraceLevel::Full) {
      std::string pad(2 * nd.depth, ' ');
      if (nd.stage.empty())
        out += pad + "[pending] " + showClause(nd.clause, sig) + "\n";
      else
        out += pad + "[" + nd.stage + "] " + showClause(nd.clause, sig) +
               " ⇒ " + (nd.outcome.empty() ? "?" : nd.outcome) + "\n";
      if (!nd.schemeSummary.empty())
        out += pad + "  " + nd.schemeSummary + "\n";
    } else {
      if (nd.stage == "induct") {
        out += "induct: " + showClause(nd.clause, sig) + "\n";
        if (!nd.schemeSummary.empty()) out += "  " + nd.schemeSummary + "\n";
      } else if (nd.stage == "generalize" && !nd.children.empty()) {
        out += "generalize: " +
               showClause(t.nodes[nd.children[0]].clause, sig) + "\n";
      }
    }
    for (std::size_t ch : nd.children) walk(ch);
  };
  if (!t.nodes.empty()) walk(0);
  if (r.proved)
    out += "proved (" + std::to_string(r.inductions) +
           (r.inductions == 1 ? " induction)" : " inductions)") + "\n";
  else
    out += "FAILED: " + r.reason + "\n";
  return out;
}

}  // namespace prover

#include "prover/schemes.hpp"

#include <algorithm>
#include <numeric>

namespace prover {

namespace {

void collectVarSorts(const Term& t, std::map<StrId, SortId>& out) {
  if (t.isVar) {
    out.emplace(t.head, t.sort);
    return;
  }
  for (const Term& a : t.args) collectVarSorts(a, out);
}

void walkTerm(const Term& t, Position& prefix,
              std::vector<std::pair<Position, const Term*>>& out) {
  out.emplace_back(prefix, &t);
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    prefix.push_back(static_cast<int>(i + 1));
    walkTerm(t.args[i], prefix, out);
    prefix.pop_back();
  }
}

// Every subterm position of the clause, in lexicographic order.
std::vector<std::pair<Position, const Term*>> allPositions(const Clause& c) {
  std::vector<std::pair<Position, const Term*>> out;
  for (std::size_t li = 0; li < c.lits.size(); ++li) {
    Position p{static_cast<int>(li + 1), 1};
    walkTerm(c.lits[li].lhs, p, out);
    p.back() = 2;
    walkTerm(c.lits[li].rhs, p, out);
  }
  return out;
}

// Pattern shape with variables canonicalized away, for the rename cache key.
void shapeKey(const Term& t, int& counter, std::string& out) {
  if (t.isVar) {
    out += "_" + std::to_string(++counter);
    return;
  }
  out += std::to_string(t.head);
  if (t.args.empty()) return;
  out += "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ",";
    shapeKey(t.args[i], counter, out);
  }
  out += ")";
}

void patternVarsInOrder(const Term& t, std::vector<const Term*>& out) {
  if (t.isVar) {
    out.push_back(&t);
    return;
  }
  for (const Term& a : t.args) patternVarsInOrder(a, out);
}

// Assigns each left item a distinct (when injective) right item from its
// candidate list; backtracking, list sizes are tiny.
bool assign(const std::vector<std::vector<int>>& cand, bool injective,
            std::size_t i, std::vector<int>& pick, std::vector<bool>& used) {
  if (i == cand.size()) return true;
  for (int j : cand[i]) {
    if (injective && used[j]) continue;
    used[j] = true;
    pick[i] = j;
    if (assign(cand, injective, i + 1, pick, used)) return true;
    used[j] = false;
  }
  return false;
}

bool condSubset(const std::vector<Literal>& a, const std::vector<Literal>& b) {
  for (const Literal& l : a)
    if (std::find(b.begin(), b.end(), l) == b.end()) return false;
  return true;
}

bool xiAgree(const Subst& a, const Subst& b) {
  for (const auto& [v, t] : a.map) {
    const Term* o = b.lookup(v);
    if (o && !(*o == t)) return false;
  }
  return true;
}

bool isIdentity(StrId v, const Term& t) { return t.isVar && t.head == v; }

// mu maps into mu' pointwise: same domain membership, identities preserved,
// every image a subterm of the counterpart image.
bool hypEmbeds(const Subst& mu, const Subst& muP) {
  for (const auto& [v, t] : mu.map) {
    const Term* o = muP.lookup(v);
    if (!o) return false;
    if (isIdentity(v, t) && !isIdentity(v, *o)) return false;
    if (!occursIn(t, *o)) return false;
  }
  return true;
}

// x mu1 = x mu2 on the shared domain.
bool plainMergeable(const Subst& a, const Subst& b) {
  for (const auto& [v, t] : a.map) {
    const Term* o = b.lookup(v);
    if (o && !(*o == t)) return false;
  }
  return true;
}

// Plain mergeable and some shared variable actually moves.
bool nontrivMergeable(const Subst& a, const Subst& b) {
  if (!plainMergeable(a, b)) return false;
  for (const auto& [v, t] : a.map)
    if (b.lookup(v) && !isIdentity(v, t)) return true;
  return false;
}

using Branch = std::vector<Literal>;

// br AND NOT(cond) expanded to branches; a branch already containing the
// negation of some cond literal is disjoint as it stands.
std::vector<Branch> subtractCond(const std::vector<Branch>& branches,
                                 const std::vector<Literal>& cond) {
  std::vector<Branch> out;
  for (const Branch& br : branches) {
    bool disjoint = false;
    for (const Literal& l : cond)
      disjoint = disjoint ||
                 std::find(br.begin(), br.end(), negated(l)) != br.end();
    if (disjoint) {
      out.push_back(br);
      continue;
    }
    for (const Literal& l : cond) {
      if (std::find(br.begin(), br.end(), l) != br.end()) continue;
      Branch nb = br;
      nb.push_back(negated(l));
      out.push_back(std::move(nb));
    }
  }
  // Subset-minimize and dedupe, keeping first occurrences.
  std::vector<Branch> minimal;
  for (const Branch& br : out) {
    bool drop = false;
    for (const Branch& m : minimal) drop = drop || condSubset(m, br);
    for (const Branch& other : out)
      if (!drop && &other != &br && other.size() < br.size() &&
          condSubset(other, br))
        drop = true;
    if (!drop) minimal.push_back(br);
  }
  return minimal;
}

std::string showPositions(const std::vector<Position>& ps) {
  std::string out = "{";
  for (std::size_t i = 0; i < ps.size(); ++i)
    out += (i ? "," : "") + showPosition(ps[i]);
  return out + "}";
}

std::string showVarSet(const std::set<StrId>& vs, const Signature& sig) {
  std::vector<std::string> names;
  for (StrId v : vs) names.push_back(sig.vars().name(v));
  std::sort(names.begin(), names.end());
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i)
    out += (i ? "," : "") + names[i];
  return out + "}";
}

std::string showSubstByName(const Subst& s, const Signature& sig) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& [v, t] : s.map)
    items.emplace_back(sig.vars().name(v), showTerm(t, sig));
  std::sort(items.begin(), items.end());
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i)
    out += (i ? ", " : "") + items[i].first + " -> " + items[i].second;
  return out + "}";
}

std::string showCond(const std::vector<Literal>& cond, const Signature& sig) {
  std::string out = "{";
  for (std::size_t i = 0; i < cond.size(); ++i)
    out += (i ? ", " : "") + showLiteral(cond[i], sig);
  return out + "}";
}

}  // namespace

Rational ratAdd(const Rational& a, const Rational& b) {
  Rational r{a.num * b.den + b.num * a.den, a.den * b.den};
  long long g = std::gcd(r.num, r.den);
  if (g > 1) {
    r.num /= g;
    r.den /= g;
  }
  return r;
}

bool ratLess(const Rational& a, const Rational& b) {
  return a.num * b.den < b.num * a.den;
}

std::string showRational(const Rational& r) {
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

SchemeBuilder::SchemeBuilder(Theory& th, const Clause& goal, SchemeOptions opt)
    : th_(th), goal_(goal), opt_(opt) {
  for (const Literal& l : goal_.lits) {
    collectVarSorts(l.lhs, varSorts_);
    collectVarSorts(l.rhs, varSorts_);
  }
  for (const auto& [v, s] : varSorts_) usedNames_.insert(th_.sig().vars().name(v));
}

Term SchemeBuilder::freshPattern(StrId var, const Term& pattern) {
  int counter = 0;
  std::string key;
  shapeKey(pattern, counter, key);
  auto it = renameCache_.find({var, key});
  if (it != renameCache_.end()) return it->second;

  std::vector<const Term*> pvars;
  patternVarsInOrder(pattern, pvars);
  const std::string& base = th_.sig().vars().name(var);
  Subst ren;
  for (std::size_t i = 0; i < pvars.size(); ++i) {
    std::string cand = pvars.size() == 1
                           ? base + "'"
                           : base + std::to_string(i + 1) + "'";
    while (usedNames_.count(cand)) cand += "'";
    usedNames_.insert(cand);
    StrId id = th_.sig().vars().intern(cand);
    varSorts_.emplace(id, pvars[i]->sort);
    ren.bind(pvars[i]->head, mkVar(id, pvars[i]->sort));
  }
  Term out = applySubst(ren, pattern);
  renameCache_.emplace(std::make_pair(var, key), out);
  return out;
}

std::optional<SchemeBuilder::TripleSubsts> SchemeBuilder::tripleSubsts(
    const InductionTemplate& t, const TemplateTriple& tr, const Term& occ) {
  Subst xi;
  for (std::size_t i = 0; i < occ.args.size(); ++i) {
    const Term& p = tr.lhs.args[i];
    const Term& a = occ.args[i];
    if (!p.isVar && a.isVar) {
      Term pat = freshPattern(a.head, p);
      if (!xi.bind(a.head, pat)) return std::nullopt;
    }
  }
  // The instantiation must leave unchangeable-position variables alone.
  for (int pos : t.unchangeable)
    for (StrId v : vars(occ.args[pos - 1]))
      if (xi.bound(v)) return std::nullopt;
  Subst sigma;
  if (!matchInto(tr.lhs, applySubst(xi, occ), sigma)) return std::nullopt;
  return TripleSubsts{std::move(xi), std::move(sigma)};
}

bool SchemeBuilder::applicable(const InductionTemplate& t,
                               const Position& occ) {
  const Term* o = subtermAt(goal_, occ);
  if (!o || o->isVar || o->head != t.fn) return false;
  std::set<StrId> cvars;
  for (int p : t.changeable) {
    const Term& a = o->args[p - 1];
    if (!a.isVar) return false;
    if (goal_.marked.count(a.head)) return false;
    if (!cvars.insert(a.head).second) return false;
  }
  for (int p : t.unchangeable)
    for (StrId v : vars(o->args[p - 1]))
      if (cvars.count(v)) return false;
  for (const TemplateTriple& tr : t.triples)
    if (!tripleSubsts(t, tr, *o)) return false;
  return true;
}

std::optional<InductionScheme> SchemeBuilder::buildScheme(
    const InductionTemplate& t, const Position& occ) {
  if (!applicable(t, occ)) return std::nullopt;
  const Term& o = *subtermAt(goal_, occ);
  int arity = static_cast<int>(o.args.size());

  std::set<StrId> domain;
  for (const Term& a : o.args) collectVars(a, domain);
  std::vector<int> unmeasured;
  for (int i = 1; i <= arity; ++i)
    if (!t.measured.count(i)) unmeasured.push_back(i);

  struct BuiltCase {
    Subst xi;
    std::vector<Subst> hyps;
    std::vector<int> sat;
    std::vector<Literal> cond;
  };
  std::vector<BuiltCase> built;
  for (const TemplateTriple& tr : t.triples) {
    auto ts = tripleSubsts(t, tr, o);
    BuiltCase bc;
    bc.xi = ts->xi;
    for (const Literal& c : tr.caseCond)
      bc.cond.push_back(applySubst(ts->sigma, c));
    for (const Term& call : tr.calls) {
      Subst mu;
      int sat = 0;
      for (int i : t.measured) {
        Term target = applySubst(ts->sigma, call.args[i - 1]);
        if (!matchInto(o.args[i - 1], target, mu)) return std::nullopt;
        ++sat;
      }
      for (int i : unmeasured) {
        Term target = applySubst(ts->sigma, call.args[i - 1]);
        Subst trial = mu;
        if (matchInto(o.args[i - 1], target, trial)) {
          mu = std::move(trial);
          ++sat;
        }
      }
      for (StrId v : domain)
        if (!mu.bound(v)) mu.bind(v, mkVar(v, varSorts_.at(v)));
      bc.hyps.push_back(std::move(mu));
      bc.sat.push_back(sat);
    }
    built.push_back(std::move(bc));
  }

  // Normalized form: cases equal in instantiation and condition pool hyps.
  std::vector<BuiltCase> norm;
  for (BuiltCase& bc : built) {
    BuiltCase* home = nullptr;
    for (BuiltCase& n : norm)
      if (n.xi == bc.xi && n.cond == bc.cond) {
        home = &n;
        break;
      }
    if (!home) {
      norm.push_back(std::move(bc));
      continue;
    }
    for (std::size_t k = 0; k < bc.hyps.size(); ++k) {
      bool dup = false;
      for (std::size_t h = 0; h < home->hyps.size(); ++h)
        if (home->hyps[h] == bc.hyps[k]) {
          home->sat[h] = std::max(home->sat[h], bc.sat[k]);
          dup = true;
          break;
        }
      if (!dup) {
        home->hyps.push_back(std::move(bc.hyps[k]));
        home->sat.push_back(bc.sat[k]);
      }
    }
  }

  InductionScheme s;
  s.id = nextId_++;
  s.fn = t.fn;
  const FunctionDef* def = th_.def(t.fn);
  s.tpl = 1;
  if (def)
    for (std::size_t i = 0; i < def->templates.size(); ++i)
      if (def->templates[i].weight == t.weight)
        s.tpl = static_cast<int>(i + 1);
  s.domain = std::move(domain);
  s.positions = {occ};
  for (int p : t.changeable) s.inductionVars.insert(o.args[p - 1].head);
  long long num = 0, hyps = 0;
  for (const BuiltCase& n : norm) {
    for (int v : n.sat) num += v;
    hyps += static_cast<long long>(n.hyps.size());
  }
  s.hitting = Rational{num, hyps * arity};
  for (BuiltCase& n : norm)
    s.cases.push_back(SchemeCase{std::move(n.xi), std::move(n.hyps),
                                 std::move(n.cond)});
  return s;
}

std::vector<InductionScheme> SchemeBuilder::buildAll() {
  std::vector<InductionScheme> out;
  for (const auto& [pos, term] : allPositions(goal_)) {
    if (term->isVar || !term->args.size()) continue;
    const FunctionDef* def = th_.def(term->head);
    if (!def) continue;
    for (const InductionTemplate& t : def->templates) {
      auto s = buildScheme(t, pos);
      if (s) out.push_back(std::move(*s));
    }
  }
  return out;
}

bool SchemeBuilder::subsumes(const InductionScheme& a,
                             const InductionScheme& b) const {
  std::vector<std::vector<int>> cand(a.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    const SchemeCase& ac = a.cases[i];
    for (std::size_t j = 0; j < b.cases.size(); ++j) {
      const SchemeCase& bc = b.cases[j];
      if (!condSubset(ac.cond, bc.cond)) continue;
      if (!xiAgree(ac.xi, bc.xi)) continue;
      // Injective embedding of the hypotheses, unless waived.
      std::vector<std::vector<int>> hc(ac.hyps.size());
      for (std::size_t x = 0; x < ac.hyps.size(); ++x)
        for (std::size_t y = 0; y < bc.hyps.size(); ++y)
          if (hypEmbeds(ac.hyps[x], bc.hyps[y]))
            hc[x].push_back(static_cast<int>(y));
      std::vector<int> pick(ac.hyps.size());
      std::vector<bool> used(bc.hyps.size(), false);
      if (assign(hc, !opt_.dropInjectivity, 0, pick, used))
        cand[i].push_back(static_cast<int>(j));
    }
  }
  std::vector<int> pick(a.cases.size());
  std::vector<bool> used(b.cases.size(), false);
  return assign(cand, true, 0, pick, used);
}

void SchemeBuilder::absorb(InductionScheme& survivor,
                           const InductionScheme& food) {
  survivor.hitting = ratAdd(survivor.hitting, food.hitting);
  for (const Position& p : food.positions) {
    if (std::find(survivor.positions.begin(), survivor.positions.end(), p) ==
        survivor.positions.end())
      survivor.positions.push_back(p);
  }
  std::sort(survivor.positions.begin(), survivor.positions.end());
  survivor.inductionVars.insert(food.inductionVars.begin(),
                                food.inductionVars.end());
}

std::optional<InductionScheme> SchemeBuilder::merge(const InductionScheme& a,
                                                    const InductionScheme& b) {
  std::vector<std::vector<int>> cand(a.cases.size());
  for (std::size_t i = 0; i < a.cases.size(); ++i) {
    for (std::size_t j = 0; j < b.cases.size(); ++j) {
      if (!xiAgree(a.cases[i].xi, b.cases[j].xi)) continue;
      bool any = false;
      for (const Subst& m1 : a.cases[i].hyps)
        for (const Subst& m2 : b.cases[j].hyps)
          any = any || nontrivMergeable(m1, m2);
      if (any) cand[i].push_back(static_cast<int>(j));
    }
  }
  std::vector<int> pick(a.cases.size());
  std::vector<bool> used(b.cases.size(), false);
  if (!assign(cand, !opt_.dropInjectivity, 0, pick, used)) return std::nullopt;

  InductionScheme m;
  m.id = nextId_++;
  m.fn = b.fn;
  m.tpl = b.tpl;
  m.domain = a.domain;
  m.domain.insert(b.domain.begin(), b.domain.end());
  m.positions = a.positions;
  for (const Position& p : b.positions)
    if (std::find(m.positions.begin(), m.positions.end(), p) ==
        m.positions.end())
      m.positions.push_back(p);
  std::sort(m.positions.begin(), m.positions.end());
  m.inductionVars = a.inductionVars;
  m.inductionVars.insert(b.inductionVars.begin(), b.inductionVars.end());
  m.hitting = ratAdd(a.hitting, b.hitting);

  auto pad = [&](Subst s) {
    for (StrId v : m.domain)
      if (!s.bound(v)) s.bind(v, mkVar(v, varSorts_.at(v)));
    return s;
  };

  // The later scheme's cases are the backbone; matched earlier cases fold in,
  // unmatched later cases are carried over padded.
  for (std::size_t j = 0; j < b.cases.size(); ++j) {
    const SchemeCase& bc = b.cases[j];
    std::vector<std::size_t> sources;
    for (std::size_t i = 0; i < a.cases.size(); ++i)
      if (pick[i] == static_cast<int>(j)) sources.push_back(i);
    SchemeCase out;
    out.xi = bc.xi;
    out.cond = bc.cond;
    if (sources.empty()) {
      for (const Subst& mu : bc.hyps) out.hyps.push_back(pad(mu));
      m.cases.push_back(std::move(out));
      continue;
    }
    std::vector<Subst> a1;
    std::vector<Literal> acond;
    for (std::size_t i : sources) {
      for (const auto& [v, t] : a.cases[i].xi.map) out.xi.bind(v, t);
      for (const Subst& mu : a.cases[i].hyps) a1.push_back(mu);
      for (const Literal& l : a.cases[i].cond)
        if (std::find(acond.begin(), acond.end(), l) == acond.end())
          acond.push_back(l);
    }
    // Condition: the earlier case's literals first, then the new ones.
    std::vector<Literal> cond = acond;
    for (const Literal& l : bc.cond)
      if (std::find(cond.begin(), cond.end(), l) == cond.end())
        cond.push_back(l);
    out.cond = std::move(cond);
    std::vector<bool> matched(bc.hyps.size(), false);
    for (const Subst& m1 : a1)
      for (std::size_t y = 0; y < bc.hyps.size(); ++y)
        if (plainMergeable(m1, bc.hyps[y])) {
          matched[y] = true;
          Subst u = m1;
          for (const auto& [v, t] : bc.hyps[y].map) u.bind(v, t);
          u = pad(std::move(u));
          bool dup = false;
          for (const Subst& h : out.hyps) dup = dup || h == u;
          if (!dup) out.hyps.push_back(std::move(u));
        }
    for (std::size_t y = 0; y < bc.hyps.size(); ++y)
      if (!matched[y]) {
        Subst u = pad(bc.hyps[y]);
        bool dup = false;
        for (const Subst& h : out.hyps) dup = dup || h == u;
        if (!dup) out.hyps.push_back(std::move(u));
      }
    m.cases.push_back(std::move(out));
  }
  return m;
}

std::vector<InductionScheme> SchemeBuilder::subsumptionPhase(
    std::vector<InductionScheme> s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < s.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < s.size() && !changed; ++j) {
        // On mutual subsumption the earlier scheme survives.
        if (subsumes(s[j], s[i])) {
          absorb(s[i], s[j]);
          log_.push_back("subsume: s" + std::to_string(s[j].id) + " into s" +
                         std::to_string(s[i].id) + " -> positions=" +
                         showPositions(s[i].positions) +
                         " hitting=" + showRational(s[i].hitting));
          s.erase(s.begin() + static_cast<long>(j));
          changed = true;
        } else if (subsumes(s[i], s[j])) {
          absorb(s[j], s[i]);
          log_.push_back("subsume: s" + std::to_string(s[i].id) + " into s" +
                         std::to_string(s[j].id) + " -> positions=" +
                         showPositions(s[j].positions) +
                         " hitting=" + showRational(s[j].hitting));
          s.erase(s.begin() + static_cast<long>(i));
          changed = true;
        }
      }
    }
  }
  return s;
}

std::vector<InductionScheme> SchemeBuilder::mergingPhase(
    std::vector<InductionScheme> s) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < s.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < s.size() && !changed; ++j) {
        auto m = merge(s[i], s[j]);
        if (!m) continue;
        log_.push_back("merge: s" + std::to_string(s[i].id) + " + s" +
                       std::to_string(s[j].id) + " -> s" +
                       std::to_string(m->id) + " positions=" +
                       showPositions(m->positions) +
                       " hitting=" + showRational(m->hitting));
        s.erase(s.begin() + static_cast<long>(j));
        s.erase(s.begin() + static_cast<long>(i));
        s.push_back(std::move(*m));
        changed = true;
      }
    }
  }
  return s;
}

std::vector<InductionScheme> SchemeBuilder::filterFlawed(
    std::vector<InductionScheme> s) {
  std::vector<bool> flawed(s.size(), false);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      for (StrId v : s[i].inductionVars)
        if (s[j].domain.count(v)) flawed[i] = true;
    }
  bool all = true;
  for (bool f : flawed) all = all && f;
  if (all && !s.empty()) {
    if (flawed[0]) log_.push_back("flawed: all candidates flawed, keeping all");
    return s;
  }
  std::vector<InductionScheme> kept;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (flawed[i])
      log_.push_back("flawed: s" + std::to_string(s[i].id) + " dropped");
    else
      kept.push_back(std::move(s[i]));
  }
  return kept;
}

const InductionScheme* SchemeBuilder::select(
    const std::vector<InductionScheme>& s) {
  const InductionScheme* best = nullptr;
  for (const InductionScheme& c : s) {
    if (!best) {
      best = &c;
      continue;
    }
    if (ratLess(best->hitting, c.hitting)) {
      best = &c;
    } else if (!ratLess(c.hitting, best->hitting)) {
      if (c.positions.size() > best->positions.size() ||
          (c.positions.size() == best->positions.size() && c.id < best->id))
        best = &c;
    }
  }
  return best;
}

std::vector<Clause> SchemeBuilder::instantiate(
    const InductionScheme& s, const std::function<bool(const Clause&)>& closes) {
  lastCases_.clear();
  std::vector<Clause> bases, steps;

  // Effective conditions: process larger conditions first, subtracting each
  // from the rest so the emitted cases are pairwise disjoint. Cases whose
  // instantiations already conflict are disjoint as they stand, so only
  // compatible instantiations take part.
  std::vector<std::size_t> order(s.cases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return s.cases[a].cond.size() > s.cases[b].cond.size();
                   });
  std::vector<std::vector<Branch>> effective(s.cases.size());
  std::vector<std::size_t> earlier;
  for (std::size_t idx : order) {
    std::vector<Branch> branches{s.cases[idx].cond};
    for (std::size_t e : earlier)
      if (xiAgree(s.cases[e].xi, s.cases[idx].xi))
        branches = subtractCond(branches, s.cases[e].cond);
    effective[idx] = std::move(branches);
    earlier.push_back(idx);
  }

  bool anyXi = false;
  for (const SchemeCase& c : s.cases) anyXi = anyXi || !c.xi.map.empty();

  if (!anyXi) {
    // The instantiations leave the goal alone; the bases complete the
    // condition case analysis.
    std::vector<Branch> branches{Branch{}};
    for (const SchemeCase& c : s.cases)
      branches = subtractCond(branches, c.cond);
    for (const Branch& d : branches) {
      std::vector<Literal> lits = goal_.lits;
      for (const Literal& l : d) lits.push_back(negated(l));
      bases.push_back(mkClause(std::move(lits)));
      lastCases_.push_back(CaseShape{true, Subst{}, d});
    }
  } else {
    // Base-variable completion: a variable every case instantiates with a
    // constructor, some constructor of its sort left uncovered.
    std::vector<StrId> varOrder;
    for (const auto& [pos, term] : allPositions(goal_))
      if (term->isVar &&
          std::find(varOrder.begin(), varOrder.end(), term->head) ==
              varOrder.end())
        varOrder.push_back(term->head);
    struct Candidate {
      StrId v;
      std::vector<SymId> missing;
    };
    std::vector<Candidate> cands;
    for (StrId v : varOrder) {
      bool everywhere = true;
      std::set<SymId> heads;
      for (const SchemeCase& c : s.cases) {
        const Term* t = c.xi.lookup(v);
        if (!t || t->isVar ||
            th_.sig().sym(t->head).kind != SymKind::Constructor) {
          everywhere = false;
          break;
        }
        heads.insert(t->head);
      }
      if (!everywhere) continue;
      std::vector<SymId> missing;
      for (SymId c : th_.sig().constructorsOf(varSorts_.at(v)))
        if (!heads.count(c)) missing.push_back(c);
      if (!missing.empty()) cands.push_back(Candidate{v, std::move(missing)});
    }
    auto basesFor = [&](const Candidate& c) {
      std::vector<std::pair<Clause, Subst>> out;
      for (SymId ctor : c.missing) {
        const SymInfo& info = th_.sig().sym(ctor);
        std::vector<Term> args;
        for (std::size_t k = 0; k < info.argSorts.size(); ++k)
          args.push_back(mkVar(th_.sig().vars().intern(
                                   "#b" + std::to_string(k + 1)),
                               info.argSorts[k]));
        Term pattern = mkApp(ctor, std::move(args), th_.sig());
        Subst bx;
        bx.bind(c.v, info.argSorts.empty() ? pattern
                                           : freshPattern(c.v, pattern));
        Clause base = applySubst(bx, goal_);
        out.emplace_back(mkClause(base.lits), std::move(bx));
      }
      return out;
    };
    const Candidate* chosen = cands.empty() ? nullptr : &cands[0];
    if (closes) {
      for (const Candidate& c : cands) {
        bool allClose = true;
        for (auto& [cl, bx] : basesFor(c)) allClose = allClose && closes(cl);
        if (allClose) {
          chosen = &c;
          break;
        }
      }
    }
    if (chosen) {
      for (auto& [cl, bx] : basesFor(*chosen)) {
        bases.push_back(cl);
        lastCases_.push_back(CaseShape{true, bx, {}});
      }
    }
  }

  // Step cases in order; a k-literal goal with m hypotheses splits into k^m
  // clauses per case.
  for (std::size_t ci = 0; ci < s.cases.size(); ++ci) {
    const SchemeCase& c = s.cases[ci];
    for (const Branch& d : effective[ci]) {
      std::size_t k = goal_.lits.size();
      std::size_t m = c.hyps.size();
      std::vector<std::size_t> choice(m, 0);
      while (true) {
        Clause inst = applySubst(c.xi, goal_);
        std::vector<Literal> lits = inst.lits;
        for (std::size_t j = 0; j < m; ++j)
          lits.push_back(
              negated(applySubst(c.hyps[j], goal_.lits[choice[j]])));
        for (const Literal& l : d) lits.push_back(negated(l));
        steps.push_back(mkClause(std::move(lits)));
        std::size_t j = 0;
        while (j < m && ++choice[j] == k) choice[j++] = 0;
        if (j == m) break;
      }
      lastCases_.push_back(CaseShape{false, c.xi, d});
    }
  }

  std::vector<Clause> out = std::move(bases);
  for (Clause& c : steps) out.push_back(std::move(c));
  return out;
}

std::string showScheme(const InductionScheme& s, const Signature& sig) {
  std::string out = "scheme s" + std::to_string(s.id) +
                    ": template=" + sig.sym(s.fn).name + "/" +
                    std::to_string(s.tpl) +
                    " positions=" + showPositions(s.positions) +
                    " vars=" + showVarSet(s.inductionVars, sig) +
                    " hitting=" + showRational(s.hitting);
  for (const SchemeCase& c : s.cases) {
    out += "\n  case <xi=" + showSubstByName(c.xi, sig) + ", mu={";
    for (std::size_t i = 0; i < c.hyps.size(); ++i)
      out += (i ? ", " : "") + showSubstByName(c.hyps[i], sig);
    out += "}, cond=" + showCond(c.cond, sig) + ">";
  }
  return out;
}

}  // namespace prover

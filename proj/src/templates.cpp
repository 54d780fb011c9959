#include "prover/templates.hpp"

#include <algorithm>

#include "prover/theory.hpp"

namespace prover {

namespace {

// Recursive calls in evaluation order: arguments before the enclosing
// call, so nested calls precede the call they feed.
void collectCalls(const Term& t, SymId f, std::vector<Term>& out) {
  for (const Term& a : t.args) collectCalls(a, f, out);
  if (!t.isVar && t.head == f) out.push_back(t);
}

bool properSubterm(const Term& sub, const Term& of) {
  if (sub == of) return false;
  return occursIn(sub, of);
}

// Guards (drawn from avail) justifying to < from under the relation;
// nullopt when neither a syntactic descent nor a lemma instance applies.
std::optional<std::vector<Literal>> strictDescent(
    const Theory& th, const std::string& relation, const Term& from,
    const Term& to, const std::vector<Literal>& avail) {
  if (relation == "structural-size" && properSubterm(to, from))
    return std::vector<Literal>{};
  for (const InductionLemma& il : th.inductionLemmas()) {
    if (il.relation != relation) continue;
    Subst s;
    if (!matchInto(il.smaller, to, s)) continue;
    if (!matchInto(il.larger, from, s)) continue;
    std::vector<Literal> used;
    bool ok = true;
    for (const Literal& c : il.conds) {
      Literal ci = applySubst(s, c);
      bool found = false;
      for (const Literal& a : avail) found = found || a == ci;
      if (!found) {
        ok = false;
        break;
      }
      used.push_back(ci);
    }
    if (ok) return used;
  }
  return std::nullopt;
}

struct Validation {
  std::string relation;
  std::vector<std::vector<Literal>> guards;  // per triple, equation order
};

// A weight validates when every recursive call of every triple descends
// lexicographically: earlier components syntactically equal, one strict,
// the rest unconstrained.
std::optional<Validation> validateWeight(const Theory& th,
                                         const std::vector<int>& weight,
                                         const std::vector<TemplateTriple>& raw) {
  std::vector<std::string> relations{"structural-size"};
  for (const InductionLemma& il : th.inductionLemmas())
    if (std::find(relations.begin(), relations.end(), il.relation) ==
        relations.end())
      relations.push_back(il.relation);

  for (const std::string& rel : relations) {
    Validation v;
    v.relation = rel;
    bool ok = true;
    for (const TemplateTriple& tr : raw) {
      std::vector<Literal> used;
      for (const Term& call : tr.calls) {
        bool descends = false;
        for (std::size_t l = 0; l < weight.size() && !descends; ++l) {
          int pos = weight[l];
          const Term& from = tr.lhs.args[pos - 1];
          const Term& to = call.args[pos - 1];
          auto g = strictDescent(th, rel, from, to, tr.caseCond);
          if (g) {
            for (const Literal& lit : *g) used.push_back(lit);
            descends = true;
          } else if (!(from == to)) {
            break;  // neither equal nor strictly smaller
          }
        }
        if (!descends) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
      // Keep the guards in the equation's condition order, once each.
      std::vector<Literal> ordered;
      for (const Literal& c : tr.caseCond) {
        bool want = false;
        for (const Literal& u : used) want = want || u == c;
        if (want) ordered.push_back(c);
      }
      v.guards.push_back(std::move(ordered));
    }
    if (ok) return v;
  }
  return std::nullopt;
}

void buildFrom(const Theory& th, SymId f,
               const std::vector<std::vector<int>>& weights,
               const std::vector<TemplateTriple>& raw,
               std::vector<InductionTemplate>& out) {
  for (const std::vector<int>& w : weights) {
    auto v = validateWeight(th, w, raw);
    if (!v) continue;
    InductionTemplate t;
    t.fn = f;
    t.weight = w;
    if (w.size() == 1) {
      t.relation = v->relation;
    } else {
      t.relation = "lex(";
      for (std::size_t i = 0; i < w.size(); ++i)
        t.relation += (i ? "," : "") + v->relation;
      t.relation += ")";
    }
    t.measured.insert(w.begin(), w.end());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      TemplateTriple tr = raw[i];
      tr.caseCond = v->guards[i];
      t.triples.push_back(std::move(tr));
    }
    // Changeable: measured positions some call moves. Unchangeable: positions
    // no call moves at all; unmeasured moved positions are in neither set.
    int arity = static_cast<int>(raw[0].lhs.args.size());
    for (int pos = 1; pos <= arity; ++pos) {
      bool changes = false;
      for (const TemplateTriple& tr : t.triples)
        for (const Term& call : tr.calls)
          changes = changes || !(call.args[pos - 1] == tr.lhs.args[pos - 1]);
      if (changes) {
        if (t.measured.count(pos)) t.changeable.insert(pos);
      } else {
        t.unchangeable.insert(pos);
      }
    }
    out.push_back(std::move(t));
  }
}

}  // namespace

std::vector<InductionTemplate> computeTemplates(
    const Theory& th, SymId f, const std::vector<Equation>& eqs) {
  std::vector<TemplateTriple> raw;
  for (const Equation& eq : eqs) {
    std::vector<Term> calls;
    collectCalls(eq.rhs, f, calls);
    if (calls.empty()) continue;
    raw.push_back(TemplateTriple{eq.lhs, std::move(calls), eq.conds});
  }
  std::vector<InductionTemplate> out;
  if (raw.empty()) return out;

  int arity = static_cast<int>(th.sig().sym(f).argSorts.size());
  std::vector<std::vector<int>> weights;
  for (int i = 1; i <= arity; ++i) weights.push_back({i});
  buildFrom(th, f, weights, raw, out);
  if (!out.empty()) return out;

  weights.clear();
  for (int i = 1; i <= arity; ++i)
    for (int j = 1; j <= arity; ++j)
      if (i != j) weights.push_back({i, j});
  buildFrom(th, f, weights, raw, out);
  if (!out.empty()) return out;

  weights.clear();
  for (int i = 1; i <= arity; ++i)
    for (int j = 1; j <= arity; ++j)
      for (int k = 1; k <= arity; ++k)
        if (i != j && i != k && j != k) weights.push_back({i, j, k});
  buildFrom(th, f, weights, raw, out);
  return out;
}

std::string showTemplate(const InductionTemplate& t, const Signature& sig) {
  std::string out = "template " + sig.sym(t.fn).name + ": weight=";
  if (t.weight.size() == 1) {
    out += "(" + std::to_string(t.weight[0]) + ")";
  } else {
    out += "lex(";
    for (std::size_t i = 0; i < t.weight.size(); ++i)
      out += (i ? std::string(",(") : std::string("(")) +
             std::to_string(t.weight[i]) + ")";
    out += ")";
  }
  out += " measured={";
  bool first = true;
  for (int p : t.measured) {
    out += (first ? "" : ",") + std::to_string(p);
    first = false;
  }
  out += "} relation=" + t.relation;
  out += " triples=" + std::to_string(t.triples.size());
  return out;
}

}  // namespace prover

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "prover/templates.hpp"
#include "prover/terms.hpp"

namespace prover {

// Thrown by every theory operation that rejects its event; the message
// names the first failed check.
struct TheoryError : std::runtime_error {
  explicit TheoryError(const std::string& m) : std::runtime_error(m) {}
};

// A conditional rewrite rule lhs = rhs <= conds with lhs headed by the
// defined symbol. Positive conditions are equations, negative ones
// disequations.
struct Equation {
  Term lhs;
  Term rhs;
  std::vector<Literal> conds;
};

enum class DefStyle { Constructor, Destructor, Mixed };

struct FunctionDef {
  SymId symbol = 0;
  std::vector<Equation> equations;
  DefStyle style = DefStyle::Destructor;
  bool partial = false;
  bool recursive = false;
  std::vector<InductionTemplate> templates;
};

enum class LemmaTag { Rewrite, Elimination, Generalization, Induction };

struct Lemma {
  std::string name;
  Clause clause;
  std::set<LemmaTag> tags;
  bool assumed = false;
};

// Conclusion equation oriented from -> to plus the negated side literals.
struct RewriteLemma {
  std::string name;
  Term from;
  Term to;
  std::vector<Literal> conds;
  bool permutative = false;  // sides equal up to variable renaming
};

// Shape t^c = x <= middles /\ y_i = t^d_i: replaces destructor nests by a
// constructor pattern over fresh variables.
struct EliminationLemma {
  std::string name;
  Term ctorTerm;  // t^c, the constructor pattern over y_0..y_n
  Term headVar;   // x, the variable the pattern equals
  std::vector<Literal> middles;
  std::vector<std::pair<StrId, Term>> pairs;  // (y_i, t^d_i)
};

// Descent fact smaller < larger under a well-founded relation, valid when
// the conditions hold. Backs template validation.
struct InductionLemma {
  std::string relation;
  Term smaller;
  Term larger;
  std::vector<Literal> conds;
};

// Constructor ground term spelled structurally, resolved against the
// signature once the datatype's own constructors exist.
struct GroundSpec {
  std::string head;
  std::vector<GroundSpec> args;
};

struct CtorSpec {
  std::string name;
  std::vector<std::string> argSorts;
};

struct DestrSpec {
  std::string name;
  GroundSpec dflt;
};

struct EvalResult {
  Term term;
  bool exhausted = false;
};

class Theory {
 public:
  Theory() = default;

  Signature& sig() { return sig_; }
  const Signature& sig() const { return sig_; }

  // Registers the sort, its constructors, destructor definitions with
  // default equations on the other constructors, and the built-in
  // "destructor output is smaller" induction lemmas.
  void declareDatatype(const std::string& sortName,
                       const std::vector<CtorSpec>& ctors,
                       const std::vector<DestrSpec>& destrs);

  // Two-phase definition: the symbol must exist while its equations are
  // parsed. finishFunction runs the admissibility checks and attaches
  // templates; until then the symbol is not admitted.
  SymId beginFunction(const std::string& name,
                      const std::vector<SortId>& argSorts, SortId resSort);
  void finishFunction(SymId f, std::vector<Equation> eqs, bool partial);

  bool isAdmitted(SymId f) const;
  const FunctionDef* def(SymId f) const;

  // True for functions introduced by a datatype's destructor list.
  bool isDestructor(SymId f) const { return destructors_.count(f) != 0; }

  // Innermost-leftmost rewriting with the defining equations; conditions
  // must decide definitely for an equation to fire. Irreducible subterms
  // are kept as-is (partial functions outside their domain).
  EvalResult evaluate(const Term& t, std::size_t budget) const;

  // Shape-checks the tags, proves the clause through the injected hook
  // unless assumed, and activates the lemma under its tags.
  void addLemma(const std::string& name, const Clause& clause,
                const std::set<LemmaTag>& tags, bool assume);

  void setProver(std::function<bool(const std::string&, const Clause&)> p) {
    prover_ = std::move(p);
  }

  const std::vector<RewriteLemma>& rewriteLemmas() const { return rewrites_; }
  const std::vector<EliminationLemma>& eliminationLemmas() const {
    return eliminations_;
  }
  const std::vector<Lemma>& generalizationLemmas() const {
    return generalizations_;
  }
  const std::vector<InductionLemma>& inductionLemmas() const {
    return inductions_;
  }
  const std::vector<Lemma>& lemmas() const { return lemmas_; }

  // Possible top constructors of a defined symbol's results (least
  // fixpoint over the defining equations; an over-approximation).
  const std::set<SymId>& typeset(SymId f) const;
  std::set<SymId> topConstructors(const Term& t) const;

  // True when evaluating t can reach a partial function, i.e. t may be
  // stuck junk; typeset decisions are then unsound and must be skipped.
  bool maybeStuck(const Term& t) const;

  const std::vector<std::string>& events() const { return events_; }

 private:
  void admitFunction(FunctionDef fd);
  void recomputeTypesets();

  Signature sig_;
  std::map<SymId, FunctionDef> defs_;
  std::set<SymId> destructors_;
  std::set<SymId> pending_;
  std::vector<Lemma> lemmas_;
  std::vector<RewriteLemma> rewrites_;
  std::vector<EliminationLemma> eliminations_;
  std::vector<Lemma> generalizations_;
  std::vector<InductionLemma> inductions_;
  std::map<SymId, std::set<SymId>> typesets_;
  std::set<SymId> partialReach_;
  std::vector<std::string> events_;
  std::function<bool(const std::string&, const Clause&)> prover_;
};

}  // namespace prover

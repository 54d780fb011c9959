// The staged proof loop. Clauses wait in a central pool; each one runs
// through simplification, destructor elimination, cross-fertilization,
// generalization, and irrelevance elimination, and the first stage that
// changes it returns the results to the pool. Clauses surviving every stage
// unchanged trigger an induction. The trace records one event per clause.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prover/schemes.hpp"
#include "prover/terms.hpp"
#include "prover/theory.hpp"

namespace prover {

enum class TraceLevel { None, Summary, Full };

struct ProverOptions {
  std::size_t maxInductions = 10;
  std::size_t maxStagePasses = 500;
  std::size_t evalBudget = 100000;
  std::size_t backchainDepth = 8;
  bool dropInjectivity = false;
  // Stop after the first induction's scheme analysis has been recorded.
  bool stopAtFirstScheme = false;
};

// Outcome of one stage application to one clause.
struct StageResult {
  bool changed = false;
  bool discharged = false;     // proved outright: every branch is a tautology
  bool refuted = false;        // some branch lost every literal: goal is false
  bool allIrrelevant = false;  // every literal class judged unprovable
  std::vector<Clause> clauses;
};

struct ProofTrace {
  struct Node {
    Clause clause;
    std::string stage;    // stage that consumed the clause; empty if pending
    std::string outcome;  // "⊤", "n clauses", or "FAILED: reason"
    std::string schemeSummary;             // induct: selected positions/ratio
    std::optional<InductionScheme> scheme; // induct: the selected scheme
    std::vector<std::size_t> children;
    std::size_t depth = 0;
  };
  std::vector<Node> nodes;  // node 0 is the goal
};

struct ProofResult {
  bool proved = false;
  std::string reason;  // failure reason when !proved
  std::size_t inductions = 0;
  ProofTrace trace;
  // Scheme analysis of the first induction: every candidate scheme, the
  // combination log, and the selection line.
  std::vector<std::string> schemeDump;
};

// One proof attempt over a frozen theory. The stages are public so each can
// be exercised on a single clause; prove drives them over the pool.
class Prover {
 public:
  explicit Prover(Theory& th, ProverOptions opt = {});

  ProofResult prove(const Clause& goal);

  StageResult simplify(const Clause& c);
  StageResult eliminateDestructors(const Clause& c);
  StageResult crossFertilize(const Clause& c);
  StageResult generalize(const Clause& c);
  StageResult eliminateIrrelevance(const Clause& c);
  // Scheme pipeline on the mark-cleared clause; nullopt when no template
  // applies anywhere. Fills dump/summary/scheme on the node when given.
  std::optional<std::vector<Clause>> induct(const Clause& c,
                                            ProofTrace::Node* node = nullptr,
                                            std::vector<std::string>* dump = nullptr);

  // True when simplification discharges every branch of c.
  bool closes(const Clause& c);

 private:
  enum class Truth { True, False, Unknown };

  // Rewrite rules and decision facts read off the other literals of the
  // clause under focus, plus condition literals assumed during an unfold.
  struct Context {
    std::vector<Literal> facts;    // literals assumed true
    const Signature* sig = nullptr;

    void addClauseLiterals(const std::vector<Literal>& lits, std::size_t skip);
  };

  struct UnfoldLeaf {
    std::vector<Literal> assumed;  // conditions assumed true on this branch
    std::optional<Term> result;    // nullopt: no equation fires (stuck)
  };

  Truth decideAtom(const Term& a, const Term& b, const Context& ctx,
                   std::size_t depth);
  Truth decideLiteral(const Literal& l, const Context& ctx,
                      const Clause& clause, std::size_t depth);
  Term normTerm(const Term& t, const Context& ctx, const Clause& clause,
                std::size_t depth);
  std::optional<Term> unfoldDecided(const Term& t, const Context& ctx,
                                    const Clause& clause, std::size_t depth);
  std::optional<Term> applyRewriteLemmas(const Term& t, const Context& ctx,
                                         const Clause& clause,
                                         std::size_t depth);
  bool relieveCondition(const Literal& cond, const Context& ctx,
                        const Clause& clause, std::size_t depth);
  bool unfoldApproved(const Term& call, const std::vector<Term>& newCalls,
                      const Clause& clause);
  void unfoldBranches(const Term& call, const std::vector<Equation>& eqs,
                      std::size_t eqIdx, Context ctx, const Clause& clause,
                      std::vector<Literal> assumed,
                      std::vector<UnfoldLeaf>& leaves);
  bool trySplitUnfold(const Clause& c, std::vector<Clause>& out);
  bool tryVarSplit(const Clause& c, std::vector<Clause>& out);

  bool chargeStep();

  Theory& th_;
  ProverOptions opt_;
  std::size_t steps_ = 0;  // rewrite work counter, reset per clause
  int unfoldNest_ = 0;     // recursion guard across nested unfold attempts
  // Backchaining guard: conditions embedding an open one are abandoned.
  std::vector<std::pair<Term, Term>> condStack_;
};

std::string renderTrace(const ProofResult& r, TraceLevel lvl,
                        const Signature& sig);

}  // namespace prover

// Proof-time recursion analysis: candidate induction schemes are built from
// the induction templates applicable at goal occurrences, then combined by
// subsumption and merging, filtered for flawedness, ranked by hitting ratio,
// and instantiated into base and step clauses.
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prover/templates.hpp"
#include "prover/terms.hpp"
#include "prover/theory.hpp"

namespace prover {

// Exact count of satisfied descent constraints over the total. Kept as built
// (6/6 stays 6/6); addition reduces.
struct Rational {
  long long num = 0;
  long long den = 1;

  bool operator==(const Rational& o) const {
    return num * o.den == o.num * den;
  }
};

Rational ratAdd(const Rational& a, const Rational& b);
bool ratLess(const Rational& a, const Rational& b);
std::string showRational(const Rational& r);

struct SchemeCase {
  Subst xi;                   // constructor instantiation of the goal
  std::vector<Subst> hyps;    // one substitution per induction hypothesis
  std::vector<Literal> cond;  // case condition, instantiated to the goal
};

struct InductionScheme {
  int id = 0;     // creation order, 1-based within one analysis
  SymId fn = 0;   // originating function and template number (1-based);
  int tpl = 0;    // combination keeps the absorbing scheme's origin
  std::set<StrId> domain;  // common domain of every hyp substitution
  std::vector<Position> positions;
  std::set<StrId> inductionVars;
  std::vector<SchemeCase> cases;
  Rational hitting;
};

// One generated proof case: the goal-variable instantiation and condition
// under which the emitted clauses assume the goal. Exposed for coverage
// checks over the instantiated case analysis.
struct CaseShape {
  bool base = false;
  Subst xi;
  std::vector<Literal> cond;
};

struct SchemeOptions {
  // Waives the injective case/hyp mappings in subsumption and mergeability.
  bool dropInjectivity = false;
};

// Scheme analysis for one goal clause. Holds the fresh-name cache, so equal
// constructor instantiations of a variable coincide across occurrences and
// templates; subsumption and merging depend on that.
class SchemeBuilder {
 public:
  SchemeBuilder(Theory& th, const Clause& goal, SchemeOptions opt = {});

  bool applicable(const InductionTemplate& t, const Position& occ);
  // nullopt when not applicable or a measured constraint has no solution.
  std::optional<InductionScheme> buildScheme(const InductionTemplate& t,
                                             const Position& occ);
  // Occurrences in position order, templates in definition order.
  std::vector<InductionScheme> buildAll();

  bool subsumes(const InductionScheme& a, const InductionScheme& b) const;
  std::optional<InductionScheme> merge(const InductionScheme& a,
                                       const InductionScheme& b);
  std::vector<InductionScheme> subsumptionPhase(
      std::vector<InductionScheme> s);
  std::vector<InductionScheme> mergingPhase(std::vector<InductionScheme> s);
  std::vector<InductionScheme> filterFlawed(std::vector<InductionScheme> s);
  static const InductionScheme* select(const std::vector<InductionScheme>& s);

  // Base clauses first, then step cases in order; marks cleared. The probe,
  // when given, picks the base-completion variable whose clauses it closes.
  std::vector<Clause> instantiate(
      const InductionScheme& s,
      const std::function<bool(const Clause&)>& closes = {});
  // Case analysis behind the last instantiate call.
  const std::vector<CaseShape>& lastCases() const { return lastCases_; }

  const std::vector<std::string>& log() const { return log_; }
  const Clause& goal() const { return goal_; }

 private:
  struct TripleSubsts {
    Subst xi, sigma;
  };

  Term freshPattern(StrId var, const Term& pattern);
  std::optional<TripleSubsts> tripleSubsts(const InductionTemplate& t,
                                           const TemplateTriple& tr,
                                           const Term& occ);
  void absorb(InductionScheme& survivor, const InductionScheme& food);

  Theory& th_;
  Clause goal_;
  SchemeOptions opt_;
  int nextId_ = 1;
  std::map<StrId, SortId> varSorts_;
  std::set<std::string> usedNames_;
  std::map<std::pair<StrId, std::string>, Term> renameCache_;
  std::vector<CaseShape> lastCases_;
  std::vector<std::string> log_;
};

// Multi-line: header with origin, positions, variables, and hitting ratio,
// then one line per case.
std::string showScheme(const InductionScheme& s, const Signature& sig);

}  // namespace prover

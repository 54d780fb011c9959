#pragma once

#include <set>
#include <string>
#include <vector>

#include "prover/terms.hpp"

namespace prover {

class Theory;
struct Equation;

// One defining equation's contribution to a recursion analysis: the
// left-hand side pattern, the recursive calls in its right-hand side
// (innermost first), and the guards that justify the measured descents.
struct TemplateTriple {
  Term lhs;
  std::vector<Term> calls;
  std::vector<Literal> caseCond;
};

// Definition-time termination witness: argument positions forming a
// (possibly lexicographic) weight, the well-founded relation used per
// component, and the relational description of the recursion.
struct InductionTemplate {
  SymId fn = 0;
  std::vector<int> weight;  // 1-based argument positions, lexicographic order
  std::string relation;
  std::set<int> measured;
  std::set<int> changeable;
  std::set<int> unchangeable;
  std::vector<TemplateTriple> triples;
};

// All termination witnesses for f's equations: every single measured
// position that validates, else lexicographic pairs, else triples.
// Empty when f is not recursive or nothing validates.
std::vector<InductionTemplate> computeTemplates(
    const Theory& th, SymId f, const std::vector<Equation>& eqs);

std::string showTemplate(const InductionTemplate& t, const Signature& sig);

}  // namespace prover

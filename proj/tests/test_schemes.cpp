#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "prover/schemes.hpp"

using namespace prover;

namespace {

Subst sub(fx::Nat& n,
          std::vector<std::pair<std::string, Term>> bs) {
  Subst s;
  for (auto& [name, t] : bs) s.bind(n.th.sig().vars().intern(name), t);
  return s;
}

std::vector<Term> groundNats(fx::Nat& n, int depth) {
  std::vector<Term> out;
  for (int i = 0; i <= depth; ++i) out.push_back(n.num(i));
  return out;
}

std::vector<Term> groundLists(fx::NatList& n, int len, int depth) {
  std::vector<Term> out{n.nilT()};
  std::size_t from = 0;
  for (int l = 0; l < len; ++l) {
    std::size_t upto = out.size();
    for (std::size_t i = from; i < upto; ++i)
      for (int v = 0; v <= depth; ++v)
        out.push_back(n.cnsT(n.num(v), out[i]));
    from = upto;
  }
  return out;
}

bool decidedTrue(const Theory& th, const Literal& l) {
  Term a = th.evaluate(l.lhs, 100000).term;
  Term b = th.evaluate(l.rhs, 100000).term;
  if (!constructorGround(a, th.sig()) || !constructorGround(b, th.sig()))
    return false;
  return (a == b) == l.positive;
}

// Every assignment of the given candidate terms to vars, applied to f.
void forEachAssignment(const std::vector<StrId>& vars,
                       const std::vector<std::vector<Term>>& candidates,
                       const std::function<void(const Subst&)>& f) {
  std::vector<std::size_t> odo(vars.size(), 0);
  while (true) {
    Subst theta;
    for (std::size_t i = 0; i < vars.size(); ++i)
      theta.bind(vars[i], candidates[i][odo[i]]);
    f(theta);
    std::size_t j = 0;
    while (j < vars.size() && ++odo[j] == candidates[j].size()) odo[j++] = 0;
    if (j == vars.size()) break;
  }
}

void varTermSorts(const Term& t, std::map<StrId, SortId>& out) {
  if (t.isVar) {
    out.emplace(t.head, t.sort);
    return;
  }
  for (const Term& a : t.args) varTermSorts(a, out);
}

// The measured weight of every hypothesis instance is lexicographically
// below the weight of its case's goal instance, over all ground instances
// that satisfy the case condition.
void checkOrdering(Theory& th, const InductionTemplate& t, const Term& occ,
                   const InductionScheme& s,
                   const std::map<SortId, std::vector<Term>>& pools) {
  for (const SchemeCase& c : s.cases) {
    for (const Subst& mu : c.hyps) {
      std::map<StrId, SortId> vs;
      for (const Term& a : occ.args) {
        varTermSorts(applySubst(c.xi, a), vs);
        varTermSorts(applySubst(mu, a), vs);
      }
      for (const Literal& l : c.cond) {
        varTermSorts(l.lhs, vs);
        varTermSorts(l.rhs, vs);
      }
      std::vector<StrId> vlist;
      std::vector<std::vector<Term>> cands;
      for (const auto& [v, sort] : vs) {
        vlist.push_back(v);
        cands.push_back(pools.at(sort));
      }
      forEachAssignment(vlist, cands, [&](const Subst& theta) {
        for (const Literal& l : c.cond)
          if (!decidedTrue(th, applySubst(theta, l))) return;
        bool strict = false, ok = true;
        for (int w : t.weight) {
          const Term& arg = occ.args[static_cast<std::size_t>(w - 1)];
          Term a =
              th.evaluate(applySubst(theta, applySubst(c.xi, arg)), 100000)
                  .term;
          Term b = th.evaluate(applySubst(theta, applySubst(mu, arg)), 100000)
                       .term;
          REQUIRE(constructorGround(a, th.sig()));
          REQUIRE(constructorGround(b, th.sig()));
          if (termSize(b) < termSize(a)) {
            strict = true;
            break;
          }
          if (termSize(b) > termSize(a)) {
            ok = false;
            break;
          }
        }
        CHECK(ok);
        CHECK(strict);
      });
    }
  }
}

// Every ground instance of the goal variables lands in some emitted case:
// the instantiation matches and the case condition holds.
void checkCoverage(Theory& th, const Clause& goal,
                   const std::vector<CaseShape>& shapes,
                   const std::vector<StrId>& vars,
                   const std::vector<std::vector<Term>>& candidates) {
  forEachAssignment(vars, candidates, [&](const Subst& theta) {
    bool covered = false;
    for (const CaseShape& cs : shapes) {
      Subst rho;
      bool matches = true;
      for (StrId v : vars) {
        const Term* pat = cs.xi.lookup(v);
        if (!pat) continue;
        if (!matchInto(*pat, *theta.lookup(v), rho)) {
          matches = false;
          break;
        }
      }
      if (!matches) continue;
      bool holds = true;
      for (const Literal& l : cs.cond)
        holds = holds && decidedTrue(th, applySubst(theta, l));
      covered = covered || holds;
    }
    CHECK(covered);
  });
  (void)goal;
}

}  // namespace

TEST_CASE("rational bookkeeping") {
  Rational built{6, 6};
  CHECK(showRational(built) == "6/6");
  Rational sum = ratAdd(Rational{1, 2}, built);
  CHECK(sum.num == 3);
  CHECK(sum.den == 2);
  CHECK(showRational(sum) == "3/2");
  CHECK(ratLess(Rational{1, 2}, Rational{6, 6}));
  CHECK(!ratLess(Rational{6, 6}, Rational{1, 1}));
  CHECK(Rational{6, 6} == Rational{1, 1});
}

TEST_CASE("destructor ack goal: candidate schemes") {
  fx::Nat n;
  n.defineLessDestr();
  n.defineAckDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Clause goal =
      mkClause({n.eq(n.call("less", {y, n.call("ack", {x, y})}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 2);

  const InductionScheme& s1 = schemes[0];
  CHECK(s1.id == 1);
  CHECK(s1.fn == *n.th.sig().symId("less"));
  CHECK(s1.tpl == 1);
  CHECK(s1.positions == std::vector<Position>{{1, 1}});
  CHECK(s1.domain == std::set<StrId>{x.head, y.head});
  CHECK(s1.inductionVars == std::set<StrId>{y.head});
  CHECK(s1.hitting == Rational{1, 2});
  CHECK(showRational(s1.hitting) == "1/2");
  REQUIRE(s1.cases.size() == 1);
  CHECK(s1.cases[0].xi.map.empty());
  REQUIRE(s1.cases[0].hyps.size() == 1);
  CHECK(s1.cases[0].hyps[0] == sub(n, {{"x", x}, {"y", n.call("p", {y})}}));
  CHECK(s1.cases[0].cond == std::vector<Literal>{n.neq(y, n.num(0))});

  const InductionScheme& s2 = schemes[1];
  CHECK(s2.id == 2);
  CHECK(s2.fn == *n.th.sig().symId("ack"));
  CHECK(s2.positions == std::vector<Position>{{1, 1, 2}});
  CHECK(s2.inductionVars == std::set<StrId>{x.head, y.head});
  CHECK(s2.hitting == Rational{6, 6});
  CHECK(showRational(s2.hitting) == "6/6");
  REQUIRE(s2.cases.size() == 2);
  REQUIRE(s2.cases[0].hyps.size() == 1);
  CHECK(s2.cases[0].hyps[0] ==
        sub(n, {{"x", n.call("p", {x})}, {"y", n.num(1)}}));
  CHECK(s2.cases[0].cond == std::vector<Literal>{n.neq(x, n.num(0))});
  REQUIRE(s2.cases[1].hyps.size() == 2);
  CHECK(s2.cases[1].hyps[0] == sub(n, {{"x", x}, {"y", n.call("p", {y})}}));
  CHECK(s2.cases[1].hyps[1] ==
        sub(n, {{"x", n.call("p", {x})},
                {"y", n.call("ack", {x, n.call("p", {y})})}}));
  CHECK(s2.cases[1].cond ==
        std::vector<Literal>{n.neq(x, n.num(0)), n.neq(y, n.num(0))});

  CHECK(showScheme(s2, n.th.sig()) ==
        "scheme s2: template=ack/1 positions={1.1.2} vars={x,y} hitting=6/6"
        "\n  case <xi={}, mu={{x -> p(x), y -> s(0)}}, cond={x /= 0}>"
        "\n  case <xi={}, mu={{x -> x, y -> p(y)}, "
        "{x -> p(x), y -> ack(x, p(y))}}, cond={x /= 0, y /= 0}>");
}

TEST_CASE("destructor ack goal: subsumption, selection, instantiation") {
  fx::Nat n;
  n.defineLessDestr();
  n.defineAckDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Term ack = n.call("ack", {x, y});
  Clause goal = mkClause({n.eq(n.call("less", {y, ack}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();

  CHECK(b.subsumes(schemes[0], schemes[1]));
  CHECK(!b.subsumes(schemes[1], schemes[0]));

  auto after = b.subsumptionPhase(schemes);
  REQUIRE(after.size() == 1);
  CHECK(after[0].id == 2);
  CHECK(after[0].positions == std::vector<Position>{{1, 1}, {1, 1, 2}});
  CHECK(after[0].hitting == Rational{3, 2});
  CHECK(after[0].inductionVars == std::set<StrId>{x.head, y.head});
  REQUIRE(b.log().size() == 1);
  CHECK(b.log()[0] ==
        "subsume: s1 into s2 -> positions={1.1,1.1.2} hitting=3/2");

  after = b.mergingPhase(std::move(after));
  after = b.filterFlawed(std::move(after));
  REQUIRE(after.size() == 1);
  const InductionScheme* sel = SchemeBuilder::select(after);
  REQUIRE(sel != nullptr);
  CHECK(sel->id == 2);

  auto clauses = b.instantiate(*sel);
  REQUIRE(clauses.size() == 3);
  Term px = n.call("p", {x}), py = n.call("p", {y});
  CHECK(clauses[0] ==
        mkClause({n.eq(n.call("less", {y, ack}), n.tru()),
                  n.neq(x, n.num(0))}));
  CHECK(clauses[1] ==
        mkClause({n.eq(n.call("less", {y, ack}), n.tru()),
                  n.neq(n.call("less",
                               {n.num(1), n.call("ack", {px, n.num(1)})}),
                        n.tru()),
                  n.eq(x, n.num(0)), n.neq(y, n.num(0))}));
  Term ackxpy = n.call("ack", {x, py});
  CHECK(clauses[2] ==
        mkClause({n.eq(n.call("less", {y, ack}), n.tru()),
                  n.neq(n.call("less", {py, ackxpy}), n.tru()),
                  n.neq(n.call("less", {ackxpy, n.call("ack", {px, ackxpy})}),
                        n.tru()),
                  n.eq(x, n.num(0)), n.eq(y, n.num(0))}));
  for (const Clause& c : clauses) CHECK(c.marked.empty());

  REQUIRE(b.lastCases().size() == 3);
  CHECK(b.lastCases()[0].base);
  CHECK(b.lastCases()[0].cond == std::vector<Literal>{n.eq(x, n.num(0))});
  CHECK(!b.lastCases()[1].base);
  CHECK(b.lastCases()[1].cond ==
        std::vector<Literal>{n.neq(x, n.num(0)), n.eq(y, n.num(0))});
  CHECK(b.lastCases()[2].cond ==
        std::vector<Literal>{n.neq(x, n.num(0)), n.neq(y, n.num(0))});

  checkCoverage(n.th, goal, b.lastCases(), {x.head, y.head},
                {groundNats(n, 4), groundNats(n, 4)});
}

TEST_CASE("constructor ack goal: single scheme and three obligations") {
  fx::Nat n;
  n.defineLessCtor();
  n.defineAckCtor();
  Term x = n.nv("x"), y = n.nv("y");
  Term ack = n.call("ack", {x, y});
  Clause goal = mkClause({n.eq(n.call("less", {y, ack}), n.tru())});
  SchemeBuilder b(n.th, goal);

  const FunctionDef* less = n.th.def(*n.th.sig().symId("less"));
  REQUIRE(less != nullptr);
  REQUIRE(less->templates.size() == 2);
  CHECK(!b.applicable(less->templates[0], {1, 1}));
  CHECK(!b.applicable(less->templates[1], {1, 1}));

  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 1);
  const InductionScheme& s = schemes[0];
  CHECK(s.fn == *n.th.sig().symId("ack"));
  CHECK(s.positions == std::vector<Position>{{1, 1, 2}});
  CHECK(s.hitting == Rational{6, 6});
  REQUIRE(s.cases.size() == 2);

  Term xp = n.nv("x'"), yp = n.nv("y'");
  Term sxp = n.call("s", {xp}), syp = n.call("s", {yp});
  CHECK(s.cases[0].xi == sub(n, {{"x", sxp}, {"y", n.num(0)}}));
  REQUIRE(s.cases[0].hyps.size() == 1);
  CHECK(s.cases[0].hyps[0] == sub(n, {{"x", xp}, {"y", n.num(1)}}));
  CHECK(s.cases[0].cond.empty());
  CHECK(s.cases[1].xi == sub(n, {{"x", sxp}, {"y", syp}}));
  REQUIRE(s.cases[1].hyps.size() == 2);
  CHECK(s.cases[1].hyps[0] == sub(n, {{"x", sxp}, {"y", yp}}));
  CHECK(s.cases[1].hyps[1] ==
        sub(n, {{"x", xp}, {"y", n.call("ack", {sxp, yp})}}));

  auto clauses = b.instantiate(s);
  REQUIRE(clauses.size() == 3);
  CHECK(clauses[0] ==
        mkClause({n.eq(n.call("less", {y, n.call("ack", {n.num(0), y})}),
                       n.tru())}));
  Term ack10 = n.call("ack", {xp, n.num(1)});
  CHECK(clauses[1] ==
        mkClause({n.eq(n.call("less", {n.num(0),
                                       n.call("ack", {sxp, n.num(0)})}),
                       n.tru()),
                  n.neq(n.call("less", {n.num(1), ack10}), n.tru())}));
  Term inner = n.call("ack", {sxp, yp});
  CHECK(clauses[2] ==
        mkClause({n.eq(n.call("less", {syp, n.call("ack", {sxp, syp})}),
                       n.tru()),
                  n.neq(n.call("less", {yp, inner}), n.tru()),
                  n.neq(n.call("less", {inner, n.call("ack", {xp, inner})}),
                        n.tru())}));

  checkCoverage(n.th, goal, b.lastCases(), {x.head, y.head},
                {groundNats(n, 4), groundNats(n, 4)});

  const FunctionDef* ackDef = n.th.def(*n.th.sig().symId("ack"));
  checkOrdering(n.th, ackDef->templates[0], *subtermAt(goal, {1, 1, 2}), s,
                {{n.nat, groundNats(n, 2)}});
}

TEST_CASE("commutativity goal: unmergeable twins, flawed fallback, age wins") {
  fx::Nat n;
  n.definePlusCtor();
  Term x = n.nv("x"), y = n.nv("y");
  Clause goal =
      mkClause({n.eq(n.call("plus", {x, y}), n.call("plus", {y, x}))});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 2);

  Term xp = n.nv("x'"), yp = n.nv("y'");
  CHECK(schemes[0].cases[0].xi == sub(n, {{"y", n.call("s", {yp})}}));
  CHECK(schemes[0].cases[0].hyps[0] == sub(n, {{"x", x}, {"y", yp}}));
  CHECK(schemes[0].hitting == Rational{2, 2});
  CHECK(schemes[0].inductionVars == std::set<StrId>{y.head});
  CHECK(schemes[1].cases[0].xi == sub(n, {{"x", n.call("s", {xp})}}));
  CHECK(schemes[1].cases[0].hyps[0] == sub(n, {{"x", xp}, {"y", y}}));
  CHECK(schemes[1].inductionVars == std::set<StrId>{x.head});

  CHECK(!b.subsumes(schemes[0], schemes[1]));
  CHECK(!b.subsumes(schemes[1], schemes[0]));
  CHECK(!b.merge(schemes[0], schemes[1]).has_value());

  auto after = b.subsumptionPhase(schemes);
  after = b.mergingPhase(std::move(after));
  REQUIRE(after.size() == 2);
  after = b.filterFlawed(std::move(after));
  REQUIRE(after.size() == 2);
  bool logged = false;
  for (const std::string& line : b.log())
    logged = logged || line == "flawed: all candidates flawed, keeping all";
  CHECK(logged);

  const InductionScheme* sel = SchemeBuilder::select(after);
  REQUIRE(sel != nullptr);
  CHECK(sel->id == 1);

  auto clauses = b.instantiate(*sel);
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0] ==
        mkClause({n.eq(n.call("plus", {x, n.num(0)}),
                       n.call("plus", {n.num(0), x}))}));
  Term syp = n.call("s", {yp});
  CHECK(clauses[1] ==
        mkClause({n.eq(n.call("plus", {syp, x}), n.call("plus", {x, syp})),
                  n.neq(n.call("plus", {yp, x}), n.call("plus", {x, yp}))}));

  checkCoverage(n.th, goal, b.lastCases(), {x.head, y.head},
                {groundNats(n, 4), groundNats(n, 4)});
  const FunctionDef* plus = n.th.def(*n.th.sig().symId("plus"));
  checkOrdering(n.th, plus->templates[0], *subtermAt(goal, {1, 1}), after[0],
                {{n.nat, groundNats(n, 3)}});
}

TEST_CASE("transitivity goal: merge chain collapses to one scheme") {
  fx::Nat n;
  n.defineLessDestr();
  Term x = n.nv("x"), y = n.nv("y"), z = n.nv("z");
  Clause goal = mkClause({n.neq(n.call("less", {x, y}), n.tru()),
                          n.neq(n.call("less", {y, z}), n.tru()),
                          n.eq(n.call("less", {x, z}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 6);

  auto after = b.subsumptionPhase(schemes);
  CHECK(after.size() == 6);
  after = b.mergingPhase(std::move(after));
  REQUIRE(after.size() == 1);
  const InductionScheme& m = after[0];
  CHECK(m.id == 11);
  CHECK(m.positions == std::vector<Position>{{1, 1}, {2, 1}, {3, 1}});
  CHECK(m.inductionVars == std::set<StrId>{x.head, y.head, z.head});
  CHECK(m.hitting == Rational{6, 1});
  REQUIRE(m.cases.size() == 1);
  CHECK(m.cases[0].xi.map.empty());
  REQUIRE(m.cases[0].hyps.size() == 1);
  Term px = n.call("p", {x}), py = n.call("p", {y}), pz = n.call("p", {z});
  CHECK(m.cases[0].hyps[0] == sub(n, {{"x", px}, {"y", py}, {"z", pz}}));
  CHECK(m.cases[0].cond ==
        std::vector<Literal>{n.neq(x, n.num(0)), n.neq(z, n.num(0)),
                             n.neq(y, n.num(0))});

  after = b.filterFlawed(std::move(after));
  const InductionScheme* sel = SchemeBuilder::select(after);
  REQUIRE(sel != nullptr);

  auto clauses = b.instantiate(*sel);
  REQUIRE(clauses.size() == 6);
  std::vector<Literal> g = goal.lits;
  CHECK(clauses[0] == mkClause({g[0], g[1], g[2], n.neq(x, n.num(0))}));
  CHECK(clauses[1] == mkClause({g[0], g[1], g[2], n.neq(z, n.num(0))}));
  CHECK(clauses[2] == mkClause({g[0], g[1], g[2], n.neq(y, n.num(0))}));
  std::vector<Literal> negCond{n.eq(x, n.num(0)), n.eq(z, n.num(0)),
                               n.eq(y, n.num(0))};
  CHECK(clauses[3] ==
        mkClause({g[0], g[1], g[2], n.eq(n.call("less", {px, py}), n.tru()),
                  negCond[0], negCond[1], negCond[2]}));
  CHECK(clauses[4] ==
        mkClause({g[0], g[1], g[2], n.eq(n.call("less", {py, pz}), n.tru()),
                  negCond[0], negCond[1], negCond[2]}));
  CHECK(clauses[5] ==
        mkClause({g[0], g[1], g[2], n.neq(n.call("less", {px, pz}), n.tru()),
                  negCond[0], negCond[1], negCond[2]}));

  checkCoverage(n.th, goal, b.lastCases(), {x.head, y.head, z.head},
                {groundNats(n, 3), groundNats(n, 3), groundNats(n, 3)});
}

TEST_CASE("merge bookkeeping on a single occurrence") {
  fx::Nat n;
  n.defineLessDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Clause goal = mkClause({n.eq(n.call("less", {x, y}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 2);
  CHECK(schemes[0].tpl == 1);
  CHECK(schemes[1].tpl == 2);
  CHECK(showScheme(schemes[1], n.th.sig()).substr(0, 24) ==
        "scheme s2: template=less");
  CHECK(showScheme(schemes[1], n.th.sig()).find("template=less/2") !=
        std::string::npos);

  auto m = b.merge(schemes[0], schemes[1]);
  REQUIRE(m.has_value());
  CHECK(m->id == 3);
  CHECK(m->fn == *n.th.sig().symId("less"));
  CHECK(m->tpl == 2);
  CHECK(m->positions == std::vector<Position>{{1, 1}});
  CHECK(m->hitting == Rational{2, 1});
  CHECK(m->inductionVars == std::set<StrId>{x.head, y.head});
  REQUIRE(m->cases.size() == 1);
  REQUIRE(m->cases[0].hyps.size() == 1);
  Term px = n.call("p", {x}), py = n.call("p", {y});
  CHECK(m->cases[0].hyps[0] == sub(n, {{"x", px}, {"y", py}}));
  CHECK(m->cases[0].cond ==
        std::vector<Literal>{n.neq(x, n.num(0)), n.neq(y, n.num(0))});

  bool logged = false;
  auto phase = b.mergingPhase(std::move(schemes));
  for (const std::string& line : b.log())
    logged = logged ||
             line == "merge: s1 + s2 -> s4 positions={1.1} hitting=2/1";
  CHECK(logged);
  REQUIRE(phase.size() == 1);
}

TEST_CASE("mutual subsumption keeps the older scheme") {
  fx::Nat n;
  n.defineLessDestr();
  n.defineAckDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Clause goal =
      mkClause({n.eq(n.call("less", {y, n.call("ack", {x, y})}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  InductionScheme twin = schemes[0];
  twin.id = 99;
  auto after = b.subsumptionPhase({schemes[0], twin});
  REQUIRE(after.size() == 1);
  CHECK(after[0].id == 1);
  CHECK(after[0].hitting == Rational{1, 1});
  REQUIRE(b.log().size() == 1);
  CHECK(b.log()[0] == "subsume: s99 into s1 -> positions={1.1} hitting=1/1");
}

TEST_CASE("marked variables block applicability") {
  fx::Nat n;
  n.defineLessDestr();
  n.defineAckDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Literal lit = n.eq(n.call("less", {y, n.call("ack", {x, y})}), n.tru());
  const FunctionDef* less = n.th.def(*n.th.sig().symId("less"));
  const FunctionDef* ack = n.th.def(*n.th.sig().symId("ack"));

  SchemeBuilder plain(n.th, mkClause({lit}));
  CHECK(plain.applicable(less->templates[0], {1, 1}));
  CHECK(plain.applicable(ack->templates[0], {1, 1, 2}));

  SchemeBuilder marked(n.th, mkClause({lit}, {y.head}));
  CHECK(!marked.applicable(less->templates[0], {1, 1}));
  CHECK(!marked.applicable(ack->templates[0], {1, 1, 2}));
  CHECK(marked.buildAll().empty());
}

TEST_CASE("selection prefers hitting, then breadth, then age") {
  std::vector<InductionScheme> s(3);
  s[0].id = 1;
  s[0].hitting = Rational{2, 2};
  s[0].positions = {{1, 1}};
  s[1].id = 2;
  s[1].hitting = Rational{1, 1};
  s[1].positions = {{1, 1}, {1, 2}};
  s[2].id = 3;
  s[2].hitting = Rational{1, 2};
  s[2].positions = {{1, 1}, {1, 2}, {2, 1}};
  const InductionScheme* sel = SchemeBuilder::select(s);
  REQUIRE(sel != nullptr);
  CHECK(sel->id == 2);

  s[2].hitting = Rational{3, 2};
  CHECK(SchemeBuilder::select(s)->id == 3);

  s[0].positions = {{1, 1}, {2, 1}};
  s[2].hitting = Rational{1, 1};
  s[2].positions = {{1, 1}, {1, 2}};
  CHECK(SchemeBuilder::select(s)->id == 1);

  CHECK(SchemeBuilder::select({}) == nullptr);
}

TEST_CASE("flawed filtering drops only flawed candidates") {
  fx::Nat n;
  Term x = n.nv("x"), z = n.nv("z");
  std::vector<InductionScheme> s(2);
  s[0].id = 1;
  s[0].inductionVars = {x.head};
  s[0].domain = {x.head};
  s[1].id = 2;
  s[1].inductionVars = {z.head};
  s[1].domain = {x.head, z.head};
  Clause goal = mkClause({n.eq(x, z)});
  SchemeBuilder b(n.th, goal);
  auto kept = b.filterFlawed(s);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == 2);
  bool logged = false;
  for (const std::string& line : b.log())
    logged = logged || line == "flawed: s1 dropped";
  CHECK(logged);
}

TEST_CASE("append associativity: nested occurrence subsumes, flawed drop") {
  fx::NatList n;
  n.defineAppend();
  Term l = n.lv("l"), k = n.lv("k"), m = n.lv("m");
  Term lhs = n.call("append", {n.call("append", {l, k}), m});
  Term rhs = n.call("append", {l, n.call("append", {k, m})});
  Clause goal = mkClause({n.eq(lhs, rhs)});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  REQUIRE(schemes.size() == 3);
  CHECK(schemes[0].positions == std::vector<Position>{{1, 1, 1}});
  CHECK(schemes[1].positions == std::vector<Position>{{1, 2}});
  CHECK(schemes[2].positions == std::vector<Position>{{1, 2, 2}});
  // The same goal variable instantiates identically at both occurrences,
  // and the outer occurrence extends the inner one's hypothesis.
  CHECK(schemes[0].cases[0].xi == schemes[1].cases[0].xi);
  CHECK(b.subsumes(schemes[0], schemes[1]));

  auto after = b.subsumptionPhase(schemes);
  REQUIRE(after.size() == 2);
  CHECK(after[0].id == 2);
  CHECK(after[0].positions == (std::vector<Position>{{1, 1, 1}, {1, 2}}));
  CHECK(after[0].hitting == Rational{2, 1});
  CHECK(after[1].id == 3);

  after = b.mergingPhase(std::move(after));
  REQUIRE(after.size() == 2);

  after = b.filterFlawed(std::move(after));
  REQUIRE(after.size() == 1);
  CHECK(after[0].id == 2);

  const InductionScheme* sel = SchemeBuilder::select(after);
  auto clauses = b.instantiate(*sel);
  REQUIRE(clauses.size() == 2);
  Term l1 = n.nv("l1'"), l2 = n.lv("l2'");
  Term cl = n.cnsT(l1, l2);
  CHECK(clauses[0] ==
        mkClause({n.eq(n.call("append", {n.call("append", {n.nilT(), k}), m}),
                       n.call("append", {n.nilT(), n.call("append", {k, m})}))}));
  CHECK(clauses[1] ==
        mkClause({n.eq(n.call("append", {n.call("append", {cl, k}), m}),
                       n.call("append", {cl, n.call("append", {k, m})})),
                  n.neq(n.call("append", {n.call("append", {l2, k}), m}),
                        n.call("append", {l2, n.call("append", {k, m})}))}));

  auto lists = groundLists(n, 2, 1);
  checkCoverage(n.th, goal, b.lastCases(), {l.head, k.head, m.head},
                {lists, lists, lists});
  const FunctionDef* app = n.th.def(*n.th.sig().symId("append"));
  auto occScheme = b.buildScheme(app->templates[0], {1, 2});
  REQUIRE(occScheme.has_value());
  checkOrdering(n.th, app->templates[0], *subtermAt(goal, {1, 2}), *occScheme,
                {{n.nat, groundNats(n, 2)}, {n.list, lists}});
}

TEST_CASE("destructor schemes satisfy the template ordering") {
  fx::Nat n;
  n.defineLessDestr();
  n.defineAckDestr();
  Term x = n.nv("x"), y = n.nv("y");
  Clause goal =
      mkClause({n.eq(n.call("less", {y, n.call("ack", {x, y})}), n.tru())});
  SchemeBuilder b(n.th, goal);
  auto schemes = b.buildAll();
  const FunctionDef* less = n.th.def(*n.th.sig().symId("less"));
  const FunctionDef* ack = n.th.def(*n.th.sig().symId("ack"));
  checkOrdering(n.th, less->templates[0], *subtermAt(goal, {1, 1}),
                schemes[0], {{n.nat, groundNats(n, 4)}});
  checkOrdering(n.th, ack->templates[0], *subtermAt(goal, {1, 1, 2}),
                schemes[1], {{n.nat, groundNats(n, 2)}});
}

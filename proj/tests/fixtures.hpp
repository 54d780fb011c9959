#pragma once

#include <string>
#include <vector>

#include "prover/theory.hpp"

// Hand-built theories shared by the unit suites: nat with destructor p,
// list over nat with car/cdr, and the usual arithmetic definitions in
// both constructor and destructor style.
namespace fx {

using namespace prover;

struct Nat {
  Theory th;
  SortId nat, boolSort;
  SymId zero, s, p;

  Nat() {
    th.declareDatatype("nat", {{"0", {}}, {"s", {"nat"}}},
                       {{"p", GroundSpec{"0", {}}}});
    nat = *th.sig().sortId("nat");
    boolSort = th.sig().boolSort();
    zero = *th.sig().symId("0");
    s = *th.sig().symId("s");
    p = *th.sig().symId("p");
  }

  Term num(int n) {
    Term t = mkApp(zero, {}, th.sig());
    while (n-- > 0) t = mkApp(s, {t}, th.sig());
    return t;
  }
  Term tru() { return mkApp(th.sig().trueSym(), {}, th.sig()); }
  Term fls() { return mkApp(th.sig().falseSym(), {}, th.sig()); }
  Term v(const std::string& name, SortId sort) {
    return mkVar(th.sig().vars().intern(name), sort);
  }
  Term nv(const std::string& name) { return v(name, nat); }
  Term call(const std::string& f, std::vector<Term> args) {
    return mkApp(*th.sig().symId(f), std::move(args), th.sig());
  }
  Literal eq(Term l, Term r) { return mkLiteral(std::move(l), std::move(r), true); }
  Literal neq(Term l, Term r) { return mkLiteral(std::move(l), std::move(r), false); }

  SymId definePlusCtor() {
    SymId f = th.beginFunction("plus", {nat, nat}, nat);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("plus", {num(0), y}), y, {}},
         Equation{call("plus", {mkApp(s, {x}, th.sig()), y}),
                  mkApp(s, {call("plus", {x, y})}, th.sig()),
                  {}}},
        false);
    return f;
  }

  SymId defineTimesCtor() {
    SymId f = th.beginFunction("times", {nat, nat}, nat);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("times", {num(0), y}), num(0), {}},
         Equation{call("times", {mkApp(s, {x}, th.sig()), y}),
                  call("plus", {y, call("times", {x, y})}),
                  {}}},
        false);
    return f;
  }

  SymId defineLessCtor() {
    SymId f = th.beginFunction("less", {nat, nat}, boolSort);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("less", {x, num(0)}), fls(), {}},
         Equation{call("less", {num(0), mkApp(s, {y}, th.sig())}), tru(), {}},
         Equation{call("less", {mkApp(s, {x}, th.sig()), mkApp(s, {y}, th.sig())}),
                  call("less", {x, y}),
                  {}}},
        false);
    return f;
  }

  SymId defineLessDestr() {
    SymId f = th.beginFunction("less", {nat, nat}, boolSort);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("less", {x, y}), fls(), {eq(y, num(0))}},
         Equation{call("less", {x, y}), tru(), {neq(y, num(0)), eq(x, num(0))}},
         Equation{call("less", {x, y}),
                  call("less", {call("p", {x}), call("p", {y})}),
                  {neq(y, num(0)), neq(x, num(0))}}},
        false);
    return f;
  }

  SymId definePlusDestr() {
    SymId f = th.beginFunction("plus", {nat, nat}, nat);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("plus", {x, y}), y, {eq(x, num(0))}},
         Equation{call("plus", {x, y}),
                  mkApp(s, {call("plus", {call("p", {x}), y})}, th.sig()),
                  {neq(x, num(0))}}},
        false);
    return f;
  }

  SymId defineAckDestr() {
    SymId f = th.beginFunction("ack", {nat, nat}, nat);
    Term x = nv("x"), y = nv("y");
    th.finishFunction(
        f,
        {Equation{call("ack", {x, y}), mkApp(s, {y}, th.sig()), {eq(x, num(0))}},
         Equation{call("ack", {x, y}),
                  call("ack", {call("p", {x}), num(1)}),
                  {neq(x, num(0)), eq(y, num(0))}},
         Equation{call("ack", {x, y}),
                  call("ack", {call("p", {x}), call("ack", {x, call("p", {y})})}),
                  {neq(x, num(0)), neq(y, num(0))}}},
        false);
    return f;
  }

  SymId defineAckCtor() {
    SymId f = th.beginFunction("ack", {nat, nat}, nat);
    Term x = nv("x"), y = nv("y");
    Term sx = mkApp(s, {x}, th.sig()), sy = mkApp(s, {y}, th.sig());
    th.finishFunction(
        f,
        {Equation{call("ack", {num(0), y}), sy, {}},
         Equation{call("ack", {sx, num(0)}), call("ack", {x, num(1)}), {}},
         Equation{call("ack", {sx, sy}), call("ack", {x, call("ack", {sx, y})}), {}}},
        false);
    return f;
  }
};

struct NatList : Nat {
  SortId list;
  SymId nil, cns, car, cdr;

  NatList() {
    th.declareDatatype("list", {{"nil", {}}, {"cns", {"nat", "list"}}},
                       {{"car", GroundSpec{"0", {}}},
                        {"cdr", GroundSpec{"nil", {}}}});
    list = *th.sig().sortId("list");
    nil = *th.sig().symId("nil");
    cns = *th.sig().symId("cns");
    car = *th.sig().symId("car");
    cdr = *th.sig().symId("cdr");
  }

  Term lv(const std::string& name) { return v(name, list); }
  Term nilT() { return mkApp(nil, {}, th.sig()); }
  Term cnsT(Term h, Term t) { return mkApp(cns, {h, t}, th.sig()); }

  SymId defineLength() {
    SymId f = th.beginFunction("length", {list}, nat);
    Term x = nv("x"), l = lv("l");
    th.finishFunction(
        f,
        {Equation{call("length", {nilT()}), num(0), {}},
         Equation{call("length", {cnsT(x, l)}),
                  mkApp(s, {call("length", {l})}, th.sig()),
                  {}}},
        false);
    return f;
  }

  SymId defineAppend() {
    SymId f = th.beginFunction("append", {list, list}, list);
    Term x = nv("x");
    Term l = lv("l"), k = lv("k");
    th.finishFunction(
        f,
        {Equation{call("append", {nilT(), k}), k, {}},
         Equation{call("append", {cnsT(x, l), k}),
                  cnsT(x, call("append", {l, k})),
                  {}}},
        false);
    return f;
  }

  SymId defineMbp() {
    SymId f = th.beginFunction("mbp", {nat, list}, boolSort);
    Term x = nv("x"), y = nv("y");
    Term l = lv("l");
    th.finishFunction(
        f,
        {Equation{call("mbp", {x, nilT()}), fls(), {}},
         Equation{call("mbp", {x, cnsT(y, l)}), tru(), {eq(x, y)}},
         Equation{call("mbp", {x, cnsT(y, l)}), call("mbp", {x, l}), {neq(x, y)}}},
        false);
    return f;
  }

  // No nil case: admissible only with the partial waiver.
  SymId defineDlonce(bool partial) {
    SymId f = th.beginFunction("dlonce", {nat, list}, list);
    Term x = nv("x"), y = nv("y");
    Term l = lv("l");
    th.finishFunction(
        f,
        {Equation{call("dlonce", {x, cnsT(y, l)}), l, {eq(x, y)}},
         Equation{call("dlonce", {x, cnsT(y, l)}),
                  cnsT(y, call("dlonce", {x, l})),
                  {neq(x, y)}}},
        partial);
    return f;
  }
};

}  // namespace fx

"""Built-in encodings of the worked examples, with checkable facts.

Behaviours drawn only as figures are reconstructed: the smallest LTSs that
agree with everything stated in prose. Each fact records whether it restates
a claim made in prose (``quoted``), or is derived from a reconstruction
(``reconstructed``).
"""

import os
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List

from .analysis import check_witness, classify, cycle_witness, detect_cycle, inhibiting_relation
from .compile import (compile_layered, compile_relaxed, compile_simultaneous,
                      random_behaviours, verify_compilation)
from .formats import dump_glue, dump_lts, dump_operator
from .glue import (SIMULTANEOUS, GlueOperator, PriorityModel, apply_glue,
                   apply_interaction)
from .lts import Lts, bisimilar, deadlock_states, interaction
from .sos import SosOperator, SosRule, apply_sos, glue_to_sos, validate_operator

QUOTED = "quoted"
RECONSTRUCTED = "reconstructed"


@dataclass(frozen=True)
class Fact:
    name: str
    provenance: str
    check: Callable[["WorkedExample"], bool]


@dataclass(frozen=True)
class WorkedExample:
    id: str
    title: str
    behaviours: Dict[str, Lts]
    operators: Dict[str, SosOperator] = field(default_factory=dict)
    glues: Dict[str, GlueOperator] = field(default_factory=dict)
    reconstructed: frozenset = frozenset()
    facts: List[Fact] = field(default_factory=list)

    def with_glue(self, name, glue):
        return replace(self, glues={**self.glues, name: glue})


def I(text):  # noqa: E743
    return interaction(text)


def rule(label, *premises):
    """``rule("q", (1, "r"))``: premises use 0-based component indices."""
    return SosRule(I(label), frozenset((j, I(b)) for j, b in premises))


def _has(lts, src, label, dst):
    return (src, I(label), dst) in lts.transitions


def _transitions(lts):
    return {(s, ",".join(sorted(a)), t) for s, a, t in lts.transitions}


# -- priority suppresses q while r is possible -----------------------------------

def _ex1():
    b1 = Lts({"1", "2", "3"}, {"p", "q"}, {("1", I("p"), "2"), ("2", I("q"), "3")}, name="B1")
    b2 = Lts({"1", "2"}, {"r"}, {("1", I("r"), "2")}, name="B2")
    gamma = {I("p"), I("q"), I("r"), I("q,r")}
    glue = GlueOperator(({"p", "q"}, {"r"}), gamma, PriorityModel({(I("q"), I("r"))}),
                        name="ex1")
    eq4 = SosOperator(({"p", "q"}, {"r"}),
                      (rule("p"), rule("r"), rule("q,r"), rule("q", (1, "r"))), name="eq4")

    def composed(ex):
        return apply_glue(ex.glues["ex1"], [ex.behaviours["B1"], ex.behaviours["B2"]])

    def plain(ex):
        g = ex.glues["ex1"]
        return apply_interaction(g.gamma, g.partition, [ex.behaviours["B1"], ex.behaviours["B2"]])

    facts = [
        Fact("composed lacks 21 -q-> 31", QUOTED,
             lambda ex: not _has(composed(ex), ("2", "1"), "q", ("3", "1"))),
        Fact("composed contains 22 -q-> 32", QUOTED,
             lambda ex: _has(composed(ex), ("2", "2"), "q", ("3", "2"))),
        Fact("interaction model alone contains 21 -q-> 31", QUOTED,
             lambda ex: _has(plain(ex), ("2", "1"), "q", ("3", "1"))),
        Fact("the four rules define the same component as the glue", QUOTED,
             lambda ex: apply_sos(ex.operators["eq4"], [ex.behaviours["B1"], ex.behaviours["B2"]])
             == composed(ex)),
        Fact("glue translates to the four rules", QUOTED,
             lambda ex: set(glue_to_sos(ex.glues["ex1"]).rules) == set(ex.operators["eq4"].rules)),
        Fact("priority preserves deadlock states", QUOTED,
             lambda ex: deadlock_states(composed(ex)) == deadlock_states(plain(ex))),
        Fact("with and without priority are not bisimilar", RECONSTRUCTED,
             lambda ex: not bisimilar(plain(ex), composed(ex)).bisimilar),
    ]
    return WorkedExample("ex1-priority", "priority q < r over two components",
                        {"B1": b1, "B2": b2}, {"eq4": eq4}, {"ex1": glue},
                        frozenset({"B1", "B2"}), facts)


# -- acyclic but not a single classical glue -------------------------------------

def eq5_operator():
    return SosOperator(({"p", "q"}, {"r", "s"}, {"t"}),
                       (rule("p", (1, "r")), rule("q"), rule("s"), rule("r,t")), name="eq5")


def _eq5():
    op = eq5_operator()
    facts = [
        Fact("operator is well-formed", QUOTED, lambda ex: validate_operator(ex.operators["eq5"]).valid),
        Fact("inhibiting relation is {p < r}", RECONSTRUCTED,
             lambda ex: inhibiting_relation(ex.operators["eq5"]).pairs == {(I("p"), I("r"))}),
        Fact("acyclic of depth 1", RECONSTRUCTED,
             lambda ex: classify(ex.operators["eq5"]).depth_max == 1),
        Fact("not reported as a single classical glue", QUOTED,
             lambda ex: classify(ex.operators["eq5"]).verdicts["classical-strong"] != "expressible"),
        Fact("layered compilation matches the rules on random behaviours", RECONSTRUCTED,
             lambda ex: verify_compilation(
                 ex.operators["eq5"], compile_layered(ex.operators["eq5"]),
                 random_behaviours(ex.operators["eq5"].partition, 5, 3, 0.3, 20)).equal),
    ]
    return WorkedExample("eq5-notbip", "operator with priority information lost by glue",
                        {}, {"eq5": op}, {}, frozenset(), facts)


# -- cyclic inhibition, not expressible at all -----------------------------------

def nfebo():
    """Single component over p, r: 1 and 2 lead to the looping state 3."""
    return Lts({"1", "2", "3"}, {"p", "r"},
               {("1", I("p"), "3"), ("2", I("r"), "3"), ("3", I("p"), "3"), ("3", I("r"), "3")},
               name="B")


def eq6_operator():
    return SosOperator(({"p", "r"},), (rule("p", (0, "r")), rule("r", (0, "p"))), name="eq6")


def _ex2():
    def composed(ex):
        return apply_sos(ex.operators["eq6"], [ex.behaviours["B"]])

    facts = [
        Fact("state 1 moves on p, state 2 on r", QUOTED,
             lambda ex: _transitions(composed(ex)) == {("1", "p", "3"), ("2", "r", "3")}),
        Fact("state 3 is a deadlock", QUOTED,
             lambda ex: deadlock_states(composed(ex)) == {"3"}),
        Fact("inhibiting relation is the cycle p < r < p", RECONSTRUCTED,
             lambda ex: detect_cycle(inhibiting_relation(ex.operators["eq6"])) == [I("p"), I("r")]),
        Fact("not expressible by classical glue", QUOTED,
             lambda ex: classify(ex.operators["eq6"]).verdicts["classical-weak"] == "not-expressible"),
        Fact("relaxed compilation reproduces the deadlock", RECONSTRUCTED,
             lambda ex: verify_compilation(ex.operators["eq6"], compile_relaxed(ex.operators["eq6"]),
                                           [(ex.behaviours["B"],)]).equal),
    ]
    return WorkedExample("ex2-notbip2", "mutually inhibiting p and r",
                        {"B": nfebo()}, {"eq6": eq6_operator()}, {}, frozenset({"B"}), facts)


# -- one rule, p unless r ---------------------------------------------------------

def _eq10():
    op = SosOperator(({"p", "r"},), (rule("p", (0, "r")),), name="eq10")
    glue = GlueOperator(({"p", "r"},), {I("p")}, PriorityModel({(I("p"), I("r"))}, SIMULTANEOUS),
                        name="eq10sim")

    def single(lts):
        return _transitions(lts) == {("1", "p", "3")}

    facts = [
        Fact("the rule yields the single transition 1 -p-> 3", QUOTED,
             lambda ex: single(apply_sos(ex.operators["eq10"], [ex.behaviours["B"]]))),
        Fact("simultaneous glue (p, p < r) yields the single transition 1 -p-> 3", QUOTED,
             lambda ex: single(apply_glue(ex.glues["eq10sim"], [ex.behaviours["B"]]))),
        Fact("simultaneous glue translates back to the single rule", QUOTED,
             lambda ex: glue_to_sos(ex.glues["eq10sim"]).rules == ex.operators["eq10"].rules),
        Fact("simultaneous compilation is that glue", RECONSTRUCTED,
             lambda ex: compile_simultaneous(ex.operators["eq10"]).expression.op
             == ex.glues["eq10sim"]),
    ]
    return WorkedExample("eq10-notstrong", "single rule p unless r",
                        {"B": nfebo()}, {"eq10": op}, {"eq10sim": glue},
                        frozenset({"B"}), facts)


# -- cycle witness template on the p/r cycle -------------------------------------

def _cyclebeh():
    op = eq6_operator()
    cycle = detect_cycle(inhibiting_relation(op))
    witnesses = cycle_witness(op, cycle)

    def check(ex):
        o = ex.operators["eq6"]
        return check_witness(o, detect_cycle(inhibiting_relation(o)),
                             [ex.behaviours[f"W{j + 1}"] for j in range(o.arity)])

    facts = [
        Fact("all-F state deadlocks under the rules", RECONSTRUCTED,
             lambda ex: check(ex).final_deadlocked),
        Fact("plain interaction model enables the whole cycle at all-F", RECONSTRUCTED,
             lambda ex: check(ex).final_enables_cycle),
        Fact("each cycle interaction alone is enabled at its own state", RECONSTRUCTED,
             lambda ex: check(ex).mixed_exact),
        Fact("relaxed glue reproduces the all-F deadlock", RECONSTRUCTED,
             lambda ex: "F" in deadlock_states(
                 apply_glue(compile_relaxed(ex.operators["eq6"]).expression.children[0].op,
                            [ex.behaviours["W1"]]))),
    ]
    return WorkedExample("cyclebeh-template", "witness behaviours for a cyclic operator",
                        {w.name: w for w in witnesses}, {"eq6": op}, {},
                        frozenset(w.name for w in witnesses), facts)


_BUILDERS = {
    "ex1-priority": _ex1,
    "eq5-notbip": _eq5,
    "ex2-notbip2": _ex2,
    "eq10-notstrong": _eq10,
    "cyclebeh-template": _cyclebeh,
}

EXAMPLE_IDS = tuple(_BUILDERS)


def load_example(id: str) -> WorkedExample:
    if id not in _BUILDERS:
        raise KeyError(f"unknown example {id!r}; known: {', '.join(EXAMPLE_IDS)}")
    return _BUILDERS[id]()


@dataclass(frozen=True)
class FactResult:
    example: str
    fact: str
    provenance: str
    passed: bool
    error: str = ""


def run_example_suite(examples=None) -> List[FactResult]:
    """Evaluate every fact; exceptions become failed entries."""
    if examples is None:
        examples = [load_example(i) for i in EXAMPLE_IDS]
    results = []
    for ex in examples:
        for fact in ex.facts:
            try:
                ok, err = bool(fact.check(ex)), ""
            except Exception as e:  # a crashing fact is a failed fact
                ok, err = False, f"{type(e).__name__}: {e}"
            results.append(FactResult(ex.id, fact.name, fact.provenance, ok, err))
    return results


def export_example(ex: WorkedExample, directory) -> List[str]:
    """Write behaviours, operators and glues in the text formats."""
    os.makedirs(directory, exist_ok=True)
    written = []
    items = ([(f"{n}.lts", dump_lts(replace(b, name=n))) for n, b in ex.behaviours.items()] +
             [(f"{n}.sos", dump_operator(replace(o, name=n))) for n, o in ex.operators.items()] +
             [(f"{n}.glue", dump_glue(replace(g, name=n))) for n, g in ex.glues.items()])
    for fname, text in sorted(items):
        path = os.path.join(directory, fname)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        written.append(path)
    return written

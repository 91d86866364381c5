"""Acceptance criteria 1-10; each prints one PASS/FAIL line.

Criteria 3, 4, 5 and 9 run on the full generated operator class, including
operators where two rules for the same label forbid different labels of one
component. Those operators are reported, not filtered out.
"""

import random
import time



from bipglue.analysis import (CyclicRelationError, check_witness, classify, cycle_witness,
                              detect_cycle, final_state, inhibiting_relation, premise_collisions)
from bipglue.compile import (compile_layered, compile_relaxed, compile_simultaneous,
                             random_behaviours, random_lts, verify_compilation)
from bipglue.corpus import EXAMPLE_IDS, load_example
from bipglue.formats import (dump_glue, dump_lts, dump_operator, parse_glue, parse_lts,
                             parse_operator)
from bipglue.generators import (random_acyclic, random_glue, random_operator,
                                random_strict_order, strict_partial_orders)
from bipglue.glue import (CLASSICAL, MODES, RELAXED, SIMULTANEOUS, GlueOperator, PriorityModel,
                          apply_glue, apply_interaction, apply_priority, apply_simultaneous,
                          glue_enabled)
from bipglue.lts import deadlock_states
from bipglue.sos import apply_sos, glue_to_sos

import pytest

from conftest import I

OPERATORS = 100
TUPLES = 10


LINES = []


@pytest.fixture(autouse=True)
def _collect(acceptance):
    yield
    acceptance.extend(LINES)
    LINES.clear()


def report(n, ok, detail, started=None):
    took = f" ({time.perf_counter() - started:.2f}s)" if started is not None else ""
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}{took}"
    LINES.append(line)
    print(line)
    return ok


def operator_suite(acyclic_only=False):
    rng = random.Random(0)
    ops = []
    while len(ops) < OPERATORS:
        op = random_operator(rng, name=f"op{len(ops)}")
        if acyclic_only and not inhibiting_relation(op).acyclic:
            continue
        ops.append(op)
    return ops


def run_suite(n, ops, compile_, check=None):
    started = time.perf_counter()
    failed = []
    for k, op in enumerate(ops):
        res = compile_(op)
        if check is not None and not check(op, res):
            failed.append((op, "layer count"))
            continue
        verdict = verify_compilation(op, res, random_behaviours(op.partition, k, count=TUPLES))
        if not verdict.equal:
            failed.append((op, verdict.first_discrepancy.describe()))
    elapsed = time.perf_counter() - started
    collided = sum(1 for op, _ in failed if premise_collisions(op))
    detail = (f"{len(ops) - len(failed)}/{len(ops)} operators equal on {TUPLES} tuples each"
              f"; {collided} of {len(failed)} failures have premise collisions")
    return failed, elapsed, started, detail


def test_criterion_1_priority_regression(ex1, b1, b2, ex1_glue):
    started = time.perf_counter()
    composed = apply_glue(ex1_glue, [b1, b2])
    plain = apply_interaction(ex1_glue.gamma, ex1_glue.partition, [b1, b2])
    ok = (("2", "2"), I("q"), ("3", "2")) in composed.transitions
    ok &= (("2", "1"), I("q"), ("3", "1")) not in composed.transitions
    ok &= {(("2", "2"), I("q"), ("3", "2")), (("2", "1"), I("q"), ("3", "1"))} <= plain.transitions
    ok &= time.perf_counter() - started < 1
    assert report(1, ok, "22 -q-> 32 kept, 21 -q-> 31 suppressed", started)


def test_criterion_2_priorities_keep_deadlocks():
    started = time.perf_counter()
    rng = random.Random(2)
    bad = 0
    instances = 600
    for k in range(instances):
        g = random_glue(rng, CLASSICAL)
        if k % 2:
            pi = PriorityModel(random_acyclic(rng, g.gamma), RELAXED)
        else:
            pi = PriorityModel(random_strict_order(rng, g.gamma), CLASSICAL)
        comps = [random_lts(rng, ports, 4, 0.3) for ports in g.partition]
        plain = apply_interaction(g.gamma, g.partition, comps)
        if deadlock_states(apply_priority(pi, plain)) != deadlock_states(plain):
            bad += 1
    elapsed = time.perf_counter() - started
    ok = bad == 0 and elapsed < 10
    assert report(2, ok, f"{instances - bad}/{instances} instances keep their deadlocks", started)


def test_criterion_3_layered_compilation():
    ops = operator_suite(acyclic_only=True)

    def layers_ok(op, res):
        depth = max(inhibiting_relation(op).depth.values(), default=0)
        return len(res.nodes) == depth + 1

    failed, elapsed, started, detail = run_suite(3, ops, compile_layered, layers_ok)
    ok = not failed and elapsed < 60
    report(3, ok, detail, started)
    assert ok, [f"{op.name}: {why}" for op, why in failed[:3]]


def test_criterion_4_relaxed_compilation():
    failed, elapsed, started, detail = run_suite(4, operator_suite(), compile_relaxed)
    ok = not failed and elapsed < 60
    report(4, ok, detail, started)
    assert ok, [f"{op.name}: {why}" for op, why in failed[:3]]


def test_criterion_5_simultaneous_compilation():
    failed, elapsed, started, detail = run_suite(5, operator_suite(), compile_simultaneous)
    rng = random.Random(5)
    glues_bad = 0
    glues = 100
    for _ in range(glues):
        g = random_glue(rng, SIMULTANEOUS)
        sos = glue_to_sos(g)
        for _ in range(TUPLES):
            comps = [random_lts(rng, ports, 4, 0.3) for ports in g.partition]
            if apply_sos(sos, comps) != apply_simultaneous(g, comps):
                glues_bad += 1
                break
    elapsed = time.perf_counter() - started
    ok = not failed and not glues_bad and elapsed < 60
    report(5, ok, f"{detail}; {glues - glues_bad}/{glues} glues survive translation", started)
    assert ok, [f"{op.name}: {why}" for op, why in failed[:3]]


def test_criterion_6_acyclic_example(eq5):
    rel = inhibiting_relation(eq5)
    cls = classify(eq5)
    verified = verify_compilation(eq5, compile_layered(eq5),
                                  random_behaviours(eq5.partition, 6, count=50)).equal
    ok = (rel.pairs == {(I("p"), I("r"))} and cls.acyclic and cls.depth_max == 1 and verified
          and cls.verdicts["classical-strong"] != "expressible")
    assert report(6, ok, "relation {p < r}, depth 1, layered verified, not classical-strong")


def test_criterion_7_cyclic_example(eq6, fig2):
    rel = inhibiting_relation(eq6)
    try:
        compile_layered(eq6)
        refused = False
    except CyclicRelationError:
        refused = True
    res = compile_relaxed(eq6)
    verified = verify_compilation(eq6, res, [(fig2,)]).equal
    composed = apply_glue(res.expression.op,
                          [apply_glue(res.expression.children[0].op, [fig2])])
    ok = (rel.pairs == {(I("p"), I("r")), (I("r"), I("p"))} and detect_cycle(rel) is not None
          and refused and verified and "3" in deadlock_states(composed))
    assert report(7, ok, "cycle p < r < p, layered refused, relaxed verified, 3 deadlocks")


def test_criterion_8_single_transition(fig2):
    g = GlueOperator(({"p", "r"},), {I("p")}, PriorityModel({(I("p"), I("r"))}, SIMULTANEOUS))
    out = apply_glue(g, [fig2])
    ok = out.transitions == {("1", I("p"), "3")}
    assert report(8, ok, "exactly 1 -p-> 3")


def test_criterion_9_cycle_witnesses():
    started = time.perf_counter()
    cyclic = [op for op in operator_suite() if not inhibiting_relation(op).acyclic]
    failed, orders_checked = [], 0
    for op in cyclic:
        cycle = detect_cycle(inhibiting_relation(op))
        witnesses = cycle_witness(op, cycle)
        check = check_witness(op, cycle, witnesses)
        fin = final_state(op.arity)
        plain_live = bool(glue_enabled(GlueOperator(op.partition, op.labels), witnesses, fin))
        if not (check.final_deadlocked and plain_live):
            failed.append((op, "; ".join(check.details)))
            continue
        for pairs in strict_partial_orders(op.labels):
            orders_checked += 1
            g = GlueOperator(op.partition, op.labels, PriorityModel(pairs))
            if not glue_enabled(g, witnesses, fin):
                failed.append((op, "classical glue deadlocks at all-F"))
                break
    elapsed = time.perf_counter() - started
    collided = sum(1 for op, _ in failed if premise_collisions(op))
    ok = not failed and elapsed < 120
    report(9, ok, f"{len(cyclic) - len(failed)}/{len(cyclic)} cyclic operators witnessed, "
                  f"{orders_checked} strict orders swept; {collided} of {len(failed)} "
                  f"failures have premise collisions", started)
    assert ok, [f"{op.name}: {why}" for op, why in failed[:3]]


def test_criterion_10_round_trip():
    bad = 0
    artifacts = 0
    for id in EXAMPLE_IDS:
        ex = load_example(id)
        for b in ex.behaviours.values():
            artifacts += 1
            bad += dump_lts(parse_lts(dump_lts(b))) != dump_lts(b) or parse_lts(dump_lts(b)) != b
        for o in ex.operators.values():
            artifacts += 1
            bad += parse_operator(dump_operator(o)) != o
        for g in ex.glues.values():
            artifacts += 1
            bad += parse_glue(dump_glue(g)) != g
    rng = random.Random(10)
    for k in range(100):
        kind = k % 3
        if kind == 0:
            x = random_lts(rng, frozenset({"p", "q", "r"}), 4, 0.3, name=f"B{k}")
            text = dump_lts(x)
            bad += parse_lts(text) != x or dump_lts(parse_lts(text)) != text
        elif kind == 1:
            x = random_operator(rng, name=f"O{k}")
            text = dump_operator(x)
            bad += parse_operator(text) != x or dump_operator(parse_operator(text)) != text
        else:
            x = random_glue(rng, rng.choice(MODES), name=f"G{k}")
            text = dump_glue(x)
            bad += parse_glue(text) != x or dump_glue(parse_glue(text)) != text
        artifacts += 1
    assert report(10, bad == 0, f"{artifacts - bad}/{artifacts} artifacts round-trip")



import random

import pytest
from hypothesis import given, settings, strategies as st

from bipglue.corpus import rule
from bipglue.generators import random_glue, random_operator
from bipglue.glue import (CLASSICAL, RELAXED, SIMULTANEOUS, GlueError, GlueOperator,
                          PriorityModel, apply_glue, apply_interaction, apply_simultaneous)
from bipglue.sos import (RuleGroup, SosOperator, SosRule, apply_sos, glue_to_sos,
                         group_rules, validate_operator)

from conftest import I, T, random_component

seeds = st.integers(min_value=0, max_value=10 ** 6)


def comps_for(rng, partition):
    return [random_component(rng, ports, 3, 0.35) for ports in partition]


def test_validate_eq5(eq5):
    assert validate_operator(eq5).valid


def test_validate_rejects_bad_premise_and_empty_label():
    op = SosOperator(({"p"}, {"r"}), (SosRule(I("p"), {(0, I("r"))}),))
    report = validate_operator(op)
    assert not report and "not within" in report.problems[0]
    empty = SosOperator(({"p"},), (SosRule(frozenset()),))
    assert not validate_operator(empty)
    out_of_range = SosOperator(({"p"},), (SosRule(I("p"), {(3, I("p"))}),))
    assert not validate_operator(out_of_range)
    dup = SosOperator(({"p"},), (rule("p"), rule("p")))
    assert validate_operator(dup) and validate_operator(dup).notes


def test_eq4_rules_equal_ex1_glue(ex1, b1, b2, ex1_glue):
    assert apply_sos(ex1.operators["eq4"], [b1, b2]) == apply_glue(ex1_glue, [b1, b2])


def test_eq6_on_fig2(eq6, fig2):
    out = apply_sos(eq6, [fig2])
    assert T(out) == {("1", "p", "3"), ("2", "r", "3")}
    assert out.states - {s for s, _, _ in out.transitions} == {"3"}


def test_zero_rules(b1, b2):
    out = apply_sos(SosOperator((b1.ports, b2.ports)), [b1, b2])
    assert len(out.states) == 6 and not out.transitions


def test_glue_to_sos_examples(ex1, ex1_glue):
    assert set(glue_to_sos(ex1_glue).rules) == set(ex1.operators["eq4"].rules)
    assert len(glue_to_sos(ex1_glue).rules) == 4
    free = GlueOperator(ex1_glue.partition, ex1_glue.gamma)
    assert set(glue_to_sos(free).rules) == {SosRule(a) for a in ex1_glue.gamma}
    eq10 = GlueOperator([{"p", "r"}], {I("p")}, PriorityModel({(I("p"), I("r"))}, SIMULTANEOUS))
    assert glue_to_sos(eq10).rules == (rule("p", (0, "r")),)


def test_glue_to_sos_spanning_target_gives_choice_family():
    g = GlueOperator([{"a"}, {"b"}], {I("a"), I("a,b")},
                     PriorityModel({(I("a"), I("a,b"))}, CLASSICAL))
    assert set(glue_to_sos(g).rules) == {rule("a", (0, "a")), rule("a", (1, "b")), rule("a,b")}


def test_glue_to_sos_rejects_stranded_target():
    g = GlueOperator([{"p"}], {I("p")}, PriorityModel({(I("p"), I("z"))}, SIMULTANEOUS))
    with pytest.raises(GlueError):
        glue_to_sos(g)


def test_group_rules(eq5):
    groups = group_rules(eq5)
    assert groups == [RuleGroup(I("p"), (0,)), RuleGroup(I("q"), (1,)),
                      RuleGroup(I("s"), (2,)), RuleGroup(I("r,t"), (3,))]
    assert group_rules(SosOperator(({"p"},))) == []
    two = SosOperator(({"a", "b"},), (rule("a"), rule("a", (0, "b"))))
    assert group_rules(two) == [RuleGroup(I("a"), (0, 1))]


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_round_trip_classical(seed):
    rng = random.Random(seed)
    g = random_glue(rng, CLASSICAL)
    comps = comps_for(rng, g.partition)
    assert apply_sos(glue_to_sos(g), comps) == apply_glue(g, comps)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_round_trip_relaxed(seed):
    # relaxed priorities stay inside gamma, so the same argument applies
    rng = random.Random(seed)
    g = random_glue(rng, RELAXED)
    comps = comps_for(rng, g.partition)
    assert apply_sos(glue_to_sos(g), comps) == apply_glue(g, comps)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_round_trip_simultaneous(seed):
    rng = random.Random(seed)
    g = random_glue(rng, SIMULTANEOUS)
    comps = comps_for(rng, g.partition)
    assert apply_sos(glue_to_sos(g), comps) == apply_simultaneous(g, comps)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_adding_a_rule_never_removes_transitions(seed):
    rng = random.Random(seed)
    op = random_operator(rng)
    extra = random_operator(random.Random(seed + 1))
    comps = comps_for(rng, op.partition)
    labels = [r for r in extra.rules if r.label <= op.ports and
              all(j < op.arity and b <= op.partition[j] for j, b in r.negative)]
    bigger = SosOperator(op.partition, op.rules + tuple(labels))
    assert apply_sos(op, comps).transitions <= apply_sos(bigger, comps).transitions


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_premise_free_rules_are_interaction(seed):
    rng = random.Random(seed)
    op = random_operator(rng, max_premises=0)
    comps = comps_for(rng, op.partition)
    assert apply_sos(op, comps) == apply_interaction(op.labels, op.partition, comps)

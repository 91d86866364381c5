"""BIP glue operators: interaction models, priority models and glue expressions.

A glue operator is ``(partition, gamma, pi)``. Classical and relaxed modes
apply the priority model to the composed LTS after the interaction model;
simultaneous mode checks priorities component-wise while composing.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

from .lts import (Interaction, Lts, Port, fmt_interaction, interaction_key,
                  sorted_states)

CLASSICAL = "classical"
RELAXED = "relaxed"
SIMULTANEOUS = "simultaneous"
MODES = (CLASSICAL, RELAXED, SIMULTANEOUS)

Pair = Tuple[Interaction, Interaction]


class GlueError(ValueError):
    pass


@dataclass(frozen=True)
class PriorityModel:
    """Pairs ``(a, b)`` meaning ``a`` yields to ``b``."""

    pairs: FrozenSet[Pair] = frozenset()
    mode: str = CLASSICAL

    def __post_init__(self):
        object.__setattr__(self, "pairs",
                           frozenset((frozenset(a), frozenset(b)) for a, b in self.pairs))
        if self.mode not in MODES:
            raise GlueError(f"unknown priority mode {self.mode!r}")

    def higher(self, a: Interaction) -> FrozenSet[Interaction]:
        """The set K_a of interactions that inhibit ``a``."""
        return frozenset(b for low, b in self.pairs if low == a)


@dataclass(frozen=True)
class GlueOperator:
    partition: Tuple[FrozenSet[Port], ...]
    gamma: FrozenSet[Interaction]
    pi: PriorityModel = PriorityModel()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(frozenset(p) for p in self.partition))
        object.__setattr__(self, "gamma", frozenset(frozenset(a) for a in self.gamma))

    @property
    def arity(self):
        return len(self.partition)

    @property
    def ports(self) -> FrozenSet[Port]:
        return frozenset().union(*self.partition)

    @property
    def mode(self):
        return self.pi.mode


@dataclass
class ValidationReport:
    valid: bool = True
    problems: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def fail(self, msg):
        self.valid = False
        self.problems.append(msg)

    def __bool__(self):
        return self.valid


def _pair_text(a, b):
    return f"{fmt_interaction(a)} < {fmt_interaction(b)}"


def is_acyclic(pairs) -> bool:
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    done, active = set(), set()

    def visit(x):
        active.add(x)
        for y in succ.get(x, ()):
            if y in active or (y not in done and not visit(y)):
                return False
        active.discard(x)
        done.add(x)
        return True

    return all(x in done or visit(x) for x in list(succ))


def check_strict_order(pairs, report: ValidationReport, where=""):
    for a, b in pairs:
        if a == b:
            report.fail(f"{where}priority {_pair_text(a, b)} is reflexive")
    for a, b in pairs:
        for b2, c in pairs:
            if b == b2 and (a, c) not in pairs:
                report.fail(f"{where}priority not transitive: {_pair_text(a, b)} and "
                            f"{_pair_text(b, c)} but not {_pair_text(a, c)}")
    for a, b in pairs:
        if a != b and (b, a) in pairs:
            report.fail(f"{where}priority not asymmetric: {_pair_text(a, b)} and "
                        f"{_pair_text(b, a)}")


def validate_glue(op: GlueOperator) -> ValidationReport:
    report = ValidationReport()
    seen = {}
    for i, ports in enumerate(op.partition):
        for p in ports:
            if p in seen:
                report.fail(f"port {p} shared by components {seen[p] + 1} and {i + 1}")
            seen[p] = i
    ports = op.ports
    for a in op.gamma:
        if not a:
            report.fail("empty interaction in interaction model")
        elif not a <= ports:
            report.fail(f"interaction {fmt_interaction(a)} uses unknown ports")
    pairs = op.pi.pairs
    for a, b in pairs:
        if not b:
            report.fail("priority with empty higher interaction")
        if not (a | b) <= ports:
            report.fail(f"priority {_pair_text(a, b)} uses unknown ports")
    if op.mode in (CLASSICAL, RELAXED):
        for a, b in pairs:
            if a not in op.gamma or b not in op.gamma:
                report.fail(f"priority {_pair_text(a, b)} not within the interaction model")
    if op.mode == CLASSICAL:
        check_strict_order(pairs, report)
    acyclic = is_acyclic(pairs)
    report.notes.append("priority relation is " + ("acyclic" if acyclic else "cyclic"))
    return report


def _check_shape(partition, components):
    if len(partition) != len(components):
        raise GlueError(f"operator of arity {len(partition)} applied to "
                        f"{len(components)} components")
    for i, (ports, comp) in enumerate(zip(partition, components)):
        if comp.ports != ports:
            raise GlueError(f"component {i + 1} has ports {{{fmt_interaction(comp.ports)}}}, "
                            f"expected {{{fmt_interaction(ports)}}}")


def product_states(components: Sequence[Lts]):
    """Product state space; a single component keeps its own state names."""
    if len(components) == 1:
        return sorted_states(components[0].states)
    return [tuple(qs) for qs in itertools.product(*(sorted_states(c.states)
                                                      for c in components))]


def _as_tuple(state, n):
    return (state,) if n == 1 else state


def _from_tuple(qs):
    return qs[0] if len(qs) == 1 else tuple(qs)


def _parts(a: Interaction, partition):
    return [(i, a & ports) for i, ports in enumerate(partition) if a & ports]


def positive_moves(a: Interaction, partition, components, state):
    """Targets of product transitions labelled ``a`` from ``state`` by the interaction rule."""
    qs = _as_tuple(state, len(components))
    parts = _parts(a, partition)
    if not parts or frozenset().union(*(p for _, p in parts)) != a:
        return []
    options = []
    for i, part in parts:
        succ = components[i].successors(qs[i], part)
        if not succ:
            return []
        options.append(sorted_states(succ))
    targets = []
    for choice in itertools.product(*options):
        q2 = list(qs)
        for (i, _), t in zip(parts, choice):
            q2[i] = t
        targets.append(_from_tuple(q2))
    return targets


def components_enable(b: Interaction, partition, components, state) -> bool:
    """Whether every involved component enables its part of ``b``."""
    qs = _as_tuple(state, len(components))
    parts = _parts(b, partition)
    if not parts or frozenset().union(*(p for _, p in parts)) != b:
        return False
    return all(components[i].enables(qs[i], part) for i, part in parts)


def apply_interaction(gamma, partition, components: Sequence[Lts]) -> Lts:
    partition = tuple(frozenset(p) for p in partition)
    _check_shape(partition, components)
    gamma = sorted(gamma, key=interaction_key)
    states = product_states(components)
    trans = set()
    for q in states:
        for a in gamma:
            for t in positive_moves(a, partition, components, q):
                trans.add((q, a, t))
    return Lts(states, frozenset().union(*partition), trans)


def apply_priority(pi: PriorityModel, b: Lts) -> Lts:
    if pi.mode == SIMULTANEOUS:
        raise GlueError("simultaneous priority models must be applied with "
                        "apply_simultaneous")
    for low, high in pi.pairs:
        if not (low | high) <= b.ports:
            raise GlueError(f"priority {_pair_text(low, high)} not over the LTS ports")
    keep = set()
    for s, a, t in b.transitions:
        if not any(b.enables(s, high) for high in pi.higher(a)):
            keep.add((s, a, t))
    return Lts(b.states, b.ports, keep)


def apply_simultaneous(op: GlueOperator, components: Sequence[Lts]) -> Lts:
    """Interaction and priority models applied together, priorities checked per component.

    ``a`` fires when its positive premises hold and every ``b`` with ``a < b``
    has an involved component whose part of ``b`` is disabled.
    """
    if op.mode != SIMULTANEOUS:
        raise GlueError(f"apply_simultaneous needs simultaneous mode, got {op.mode}")
    _check_shape(op.partition, components)
    states = product_states(components)
    trans = set()
    for a in sorted(op.gamma, key=interaction_key):
        blockers = op.pi.higher(a)
        for q in states:
            moves = positive_moves(a, op.partition, components, q)
            if not moves:
                continue
            if any(components_enable(b, op.partition, components, q) for b in blockers):
                continue
            trans.update((q, a, t) for t in moves)
    return Lts(states, op.ports, trans)


def apply_glue(op: GlueOperator, components: Sequence[Lts]) -> Lts:
    if op.mode == SIMULTANEOUS:
        return apply_simultaneous(op, components)
    composed = apply_interaction(op.gamma, op.partition, components)
    if not op.pi.pairs:
        return composed
    return apply_priority(op.pi, composed)


def glue_enabled(op: GlueOperator, components: Sequence[Lts], state) -> FrozenSet[Interaction]:
    """Labels enabled at one product state of ``apply_glue(op, components)``.

    Avoids building the whole product; used for exhaustive sweeps over priority models.
    """
    _check_shape(op.partition, components)
    positive = {a for a in op.gamma
                if positive_moves(a, op.partition, components, state)}
    if op.mode == SIMULTANEOUS:
        return frozenset(a for a in positive
                         if not any(components_enable(b, op.partition, components, state)
                                    for b in op.pi.higher(a)))
    return frozenset(a for a in positive if not (op.pi.higher(a) & positive))


# -- glue expressions --------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def variables(self):
        return [self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Node:
    op: GlueOperator
    children: Tuple["Expression", ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def variables(self):
        return [v for c in self.children for v in c.variables()]

    def nodes(self):
        """Operator nodes, innermost first."""
        out = []
        for c in self.children:
            if isinstance(c, Node):
                out.extend(c.nodes())
        out.append(self)
        return out

    def __str__(self):
        name = self.op.name or "G"
        return "(" + " ".join([name] + [str(c) for c in self.children]) + ")"


Expression = Union[Var, Node]


def expression_ports(expr: Expression, leaf_ports: Dict[str, FrozenSet[Port]]):
    if isinstance(expr, Var):
        return leaf_ports[expr.name]
    return expr.op.ports


def validate_expression(expr: Expression) -> ValidationReport:
    report = ValidationReport()
    names = expr.variables()
    dupes = sorted({n for n in names if names.count(n) > 1})
    for n in dupes:
        report.fail(f"variable {n} used more than once")
    if isinstance(expr, Var):
        return report
    for node in expr.nodes():
        if len(node.children) != node.op.arity:
            report.fail(f"node {node.op.name or '?'} has arity {node.op.arity} "
                        f"but {len(node.children)} children")
            continue
        sub = validate_glue(node.op)
        for msg in sub.problems:
            report.fail(f"node {node.op.name or '?'}: {msg}")
        for ports, child in zip(node.op.partition, node.children):
            if isinstance(child, Node) and child.op.ports != ports:
                report.fail(f"node {node.op.name or '?'}: child {child.op.name or '?'} "
                            f"exports {{{fmt_interaction(child.op.ports)}}}, "
                            f"expected {{{fmt_interaction(ports)}}}")
    return report


def eval_expression(expr: Expression, bindings: Dict[str, Lts]) -> Lts:
    if isinstance(expr, Var):
        if expr.name not in bindings:
            raise GlueError(f"unbound variable {expr.name}")
        return bindings[expr.name]
    children = [eval_expression(c, bindings) for c in expr.children]
    return apply_glue(expr.op, children)

"""Compile SOS operators into glue expressions and check them against the oracle.

Three targets:

* ``layered``: ``(g2, {}) o (g1, pi_d) o ... o (g1, pi_1)``, classical, acyclic only
* ``relaxed``: ``(g2, {}) o (g1, pi)`` with ``pi`` possibly cyclic
* ``simultaneous``: the single node ``(g2, pi)``

where ``g2`` holds the rule labels, ``g1`` adds every inhibitor, and ``pi``
is the inhibiting relation.
"""

import random
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

from .analysis import (CyclicRelationError, InhibitingRelation, depth_layers,
                       detect_cycle, inhibiting_relation)
from .glue import (CLASSICAL, RELAXED, SIMULTANEOUS, GlueError, GlueOperator,
                   Node, PriorityModel, Var, eval_expression, validate_glue)
from .lts import Interaction, Lts, fmt_interaction, sorted_states, state_name, transition_key
from .sos import SosOperator, apply_sos

LAYERED = "layered"
TARGETS = (LAYERED, RELAXED, SIMULTANEOUS)


class CompilationError(ValueError):
    pass


@dataclass(frozen=True)
class CompilationResult:
    target: str
    expression: Node
    gamma1: FrozenSet[Interaction]
    gamma2: FrozenSet[Interaction]
    layers: Tuple[FrozenSet, ...]

    @property
    def nodes(self):
        return self.expression.nodes()


def interaction_models(op: SosOperator, rel: InhibitingRelation = None):
    rel = rel or inhibiting_relation(op)
    gamma2 = op.labels
    gamma1 = gamma2 | {b for _, b in rel.pairs}
    return frozenset(gamma1), frozenset(gamma2)


def _variables(op):
    return [Var(f"Z{i + 1}") for i in range(op.arity)]


def _node(name, partition, gamma, pairs=(), mode=CLASSICAL, children=()):
    glue = GlueOperator(partition, gamma, PriorityModel(frozenset(pairs), mode), name=name)
    report = validate_glue(glue)
    if not report:
        raise CompilationError(f"generated node {name} is not a valid {mode} glue: "
                               f"{report.problems[0]}")
    return Node(glue, tuple(children))


def compile_layered(op: SosOperator) -> CompilationResult:
    rel = inhibiting_relation(op)
    if not rel.acyclic:
        raise CyclicRelationError(detect_cycle(rel))
    gamma1, gamma2 = interaction_models(op, rel)
    layers = tuple(depth_layers(rel))
    whole = (op.ports,)
    expr = _variables(op)
    partition = op.partition
    for i, layer in enumerate(layers, start=1):
        expr = [_node(f"G1pi{i}", partition, gamma1, layer, children=expr)]
        partition = whole
    top = _node("G2", partition, gamma2, children=expr)
    return CompilationResult(LAYERED, top, gamma1, gamma2, layers)


def compile_relaxed(op: SosOperator) -> CompilationResult:
    rel = inhibiting_relation(op)
    gamma1, gamma2 = interaction_models(op, rel)
    inner = _node("G1pi", op.partition, gamma1, rel.pairs, RELAXED, _variables(op))
    top = _node("G2", (op.ports,), gamma2, children=[inner])
    return CompilationResult(RELAXED, top, gamma1, gamma2, (rel.pairs,))


def compile_simultaneous(op: SosOperator) -> CompilationResult:
    rel = inhibiting_relation(op)
    gamma1, gamma2 = interaction_models(op, rel)
    top = _node("G2pi", op.partition, gamma2, rel.pairs, SIMULTANEOUS, _variables(op))
    return CompilationResult(SIMULTANEOUS, top, gamma1, gamma2, (rel.pairs,))


def compile_operator(op: SosOperator, target: str) -> CompilationResult:
    compilers = {LAYERED: compile_layered, RELAXED: compile_relaxed,
                 SIMULTANEOUS: compile_simultaneous}
    if target not in compilers:
        raise CompilationError(f"unknown target {target!r}")
    return compilers[target](op)


# -- verification ------------------------------------------------------------

@dataclass(frozen=True)
class Discrepancy:
    tuple_index: int
    state: object
    interaction: Interaction
    target: object
    side: str  # "oracle-only" or "compiled-only"

    def describe(self):
        return (f"tuple {self.tuple_index}: {state_name(self.state)} "
                f"-{fmt_interaction(self.interaction)}-> {state_name(self.target)} "
                f"present {self.side.replace('-only', '')} only")

    def to_json(self):
        return {"tuple": self.tuple_index, "source": state_name(self.state),
                "interaction": fmt_interaction(self.interaction),
                "target": state_name(self.target), "side": self.side}


@dataclass(frozen=True)
class VerificationReport:
    equal: bool
    behaviours_tested: int
    first_discrepancy: Optional[Discrepancy] = None
    unequal_tuples: int = 0

    def __bool__(self):
        return self.equal

    def to_json(self):
        return {"equal": self.equal, "behaviours_tested": self.behaviours_tested,
                "unequal_tuples": self.unequal_tuples,
                "first_discrepancy": (self.first_discrepancy.to_json()
                                      if self.first_discrepancy else None)}


def compare(oracle: Lts, compiled: Lts, index=0) -> Optional[Discrepancy]:
    """First transition present on one side only, in deterministic order."""
    if oracle.states != compiled.states:
        extra = sorted_states(oracle.states ^ compiled.states)[0]
        raise GlueError(f"state spaces differ at {state_name(extra)}")
    only_oracle = oracle.transitions - compiled.transitions
    only_compiled = compiled.transitions - oracle.transitions
    tagged = [(t, "oracle-only") for t in only_oracle] + \
             [(t, "compiled-only") for t in only_compiled]
    if not tagged:
        return None
    (s, a, t), side = min(tagged, key=lambda x: transition_key(x[0]))
    return Discrepancy(index, s, a, t, side)


def _check_tuple(op, behaviours):
    if len(behaviours) != op.arity:
        raise CompilationError(f"behaviour tuple of size {len(behaviours)} for an "
                               f"operator of arity {op.arity}")
    for i, (ports, b) in enumerate(zip(op.partition, behaviours)):
        if b.ports != ports:
            raise CompilationError(f"behaviour {i + 1} has ports "
                                   f"{{{fmt_interaction(b.ports)}}}, expected "
                                   f"{{{fmt_interaction(ports)}}}")


def verify_compilation(op: SosOperator, result, behaviours: Sequence[Sequence[Lts]]
                       ) -> VerificationReport:
    """Literal transition-set equality of oracle and compiled expression per tuple."""
    expr = result.expression if isinstance(result, CompilationResult) else result
    first, unequal = None, 0
    for index, tup in enumerate(behaviours):
        _check_tuple(op, tup)
        bindings = {f"Z{i + 1}": b for i, b in enumerate(tup)}
        found = compare(apply_sos(op, tup), eval_expression(expr, bindings), index)
        if found is not None:
            unequal += 1
            first = first or found
    return VerificationReport(first is None, len(behaviours), first, unequal)


# -- random behaviours ---------------------------------------------------------

def nonempty_subsets(ports):
    ports = sorted(ports)
    out = []
    for mask in range(1, 1 << len(ports)):
        out.append(frozenset(p for k, p in enumerate(ports) if mask >> k & 1))
    return out


def random_lts(rng: random.Random, ports, max_states, density, name=""):
    k = rng.randint(1, max_states)
    states = [str(i) for i in range(1, k + 1)]
    labels = nonempty_subsets(ports)
    trans = [(s, a, t) for s in states for a in labels for t in states
             if rng.random() < density]
    return Lts(states, ports, trans, name=name)


def random_behaviours(partition, seed: int, max_states: int = 4, density: float = 0.3,
                      count: int = 10) -> List[Tuple[Lts, ...]]:
    """``count`` seeded tuples of random components, one per port set."""
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    rng = random.Random(seed)
    return [tuple(random_lts(rng, ports, max_states, density, name=f"B{i + 1}")
                  for i, ports in enumerate(partition))
            for _ in range(count)]

"""Inhibiting relation of an SOS operator and what it says about expressibility.

An interaction ``a`` is inhibited by ``b`` when ``b`` is the union of one
negative premise picked from each rule concluding ``a``. Acyclic relations
compile to layered classical glue; cyclic ones do not.
"""

import graphlib
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .glue import ValidationReport, apply_interaction, check_strict_order
from .lts import Interaction, Lts, fmt_interaction, interaction_key
from .sos import SosOperator, apply_sos, group_rules

EXPRESSIBLE = "expressible"
NOT_EXPRESSIBLE = "not-expressible"
UNKNOWN = "unknown"

MAX_CHOICE_MAPPINGS = 10 ** 6


class AnalysisError(ValueError):
    pass


class CyclicRelationError(AnalysisError):
    def __init__(self, cycle):
        self.cycle = cycle
        super().__init__("inhibiting relation has a cycle: " + format_cycle(cycle))


def format_cycle(cycle):
    names = [fmt_interaction(a) for a in cycle]
    return " < ".join(names + names[:1])


def sort_pairs(pairs):
    return sorted(pairs, key=lambda p: (interaction_key(p[0]), interaction_key(p[1])))


@dataclass(frozen=True)
class InhibitingRelation:
    pairs: FrozenSet[Tuple[Interaction, Interaction]]
    depth: Optional[Dict[Interaction, int]] = field(default=None, compare=False)

    @property
    def acyclic(self):
        return self.depth is not None


def _choice_unions(op: SosOperator, indices, limit):
    rules = [op.rules[l] for l in indices]
    if any(not r.negative for r in rules):
        return set()
    count = math.prod(len(r.negative) for r in rules)
    if count > limit:
        raise AnalysisError(f"{count} choice mappings for "
                            f"{fmt_interaction(rules[0].label)} exceed the limit of {limit}")
    options = [[b for _, b in r.sorted_premises()] for r in rules]
    return {frozenset().union(*pick) for pick in itertools.product(*options)}


def inhibiting_relation(op: SosOperator, limit=MAX_CHOICE_MAPPINGS) -> InhibitingRelation:
    pairs = set()
    for group in group_rules(op):
        for b in _choice_unions(op, group.rule_indices, limit):
            pairs.add((group.interaction, b))
    pairs = frozenset(pairs)
    return InhibitingRelation(pairs, _longest_path_depth(pairs))


def premise_collisions(op: SosOperator):
    """Same-label rule pairs forbidding different labels of one component.

    Inhibitor unions merge such premises into one label, so the compiled glue
    tests a different condition than the rules do.
    """
    found = []
    for group in group_rules(op):
        for x, s in enumerate(group.rule_indices):
            for t in group.rule_indices[x + 1:]:
                for j, b in op.rules[s].negative:
                    for k, c in op.rules[t].negative:
                        if j == k and b != c:
                            found.append((group.interaction, s, t, j))
    return sorted(set(found), key=lambda f: (interaction_key(f[0]),) + f[1:])


def _successors(pairs):
    succ = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    return succ


def _longest_path_depth(pairs):
    preds = {}
    for a, b in pairs:
        preds.setdefault(a, set())
        preds.setdefault(b, set()).add(a)
    try:
        order = list(graphlib.TopologicalSorter(preds).static_order())
    except graphlib.CycleError:
        return None
    depth = {}
    for x in order:
        depth[x] = max((depth[p] + 1 for p in preds[x]), default=0)
    return depth


def detect_cycle(rel) -> Optional[List[Interaction]]:
    """A cycle starting at the least interaction lying on any cycle, or None."""
    pairs = rel.pairs if isinstance(rel, InhibitingRelation) else frozenset(rel)
    succ = {a: sorted(bs, key=interaction_key) for a, bs in _successors(pairs).items()}
    for start in sorted(succ, key=interaction_key):
        # earlier starts lie on no cycle, so they can be skipped
        path, seen = [start], {start}
        stack = [iter(succ.get(start, ()))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                path.pop()
                continue
            if nxt == start:
                return list(path)
            if nxt in seen or interaction_key(nxt) < interaction_key(start):
                continue
            seen.add(nxt)
            path.append(nxt)
            stack.append(iter(succ.get(nxt, ())))
    return None


def depth_layers(rel: InhibitingRelation) -> List[FrozenSet[Tuple[Interaction, Interaction]]]:
    """Split an acyclic relation into layers by the depth of the lower interaction."""
    if not rel.acyclic:
        raise CyclicRelationError(detect_cycle(rel))
    if not rel.pairs:
        return []
    d = max(rel.depth.values())
    layers = [frozenset((a, b) for a, b in rel.pairs if rel.depth[a] == i) for i in range(d)]
    for i, layer in enumerate(layers):
        report = ValidationReport()
        check_strict_order(layer, report)
        if not report:
            raise AnalysisError(f"internal consistency defect: layer {i + 1} is not a "
                                f"strict partial order ({report.problems[0]})")
    return layers


@dataclass(frozen=True)
class Classification:
    acyclic: bool
    depth_max: Optional[int]
    verdicts: Dict[str, str]
    cycle: Optional[List[Interaction]] = None
    relation: Optional[InhibitingRelation] = None
    layers: Tuple = ()

    @property
    def layer_bound(self):
        return None if self.depth_max is None else self.depth_max + 1


def classify(op: SosOperator) -> Classification:
    rel = inhibiting_relation(op)
    empty = not rel.pairs
    verdicts = {
        "classical-strong": EXPRESSIBLE if empty else UNKNOWN,
        "classical-weak": EXPRESSIBLE if rel.acyclic else NOT_EXPRESSIBLE,
        "relaxed-weak": EXPRESSIBLE,
        "simultaneous-strong": EXPRESSIBLE,
    }
    if rel.acyclic:
        layers = tuple(depth_layers(rel))
        return Classification(True, len(layers), verdicts, None, rel, layers)
    return Classification(False, None, verdicts, detect_cycle(rel), rel)


def classification_report(op: SosOperator, cls: Classification = None) -> dict:
    """JSON-ready analysis report."""
    cls = cls or classify(op)

    def pair_list(pairs):
        return [{"low": fmt_interaction(a), "high": fmt_interaction(b)}
                for a, b in sort_pairs(pairs)]

    report = {
        "operator": op.name,
        "acyclic": cls.acyclic,
        "depth": cls.depth_max,
        "layer_bound": cls.layer_bound,
        "pairs": pair_list(cls.relation.pairs),
        "layers": [pair_list(layer) for layer in cls.layers],
        "verdicts": dict(cls.verdicts),
    }
    if cls.cycle is not None:
        report["cycle"] = [fmt_interaction(a) for a in cls.cycle]
    return report


# -- witnesses for cyclic relations ------------------------------------------

FINAL = "F"


def cycle_witness(op: SosOperator, cycle) -> List[Lts]:
    """Per-component behaviours on which ``op`` deadlocks while every glue cannot.

    Component ``j`` has states ``0, 1..l, F``: state ``i`` moves to ``F`` on
    ``a_i``'s part in ``j`` (when non-empty) and ``F`` loops on every such part.
    """
    cycle = list(cycle)
    if not cycle:
        raise AnalysisError("empty cycle")
    pairs = inhibiting_relation(op).pairs
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if (a, b) not in pairs:
            raise AnalysisError(f"{fmt_interaction(a)} < {fmt_interaction(b)} is not in "
                                "the inhibiting relation")
    witnesses = []
    for j, ports in enumerate(op.partition):
        states = ["0"] + [str(i) for i in range(1, len(cycle) + 1)] + [FINAL]
        trans = set()
        for i, a in enumerate(cycle, start=1):
            part = a & ports
            if part:
                trans.add((str(i), part, FINAL))
                trans.add((FINAL, part, FINAL))
        witnesses.append(Lts(states, ports, trans, name=f"W{j + 1}"))
    return witnesses


def final_state(n):
    return FINAL if n == 1 else (FINAL,) * n


def mixed_state(op: SosOperator, cycle, i):
    """Product state where exactly the components touched by ``cycle[i]`` sit at ``i + 1``."""
    qs = tuple(str(i + 1) if cycle[i] & ports else "0" for ports in op.partition)
    return qs[0] if len(qs) == 1 else qs


@dataclass
class WitnessCheck:
    final_deadlocked: bool
    final_enables_cycle: bool
    mixed_exact: bool
    details: List[str] = field(default_factory=list)

    @property
    def holds(self):
        return self.final_deadlocked and self.final_enables_cycle and self.mixed_exact


def check_witness(op: SosOperator, cycle, witnesses=None) -> WitnessCheck:
    """Evaluate the witness behaviours with the SOS oracle and the plain interaction model."""
    witnesses = witnesses or cycle_witness(op, cycle)
    oracle = apply_sos(op, witnesses)
    plain = apply_interaction(op.labels, op.partition, witnesses)
    fin = final_state(op.arity)
    details = []
    oracle_at_f = {a for s, a, _ in oracle.transitions if s == fin}
    plain_at_f = {a for s, a, _ in plain.transitions if s == fin}
    if oracle_at_f:
        details.append("all-F state enables " +
                       ", ".join(sorted(fmt_interaction(a) for a in oracle_at_f)))
    missing = [a for a in cycle if a not in plain_at_f]
    if missing:
        details.append("interaction model misses " +
                       ", ".join(fmt_interaction(a) for a in missing) + " at all-F")
    mixed_ok = True
    for i, a in enumerate(cycle):
        q = mixed_state(op, cycle, i)
        got = {b for s, b, _ in oracle.transitions if s == q}
        if got != {a}:
            mixed_ok = False
            details.append(f"state for {fmt_interaction(a)} enables "
                           f"{{{'; '.join(sorted(fmt_interaction(b) for b in got))}}}")
    return WitnessCheck(not oracle_at_f, not missing, mixed_ok, details)

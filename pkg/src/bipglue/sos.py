"""BIP-like SOS operators: rules whose positive premises follow the conclusion
label and whose negative premises forbid per-component labels.

:func:`apply_sos` evaluates the rules directly and is the reference oracle the
compiled glue expressions are checked against.
"""

import itertools
from dataclasses import dataclass, field
from typing import FrozenSet, List, Sequence, Tuple

from .glue import (GlueError, GlueOperator, ValidationReport, _check_shape,
                   positive_moves, product_states)
from .lts import Interaction, Lts, Port, fmt_interaction, interaction_key

Premise = Tuple[int, Interaction]


@dataclass(frozen=True)
class SosRule:
    """Conclusion ``label``; ``negative`` holds ``(j, b)``: component ``j`` must not enable ``b``.

    Component indices are 0-based.
    """

    label: Interaction
    negative: FrozenSet[Premise] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "label", frozenset(self.label))
        object.__setattr__(self, "negative",
                           frozenset((int(j), frozenset(b)) for j, b in self.negative))

    def sorted_premises(self):
        return sorted(self.negative, key=lambda p: (p[0], interaction_key(p[1])))

    def __str__(self):
        neg = " ".join(f"{j + 1}:{fmt_interaction(b)}" for j, b in self.sorted_premises())
        return fmt_interaction(self.label) + (f" neg {neg}" if neg else "")


@dataclass(frozen=True)
class SosOperator:
    partition: Tuple[FrozenSet[Port], ...]
    rules: Tuple[SosRule, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "partition", tuple(frozenset(p) for p in self.partition))
        object.__setattr__(self, "rules", tuple(self.rules))

    @property
    def arity(self):
        return len(self.partition)

    @property
    def ports(self):
        return frozenset().union(*self.partition)

    @property
    def labels(self) -> FrozenSet[Interaction]:
        return frozenset(r.label for r in self.rules)


@dataclass(frozen=True)
class RuleGroup:
    interaction: Interaction
    rule_indices: Tuple[int, ...]


def validate_operator(op: SosOperator) -> ValidationReport:
    report = ValidationReport()
    seen = {}
    for i, ports in enumerate(op.partition):
        for p in ports:
            if p in seen:
                report.fail(f"port {p} shared by components {seen[p] + 1} and {i + 1}")
            seen[p] = i
    ports = op.ports
    for l, rule in enumerate(op.rules):
        if not rule.label:
            report.fail(f"rule {l + 1}: empty label")
        elif not rule.label <= ports:
            report.fail(f"rule {l + 1}: label {fmt_interaction(rule.label)} uses unknown ports")
        for j, b in rule.negative:
            if not 0 <= j < op.arity:
                report.fail(f"rule {l + 1}: premise on component {j + 1} out of range")
            elif not b:
                report.fail(f"rule {l + 1}: empty negative premise on component {j + 1}")
            elif not b <= op.partition[j]:
                report.fail(f"rule {l + 1}: premise {fmt_interaction(b)} not within "
                            f"ports of component {j + 1}")
    counts = {}
    for l, rule in enumerate(op.rules):
        counts.setdefault(rule, []).append(l + 1)
    for rule, where in counts.items():
        if len(where) > 1:
            report.notes.append(f"duplicate rule '{rule}' at positions {where}")
    return report


def group_rules(op: SosOperator) -> List[RuleGroup]:
    groups = {}
    for l, rule in enumerate(op.rules):
        groups.setdefault(rule.label, []).append(l)
    return [RuleGroup(a, tuple(idx))
            for a, idx in sorted(groups.items(), key=lambda kv: kv[1][0])]


def rule_applies(rule: SosRule, components, state) -> bool:
    qs = state if len(components) > 1 else (state,)
    return not any(components[j].enables(qs[j], b) for j, b in rule.negative)


def apply_sos(op: SosOperator, components: Sequence[Lts]) -> Lts:
    _check_shape(op.partition, components)
    states = product_states(components)
    trans = set()
    for rule in op.rules:
        for q in states:
            moves = positive_moves(rule.label, op.partition, components, q)
            if moves and rule_applies(rule, components, q):
                trans.update((q, rule.label, t) for t in moves)
    return Lts(states, op.ports, trans)


def choice_mappings(blockers, partition):
    """Every ``j`` assigning each ``b`` in ``blockers`` a component it touches."""
    blockers = sorted(blockers, key=interaction_key)
    options = [[j for j, ports in enumerate(partition) if b & ports] for b in blockers]
    for choice in itertools.product(*options):
        yield dict(zip(blockers, choice))


def glue_to_sos(op: GlueOperator) -> SosOperator:
    """One rule per interaction and choice mapping over its inhibitors."""
    rules = []
    for a in sorted(op.gamma, key=interaction_key):
        blockers = op.pi.higher(a)
        if not blockers:
            rules.append(SosRule(a))
            continue
        stranded = [b for b in blockers if not b & op.ports]
        if stranded:
            raise GlueError(f"priority target {fmt_interaction(stranded[0])} touches "
                            "no component")
        for j in choice_mappings(blockers, op.partition):
            rules.append(SosRule(a, frozenset((j[b], b & op.partition[j[b]])
                                              for b in blockers)))
    unique = list(dict.fromkeys(rules))
    return SosOperator(op.partition, tuple(unique), name=op.name)

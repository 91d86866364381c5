"""Finite labelled transition systems over port sets.

Labels are interactions: non-empty frozensets of port names. States are
opaque hashables; products of two or more components use tuples, rendered
``q1.q2...qn`` by :func:`state_name`.
"""

import re
from dataclasses import dataclass, field
from typing import FrozenSet, Hashable, Iterable, Optional, Tuple

Port = str
Interaction = FrozenSet[Port]
State = Hashable
Transition = Tuple[State, Interaction, State]

PORT_RE = re.compile(r"^[A-Za-z0-9_]+$")


class LtsError(ValueError):
    pass


def interaction(value) -> Interaction:
    """Build an interaction from ``"q,r"``, an iterable of ports or a frozenset."""
    if isinstance(value, str):
        ports = [p for p in value.split(",")]
    else:
        ports = list(value)
    if not ports:
        raise LtsError("interactions are non-empty sets of ports")
    for p in ports:
        if not isinstance(p, str) or not PORT_RE.match(p):
            raise LtsError(f"bad port name {p!r}")
    return frozenset(ports)


def fmt_interaction(a: Iterable[Port]) -> str:
    return ",".join(sorted(a))


def interaction_key(a: Interaction):
    """Total order on interactions: by canonical text."""
    return fmt_interaction(a)


def state_name(q) -> str:
    if isinstance(q, tuple):
        return ".".join(state_name(x) for x in q)
    return str(q)


def state_key(q):
    # numeric-looking components sort numerically, so "10" follows "9"
    if isinstance(q, tuple):
        return tuple(state_key(x) for x in q)
    s = str(q)
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def sorted_states(states):
    return sorted(states, key=lambda q: (state_name(q).count("."), state_key(q)))


def transition_key(t: Transition):
    src, a, dst = t
    return (state_key(src), interaction_key(a), state_key(dst))


@dataclass(frozen=True)
class Lts:
    """An LTS ``(Q, P, ->)``; immutable, validated at construction."""

    states: FrozenSet[State]
    ports: FrozenSet[Port]
    transitions: FrozenSet[Transition] = frozenset()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "ports", frozenset(self.ports))
        trans = frozenset((s, frozenset(a), t) for s, a, t in self.transitions)
        object.__setattr__(self, "transitions", trans)
        for p in self.ports:
            if not PORT_RE.match(p):
                raise LtsError(f"bad port name {p!r}")
        for s, a, t in trans:
            if s not in self.states or t not in self.states:
                raise LtsError(f"transition {state_name(s)} -{fmt_interaction(a)}-> "
                               f"{state_name(t)} leaves the state set")
            if not a:
                raise LtsError("empty transition label")
            if not a <= self.ports:
                raise LtsError(f"label {fmt_interaction(a)} not over ports "
                               f"{fmt_interaction(self.ports)}")
        object.__setattr__(self, "_succ", _successor_index(trans))

    def successors(self, state, label: Interaction):
        return self._succ.get((state, label), frozenset())

    def enables(self, state, label: Interaction) -> bool:
        return (state, label) in self._succ

    def sorted_transitions(self):
        return sorted(self.transitions, key=transition_key)

    def __repr__(self):
        return (f"Lts({self.name or '?'}: {len(self.states)} states, "
                f"{len(self.transitions)} transitions)")


def _successor_index(transitions):
    index = {}
    for s, a, t in transitions:
        index.setdefault((s, a), set()).add(t)
    return {k: frozenset(v) for k, v in index.items()}


def _check_state(lts: Lts, state):
    if state not in lts.states:
        raise LtsError(f"unknown state {state_name(state)!r}")


def enabled(lts: Lts, state) -> FrozenSet[Interaction]:
    """Labels active in ``state``."""
    _check_state(lts, state)
    return frozenset(a for s, a, _ in lts.transitions if s == state)


def is_deadlock(lts: Lts, state) -> bool:
    return not enabled(lts, state)


def deadlock_states(lts: Lts) -> FrozenSet[State]:
    active = {s for s, _, _ in lts.transitions}
    return frozenset(lts.states - active)


@dataclass(frozen=True)
class BisimulationResult:
    bisimilar: bool
    relation: Optional[FrozenSet[Tuple[State, State]]] = None
    reason: str = ""

    def __bool__(self):
        return self.bisimilar


def _moves(lts: Lts):
    out = {q: [] for q in lts.states}
    for s, a, t in lts.transitions:
        out[s].append((a, t))
    return out


def greatest_bisimulation(a: Lts, b: Lts):
    """Largest bisimulation between ``a`` and ``b`` by fixpoint refinement."""
    moves_a, moves_b = _moves(a), _moves(b)
    rel = {(s, t) for s in a.states for t in b.states}

    def simulated(s_moves, t, t_index, pair):
        for label, s2 in s_moves:
            if not any(pair(s2, t2) in rel for t2 in t_index.successors(t, label)):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for s, t in list(rel):
            if not simulated(moves_a[s], t, b, lambda x, y: (x, y)) or \
                    not simulated(moves_b[t], s, a, lambda y, x: (x, y)):
                rel.discard((s, t))
                changed = True
    return frozenset(rel)


def bisimilar(a: Lts, b: Lts) -> BisimulationResult:
    """Strong bisimilarity with a relation total on both state sets."""
    if a.ports != b.ports:
        return BisimulationResult(False, reason="port mismatch")
    rel = greatest_bisimulation(a, b)
    left = {s for s, _ in rel}
    right = {t for _, t in rel}
    if left != a.states:
        missing = sorted_states(a.states - left)[0]
        return BisimulationResult(False, reason=f"state {state_name(missing)} of first "
                                                "LTS has no bisimilar partner")
    if right != b.states:
        missing = sorted_states(b.states - right)[0]
        return BisimulationResult(False, reason=f"state {state_name(missing)} of second "
                                                "LTS has no bisimilar partner")
    return BisimulationResult(True, rel)

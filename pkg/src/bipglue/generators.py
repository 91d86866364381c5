"""Seeded random operators, glues and priority models for property suites."""

import random
import string

from .compile import nonempty_subsets
from .glue import CLASSICAL, RELAXED, GlueOperator, PriorityModel
from .lts import interaction_key
from .sos import SosOperator, SosRule

# desk-scale bounds; keep choice-mapping enumeration and product comparison cheap
MAX_ARITY = 3
MAX_PORTS = 2
MAX_RULES = 5
MAX_PREMISES = 2


def random_partition(rng: random.Random, max_arity=MAX_ARITY, max_ports=MAX_PORTS):
    letters = iter(string.ascii_lowercase)
    n = rng.randint(1, max_arity)
    return tuple(frozenset(next(letters) for _ in range(rng.randint(1, max_ports)))
                 for _ in range(n))


def random_operator(rng: random.Random, max_arity=MAX_ARITY, max_ports=MAX_PORTS,
                    max_rules=MAX_RULES, max_premises=MAX_PREMISES, name="") -> SosOperator:
    partition = random_partition(rng, max_arity, max_ports)
    labels = nonempty_subsets(frozenset().union(*partition))
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        label = rng.choice(labels)
        premises = set()
        for _ in range(rng.randint(0, max_premises)):
            j = rng.randrange(len(partition))
            premises.add((j, rng.choice(nonempty_subsets(partition[j]))))
        rules.append(SosRule(label, frozenset(premises)))
    return SosOperator(partition, tuple(rules), name=name)


def transitive_closure(pairs):
    closure = set(pairs)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not extra:
            return frozenset(closure)
        closure |= extra


def random_acyclic(rng: random.Random, elements, p=0.4):
    """Random DAG: forward edges of a shuffled order."""
    order = sorted(elements, key=interaction_key)
    rng.shuffle(order)
    return frozenset((order[i], order[k]) for i in range(len(order))
                     for k in range(i + 1, len(order)) if rng.random() < p)


def random_strict_order(rng: random.Random, elements, p=0.4):
    return transitive_closure(random_acyclic(rng, elements, p))


def random_relation(rng: random.Random, lows, highs, max_out=2):
    """Each low element gets up to ``max_out`` random higher elements."""
    lows = sorted(lows, key=interaction_key)
    highs = sorted(highs, key=interaction_key)
    pairs = set()
    for a in lows:
        if highs:
            k = rng.randint(0, min(max_out, len(highs)))
            pairs.update((a, b) for b in rng.sample(highs, k))
    return frozenset(pairs)


def random_glue(rng: random.Random, mode=CLASSICAL, max_arity=MAX_ARITY,
                max_ports=MAX_PORTS, max_gamma=MAX_RULES, name=""):
    """Random glue valid for ``mode``.

    Classical priorities are strict partial orders within gamma x gamma, relaxed
    ones arbitrary relations there, simultaneous ones may reach outside gamma.
    """
    partition = random_partition(rng, max_arity, max_ports)
    universe = nonempty_subsets(frozenset().union(*partition))
    gamma = frozenset(rng.sample(universe, rng.randint(0, min(max_gamma, len(universe)))))
    if mode == CLASSICAL:
        pairs = random_strict_order(rng, gamma)
    elif mode == RELAXED:
        pairs = random_relation(rng, gamma, gamma)
    else:
        pairs = random_relation(rng, gamma, universe)
    return GlueOperator(partition, gamma, PriorityModel(pairs, mode), name=name)


def strict_partial_orders(elements):
    """Every strict partial order on ``elements``, each exactly once.

    Elements are inserted one at a time; a newcomer picks a down-closed set of
    predecessors and an up-closed set of successors with everything below it
    already below everything above it.
    """
    elements = sorted(elements, key=interaction_key)

    def extend(placed, order):
        if len(placed) == len(elements):
            yield frozenset(order)
            return
        x = elements[len(placed)]
        below = {a: {b for b, c in order if c == a} for a in placed}
        above = {a: {c for b, c in order if b == a} for a in placed}
        for down in _subsets(placed):
            if any(not below[d] <= down for d in down):
                continue
            rest = [a for a in placed if a not in down]
            for up in _subsets(rest):
                if any(not above[u] <= up for u in up):
                    continue
                if any((d, u) not in order for d in down for u in up):
                    continue
                new = set(order) | {(d, x) for d in down} | {(x, u) for u in up}
                yield from extend(placed + [x], new)

    yield from extend([], set())


def _subsets(items):
    items = list(items)
    for mask in range(1 << len(items)):
        yield {x for k, x in enumerate(items) if mask >> k & 1}

"""Direct constructions of stable outcomes for the tractable special cases."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .model import (
    DEFAULT_BUDGET,
    Agent,
    Instance,
    ModelError,
    Outcome,
    Placement,
    build_rooms,
    classify,
    placement,
)
from .oracle import enumerate_outcomes
from .verify import Concept, exchange_at, find_envy, find_pareto_improvement


# -- room size two ----------------------------------------------------------------

def _tier(agent: Agent, mixed: int, pure: int) -> int:
    """0: prefers the pure room, 1: indifferent, 2: prefers the mixed room."""
    c = agent.pref
    if c.prefers(pure, mixed):
        return 0
    if c.prefers(mixed, pure):
        return 2
    return 1


def solve_size_two(instance: Instance) -> Outcome:
    """Pairs that are core stable, exchange stable and Pareto optimal.

    First as many pairs as possible of a red and a blue agent who both
    weakly like a mixed pair; agents who strictly like it go first.  The
    rest go into pure pairs, and with odd leftovers either one more mixed
    pair is formed or the last willing mixed pair is dissolved.
    """
    if instance.s != 2:
        raise ModelError(f"size-two construction needs s = 2, got s = {instance.s}")
    blue = [a for a in instance.agents if not a.red]
    red = [a for a in instance.agents if a.red]
    # blue: 1 is mixed, 0 pure; red: 1 is mixed, 2 pure
    b_star = sorted((a for a in blue if a.pref.weakly_prefers(1, 0)), key=lambda a: (_tier(a, 1, 0) != 2, a.id))
    r_star = sorted((a for a in red if a.pref.weakly_prefers(1, 2)), key=lambda a: (_tier(a, 1, 2) != 2, a.id))
    m = min(len(b_star), len(r_star))
    paired = {a.id for a in b_star[:m]} | {a.id for a in r_star[:m]}
    b_rest = sorted((a for a in blue if a.id not in paired), key=lambda a: (_tier(a, 1, 0), a.id))
    r_rest = sorted((a for a in red if a.id not in paired), key=lambda a: (_tier(a, 1, 2), a.id))
    p, q = len(b_rest), len(r_rest)

    def pairs(seq, upto):
        return [(seq[i].id, seq[i + 1].id) for i in range(0, upto, 2)]

    mixed = [(b_star[i].id, r_star[i].id) for i in range(m)]
    if p % 2 == 0:
        rooms = mixed + pairs(b_rest, p) + pairs(r_rest, q)
    elif m >= 1 and b_star[m - 1].pref.weakly_prefers(0, 1) and r_star[m - 1].pref.weakly_prefers(2, 1):
        # the last mixed pair is happy to split into two pure pairs
        rooms = mixed[:m - 1] + pairs(b_rest, p - 1) + pairs(r_rest, q - 1)
        rooms += [(r_rest[q - 1].id, r_star[m - 1].id), (b_rest[p - 1].id, b_star[m - 1].id)]
    else:
        rooms = mixed + pairs(b_rest, p - 1) + pairs(r_rest, q - 1)
        rooms += [(r_rest[q - 1].id, b_rest[p - 1].id)]
    return Outcome(tuple(rooms))


# -- dichotomous preferences --------------------------------------------------------

def approved(agent: Agent) -> frozenset[int]:
    """Approved numerators; a single class means every numerator is approved."""
    return agent.pref.classes[0]


def solve_dichotomous_core(instance: Instance) -> Outcome:
    """Greedy core construction for approval-style preferences.

    For numerators 0..s in ascending order, peel off as many rooms as
    possible whose members all approve that numerator; the rest fill the
    remaining rooms in id order.
    """
    if not classify(instance).dichotomous:
        raise ModelError("preferences are not dichotomous")
    s = instance.s
    free = {a.id for a in instance.agents}
    rooms: list[list[str]] = []
    for ell in range(s + 1):
        reds = [a.id for a in instance.agents if a.red and a.id in free and ell in approved(a)]
        blues = [a.id for a in instance.agents if not a.red and a.id in free and ell in approved(a)]
        t = min(len(reds) // ell if ell else len(blues) // s, len(blues) // (s - ell) if ell < s else len(reds) // s)
        for x in range(t):
            room = reds[x * ell:(x + 1) * ell] + blues[x * (s - ell):(x + 1) * (s - ell)]
            rooms.append(room)
            free.difference_update(room)
    rest = [a.id for a in instance.agents if a.id in free]
    rooms += [rest[i:i + s] for i in range(0, len(rest), s)]
    return Outcome(tuple(tuple(r) for r in rooms))


# -- same-type swaps ------------------------------------------------------------------

@dataclass
class SwapLog:
    swaps: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.swaps)


def _outcome_from_rooms(instance: Instance, room: np.ndarray) -> Outcome:
    groups: dict[int, list[str]] = {}
    for i, a in enumerate(instance.agents):
        groups.setdefault(int(room[i]), []).append(a.id)
    return Outcome(tuple(tuple(g) for g in groups.values()))


def local_search_same_type(instance: Instance, start: Outcome, strong: bool = False,
                           log: SwapLog | None = None) -> Outcome:
    """Apply the first same-type (weak) exchange deviation until none is left.

    Same-type swaps leave every room's numerator unchanged, so each swap
    makes one agent strictly better and nobody worse; at most ``n * s``
    swaps can happen.
    """
    pl = placement(instance, start)
    room = pl.room.copy()
    cur = Placement(room, pl.theta)
    idx = instance.index
    limit = instance.n * instance.s
    done = 0
    while True:
        w = exchange_at(instance, cur, True, strong)
        if w is None:
            break
        a, b = idx[w.a], idx[w.b]
        room[a], room[b] = room[b], room[a]
        done += 1
        if log is not None:
            log.swaps.append((w.a, w.b))
        if done > limit:
            raise AssertionError("same-type swaps exceeded n*s; the improvement argument is broken")
    return _outcome_from_rooms(instance, room)


# -- same-type envy with strict preferences ------------------------------------------------

def _guesses(s: int):
    """Non-empty subsets of 0..s as sorted tuples, in lexicographic order."""
    subsets = [c for size in range(1, s + 2) for c in itertools.combinations(range(s + 1), size)]
    return sorted(subsets)


def solve_same_type_envy_free(instance: Instance) -> Outcome | None:
    """Decide same-type envy-freeness for strict preferences.

    Guess the set X of numerators that occur.  Every red agent must sit at
    her favourite of X without 0 (rooms with reds), every blue agent at her
    favourite of X without s.  The guess works iff each bucket fills a
    positive number of rooms exactly.
    """
    if not classify(instance).strict:
        raise ModelError("this algorithm needs strict preferences")
    s = instance.s
    if instance.n == 0:
        return Outcome(())
    for guess in _guesses(s):
        red_opts = [v for v in guess if v != 0]
        blue_opts = [v for v in guess if v != s]
        buckets: dict[int, tuple[list[str], list[str]]] = {v: ([], []) for v in guess}
        ok = True
        for a in instance.agents:
            opts = red_opts if a.red else blue_opts
            if not opts:
                ok = False
                break
            best = min(opts, key=lambda v: a.pref.rank[v])
            buckets[best][0 if a.red else 1].append(a.id)
        if not ok:
            continue
        for v, (reds, blues) in buckets.items():
            t = len(blues) // s if v == 0 else len(reds) // v
            if t < 1 or len(reds) != t * v or len(blues) != t * (s - v):
                ok = False
                break
        if not ok:
            continue
        outcome = build_rooms(s, buckets)
        if find_envy(instance, outcome, "same_type") is not None:
            raise AssertionError(f"guess {guess} passed the count test but the outcome has envy")
        return outcome
    return None


# -- Pareto optimality ---------------------------------------------------------------------

def pareto_optimal_outcome(instance: Instance, budget: int = DEFAULT_BUDGET, start: Outcome | None = None) -> Outcome:
    """Chain Pareto improvements from ``start`` (default: first canonical outcome)."""
    current = start if start is not None else next(iter(enumerate_outcomes(instance, budget)))
    for _ in range(instance.n * instance.s + 1):
        better = find_pareto_improvement(instance, current, budget)
        if better is None:
            return current
        current = better
    raise AssertionError("more than n*s Pareto improvements in a row")


# -- dispatch ------------------------------------------------------------------------------

def id_order_outcome(instance: Instance) -> Outcome:
    """Agents cut into rooms in id order; the default local-search start."""
    ids = [a.id for a in instance.agents]
    s = instance.s
    return Outcome(tuple(tuple(ids[i:i + s]) for i in range(0, len(ids), s)))


def constructor_for(instance: Instance, concept: Concept):
    """The direct construction that applies to ``concept`` here, or ``None``."""
    concept = Concept(concept)
    flags = classify(instance)
    if instance.s == 2:
        if concept in (Concept.CORE, Concept.EXCHANGE, Concept.PARETO):
            return solve_size_two
        if concept is Concept.STRONG_EXCHANGE and flags.strict:
            return solve_size_two
    if concept is Concept.CORE and flags.dichotomous:
        return solve_dichotomous_core
    if concept in (Concept.SAME_TYPE_EXCHANGE, Concept.STRONG_SAME_TYPE_EXCHANGE):
        strong = concept is Concept.STRONG_SAME_TYPE_EXCHANGE
        return lambda inst: local_search_same_type(inst, id_order_outcome(inst), strong)
    if concept is Concept.SAME_TYPE_ENVY and flags.strict:
        return solve_same_type_envy_free
    if concept is Concept.PARETO:
        return pareto_optimal_outcome
    return None


def construct(instance: Instance, concept: Concept, budget: int = DEFAULT_BUDGET) -> Outcome | None:
    """Run the applicable construction; ``None`` only where it decides non-existence."""
    fn = constructor_for(instance, concept)
    if fn is None:
        raise ModelError(f"no direct construction for {Concept(concept).value} on this instance")
    if fn is pareto_optimal_outcome:
        return fn(instance, budget)
    return fn(instance)

"""Stability checkers that return an explicit witness or ``None``.

The blocking, exchange and envy checks are polynomial and run on the
compiled kernels.  Pareto verification is exhaustive but works on count
profiles rather than concrete partitions, since agents with the same colour
and order are interchangeable.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Instance,
    Outcome,
    Placement,
    build_rooms,
    placement,
)


class Concept(str, enum.Enum):
    CORE = "core"
    STRONG_CORE = "strong-core"
    EXCHANGE = "exchange"
    STRONG_EXCHANGE = "strong-exchange"
    SAME_TYPE_EXCHANGE = "same-type-exchange"
    STRONG_SAME_TYPE_EXCHANGE = "strong-same-type-exchange"
    ENVY = "envy"
    SAME_TYPE_ENVY = "same-type-envy"
    PARETO = "pareto"


@dataclass(frozen=True)
class BlockingWitness:
    numerator: int
    red_members: tuple[str, ...]
    blue_members: tuple[str, ...]
    weak: bool

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(sorted(self.red_members + self.blue_members))

    def to_json(self) -> dict:
        return {
            "type": "blocking",
            "numerator": self.numerator,
            "red": list(self.red_members),
            "blue": list(self.blue_members),
            "weak": self.weak,
        }


@dataclass(frozen=True)
class SwapWitness:
    a: str
    b: str
    kind: str  # "same_type" or "different_type"
    weak: bool

    def to_json(self) -> dict:
        return {"type": "swap", "a": self.a, "b": self.b, "kind": self.kind, "weak": self.weak}


@dataclass(frozen=True)
class EnvyWitness:
    envier: str
    envied: str

    def to_json(self) -> dict:
        return {"type": "envy", "envier": self.envier, "envied": self.envied}


@dataclass(frozen=True)
class ParetoWitness:
    improvement: Outcome

    def to_json(self) -> dict:
        return {"type": "pareto", "improvement": self.improvement.to_json()}


def current_numerators(pl: Placement) -> np.ndarray:
    return pl.theta[pl.room].astype(np.int32)


# -- core ---------------------------------------------------------------------

def blocking_at(instance: Instance, pl: Placement, strong: bool) -> BlockingWitness | None:
    s = instance.s
    rank = instance.rank_array
    color = instance.color_array
    cur = current_numerators(pl)
    j = kernels.first_blocking(color, rank, cur, s, strong)
    if j < 0:
        return None
    here = rank[np.arange(instance.n), cur]
    there = rank[:, j]
    ids = [a.id for a in instance.agents]
    red = color == 1
    strict = there < here
    weak = there <= here
    pool = weak if strong else strict
    reds = [ids[i] for i in np.flatnonzero(pool & red)]
    blues = [ids[i] for i in np.flatnonzero(pool & ~red)]
    pick_r, pick_b = reds[:j], blues[:s - j]
    if strong:
        strict_ids = {ids[i] for i in np.flatnonzero(strict)}
        if not strict_ids.intersection(pick_r + pick_b):
            # Swap in the earliest strict agent of either colour and keep the
            # lexicographically smaller member set.
            options = []
            sr = [a for a in reds if a in strict_ids]
            sb = [a for a in blues if a in strict_ids]
            if j >= 1 and sr:
                options.append((sorted([sr[0]] + pick_r[:j - 1]), pick_b))
            if s - j >= 1 and sb:
                options.append((pick_r, sorted([sb[0]] + pick_b[:s - j - 1])))
            pick_r, pick_b = min(options, key=lambda o: sorted(o[0] + o[1]))
    return BlockingWitness(int(j), tuple(pick_r), tuple(pick_b), strong)


def find_blocking(instance: Instance, outcome: Outcome, strong: bool = False) -> BlockingWitness | None:
    """Witness coalition for (strong) core instability, or ``None`` if stable."""
    return blocking_at(instance, placement(instance, outcome), strong)


# -- exchange and envy ----------------------------------------------------------

def exchange_at(instance: Instance, pl: Placement, same_type: bool, strong: bool,
                dim: np.ndarray | None = None) -> SwapWitness | None:
    if dim is None:
        dim = np.zeros(instance.n, dtype=np.int32)
    a, b = kernels.first_exchange(instance.color_array, instance.rank_array, pl.room, pl.theta, dim,
                                  same_type, strong)
    if a < 0:
        return None
    agents = instance.agents
    kind = "same_type" if agents[a].color is agents[b].color else "different_type"
    return SwapWitness(agents[a].id, agents[b].id, kind, strong)


def find_exchange_deviation(instance: Instance, outcome: Outcome, mode: str = "any",
                            strong: bool = False) -> SwapWitness | None:
    """First ordered pair (by id) with an exchange deviation.

    ``mode`` is ``"any"`` or ``"same_type"``.  With ``strong`` the pair only
    needs a weak deviation: ``a`` strictly better off, ``b`` weakly.
    """
    if mode not in ("any", "same_type"):
        raise ValueError(f"mode must be 'any' or 'same_type', got {mode!r}")
    return exchange_at(instance, placement(instance, outcome), mode == "same_type", strong)


def envy_at(instance: Instance, pl: Placement, same_type: bool) -> EnvyWitness | None:
    a, b = kernels.first_envy(instance.color_array, instance.rank_array, pl.room, pl.theta, same_type)
    if a < 0:
        return None
    return EnvyWitness(instance.agents[a].id, instance.agents[b].id)


def find_envy(instance: Instance, outcome: Outcome, mode: str = "any") -> EnvyWitness | None:
    if mode not in ("any", "same_type"):
        raise ValueError(f"mode must be 'any' or 'same_type', got {mode!r}")
    return envy_at(instance, placement(instance, outcome), mode == "same_type")


# -- Pareto ---------------------------------------------------------------------

@dataclass
class _Profile:
    red: bool
    rank: list[int]  # rank per numerator
    members: list[str]  # ids sorted by (current rank, id)
    old: list[int]  # current ranks, ascending
    order: list[int]  # admissible numerators, best first


def _profiles(instance: Instance, cur: dict[str, int]) -> list[_Profile]:
    s = instance.s
    groups: dict[tuple, list] = defaultdict(list)
    for a in instance.agents:
        groups[(a.red, a.pref)].append(a.id)
    out = []
    for (red, pref), ids in groups.items():
        rank = [pref.rank[v] for v in range(s + 1)]
        ids = sorted(ids, key=lambda x: (rank[cur[x]], x))
        allowed = range(1, s + 1) if red else range(0, s)
        order = sorted(allowed, key=lambda v: (rank[v], v))
        out.append(_Profile(red, rank, ids, [rank[cur[x]] for x in ids], order))
    out.sort(key=lambda p: min(p.members))
    return out


def _room_vectors(instance: Instance):
    """All (n_0..n_s) with sum k and red total r, lexicographic order."""
    s, k, r = instance.s, instance.k, instance.r

    def rec(j, rooms_left, reds_left, acc):
        if j == s:
            if reds_left == s * rooms_left:
                yield acc + [rooms_left]
            return
        for c in range(rooms_left + 1):
            if j * c > reds_left:
                break
            # the remaining rooms can hold at most s reds each
            if reds_left - j * c > s * (rooms_left - c):
                continue
            yield from rec(j + 1, rooms_left - c, reds_left - j * c, acc + [c])

    yield from rec(0, k, r, [])


def find_pareto_improvement(instance: Instance, outcome: Outcome,
                            budget: int = DEFAULT_BUDGET) -> Outcome | None:
    """An outcome that weakly improves every agent and strictly improves one.

    Exhaustive over room-count vectors and per-profile numerator multisets.
    Raises :class:`BudgetExceeded` when more than ``budget`` search nodes
    would be visited; ``None`` means no improvement exists.
    """
    pl = placement(instance, outcome)
    cur = {a.id: int(pl.theta[pl.room[i]]) for i, a in enumerate(instance.agents)}
    s = instance.s
    profiles = _profiles(instance, cur)
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(budget, "Pareto search nodes")

    def distributions(p: _Profile, cap: list[int]):
        """Numerator lists (best first) placing p's agents without hurting anyone."""
        m = len(p.members)
        order = p.order

        def rec(idx, placed, acc):
            tick()
            if placed == m:
                yield acc
                return
            if idx == len(order):
                return
            v = order[idx]
            rv = p.rank[v]
            if rv > p.old[placed]:
                return  # every later numerator is at least as bad
            top = min(cap[v], m - placed)
            # the agent in sorted slot t may only move to rank <= old[t]
            while top > 0 and p.old[placed + top - 1] < rv:
                top -= 1
            for x in range(top, -1, -1):
                yield from rec(idx + 1, placed + x, acc + [v] * x)

        yield from rec(0, 0, [])

    for n_vec in _room_vectors(instance):
        cap_r = [j * n_vec[j] for j in range(s + 1)]
        cap_b = [(s - j) * n_vec[j] for j in range(s + 1)]
        chosen: list[list[int]] = []

        def search(pi: int, improved: bool) -> bool:
            if pi == len(profiles):
                return improved
            p = profiles[pi]
            cap = cap_r if p.red else cap_b
            for dist in distributions(p, cap):
                for v in dist:
                    cap[v] -= 1
                chosen.append(dist)
                better = improved or sum(p.rank[v] for v in dist) < sum(p.old)
                if search(pi + 1, better):
                    return True
                chosen.pop()
                for v in dist:
                    cap[v] += 1
            return False

        if search(0, False):
            classes: dict[int, tuple[list[str], list[str]]] = {
                j: ([], []) for j in range(s + 1) if n_vec[j]
            }
            for p, dist in zip(profiles, chosen):
                for agent_id, v in zip(p.members, dist):
                    classes[v][0 if p.red else 1].append(agent_id)
            for reds, blues in classes.values():
                reds.sort()
                blues.sort()
            return build_rooms(s, classes)
    return None


# -- dispatch -------------------------------------------------------------------

def witness_at(instance: Instance, pl: Placement, concept: Concept, outcome: Outcome | None = None,
               budget: int = DEFAULT_BUDGET):
    """Witness for ``concept`` at a placement; ``None`` when stable."""
    concept = Concept(concept)
    if concept is Concept.CORE:
        return blocking_at(instance, pl, False)
    if concept is Concept.STRONG_CORE:
        return blocking_at(instance, pl, True)
    if concept is Concept.EXCHANGE:
        return exchange_at(instance, pl, False, False)
    if concept is Concept.STRONG_EXCHANGE:
        return exchange_at(instance, pl, False, True)
    if concept is Concept.SAME_TYPE_EXCHANGE:
        return exchange_at(instance, pl, True, False)
    if concept is Concept.STRONG_SAME_TYPE_EXCHANGE:
        return exchange_at(instance, pl, True, True)
    if concept is Concept.ENVY:
        return envy_at(instance, pl, False)
    if concept is Concept.SAME_TYPE_ENVY:
        return envy_at(instance, pl, True)
    if outcome is None:
        raise ValueError("Pareto check needs the outcome itself")
    better = find_pareto_improvement(instance, outcome, budget)
    return None if better is None else ParetoWitness(better)


def find_witness(instance: Instance, outcome: Outcome, concept: Concept, budget: int = DEFAULT_BUDGET):
    return witness_at(instance, placement(instance, outcome), concept, outcome, budget)


def is_stable(instance: Instance, outcome: Outcome, concept: Concept, budget: int = DEFAULT_BUDGET) -> bool:
    return find_witness(instance, outcome, concept, budget) is None


def pareto_dominates(instance: Instance, new: Outcome, old: Outcome) -> bool:
    """Direct check: everyone weakly better in ``new``, somebody strictly."""
    a = _numerators_of(instance, new)
    b = _numerators_of(instance, old)
    strict = False
    for agent in instance.agents:
        rn, ro = agent.pref.rank[a[agent.id]], agent.pref.rank[b[agent.id]]
        if rn > ro:
            return False
        strict |= rn < ro
    return strict


def _numerators_of(instance: Instance, outcome: Outcome) -> dict[str, int]:
    pl = placement(instance, outcome)
    return {a.id: int(pl.theta[pl.room[i]]) for i, a in enumerate(instance.agents)}


__all__ = [
    "Concept",
    "BlockingWitness",
    "SwapWitness",
    "EnvyWitness",
    "ParetoWitness",
    "find_blocking",
    "find_exchange_deviation",
    "find_envy",
    "find_pareto_improvement",
    "find_witness",
    "is_stable",
    "pareto_dominates",
    "witness_at",
    "blocking_at",
    "exchange_at",
    "envy_at",
]

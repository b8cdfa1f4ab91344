"""Exhaustive ground truth for small instances.

Outcomes are enumerated up to swapping agents with identical colour and
order: such agents are interchangeable for every notion checked here.
Exceeding a budget raises :class:`BudgetExceeded`; nothing is truncated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from sympy.utilities.iterables import multiset_partitions

from .model import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    Instance,
    ModelError,
    Outcome,
    WeakOrder,
    placement,
)
from .marriage import MarriageInstance, MarriageOutcome, marriage_witness
from .verify import Concept, witness_at


def _profile_groups(instance: Instance) -> list[list[str]]:
    """Agent ids grouped by (colour, order); groups ordered by smallest id."""
    groups: dict[tuple, list[str]] = {}
    for a in instance.agents:
        groups.setdefault((a.red, a.pref), []).append(a.id)
    return sorted(groups.values(), key=lambda ids: ids[0])


def canonical_rooms(counts: Sequence[int], s: int) -> Iterator[list[tuple[int, ...]]]:
    """Partitions of a multiset of profile indices into sorted rooms of size ``s``.

    Each room is a non-decreasing tuple; the next room always holds the
    smallest remaining profile and rooms appear in non-decreasing order, so
    every multiset partition is produced once.
    """
    counts = list(counts)
    total = sum(counts)
    if total % s:
        raise ModelError("profile counts do not fill whole rooms")

    def fill(rest: list[int], start: int, need: int, acc: list[int], floor: tuple[int, ...] | None):
        if need == 0:
            yield tuple(acc)
            return
        for p in range(start, len(rest)):
            if not rest[p]:
                continue
            cand = acc + [p]
            # prune: the room must not sort before the previous one
            if floor is not None and tuple(cand) < floor[:len(cand)]:
                continue
            rest[p] -= 1
            yield from fill(rest, p, need - 1, cand, floor)
            rest[p] += 1

    def rec(rest: list[int], left: int, prev: tuple[int, ...] | None, acc: list[tuple[int, ...]]):
        if left == 0:
            yield list(acc)
            return
        first = next(p for p, c in enumerate(rest) if c)
        floor = prev if prev is not None and prev[0] == first else None
        rest[first] -= 1
        # fill() keeps the room's members removed from ``rest`` while it yields
        for room in fill(rest, first, s - 1, [first], floor):
            if floor is not None and room < floor:
                continue
            acc.append(room)
            yield from rec(rest, left - s, room, acc)
            acc.pop()
        rest[first] += 1

    yield from rec(counts, total, None, [])


def enumerate_outcomes(instance: Instance, budget: int = DEFAULT_BUDGET) -> Iterator[Outcome]:
    """Every outcome once up to interchangeable agents, in a fixed order."""
    groups = _profile_groups(instance)
    if instance.n == 0:
        yield Outcome(())
        return
    seen = 0
    for rooms in canonical_rooms([len(g) for g in groups], instance.s):
        seen += 1
        if seen > budget:
            raise BudgetExceeded(budget)
        pos = [0] * len(groups)
        out = []
        for room in rooms:
            members = []
            for p in room:
                members.append(groups[p][pos[p]])
                pos[p] += 1
            out.append(tuple(members))
        yield Outcome(tuple(out))


def count_outcomes(instance: Instance, budget: int = DEFAULT_BUDGET) -> int:
    return sum(1 for _ in enumerate_outcomes(instance, budget))


def raw_outcome_count(n: int, s: int) -> int:
    """Number of partitions of n distinct agents into rooms of size s."""
    k = n // s
    return math.factorial(n) // (math.factorial(s) ** k * math.factorial(k))


def oracle_exists(instance: Instance, concept: Concept, budget: int = DEFAULT_BUDGET) -> Outcome | None:
    """First enumerated outcome that is stable for ``concept``, else ``None``."""
    concept = Concept(concept)
    for outcome in enumerate_outcomes(instance, budget):
        pl = placement(instance, outcome, check=False)
        if witness_at(instance, pl, concept, outcome, budget) is None:
            return outcome
    return None


def stable_outcomes(instance: Instance, concept: Concept, budget: int = DEFAULT_BUDGET) -> Iterator[Outcome]:
    concept = Concept(concept)
    for outcome in enumerate_outcomes(instance, budget):
        pl = placement(instance, outcome, check=False)
        if witness_at(instance, pl, concept, outcome, budget) is None:
            yield outcome


# -- marriage model -------------------------------------------------------------

def marriage_outcome_count(instance: MarriageInstance) -> int:
    return math.factorial(instance.k) ** (instance.s - 1)


def enumerate_marriage_outcomes(instance: MarriageInstance, budget: int = DEFAULT_BUDGET) -> Iterator[MarriageOutcome]:
    """Every outcome once: room i holds the i-th dimension-1 agent, the rest permute."""
    total = marriage_outcome_count(instance)
    if total > budget:
        raise BudgetExceeded(budget, f"marriage outcomes ({total} needed)")
    if instance.n == 0:
        yield MarriageOutcome(())
        return
    dims = [[a.id for a in instance.members(d)] for d in range(1, instance.s + 1)]
    anchor = dims[0]
    for perms in itertools.product(*(itertools.permutations(ids) for ids in dims[1:])):
        rooms = [(a,) + tuple(p[i] for p in perms) for i, a in enumerate(anchor)]
        yield MarriageOutcome(tuple(rooms))


def marriage_oracle_exists(instance: MarriageInstance, concept: Concept,
                           budget: int = DEFAULT_BUDGET) -> MarriageOutcome | None:
    concept = Concept(concept)
    for outcome in enumerate_marriage_outcomes(instance, budget):
        if marriage_witness(instance, outcome, concept) is None:
            return outcome
    return None


# -- anonymous hedonic games ------------------------------------------------------

@dataclass(frozen=True)
class AnonymousGame:
    """Agents ``0..n-1`` with weak orders over coalition sizes ``1..n``."""

    prefs: tuple[WeakOrder, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefs", tuple(self.prefs))
        for p in self.prefs:
            p.check_domain(range(1, self.n + 1))

    @property
    def n(self) -> int:
        return len(self.prefs)

    def to_json(self) -> dict:
        return {"kind": "anonymous", "prefs": [p.to_lists() for p in self.prefs]}

    @classmethod
    def from_json(cls, data: dict) -> AnonymousGame:
        from .model import ParseError, parse_pref

        if data.get("kind", "anonymous") != "anonymous":
            raise ParseError(f"expected kind 'anonymous', got {data.get('kind')!r}")
        raw = data.get("prefs")
        if not isinstance(raw, list):
            raise ParseError("'prefs' must be a list of orders")
        try:
            return cls(tuple(parse_pref(p, f"agent {i}") for i, p in enumerate(raw)))
        except ModelError as exc:
            raise ParseError(str(exc)) from None


def all_weak_orders(values: Sequence[int]) -> Iterator[WeakOrder]:
    """Every weak order over ``values`` (ordered set partitions)."""
    values = list(values)
    if not values:
        yield WeakOrder(())
        return
    for part in multiset_partitions(values):
        for perm in itertools.permutations(part):
            yield WeakOrder.from_lists(perm)


def _partitions(n: int, budget: int):
    count = 0
    for part in multiset_partitions(list(range(n))):
        count += 1
        if count > budget:
            raise BudgetExceeded(budget, "set partitions")
        yield part


def is_nash_stable(game: AnonymousGame, partition: Sequence[Sequence[int]]) -> bool:
    size = {i: len(c) for c in partition for i in c}
    for ci, c in enumerate(partition):
        for i in c:
            pref = game.prefs[i]
            if len(c) > 1 and pref.prefers(1, len(c)):
                return False
            for cj, other in enumerate(partition):
                if cj != ci and pref.prefers(len(other) + 1, size[i]):
                    return False
    return True


def is_anon_core_stable(game: AnonymousGame, partition: Sequence[Sequence[int]]) -> bool:
    size = {i: len(c) for c in partition for i in c}
    for j in range(1, game.n + 1):
        if sum(game.prefs[i].prefers(j, size[i]) for i in range(game.n)) >= j:
            return False
    return True


def anon_stable_exists(game: AnonymousGame, notion: str, budget: int = DEFAULT_BUDGET) -> bool:
    """Brute force over all set partitions; ``notion`` is ``"nash"`` or ``"core"``."""
    check = {"nash": is_nash_stable, "core": is_anon_core_stable}.get(notion)
    if check is None:
        raise ValueError(f"notion must be 'nash' or 'core', got {notion!r}")
    if game.n == 0:
        return True
    return any(check(game, part) for part in _partitions(game.n, budget))

"""The marriage variant: every room takes exactly one agent from each dimension.

Swaps are only allowed inside a dimension, and a blocking coalition must
itself draw one agent from every dimension.  The existence solver uses count
variables per (dimension, colour, order) type and realises a solution with a
0/1 matrix per room class (dimensions x rooms, a 1 meaning a red seat).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import ilp
from .fpt import AgentType, CountProfile, TypeProfile, _class_members
from .ilp import ConstraintSystem, VarId, eq, le
from .model import (
    Agent,
    Color,
    Instance,
    InvalidOutcomeError,
    ModelError,
    Outcome,
    ParseError,
    WeakOrder,
    _load_json,
    _parse_int,
    outcome_from_json,
    parse_color,
    parse_pref,
    placement,
    validate_outcome,
)
from .verify import BlockingWitness, Concept, SwapWitness, exchange_at

CONCEPTS = (Concept.CORE, Concept.STRONG_CORE, Concept.EXCHANGE, Concept.STRONG_EXCHANGE)


class RealizationError(RuntimeError):
    """A count profile that passed the encoder could not be turned into rooms."""


@dataclass(frozen=True)
class MarriageAgent:
    id: str
    color: Color
    dim: int
    pref: WeakOrder

    @property
    def red(self) -> bool:
        return self.color is Color.RED


@dataclass(frozen=True)
class MarriageInstance:
    """``s`` dimensions of ``k`` agents each; agents kept sorted by id."""

    s: int
    agents: tuple[MarriageAgent, ...] = ()

    def __post_init__(self):
        if not isinstance(self.s, int) or self.s < 1:
            raise ModelError(f"number of dimensions must be a positive integer, got {self.s!r}")
        agents = tuple(sorted(self.agents, key=lambda a: a.id))
        object.__setattr__(self, "agents", agents)
        # the roommate view checks ids, orders and divisibility
        self.roommate  # noqa: B018
        sizes = {d: 0 for d in range(1, self.s + 1)}
        for a in agents:
            if a.dim not in sizes:
                raise ModelError(f"agent {a.id!r}: dimension {a.dim} outside 1..{self.s}")
            sizes[a.dim] += 1
        k = len(agents) // self.s
        bad = {d: c for d, c in sizes.items() if c != k}
        if bad:
            raise ModelError(f"every dimension needs exactly {k} agents, got {bad}")

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def k(self) -> int:
        return self.n // self.s

    @cached_property
    def roommate(self) -> Instance:
        """The same agents without dimensions (agent order is identical)."""
        return Instance(self.s, tuple(Agent(a.id, a.color, a.pref) for a in self.agents))

    @cached_property
    def dim_array(self) -> np.ndarray:
        return np.array([a.dim for a in self.agents], dtype=np.int32)

    def members(self, dim: int) -> list[MarriageAgent]:
        return [a for a in self.agents if a.dim == dim]

    def dim_of(self, agent_id: str) -> int:
        return self.agents[self.roommate.index[agent_id]].dim


class MarriageOutcome(Outcome):
    """An outcome whose rooms hold one agent per dimension."""


def validate_marriage_outcome(instance: MarriageInstance, outcome: Outcome) -> None:
    validate_outcome(instance.roommate, outcome)
    for room in outcome.rooms:
        dims = sorted(instance.dim_of(a) for a in room)
        if dims != list(range(1, instance.s + 1)):
            raise InvalidOutcomeError(f"room {list(room)} does not hold one agent per dimension (dims {dims})")


# -- checkers ------------------------------------------------------------------------

def _current(instance: MarriageInstance, outcome: Outcome) -> dict[str, int]:
    validate_marriage_outcome(instance, outcome)
    pl = placement(instance.roommate, outcome, check=False)
    return {a.id: int(pl.theta[pl.room[i]]) for i, a in enumerate(instance.agents)}


def _pick(s: int, j: int, reds: list[list[str]], blues: list[list[str]], fixed: dict[int, tuple[bool, str]]):
    """One agent per dimension, ``j`` of them red, or ``None``.

    ``reds[d]`` / ``blues[d]`` are the usable agents of dimension ``d + 1``;
    ``fixed`` pins some dimensions to a given (red, id).
    """
    choice: dict[int, tuple[bool, str]] = dict(fixed)
    free = []
    for d in range(s):
        if d in choice:
            continue
        if reds[d] and blues[d]:
            free.append(d)
        elif reds[d]:
            choice[d] = (True, reds[d][0])
        elif blues[d]:
            choice[d] = (False, blues[d][0])
        else:
            return None
    need = j - sum(red for red, _ in choice.values())
    if not 0 <= need <= len(free):
        return None
    for pos, d in enumerate(free):
        choice[d] = (True, reds[d][0]) if pos < need else (False, blues[d][0])
    red_ids = sorted(a for red, a in choice.values() if red)
    blue_ids = sorted(a for red, a in choice.values() if not red)
    return red_ids, blue_ids


def find_blocking_marriage(instance: MarriageInstance, outcome: Outcome,
                           strong: bool = False) -> BlockingWitness | None:
    """Coalition with one agent per dimension that (weakly) blocks, or ``None``.

    Without ``strong`` every member strictly prefers the coalition.  With it
    every member weakly prefers it and at least one strictly.
    """
    cur = _current(instance, outcome)
    s = instance.s
    for j in range(s + 1):
        reds: list[list[str]] = [[] for _ in range(s)]
        blues: list[list[str]] = [[] for _ in range(s)]
        strict_r: list[list[str]] = [[] for _ in range(s)]
        strict_b: list[list[str]] = [[] for _ in range(s)]
        for a in instance.agents:
            here, there = a.pref.rank[cur[a.id]], a.pref.rank[j]
            if there < here:
                (strict_r if a.red else strict_b)[a.dim - 1].append(a.id)
            if there < here or (strong and there == here):
                (reds if a.red else blues)[a.dim - 1].append(a.id)
        if not strong:
            got = _pick(s, j, reds, blues, {})
            if got is not None:
                return BlockingWitness(j, got[0], got[1], False)
            continue
        for d in range(s):
            for red, pool in ((True, strict_r[d]), (False, strict_b[d])):
                if not pool:
                    continue
                got = _pick(s, j, reds, blues, {d: (red, pool[0])})
                if got is not None:
                    return BlockingWitness(j, got[0], got[1], True)
    return None


def find_exchange_marriage(instance: MarriageInstance, outcome: Outcome,
                           strong: bool = False) -> SwapWitness | None:
    """First pair (by id) inside one dimension with a (weak) exchange deviation."""
    validate_marriage_outcome(instance, outcome)
    pl = placement(instance.roommate, outcome, check=False)
    return exchange_at(instance.roommate, pl, False, strong, dim=instance.dim_array)


def marriage_witness(instance: MarriageInstance, outcome: Outcome, concept: Concept):
    concept = Concept(concept)
    if concept is Concept.CORE:
        return find_blocking_marriage(instance, outcome, False)
    if concept is Concept.STRONG_CORE:
        return find_blocking_marriage(instance, outcome, True)
    if concept is Concept.EXCHANGE:
        return find_exchange_marriage(instance, outcome, False)
    if concept is Concept.STRONG_EXCHANGE:
        return find_exchange_marriage(instance, outcome, True)
    raise ValueError(f"{concept.value} is not defined for the marriage model")


# -- count encoding --------------------------------------------------------------------

def dimension_types(instance: MarriageInstance) -> list[TypeProfile]:
    """Per-dimension agent types (colour plus order), first member order."""
    out = []
    for d in range(1, instance.s + 1):
        groups: dict[tuple[bool, WeakOrder], list[str]] = {}
        for a in instance.members(d):
            groups.setdefault((a.red, a.pref), []).append(a.id)
        types = sorted((AgentType(red, pref, tuple(ids)) for (red, pref), ids in groups.items()),
                       key=lambda t: t.members[0])
        out.append(TypeProfile(instance.s, tuple(t for t in types if t.red), tuple(t for t in types if not t.red)))
    return out


@dataclass
class MarriageEncoding:
    system: ConstraintSystem
    s: int
    dims: list[TypeProfile]
    n: list[VarId]
    r: dict[tuple[int, int, int], VarId]  # (dim index, type, j)
    b: dict[tuple[int, int, int], VarId]

    def count(self, d: int, red: bool, at: int, target: int, weak: bool) -> list[tuple[VarId, int]]:
        """Agents of dimension index ``d`` at ``at`` who (weakly) prefer ``target``."""
        types = self.dims[d].red_types if red else self.dims[d].blue_types
        table = self.r if red else self.b
        out = []
        for i, t in enumerate(types):
            key = (d, i, at)
            if key not in table:
                continue
            ra, rt = t.pref.rank[at], t.pref.rank[target]
            if rt < ra or (weak and rt == ra):
                out.append((table[key], 1))
        return out

    def willing(self, d: int, red: bool, target: int, weak: bool) -> list[tuple[VarId, int]]:
        span = range(1, self.s + 1) if red else range(0, self.s)
        return [term for at in span for term in self.count(d, red, at, target, weak)]

    def indicator(self, name: str, expr: list[tuple[VarId, int]], cap: int) -> VarId:
        """0/1 variable equal to ``[expr >= 1]``, given ``0 <= expr <= cap``."""
        if not expr:
            return self.system.var(name, 0, 0)
        u = self.system.var(name, 0, 1)
        self.system.add(le([(u, 1)] + [(v, -c) for v, c in expr]))
        self.system.add(le(list(expr) + [(u, -cap)]))
        return u

    def either(self, name: str, a: VarId, b: VarId) -> VarId:
        u = self.system.var(name, 0, 1)
        self.system.add(le([(a, 1), (u, -1)]))
        self.system.add(le([(b, 1), (u, -1)]))
        self.system.add(le([(u, 1), (a, -1), (b, -1)]))
        return u

    def decode(self, sol: ilp.Assignment) -> tuple[tuple[int, ...], list[CountProfile]]:
        s = self.s
        rooms = tuple(sol[v] for v in self.n)
        profiles = []
        for d, tp in enumerate(self.dims):
            rc = tuple(tuple(sol[self.r[d, i, j]] if (d, i, j) in self.r else 0 for j in range(s + 1))
                       for i in range(len(tp.red_types)))
            bc = tuple(tuple(sol[self.b[d, i, j]] if (d, i, j) in self.b else 0 for j in range(s + 1))
                       for i in range(len(tp.blue_types)))
            profiles.append(CountProfile(rooms, rc, bc))
        return rooms, profiles


def marriage_base_system(instance: MarriageInstance) -> MarriageEncoding:
    s, k = instance.s, instance.k
    dims = dimension_types(instance)
    total_r = instance.roommate.r
    total_b = instance.n - total_r
    sys = ConstraintSystem()
    n = []
    for j in range(s + 1):
        cap = k
        if j >= 1:
            cap = min(cap, total_r // j)
        if j <= s - 1:
            cap = min(cap, total_b // (s - j))
        n.append(sys.var(f"n_{j}", 0, cap))
    r: dict[tuple[int, int, int], VarId] = {}
    b: dict[tuple[int, int, int], VarId] = {}
    for d, tp in enumerate(dims):
        for i, t in enumerate(tp.red_types):
            for j in range(1, s + 1):
                r[d, i, j] = sys.var(f"r_{d + 1}_{i}_{j}", 0, t.count)
        for i, t in enumerate(tp.blue_types):
            for j in range(0, s):
                b[d, i, j] = sys.var(f"b_{d + 1}_{i}_{j}", 0, t.count)
    # every agent is placed
    for d, tp in enumerate(dims):
        for i, t in enumerate(tp.red_types):
            sys.add(eq([(r[d, i, j], 1) for j in range(1, s + 1)], -t.count))
        for i, t in enumerate(tp.blue_types):
            sys.add(eq([(b[d, i, j], 1) for j in range(0, s)], -t.count))
    # colour totals per class
    for j in range(1, s + 1):
        sys.add(eq([(v, 1) for (d, i, jj), v in r.items() if jj == j] + [(n[j], -j)]))
    for j in range(0, s):
        sys.add(eq([(v, 1) for (d, i, jj), v in b.items() if jj == j] + [(n[j], -(s - j))]))
    # one agent per dimension in every room of the class
    for d in range(s):
        for j in range(s + 1):
            terms = [(v, 1) for (dd, i, jj), v in r.items() if dd == d and jj == j]
            terms += [(v, 1) for (dd, i, jj), v in b.items() if dd == d and jj == j]
            sys.add(eq(terms + [(n[j], -1)]))
    sys.add(eq([(v, 1) for v in n], -k))
    return MarriageEncoding(sys, s, dims, n, r, b)


def _total(vs: Sequence[VarId]) -> list[tuple[VarId, int]]:
    return [(v, 1) for v in vs]


def _at_most(expr, bound: int) -> ilp.LinearConstraint:
    return le(list(expr), -bound)


def encode_marriage_core(instance: MarriageInstance, strong: bool = False) -> MarriageEncoding:
    """No coalition with one agent per dimension may (weakly) block.

    For a class j, let a dimension count as red-willing (blue-willing) when
    some red (blue) agent of it would gain from a room with j reds.  A
    strictly blocking coalition exists iff every dimension is willing, at
    least j are red-willing and at least s-j blue-willing.
    """
    enc = marriage_base_system(instance)
    s, sys = enc.s, enc.system
    cap_r = [sum(t.count for t in tp.red_types) for tp in enc.dims]
    cap_b = [sum(t.count for t in tp.blue_types) for tp in enc.dims]
    for j in range(s + 1):
        sr = [enc.indicator(f"sR_{j}_{d + 1}", enc.willing(d, True, j, False), cap_r[d]) for d in range(s)]
        sb = [enc.indicator(f"sB_{j}_{d + 1}", enc.willing(d, False, j, False), cap_b[d]) for d in range(s)]
        if not strong:
            cover = [enc.either(f"c_{j}_{d + 1}", sr[d], sb[d]) for d in range(s)]
            branches = [[_at_most(_total(cover), s - 1)]]
            if j >= 1:
                branches.append([_at_most(_total(sr), j - 1)])
            if j <= s - 1:
                branches.append([_at_most(_total(sb), s - j - 1)])
            sys.add_any(branches, tag=f"mcore_{j}")
            continue
        wr = [enc.indicator(f"wR_{j}_{d + 1}", enc.willing(d, True, j, True), cap_r[d]) for d in range(s)]
        wb = [enc.indicator(f"wB_{j}_{d + 1}", enc.willing(d, False, j, True), cap_b[d]) for d in range(s)]
        cover = [enc.either(f"c_{j}_{d + 1}", wr[d], wb[d]) for d in range(s)]
        # a strict red is usable where no weak blue exists, or where a blue
        # seat can be given up; symmetrically for blue
        no_sr = _at_most(_total(sr), 0)
        no_sb = _at_most(_total(sb), 0)
        red_forced = [le([(sr[d], 1), (wb[d], -1)]) for d in range(s)]
        blue_forced = [le([(sb[d], 1), (wr[d], -1)]) for d in range(s)]
        tight_r = _at_most(_total(wr), j)
        tight_b = _at_most(_total(wb), s - j)
        branches = [[_at_most(_total(cover), s - 1)]]
        if j >= 1:
            branches.append([_at_most(_total(wr), j - 1)])
        if j <= s - 1:
            branches.append([_at_most(_total(wb), s - j - 1)])
        branches += [
            [no_sr, no_sb],
            [no_sr, *blue_forced, tight_r],
            [no_sb, *red_forced, tight_b],
            [*red_forced, *blue_forced, tight_r, tight_b],
        ]
        sys.add_any(branches, tag=f"mstrong_core_{j}")
    return enc


def _pair_free(enc: MarriageEncoding, d: int, x_red: bool, x_at: int, x_to: int,
               y_red: bool, y_at: int, y_to: int, strong: bool, tag: str) -> None:
    xs = enc.count(d, x_red, x_at, x_to, False)
    ys = enc.count(d, y_red, y_at, y_to, False)
    if not strong:
        enc.system.add_any([[_at_most(xs, 0)], [_at_most(ys, 0)]], tag=tag)
        return
    xw = enc.count(d, x_red, x_at, x_to, True)
    yw = enc.count(d, y_red, y_at, y_to, True)
    enc.system.add_any([[_at_most(xs, 0)], [_at_most(yw, 0)]], tag=tag)
    enc.system.add_any([[_at_most(xw, 0)], [_at_most(ys, 0)]], tag=tag)


def encode_marriage_exchange(instance: MarriageInstance, strong: bool = False) -> MarriageEncoding:
    """Same-dimension agents always sit in different rooms, so no colocation is needed."""
    enc = marriage_base_system(instance)
    s = enc.s
    for d in range(s):
        for j in range(1, s + 1):
            for k in range(1, s + 1):
                _pair_free(enc, d, True, j, k, False, k - 1, j - 1, strong, f"mswap_{d + 1}_{j}_{k}")
        for j in range(1, s + 1):
            for k in range(j + 1, s + 1):
                _pair_free(enc, d, True, j, k, True, k, j, strong, f"mred_{d + 1}_{j}_{k}")
        for j in range(0, s):
            for k in range(j + 1, s):
                _pair_free(enc, d, False, j, k, False, k, j, strong, f"mblue_{d + 1}_{j}_{k}")
    return enc


def encode_marriage(instance: MarriageInstance, concept: Concept) -> MarriageEncoding:
    concept = Concept(concept)
    if concept is Concept.CORE:
        return encode_marriage_core(instance, False)
    if concept is Concept.STRONG_CORE:
        return encode_marriage_core(instance, True)
    if concept is Concept.EXCHANGE:
        return encode_marriage_exchange(instance, False)
    if concept is Concept.STRONG_EXCHANGE:
        return encode_marriage_exchange(instance, True)
    raise ValueError(f"{concept.value} is not defined for the marriage model")


# -- realisation -----------------------------------------------------------------------

def gale_ryser(rows: Sequence[int], cols: Sequence[int]) -> list[list[int]]:
    """0/1 matrix with the given row and column sums (greedy construction).

    Rows are handled in decreasing order of their sum, each putting its ones
    into the columns with the largest remaining demand.  This succeeds
    whenever any such matrix exists.
    """
    if sum(rows) != sum(cols):
        raise RealizationError(f"row sums {list(rows)} and column sums {list(cols)} differ in total")
    demand = list(cols)
    matrix = [[0] * len(cols) for _ in rows]
    for i in sorted(range(len(rows)), key=lambda i: (-rows[i], i)):
        if rows[i] > len(cols):
            raise RealizationError(f"row {i} needs {rows[i]} ones but there are {len(cols)} columns")
        best = sorted(range(len(cols)), key=lambda c: (-demand[c], c))[:rows[i]]
        for c in best:
            if demand[c] == 0:
                raise RealizationError(f"no 0/1 matrix with row sums {list(rows)} and column sums {list(cols)}")
            demand[c] -= 1
            matrix[i][c] = 1
    if any(demand):
        raise RealizationError(f"no 0/1 matrix with row sums {list(rows)} and column sums {list(cols)}")
    return matrix


def realize_marriage(instance: MarriageInstance, profiles: Sequence[CountProfile],
                     dims: Sequence[TypeProfile] | None = None) -> MarriageOutcome:
    """Rooms for per-dimension count profiles (``profiles[d]`` is dimension d + 1)."""
    s = instance.s
    dims = dims or dimension_types(instance)
    if len(profiles) != s:
        raise ValueError(f"need one profile per dimension, got {len(profiles)} for {s}")
    rooms_per_class = profiles[0].rooms
    members = [_class_members(tp, p.r_counts, p.b_counts) for tp, p in zip(dims, profiles)]
    rooms: list[list[str]] = []
    for j in range(s + 1):
        nj = rooms_per_class[j]
        if nj == 0:
            continue
        reds = [sorted(a for ids in members[d][j][0] for a in ids) for d in range(s)]
        blues = [sorted(a for ids in members[d][j][1] for a in ids) for d in range(s)]
        for d in range(s):
            if len(reds[d]) + len(blues[d]) != nj:
                raise RealizationError(f"dimension {d + 1} has {len(reds[d]) + len(blues[d])} agents in class {j}, "
                                       f"expected {nj}")
        matrix = gale_ryser([len(x) for x in reds], [j] * nj)
        pos_r, pos_b = [0] * s, [0] * s
        for c in range(nj):
            room = []
            for d in range(s):
                if matrix[d][c]:
                    room.append(reds[d][pos_r[d]])
                    pos_r[d] += 1
                else:
                    room.append(blues[d][pos_b[d]])
                    pos_b[d] += 1
            rooms.append(room)
    out = MarriageOutcome(tuple(tuple(r) for r in rooms))
    validate_marriage_outcome(instance, out)
    return out


def solve_marriage_existence(instance: MarriageInstance, concept: Concept) -> MarriageOutcome | None:
    """Stable outcome via the count encoding, re-checked directly; ``None`` if none exists."""
    concept = Concept(concept)
    enc = encode_marriage(instance, concept)
    if instance.n == 0:
        return MarriageOutcome(())
    sol = ilp.solve(enc.system)
    if sol is None:
        return None
    _, profiles = enc.decode(sol)
    outcome = realize_marriage(instance, profiles, enc.dims)
    if marriage_witness(instance, outcome, concept) is not None:
        raise AssertionError(f"marriage ILP solution for {concept.value} is not stable")
    return outcome


# -- serialization -----------------------------------------------------------------------

def marriage_from_json(data: dict) -> MarriageInstance:
    if data.get("kind") != "marriage":
        raise ParseError(f"expected kind 'marriage', got {data.get('kind')!r}")
    s = _parse_int(data.get("s"), "s")
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list):
        raise ParseError("'agents' must be a list")
    agents = []
    for pos, raw in enumerate(raw_agents):
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), str):
            raise ParseError(f"agent #{pos}: needs a string 'id'")
        what = f"agent {raw['id']!r}"
        agents.append(MarriageAgent(raw["id"], parse_color(raw.get("color"), what),
                                    _parse_int(raw.get("dim"), f"{what}: dim"), parse_pref(raw.get("pref"), what)))
    try:
        return MarriageInstance(s, tuple(agents))
    except ModelError as exc:
        raise ParseError(str(exc)) from None


def marriage_to_json(instance: MarriageInstance) -> dict:
    return {
        "kind": "marriage",
        "s": instance.s,
        "agents": [
            {"id": a.id, "color": a.color.value, "dim": a.dim, "pref": a.pref.to_lists()} for a in instance.agents
        ],
    }


def parse_marriage_instance(text: str) -> MarriageInstance:
    return marriage_from_json(_load_json(text))


def serialize_marriage_instance(instance: MarriageInstance) -> str:
    return json.dumps(marriage_to_json(instance), indent=2) + "\n"


def parse_marriage_outcome(text: str) -> MarriageOutcome:
    return MarriageOutcome(outcome_from_json(_load_json(text)).rooms)

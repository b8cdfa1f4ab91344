"""Domain types for the roommate diversity problem.

A room of size ``s`` is summarised by its *numerator*: the number of red
agents it holds (the red fraction is ``numerator / s``).  Every agent holds a
weak order over the numerators ``0..s``; nothing else about a room matters to
her.  All ratios are stored as integer numerators, never as fractions.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np


class ModelError(ValueError):
    """Base class for invalid instances, outcomes and files."""


class ParseError(ModelError):
    pass


class InvalidOutcomeError(ModelError):
    pass


class BudgetExceeded(RuntimeError):
    """An exhaustive search would visit more objects than the configured budget."""

    def __init__(self, budget: int, what: str = "canonical outcomes"):
        super().__init__(f"more than {budget} {what}; raise the budget to continue")
        self.budget = budget


DEFAULT_BUDGET = 10**7


class Color(str, enum.Enum):
    RED = "red"
    BLUE = "blue"


class Comparison(enum.Enum):
    BETTER = 1
    INDIFFERENT = 0
    WORSE = -1


@dataclass(frozen=True)
class WeakOrder:
    """Indifference classes, best first.

    The domain is whatever the classes cover; :meth:`check_domain` pins it to
    an explicit set (``0..s`` for room numerators, ``1..n`` for coalition sizes
    in anonymous games).
    """

    classes: tuple[frozenset[int], ...]

    def __post_init__(self):
        classes = tuple(frozenset(c) for c in self.classes)
        if any(not c for c in classes):
            raise ModelError("empty indifference class")
        seen: set[int] = set()
        for c in classes:
            if seen & c:
                raise ModelError(f"value(s) {sorted(seen & c)} appear in more than one class")
            seen |= c
        object.__setattr__(self, "classes", classes)

    @classmethod
    def from_lists(cls, classes: Iterable[Iterable[int]]) -> WeakOrder:
        return cls(tuple(frozenset(int(v) for v in c) for c in classes))

    @classmethod
    def strict(cls, values: Iterable[int]) -> WeakOrder:
        return cls(tuple(frozenset([v]) for v in values))

    def to_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.classes]

    @cached_property
    def domain(self) -> frozenset[int]:
        return frozenset().union(*self.classes)

    @cached_property
    def rank(self) -> dict[int, int]:
        return {v: i for i, c in enumerate(self.classes) for v in c}

    def check_domain(self, domain: Iterable[int]) -> None:
        domain = frozenset(domain)
        if self.domain != domain:
            missing = sorted(domain - self.domain)
            extra = sorted(self.domain - domain)
            raise ModelError(f"order does not partition {sorted(domain)} (missing {missing}, extra {extra})")

    def rank_of(self, value: int) -> int:
        try:
            return self.rank[value]
        except KeyError:
            raise ModelError(f"value {value} outside the order's domain") from None

    def compare(self, a: int, c: int) -> Comparison:
        ra, rc = self.rank_of(a), self.rank_of(c)
        if ra < rc:
            return Comparison.BETTER
        if ra > rc:
            return Comparison.WORSE
        return Comparison.INDIFFERENT

    def prefers(self, a: int, c: int) -> bool:
        return self.rank_of(a) < self.rank_of(c)

    def weakly_prefers(self, a: int, c: int) -> bool:
        return self.rank_of(a) <= self.rank_of(c)

    def top(self) -> frozenset[int]:
        return self.classes[0]

    def __repr__(self):
        return "WeakOrder(" + " > ".join("~".join(map(str, sorted(c))) for c in self.classes) + ")"


def compare(order: WeakOrder, a: int, c: int) -> Comparison:
    """Compare numerators ``a`` and ``c`` under ``order``."""
    return order.compare(a, c)


def is_single_peaked(order: WeakOrder, values: Sequence[int]) -> bool:
    """Check single-peakedness over the ordered axis ``values``.

    Tries every candidate peak and checks the quantified condition for all
    pairs directly.
    """
    rank = order.rank
    m = len(values)
    for p in range(m):
        ok = True
        for a in range(m):
            for b in range(m):
                if (p <= a < b or b < a <= p) and rank[values[a]] > rank[values[b]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class Agent:
    id: str
    color: Color
    pref: WeakOrder

    @property
    def red(self) -> bool:
        return self.color is Color.RED


@dataclass(frozen=True)
class PrefClass:
    strict: bool
    dichotomous: bool
    single_peaked: bool


def classify_order(order: WeakOrder, s: int) -> PrefClass:
    return PrefClass(
        strict=all(len(c) == 1 for c in order.classes),
        dichotomous=len(order.classes) <= 2,
        single_peaked=is_single_peaked(order, range(s + 1)),
    )


@dataclass(frozen=True)
class Instance:
    """A roommate diversity instance: room size ``s`` and agents.

    Agents are kept sorted by id; that order is the tie-break everywhere.
    """

    s: int
    agents: tuple[Agent, ...] = ()

    def __post_init__(self):
        if not isinstance(self.s, int) or self.s < 1:
            raise ModelError(f"room size must be a positive integer, got {self.s!r}")
        agents = tuple(sorted(self.agents, key=lambda a: a.id))
        ids = [a.id for a in agents]
        for x, y in zip(ids, ids[1:]):
            if x == y:
                raise ModelError(f"duplicate agent id {x!r}")
        for a in agents:
            a.pref.check_domain(range(self.s + 1))
        if len(agents) % self.s:
            raise ModelError(f"{len(agents)} agents cannot fill rooms of size {self.s}")
        object.__setattr__(self, "agents", agents)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def k(self) -> int:
        return self.n // self.s

    @cached_property
    def r(self) -> int:
        return sum(a.red for a in self.agents)

    @property
    def b(self) -> int:
        return self.n - self.r

    @cached_property
    def index(self) -> dict[str, int]:
        return {a.id: i for i, a in enumerate(self.agents)}

    def agent(self, agent_id: str) -> Agent:
        try:
            return self.agents[self.index[agent_id]]
        except KeyError:
            raise ModelError(f"unknown agent id {agent_id!r}") from None

    @cached_property
    def color_array(self) -> np.ndarray:
        return np.array([1 if a.red else 0 for a in self.agents], dtype=np.int8)

    @cached_property
    def rank_array(self) -> np.ndarray:
        """Rank of every numerator for every agent, shape ``(n, s + 1)``."""
        out = np.zeros((self.n, self.s + 1), dtype=np.int32)
        for i, a in enumerate(self.agents):
            for v in range(self.s + 1):
                out[i, v] = a.pref.rank[v]
        return out


@dataclass(frozen=True, eq=True)
class Outcome:
    """A partition into rooms, normalised so equal partitions compare equal."""

    rooms: tuple[tuple[str, ...], ...] = field(default=())

    def __post_init__(self):
        rooms = tuple(sorted(tuple(sorted(r)) for r in self.rooms))
        object.__setattr__(self, "rooms", rooms)

    def room_of(self) -> dict[str, int]:
        return {a: i for i, room in enumerate(self.rooms) for a in room}

    def to_json(self) -> dict:
        return {"rooms": [list(r) for r in self.rooms]}


def theta(room: Iterable[str], instance: Instance) -> int:
    """Number of red agents in ``room`` (the numerator of its red fraction)."""
    room = list(room)
    if len(set(room)) != instance.s or len(room) != instance.s:
        raise ModelError(f"a room holds exactly {instance.s} distinct agents, got {len(room)}")
    return sum(instance.agent(a).red for a in room)


def validate_outcome(instance: Instance, outcome: Outcome) -> None:
    """Raise :class:`InvalidOutcomeError` unless ``outcome`` partitions the agents into rooms of size s."""
    seen: set[str] = set()
    for room in outcome.rooms:
        if len(room) != instance.s:
            raise InvalidOutcomeError(f"room {list(room)} has {len(room)} members, expected {instance.s}")
        for a in room:
            if a not in instance.index:
                raise InvalidOutcomeError(f"unknown agent id {a!r}")
            if a in seen:
                raise InvalidOutcomeError(f"agent {a!r} appears in two rooms")
            seen.add(a)
    if len(seen) != instance.n:
        missing = sorted(set(instance.index) - seen)
        raise InvalidOutcomeError(f"agents without a room: {missing}")


@dataclass(frozen=True)
class Placement:
    """Array view of a valid outcome, indexed like ``instance.agents``."""

    room: np.ndarray  # room index per agent
    theta: np.ndarray  # numerator per room

    @property
    def k(self) -> int:
        return len(self.theta)


def placement(instance: Instance, outcome: Outcome, check: bool = True) -> Placement:
    if check:
        validate_outcome(instance, outcome)
    idx = instance.index
    colors = instance.color_array
    room = np.empty(instance.n, dtype=np.int32)
    th = np.zeros(len(outcome.rooms), dtype=np.int32)
    for ri, members in enumerate(outcome.rooms):
        for a in members:
            i = idx[a]
            room[i] = ri
            th[ri] += colors[i]
    return Placement(room, th)


def numerators(instance: Instance, outcome: Outcome) -> dict[str, int]:
    """Current numerator of every agent."""
    pl = placement(instance, outcome)
    return {a.id: int(pl.theta[pl.room[i]]) for i, a in enumerate(instance.agents)}


def classify(instance: Instance) -> PrefClass:
    """Instance-level preference class: conjunction of the per-agent flags."""
    flags = [classify_order(a.pref, instance.s) for a in instance.agents]
    return PrefClass(
        strict=all(f.strict for f in flags),
        dichotomous=all(f.dichotomous for f in flags),
        single_peaked=all(f.single_peaked for f in flags),
    )


def build_rooms(
    s: int,
    classes: Mapping[int, tuple[Sequence[str], Sequence[str]]],
    colocate: Mapping[int, Iterable[str]] | None = None,
) -> Outcome:
    """Cut per-numerator agent lists into rooms.

    ``classes[j]`` lists the red and the blue agents that must end up in rooms
    with ``j`` red members.  The agents of ``colocate[j]`` (if any) are put in
    the first room of class ``j``; everybody else fills rooms in list order.
    """
    colocate = colocate or {}
    rooms: list[list[str]] = []
    for j in sorted(classes):
        reds, blues = list(classes[j][0]), list(classes[j][1])
        if j == 0:
            count = len(blues) // s
        else:
            count = len(reds) // j
        if len(reds) != j * count or len(blues) != (s - j) * count:
            raise ModelError(f"class {j}: {len(reds)} red / {len(blues)} blue do not fill whole rooms")
        group = set(colocate.get(j, ()))
        if group:
            if count == 0:
                raise ModelError(f"colocation group for class {j} but no room of that class")
            g_red = [a for a in reds if a in group]
            g_blue = [a for a in blues if a in group]
            if len(g_red) + len(g_blue) != len(group):
                raise ModelError(f"colocation group for class {j} names agents outside the class")
            if len(g_red) > j or len(g_blue) > s - j:
                raise ModelError(
                    f"colocation group for class {j} needs {len(g_red)} red / {len(g_blue)} blue seats in one room"
                )
            reds = g_red + [a for a in reds if a not in group]
            blues = g_blue + [a for a in blues if a not in group]
        for t in range(count):
            rooms.append(reds[t * j:(t + 1) * j] + blues[t * (s - j):(t + 1) * (s - j)])
    return Outcome(tuple(tuple(r) for r in rooms))


# -- serialization -------------------------------------------------------------

def _load_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    return data


def _parse_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{what} must be an integer, got {value!r}")
    return value


def parse_pref(raw, what: str) -> WeakOrder:
    if not isinstance(raw, list) or not all(isinstance(c, list) for c in raw):
        raise ParseError(f"{what}: pref must be a list of lists of integers")
    flat = [_parse_int(v, what) for c in raw for v in c]
    if len(flat) != len(set(flat)):
        raise ParseError(f"{what}: a value appears twice in pref {raw}")
    try:
        return WeakOrder.from_lists(raw)
    except ModelError as exc:
        raise ParseError(f"{what}: {exc}") from None


def parse_color(raw, what: str) -> Color:
    try:
        return Color(raw)
    except ValueError:
        raise ParseError(f"{what}: color must be 'red' or 'blue', got {raw!r}") from None


def instance_from_json(data: dict) -> Instance:
    if data.get("kind", "roommate") != "roommate":
        raise ParseError(f"expected kind 'roommate', got {data.get('kind')!r}")
    s = _parse_int(data.get("s"), "s")
    raw_agents = data.get("agents")
    if not isinstance(raw_agents, list):
        raise ParseError("'agents' must be a list")
    agents = []
    for pos, raw in enumerate(raw_agents):
        if not isinstance(raw, dict) or not isinstance(raw.get("id"), str):
            raise ParseError(f"agent #{pos}: needs a string 'id'")
        what = f"agent {raw['id']!r}"
        agents.append(Agent(raw["id"], parse_color(raw.get("color"), what), parse_pref(raw.get("pref"), what)))
    try:
        return Instance(s, tuple(agents))
    except ModelError as exc:
        raise ParseError(str(exc)) from None


def instance_to_json(instance: Instance) -> dict:
    return {
        "kind": "roommate",
        "s": instance.s,
        "agents": [{"id": a.id, "color": a.color.value, "pref": a.pref.to_lists()} for a in instance.agents],
    }


def parse_instance(text: str) -> Instance:
    return instance_from_json(_load_json(text))


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_json(instance), indent=2) + "\n"


def outcome_from_json(data: dict) -> Outcome:
    rooms = data.get("rooms")
    if not isinstance(rooms, list) or not all(
        isinstance(r, list) and all(isinstance(a, str) for a in r) for r in rooms
    ):
        raise ParseError("'rooms' must be a list of lists of agent ids")
    return Outcome(tuple(tuple(r) for r in rooms))


def parse_outcome(text: str) -> Outcome:
    return outcome_from_json(_load_json(text))


def serialize_outcome(outcome: Outcome) -> str:
    return json.dumps(outcome.to_json(), indent=2) + "\n"

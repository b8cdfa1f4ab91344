"""Instance generators: reduction constructions and seeded random sampling."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .marriage import MarriageAgent, MarriageInstance
from .model import Agent, Color, Instance, ModelError, Outcome, ParseError, WeakOrder
from .oracle import AnonymousGame

RED, BLUE = Color.RED, Color.BLUE
PREF_CLASSES = ("unrestricted", "strict", "dichotomous", "single_peaked")


def _order(*tiers: Sequence[int], domain: Sequence[int]) -> WeakOrder:
    """Listed tiers (empty ones skipped), then every other value in one bottom class."""
    used: set[int] = set()
    classes = []
    for tier in tiers:
        tier = [v for v in tier if v not in used]
        if tier:
            classes.append(tier)
            used.update(tier)
    rest = [v for v in domain if v not in used]
    if rest:
        classes.append(rest)
    return WeakOrder.from_lists(classes)


def lift_size_order(order: WeakOrder) -> WeakOrder:
    """Order over numerators copied from an order over sizes 1..s; 0 goes last."""
    classes = [sorted(c) for c in order.classes] + [[0]]
    return WeakOrder.from_lists(classes)


def reduce_anon_core(game: AnonymousGame) -> Instance:
    """Coalition sizes become red counts; s*s keen blue agents per numerator."""
    n = game.n
    if n < 1:
        raise ModelError("the game needs at least one agent")
    s = n
    dom = range(s + 1)
    agents = [Agent(f"r{i + 1}", RED, lift_size_order(p)) for i, p in enumerate(game.prefs)]
    for i in range(1, s + 1):
        order = _order([i], [0], domain=dom)
        agents += [Agent(f"b{i}_{p}", BLUE, order) for p in range(1, s * s + 1)]
    return Instance(s, tuple(agents))


def reduce_anon_nash(game: AnonymousGame) -> Instance:
    """As :func:`reduce_anon_core`, with n*n - n fully indifferent blue agents."""
    n = game.n
    if n < 2:
        raise ModelError("the game needs at least two agents")
    s = n
    flat = WeakOrder.from_lists([range(s + 1)])
    agents = [Agent(f"r{i + 1}", RED, lift_size_order(p)) for i, p in enumerate(game.prefs)]
    agents += [Agent(f"b{i}", BLUE, flat) for i in range(1, n * n - n + 1)]
    return Instance(s, tuple(agents))


@dataclass(frozen=True)
class X3CInstance:
    """Ground set ``1..m`` and 3-element subsets (``sets[j - 1]`` is set j)."""

    m: int
    sets: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        sets = tuple(tuple(sorted(a)) for a in self.sets)
        object.__setattr__(self, "sets", sets)
        if self.m < 0 or self.m % 3:
            raise ModelError(f"ground set size must be a non-negative multiple of 3, got {self.m}")
        for a in sets:
            if len(a) != 3 or len(set(a)) != 3 or not all(1 <= x <= self.m for x in a):
                raise ModelError(f"{list(a)} is not a 3-element subset of 1..{self.m}")

    @property
    def q(self) -> int:
        return len(self.sets)

    def is_cover(self, chosen: Sequence[int]) -> bool:
        covered = [x for j in chosen for x in self.sets[j - 1]]
        return sorted(covered) == list(range(1, self.m + 1))

    def to_json(self) -> dict:
        return {"kind": "x3c", "m": self.m, "sets": [list(a) for a in self.sets]}

    @classmethod
    def from_json(cls, data: dict) -> X3CInstance:
        if data.get("kind", "x3c") != "x3c":
            raise ParseError(f"expected kind 'x3c', got {data.get('kind')!r}")
        try:
            return cls(int(data["m"]), tuple(tuple(a) for a in data["sets"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad X3C instance: {exc}") from None


def reduce_x3c(x3c: X3CInstance) -> Instance:
    """Envy-freeness instance whose stable outcomes encode exact covers.

    Agent ids: ``r<i>`` element agents, ``rr<j>_<p>`` redundant red agents,
    ``bf<j>_<p>`` filling blue agents, ``ba<j>_<t>`` additional blue agents,
    ``bp<p>`` blue agents added per red agent and ``bz<p>`` padding.
    """
    q = x3c.q
    if q == 0:
        raise ModelError("the collection must hold at least one set")
    s = 5 * q + 1
    dom = range(s + 1)
    agents: list[Agent] = []
    for i in range(1, x3c.m + 1):
        tops = [5 * j + 1 for j in range(1, q + 1) if i in x3c.sets[j - 1]]
        agents.append(Agent(f"r{i}", RED, _order(tops, [1], domain=dom)))
    for j in range(1, q + 1):
        order = _order([5 * j + 1, 5 * j - 2], [1], domain=dom)
        agents += [Agent(f"rr{j}_{p}", RED, order) for p in range(1, 5 * j - 1)]
    for j in range(1, q + 1):
        order = _order([5 * j + 1, 5 * j - 2], [0], domain=dom)
        agents += [Agent(f"bf{j}_{p}", BLUE, order) for p in range(1, s - 5 * j)]
        extra = _order([5 * j - 2], [0], domain=dom)
        agents += [Agent(f"ba{j}_{t}", BLUE, extra) for t in (1, 2, 3)]
    zero_first = _order([0], domain=dom)
    reds = sum(a.red for a in agents)
    agents += [Agent(f"bp{p}", BLUE, zero_first) for p in range(1, s * reds + 1)]
    pad = -len(agents) % s
    agents += [Agent(f"bz{p}", BLUE, zero_first) for p in range(1, pad + 1)]
    return Instance(s, tuple(agents))


def x3c_outcome(x3c: X3CInstance, instance: Instance, cover: Sequence[int]) -> Outcome:
    """Outcome built from an exact cover: one mixed room per set, pure blue rest."""
    if not x3c.is_cover(cover):
        raise ModelError(f"sets {list(cover)} do not form an exact cover")
    q, s = x3c.q, instance.s
    chosen = set(cover)
    rooms = []
    used: set[str] = set()
    for j in range(1, q + 1):
        room = [f"rr{j}_{p}" for p in range(1, 5 * j - 1)] + [f"bf{j}_{p}" for p in range(1, s - 5 * j)]
        if j in chosen:
            room += [f"r{i}" for i in x3c.sets[j - 1]]
        else:
            room += [f"ba{j}_{t}" for t in (1, 2, 3)]
        rooms.append(room)
        used.update(room)
    rest = [a.id for a in instance.agents if a.id not in used]
    if any(instance.agent(a).red for a in rest):
        raise ModelError("a red agent was left outside the mixed rooms")
    rooms += [rest[t:t + s] for t in range(0, len(rest), s)]
    return Outcome(tuple(tuple(r) for r in rooms))


def break_ties(instance: Instance) -> Instance:
    """Linearise every indifference class by ascending numerator."""
    agents = tuple(
        Agent(a.id, a.color, WeakOrder.strict([v for c in a.pref.classes for v in sorted(c)]))
        for a in instance.agents
    )
    return Instance(instance.s, agents)


# -- random sampling ------------------------------------------------------------------

def random_weak_order(rng: random.Random, values: Sequence[int], merge: float = 0.5) -> WeakOrder:
    vals = list(values)
    rng.shuffle(vals)
    classes = [[vals[0]]]
    for v in vals[1:]:
        if rng.random() < merge:
            classes[-1].append(v)
        else:
            classes.append([v])
    return WeakOrder.from_lists(classes)


def random_strict_order(rng: random.Random, values: Sequence[int]) -> WeakOrder:
    vals = list(values)
    rng.shuffle(vals)
    return WeakOrder.strict(vals)


def random_dichotomous_order(rng: random.Random, values: Sequence[int]) -> WeakOrder:
    approved = [v for v in values if rng.random() < 0.5]
    rest = [v for v in values if v not in approved]
    return WeakOrder.from_lists([c for c in (approved, rest) if c])


def random_single_peaked_order(rng: random.Random, s: int, merge: float = 0.25) -> WeakOrder:
    """Peak uniform, then the two slopes merged by random interleaving.

    Adjacent classes are merged with probability ``merge``; merging keeps
    the order single-peaked.
    """
    peak = rng.randint(0, s)
    left = list(range(peak - 1, -1, -1))
    right = list(range(peak + 1, s + 1))
    seq = [peak]
    while left or right:
        side = left if right == [] or (left and rng.random() < 0.5) else right
        seq.append(side.pop(0))
    classes = [[seq[0]]]
    for v in seq[1:]:
        if rng.random() < merge:
            classes[-1].append(v)
        else:
            classes.append([v])
    return WeakOrder.from_lists(classes)


def _sampler(rng: random.Random, s: int, pref_class: str):
    if pref_class not in PREF_CLASSES:
        raise ModelError(f"unknown preference class {pref_class!r}; pick one of {', '.join(PREF_CLASSES)}")
    values = range(s + 1)

    def draw() -> WeakOrder:
        if pref_class == "strict":
            return random_strict_order(rng, values)
        if pref_class == "dichotomous":
            return random_dichotomous_order(rng, values)
        if pref_class == "single_peaked":
            return random_single_peaked_order(rng, s)
        return random_weak_order(rng, values)

    return draw


def random_instance(s: int, k: int, pref_class: str = "unrestricted", red_count: int = 0,
                    seed: int | None = None) -> Instance:
    """Seeded random instance with ``red_count`` red agents among ``s * k``."""
    if s < 1 or k < 0:
        raise ModelError(f"need s >= 1 and k >= 0, got s={s}, k={k}")
    if not 0 <= red_count <= s * k:
        raise ModelError(f"red_count must lie in 0..{s * k}, got {red_count}")
    rng = random.Random(seed)
    draw = _sampler(rng, s, pref_class)
    agents = [Agent(f"r{i}", RED, draw()) for i in range(1, red_count + 1)]
    agents += [Agent(f"b{i}", BLUE, draw()) for i in range(1, s * k - red_count + 1)]
    return Instance(s, tuple(agents))


def random_marriage_instance(s: int, k: int, pref_class: str = "unrestricted", red_share: float = 0.5,
                             seed: int | None = None) -> MarriageInstance:
    """Seeded marriage instance: ``k`` agents per dimension, each red with probability ``red_share``.

    Ids are ``d<dim>_<i>``.
    """
    if s < 1 or k < 0:
        raise ModelError(f"need s >= 1 and k >= 0, got s={s}, k={k}")
    rng = random.Random(seed)
    draw = _sampler(rng, s, pref_class)
    agents = []
    for d in range(1, s + 1):
        for i in range(1, k + 1):
            color = RED if rng.random() < red_share else BLUE
            agents.append(MarriageAgent(f"d{d}_{i}", color, d, draw()))
    return MarriageInstance(s, tuple(agents))

"""Count-profile ILP encodings for the existence questions.

Agents are grouped into types (colour plus weak order).  An outcome is
described, up to renaming agents of equal type, by

* ``n[j]``: the number of rooms holding ``j`` red agents,
* ``r[i, j]``: red agents of type ``i`` in such rooms (``j`` in ``1..s``),
* ``b[i, j]``: blue agents of type ``i`` in such rooms (``j`` in ``0..s-1``).

Each stability notion becomes disjunctions over counts of agents who would
gain from some numerator.  The number of variables is
``(s + 1) + s * (t_r + t_b)`` for ``t_r`` red and ``t_b`` blue types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import ilp
from .ilp import ConstraintSystem, VarId, eq, le
from .model import Instance, Outcome, WeakOrder, build_rooms, placement
from .verify import Concept, witness_at


@dataclass(frozen=True)
class AgentType:
    red: bool
    pref: WeakOrder
    members: tuple[str, ...]  # ids, sorted

    @property
    def count(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TypeProfile:
    s: int
    red_types: tuple[AgentType, ...]
    blue_types: tuple[AgentType, ...]

    @classmethod
    def of(cls, instance: Instance) -> TypeProfile:
        groups: dict[tuple[bool, WeakOrder], list[str]] = {}
        for a in instance.agents:
            groups.setdefault((a.red, a.pref), []).append(a.id)
        types = [AgentType(red, pref, tuple(ids)) for (red, pref), ids in groups.items()]
        types.sort(key=lambda t: t.members[0])
        return cls(
            instance.s,
            tuple(t for t in types if t.red),
            tuple(t for t in types if not t.red),
        )

    @property
    def r(self) -> int:
        return sum(t.count for t in self.red_types)

    @property
    def b(self) -> int:
        return sum(t.count for t in self.blue_types)


@dataclass(frozen=True)
class CountProfile:
    """A decoded solution: per-type class counts plus colocation groups."""

    rooms: tuple[int, ...]  # n_j for j = 0..s
    r_counts: tuple[tuple[int, ...], ...]  # [type][j], j = 0..s (j = 0 always 0)
    b_counts: tuple[tuple[int, ...], ...]  # [type][j], j = 0..s (j = s always 0)
    colocate: tuple[tuple[int, frozenset[str]], ...] = ()


@dataclass
class Encoding:
    """A constraint system plus the variable handles needed to decode it."""

    system: ConstraintSystem
    profile: TypeProfile
    n: list[VarId]
    r: dict[tuple[int, int], VarId]
    b: dict[tuple[int, int], VarId]
    colocation: list[Callable[[ilp.Assignment], tuple[int, frozenset[int], frozenset[int]] | None]] = field(
        default_factory=list
    )

    # Linear expressions are plain lists of (var, coef); a "count" is the
    # number of agents at some numerator that rank another one higher.

    def count(self, red: bool, at: int, target: int, weak: bool) -> list[tuple[VarId, int]]:
        """Agents of one colour at numerator ``at`` who (weakly) prefer ``target``."""
        types = self.profile.red_types if red else self.profile.blue_types
        table = self.r if red else self.b
        out = []
        for i, t in enumerate(types):
            key = (i, at)
            if key not in table:
                continue
            ra, rt = t.pref.rank[at], t.pref.rank[target]
            if rt < ra or (weak and rt == ra):
                out.append((table[key], 1))
        return out

    def willing(self, red: bool, target: int, weak: bool) -> list[tuple[VarId, int]]:
        """All agents of one colour who (weakly) prefer ``target`` to their room."""
        s = self.profile.s
        span = range(1, s + 1) if red else range(0, s)
        out = []
        for at in span:
            out += self.count(red, at, target, weak)
        return out

    def decode(self, sol: ilp.Assignment) -> CountProfile:
        s = self.profile.s
        rooms = tuple(sol[v] for v in self.n)
        rc = tuple(
            tuple(sol[self.r[i, j]] if (i, j) in self.r else 0 for j in range(s + 1))
            for i in range(len(self.profile.red_types))
        )
        bc = tuple(
            tuple(sol[self.b[i, j]] if (i, j) in self.b else 0 for j in range(s + 1))
            for i in range(len(self.profile.blue_types))
        )
        classes = _class_members(self.profile, rc, bc)
        groups = []
        for rule in self.colocation:
            hit = rule(sol)
            if hit is None:
                continue
            j, red_types, blue_types = hit
            ids = set()
            for i in red_types:
                ids.update(classes[j][0][i])
            for i in blue_types:
                ids.update(classes[j][1][i])
            if ids:
                groups.append((j, frozenset(ids)))
        return CountProfile(rooms, rc, bc, tuple(groups))


def _zero(expr) -> ilp.LinearConstraint:
    return le(expr, 0)


def _at_most(expr, bound: int) -> ilp.LinearConstraint:
    return le(expr, -bound)


def base_system(profile: TypeProfile) -> Encoding:
    """Variables plus the bookkeeping rows: every agent placed, rooms filled."""
    s = profile.s
    n_agents = profile.r + profile.b
    k = n_agents // s
    sys = ConstraintSystem()
    n = []
    for j in range(s + 1):
        cap = k
        if j >= 1:
            cap = min(cap, profile.r // j)
        if j <= s - 1:
            cap = min(cap, profile.b // (s - j))
        n.append(sys.var(f"n_{j}", 0, cap))
    r: dict[tuple[int, int], VarId] = {}
    b: dict[tuple[int, int], VarId] = {}
    for i, t in enumerate(profile.red_types):
        for j in range(1, s + 1):
            r[i, j] = sys.var(f"r_{i}_{j}", 0, t.count)
    for i, t in enumerate(profile.blue_types):
        for j in range(0, s):
            b[i, j] = sys.var(f"b_{i}_{j}", 0, t.count)
    for i, t in enumerate(profile.red_types):
        sys.add(eq([(r[i, j], 1) for j in range(1, s + 1)], -t.count))
    for i, t in enumerate(profile.blue_types):
        sys.add(eq([(b[i, j], 1) for j in range(0, s)], -t.count))
    for j in range(1, s + 1):
        sys.add(eq([(r[i, j], 1) for i in range(len(profile.red_types))] + [(n[j], -j)]))
    for j in range(0, s):
        sys.add(eq([(b[i, j], 1) for i in range(len(profile.blue_types))] + [(n[j], -(s - j))]))
    sys.add(eq([(v, 1) for v in n], -k))  # implied, but it helps propagation
    return Encoding(sys, profile, n, r, b)


def encode_core(profile: TypeProfile, strong: bool = False) -> Encoding:
    enc = base_system(profile)
    s, sys = profile.s, enc.system
    for j in range(s + 1):
        qr, qb = enc.willing(True, j, False), enc.willing(False, j, False)
        if not strong:
            # no j red and s-j blue agents all strictly prefer j
            if j == 0:
                sys.add(_at_most(qb, s - 1))
            elif j == s:
                sys.add(_at_most(qr, s - 1))
            else:
                sys.add_any([[_at_most(qr, j - 1)], [_at_most(qb, s - j - 1)]], tag=f"core_{j}")
            continue
        wr, wb = enc.willing(True, j, True), enc.willing(False, j, True)
        branches = []
        if j >= 1:
            branches.append([_at_most(wr, j - 1)])
        if j <= s - 1:
            branches.append([_at_most(wb, s - j - 1)])
        # nobody who could sit in such a coalition strictly gains
        no_strict = []
        if j >= 1:
            no_strict.append(_zero(qr))
        if j <= s - 1:
            no_strict.append(_zero(qb))
        branches.append(no_strict)
        sys.add_any(branches, tag=f"strong_core_{j}")
    return enc


def _pair_free(enc: Encoding, x_red: bool, x_at: int, x_to: int, y_red: bool, y_at: int, y_to: int,
               strong: bool, tag: str) -> None:
    """Forbid an agent (x) at ``x_at`` gaining from ``x_to`` while one (y) gains from ``y_to``.

    The two agents are assumed to sit in different rooms whenever both exist.
    """
    xs = enc.count(x_red, x_at, x_to, False)
    ys = enc.count(y_red, y_at, y_to, False)
    if not strong:
        enc.system.add_any([[_zero(xs)], [_zero(ys)]], tag=tag)
        return
    xw = enc.count(x_red, x_at, x_to, True)
    yw = enc.count(y_red, y_at, y_to, True)
    enc.system.add_any([[_zero(xs)], [_zero(yw)]], tag=tag)
    enc.system.add_any([[_zero(xw)], [_zero(ys)]], tag=tag)


def encode_exchange(profile: TypeProfile, strong: bool = False, same_type_only: bool = False) -> Encoding:
    enc = base_system(profile)
    s = profile.s
    if not same_type_only:
        for j in range(1, s + 1):
            for k in range(1, s + 1):
                if j != k - 1:
                    # red at j moving to the blue's room gets k; the blue gets j-1
                    _pair_free(enc, True, j, k, False, k - 1, j - 1, strong, f"swap_{j}_{k}")
        for j in range(1, s):
            _same_class_swap(enc, j, strong)
    for j in range(1, s + 1):
        for k in range(j + 1, s + 1):
            _pair_free(enc, True, j, k, True, k, j, strong, f"red_swap_{j}_{k}")
    for j in range(0, s):
        for k in range(j + 1, s):
            _pair_free(enc, False, j, k, False, k, j, strong, f"blue_swap_{j}_{k}")
    return enc


def _same_class_swap(enc: Encoding, j: int, strong: bool) -> None:
    """Red and blue agents in rooms with j reds who would trade places.

    Such pairs are harmless only if they share a room, so either one side is
    empty or all of them fit into a single room (recorded for realisation).
    """
    s, sys = enc.profile.s, enc.system
    sr = enc.count(True, j, j + 1, False)
    sb = enc.count(False, j, j - 1, False)
    red_t = enc.profile.red_types
    blue_t = enc.profile.blue_types

    def types(red: bool, weak: bool) -> frozenset[int]:
        ts = red_t if red else blue_t
        at, to = (j, j + 1) if red else (j, j - 1)
        return frozenset(
            i for i, t in enumerate(ts)
            if t.pref.rank[to] < t.pref.rank[at] or (weak and t.pref.rank[to] == t.pref.rank[at])
        )

    def total(sol, expr):
        return sum(sol[v] * c for v, c in expr)

    if not strong:
        sys.add_any([[_zero(sr)], [_zero(sb)], [_at_most(sr, j), _at_most(sb, s - j)]], tag=f"colocate_{j}")

        def rule(sol):
            if total(sol, sr) and total(sol, sb):
                return j, types(True, False), types(False, False)
            return None

        enc.colocation.append(rule)
        return
    wr = enc.count(True, j, j + 1, True)
    wb = enc.count(False, j, j - 1, True)
    sys.add_any(
        [
            [_zero(wr)],
            [_zero(wb)],
            [_zero(sr), _zero(sb)],
            [_zero(sr), _at_most(wr, j), _at_most(sb, s - j)],
            [_zero(sb), _at_most(sr, j), _at_most(wb, s - j)],
            [_at_most(wr, j), _at_most(wb, s - j)],
        ],
        tag=f"colocate_{j}",
    )

    def strong_rule(sol):
        a_s, a_w, b_s, b_w = (total(sol, e) for e in (sr, wr, sb, wb))
        if not a_w or not b_w or (not a_s and not b_s):
            return None
        if a_s and not b_s:
            return j, types(True, False), types(False, True)
        if b_s and not a_s:
            return j, types(True, True), types(False, False)
        return j, types(True, True), types(False, True)

    enc.colocation.append(strong_rule)


def encode_envy_free(profile: TypeProfile, same_type_only: bool = False) -> Encoding:
    enc = base_system(profile)
    s, sys, n = profile.s, enc.system, enc.n
    for j in range(1, s + 1):
        for k in range(1, s + 1):
            if j != k:
                sys.add_any([[_zero(enc.count(True, j, k, False))], [_zero([(n[k], 1)])]], tag=f"envy_rr_{j}_{k}")
    for j in range(0, s):
        for k in range(0, s):
            if j != k:
                sys.add_any([[_zero(enc.count(False, j, k, False))], [_zero([(n[k], 1)])]], tag=f"envy_bb_{j}_{k}")
    if same_type_only:
        return enc
    for j in range(1, s + 1):
        for k in range(1, s + 1):
            c = enc.count(True, j, k, False)
            if j != k - 1:
                sys.add_any([[_zero(c)], [_zero([(n[k - 1], 1)])]], tag=f"envy_rb_{j}_{k}")
            else:
                sys.add_any([[_zero(c)], [_at_most([(n[j], 1)], 1)]], tag=f"envy_rb_{j}_{k}")
    for j in range(0, s):
        for k in range(0, s):
            c = enc.count(False, j, k, False)
            if j != k + 1:
                sys.add_any([[_zero(c)], [_zero([(n[k + 1], 1)])]], tag=f"envy_br_{j}_{k}")
            else:
                sys.add_any([[_zero(c)], [_at_most([(n[j], 1)], 1)]], tag=f"envy_br_{j}_{k}")
    return enc


def encode(profile: TypeProfile, concept: Concept) -> Encoding:
    concept = Concept(concept)
    if concept is Concept.CORE:
        return encode_core(profile, False)
    if concept is Concept.STRONG_CORE:
        return encode_core(profile, True)
    if concept is Concept.EXCHANGE:
        return encode_exchange(profile, False)
    if concept is Concept.STRONG_EXCHANGE:
        return encode_exchange(profile, True)
    if concept is Concept.SAME_TYPE_EXCHANGE:
        return encode_exchange(profile, False, same_type_only=True)
    if concept is Concept.STRONG_SAME_TYPE_EXCHANGE:
        return encode_exchange(profile, True, same_type_only=True)
    if concept is Concept.ENVY:
        return encode_envy_free(profile, False)
    if concept is Concept.SAME_TYPE_ENVY:
        return encode_envy_free(profile, True)
    raise ValueError(f"no ILP encoding for {concept.value}")


SUPPORTED = frozenset(c for c in Concept if c is not Concept.PARETO)


def _class_members(profile: TypeProfile, rc, bc) -> dict[int, tuple[list[list[str]], list[list[str]]]]:
    """Hand out each type's agents to classes in ascending numerator, ids in order."""
    s = profile.s
    classes = {j: ([[] for _ in profile.red_types], [[] for _ in profile.blue_types]) for j in range(s + 1)}
    for side, types, counts in ((0, profile.red_types, rc), (1, profile.blue_types, bc)):
        for i, t in enumerate(types):
            pos = 0
            for j in range(s + 1):
                c = counts[i][j]
                classes[j][side][i] = list(t.members[pos:pos + c])
                pos += c
            if pos != t.count:
                raise ValueError(f"type {i} counts sum to {pos}, expected {t.count}")
    return classes


def realize(instance: Instance, profile: CountProfile, types: TypeProfile | None = None) -> Outcome:
    """Concrete outcome for a count profile; colocation groups share a room."""
    types = types or TypeProfile.of(instance)
    s = instance.s
    classes = _class_members(types, profile.r_counts, profile.b_counts)
    plan = {}
    for j in range(s + 1):
        if not profile.rooms[j]:
            continue
        reds = sorted(a for ids in classes[j][0] for a in ids)
        blues = sorted(a for ids in classes[j][1] for a in ids)
        plan[j] = (reds, blues)
    colocate: dict[int, set[str]] = {}
    for j, ids in profile.colocate:
        if j in colocate:
            raise ValueError(f"two colocation groups for class {j}")
        colocate[j] = set(ids)
    return build_rooms(s, plan, colocate)


def solve_existence(instance: Instance, concept: Concept) -> Outcome | None:
    """Stable outcome found through the ILP, or ``None`` if none exists.

    Every outcome returned has been re-checked with the direct checker.
    """
    concept = Concept(concept)
    profile = TypeProfile.of(instance)
    if instance.n == 0:
        return Outcome(())
    enc = encode(profile, concept)
    sol = ilp.solve(enc.system)
    if sol is None:
        return None
    outcome = realize(instance, enc.decode(sol), profile)
    if witness_at(instance, placement(instance, outcome), concept) is not None:
        raise AssertionError(f"ILP solution for {concept.value} does not realise a stable outcome")
    return outcome

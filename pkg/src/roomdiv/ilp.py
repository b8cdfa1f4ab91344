"""Exact feasibility search for bounded integer systems with disjunctions.

A system has integer variables with finite bounds, hard linear constraints
``sum(coef * var) + constant (<= | ==) 0`` and disjunction groups (at least
one branch, a conjunction of constraints, must hold).  :func:`solve` runs a
depth-first search over variable values in declaration order, smallest value
first, with bound propagation at every node.  Propagation never removes a
solution, so the first leaf reached is the lexicographically smallest
feasible point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels

LE = "<="
EQ = "=="
_LIMIT = 2**62


@dataclass(frozen=True)
class VarId:
    index: int
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coef * var) + constant`` compared with zero."""

    terms: tuple[tuple[VarId, int], ...]
    constant: int = 0
    relation: str = LE

    def __post_init__(self):
        if self.relation not in (LE, EQ):
            raise ValueError(f"relation must be '<=' or '==', got {self.relation!r}")
        merged: dict[VarId, int] = {}
        for v, c in self.terms:
            merged[v] = merged.get(v, 0) + int(c)
        terms = tuple((v, c) for v, c in sorted(merged.items(), key=lambda t: t[0].index) if c)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "constant", int(self.constant))

    def value(self, values: Sequence[int]) -> int:
        return sum(c * values[v.index] for v, c in self.terms) + self.constant

    def holds(self, values: Sequence[int]) -> bool:
        x = self.value(values)
        return x == 0 if self.relation == EQ else x <= 0

    def __str__(self):
        parts = []
        for v, c in self.terms:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            parts.append(f"{sign} {mag}{v.name}")
        lhs = " ".join(parts).lstrip("+ ") or "0"
        rhs = -self.constant
        op = "=" if self.relation == EQ else "<="
        return f"{lhs} {op} {rhs}"


def le(terms: Iterable[tuple[VarId, int]] | Mapping[VarId, int], constant: int = 0) -> LinearConstraint:
    """``sum + constant <= 0``."""
    if isinstance(terms, Mapping):
        terms = terms.items()
    return LinearConstraint(tuple(terms), constant, LE)


def eq(terms: Iterable[tuple[VarId, int]] | Mapping[VarId, int], constant: int = 0) -> LinearConstraint:
    """``sum + constant == 0``."""
    if isinstance(terms, Mapping):
        terms = terms.items()
    return LinearConstraint(tuple(terms), constant, EQ)


@dataclass(frozen=True)
class DisjunctionGroup:
    branches: tuple[tuple[LinearConstraint, ...], ...]
    tag: str = ""

    def __post_init__(self):
        if not self.branches:
            raise ValueError("a disjunction group needs at least one branch")

    def holds(self, values: Sequence[int]) -> bool:
        return any(all(c.holds(values) for c in br) for br in self.branches)


@dataclass(frozen=True)
class Assignment:
    values: tuple[int, ...]
    names: tuple[str, ...]

    def __getitem__(self, key: VarId | str | int) -> int:
        if isinstance(key, VarId):
            return self.values[key.index]
        if isinstance(key, str):
            return self.values[self.names.index(key)]
        return self.values[key]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.values))


@dataclass
class ConstraintSystem:
    """Builder for a bounded system; see the module docstring."""

    vars: list[tuple[VarId, int, int]] = field(default_factory=list)
    hard: list[LinearConstraint] = field(default_factory=list)
    disjunctions: list[DisjunctionGroup] = field(default_factory=list)

    def var(self, name: str, lower: int, upper: int) -> VarId:
        lower, upper = int(lower), int(upper)
        if lower > upper:
            raise ValueError(f"variable {name}: lower bound {lower} exceeds upper bound {upper}")
        v = VarId(len(self.vars), name)
        self.vars.append((v, lower, upper))
        return v

    def add(self, constraint: LinearConstraint) -> None:
        self._check_vars(constraint)
        self.hard.append(constraint)

    def add_le(self, terms, constant: int = 0) -> None:
        self.add(le(terms, constant))

    def add_eq(self, terms, constant: int = 0) -> None:
        self.add(eq(terms, constant))

    def add_any(self, branches: Iterable[Iterable[LinearConstraint]], tag: str = "") -> None:
        """Add a disjunction; constant constraints are folded away first.

        A branch with a false constant constraint is dropped; a branch made
        only of true constants satisfies the group, which is then skipped.
        With no branch left the system is infeasible.
        """
        kept = []
        for br in branches:
            br = tuple(br)
            for c in br:
                self._check_vars(c)
            if any(not c.terms and not c.holds(()) for c in br):
                continue
            br = tuple(c for c in br if c.terms)
            if not br:
                return
            kept.append(br)
        if not kept:
            self.hard.append(LinearConstraint((), 1))
            return
        if len(kept) == 1:
            self.hard.extend(kept[0])
            return
        self.disjunctions.append(DisjunctionGroup(tuple(kept), tag))

    def _check_vars(self, c: LinearConstraint) -> None:
        for v, _ in c.terms:
            if v.index >= len(self.vars) or self.vars[v.index][0] != v:
                raise ValueError(f"constraint uses undeclared variable {v.name}")

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    def bounds(self) -> tuple[list[int], list[int]]:
        return [lo for _, lo, _ in self.vars], [hi for _, _, hi in self.vars]

    def check(self, values: Sequence[int]) -> bool:
        """Exact re-verification of a full assignment."""
        if len(values) != len(self.vars):
            return False
        for (_, lo, hi), x in zip(self.vars, values):
            if not lo <= x <= hi:
                return False
        return all(c.holds(values) for c in self.hard) and all(g.holds(values) for g in self.disjunctions)

    def to_lp_text(self) -> str:
        """Plain-text dump for debugging; not a stable format."""
        lines = ["bounds"]
        lines += [f"  {lo} <= {v.name} <= {hi}" for v, lo, hi in self.vars]
        lines.append("subject to")
        lines += [f"  {c}" for c in self.hard]
        for g in self.disjunctions:
            head = f"any {g.tag}".rstrip()
            lines.append(f"  {head}")
            for br in g.branches:
                lines.append("    | " + " and ".join(str(c) for c in br))
        return "\n".join(lines) + "\n"


class _Compiled:
    """Flat int64 arrays in the layout the propagation kernel expects."""

    def __init__(self, system: ConstraintSystem):
        cons: list[LinearConstraint] = list(system.hard)
        hard = list(range(len(cons)))
        grp_ptr, br_ptr, br_cons = [0], [0], []
        for g in system.disjunctions:
            for br in g.branches:
                for c in br:
                    br_cons.append(len(cons))
                    cons.append(c)
                br_ptr.append(len(br_cons))
            grp_ptr.append(len(br_ptr) - 1)
        lo, hi = system.bounds()
        self._check_overflow(cons, lo, hi)
        ptr, var, coef = [0], [], []
        for c in cons:
            for v, a in c.terms:
                var.append(v.index)
                coef.append(a)
            ptr.append(len(var))
        i64 = np.int64
        self.lo = np.array(lo, dtype=i64)
        self.hi = np.array(hi, dtype=i64)
        self.hard = np.array(hard, dtype=i64)
        self.ptr = np.array(ptr, dtype=i64)
        self.var = np.array(var, dtype=i64)
        self.coef = np.array(coef, dtype=i64)
        self.const = np.array([c.constant for c in cons], dtype=i64)
        self.eq = np.array([c.relation == EQ for c in cons], dtype=np.int8)
        self.grp_ptr = np.array(grp_ptr, dtype=i64)
        self.br_ptr = np.array(br_ptr, dtype=i64)
        self.br_cons = np.array(br_cons, dtype=i64)
        self.n_branches = len(br_ptr) - 1

    @staticmethod
    def _check_overflow(cons, lo, hi):
        for c in cons:
            worst = abs(c.constant)
            for v, a in c.terms:
                worst += abs(a) * max(abs(lo[v.index]), abs(hi[v.index]))
            if worst >= _LIMIT:
                raise OverflowError(f"constraint '{c}' can reach magnitude {worst}, beyond the 64-bit engine range")

    def propagate(self, lo, hi, alive) -> bool:
        return kernels.propagate(lo, hi, self.hard, self.ptr, self.var, self.coef, self.const, self.eq,
                                 self.grp_ptr, self.br_ptr, self.br_cons, alive)


@dataclass
class SearchStats:
    nodes: int = 0


def solve(system: ConstraintSystem, stats: SearchStats | None = None) -> Assignment | None:
    """Lexicographically smallest feasible point, or ``None`` if infeasible."""
    comp = _Compiled(system)
    names = tuple(v.name for v, _, _ in system.vars)
    alive = np.ones(comp.n_branches, dtype=np.int8)
    stack = [(comp.lo.copy(), comp.hi.copy(), alive)]
    nodes = 0
    while stack:
        lo, hi, alive = stack.pop()
        nodes += 1
        if not comp.propagate(lo, hi, alive):
            continue
        free = np.flatnonzero(lo < hi)
        if free.size == 0:
            values = tuple(int(x) for x in lo)
            if not system.check(values):  # propagation is exact at fixed points
                raise AssertionError("engine produced an assignment that fails re-verification")
            if stats is not None:
                stats.nodes = nodes
            return Assignment(values, names)
        v = free[0]
        # push the "larger" half first so the smaller value is explored first
        up_lo = lo.copy()
        up_lo[v] = lo[v] + 1
        stack.append((up_lo, hi.copy(), alive.copy()))
        fix_hi = hi.copy()
        fix_hi[v] = lo[v]
        stack.append((lo.copy(), fix_hi, alive.copy()))
    if stats is not None:
        stats.nodes = nodes
    return None


def grid_solve(system: ConstraintSystem) -> Assignment | None:
    """Brute force over the full box; only for tiny systems in tests."""
    lo, hi = system.bounds()
    names = tuple(v.name for v, _, _ in system.vars)
    for point in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if system.check(point):
            return Assignment(tuple(point), names)
    return None

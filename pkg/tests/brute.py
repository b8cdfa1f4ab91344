"""Naive reference implementations straight from the definitions.

Slow on purpose: every coalition, pair and partition is listed explicitly.
"""

import itertools

from roomdiv.model import Outcome


def numerators(instance, outcome):
    red = {a.id: a.red for a in instance.agents}
    out = {}
    for room in outcome.rooms:
        t = sum(red[a] for a in room)
        for a in room:
            out[a] = t
    return out


def all_partitions(ids, s):
    """Every partition of ``ids`` into blocks of size ``s``, as Outcomes."""
    ids = sorted(ids)
    if not ids:
        yield Outcome(())
        return

    def rec(rest):
        if not rest:
            yield []
            return
        first, others = rest[0], rest[1:]
        for mates in itertools.combinations(others, s - 1):
            left = [x for x in others if x not in mates]
            for tail in rec(left):
                yield [(first,) + mates] + tail

    for rooms in rec(ids):
        yield Outcome(tuple(rooms))


def blocking_coalitions(instance, outcome, strong=False):
    cur = numerators(instance, outcome)
    ag = {a.id: a for a in instance.agents}
    for coal in itertools.combinations(sorted(ag), instance.s):
        j = sum(ag[a].red for a in coal)
        ranks = [(ag[a].pref.rank[j], ag[a].pref.rank[cur[a]]) for a in coal]
        if strong:
            if all(x <= y for x, y in ranks) and any(x < y for x, y in ranks):
                yield j, coal
        elif all(x < y for x, y in ranks):
            yield j, coal


def exchange_pairs(instance, outcome, same_type=False, strong=False, dims=None):
    cur = numerators(instance, outcome)
    room = outcome.room_of()
    ag = {a.id: a for a in instance.agents}
    for a, b in itertools.permutations(sorted(ag), 2):
        if room[a] == room[b]:
            continue
        if dims is not None and dims[a] != dims[b]:
            continue
        A, B = ag[a], ag[b]
        if same_type and A.red != B.red:
            continue
        na = cur[b] + A.red - B.red
        nb = cur[a] + B.red - A.red
        ga = A.pref.rank[na] < A.pref.rank[cur[a]]
        gb = B.pref.rank[nb] < B.pref.rank[cur[b]]
        wb = B.pref.rank[nb] <= B.pref.rank[cur[b]]
        if ga and (wb if strong else gb):
            yield a, b


def envy_pairs(instance, outcome, same_type=False):
    cur = numerators(instance, outcome)
    room = outcome.room_of()
    ag = {a.id: a for a in instance.agents}
    for a, b in itertools.permutations(sorted(ag), 2):
        if room[a] == room[b]:
            continue
        A, B = ag[a], ag[b]
        if same_type and A.red != B.red:
            continue
        if A.pref.rank[cur[b] + A.red - B.red] < A.pref.rank[cur[a]]:
            yield a, b


def dominates(instance, new, old):
    a, b = numerators(instance, new), numerators(instance, old)
    strict = False
    for ag in instance.agents:
        x, y = ag.pref.rank[a[ag.id]], ag.pref.rank[b[ag.id]]
        if x > y:
            return False
        strict |= x < y
    return strict


def pareto_optimal(instance, outcome):
    return not any(dominates(instance, o, outcome) for o in all_partitions([a.id for a in instance.agents], instance.s))


def stable(instance, outcome, concept):
    if concept == "core":
        return next(blocking_coalitions(instance, outcome), None) is None
    if concept == "strong-core":
        return next(blocking_coalitions(instance, outcome, strong=True), None) is None
    if concept == "exchange":
        return next(exchange_pairs(instance, outcome), None) is None
    if concept == "strong-exchange":
        return next(exchange_pairs(instance, outcome, strong=True), None) is None
    if concept == "same-type-exchange":
        return next(exchange_pairs(instance, outcome, same_type=True), None) is None
    if concept == "strong-same-type-exchange":
        return next(exchange_pairs(instance, outcome, same_type=True, strong=True), None) is None
    if concept == "envy":
        return next(envy_pairs(instance, outcome), None) is None
    if concept == "same-type-envy":
        return next(envy_pairs(instance, outcome, same_type=True), None) is None
    if concept == "pareto":
        return pareto_optimal(instance, outcome)
    raise ValueError(concept)


def marriage_outcomes(instance):
    """All one-per-dimension partitions, listed as plain set partitions filtered by dimension."""
    dims = {a.id: a.dim for a in instance.agents}
    for o in all_partitions(list(dims), instance.s):
        if all(sorted(dims[a] for a in room) == list(range(1, instance.s + 1)) for room in o.rooms):
            yield o


def marriage_blocking(instance, outcome, strong=False):
    cur = numerators(instance, outcome)
    per_dim = [[a for a in instance.agents if a.dim == d] for d in range(1, instance.s + 1)]
    for coal in itertools.product(*per_dim):
        j = sum(a.red for a in coal)
        ranks = [(a.pref.rank[j], a.pref.rank[cur[a.id]]) for a in coal]
        if strong:
            if all(x <= y for x, y in ranks) and any(x < y for x, y in ranks):
                return j, coal
        elif all(x < y for x, y in ranks):
            return j, coal
    return None


def marriage_stable(instance, outcome, concept):
    dims = {a.id: a.dim for a in instance.agents}
    if concept == "core":
        return marriage_blocking(instance, outcome) is None
    if concept == "strong-core":
        return marriage_blocking(instance, outcome, True) is None
    if concept == "exchange":
        return next(exchange_pairs(instance, outcome, dims=dims), None) is None
    if concept == "strong-exchange":
        return next(exchange_pairs(instance, outcome, strong=True, dims=dims), None) is None
    raise ValueError(concept)

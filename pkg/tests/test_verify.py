import random

import pytest

import brute
from roomdiv import generators
from roomdiv.model import Agent, BudgetExceeded, Color, Instance, InvalidOutcomeError, Outcome, WeakOrder
from roomdiv.oracle import enumerate_outcomes
from roomdiv.verify import (
    Concept,
    find_blocking,
    find_envy,
    find_exchange_deviation,
    find_pareto_improvement,
    find_witness,
    is_stable,
    pareto_dominates,
)

RED, BLUE = Color.RED, Color.BLUE


def _corpus(seed, count, max_n=8):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = rng.randint(1, 4)
        k = rng.randint(1, max(1, max_n // s))
        cls = rng.choice(generators.PREF_CLASSES)
        out.append(generators.random_instance(s, k, cls, rng.randint(0, s * k), rng.randrange(10**9)))
    return out


def _some_outcomes(inst, limit=6):
    outs = []
    for o in enumerate_outcomes(inst):
        outs.append(o)
        if len(outs) >= limit:
            break
    return outs


# -- core ---------------------------------------------------------------------------

def test_two_balanced_rooms_blocked_by_lone_red(no_core):
    w = find_blocking(no_core, Outcome((("r1", "r2", "b1", "b2"), ("r3", "r4", "b3", "b4"))))
    assert w.numerator == 1 and w.members == ("b1", "b2", "b3", "r4")


def test_three_one_split_blocked_by_all_reds(no_core):
    for o in [Outcome((("r1", "r2", "r3", "b1"), ("r4", "b2", "b3", "b4"))),
              Outcome((("r1", "r2", "r4", "b1"), ("r3", "b2", "b3", "b4")))]:
        w = find_blocking(no_core, o)
        assert w.numerator == 4 and w.members == ("r1", "r2", "r3", "r4")


def test_pure_split_blocked_by_balanced_room(no_core):
    w = find_blocking(no_core, Outcome((("r1", "r2", "r3", "r4"), ("b1", "b2", "b3", "b4"))))
    assert w.numerator == 2 and w.members == ("b1", "b2", "r1", "r2")


def test_everyone_at_top_is_core_stable():
    inst = Instance(2, (Agent("r1", RED, WeakOrder.strict([1, 2, 0])), Agent("b1", BLUE, WeakOrder.strict([1, 0, 2]))))
    o = Outcome((("r1", "b1"),))
    assert find_blocking(inst, o) is None and find_blocking(inst, o, strong=True) is None


def test_invalid_outcome_is_rejected(no_core):
    with pytest.raises(InvalidOutcomeError):
        find_blocking(no_core, Outcome((("r1", "r2", "b1"), ("r3", "r4", "b3", "b4", "b2"))))


def test_blocking_matches_brute_force():
    checked = 0
    for inst in _corpus(11, 120):
        for o in _some_outcomes(inst):
            for strong in (False, True):
                coalitions = sorted((j, tuple(sorted(c))) for j, c in brute.blocking_coalitions(inst, o, strong))
                w = find_blocking(inst, o, strong)
                if not coalitions:
                    assert w is None
                    continue
                assert w is not None
                # lexicographically smallest by (numerator, sorted ids)
                assert (w.numerator, w.members) == coalitions[0]
                assert len(w.red_members) == w.numerator
                checked += 1
    assert checked > 50


def test_strong_blocking_contains_weak_blocking():
    for inst in _corpus(12, 80):
        for o in _some_outcomes(inst):
            if find_blocking(inst, o) is not None:
                assert find_blocking(inst, o, strong=True) is not None


# -- exchange and envy ----------------------------------------------------------------

def test_exchange_witness_on_single_peaked_fixture(no_exchange):
    o = Outcome((("r1", "r3", "b2"), ("r2", "r4", "b3"), ("r5", "b1", "b4")))
    w = find_exchange_deviation(no_exchange, o)
    assert w.kind == "different_type"
    red, blue = sorted((w.a, w.b), key=lambda a: a.startswith("b"))
    # a keen red agent of one balanced room and the blue agent of the other
    assert red in ("r1", "r2") and blue in ("b2", "b3")
    assert o.room_of()[red] != o.room_of()[blue]
    assert (w.a, w.b) == ("b2", "r2")


def test_exchange_witness_on_marriage_preferences():
    inst = Instance(2, (
        Agent("r1", RED, WeakOrder.strict([2, 1, 0])),
        Agent("r2", RED, WeakOrder.strict([1, 2, 0])),
        Agent("b1", BLUE, WeakOrder.strict([0, 1, 2])),
        Agent("b2", BLUE, WeakOrder.strict([1, 0, 2])),
    ))
    w = find_exchange_deviation(inst, Outcome((("r1", "r2"), ("b1", "b2"))))
    assert {w.a, w.b} == {"r2", "b2"}


def test_identical_same_type_orders_give_no_same_type_deviation():
    order = WeakOrder.strict([1, 0, 2, 3])
    inst = Instance(3, tuple(Agent(f"r{i}", RED, order) for i in range(3)) +
                    tuple(Agent(f"b{i}", BLUE, WeakOrder.strict([2, 1, 0, 3])) for i in range(3)))
    for o in enumerate_outcomes(inst):
        assert find_exchange_deviation(inst, o, "same_type") is None
        assert find_exchange_deviation(inst, o, "same_type", strong=True) is None


def test_exchange_matches_brute_force():
    for inst in _corpus(13, 120):
        for o in _some_outcomes(inst):
            for mode in ("any", "same_type"):
                for strong in (False, True):
                    pairs = list(brute.exchange_pairs(inst, o, mode == "same_type", strong))
                    w = find_exchange_deviation(inst, o, mode, strong)
                    if not pairs:
                        assert w is None
                    else:
                        assert (w.a, w.b) == pairs[0]


def test_envy_witness_on_fixture(no_envy):
    w = find_envy(no_envy, Outcome((("r1", "b1"), ("b2", "b3"))))
    assert (w.envier, w.envied) == ("b1", "b2")


def test_equal_numerators_have_no_same_type_envy():
    rng = random.Random(5)
    inst = generators.random_instance(3, 3, "strict", 3, 5)
    ids_r = [a.id for a in inst.agents if a.red]
    ids_b = [a.id for a in inst.agents if not a.red]
    rng.shuffle(ids_b)
    o = Outcome(tuple((ids_r[i],) + tuple(ids_b[2 * i:2 * i + 2]) for i in range(3)))
    assert find_envy(inst, o, "same_type") is None


def test_single_room_has_no_envy():
    inst = generators.random_instance(3, 1, "strict", 2, 9)
    o = Outcome((tuple(a.id for a in inst.agents),))
    assert find_envy(inst, o) is None


def test_envy_matches_brute_force():
    for inst in _corpus(14, 120):
        for o in _some_outcomes(inst):
            for mode in ("any", "same_type"):
                pairs = list(brute.envy_pairs(inst, o, mode == "same_type"))
                w = find_envy(inst, o, mode)
                assert (w is None) == (not pairs)
                if pairs:
                    assert (w.envier, w.envied) == pairs[0]


def test_mode_is_validated(no_envy):
    o = Outcome((("r1", "b1"), ("b2", "b3")))
    with pytest.raises(ValueError):
        find_envy(no_envy, o, "other")
    with pytest.raises(ValueError):
        find_exchange_deviation(no_envy, o, "other")


# -- Pareto ------------------------------------------------------------------------------

def test_pure_split_has_no_pareto_improvement(no_core):
    # r4 already has her top numerator, so the all-red room must stay
    o = Outcome((("r1", "r2", "r3", "r4"), ("b1", "b2", "b3", "b4")))
    assert find_pareto_improvement(no_core, o) is None
    assert brute.pareto_optimal(no_core, o)


def test_balanced_split_is_pareto_optimal(no_core):
    o = Outcome((("r1", "r2", "b1", "b2"), ("r3", "r4", "b3", "b4")))
    assert find_pareto_improvement(no_core, o) is None


def test_three_one_split_is_improved(no_core):
    o = Outcome((("r2", "r3", "r4", "b4"), ("r1", "b1", "b2", "b3")))
    better = find_pareto_improvement(no_core, o)
    assert better is not None and pareto_dominates(no_core, better, o)
    assert brute.dominates(no_core, better, o)


def test_single_outcome_and_flat_preferences():
    inst = generators.random_instance(3, 1, "strict", 1, 3)
    assert find_pareto_improvement(inst, Outcome((tuple(a.id for a in inst.agents),))) is None
    flat = WeakOrder.from_lists([[0, 1, 2]])
    inst = Instance(2, tuple(Agent(f"x{i}", RED if i % 2 else BLUE, flat) for i in range(6)))
    for o in enumerate_outcomes(inst):
        assert find_pareto_improvement(inst, o) is None


def test_pareto_matches_brute_force():
    rng = random.Random(15)
    seen_improvable = 0
    for _ in range(60):
        s = rng.randint(2, 3)
        k = rng.randint(1, 6 // s + 1) if s == 2 else rng.randint(1, 2)
        inst = generators.random_instance(s, k, rng.choice(generators.PREF_CLASSES), rng.randint(0, s * k),
                                          rng.randrange(10**9))
        for o in _some_outcomes(inst, 4):
            better = find_pareto_improvement(inst, o)
            assert (better is None) == brute.pareto_optimal(inst, o)
            if better is not None:
                seen_improvable += 1
                assert brute.dominates(inst, better, o)
    assert seen_improvable > 5


def test_pareto_chain_is_short():
    rng = random.Random(16)
    for _ in range(30):
        inst = generators.random_instance(2, 4, "strict", rng.randint(0, 8), rng.randrange(10**9))
        o = next(enumerate_outcomes(inst))
        steps = 0
        while (nxt := find_pareto_improvement(inst, o)) is not None:
            o = nxt
            steps += 1
            assert steps <= inst.n * inst.s


def test_pareto_budget_is_an_error():
    inst = generators.random_instance(2, 5, "strict", 5, 1)
    o = next(enumerate_outcomes(inst))
    with pytest.raises(BudgetExceeded):
        find_pareto_improvement(inst, o, budget=2)


def test_dispatch(no_envy):
    o = Outcome((("r1", "b1"), ("b2", "b3")))
    assert not is_stable(no_envy, o, Concept.ENVY)
    assert find_witness(no_envy, o, "envy").to_json() == {"type": "envy", "envier": "b1", "envied": "b2"}

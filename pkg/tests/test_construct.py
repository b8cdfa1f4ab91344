import random
from collections import Counter

import pytest

import brute
from roomdiv import generators
from roomdiv.construct import (
    SwapLog,
    constructor_for,
    construct,
    id_order_outcome,
    local_search_same_type,
    pareto_optimal_outcome,
    solve_dichotomous_core,
    solve_same_type_envy_free,
    solve_size_two,
)
from roomdiv.model import Agent, Color, Instance, ModelError, Outcome, WeakOrder, validate_outcome
from roomdiv.oracle import oracle_exists
from roomdiv.verify import Concept

RED, BLUE = Color.RED, Color.BLUE


def _inst(s, *specs):
    return Instance(s, tuple(Agent(i, RED if i[0] == "r" else BLUE, WeakOrder.from_lists(p)) for i, p in specs))


def _room_sets(outcome):
    return {frozenset(r) for r in outcome.rooms}


# -- size two ---------------------------------------------------------------------------

def test_size_two_on_envy_fixture(no_envy):
    assert _room_sets(solve_size_two(no_envy)) == {frozenset({"b1", "b2"}), frozenset({"b3", "r1"})}


def test_size_two_everyone_wants_mixed():
    inst = _inst(2, ("r1", [[1], [2], [0]]), ("r2", [[1], [2], [0]]),
                 ("b1", [[1], [0], [2]]), ("b2", [[1], [0], [2]]))
    out = solve_size_two(inst)
    assert all(brute.numerators(inst, out)[a] == 1 for a in ("r1", "r2", "b1", "b2"))


def test_size_two_single_colour():
    inst = _inst(2, *[(f"b{i}", [[0], [1], [2]]) for i in range(1, 5)])
    assert _room_sets(solve_size_two(inst)) == {frozenset({"b1", "b2"}), frozenset({"b3", "b4"})}


def test_size_two_rejects_other_sizes():
    with pytest.raises(ModelError):
        solve_size_two(generators.random_instance(3, 2, "strict", 3, 0))


@pytest.mark.parametrize("pref_class", generators.PREF_CLASSES)
def test_size_two_is_stable_by_brute_force(pref_class):
    rng = random.Random(hash(pref_class) % 1000)
    for _ in range(60):
        k = rng.randint(1, 4)
        inst = generators.random_instance(2, k, pref_class, rng.randint(0, 2 * k), rng.randrange(10**9))
        out = solve_size_two(inst)
        validate_outcome(inst, out)
        for c in ("core", "exchange", "pareto"):
            assert brute.stable(inst, out, c), (c, inst, out)
        if pref_class == "strict":
            assert brute.stable(inst, out, "strong-exchange")


# -- dichotomous core -------------------------------------------------------------------

def test_dichotomous_everyone_approves_one():
    inst = _inst(2, ("r1", [[1], [0, 2]]), ("r2", [[1], [0, 2]]), ("b1", [[1], [0, 2]]), ("b2", [[1], [0, 2]]))
    out = solve_dichotomous_core(inst)
    assert all(v == 1 for v in brute.numerators(inst, out).values())


def test_dichotomous_rejects_three_classes(no_envy):
    with pytest.raises(ModelError):
        solve_dichotomous_core(no_envy)


def test_dichotomous_core_by_brute_force():
    rng = random.Random(41)
    for _ in range(150):
        s = rng.randint(1, 4)
        k = rng.randint(1, 8 // s)
        inst = generators.random_instance(s, k, "dichotomous", rng.randint(0, s * k), rng.randrange(10**9))
        out = solve_dichotomous_core(inst)
        validate_outcome(inst, out)
        assert next(brute.blocking_coalitions(inst, out), None) is None


# -- same-type local search -----------------------------------------------------------------

def test_local_search_no_swaps_when_stable():
    inst = _inst(2, ("r1", [[1], [2], [0]]), ("b1", [[1], [0], [2]]), ("r2", [[2], [1], [0]]), ("r3", [[2], [1], [0]]))
    start = Outcome((("b1", "r1"), ("r2", "r3")))
    log = SwapLog()
    out = local_search_same_type(inst, start, log=log)
    assert len(log) == 0 and _room_sets(out) == _room_sets(start)


def test_local_search_single_swap():
    inst = _inst(2, ("r1", [[2], [1], [0]]), ("r2", [[1], [2], [0]]), ("r3", [[2], [1], [0]]), ("b1", [[1], [0], [2]]))
    log = SwapLog()
    out = local_search_same_type(inst, Outcome((("b1", "r1"), ("r2", "r3"))), log=log)
    assert len(log) == 1 and set(log.swaps[0]) == {"r1", "r2"}
    assert _room_sets(out) == {frozenset({"b1", "r2"}), frozenset({"r1", "r3"})}


@pytest.mark.parametrize("strong", [False, True])
def test_local_search_by_brute_force(strong):
    rng = random.Random(42 + strong)
    concept = "strong-same-type-exchange" if strong else "same-type-exchange"
    for _ in range(100):
        s = rng.randint(1, 4)
        k = rng.randint(1, 8 // s)
        inst = generators.random_instance(s, k, rng.choice(generators.PREF_CLASSES), rng.randint(0, s * k),
                                          rng.randrange(10**9))
        start = id_order_outcome(inst)
        log = SwapLog()
        out = local_search_same_type(inst, start, strong, log)
        assert len(log) <= inst.n * s
        assert Counter(brute.numerators(inst, out)[a.id] for a in inst.agents if a.red) == \
            Counter(brute.numerators(inst, start)[a.id] for a in inst.agents if a.red)
        assert brute.stable(inst, out, concept)


# -- same-type envy, strict preferences ---------------------------------------------------------

def test_stef_single_mixed_room():
    inst = _inst(2, ("r1", [[1], [2], [0]]), ("b1", [[1], [0], [2]]))
    assert solve_same_type_envy_free(inst) == Outcome((("b1", "r1"),))


def test_stef_takes_first_working_guess():
    # both the pure split and the two mixed pairs are envy-free; {0, 2} is tried first
    inst = _inst(2, ("r1", [[1], [2], [0]]), ("r2", [[1], [0], [2]]), ("b1", [[1], [0], [2]]), ("b2", [[1], [2], [0]]))
    out = solve_same_type_envy_free(inst)
    assert _room_sets(out) == {frozenset({"r1", "r2"}), frozenset({"b1", "b2"})}
    assert brute.stable(inst, Outcome((("b1", "r1"), ("b2", "r2"))), "same-type-envy")


def test_stef_envy_fixture_has_none(no_envy):
    assert solve_same_type_envy_free(no_envy) is None
    assert not any(brute.stable(no_envy, o, "same-type-envy") for o in brute.all_partitions(["b1", "b2", "b3", "r1"], 2))


def test_stef_needs_strict():
    inst = _inst(2, ("r1", [[1, 2], [0]]), ("b1", [[1], [0], [2]]))
    with pytest.raises(ModelError):
        solve_same_type_envy_free(inst)


def test_stef_agrees_with_oracle():
    rng = random.Random(43)
    for _ in range(200):
        s = rng.randint(1, 4)
        k = rng.randint(1, 8 // s)
        inst = generators.random_instance(s, k, "strict", rng.randint(0, s * k), rng.randrange(10**9))
        out = solve_same_type_envy_free(inst)
        expected = oracle_exists(inst, "same-type-envy")
        assert (out is None) == (expected is None)
        if out is not None:
            assert brute.stable(inst, out, "same-type-envy")


# -- Pareto ------------------------------------------------------------------------------------

def test_pareto_by_brute_force():
    rng = random.Random(44)
    for _ in range(40):
        s = rng.randint(2, 3)
        k = rng.randint(1, 6 // s)
        inst = generators.random_instance(s, k, rng.choice(generators.PREF_CLASSES), rng.randint(0, s * k),
                                          rng.randrange(10**9))
        assert brute.pareto_optimal(inst, pareto_optimal_outcome(inst))


# -- dispatch -----------------------------------------------------------------------------------

def test_constructor_for(no_core, no_envy):
    assert constructor_for(no_envy, Concept.CORE) is solve_size_two
    assert constructor_for(no_envy, Concept.ENVY) is None
    assert constructor_for(no_envy, Concept.SAME_TYPE_ENVY) is solve_same_type_envy_free
    assert constructor_for(no_core, Concept.CORE) is None
    assert constructor_for(no_core, Concept.PARETO) is pareto_optimal_outcome
    assert constructor_for(no_core, Concept.SAME_TYPE_EXCHANGE) is not None
    with pytest.raises(ModelError):
        construct(no_core, Concept.CORE)

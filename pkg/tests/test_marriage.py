import random

import pytest

import brute
from roomdiv import generators, ilp, marriage
from roomdiv.marriage import (
    MarriageAgent,
    MarriageInstance,
    MarriageOutcome,
    RealizationError,
    encode_marriage,
    find_blocking_marriage,
    find_exchange_marriage,
    gale_ryser,
    marriage_witness,
    solve_marriage_existence,
)
from roomdiv.model import Color, InvalidOutcomeError, ModelError, Outcome, ParseError, WeakOrder
from roomdiv.oracle import enumerate_marriage_outcomes, marriage_oracle_exists
from roomdiv.verify import Concept

RED, BLUE = Color.RED, Color.BLUE


def _random(rng, s=None, k=None):
    s = s or rng.randint(2, 3)
    k = k or rng.randint(1, 3 if s == 3 else 4)
    return generators.random_marriage_instance(s, k, rng.choice(generators.PREF_CLASSES),
                                               rng.choice([0.2, 0.5, 0.8]), rng.randrange(10**9))


def test_fixture_outcomes_both_have_exchanges(marriage_no_exchange):
    outs = list(enumerate_marriage_outcomes(marriage_no_exchange))
    pairs = [find_exchange_marriage(marriage_no_exchange, o) for o in outs]
    assert [{w.a, w.b} for w in pairs] == [{"r2", "b2"}, {"r1", "b1"}]
    for o in outs:
        assert find_exchange_marriage(marriage_no_exchange, o, strong=True) is not None


def test_fixture_solve(marriage_no_exchange):
    assert solve_marriage_existence(marriage_no_exchange, Concept.EXCHANGE) is None
    assert solve_marriage_existence(marriage_no_exchange, Concept.STRONG_EXCHANGE) is None
    assert solve_marriage_existence(marriage_no_exchange, Concept.CORE) is not None


def test_one_agent_per_dimension():
    inst = generators.random_marriage_instance(3, 1, "strict", seed=5)
    for c in marriage.CONCEPTS:
        out = solve_marriage_existence(inst, c)
        assert out is not None and len(out.rooms) == 1


def test_single_colour_always_stable():
    rng = random.Random(51)
    for _ in range(20):
        inst = generators.random_marriage_instance(rng.randint(1, 3), rng.randint(1, 3), red_share=0.0,
                                                   seed=rng.randrange(10**9))
        for c in marriage.CONCEPTS:
            assert solve_marriage_existence(inst, c) is not None


def test_unsupported_concept(marriage_no_exchange):
    with pytest.raises(ValueError):
        encode_marriage(marriage_no_exchange, Concept.ENVY)


def test_result_type(marriage_no_exchange):
    out = solve_marriage_existence(marriage_no_exchange, Concept.CORE)
    assert isinstance(out, MarriageOutcome)


# -- checkers against definitions ----------------------------------------------------------

@pytest.mark.parametrize("concept", [c.value for c in marriage.CONCEPTS])
def test_checkers_match_brute_force(concept):
    rng = random.Random(52)
    for _ in range(60):
        inst = _random(rng)
        for o in list(enumerate_marriage_outcomes(inst))[:8]:
            got = marriage_witness(inst, o, concept)
            assert (got is None) == brute.marriage_stable(inst, o, concept)


def test_blocking_witness_is_one_per_dimension():
    rng = random.Random(53)
    found = 0
    for _ in range(80):
        inst = _random(rng)
        for o in enumerate_marriage_outcomes(inst):
            for strong in (False, True):
                w = find_blocking_marriage(inst, o, strong)
                if w is None:
                    continue
                found += 1
                assert sorted(inst.dim_of(a) for a in w.members) == list(range(1, inst.s + 1))
                coal = [a for a in inst.agents if a.id in w.members]
                j = sum(a.red for a in coal)
                assert j == w.numerator
                cur = brute.numerators(inst, o)
                if strong:
                    assert all(a.pref.weakly_prefers(j, cur[a.id]) for a in coal)
                    assert any(a.pref.prefers(j, cur[a.id]) for a in coal)
                else:
                    assert all(a.pref.prefers(j, cur[a.id]) for a in coal)
    assert found > 50


def test_outcome_must_respect_dimensions(marriage_no_exchange):
    with pytest.raises(InvalidOutcomeError):
        find_blocking_marriage(marriage_no_exchange, Outcome((("r1", "b1"), ("r2", "b2"))))
    with pytest.raises(InvalidOutcomeError):
        find_exchange_marriage(marriage_no_exchange, Outcome((("r1", "r2"),)))


# -- encoding --------------------------------------------------------------------------------

def _pinned(inst, outcome, concept):
    enc = encode_marriage(inst, concept)
    cur = brute.numerators(inst, outcome)
    for d, tp in enumerate(enc.dims):
        for types, table in ((tp.red_types, enc.r), (tp.blue_types, enc.b)):
            for i, t in enumerate(types):
                for (dd, ti, j), v in table.items():
                    if dd == d and ti == i:
                        enc.system.add_eq([(v, 1)], -sum(cur[a] == j for a in t.members))
    return ilp.solve(enc.system) is not None


def test_pinned_encoding_matches_checker():
    # every marriage notion here depends on the per-dimension counts only
    rng = random.Random(54)
    for _ in range(40):
        inst = _random(rng)
        for o in list(enumerate_marriage_outcomes(inst))[:6]:
            for c in marriage.CONCEPTS:
                assert _pinned(inst, o, c) == (marriage_witness(inst, o, c) is None), (inst, o, c)


def test_solver_matches_oracle():
    rng = random.Random(55)
    for _ in range(60):
        inst = _random(rng)
        for c in marriage.CONCEPTS:
            got = solve_marriage_existence(inst, c)
            assert (got is None) == (marriage_oracle_exists(inst, c) is None)
            if got is not None:
                assert brute.marriage_stable(inst, got, c.value)


# -- realisation ----------------------------------------------------------------------------

def test_gale_ryser_small():
    assert gale_ryser([1, 0], [0, 1]) == [[0, 1], [0, 0]]
    assert gale_ryser([2, 1], [1, 1, 1]) == [[1, 1, 0], [0, 0, 1]]
    assert gale_ryser([], []) == []


@pytest.mark.parametrize("rows,cols", [([2], [1]), ([2], [2]), ([2, 0], [2, 0]), ([2, 2], [3, 1])])
def test_gale_ryser_infeasible(rows, cols):
    with pytest.raises(RealizationError):
        gale_ryser(rows, cols)


def test_gale_ryser_random():
    rng = random.Random(56)
    for _ in range(300):
        width = rng.randint(1, 5)
        m = [[rng.randint(0, 1) for _ in range(width)] for _ in range(rng.randint(1, 4))]
        rows = [sum(r) for r in m]
        cols = [sum(c) for c in zip(*m)]
        got = gale_ryser(rows, cols)
        assert [sum(r) for r in got] == rows and [sum(c) for c in zip(*got)] == cols


def test_extreme_classes_realize():
    agents = [MarriageAgent(f"r{d}", RED, d, WeakOrder.strict([2, 1, 0])) for d in (1, 2)]
    agents += [MarriageAgent(f"b{d}", BLUE, d, WeakOrder.strict([0, 1, 2])) for d in (1, 2)]
    inst = MarriageInstance(2, tuple(agents))
    out = solve_marriage_existence(inst, Concept.CORE)
    assert {frozenset(r) for r in out.rooms} == {frozenset({"r1", "r2"}), frozenset({"b1", "b2"})}


# -- model and serialization ------------------------------------------------------------------

def test_dimension_sizes_checked():
    agents = [MarriageAgent("a", RED, 1, WeakOrder.strict([0, 1, 2])), MarriageAgent("b", RED, 1, WeakOrder.strict([0, 1, 2]))]
    with pytest.raises(ModelError):
        MarriageInstance(2, tuple(agents))
    with pytest.raises(ModelError):
        MarriageInstance(2, (MarriageAgent("a", RED, 3, WeakOrder.strict([0, 1, 2])),
                             MarriageAgent("b", RED, 1, WeakOrder.strict([0, 1, 2]))))


def test_json_round_trip(marriage_no_exchange):
    text = marriage.serialize_marriage_instance(marriage_no_exchange)
    assert marriage.parse_marriage_instance(text) == marriage_no_exchange
    assert marriage.serialize_marriage_instance(marriage.parse_marriage_instance(text)) == text


def test_parse_errors():
    with pytest.raises(ParseError):
        marriage.parse_marriage_instance('{"kind": "roommate", "s": 2, "agents": []}')
    with pytest.raises(ParseError):
        marriage.parse_marriage_instance('{"kind": "marriage", "s": 2, "agents": [{"id": "a", "color": "red", '
                                         '"pref": [[0, 1, 2]]}]}')
    with pytest.raises(ParseError):
        marriage.parse_marriage_instance('{"kind": "marriage", "s": 2, "agents": [{"id": "a", "color": "red", '
                                         '"dim": 1, "pref": [[0, 1, 2]]}]}')

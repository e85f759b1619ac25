import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import e_exponent_oracle, minor_valuation_profile, span_size

from zpzp.coinvariants import (
    REPORT_HEADER,
    ElementarySpec,
    GrowthSpec,
    ModulePresentation,
    bounds_report,
    cokernel_exponent,
    default_precision,
    e_exponent,
    elementary_e,
    elementary_presentation,
    finite_part_growth,
    fixture_names,
    level_relation_matrix,
    load_growth_spec,
    load_presentation,
    smith_exponents,
)
from zpzp.errors import ParameterError, TruncationError
from zpzp.skew import SkewElement, TruncationBox, group_word, mul

BOX3 = TruncationBox(3, 4, 9, 9)


def pres(box, relations, g=1):
    return ModulePresentation.from_terms(box, g, relations)


# -- types -----------------------------------------------------------------------


def test_elementary_spec():
    assert ElementarySpec((1, 2)).mu_G == 3
    for bad in [(), (0,), (1, -2)]:
        with pytest.raises(ParameterError):
            ElementarySpec(bad)


def test_presentation_validation():
    with pytest.raises(ParameterError):
        ModulePresentation(BOX3, 0, ())
    with pytest.raises(ParameterError):
        pres(BOX3, [[{(0, 0): 3}]], g=2)
    other = SkewElement.one(TruncationBox(3, 4, 5, 5))
    with pytest.raises(ParameterError):
        ModulePresentation(BOX3, 1, ((other,),))


def test_json_round_trip():
    X = load_presentation("elementary_plus_pt_p3")
    again = ModulePresentation.from_json(X.to_json())
    assert again.box == X.box and again.generators == 2
    assert all(a == b for ra, rb in zip(X.relations, again.relations) for a, b in zip(ra, rb))


@pytest.mark.parametrize(
    "text",
    ["{", "[]", '{"p": 3}', '{"p":3,"N":2,"q_u":1,"D_S":4,"D_T":4,"generators":1,"relations":[[{"t":9,"s":0,"c":1}]]}',
     '{"p":3,"N":2,"q_u":1,"D_S":4,"D_T":4,"generators":1,"relations":[[{"t":0,"s":0,"c":1,"g":3}]]}',
     '{"p":4,"N":2,"q_u":1,"D_S":4,"D_T":4,"generators":1,"relations":[]}'],
)
def test_malformed_json(text):
    with pytest.raises(ParameterError):
        ModulePresentation.from_json(text)


def test_shipped_fixtures_parse():
    names = fixture_names()
    assert {"elementary_p3_m1", "pt_p3", "trivial_z3", "elementary_plus_pt_p3"} <= set(names)
    for name in names:
        load_presentation(name)
    with pytest.raises(ParameterError):
        load_presentation("nope")


# -- level matrices ---------------------------------------------------------------


def test_level_matrix_examples():
    X = pres(BOX3, [[{(0, 0): 3}]])
    M0 = level_relation_matrix(X, 0)
    assert M0.tolist() == [[3]]
    assert cokernel_exponent(level_relation_matrix(X, 1), 3, 4) == (9, True)
    free = ModulePresentation(BOX3, 1, ())
    M = level_relation_matrix(free, 0)
    assert M.shape == (0, 1)
    assert cokernel_exponent(M, 3, 4) == (4, False)
    assert e_exponent(free, 0) == (4, False)


def test_level_matrix_box_check():
    X = pres(TruncationBox(3, 4, 9, 3), [[{(0, 0): 3}]])
    with pytest.raises(TruncationError):
        level_relation_matrix(X, 2)
    with pytest.raises(ParameterError):
        level_relation_matrix(X, -1)


# -- Smith form -----------------------------------------------------------------------


def test_smith_examples():
    assert smith_exponents(np.eye(2, dtype=np.int64), 3, 4) == ([0, 0], True)
    assert smith_exponents(np.array([[3, 0], [0, 9]]), 3, 4) == ([1, 2], True)
    assert smith_exponents(np.array([[3, 0], [0, 0]]), 3, 4) == ([1, 4], False)
    assert smith_exponents(np.zeros((0, 3), dtype=np.int64), 3, 2) == ([2, 2, 2], False)


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(0, 8), min_size=2, max_size=2), min_size=1, max_size=3))
def test_smith_against_brute_force_span(rows):
    p, N = 3, 2
    vals, _ = smith_exponents(np.array(rows), p, N)
    cokernel = sum(vals)
    assert p ** (2 * N) // span_size(rows, p**N) == p**cokernel


def test_smith_against_determinantal_divisors():
    """Random 4x4 over Z/3^5: cumulative valuations equal minimal minor valuations."""
    p, N = 3, 5
    rng = np.random.default_rng(11)
    for _ in range(25):
        M = rng.integers(0, p**N, size=(4, 4)) * rng.choice([1, 3, 9, 27], size=(4, 4)) % p**N
        vals, _ = smith_exponents(M, p, N)
        profile = minor_valuation_profile(M.tolist(), p)
        # Over Z_p the k-th cumulative sum of Smith valuations is the minimal k-minor valuation.
        oracle = [profile[0]] + [b - a for a, b in zip(profile, profile[1:])]
        oracle += [N] * (4 - len(oracle))
        assert vals == [min(v, N) for v in sorted(oracle)]


# -- e_exponent ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "name,n,expected",
    [("elementary_p3_m1", 0, 1), ("elementary_p3_m1", 1, 9), ("elementary_p3_m2", 1, 18), ("elementary_p5_m1", 1, 25)],
)
def test_e_exponent_examples(name, n, expected):
    assert e_exponent(load_presentation(name), n) == (expected, True)


ORACLE_CASES = [
    (3, 1, [[{(0, 0): 3}]], 1),
    (3, 1, [[{(0, 0): 3}], [{(1, 0): 1}]], 1),
    (3, 2, [[{(0, 0): 9, (1, 1): 3}], [{(0, 1): 3, (2, 0): 1}]], 1),
    (3, 1, [[{(0, 0): 3, (0, 2): 1}], [{(1, 0): 1, (0, 1): 2}]], 1),
    (5, 1, [[{(0, 0): 5}], [{(1, 1): 1, (0, 0): 5}]], 1),
    (3, 2, [[{(0, 0): 3}, {(1, 0): 1}], [{}, {(0, 0): 9}]], 2),
    (3, 1, [[{(0, 0): 1, (0, 1): 1}]], 1),
]


@pytest.mark.parametrize("p,u,relations,g", ORACLE_CASES)
@pytest.mark.parametrize("n", [0, 1])
def test_e_exponent_against_group_ring_oracle(p, u, relations, g, n):
    box = TruncationBox(p, 4, 9 if p == 3 else 5, 9 if p == 3 else 5, u)
    X = pres(box, relations, g)
    e, stable = e_exponent(X, n)
    N = max(4, default_precision(n))
    assert e == e_exponent_oracle(relations, g, p, u, n, N)
    if stable:
        assert e == e_exponent_oracle(relations, g, p, u, n, N + 2)


@pytest.mark.parametrize("exps", [(1,), (2,), (1, 2), (1, 1, 1)])
@pytest.mark.parametrize("n", [0, 1])
def test_elementary_modules_match_closed_form(exps, n):
    spec = ElementarySpec(exps)
    X = elementary_presentation(TruncationBox(3, default_precision(n, max(exps)), 9, 9), spec)
    assert e_exponent(X, n) == (elementary_e(spec, 3, n), True)


def test_elementary_e_examples():
    assert elementary_e(ElementarySpec((1,)), 3, 2) == 81
    assert elementary_e(ElementarySpec((1, 2)), 3, 1) == 27


def test_invariance_under_relation_order_and_units():
    X = pres(BOX3, [[{(0, 0): 3, (1, 1): 1}], [{(2, 0): 1, (0, 1): 3}]])
    Y = ModulePresentation(BOX3, 1, tuple(reversed(X.relations)))
    unit = group_word(BOX3, 2, 1) + SkewElement.constant(BOX3, 3)  # gamma^2 h + 3, a unit
    Z = ModulePresentation(BOX3, 1, ((mul(unit, X.relations[0][0]),), X.relations[1]))
    values = {e_exponent(M, n) for M in (X, Y, Z) for n in (1,)}
    assert len(values) == 1


def test_direct_sum_adds_exponents():
    names = ["elementary_p3_m1", "trivial_z3", "pt_p3", "elementary_p3_m2"]
    for a in names:
        for b in names:
            X, Y = load_presentation(a), load_presentation(b)
            for n in (0, 1):
                ex, sx = e_exponent(X, n)
                ey, sy = e_exponent(Y, n)
                exy, sxy = e_exponent(X.direct_sum(Y), n)
                assert sxy == (sx and sy)
                assert exy == ex + ey


def test_precision_stability_rerun():
    X = load_presentation("elementary_p3_m2")
    for n in (0, 1):
        e, stable = e_exponent(X, n, 4)
        assert stable and e_exponent(X, n, 6) == (e, True)
    # Lambda/27 at precision 3: every column reaches the ceiling.
    assert e_exponent(pres(BOX3, [[{(0, 0): 27}]]), 0, 3)[1] is False


# -- growth -------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "name,exponents,fit",
    [("pt_p3", [1, 3, 9], (1, 0)), ("trivial_z3", [1, 1, 1], (0, 1)), ("zero_p3", [0, 0, 0], (0, 0))],
)
def test_finite_part_growth(name, exponents, fit):
    res = finite_part_growth(load_presentation(name), 2)
    assert res.exponents == exponents
    assert (res.mu_A, res.nu_A) == fit
    assert res.consistent and res.finite and res.m0 == 0


def test_finite_part_growth_flags_infinite_quotient():
    # Lambda/3 has A_{H_m} = F_3[[T]]^(p^m), which is infinite.
    res = finite_part_growth(load_presentation("elementary_p3_m1"), 1)
    assert not res.finite and not res.consistent
    with pytest.raises(ParameterError):
        finite_part_growth(load_presentation("pt_p3"), 0)


@pytest.mark.parametrize(
    "name,rows",
    [
        ("elementary_p3_m1", [(0, 1, 1, 1), (1, 9, 9, 9)]),
        ("elementary_plus_trivial_p3", [(0, 2, 1, 2), (1, 10, 9, 10)]),
        ("elementary_plus_pt_p3", [(0, 2, 1, 2), (1, 12, 9, 12)]),
    ],
)
def test_bounds_reports(name, rows):
    report = load_growth_spec(name).report(1)
    assert list(zip(report.levels, report.e, report.predicted_lower, report.predicted_upper)) == rows
    assert report.all_pass and report.all_stable
    assert all(report.verdict)


def test_report_formats():
    report = load_growth_spec("elementary_plus_trivial_p3").report(1)
    assert report.to_csv() == "n,e_n,lower,upper,stable,pass\n0,2,1,2,true,true\n1,10,9,10,true,true\n"
    recs = json.loads(report.to_json())
    assert list(recs[0]) == REPORT_HEADER and recs[1]["e_n"] == 10


def test_verdict_follows_bounds():
    X = load_presentation("elementary_plus_trivial_p3")
    report = bounds_report(X, ElementarySpec((1,)), 0, 0, 0, 1)
    assert report.verdict == [False, False] and not report.all_pass


def test_growth_spec_requires_declared_data():
    data = json.loads(load_presentation("pt_p3").to_json())
    with pytest.raises(ParameterError):
        GrowthSpec.from_dict(data)

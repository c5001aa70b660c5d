"""Acceptance criteria 1-7, one marked group per criterion.

The terminal summary prints a PASS/FAIL line per criterion. Criteria 6 and 7
rerun the property suites from the module test files, each with the default
hypothesis profile of 200 examples.
"""

import itertools
import time

import pytest
import test_equiv
import test_fullgroup
import test_sft
import test_transducer
from test_invariants import cofactor_det, determinantal_divisors

from markovcoe.cli import data_dir, main, read_golden, run_examples
from markovcoe.equiv import Bounds, classify
from markovcoe.generators import NAMED_MATRICES, named
from markovcoe.invariants import (
    char_poly,
    det_id_minus,
    dimension_group,
    dimension_groups_isomorphic,
    elementary_sse_search,
    id_minus,
    k_groups,
    matmul,
    transpose,
)

E, R, U = "established", "refuted", "unknown"


def criterion(n, title):
    return pytest.mark.criterion(n, title)


# -- 1 ---------------------------------------------------------------------------------------


@criterion(1, "det(I - A) table")
@pytest.mark.parametrize("name, value", [("A2", -1), ("F2", -1), ("A4", -3), ("B3", -2), ("C3", -2)])
def test_det_table(name, value):
    A = named(name)
    assert det_id_minus(A) == value
    assert cofactor_det(id_minus(A)) == value


@criterion(1, "det(I - A) table")
def test_a2_and_f2_share_det():
    assert det_id_minus(named("A2")) == det_id_minus(named("F2"))


# -- 2 ---------------------------------------------------------------------------------------


def _divisors(name):
    return [d for d in determinantal_divisors(id_minus(transpose(named(name).tolist()))) if d != 1]


@criterion(2, "K-theory table")
def test_k0_of_a2_is_trivial():
    K0, k1 = k_groups(named("A2"))
    assert K0.is_trivial and k1 == 0 and _divisors("A2") == []


@criterion(2, "K-theory table")
@pytest.mark.parametrize("name, order, unit_zero", [("A4", 3, False), ("B3", 2, False), ("C3", 2, True)])
def test_k0_cyclic_with_unit(name, order, unit_zero):
    K0, k1 = k_groups(named(name))
    assert K0.invariant_factors == (order,) and K0.free_rank == 0 and k1 == 0
    assert _divisors(name) == [order]
    assert (K0.unit_class == (0,)) == unit_zero


@criterion(2, "K-theory table")
def test_k_theory_refutes_coe():
    assert classify(named("A2"), named("A4")).state("COE") == R
    assert classify(named("B3"), named("C3")).state("COE") == R


# -- 3 ---------------------------------------------------------------------------------------


@criterion(3, "dimension groups")
@pytest.mark.parametrize("name, lam, unit", [("B2", 2, 3), ("A2", 2, 2), ("A4", 4, 4)])
def test_dimension_group_units(name, lam, unit):
    g = dimension_group(named(name))
    assert g.supported and g.lam == lam and g.unit_value == unit


@criterion(3, "dimension groups")
def test_dimension_group_comparisons():
    d = {k: dimension_group(named(k)) for k in ("A2", "B2", "A4")}
    assert dimension_groups_isomorphic(d["A2"], d["A4"]) is True
    assert dimension_groups_isomorphic(d["A2"], d["B2"]) is False
    assert classify(named("A2"), named("A4")).state("UOE") == E
    assert classify(named("A2"), named("B2")).state("UOE") == R


# -- 4 ---------------------------------------------------------------------------------------


@criterion(4, "two-sided conjugacy")
def test_sse_for_b3_and_c3():
    A, B = named("B3"), named("C3")
    start = time.perf_counter()
    found = elementary_sse_search(A, B, 4)
    assert time.perf_counter() - start <= 60
    assert found is not None
    R_, S = found
    assert matmul(R_, S) == A.tolist() and matmul(S, R_) == B.tolist()
    assert all(x in (0, 1) for row in R_ + S for x in row)
    assert len(S) <= 4


@criterion(4, "two-sided conjugacy")
def test_charpoly_refutes_a2_f2():
    assert char_poly(named("A2")) == (1, -2, 0)
    assert char_poly(named("F2")) == (1, -1, -1)
    assert classify(named("A2"), named("F2")).state("TSC") == R


# -- 5 ---------------------------------------------------------------------------------------


@criterion(5, "diagram suite")
def test_golden_table_covers_all_pairs():
    rows = read_golden(data_dir() / "relations.golden")
    pairs = [head for head, _ in rows if head[0] != "cert"]
    assert len(pairs) == 15 and len(rows) == 16
    assert {frozenset(p) for p in pairs} == {frozenset(p) for p in itertools.combinations(NAMED_MATRICES, 2)}


@criterion(5, "diagram suite")
def test_examples_match_golden_table():
    results = run_examples(data_dir(), Bounds())
    assert len(results) == 16
    assert not [r for r in results if r["mismatches"]]


@criterion(5, "diagram suite")
def test_examples_command_exit_code(capsys):
    assert main(["examples"]) == 0
    assert capsys.readouterr().out.strip().endswith("16/16 rows match")


@criterion(5, "diagram suite")
def test_a2_b2_scoe_unknown_without_certificate():
    report = classify(named("A2"), named("B2"))
    assert report.state("SCOE") == U and report.state("COE") == E


# -- 6 ---------------------------------------------------------------------------------------

PROPERTY_SUITES = [
    test_fullgroup.test_group_laws,
    test_fullgroup.test_cocycle_composition_identity,
    test_fullgroup.test_af_subgroup_is_closed,
    test_sft.test_cocycle_additivity,
    test_transducer.test_run_commutes_with_compose,
    test_transducer.test_outputs_equal_is_an_equivalence,
    test_equiv.test_lemma_identity_on_generated_certificates,
    test_transducer.test_cocycle_is_positive_on_periodic_orbits,
    test_equiv.test_eventual_conjugacy_implies_ucoe_and_trivial_cocycles,
]


@criterion(6, "property suites")
@pytest.mark.parametrize("prop", PROPERTY_SUITES, ids=lambda f: f.__name__)
def test_property_suite(prop):
    assert prop.hypothesis.inner_test is not None
    prop()


# -- 7 ---------------------------------------------------------------------------------------


@criterion(7, "psi_h of one")
def test_psi_of_one_is_the_cocycle():
    test_transducer.test_psi_of_one_is_the_cocycle()

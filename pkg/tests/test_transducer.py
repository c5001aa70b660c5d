import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import certificates, points, small_matrices, tableaux

from markovcoe.fullgroup import apply
from markovcoe.generators import (
    a2_to_f2,
    a4_to_a2,
    b2_to_a2,
    higher_block_certificate,
    named,
    non_af_certificate,
    swap_certificate,
)
from markovcoe.sft import LCFunction, Point, iter_points, orbit_sum, periodic_orbits
from markovcoe.transducer import (
    CoeData,
    HomeoCertificate,
    Transducer,
    TransducerError,
    check_coe_data,
    compose,
    extract_coe_data,
    format_transducer,
    identity,
    identity_certificate,
    output_difference,
    outputs_equal,
    parse_transducer,
    psi_h,
    run,
    tableau_transducer,
    verify_homeomorphism,
)


def probe_points(A):
    return list(iter_points(A, 3, 3))


def brute_equal(T1, T2, d1, d2):
    return all(run(T1, x).shift(d1) == run(T2, x).shift(d2) for x in probe_points(T1.source))


# -- construction ------------------------------------------------------------------------


def test_missing_transition_is_rejected():
    A = named("A2")
    with pytest.raises(TransducerError, match="no transition"):
        Transducer(A, A, {(0, 1): (0, (1,))})


def test_never_taken_transition_is_rejected():
    F = named("F2")
    # after symbol 2 only 1 may follow, so state 1 never reads 2
    trans = {(0, 1): (0, (1,)), (0, 2): (1, (2,)), (1, 1): (0, (1,)), (1, 2): (0, (2,))}
    with pytest.raises(TransducerError, match="never be taken"):
        Transducer(F, F, trans)


def test_inadmissible_output_is_rejected():
    A, F = named("A2"), named("F2")
    with pytest.raises(TransducerError, match="inadmissible"):
        Transducer(A, F, {(0, 1): (0, (2,)), (0, 2): (0, (2,))})


def test_silent_cycle_is_rejected():
    A = named("A2")
    with pytest.raises(TransducerError, match="silent cycle"):
        Transducer(A, A, {(0, 1): (0, ()), (0, 2): (0, (2,))})


# -- running -----------------------------------------------------------------------------------


@given(small_matrices(), st.data())
def test_tableau_transducer_agrees_with_tableau(A, data):
    tau = data.draw(tableaux(A))
    T = tableau_transducer(tau)
    for _ in range(5):
        x = data.draw(points(A))
        assert run(T, x) == apply(tau, x)


@given(certificates(), st.data())
def test_run_commutes_with_compose(c, data):
    T1, T2 = c.forward, c.backward
    for _ in range(5):
        x = data.draw(points(c.source))
        assert run(compose(T2, T1), x) == run(T2, run(T1, x))
        assert run(T2, run(T1, x)) == x


def test_substitution_runs():
    c = a2_to_f2()
    assert run(c.forward, Point((2, 1), (2,))) == Point((2, 1, 1), (2, 1))


# -- exact comparison -----------------------------------------------------------------------------


@given(certificates(), certificates(), st.integers(0, 2), st.integers(0, 2))
def test_outputs_equal_agrees_with_brute_force(c1, c2, d1, d2):
    if c1.source != c2.source:
        c2 = identity_certificate(c1.source)
    T1, T2 = c1.forward, c2.forward
    witness = output_difference(T1, T2, d1, d2)
    if witness is None:
        assert brute_equal(T1, T2, d1, d2)
    else:
        assert run(T1, witness).shift(d1) != run(T2, witness).shift(d2)


@given(certificates(), certificates())
def test_outputs_equal_is_an_equivalence(c, other):
    T = c.forward
    same = compose(c.backward, compose(c.forward, T))
    also_same = compose(identity(T.target), T)
    assert outputs_equal(T, T)
    assert outputs_equal(T, same) and outputs_equal(same, T)
    assert outputs_equal(same, also_same)
    if other.source == c.source:
        U = other.forward
        assert outputs_equal(T, U) == outputs_equal(U, T)
        if outputs_equal(T, U):
            assert outputs_equal(same, U)


def test_drop_semantics():
    A = named("A2")
    I = identity(A)
    assert outputs_equal(I, I, 1, 1)
    assert not outputs_equal(I, I, 1, 0)
    assert output_difference(I, swap_certificate(A).forward) == Point((), (1,))


# -- certificates ----------------------------------------------------------------------------------


@given(certificates())
def test_generated_certificates_verify(c):
    assert verify_homeomorphism(c)


@pytest.mark.parametrize("make", [a2_to_f2, b2_to_a2, a4_to_a2, lambda: higher_block_certificate(named("F2"))])
def test_named_certificates_verify(make):
    assert verify_homeomorphism(make())


def test_corrupted_backward_machine_is_caught():
    A = named("A2")
    bad = HomeoCertificate(identity(A), swap_certificate(A).forward)
    check = verify_homeomorphism(bad)
    assert not check and check.witness == Point((), (1,)) and check.space == "A"


def test_transducer_file_round_trip():
    c = b2_to_a2()
    mats = {"A": c.source, "B": c.target}
    T = parse_transducer(format_transducer(c.forward), mats.__getitem__)
    assert T.transitions == c.forward.transitions


# -- orbit equivalence data ----------------------------------------------------------------------------


def _orbit_equations_hold(c, data, pts_a, pts_b):
    for T, k, l, pts in ((c.forward, data.k1, data.l1, pts_a), (c.backward, data.k2, data.l2, pts_b)):
        for x in pts:
            if run(T, x.shift(1)).shift(k(x)) != run(T, x).shift(l(x)):
                return False
    return True


def test_a2_to_f2_time_changes():
    c = a2_to_f2()
    data = extract_coe_data(c)
    A2, F2 = c.source, c.target
    # x = a y: h(x) = image(a) h(y), so k1 = 0 and l1 = |image(a)|
    assert data.k1 == LCFunction.const(A2, 0)
    assert data.l1 == LCFunction.from_table(A2, 1, {(1,): 1, (2,): 2})
    assert data.c1 == LCFunction.from_table(A2, 1, {(1,): 1, (2,): 2})
    # y = 1 z decodes one symbol; y = 2 1 z needs one extra shift on the preimage side
    assert data.k2 == LCFunction.from_table(F2, 1, {(1,): 0, (2,): 1})
    assert data.l2 == LCFunction.const(F2, 1)
    assert check_coe_data(c, data)


def test_non_orbit_equivalence_is_inconclusive():
    assert extract_coe_data(a4_to_a2()) is None


def test_wrong_data_is_rejected():
    c = a2_to_f2()
    good = extract_coe_data(c)
    bad = CoeData(good.k1, good.l1 + 1, good.k2, good.l2)
    assert not check_coe_data(c, bad)


@given(certificates(), st.data())
def test_extracted_data_satisfies_orbit_equations(c, data):
    d = extract_coe_data(c)
    assert d is not None and check_coe_data(c, d)
    pts_a = [data.draw(points(c.source)) for _ in range(5)]
    pts_b = [data.draw(points(c.target)) for _ in range(5)]
    assert _orbit_equations_hold(c, d, pts_a, pts_b)


@given(certificates())
def test_cocycle_is_positive_on_periodic_orbits(c):
    d = extract_coe_data(c)
    for cycle in periodic_orbits(c.source, 6):
        assert orbit_sum(d.c1, cycle) > 0
    for cycle in periodic_orbits(c.target, 6):
        assert orbit_sum(d.c2, cycle) > 0


@given(certificates())
def test_psi_of_one_is_the_cocycle(c):
    d = extract_coe_data(c)
    assert psi_h(c, d, LCFunction.const(c.target, 1)) == d.c1


def test_non_af_lift_has_nonconstant_cocycle():
    c = non_af_certificate(named("A2"))
    d = extract_coe_data(c)
    assert d.c1.constant_value is None

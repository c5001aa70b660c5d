import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import functions, matrices, points, small_matrices

from markovcoe.generators import named
from markovcoe.sft import (
    IsPermutation,
    LCFunction,
    MatrixError,
    NotIrreducible,
    Point,
    ZeroRowOrColumn,
    admissible_words,
    cocycle_sum,
    compose_with_shift,
    format_function,
    format_matrix,
    format_word,
    is_coboundary_equivalent,
    iter_points,
    orbit_sum,
    parse_function,
    parse_matrix,
    parse_word,
    periodic_orbits,
    point_through,
    validate_matrix,
)


def brute_words(A, length):
    return [w for w in itertools.product(A.symbols, repeat=length) if all(A(a, b) for a, b in zip(w, w[1:]))]


def trace_power(A, n):
    M = [list(r) for r in A.tolist()]
    P = [[int(i == j) for j in range(A.n)] for i in range(A.n)]
    for _ in range(n):
        P = [[sum(P[i][k] * M[k][j] for k in range(A.n)) for j in range(A.n)] for i in range(A.n)]
    return sum(P[i][i] for i in range(A.n))


# -- matrices ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "rows, error",
    [
        ([[1, 0], [1, 0]], ZeroRowOrColumn),
        ([[0, 0], [1, 1]], ZeroRowOrColumn),
        ([[0, 1], [1, 0]], IsPermutation),
        ([[1, 1], [0, 1]], NotIrreducible),
        ([[1, 2], [1, 1]], MatrixError),
        ([[1, 1, 1], [1, 1]], MatrixError),
    ],
)
def test_validation_names_the_violation(rows, error):
    with pytest.raises(error):
        validate_matrix(rows)


def test_zero_column_reported_before_permutation_or_reducibility():
    with pytest.raises(ZeroRowOrColumn):
        validate_matrix([[1, 0, 0], [1, 0, 0], [1, 0, 0]])


def test_named_matrices_are_valid():
    sizes = {"A2": 2, "F2": 2, "B2": 3, "B3": 3, "C3": 3, "A4": 4}
    for name, n in sizes.items():
        assert named(name).n == n


@given(matrices())
def test_matrix_text_round_trip(A):
    assert parse_matrix(format_matrix(A)) == A


def test_parse_matrix_rejects_garbage():
    with pytest.raises(MatrixError):
        parse_matrix("2\n11\n1\n")
    with pytest.raises(MatrixError):
        parse_matrix("two\n11\n11\n")


# -- words and orbits ------------------------------------------------------------------


@given(matrices(), st.integers(0, 4))
def test_admissible_words_match_brute_force(A, length):
    assert admissible_words(A, length) == brute_words(A, length)


@given(matrices(), st.integers(1, 6))
def test_periodic_orbit_counts_match_traces(A, n):
    orbits = periodic_orbits(A, n)
    assert sum(len(c) for c in orbits if n % len(c) == 0) == trace_power(A, n)


def test_periodic_orbits_of_golden_mean_shift():
    assert periodic_orbits(named("F2"), 4) == [(1,), (1, 2), (1, 1, 2), (1, 1, 1, 2)]


@given(st.integers(1, 20), st.integers(1, 20))
def test_word_format_round_trip(n, length):
    word = tuple((i % n) + 1 for i in range(length))
    assert parse_word(format_word(word, n), n) == word
    assert format_word((), n) == "-"


# -- points ------------------------------------------------------------------------------


def test_point_canonical_form():
    assert Point((1, 2), (1, 2)) == Point((), (1, 2))
    assert Point((), (1, 1, 1)) == Point((), (1,))
    assert Point((2, 1), (2, 1)).prefix == ()
    assert str(Point((2,), (1,))) == "2(1)^inf"


@given(small_matrices(), st.data())
def test_point_shift_and_expand_agree(A, data):
    p = data.draw(points(A))
    k = data.draw(st.integers(0, 8))
    assert p.shift(k).expand(6) == p.expand(k + 6)[k:]
    assert p.shift(k).prepend(p.expand(k)) == p


def test_point_through_starts_with_word():
    A = named("F2")
    for w in admissible_words(A, 3):
        p = point_through(A, w)
        assert p.expand(3) == w
        assert A.is_admissible(p.prefix + p.cycle + p.cycle)


def test_iter_points_are_distinct_and_admissible():
    A = named("B2")
    pts = list(iter_points(A, 2, 3))
    assert len(pts) == len(set(pts))
    assert all(A.is_admissible(p.prefix + p.cycle + p.cycle) for p in pts)


# -- locally constant functions ------------------------------------------------------------


@given(small_matrices(), st.data())
def test_cocycle_additivity(A, data):
    f = data.draw(functions(A))
    x = data.draw(points(A))
    j, k = data.draw(st.integers(0, 8)), data.draw(st.integers(0, 8))
    assert cocycle_sum(f, j + k, x) == cocycle_sum(f, j, x) + cocycle_sum(f, k, x.shift(j))


@given(small_matrices(), st.data())
def test_cocycle_sum_matches_pointwise_sum(A, data):
    f = data.draw(functions(A))
    x = data.draw(points(A))
    k = data.draw(st.integers(0, 10))
    assert cocycle_sum(f, k, x) == sum(f(x.shift(i)) for i in range(k))


@given(small_matrices(), st.data())
def test_refinement_preserves_values_and_equality(A, data):
    f = data.draw(functions(A))
    g = f.refine(f.depth + 2)
    assert g == f and hash(g) == hash(f)
    for _ in range(5):
        x = data.draw(points(A))
        assert g(x) == f(x)


@given(small_matrices(), st.data())
def test_function_arithmetic_is_pointwise(A, data):
    f, g = data.draw(functions(A)), data.draw(functions(A))
    x = data.draw(points(A))
    assert (f + g)(x) == f(x) + g(x)
    assert (f - g)(x) == f(x) - g(x)
    assert (f * 3)(x) == 3 * f(x)
    assert (-f)(x) == -f(x)


@given(small_matrices(), st.data())
def test_compose_with_shift(A, data):
    f = data.draw(functions(A))
    x = data.draw(points(A))
    assert compose_with_shift(f)(x) == f(x.shift(1))


@given(small_matrices(), st.data())
def test_function_text_round_trip(A, data):
    f = data.draw(functions(A))
    assert parse_function(A, format_function(f)) == f


def test_simplify_collapses_constant_tables():
    A = named("A2")
    f = LCFunction.from_table(A, 2, {w: 4 for w in admissible_words(A, 2)})
    assert f.simplify().depth == 0 and f.constant_value == 4


# -- coboundaries ---------------------------------------------------------------------------


@given(small_matrices(), st.data())
def test_coboundaries_are_recognised(A, data):
    f = data.draw(functions(A))
    w = data.draw(functions(A))
    g = f + w - compose_with_shift(w)
    r = is_coboundary_equivalent(g, f)
    assert r.status == "yes"
    assert g - f == r.witness - compose_with_shift(r.witness)
    assert min(r.witness.table.values()) == 0 if r.witness.depth else r.witness.constant == 0


@given(small_matrices(), st.data())
def test_orbit_obstruction_is_sound(A, data):
    f, g = data.draw(functions(A)), data.draw(functions(A))
    r = is_coboundary_equivalent(f, g, max_depth=4)
    if r.status == "no":
        assert orbit_sum(f, r.orbit) != orbit_sum(g, r.orbit)
    if r.status == "yes":
        assert f - g == r.witness - compose_with_shift(r.witness)


def test_constant_two_is_not_cohomologous_to_one():
    A = named("A2")
    r = is_coboundary_equivalent(LCFunction.const(A, 2), LCFunction.const(A, 1))
    assert r.status == "no" and r.orbit == (1,)

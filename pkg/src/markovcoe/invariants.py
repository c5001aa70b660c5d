"""Exact algebraic invariants of 0/1 matrices.

Determinants, Smith forms, ranks and characteristic polynomials come from
sympy's exact integer routines; nothing here touches floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import Matrix as SymMatrix
from sympy import ZZ, primefactors
from sympy.matrices.normalforms import smith_normal_decomp

from .sft import TransitionMatrix

Matrix = list[list[int]]


def _rows(A) -> Matrix:
    if isinstance(A, TransitionMatrix):
        return A.tolist()
    return [list(r) for r in A]


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]]) -> Matrix:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*Y)] for row in X]


def transpose(X: Sequence[Sequence[int]]) -> Matrix:
    return [list(c) for c in zip(*X)]


def id_minus(A) -> Matrix:
    M = _rows(A)
    return [[int(i == j) - M[i][j] for j in range(len(M))] for i in range(len(M))]


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Determinant by fraction-free elimination."""
    if not M:
        return 1
    return int(SymMatrix(M).det(method="bareiss"))


def det_id_minus(A: TransitionMatrix) -> int:
    return bareiss_det(id_minus(A))


# -- Smith normal form -----------------------------------------------------------


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal, d1 | d2 | ..."""

    D: Matrix
    U: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0])))]


def smith_form(M: Sequence[Sequence[int]]) -> SmithForm:
    D, U, V = smith_normal_decomp(SymMatrix(M), domain=ZZ)
    D, U, V = ([[int(x) for x in row] for row in X.tolist()] for X in (D, U, V))
    for i in range(min(len(D), len(D[0]))):
        if D[i][i] < 0:
            D[i] = [-x for x in D[i]]
            U[i] = [-x for x in U[i]]
    return SmithForm(D, U, V)


def check_smith(M: Sequence[Sequence[int]], s: SmithForm) -> bool:
    """Re-multiply the transforms and check shape, divisibility and unimodularity."""
    if matmul(matmul(s.U, M), s.V) != s.D:
        return False
    if abs(bareiss_det(s.U)) != 1 or abs(bareiss_det(s.V)) != 1:
        return False
    m, n = len(s.D), len(s.D[0])
    if any(s.D[i][j] for i in range(m) for j in range(n) if i != j):
        return False
    d = s.diagonal
    return all(x >= 0 for x in d) and all(
        (d[i + 1] % d[i] == 0) if d[i] else d[i + 1] == 0 for i in range(len(d) - 1)
    )


# -- K-theory ----------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianPresentation:
    """``Z/d1 + ... + Z/dk + Z^free_rank`` with a distinguished element.

    ``unit_class`` lists the coordinates of the element: first one residue per
    finite factor, then one integer per free summand.
    """

    invariant_factors: tuple[int, ...]
    free_rank: int
    unit_class: tuple[int, ...]

    @property
    def order(self) -> int | None:
        return math.prod(self.invariant_factors) if self.free_rank == 0 else None

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        k = len(self.invariant_factors)
        return tuple(x % d for x, d in zip(v[:k], self.invariant_factors)) + tuple(v[k:])

    def same_group(self, other: "AbelianPresentation") -> bool:
        return (self.invariant_factors, self.free_rank) == (other.invariant_factors, other.free_rank)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.invariant_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def cokernel(M: Sequence[Sequence[int]], element: Sequence[int]) -> AbelianPresentation:
    """``Z^m / image(M)`` with the class of ``element``."""
    s = smith_form(M)
    d = s.diagonal + [0] * (len(s.D) - len(s.diagonal))
    u = [sum(a * b for a, b in zip(row, element)) for row in s.U]
    finite = [(di, ui % di) for di, ui in zip(d, u) if di > 1]
    free = [ui for di, ui in zip(d, u) if di == 0]
    return AbelianPresentation(
        tuple(di for di, _ in finite), len(free), tuple(x for _, x in finite) + tuple(free)
    )


def k_groups(A: TransitionMatrix) -> tuple[AbelianPresentation, int]:
    """``K0 = coker(I - A^t)`` with the class of the all-ones vector, and the rank of ``K1``."""
    M = id_minus(transpose(A.tolist()))
    K0 = cokernel(M, [1] * A.n)
    return K0, K0.free_rank


def bowen_franks(A: TransitionMatrix) -> AbelianPresentation:
    return cokernel(id_minus(A), [0] * A.n)


def _element_order(v: Sequence[int], factors: Sequence[int]) -> int:
    order = 1
    for x, d in zip(v, factors):
        order = math.lcm(order, d // math.gcd(x, d))
    return order


def pointed_isomorphic(
    g1: AbelianPresentation, g2: AbelianPresentation, limit: int = 200_000
) -> bool | None:
    """Is there a group isomorphism carrying one distinguished element to the other?

    Exact for finite groups up to a search budget; None when undecided.
    """
    if not g1.same_group(g2):
        return False
    factors = g1.invariant_factors
    if g1.free_rank:
        return True if g1.unit_class == g2.unit_class else None
    u1, u2 = g1.unit_class, g2.unit_class
    if _element_order(u1, factors) != _element_order(u2, factors):
        return False
    if len(factors) <= 1:
        return True  # automorphisms of a cyclic group act transitively on elements of each order
    elements = list(itertools.product(*(range(d) for d in factors)))
    candidates = [[g for g in elements if _element_order(g, factors) == d] for d in factors]
    if math.prod(len(c) for c in candidates) > limit:
        return None
    for images in itertools.product(*candidates):
        image_u = tuple(
            sum(c * img[k] for c, img in zip(u1, images)) % factors[k] for k in range(len(factors))
        )
        if image_u != tuple(u2):
            continue
        span = {
            tuple(sum(c * img[k] for c, img in zip(coeffs, images)) % factors[k] for k in range(len(factors)))
            for coeffs in elements
        }
        if len(span) == len(elements):
            return True
    return False


# -- characteristic polynomial and ranks ------------------------------------------------


def char_poly(A) -> tuple[int, ...]:
    """Coefficients of ``det(tI - A)`` from ``t^n`` down to the constant term."""
    return tuple(int(c) for c in SymMatrix(_rows(A)).charpoly().all_coeffs())


def nonzero_spectrum_poly(A) -> tuple[int, ...]:
    """The characteristic polynomial with all factors of ``t`` removed."""
    c = list(char_poly(A))
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def format_poly(coeffs: Sequence[int], var: str = "t") -> str:
    n = len(coeffs) - 1
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        e = n - i
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        mag = abs(c)
        body = f"{mag}" if not mono else (mono if mag == 1 else f"{mag}{mono}")
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def rational_rank(M: Sequence[Sequence[int]]) -> int:
    return SymMatrix(M).rank()


def matrix_power(M: Sequence[Sequence[int]], k: int) -> Matrix:
    out = identity_matrix(len(M))
    for _ in range(k):
        out = matmul(out, M)
    return out


# -- dimension groups ------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionGroup:
    """The stationary limit of ``Z^N`` under ``A^t`` with its order unit.

    For eventual rank 1 the state ``v (at stage n) -> <w, v> / lam^n`` is an
    order isomorphism onto ``Z[1/lam]`` sending the order unit to ``unit_value``.
    """

    matrix: TransitionMatrix
    eventual_rank: int
    lam: int | None = None
    weight: tuple[int, ...] | None = None
    unit_value: int | None = None

    @property
    def supported(self) -> bool:
        return self.lam is not None

    def state(self, v: Sequence[int], stage: int = 0) -> Fraction:
        if not self.supported:
            raise RankTooHigh(f"eventual rank {self.eventual_rank} has no rank-one state")
        return Fraction(sum(a * b for a, b in zip(self.weight, v)), self.lam**stage)


class RankTooHigh(ValueError):
    pass


def dimension_group(A: TransitionMatrix) -> DimensionGroup:
    """Eventual rank, and for rank one the integer Perron value, weight and unit value."""
    M = A.tolist()
    P = matrix_power(M, A.n)
    r = rational_rank(P)
    if r != 1:
        return DimensionGroup(A, r)
    # one nonzero eigenvalue, so it equals the trace; columns of A^N span its eigenspace
    lam = sum(M[i][i] for i in range(A.n))
    col = next(c for c in zip(*P) if any(c))
    g = math.gcd(*col)
    w = tuple(abs(x) // g for x in col)
    if matmul(M, [[x] for x in w]) != [[lam * x] for x in w]:
        return DimensionGroup(A, r)
    return DimensionGroup(A, r, lam, w, sum(w))


def prime_support(n: int) -> frozenset[int]:
    return frozenset(primefactors(n))


def dimension_groups_isomorphic(g1: DimensionGroup, g2: DimensionGroup) -> bool | None:
    """Order-unit isomorphism of rank-one stationary dimension groups; None if unsupported."""
    if not (g1.supported and g2.supported):
        return None
    primes = prime_support(g1.lam)
    if primes != prime_support(g2.lam):
        return False
    q = Fraction(g1.unit_value, g2.unit_value)
    return prime_support(q.numerator) <= primes and prime_support(q.denominator) <= primes


# -- strong shift equivalence ------------------------------------------------------------


def elementary_sse_search(
    A: TransitionMatrix, B: TransitionMatrix, inner_dim_max: int | None = None, max_entry: int = 1
) -> tuple[Matrix, Matrix] | None:
    """Find ``R, S`` with entries in ``0..max_entry``, ``A == R S`` and ``B == S R``.

    ``S R`` is square of the size of ``B``, so the inner dimension is forced
    to ``B.n``; ``inner_dim_max`` only caps it.  None is not a refutation.
    """
    m = B.n
    if inner_dim_max is not None and m > inner_dim_max:
        return None
    MA, MB = A.tolist(), B.tolist()
    if MA == MB:
        return MA, identity_matrix(m)
    vals = range(max_entry + 1)
    vectors = list(itertools.product(vals, repeat=m))
    for flat in itertools.product(vals, repeat=A.n * m):
        R = [list(flat[i * m : (i + 1) * m]) for i in range(A.n)]
        options = []
        for j in range(A.n):
            target = [MA[i][j] for i in range(A.n)]
            options.append([s for s in vectors if all(sum(r * x for r, x in zip(R[i], s)) == target[i] for i in range(A.n))])
            if not options[-1]:
                break
        else:
            for cols in itertools.product(*options):
                S = [list(row) for row in zip(*cols)]
                if matmul(S, R) == MB:
                    return R, S
    return None


# -- report ---------------------------------------------------------------------------------

REPORT_KEYS = (
    "det_id_minus", "k0_group", "k0_factors", "k0_unit", "k1_rank",
    "dimgroup_rank", "dimgroup_lambda", "dimgroup_weight", "dimgroup_unit", "charpoly",
)


def invariant_report(A: TransitionMatrix) -> dict[str, str]:
    """The invariants of ``A`` as an ordered key-value block of strings."""
    K0, k1 = k_groups(A)
    g = dimension_group(A)
    na = "unsupported" if not g.supported else None
    return {
        "det_id_minus": str(det_id_minus(A)),
        "k0_group": str(K0),
        "k0_factors": " ".join(map(str, K0.invariant_factors)) or "-",
        "k0_unit": " ".join(map(str, K0.unit_class)) or "-",
        "k1_rank": str(k1),
        "dimgroup_rank": str(g.eventual_rank),
        "dimgroup_lambda": na or str(g.lam),
        "dimgroup_weight": na or " ".join(map(str, g.weight)),
        "dimgroup_unit": na or str(g.unit_value),
        "charpoly": format_poly(char_poly(A)),
    }

"""Named matrices and constructors for homeomorphism certificates.

The random constructors take a ``random.Random`` so that test suites and
scripts can reproduce any failing case from its seed.
"""

from __future__ import annotations

import random
from functools import lru_cache

from .fullgroup import Tableau, enumerate_tableaux, is_af
from .sft import TransitionMatrix, validate_matrix
from .transducer import (
    HomeoCertificate,
    build,
    code_parser,
    compose_certificates,
    higher_block_matrix,
    identity_certificate,
    relabel,
    substitution,
    tableau_certificate,
)

NAMED_MATRICES: dict[str, list[list[int]]] = {
    "A2": [[1, 1], [1, 1]],
    "F2": [[1, 1], [1, 0]],
    "B2": [[1, 1, 0], [1, 0, 1], [1, 0, 1]],
    "B3": [[1, 1, 1], [1, 1, 1], [1, 0, 0]],
    "C3": [[1, 1, 1], [1, 1, 0], [1, 1, 0]],
    "A4": [[1, 1, 1, 1], [1, 1, 1, 1], [1, 1, 1, 1], [1, 1, 1, 1]],
}


def named(name: str) -> TransitionMatrix:
    return validate_matrix(NAMED_MATRICES[name])


def full_shift(n: int) -> TransitionMatrix:
    return validate_matrix([[1] * n for _ in range(n)])


# -- deterministic certificates -----------------------------------------------------


def relabel_certificate(A: TransitionMatrix, perm: dict[int, int]) -> HomeoCertificate:
    """Symbol renaming as a conjugacy of ``X_A`` onto the renamed shift."""
    rows = [[0] * A.n for _ in range(A.n)]
    for i in A.symbols:
        for j in A.symbols:
            rows[perm[i] - 1][perm[j] - 1] = A(i, j)
    B = TransitionMatrix(tuple(map(tuple, rows)))
    inv = {v: k for k, v in perm.items()}
    return HomeoCertificate(relabel(A, B, perm), relabel(B, A, inv), "relabel")


def swap_certificate(A: TransitionMatrix) -> HomeoCertificate:
    """The swap ``1 <-> 2`` of a two-symbol full shift."""
    return relabel_certificate(A, {1: 2, 2: 1})


def higher_block_certificate(A: TransitionMatrix) -> HomeoCertificate:
    """The conjugacy ``x -> (x0 x1)(x1 x2)...`` onto the 2-block presentation."""
    B, words = higher_block_matrix(A)
    index = {w: i + 1 for i, w in enumerate(words)}

    def forward(prev, a):
        if prev is None:
            return a, ()
        return a, (index[prev, a],)

    def backward(started, e):
        w = words[e - 1]
        return True, (w[1],) if started else w

    return HomeoCertificate(build(A, B, None, forward), build(B, A, False, backward), "block2")


def substitution_certificate(
    A: TransitionMatrix, B: TransitionMatrix, images: dict[int, tuple[int, ...]], name: str = "subst"
) -> HomeoCertificate:
    return HomeoCertificate(substitution(A, B, images), code_parser(B, A, images), name)


def a2_to_f2() -> HomeoCertificate:
    """``1 -> 1, 2 -> 21``: an orbit equivalence of the full 2-shift with the golden mean shift."""
    return substitution_certificate(named("A2"), named("F2"), {1: (1,), 2: (2, 1)}, "A2->F2")


def a4_to_a2() -> HomeoCertificate:
    """Reading a point of the full 2-shift two symbols at a time.

    A homeomorphism whose inverse has no continuous time changes.
    """
    images = {1: (1, 1), 2: (1, 2), 3: (2, 1), 4: (2, 2)}
    return substitution_certificate(named("A4"), named("A2"), images, "A4->A2")


def b2_to_a2() -> HomeoCertificate:
    """A hand-built homeomorphism ``X_B2 -> X_A2`` whose cocycles are cohomologous to 1.

    Symbols 2 and 3 of B2 share a row, and which of them occurs is fixed by
    the preceding symbol except at the start, so the tail collapses them to 2
    and the head records the first symbol.
    """
    B2, A2 = named("B2"), named("A2")
    head = {1: (1, 1), 2: (1, 2), 3: (2,)}
    merge = {1: 1, 2: 2, 3: 2}

    def forward(started, b):
        return True, (merge[b],) if started else head[b]

    def backward(state, a):
        if state == "init":
            return ("saw1", ()) if a == 1 else (3, (3,))
        if state == "saw1":
            return a, (a,)
        if a == 1:
            return 1, (1,)
        out = 2 if state == 1 else 3
        return out, (out,)

    return HomeoCertificate(build(B2, A2, False, forward), build(A2, B2, "init", backward), "B2->A2")


# -- random families ------------------------------------------------------------------


@lru_cache(maxsize=None)
def small_tableaux(A: TransitionMatrix, max_len: int = 2) -> tuple[Tableau, ...]:
    return tuple(enumerate_tableaux(A, max_len))


def random_tableau(A: TransitionMatrix, rng: random.Random, max_len: int = 2) -> Tableau:
    return rng.choice(small_tableaux(A, max_len))


def random_af_tableau(A: TransitionMatrix, rng: random.Random, max_len: int = 2) -> Tableau:
    return rng.choice([t for t in small_tableaux(A, max_len) if is_af(t) is not None])


def random_tableau_certificate(
    A: TransitionMatrix, rng: random.Random, factors: int = 2, af_only: bool = False
) -> HomeoCertificate:
    """A product of random small tableaux, lifted to transducers."""
    pick = random_af_tableau if af_only else random_tableau
    c = identity_certificate(A)
    for _ in range(rng.randint(1, factors)):
        c = compose_certificates(tableau_certificate(pick(A, rng)), c)
    return c


def non_af_certificate(A: TransitionMatrix) -> HomeoCertificate:
    """The first small tableau (in canonical order) that is not length preserving."""
    tau = next(t for t in small_tableaux(A, 2) if is_af(t) is None)
    return tableau_certificate(tau)


def random_certificate(A: TransitionMatrix, rng: random.Random) -> HomeoCertificate:
    """A random self-homeomorphism of ``X_A`` mixing tableaux and a round trip through the block shift."""
    c = random_tableau_certificate(A, rng)
    if rng.random() < 0.3:
        block = higher_block_certificate(A)
        c = compose_certificates(block.inverse(), compose_certificates(block, c))
    if A.n == 2 and A.row(1) == A.row(2) and rng.random() < 0.5:
        c = compose_certificates(swap_certificate(A), c)
    return c

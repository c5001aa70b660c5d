"""Elements of the continuous full group as prefix-exchange tableaux.

A tableau is a bijection between two complete prefix codes of admissible
words.  On the cylinder of ``source`` it acts by ``source + x -> target + x``;
this is well defined and bijective exactly when the last symbols of source
and target have identical rows in the transition matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .sft import (
    LCFunction,
    Point,
    TransitionMatrix,
    Word,
    admissible_words,
    function_on_code,
    format_word,
    parse_word,
)

Pair = tuple[Word, Word]


class TableauError(ValueError):
    pass


class IncompleteCode(TableauError):
    pass


class FollowerRowMismatch(TableauError):
    pass


def _children(A: TransitionMatrix, s: Word, t: Word) -> list[Pair]:
    return [(s + (a,), t + (a,)) for a in A.followers(s[-1] if s else None)]


def _check_code(A: TransitionMatrix, words: list[Word], name: str) -> None:
    if words == [()]:
        return
    if () in words:
        raise IncompleteCode(f"{name} code mixes the empty word with other words")
    for w in words:
        if not A.is_admissible(w):
            raise IncompleteCode(f"{name} word {format_word(w, A.n)} is not admissible")
    L = max(len(w) for w in words)
    lengths = sorted({len(w) for w in words})
    wordset = set(words)
    if len(wordset) != len(words):
        raise IncompleteCode(f"{name} code has repeated words")
    for u in admissible_words(A, L):
        hits = sum(u[:k] in wordset for k in lengths)
        if hits != 1:
            raise IncompleteCode(
                f"{name} code covers {format_word(u, A.n)} {hits} times (need exactly once)"
            )


@dataclass(frozen=True, eq=False)
class Tableau:
    matrix: TransitionMatrix
    pairs: tuple[Pair, ...]

    def __post_init__(self):
        A = self.matrix
        pairs = tuple(sorted((tuple(s), tuple(t)) for s, t in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise IncompleteCode("tableau has no pairs")
        _check_code(A, [s for s, _ in pairs], "source")
        _check_code(A, [t for _, t in pairs], "target")
        for s, t in pairs:
            if bool(s) != bool(t):
                raise FollowerRowMismatch("the empty word may only be paired with itself")
            if s and A.row(s[-1]) != A.row(t[-1]):
                raise FollowerRowMismatch(
                    f"rows of {s[-1]} and {t[-1]} differ for pair "
                    f"{format_word(s, A.n)} -> {format_word(t, A.n)}"
                )

    @classmethod
    def identity(cls, A: TransitionMatrix) -> "Tableau":
        return cls(A, (((), ()),))

    @property
    def depth(self) -> int:
        return max(len(s) for s, _ in self.pairs)

    def as_dict(self) -> dict[Word, Word]:
        return dict(self.pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tableau):
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        c = canonical(self)
        return hash((c.matrix, c.pairs))

    def __repr__(self) -> str:
        n = self.matrix.n
        body = ", ".join(f"{format_word(s, n)}->{format_word(t, n)}" for s, t in self.pairs)
        return f"Tableau({body})"


def _lookup(pairs: Mapping[Word, Word], lengths: list[int], word: Word) -> Pair | None:
    for k in lengths:
        if word[:k] in pairs and len(word) >= k:
            return word[:k], pairs[word[:k]]
    return None


def apply(tau: Tableau, p: Point) -> Point:
    """Image of an ultimately periodic point under the prefix exchange."""
    pairs = tau.as_dict()
    lengths = sorted({len(s) for s in pairs})
    s, t = _lookup(pairs, lengths, p.expand(lengths[-1]))
    return p.shift(len(s)).prepend(t)


def refine_to(tau: Tableau, depth: int) -> dict[Word, Word]:
    """Split pairs until every source has length at least ``depth``."""
    out: dict[Word, Word] = {}
    todo = list(tau.pairs)
    while todo:
        s, t = todo.pop()
        if len(s) >= depth:
            out[s] = t
        else:
            todo.extend(_children(tau.matrix, s, t))
    return out


def canonical(tau: Tableau) -> Tableau:
    """Maximally merged form; equal elements have identical canonical pairs."""
    A = tau.matrix
    pairs = tau.as_dict()
    changed = True
    while changed:
        changed = False
        parents = sorted({s[:-1] for s in pairs if s}, key=len, reverse=True)
        for w in parents:
            kids = [w + (a,) for a in A.followers(w[-1] if w else None)]
            if not all(k in pairs for k in kids):
                continue
            targets = [pairs[k] for k in kids]
            if any(not t or t[-1] != k[-1] for k, t in zip(kids, targets)):
                continue
            stems = {t[:-1] for t in targets}
            if len(stems) != 1:
                continue
            v = stems.pop()
            if bool(w) != bool(v):
                continue
            if w and A.row(w[-1]) != A.row(v[-1]):
                continue
            for k in kids:
                del pairs[k]
            pairs[w] = v
            changed = True
    return Tableau(A, tuple(pairs.items()))


def compose(tau1: Tableau, tau2: Tableau) -> Tableau:
    """``tau1 o tau2``: apply ``tau2`` first."""
    if tau1.matrix != tau2.matrix:
        raise ValueError("tableaux act on different shift spaces")
    A = tau1.matrix
    first = tau1.as_dict()
    lengths = sorted({len(s) for s in first})
    out: list[Pair] = []
    todo = list(tau2.pairs)
    while todo:
        s, t = todo.pop()
        hit = _lookup(first, lengths, t)
        if hit is None:
            todo.extend(_children(A, s, t))
        else:
            s1, t1 = hit
            out.append((s, t1 + t[len(s1):]))
    return canonical(Tableau(A, tuple(out)))


def invert(tau: Tableau) -> Tableau:
    return Tableau(tau.matrix, tuple((t, s) for s, t in tau.pairs))


def equal(tau1: Tableau, tau2: Tableau) -> bool:
    """Pointwise equality, by refining both to a common source depth."""
    if tau1.matrix != tau2.matrix:
        return False
    d = max(tau1.depth, tau2.depth)
    return refine_to(tau1, d) == refine_to(tau2, d)


def cocycle(tau: Tableau) -> LCFunction:
    """The continuous cocycle ``l - k``: ``|source| - |target|`` on each source cylinder."""
    c = canonical(tau)
    return function_on_code(c.matrix, {s: len(s) - len(t) for s, t in c.pairs})


def pullback(f: LCFunction, tau: Tableau) -> LCFunction:
    """``f o tau`` as a locally constant function."""
    A = tau.matrix
    values: dict[Word, int] = {}
    todo = list(tau.pairs)
    while todo:
        s, t = todo.pop()
        if len(t) >= f.depth:
            values[s] = f.value(t)
        else:
            todo.extend(_children(A, s, t))
    return function_on_code(A, values)


def is_af(tau: Tableau) -> int | None:
    """Least ``K`` with ``sigma^K o tau == sigma^K``, or None if ``tau`` is not in the AF subgroup."""
    c = canonical(tau)
    if any(len(s) != len(t) for s, t in c.pairs):
        return None
    return max(next(k for k in range(len(s) + 1) if s[k:] == t[k:]) for s, t in c.pairs)


def af_transpositions(A: TransitionMatrix, d: int) -> list[Tableau]:
    """Swaps of two ``d``-cylinders whose last symbols have equal rows."""
    if d < 1:
        raise ValueError("d must be positive")
    words = admissible_words(A, d)
    out = []
    for u, v in itertools.combinations(words, 2):
        if A.row(u[-1]) != A.row(v[-1]):
            continue
        pairs = [(w, w) for w in words if w not in (u, v)] + [(u, v), (v, u)]
        out.append(Tableau(A, tuple(pairs)))
    return out


def cocycle_composition_identity_check(tau1: Tableau, tau2: Tableau) -> bool:
    """``c(tau1 o tau2) == c(tau1) o tau2 + c(tau2)``."""
    lhs = cocycle(compose(tau1, tau2))
    rhs = pullback(cocycle(tau1), tau2) + cocycle(tau2)
    return lhs == rhs


# -- enumeration ----------------------------------------------------------------


def prefix_codes(A: TransitionMatrix, max_len: int) -> list[tuple[Word, ...]]:
    """All complete prefix codes whose words have length at most ``max_len``."""

    def grow(w: Word) -> list[list[Word]]:
        options = [[w]] if w else []
        if len(w) < max_len:
            kids = [w + (a,) for a in A.followers(w[-1] if w else None)]
            for combo in itertools.product(*(grow(k) for k in kids)):
                options.append([x for part in combo for x in part])
        return options

    return [((),)] + [tuple(sorted(c)) for c in grow(())]


def _row_bijections(A: TransitionMatrix, src: tuple[Word, ...], tgt: tuple[Word, ...]) -> Iterator[list[Pair]]:
    def rec(i: int, used: frozenset):
        if i == len(src):
            yield []
            return
        s = src[i]
        for j, t in enumerate(tgt):
            if j in used:
                continue
            if s and t and A.row(s[-1]) != A.row(t[-1]):
                continue
            for rest in rec(i + 1, used | {j}):
                yield [(s, t)] + rest

    yield from rec(0, frozenset())


def enumerate_tableaux(A: TransitionMatrix, max_len: int) -> list[Tableau]:
    """Every valid tableau with source and target words of length at most ``max_len``.

    Elements are listed once each, in their canonical form.
    """
    codes = prefix_codes(A, max_len)
    seen: dict[tuple, Tableau] = {}
    for src in codes:
        for tgt in codes:
            if len(src) != len(tgt) or (src == ((),)) != (tgt == ((),)):
                continue
            for pairs in _row_bijections(A, src, tgt):
                c = canonical(Tableau(A, tuple(pairs)))
                seen.setdefault(c.pairs, c)
    return [seen[k] for k in sorted(seen)]


# -- text format ------------------------------------------------------------------


def format_tableau(tau: Tableau) -> str:
    n = tau.matrix.n
    lines = [f"tableau n={n}"]
    lines += [f"{format_word(s, n)} -> {format_word(t, n)}" for s, t in tau.pairs]
    return "\n".join(lines) + "\n"


def parse_tableau(A: TransitionMatrix, text: str) -> Tableau:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("tableau"):
        raise TableauError("tableau file must start with 'tableau n=<N>'")
    header = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    if int(header.get("n", A.n)) != A.n:
        raise TableauError(f"tableau is over {header['n']} symbols, matrix has {A.n}")
    pairs = []
    for ln in lines[1:]:
        s, arrow, t = ln.partition("->")
        if not arrow:
            raise TableauError(f"bad pair line {ln!r}")
        pairs.append((parse_word(s, A.n), parse_word(t, A.n)))
    return Tableau(A, tuple(pairs))

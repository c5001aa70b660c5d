"""One-sided shifts of finite type given by 0/1 matrices.

Symbols are 1-based integers and words are plain tuples of symbols.  Points of
the shift are represented exactly only when they are ultimately periodic
(:class:`Point`); every other point is probed through its finite prefixes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

Word = tuple[int, ...]


class MatrixError(ValueError):
    """A raw matrix does not define an admissible shift space."""


class ZeroRowOrColumn(MatrixError):
    pass


class IsPermutation(MatrixError):
    pass


class NotIrreducible(MatrixError):
    pass


@dataclass(frozen=True)
class TransitionMatrix:
    entries: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def symbols(self) -> range:
        return range(1, self.n + 1)

    def __call__(self, i: int, j: int) -> int:
        return self.entries[i - 1][j - 1]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i - 1]

    @cached_property
    def _followers(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(j + 1 for j, bit in enumerate(row) if bit) for row in self.entries
        )

    def followers(self, last: int | None) -> tuple[int, ...]:
        """Symbols allowed after ``last``; every symbol when ``last`` is None."""
        if last is None:
            return tuple(self.symbols)
        return self._followers[last - 1]

    def is_admissible(self, word: Sequence[int], after: int | None = None) -> bool:
        prev = after
        for a in word:
            if not 1 <= a <= self.n:
                return False
            if prev is not None and not self(prev, a):
                return False
            prev = a
        return True

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __str__(self) -> str:
        return format_matrix(self)


def _strongly_connected(entries: Sequence[Sequence[int]]) -> bool:
    n = len(entries)

    def reach(adj) -> set[int]:
        seen = {0}
        todo = [0]
        while todo:
            i = todo.pop()
            for j in range(n):
                if adj(i, j) and j not in seen:
                    seen.add(j)
                    todo.append(j)
        return seen

    forward = reach(lambda i, j: entries[i][j])
    backward = reach(lambda i, j: entries[j][i])
    return len(forward) == n and len(backward) == n


def validate_matrix(raw: Sequence[Sequence[int]]) -> TransitionMatrix:
    """Check the standing hypotheses and wrap ``raw`` as a :class:`TransitionMatrix`.

    The checks run in a fixed order (zero rows/columns, permutation,
    irreducibility) so each failure names the first violated hypothesis.
    """
    rows = [list(r) for r in raw]
    n = len(rows)
    if n == 0 or any(len(r) != n for r in rows):
        raise MatrixError("matrix must be square and nonempty")
    if any(v not in (0, 1) for r in rows for v in r):
        raise MatrixError("entries must be 0 or 1")
    for i in range(n):
        if not any(rows[i]):
            raise ZeroRowOrColumn(f"row {i + 1} is zero")
        if not any(rows[j][i] for j in range(n)):
            raise ZeroRowOrColumn(f"column {i + 1} is zero")
    if all(sum(r) == 1 for r in rows) and all(
        sum(rows[j][i] for j in range(n)) == 1 for i in range(n)
    ):
        raise IsPermutation("matrix is a permutation matrix")
    if not _strongly_connected(rows):
        raise NotIrreducible("transition graph is not strongly connected")
    return TransitionMatrix(tuple(tuple(r) for r in rows))


# -- text formats -----------------------------------------------------------


def parse_matrix(text: str) -> TransitionMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MatrixError("empty matrix file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise MatrixError(f"bad size line {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != n or any(len(ln) != n for ln in body):
        raise MatrixError(f"expected {n} lines of {n} characters")
    if any(ch not in "01" for ln in body for ch in ln):
        raise MatrixError("matrix rows must contain only 0 and 1")
    return validate_matrix([[int(ch) for ch in ln] for ln in body])


def format_matrix(A: TransitionMatrix) -> str:
    return "\n".join([str(A.n)] + ["".join(map(str, r)) for r in A.entries]) + "\n"


def format_word(word: Sequence[int], n: int = 9) -> str:
    if not word:
        return "-"
    if n <= 9:
        return "".join(map(str, word))
    return ",".join(map(str, word))


def parse_word(text: str, n: int = 9) -> Word:
    text = text.strip()
    if text in ("-", ""):
        return ()
    if n <= 9 and "," not in text:
        return tuple(int(ch) for ch in text)
    return tuple(int(s) for s in text.split(","))


# -- words ------------------------------------------------------------------


def admissible_words(A: TransitionMatrix, length: int) -> list[Word]:
    """All admissible words of the given length in lexicographic order."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    words: list[Word] = [()]
    for _ in range(length):
        words = [w + (a,) for w in words for a in A.followers(w[-1] if w else None)]
    return words


def extensions(A: TransitionMatrix, word: Word, extra: int) -> list[Word]:
    """Admissible words of length ``len(word) + extra`` starting with ``word``."""
    out = [word]
    for _ in range(extra):
        out = [w + (a,) for w in out for a in A.followers(w[-1] if w else None)]
    return out


def _least_rotation(cycle: Word) -> Word:
    return min(cycle[i:] + cycle[:i] for i in range(len(cycle)))


def _primitive_root(cycle: Word) -> Word:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            return cycle[:d]
    return cycle


def periodic_orbits(A: TransitionMatrix, max_len: int) -> list[Word]:
    """Primitive cycles up to rotation, each as its least rotation.

    Sorted by length, then lexicographically.
    """
    found: list[Word] = []
    for length in range(1, max_len + 1):
        for start in A.symbols:
            # least rotation starts with its minimal symbol
            stack: list[Word] = [(start,)]
            while stack:
                w = stack.pop()
                if len(w) == length:
                    if A(w[-1], w[0]) and _primitive_root(w) == w and _least_rotation(w) == w:
                        found.append(w)
                    continue
                for a in A.followers(w[-1]):
                    if a >= start:
                        stack.append(w + (a,))
    return sorted(found, key=lambda w: (len(w), w))


def closed_walk(A: TransitionMatrix, a: int) -> Word:
    """Shortest cycle word beginning at symbol ``a``."""
    parent: dict[int, int | None] = {}
    queue = deque()
    for b in A.followers(a):
        if b not in parent:
            parent[b] = None
            queue.append(b)
    while queue:
        b = queue.popleft()
        if b == a:
            break
        for c in A.followers(b):
            if c not in parent:
                parent[c] = b
                queue.append(c)
    path = [a]
    node = parent[a]
    while node is not None:
        path.append(node)
        node = parent[node]
    # path holds a, then predecessors back towards a's first successor
    return (a,) + tuple(reversed(path[1:]))


# -- ultimately periodic points -----------------------------------------------


@dataclass(frozen=True)
class Point:
    """The sequence ``prefix + cycle + cycle + ...`` in canonical form.

    The cycle is reduced to its primitive root and the prefix to its shortest
    length, so two points are equal as sequences iff they compare equal.
    """

    prefix: Word
    cycle: Word

    def __post_init__(self):
        prefix, cycle = tuple(self.prefix), tuple(self.cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")
        cycle = _primitive_root(cycle)
        while prefix and prefix[-1] == cycle[-1]:
            prefix = prefix[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    def __getitem__(self, i: int) -> int:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def expand(self, length: int) -> Word:
        return tuple(self[i] for i in range(length))

    def shift(self, k: int = 1) -> "Point":
        if k <= len(self.prefix):
            return Point(self.prefix[k:], self.cycle)
        r = (k - len(self.prefix)) % len(self.cycle)
        return Point((), self.cycle[r:] + self.cycle[:r])

    def prepend(self, word: Sequence[int]) -> "Point":
        return Point(tuple(word) + self.prefix, self.cycle)

    def __str__(self) -> str:
        return f"{format_word(self.prefix)}({format_word(self.cycle)})^inf"


def check_point(A: TransitionMatrix, p: Point) -> None:
    if not A.is_admissible(p.prefix + p.cycle + p.cycle):
        raise ValueError(f"point {p} is not admissible")


def point_through(A: TransitionMatrix, word: Word) -> Point:
    """Some ultimately periodic point of ``X_A`` beginning with ``word``."""
    if not word:
        word = (1,)
    if not A.is_admissible(word):
        raise ValueError(f"word {word} is not admissible")
    return Point(word[:-1], closed_walk(A, word[-1]))


def random_point(A: TransitionMatrix, rng, max_prefix: int = 4, max_cycle: int = 4) -> Point:
    """Random ultimately periodic point; ``rng`` is a :class:`random.Random`."""
    while True:
        plen = rng.randint(0, max_prefix)
        clen = rng.randint(1, max_cycle)
        w = [rng.choice(A.followers(None))]
        for _ in range(plen + clen - 1):
            w.append(rng.choice(A.followers(w[-1])))
        prefix, cycle = tuple(w[:plen]), tuple(w[plen:])
        if A(cycle[-1], cycle[0]):
            return Point(prefix, cycle)


# -- locally constant integer functions -------------------------------------


@dataclass(frozen=True, eq=False)
class LCFunction:
    """A locally constant function ``X_A -> Z`` given on cylinders of one depth.

    Depth 0 is stored as a bare constant.  Equality compares the functions,
    not their presentations.
    """

    matrix: TransitionMatrix
    depth: int
    constant: int = 0
    values: Mapping[Word, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if self.depth > 0:
            keys = set(self.values)
            if keys != set(admissible_words(self.matrix, self.depth)):
                raise ValueError(f"table keys must be exactly the admissible {self.depth}-words")
            object.__setattr__(self, "values", dict(sorted(self.values.items())))

    @classmethod
    def const(cls, A: TransitionMatrix, c: int) -> "LCFunction":
        return cls(A, 0, constant=c)

    @classmethod
    def from_table(cls, A: TransitionMatrix, depth: int, table: Mapping[Word, int]) -> "LCFunction":
        if depth == 0:
            return cls(A, 0, constant=table[()])
        return cls(A, depth, values=dict(table))

    @classmethod
    def from_callable(cls, A: TransitionMatrix, depth: int, fn) -> "LCFunction":
        return cls.from_table(A, depth, {w: fn(w) for w in admissible_words(A, depth)})

    @classmethod
    def indicator(cls, A: TransitionMatrix, word: Word) -> "LCFunction":
        word = tuple(word)
        return cls.from_callable(A, len(word), lambda w: int(w == word))

    @property
    def table(self) -> dict[Word, int]:
        if self.depth == 0:
            return {(): self.constant}
        return dict(self.values)

    def value(self, word: Sequence[int]) -> int:
        if self.depth == 0:
            return self.constant
        return self.values[tuple(word[: self.depth])]

    def __call__(self, p: Point) -> int:
        return self.value(p.expand(self.depth))

    @property
    def is_constant(self) -> bool:
        return self.depth == 0 or len(set(self.values.values())) == 1

    @property
    def constant_value(self) -> int | None:
        if self.depth == 0:
            return self.constant
        vals = set(self.values.values())
        return vals.pop() if len(vals) == 1 else None

    def refine(self, depth: int) -> "LCFunction":
        if depth < self.depth:
            raise ValueError("cannot refine to a smaller depth")
        if depth == self.depth:
            return self
        return LCFunction.from_callable(self.matrix, depth, self.value)

    def simplify(self) -> "LCFunction":
        """The same function on the shallowest depth that represents it."""
        for d in range(self.depth):
            words = admissible_words(self.matrix, self.depth)
            coarse: dict[Word, int] = {}
            if all(coarse.setdefault(w[:d], self.value(w)) == self.value(w) for w in words):
                return LCFunction.from_table(self.matrix, d, coarse)
        return self

    def _binary(self, other, op) -> "LCFunction":
        if isinstance(other, int):
            other = LCFunction.const(self.matrix, other)
        if other.matrix != self.matrix:
            raise ValueError("functions live on different shift spaces")
        d = max(self.depth, other.depth)
        return LCFunction.from_callable(self.matrix, d, lambda w: op(self.value(w), other.value(w)))

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __neg__(self):
        return self._binary(0, lambda a, b: -a)

    def __mul__(self, k: int):
        return self._binary(0, lambda a, b: k * a)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LCFunction) or other.matrix != self.matrix:
            return NotImplemented
        d = max(self.depth, other.depth)
        return self.refine(d).table == other.refine(d).table

    def __hash__(self):
        s = self.simplify()
        return hash((s.matrix, s.depth, tuple(sorted(s.table.items()))))

    def __repr__(self) -> str:
        if self.depth == 0:
            return f"LCFunction(depth=0, constant={self.constant})"
        items = ", ".join(f"{format_word(w, self.matrix.n)}:{v}" for w, v in self.values.items())
        return f"LCFunction(depth={self.depth}, {{{items}}})"


def function_on_code(A: TransitionMatrix, values: Mapping[Word, int]) -> LCFunction:
    """The function equal to ``values[w]`` on each cylinder of a complete prefix code."""
    lengths = sorted({len(w) for w in values})
    return LCFunction.from_callable(
        A, lengths[-1], lambda u: next(values[u[:k]] for k in lengths if u[:k] in values)
    ).simplify()


def refine(f: LCFunction, depth: int) -> LCFunction:
    return f.refine(depth)


def compose_with_shift(f: LCFunction) -> LCFunction:
    """``f o sigma`` as a function of depth ``f.depth + 1``."""
    if f.depth == 0:
        return f
    return LCFunction.from_callable(f.matrix, f.depth + 1, lambda w: f.value(w[1:]))


def cocycle_sum(f: LCFunction, k: int, p: Point) -> int:
    """``f^k(p) = f(p) + f(sigma p) + ... + f(sigma^(k-1) p)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if f.depth == 0:
        return k * f.constant
    w = p.expand(k + f.depth - 1)
    return sum(f.value(w[i : i + f.depth]) for i in range(k))


def orbit_sum(f: LCFunction, cycle: Word) -> int:
    """Sum of ``f`` over the periodic orbit of ``cycle^inf``."""
    return cocycle_sum(f, len(cycle), Point((), cycle))


def format_function(f: LCFunction) -> str:
    lines = [f"depth {f.depth}"]
    lines += [f"{format_word(w, f.matrix.n)} {v}" for w, v in f.table.items()]
    return "\n".join(lines) + "\n"


def parse_function(A: TransitionMatrix, text: str) -> LCFunction:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0][0] != "depth":
        raise ValueError("function file must start with 'depth d'")
    depth = int(lines[0][1])
    table = {parse_word(w, A.n): int(v) for w, v in lines[1:]}
    return LCFunction.from_table(A, depth, table)


# -- coboundaries --------------------------------------------------------------


@dataclass(frozen=True)
class CoboundaryResult:
    """Outcome of a bounded cohomology test ``[f] == [g]``.

    ``status`` is ``"yes"`` (with ``witness`` satisfying
    ``f - g == witness - witness o sigma``), ``"no"`` (with ``orbit``, a cycle
    along which the sums of ``f`` and ``g`` differ) or ``"unknown"``.
    """

    status: str
    witness: LCFunction | None = None
    orbit: Word | None = None

    def __bool__(self) -> bool:
        return self.status == "yes"


def _transfer_potential(h: LCFunction, d: int) -> LCFunction | None:
    """Solve ``h = w - w o sigma`` with ``w`` of depth ``d``, or return None."""
    A = h.matrix
    L = max(h.depth, d + 1)
    adj: dict[Word, list[tuple[Word, int]]] = {u: [] for u in admissible_words(A, d)}
    for v in admissible_words(A, L):
        a, b, weight = v[:d], v[1 : d + 1], h.value(v)
        # w(a) - w(b) = weight
        adj[a].append((b, -weight))
        adj[b].append((a, weight))
    pot: dict[Word, int] = {}
    for root in adj:
        if root in pot:
            continue
        pot[root] = 0
        todo = [root]
        while todo:
            u = todo.pop()
            for v, delta in adj[u]:
                if v not in pot:
                    pot[v] = pot[u] + delta
                    todo.append(v)
                elif pot[v] != pot[u] + delta:
                    return None
    low = min(pot.values())
    return LCFunction.from_table(A, d, {u: x - low for u, x in pot.items()})


def is_coboundary_equivalent(f: LCFunction, g: LCFunction, max_depth: int = 8) -> CoboundaryResult:
    """Bounded semi-decision of whether ``f - g`` is a coboundary.

    Orbit obstructions are searched over primitive cycles of length at most
    ``max_depth``; transfer functions over depths ``0..max_depth``.  The
    returned witness is normalised to have minimum value 0.
    """
    if f.matrix != g.matrix:
        raise ValueError("functions live on different shift spaces")
    h = f - g
    for cycle in periodic_orbits(h.matrix, max_depth):
        if orbit_sum(h, cycle):
            return CoboundaryResult("no", orbit=cycle)
    for d in range(max_depth + 1):
        w = _transfer_potential(h, d)
        if w is not None:
            assert w - compose_with_shift(w) == h
            return CoboundaryResult("yes", witness=w)
    return CoboundaryResult("unknown")


def iter_points(A: TransitionMatrix, max_prefix: int, max_cycle: int) -> Iterator[Point]:
    """Every ultimately periodic point with short canonical data, deduplicated."""
    seen: set[Point] = set()
    for clen in range(1, max_cycle + 1):
        for cycle in admissible_words(A, clen):
            if not A(cycle[-1], cycle[0]):
                continue
            for plen in range(max_prefix + 1):
                for pre in admissible_words(A, plen):
                    if pre and not A(pre[-1], cycle[0]):
                        continue
                    p = Point(pre, cycle)
                    if p not in seen:
                        seen.add(p)
                        yield p

"""Homeomorphisms between shift spaces as deterministic sequential transducers.

A :class:`Transducer` reads an admissible sequence over the source matrix and
writes an admissible sequence over the target matrix, one output word per
input symbol.  Pairs of mutually inverse transducers certify homeomorphisms
``h: X_A -> X_B``; on top of them this module extracts orbit-equivalence
time changes and the transfer map on locally constant functions.

All decisions about infinite outputs are exact.  The core is
:func:`output_difference`, a bisimulation on the product machine that
exploits the fact that, for two maps that agree, the output lag at a given
product configuration is the same on every visit unless both futures from
that configuration are constant.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .fullgroup import Tableau, canonical, invert
from .sft import (
    LCFunction,
    Point,
    TransitionMatrix,
    Word,
    admissible_words,
    closed_walk,
    format_word,
    function_on_code,
    parse_matrix,
    parse_word,
)

Step = tuple[int, Word]


class TransducerError(ValueError):
    pass


class Diverges(RuntimeError):
    """A run produced only finitely many output symbols."""


@dataclass(frozen=True, eq=False)
class Transducer:
    """Deterministic sequential transducer ``X_source -> X_target``.

    ``transitions[q, a] = (q2, w)``.  A transition must exist for exactly those
    symbols that can follow some input history leading to ``q``.
    """

    source: TransitionMatrix
    target: TransitionMatrix
    transitions: Mapping[tuple[int, int], Step]
    initial: int = 0

    def __post_init__(self):
        object.__setattr__(
            self,
            "transitions",
            {k: (q, tuple(w)) for k, (q, w) in sorted(self.transitions.items())},
        )
        self._validate()

    def step(self, q: int, a: int) -> Step:
        try:
            return self.transitions[q, a]
        except KeyError:
            raise ValueError(f"no transition from state {q} on symbol {a}") from None

    @property
    def states(self) -> list[int]:
        return sorted({self.initial} | {q for q, _ in self.transitions} | {q for q, _ in self.transitions.values()})

    @property
    def max_output(self) -> int:
        return max((len(w) for _, w in self.transitions.values()), default=0)

    @cached_property
    def configurations(self) -> dict[tuple[int, int | None], list[tuple[int, int, Word]]]:
        """Reachable ``(state, last input)`` pairs with their outgoing edges."""
        A = self.source
        start = (self.initial, None)
        edges: dict[tuple[int, int | None], list[tuple[int, int, Word]]] = {}
        todo = [start]
        while todo:
            conf = todo.pop()
            if conf in edges:
                continue
            q, last = conf
            out = []
            for a in A.followers(last):
                if (q, a) not in self.transitions:
                    raise TransducerError(f"state {q} has no transition on admissible symbol {a}")
                q2, w = self.transitions[q, a]
                out.append((a, q2, w))
                todo.append((q2, a))
            edges[conf] = out
        return edges

    def _validate(self) -> None:
        A, B = self.source, self.target
        confs = self.configurations
        reachable = {q for q, _ in confs}
        used = {(q, a) for (q, _), es in confs.items() for a, _, _ in es}
        for q, a in self.transitions:
            if q in reachable and (q, a) not in used:
                raise TransducerError(f"transition from state {q} on symbol {a} can never be taken")
        for _, w in self.transitions.values():
            if any(not 1 <= b <= B.n for b in w):
                raise TransducerError(f"output word {w} leaves the target alphabet")
        # outputs must continue the last emitted symbol admissibly
        seen = set()
        todo = [(self.initial, None, None)]
        while todo:
            item = todo.pop()
            if item in seen:
                continue
            seen.add(item)
            q, last_in, last_out = item
            for a, q2, w in confs[q, last_in]:
                if not B.is_admissible(w, after=last_out):
                    raise TransducerError(
                        f"state {q} emits inadmissible {format_word(w, B.n)} after {last_out}"
                    )
                todo.append((q2, a, w[-1] if w else last_out))
        # no reachable cycle of silent edges
        silent = {c: [(q2, a) for a, q2, w in es if not w] for c, es in confs.items()}
        colour: dict = {}
        for root in silent:
            if root in colour:
                continue
            stack = [(root, iter(silent[root]))]
            colour[root] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    colour[node] = 2
                    stack.pop()
                elif colour.get(nxt) == 1:
                    raise TransducerError(f"silent cycle through state {nxt[0]}")
                elif nxt not in colour:
                    colour[nxt] = 1
                    stack.append((nxt, iter(silent[nxt])))

    def feed(self, word: Sequence[int], q: int | None = None) -> tuple[int, Word]:
        q = self.initial if q is None else q
        out: list[int] = []
        for a in word:
            q, w = self.step(q, a)
            out.extend(w)
        return q, tuple(out)

    def __repr__(self) -> str:
        return f"Transducer(states={len(self.states)}, {self.source.n}->{self.target.n} symbols)"


def build(
    source: TransitionMatrix,
    target: TransitionMatrix,
    initial: Hashable,
    step: Callable[[Hashable, int], tuple[Hashable, Sequence[int]]],
) -> Transducer:
    """Explore ``step`` from ``initial`` and number the reachable states.

    States are numbered in breadth-first order, so equal constructions give
    identical machines.
    """
    index: dict[Hashable, int] = {initial: 0}
    labels: list[Hashable] = [initial]
    trans: dict[tuple[int, int], Step] = {}
    queue = deque([(initial, None)])
    seen = {(initial, None)}
    while queue:
        label, last = queue.popleft()
        for a in source.followers(last):
            if (index[label], a) in trans:
                nlabel = labels[trans[index[label], a][0]]
            else:
                nlabel, w = step(label, a)
                if nlabel not in index:
                    index[nlabel] = len(labels)
                    labels.append(nlabel)
                trans[index[label], a] = (index[nlabel], tuple(w))
            if (nlabel, a) not in seen:
                seen.add((nlabel, a))
                queue.append((nlabel, a))
    return Transducer(source, target, trans, 0)


# -- elementary machines -----------------------------------------------------------


def identity(A: TransitionMatrix) -> Transducer:
    return build(A, A, 0, lambda q, a: (0, (a,)))


def relabel(A: TransitionMatrix, B: TransitionMatrix, perm: Mapping[int, int]) -> Transducer:
    """Symbol renaming ``a -> perm[a]``; valid when it carries ``A`` onto ``B``."""
    return build(A, B, 0, lambda q, a: (0, (perm[a],)))


def tableau_transducer(tau: Tableau) -> Transducer:
    """The prefix exchange of ``tau`` as a transducer on its own shift space."""
    c = canonical(tau)
    pairs = c.as_dict()
    A = c.matrix
    if () in pairs:
        return identity(A)

    def step(label, a):
        if label == "copy":
            return "copy", (a,)
        w = label + (a,)
        if w in pairs:
            return "copy", pairs[w]
        return w, ()

    return build(A, A, (), step)


def higher_block_matrix(A: TransitionMatrix) -> tuple[TransitionMatrix, list[Word]]:
    """The 2-block presentation: states are admissible 2-words, in lexicographic order."""
    words = admissible_words(A, 2)
    rows = [[int(u[1] == v[0]) for v in words] for u in words]
    return TransitionMatrix(tuple(tuple(r) for r in rows)), words


def substitution(A: TransitionMatrix, B: TransitionMatrix, images: Mapping[int, Word]) -> Transducer:
    """``x1 x2 ... -> images[x1] images[x2] ...``."""
    return build(A, B, 0, lambda q, a: (0, tuple(images[a])))


def code_parser(B: TransitionMatrix, A: TransitionMatrix, images: Mapping[int, Word]) -> Transducer:
    """Inverse of :func:`substitution` for a prefix code of images."""
    decode = {tuple(w): a for a, w in images.items()}
    stems = {w[:k] for w in decode for k in range(len(w))}

    def step(u, b):
        w = u + (b,)
        if w in decode:
            return (), (decode[w],)
        if w in stems:
            return w, ()
        raise TransducerError(f"{format_word(w, B.n)} does not continue any code word")

    return build(B, A, (), step)


# -- running and composing ----------------------------------------------------------


def run_from(T: Transducer, q: int, p: Point) -> Point:
    """Output of ``T`` started in state ``q`` on the ultimately periodic input ``p``."""
    q, head = T.feed(p.prefix, q)
    out = list(head)
    starts: dict[int, int] = {}
    while q not in starts:
        starts[q] = len(out)
        q, w = T.feed(p.cycle, q)
        out.extend(w)
    i = starts[q]
    if i == len(out):
        raise Diverges(f"no output along the cycle of {p}")
    return Point(tuple(out[:i]), tuple(out[i:]))


def run(T: Transducer, p: Point) -> Point:
    return run_from(T, T.initial, p)


def compose(T2: Transducer, T1: Transducer) -> Transducer:
    """``T2 o T1`` (run ``T1`` first)."""
    if T1.target != T2.source:
        raise ValueError("target of the first machine must be the source of the second")

    def step(label, a):
        q1, q2 = label
        q1, w = T1.step(q1, a)
        q2, u = T2.feed(w, q2)
        return (q1, q2), u

    return build(T1.source, T2.target, (T1.initial, T2.initial), step)


# -- exact comparison of infinite outputs ------------------------------------------

# lag: (side, word).  side 1 means the first stream is ahead by ``word``
# (word + S1 == S2 for the futures S1, S2), side 2 the second; side 0 = in sync.


def _advance(skip1: int, skip2: int, side: int, pend: Word, u: Word, v: Word):
    k = min(skip1, len(u))
    u, skip1 = u[k:], skip1 - k
    k = min(skip2, len(v))
    v, skip2 = v[k:], skip2 - k
    s1 = pend + u if side == 1 else u
    s2 = pend + v if side == 2 else v
    m = min(len(s1), len(s2))
    if s1[:m] != s2[:m]:
        return None
    if len(s1) > m:
        return skip1, skip2, 1, s1[m:]
    if len(s2) > m:
        return skip1, skip2, 2, s2[m:]
    return skip1, skip2, 0, ()


def _forced_tails(lag_a, lag_b) -> tuple[Point, Point] | None:
    """The only futures ``(S1, S2)`` compatible with two different lags, or None."""
    (sa, pa), (sb, pb) = sorted([lag_a, lag_b], key=lambda x: (x[0] == 2, len(x[1])))
    if sa != 2 and sb != 2:
        # pa + S1 == pb + S1
        if pb[: len(pa)] != pa:
            return None
        r = pb[len(pa):]
        return Point((), r), Point(pa, r)
    if sa == 2 and sb == 2:
        if pb[: len(pa)] != pa:
            return None
        r = pb[len(pa):]
        return Point(pa, r), Point((), r)
    # pa + S1 == S2 and S1 == pb + S2
    loop = pb + pa
    return Point((), loop), Point(pa, loop)


def _lag_consistent(lag, z1: Point, z2: Point) -> bool:
    side, pend = lag
    if side == 2:
        return z2.prepend(pend) == z1
    return z1.prepend(pend) == z2


def _tail_mismatch(T: Transducer, q: int, last: int | None, skip: int, z: Point) -> Word | None:
    """Input continuation along which ``T`` from ``q`` fails to output ``z`` (after skipping), or None."""
    A = T.source
    pl, cl = len(z.prefix), len(z.cycle)

    def norm(pos):
        return pos if pos < pl else pl + (pos - pl) % cl

    start = (q, last, -skip)
    paths = {start: ()}
    queue = deque([start])
    while queue:
        conf = queue.popleft()
        q, last, pos = conf
        for a in A.followers(last):
            q2, w = T.step(q, a)
            p2 = pos
            ok = True
            for b in w:
                if p2 >= 0 and z[p2] != b:
                    ok = False
                    break
                p2 = norm(p2 + 1)
            path = paths[conf] + (a,)
            if not ok:
                return path
            nxt = (q2, a, p2)
            if nxt not in paths:
                paths[nxt] = path
                queue.append(nxt)
    return None


def _difference_candidates(
    T1: Transducer, q1: int, out1: Word,
    T2: Transducer, q2: int, out2: Word,
    last: int | None, drop1: int, drop2: int,
) -> list[Word]:
    """Continuations of which at least one separates the two outputs; empty if they agree."""
    A = T1.source
    st = _advance(drop1, drop2, 0, (), out1, out2)
    if st is None:
        return [()]
    key = (q1, q2, last, st[0], st[1])
    seen = {key: ((st[2], st[3]), ())}
    resolved: dict = {}
    queue = deque([key])
    while queue:
        key = queue.popleft()
        if key in resolved:
            continue
        p1, p2, last, s1, s2 = key
        (side, pend), path = seen[key]
        for a in A.followers(last):
            n1, u = T1.step(p1, a)
            n2, v = T2.step(p2, a)
            npath = path + (a,)
            nst = _advance(s1, s2, side, pend, u, v)
            if nst is None:
                return [npath]
            nkey = (n1, n2, a, nst[0], nst[1])
            lag = (nst[2], nst[3])
            if nkey in resolved:
                if not _lag_consistent(lag, *resolved[nkey]):
                    return [npath]
                continue
            if nkey not in seen:
                seen[nkey] = (lag, npath)
                queue.append(nkey)
                continue
            old_lag, old_path = seen[nkey]
            if old_lag == lag:
                continue
            tails = _forced_tails(old_lag, lag)
            if tails is None:
                return [old_path, npath]
            z1, z2 = tails
            for T, q, skip, z in ((T1, n1, nst[0], z1), (T2, n2, nst[1], z2)):
                y = _tail_mismatch(T, q, a, skip, z)
                if y is not None:
                    return [old_path + y, npath + y]
            resolved[nkey] = tails
    return []


def _extend(A: TransitionMatrix, last: int | None, word: Word) -> Point:
    """An ultimately periodic continuation starting with ``word`` (after ``last``)."""
    if not word:
        word = (A.followers(last)[0],)
    return Point(word[:-1], closed_walk(A, word[-1]))


def synchronized_difference(
    T1: Transducer, pre1: Word, T2: Transducer, pre2: Word,
    last: int | None, drop1: int = 0, drop2: int = 0,
) -> Point | None:
    """Compare ``sigma^drop1 T1(pre1 + y)`` with ``sigma^drop2 T2(pre2 + y)`` for all ``y``.

    ``y`` ranges over the sequences admissible after ``last``.  Returns a
    separating ``y`` or None when the two sides agree for every ``y``.
    """
    if T1.source != T2.source or T1.target != T2.target:
        raise ValueError("machines must have the same source and target")
    q1, out1 = T1.feed(pre1)
    q2, out2 = T2.feed(pre2)
    cands = _difference_candidates(T1, q1, out1, T2, q2, out2, last, drop1, drop2)
    for word in cands:
        y = _extend(T1.source, last, word)
        a = run_from(T1, q1, y).prepend(out1).shift(drop1)
        b = run_from(T2, q2, y).prepend(out2).shift(drop2)
        if a != b:
            return y
    if cands:
        raise AssertionError("difference candidates failed to separate the outputs")
    return None


def output_difference(T1: Transducer, T2: Transducer, drop1: int = 0, drop2: int = 0) -> Point | None:
    """A point ``x`` with ``sigma^drop1 T1(x) != sigma^drop2 T2(x)``, or None if there is none."""
    return synchronized_difference(T1, (), T2, (), None, drop1, drop2)


def outputs_equal(T1: Transducer, T2: Transducer, drop1: int = 0, drop2: int = 0) -> bool:
    return output_difference(T1, T2, drop1, drop2) is None


# -- certificates -------------------------------------------------------------------


@dataclass(frozen=True)
class HomeoCertificate:
    forward: Transducer
    backward: Transducer
    name: str = field(default="", compare=False)

    def __post_init__(self):
        f, b = self.forward, self.backward
        if f.source != b.target or f.target != b.source:
            raise TransducerError("backward machine must map X_B back to X_A")

    @property
    def source(self) -> TransitionMatrix:
        return self.forward.source

    @property
    def target(self) -> TransitionMatrix:
        return self.forward.target

    def inverse(self) -> "HomeoCertificate":
        return HomeoCertificate(self.backward, self.forward, f"inv({self.name})")


def compose_certificates(c2: HomeoCertificate, c1: HomeoCertificate) -> HomeoCertificate:
    return HomeoCertificate(
        compose(c2.forward, c1.forward),
        compose(c1.backward, c2.backward),
        f"{c2.name}*{c1.name}",
    )


def identity_certificate(A: TransitionMatrix) -> HomeoCertificate:
    T = identity(A)
    return HomeoCertificate(T, T, "id")


def tableau_certificate(tau: Tableau) -> HomeoCertificate:
    return HomeoCertificate(tableau_transducer(tau), tableau_transducer(invert(tau)), repr(tau))


@dataclass(frozen=True)
class HomeoCheck:
    verified: bool
    witness: Point | None = None
    space: str = ""
    reason: str = ""

    def __bool__(self) -> bool:
        return self.verified


def verify_homeomorphism(c: HomeoCertificate) -> HomeoCheck:
    """Decide whether the two machines are mutually inverse."""
    try:
        x = output_difference(compose(c.backward, c.forward), identity(c.source))
        if x is not None:
            return HomeoCheck(False, x, "A", "backward o forward moves this point")
        y = output_difference(compose(c.forward, c.backward), identity(c.target))
        if y is not None:
            return HomeoCheck(False, y, "B", "forward o backward moves this point")
    except Diverges as exc:
        return HomeoCheck(False, None, "", f"diverges: {exc}")
    return HomeoCheck(True)


# -- orbit equivalence data ----------------------------------------------------------


@dataclass(frozen=True)
class CoeData:
    """Time changes with ``sigma^k1(h(sigma x)) == sigma^l1(h(x))`` and the inverse analogue."""

    k1: LCFunction
    l1: LCFunction
    k2: LCFunction
    l2: LCFunction

    @property
    def c1(self) -> LCFunction:
        return (self.l1 - self.k1).simplify()

    @property
    def c2(self) -> LCFunction:
        return (self.l2 - self.k2).simplify()


def _sample_mismatch(T: Transducer, mu: Word, k: int, l: int, probes: list[Point]) -> bool:
    for y in probes:
        x = y.prepend(mu)
        if run(T, x.shift(1)).shift(k) != run(T, x).shift(l):
            return True
    return False


def cylinder_times(T: Transducer, mu: Word, search_bound: int) -> tuple[int, int] | None:
    """Least ``(k, l)`` (by ``k + l``, then ``k``) with ``sigma^k h(sigma x) == sigma^l h(x)`` on ``U_mu``."""
    A = T.source
    probes = [_extend(A, mu[-1], (b,)) for b in A.followers(mu[-1])]
    for total in range(2 * search_bound + 1):
        for k in range(max(0, total - search_bound), min(total, search_bound) + 1):
            l = total - k
            if _sample_mismatch(T, mu, k, l, probes):
                continue
            if synchronized_difference(T, mu[1:], T, mu, mu[-1], k, l) is None:
                return k, l
    return None


def _time_changes(T: Transducer, search_bound: int, max_depth: int):
    A = T.source
    ks: dict[Word, int] = {}
    ls: dict[Word, int] = {}
    todo = [(a,) for a in A.symbols]
    while todo:
        mu = todo.pop(0)
        found = cylinder_times(T, mu, search_bound)
        if found is not None:
            ks[mu], ls[mu] = found
        elif len(mu) < max_depth:
            todo.extend(mu + (b,) for b in A.followers(mu[-1]))
        else:
            return None
    return function_on_code(A, ks), function_on_code(A, ls)


def extract_coe_data(c: HomeoCertificate, search_bound: int = 8, max_depth: int = 4) -> CoeData | None:
    """Minimal time changes on an adaptively refined cylinder partition.

    Each candidate pair is decided exactly on its cylinder.  Returns None
    (inconclusive) when some cylinder of depth ``max_depth`` has no pair within
    ``search_bound``.
    """
    first = _time_changes(c.forward, search_bound, max_depth)
    if first is None:
        return None
    second = _time_changes(c.backward, search_bound, max_depth)
    if second is None:
        return None
    return CoeData(first[0], first[1], second[0], second[1])


def check_coe_data(c: HomeoCertificate, data: CoeData) -> bool:
    """Re-decide both orbit equations exactly on every cylinder of the data's depth."""
    for T, k, l in ((c.forward, data.k1, data.l1), (c.backward, data.k2, data.l2)):
        d = max(1, k.depth, l.depth)
        for mu in admissible_words(T.source, d):
            if synchronized_difference(T, mu[1:], T, mu, mu[-1], k.value(mu), l.value(mu)) is not None:
                return False
    return True


def psi_h(c: HomeoCertificate, data: CoeData, g: LCFunction) -> LCFunction:
    """Transfer of ``g`` on ``X_B`` to ``X_A`` along ``h`` and its time changes."""
    T, A = c.forward, c.source
    if g.matrix != c.target:
        raise ValueError("g must live on the target shift space")
    depth = max(1, data.k1.depth, data.l1.depth)
    gd = g.depth
    while True:
        table: dict[Word, int] = {}
        for mu in admissible_words(A, depth):
            k, l = data.k1.value(mu), data.l1.value(mu)
            _, hx = T.feed(mu)
            _, hsx = T.feed(mu[1:])
            if (l and len(hx) < l + gd - 1) or (k and len(hsx) < k + gd - 1):
                break
            table[mu] = sum(g.value(hx[i : i + gd]) for i in range(l)) - sum(
                g.value(hsx[j : j + gd]) for j in range(k)
            )
        else:
            return LCFunction.from_table(A, depth, table).simplify()
        depth += 1


def preserves_eventually_periodic(c: HomeoCertificate, sample: Iterable[Point]) -> bool:
    for p in sample:
        for T in (c.forward, c.backward):
            if T.source.is_admissible(p.prefix + p.cycle + p.cycle):
                try:
                    q = run(T, p)
                except Diverges:
                    return False
                if not T.target.is_admissible(q.prefix + q.cycle + q.cycle):
                    return False
    return True


# -- text format -------------------------------------------------------------------


def format_transducer(T: Transducer, a_file: str = "A", b_file: str = "B") -> str:
    lines = [f"transducer A={a_file} B={b_file} states={len(T.states)} initial={T.initial}"]
    for (q, a), (q2, w) in T.transitions.items():
        lines.append(f"{q} {a} -> {q2} {format_word(w, T.target.n)}")
    return "\n".join(lines) + "\n"


def parse_transducer(text: str, load_matrix: Callable[[str], TransitionMatrix]) -> Transducer:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("transducer"):
        raise TransducerError("transducer file must start with a 'transducer' header")
    header = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
    try:
        A = load_matrix(header["A"])
        B = load_matrix(header["B"])
        nstates = int(header["states"])
        initial = int(header["initial"])
    except KeyError as exc:
        raise TransducerError(f"header is missing {exc.args[0]}") from None
    trans: dict[tuple[int, int], Step] = {}
    for ln in lines[1:]:
        lhs, arrow, rhs = ln.partition("->")
        if not arrow:
            raise TransducerError(f"bad transition line {ln!r}")
        q, a = lhs.split()
        q2, w = rhs.split()
        q, a, q2 = int(q), int(a), int(q2)
        if not (0 <= q < nstates and 0 <= q2 < nstates):
            raise TransducerError(f"state out of range in {ln!r}")
        if (q, a) in trans:
            raise TransducerError(f"duplicate transition for state {q} symbol {a}")
        trans[q, a] = (q2, parse_word(w, B.n))
    return Transducer(A, B, trans, initial)


def load_transducer(path: str | Path) -> Transducer:
    path = Path(path)

    def load(name: str) -> TransitionMatrix:
        return parse_matrix((path.parent / name).read_text())

    return parse_transducer(path.read_text(), load)

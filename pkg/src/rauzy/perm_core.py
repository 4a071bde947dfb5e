"""Permutations in one-line form, edge colorings and edge-level surgery.

A permutation of size n is drawn as n edges joining bottom point i to top
point sigma(i).  Arcs are the gaps between consecutive points on one row;
arc a sits between points a and a+1, so a runs over 1..n-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

SIZE_LIMIT = 64

TOP = "top"
BOTTOM = "bottom"


class PermError(ValueError):
    pass


class ParseError(PermError):
    pass


class GrayAtBoundary(PermError):
    pass


class NotSingleGray(PermError):
    pass


class ArcOutOfRange(PermError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    """An element of S_n stored as the tuple (sigma(1), ..., sigma(n))."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.mapping)
        object.__setattr__(self, "mapping", m)
        n = len(m)
        if n < 1:
            raise PermError("empty permutation")
        if n > SIZE_LIMIT:
            raise PermError(f"size {n} exceeds limit {SIZE_LIMIT}")
        if sorted(m) != list(range(1, n + 1)):
            raise PermError(f"not a bijection on 1..{n}: {m}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i - 1]

    def __len__(self) -> int:
        return len(self.mapping)

    def __iter__(self):
        return iter(self.mapping)

    @cached_property
    def inverse_mapping(self) -> tuple[int, ...]:
        inv = [0] * self.n
        for i, v in enumerate(self.mapping, 1):
            inv[v - 1] = i
        return tuple(inv)

    def inv(self, v: int) -> int:
        return self.inverse_mapping[v - 1]

    def inverse(self) -> "Permutation":
        return Permutation(self.inverse_mapping)

    def __str__(self) -> str:
        return " ".join(map(str, self.mapping))

    def __repr__(self) -> str:
        return f"Permutation([{','.join(map(str, self.mapping))}])"


@dataclass(frozen=True)
class ArcRef:
    side: str
    position: int

    def __post_init__(self):
        if self.side not in (TOP, BOTTOM):
            raise PermError(f"bad arc side {self.side!r}")


@dataclass(frozen=True)
class EdgeColoring:
    """Edges of `host` split into gray (listed by bottom position) and black."""

    host: Permutation
    gray_set: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        g = frozenset(int(x) for x in self.gray_set)
        object.__setattr__(self, "gray_set", g)
        if not all(1 <= x <= self.host.n for x in g):
            raise PermError("gray position out of range")

    @property
    def black_set(self) -> frozenset[int]:
        return frozenset(range(1, self.host.n + 1)) - self.gray_set


def _check_arc(a: ArcRef, side: str, n: int) -> None:
    if a.side != side or not 1 <= a.position <= n - 1:
        raise ArcOutOfRange(f"{a} is not a {side} arc of a size-{n} permutation")


# -- predicates ------------------------------------------------------------


def is_irreducible_tuple(t: Sequence[int]) -> bool:
    n = len(t)
    mn = n + 1
    for k in range(1, n):
        mn = min(mn, t[k - 1])
        # the first k values form {n-k+1..n} iff their minimum is n-k+1
        if mn == n - k + 1:
            return False
    return True


def is_irreducible(p: Permutation) -> bool:
    return is_irreducible_tuple(p.mapping)


def is_standard(p: Permutation) -> bool:
    return p(1) == 1 and is_irreducible(p)


# -- surgery ---------------------------------------------------------------


def restrict(p: Permutation | Sequence[int], keep: Iterable[int]) -> tuple[int, ...]:
    """Pattern induced by the edges at the given bottom positions."""
    m = p.mapping if isinstance(p, Permutation) else tuple(p)
    pos = sorted(set(keep))
    vals = [m[i - 1] for i in pos]
    rank = {v: r for r, v in enumerate(sorted(vals), 1)}
    return tuple(rank[v] for v in vals)


def insert_raw(t: Sequence[int], m: int, alpha: int, beta: int) -> tuple[int, ...]:
    """Insert m parallel edges after bottom point beta and top point alpha.

    alpha and beta may be 0 (left of everything) or len(t) (right of
    everything); `insert` restricts them to genuine arcs.
    """
    out = [v + m if v > alpha else v for v in t[:beta]]
    out.extend(alpha + k for k in range(1, m + 1))
    out.extend(v + m if v > alpha else v for v in t[beta:])
    return tuple(out)


def insert(tau: Permutation, m: int, alpha: ArcRef, beta: ArcRef) -> Permutation:
    _check_arc(alpha, TOP, tau.n)
    _check_arc(beta, BOTTOM, tau.n)
    if m < 1:
        raise PermError("must insert at least one edge")
    return Permutation(insert_raw(tau.mapping, m, alpha.position, beta.position))


def reduce(c: EdgeColoring) -> tuple[Permutation, ArcRef, ArcRef]:
    """Reduction of a one-gray coloring together with the arcs holding the gray edge."""
    if len(c.gray_set) != 1:
        raise NotSingleGray(f"expected one gray edge, got {len(c.gray_set)}")
    (i,) = c.gray_set
    n = c.host.n
    j = c.host(i)
    if i in (1, n) or j in (1, n):
        raise GrayAtBoundary(f"gray edge ({i},{j}) has an endpoint at a corner")
    tau = Permutation(restrict(c.host, c.black_set))
    return tau, ArcRef(TOP, j - 1), ArcRef(BOTTOM, i - 1)


def remove_edge(t: Sequence[int], i: int) -> tuple[int, ...]:
    """Drop the edge at bottom position i and relabel."""
    j = t[i - 1]
    return tuple(v - 1 if v > j else v for k, v in enumerate(t, 1) if k != i)


def d_map_tuple(t: Sequence[int]) -> tuple[int, ...]:
    return tuple(v - 1 for v in t if v != 1)


def d_map(p: Permutation) -> Permutation:
    if p.n < 2:
        raise PermError("d needs n >= 2")
    return Permutation(d_map_tuple(p.mapping))


def prepend_one_tuple(t: Sequence[int]) -> tuple[int, ...]:
    return (1,) + tuple(v + 1 for v in t)


def prepend_one(tau: Permutation) -> Permutation:
    return Permutation(prepend_one_tuple(tau.mapping))


def rotate_tuple(t: Sequence[int]) -> tuple[int, ...]:
    """Half-turn of the diagram: sigma -> w sigma^-1 w with w(i) = n+1-i."""
    n = len(t)
    inv = [0] * n
    for i, v in enumerate(t, 1):
        inv[v - 1] = i
    return tuple(n + 1 - inv[n - x] for x in range(1, n + 1))


def reverse_values(n: int) -> tuple[int, ...]:
    return tuple(range(n, 0, -1))


# -- text I/O --------------------------------------------------------------


def parse(text: str) -> Permutation:
    """One-line notation, commas or whitespace; brackets and a compact
    digit string like "[41583627]" are accepted for n <= 9."""
    s = text.strip().strip("[]()").replace(",", " ")
    toks = s.split()
    if len(toks) == 1 and len(toks[0]) > 1 and toks[0].isdigit():
        toks = list(toks[0])
    try:
        vals = tuple(int(x) for x in toks)
    except ValueError as exc:
        raise ParseError(f"cannot read permutation from {text!r}") from exc
    try:
        return Permutation(vals)
    except PermError as exc:
        raise ParseError(str(exc)) from exc


def parse_colored(text: str) -> EdgeColoring:
    """Read "g:3,5 | 4 1 5 8 3 6 2 7"; the gray prefix is optional."""
    s = text.strip()
    gray: list[int] = []
    if s.startswith("g:"):
        head, sep, rest = s.partition("|")
        if not sep:
            raise ParseError("gray prefix must be followed by '|'")
        try:
            gray = [int(x) for x in head[2:].replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"bad gray list in {text!r}") from exc
        s = rest
    p = parse(s)
    try:
        return EdgeColoring(p, frozenset(gray))
    except PermError as exc:
        raise ParseError(str(exc)) from exc


def render(p: Permutation) -> str:
    return str(p)


def render_colored(c: EdgeColoring) -> str:
    if not c.gray_set:
        return render(c.host)
    return "g:" + ",".join(map(str, sorted(c.gray_set))) + " | " + render(c.host)


def render_grid(p: Permutation, gray: Iterable[int] = ()) -> str:
    """Matrix picture with a bullet at (i, sigma(i)); top value on the top row."""
    g = set(gray)
    n = p.n
    rows = []
    for v in range(n, 0, -1):
        i = p.inv(v)
        cells = ["o" if (k == i and k in g) else "*" if k == i else "." for k in range(1, n + 1)]
        rows.append(f"{v:>3} " + " ".join(cells))
    return "\n".join(rows)


def report(c: EdgeColoring | Permutation) -> str:
    """Line-oriented key/value record with fields n, mapping, gray."""
    if isinstance(c, Permutation):
        c = EdgeColoring(c)
    lines = [
        f"n: {c.host.n}",
        f"mapping: {render(c.host)}",
        "gray: " + " ".join(map(str, sorted(c.gray_set))),
    ]
    return "\n".join(lines)

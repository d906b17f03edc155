"""Simple matroids given by circuits, and their lattices of flats.

Element sets are Python ints used as bitmasks over the 0-based ground set
``0..n-1``.  Conversions to and from 1-based lists happen only at the I/O
boundary (:mod:`mres.io`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .linalg import QQ, ExactMatrix, rank_of

MAX_GROUND = 16
MAX_FLATS = 200_000


class MatroidError(ValueError):
    """Invalid matroid data (non-simple input, failed axiom, bad flat)."""


class ResourceError(RuntimeError):
    """A computation exceeded its configured size budget."""


# ---------------------------------------------------------------- bit helpers


def mask_of(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


def elems_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# ---------------------------------------------------------------- matroid


class Matroid:
    """A simple matroid on ``{0..n-1}`` determined by its circuits.

    Args:
        n: Ground-set size.
        circuits: Minimal dependent sets, as bitmasks or element iterables.
        kind: Construction tag (``circuits``, ``uniform``, ``graphic``,
            ``realization``, ``lines``, or a derived tag such as ``sum``).
        labels: Optional display labels, one per element.
        check: Verify the circuit axioms (used for raw circuit input).

    Raises:
        MatroidError: On non-simple input or a failed circuit axiom.
    """

    def __init__(self, n: int, circuits: Iterable, kind: str = "circuits",
                 labels: Sequence[str] | None = None, check: bool = False):
        if n < 0 or n > MAX_GROUND:
            raise ResourceError(f"ground set of size {n} exceeds the limit {MAX_GROUND}")
        cs = set()
        for c in circuits:
            m = c if isinstance(c, int) else mask_of(c)
            if m >> n:
                raise MatroidError(f"circuit {sorted(elems_of(m))} leaves the ground set")
            cs.add(m)
        small = [c for c in cs if popcount(c) <= 2]
        if small:
            raise MatroidError(f"not simple: dependent set {list(elems_of(small[0]))}")
        self.n = n
        self.circuits: tuple[int, ...] = tuple(sorted(cs, key=lambda c: (popcount(c), elems_of(c))))
        self.kind = kind
        self.labels = tuple(labels) if labels is not None else tuple(str(i + 1) for i in range(n))
        if len(self.labels) != n:
            raise MatroidError("label count differs from ground-set size")
        self._by_elem: list[tuple[int, ...]] = [
            tuple(c for c in self.circuits if c >> e & 1) for e in range(n)]
        self._rank_memo: dict[int, int] = {}
        if check:
            self._check_axioms()
        self.full = (1 << n) - 1
        self.rank = self.rank_of_set(self.full)

    def _check_axioms(self) -> None:
        cs = self.circuits
        for a, b in combinations(cs, 2):
            if a & b == a or a & b == b:
                raise MatroidError(
                    f"circuit {_fmt(a)} contains circuit {_fmt(b)}" if a & b == b else
                    f"circuit {_fmt(b)} contains circuit {_fmt(a)}")
        for a, b in combinations(cs, 2):
            common = a & b
            union = a | b
            for e in elems_of(common):
                target = union & ~(1 << e)
                if not any(c & target == c for c in cs):
                    raise MatroidError(
                        f"circuit elimination fails for {_fmt(a)} and {_fmt(b)} at {e + 1}")

    def __repr__(self) -> str:
        return f"Matroid(n={self.n}, rank={self.rank}, circuits={len(self.circuits)}, kind={self.kind!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Matroid) and self.n == other.n and set(self.circuits) == set(other.circuits)

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.circuits)))

    # -- independence, rank, closure

    def is_independent(self, s: int) -> bool:
        return not any(c & s == c for c in self.circuits)

    def rank_of_set(self, s: int) -> int:
        """Size of a largest independent subset, by greedy growth."""
        r = self._rank_memo.get(s)
        if r is not None:
            return r
        ind = 0
        size = 0
        rest = s
        while rest:
            e = lowest(rest)
            rest &= rest - 1
            cand = ind | (1 << e)
            if not any(c & cand == c for c in self._by_elem[e]):
                ind = cand
                size += 1
        self._rank_memo[s] = size
        return size

    def closure(self, s: int) -> int:
        """Closure: ``s`` plus every ``e`` completing a circuit inside ``s + e``."""
        out = s
        for c in self.circuits:
            rest = c & ~s
            if rest and rest & (rest - 1) == 0:
                out |= rest
        return out

    def is_flat(self, s: int) -> bool:
        return self.closure(s) == s

    # -- structure

    def is_connected(self) -> bool:
        """True iff every two elements share a circuit (n <= 1 counts as connected)."""
        return len(self.components()) <= 1

    def components(self) -> list[int]:
        """Connected components as bitmasks, ordered by smallest element."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for c in self.circuits:
            es = elems_of(c)
            for e in es[1:]:
                ra, rb = find(es[0]), find(e)
                if ra != rb:
                    parent[rb] = ra
        comps: dict[int, int] = {}
        for e in range(self.n):
            comps[find(e)] = comps.get(find(e), 0) | (1 << e)
        return sorted(comps.values(), key=lowest)

    def restriction(self, s: int, kind: str = "restriction") -> Matroid:
        """Matroid on ``s`` (relabelled ``0..|s|-1`` in increasing order)."""
        es = elems_of(s)
        pos = {e: i for i, e in enumerate(es)}
        cs = [mask_of(pos[e] for e in elems_of(c)) for c in self.circuits if c & s == c]
        return Matroid(len(es), cs, kind, [self.labels[e] for e in es])

    def localization(self, x: int) -> Matroid:
        """Localization at a flat ``x``: the circuits contained in ``x``."""
        if not self.is_flat(x):
            raise MatroidError(f"{_fmt(x)} is not a flat")
        return self.restriction(x, "localization")

    def is_line_closed(self, s: int) -> bool:
        """True iff every rank-2 flat of the restriction to ``s`` is closed in M."""
        # the restricted line through a, b is L & s, whose closure in M is L
        es = elems_of(s)
        for a, b in combinations(es, 2):
            line = self.closure((1 << a) | (1 << b))
            if line & s != line:
                return False
        return True


def _fmt(mask: int) -> str:
    return "{" + ",".join(str(e + 1) for e in elems_of(mask)) + "}"


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    """Direct sum; elements of ``m2`` are shifted by ``m1.n``."""
    cs = list(m1.circuits) + [c << m1.n for c in m2.circuits]
    return Matroid(m1.n + m2.n, cs, "sum", m1.labels + m2.labels)


# ---------------------------------------------------------------- constructors


def from_circuits(n: int, circuits: Iterable[Iterable[int]], labels=None) -> Matroid:
    """Matroid from 0-based circuits, verifying the circuit axioms."""
    return Matroid(n, circuits, "circuits", labels, check=True)


def uniform(r: int, n: int) -> Matroid:
    """Uniform matroid U_{r,n}: every (r+1)-subset is a circuit."""
    if not 0 <= r <= n:
        raise MatroidError(f"uniform({r},{n}) needs 0 <= r <= n")
    if r < 2 and n > r:
        raise MatroidError(f"uniform({r},{n}) is not simple")
    return Matroid(n, (mask_of(c) for c in combinations(range(n), r + 1)), "uniform")


def graphic(vertices: int, edges: Sequence[tuple[int, int]]) -> Matroid:
    """Cycle matroid of a simple graph on vertices ``0..vertices-1``.

    Circuits are edge sets of simple cycles.
    """
    seen = set()
    for u, v in edges:
        if u == v:
            raise MatroidError("graph has a loop")
        if not (0 <= u < vertices and 0 <= v < vertices):
            raise MatroidError(f"edge ({u},{v}) uses an unknown vertex")
        key = frozenset((u, v))
        if key in seen:
            raise MatroidError("graph has parallel edges")
        seen.add(key)
    m = len(edges)
    if m > MAX_GROUND:
        raise ResourceError(f"{m} edges exceed the limit {MAX_GROUND}")
    circuits = []
    for k in range(3, min(m, vertices) + 1):
        for sub in combinations(range(m), k):
            if _is_cycle([edges[i] for i in sub]):
                circuits.append(mask_of(sub))
    return Matroid(m, circuits, "graphic", [f"{u + 1}{v + 1}" if vertices < 10 else f"{u + 1}-{v + 1}"
                                             for u, v in edges])


def _is_cycle(es: list[tuple[int, int]]) -> bool:
    deg: dict[int, list[int]] = {}
    for u, v in es:
        deg.setdefault(u, []).append(v)
        deg.setdefault(v, []).append(u)
    if any(len(nb) != 2 for nb in deg.values()) or len(deg) != len(es):
        return False
    start = es[0][0]
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in deg[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(deg)


def complete_graph_edges(k: int) -> list[tuple[int, int]]:
    return list(combinations(range(k), 2))


def realization(matrix: Sequence[Sequence]) -> Matroid:
    """Matroid of the columns of a rational matrix (columns are the points)."""
    rows = [[Fraction(x) for x in r] for r in matrix]
    if not rows:
        raise MatroidError("empty realization matrix")
    n = len(rows[0])
    if n > MAX_GROUND:
        raise ResourceError(f"{n} columns exceed the limit {MAX_GROUND}")

    def col_rank(sub):
        if not sub:
            return 0
        return rank_of(ExactMatrix.from_rows([[r[j] for j in sub] for r in rows], QQ))

    total = col_rank(range(n))
    circuits: list[int] = []
    for k in range(1, total + 2):
        for sub in combinations(range(n), k):
            s = mask_of(sub)
            if any(c & s == c for c in circuits):
                continue
            if col_rank(sub) < k:
                if k <= 2:
                    raise MatroidError(f"not simple: columns {[j + 1 for j in sub]} are dependent")
                circuits.append(s)
    return Matroid(n, circuits, "realization")


def from_lines(n: int, lines: Sequence[Iterable[int]]) -> Matroid:
    """Rank-3 matroid from a point-line incidence (0-based points).

    Circuits are the 3-subsets of a line and the 4-subsets that contain no
    collinear triple.

    Raises:
        MatroidError: If two lines share more than one point.
    """
    ls = [mask_of(l) for l in lines]
    for a in ls:
        if a >> n:
            raise MatroidError(f"line {_fmt(a)} leaves the ground set")
    for a, b in combinations(ls, 2):
        if popcount(a & b) > 1:
            raise MatroidError(f"lines {_fmt(a)} and {_fmt(b)} share more than one point")
    triples = set()
    for l in ls:
        for t in combinations(elems_of(l), 3):
            triples.add(mask_of(t))
    circuits = set(triples)
    for q in combinations(range(n), 4):
        qm = mask_of(q)
        if not any(t & qm == t for t in triples):
            circuits.add(qm)
    return Matroid(n, circuits, "lines")


# ---------------------------------------------------------------- lattice


@dataclass(frozen=True)
class Flat:
    """A flat with its rank, Moebius value and lattice flags."""

    mask: int
    rank: int
    mobius: int
    irreducible: bool
    modular: bool
    connected: bool

    @property
    def elements(self) -> tuple[int, ...]:
        return elems_of(self.mask)

    @property
    def size(self) -> int:
        return popcount(self.mask)


@dataclass
class FlatLattice:
    """Lattice of flats grouped by rank, with covers and per-flat data."""

    matroid: Matroid
    levels: list[list[Flat]]
    upper_covers: dict[int, tuple[int, ...]]
    by_mask: dict[int, Flat] = field(default_factory=dict)

    def __post_init__(self):
        self.by_mask = {f.mask: f for lev in self.levels for f in lev}

    @property
    def rank(self) -> int:
        return len(self.levels) - 1

    def flats(self, k: int | None = None) -> list[Flat]:
        if k is None:
            return [f for lev in self.levels for f in lev]
        return list(self.levels[k]) if 0 <= k < len(self.levels) else []

    def join(self, x: int, y: int) -> int:
        return self.matroid.closure(x | y)

    def meet(self, x: int, y: int) -> int:
        return x & y

    def is_irreducible(self, x: int, mode: str = "strict") -> bool:
        """Irreducibility predicate.

        ``strict`` is the meet criterion (a flat that is not the intersection
        of the flats strictly above it; the top element counts as
        irreducible since no other flats meet to it).  ``lenient`` adds every
        rank-2 flat.  ``connected`` asks that the localization be connected.
        """
        f = self.by_mask[x]
        if mode == "strict":
            return f.irreducible
        if mode == "lenient":
            return f.irreducible or f.rank == 2
        if mode == "connected":
            return f.connected
        raise ValueError(f"unknown irreducibility mode {mode!r}")

    def supersolvable_chain(self) -> list[int] | None:
        """A maximal chain of modular flats, or ``None`` (depth-first search)."""
        r = self.rank

        def dfs(chain):
            x = chain[-1]
            if self.by_mask[x].rank == r:
                return chain
            for y in self.upper_covers[x]:
                if self.by_mask[y].modular:
                    got = dfs(chain + [y])
                    if got:
                        return got
            return None

        return dfs([0])

    def is_supersolvable(self) -> bool:
        return self.supersolvable_chain() is not None

    def characteristic_mobius_sums(self) -> list[int]:
        return [sum(f.mobius for f in lev) for lev in self.levels]


def build_flat_lattice(m: Matroid) -> FlatLattice:
    """Enumerate all flats by closure of one-element extensions.

    Raises:
        ResourceError: If the flat count exceeds ``MAX_FLATS``.
    """
    cached = getattr(m, "_lattice", None)
    if cached is not None:
        return cached
    levels_masks: list[list[int]] = [[m.closure(0)]]
    total = 1
    while True:
        nxt: set[int] = set()
        for x in levels_masks[-1]:
            rest = m.full & ~x
            while rest:
                e = lowest(rest)
                rest &= rest - 1
                nxt.add(m.closure(x | (1 << e)))
        if not nxt:
            break
        total += len(nxt)
        if total > MAX_FLATS:
            raise ResourceError(f"more than {MAX_FLATS} flats")
        levels_masks.append(sorted(nxt, key=elems_of))
    rank_of_mask = {x: k for k, lev in enumerate(levels_masks) for x in lev}
    all_masks = [x for lev in levels_masks for x in lev]

    covers: dict[int, tuple[int, ...]] = {}
    for k, lev in enumerate(levels_masks):
        above = levels_masks[k + 1] if k + 1 < len(levels_masks) else []
        for x in lev:
            covers[x] = tuple(y for y in above if y & x == x)

    mob: dict[int, int] = {}
    for k, lev in enumerate(levels_masks):
        for x in lev:
            if k == 0:
                mob[x] = 1
            else:
                mob[x] = -sum(mob[y] for j in range(k) for y in levels_masks[j] if y & x == y)

    top = m.full
    modular = {}
    for x in all_masks:
        rx = rank_of_mask[x]
        modular[x] = all(
            rx + rank_of_mask[y] == rank_of_mask[m.closure(x | y)] + rank_of_mask[x & y]
            for y in all_masks)

    levels: list[list[Flat]] = []
    for k, lev in enumerate(levels_masks):
        row = []
        for x in lev:
            if x == top:
                irr = True
            else:
                meet = top
                for y in covers[x]:
                    meet &= y
                irr = meet != x
            conn = popcount(x) <= 1 or m.restriction(x).is_connected()
            row.append(Flat(x, k, mob[x], irr, modular[x], conn))
        levels.append(row)
    lat = FlatLattice(m, levels, covers)
    m._lattice = lat
    return lat


def is_supersolvable(m: Matroid) -> tuple[bool, list[tuple[int, ...]] | None]:
    """Supersolvability with a witness chain of modular flats (0-based)."""
    chain = build_flat_lattice(m).supersolvable_chain()
    if chain is None:
        return False, None
    return True, [elems_of(x) for x in chain]

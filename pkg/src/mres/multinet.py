"""Multinets on matroids: verification, search, refinement, Latin squares.

A multinet is a partition of the ground set into ``k >= 3`` parts with
positive multiplicities.  Every part has the same weight ``d``.  The base
locus is the set of rank-2 flats spanned by points in different parts.  On
each base-locus flat every part carries the same weight ``n_X``.  Finally,
two points of one part must be joined by a path whose steps span flats
outside the base locus.

Two semantics modes decide which rank-2 flats count.

``strict``
    The irreducible rank-2 flats are those given by the lattice meet
    criterion.  A cross-part span that is not irreducible violates the
    axioms.  Every part must meet each base-locus flat.

``lenient`` (default)
    Any rank-2 cross-part span is allowed.  Only irreducible spans enter the
    base locus, where irreducible means connected or meet-irreducible.  The
    order condition only involves the parts that meet the flat.

In both modes the connecting paths step along irreducible flats outside
the base locus.  For rank-3 matroids every rank-2 flat is meet-irreducible,
so the two modes agree with the usual definition there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, permutations
from typing import Sequence

from .linalg import QQ, ExactMatrix, Ring, rank_of
from .matroid import (
    Matroid, ResourceError, build_flat_lattice, elems_of, from_lines, mask_of, popcount,
)
from .os_algebra import ConsistencyError

MODES = ("strict", "lenient")
SEARCH_BUDGET = 10**7


class MultinetViolation(ValueError):
    """A multinet axiom fails.

    Attributes:
        condition: ``"1"``..``"4"``, ``"parts"`` or ``"multiplicity"``.
        witness: Elements or flats (0-based) exhibiting the failure.
    """

    def __init__(self, condition: str, message: str, witness=None):
        super().__init__(f"condition ({condition}): {message}")
        self.condition = condition
        self.witness = witness


@dataclass
class Multinet:
    """A verified (weak) multinet.

    Attributes:
        matroid: The underlying matroid.
        parts: Parts as sorted tuples of 0-based elements.
        mult: Multiplicity of each element.
        d: Common part weight.
        base_locus: Base-locus flats as bitmasks, sorted.
        orders: ``n_X`` for each base-locus flat.
        mode: Semantics mode used for verification.
        connected: Whether condition (4) holds (a full multinet).
    """

    matroid: Matroid
    parts: tuple[tuple[int, ...], ...]
    mult: tuple[int, ...]
    d: int
    base_locus: tuple[int, ...]
    orders: dict[int, int] = field(default_factory=dict)
    mode: str = "lenient"
    connected: bool = True

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def is_weak_only(self) -> bool:
        return not self.connected

    @property
    def reduced(self) -> bool:
        return all(x == 1 for x in self.mult)

    @property
    def is_net(self) -> bool:
        return self.connected and all(v == 1 for v in self.orders.values())

    def key(self) -> tuple:
        """Canonical form: unordered parts, multiplicities after gcd scaling."""
        g = reduce(math.gcd, self.mult)
        return (frozenset(frozenset(p) for p in self.parts),
                tuple(x // g for x in self.mult))

    def as_dict(self) -> dict:
        return {
            "k": self.k, "d": self.d, "mode": self.mode,
            "parts": [[u + 1 for u in p] for p in self.parts],
            "multiplicities": list(self.mult),
            "base_locus": [[u + 1 for u in elems_of(x)] for x in self.base_locus],
            "orders": [self.orders[x] for x in self.base_locus],
            "multinet": self.connected, "reduced": self.reduced, "net": self.is_net,
        }


# ---------------------------------------------------------------- verification


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown semantics mode {mode!r}; expected one of {MODES}")


def _irreducible(lat, x: int, mode: str) -> bool:
    if mode == "strict":
        return lat.is_irreducible(x, "strict")
    return lat.is_irreducible(x, "strict") or lat.is_irreducible(x, "connected")


def _part_graph_components(m: Matroid, lat, part: Sequence[int], base: set[int], mode: str):
    """Components of a part under steps whose span is irreducible and off the base locus."""
    parent = {u: u for u in part}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in combinations(part, 2):
        span = m.closure((1 << u) | (1 << v))
        if span not in base and _irreducible(lat, span, mode):
            parent[find(v)] = find(u)
    comps: dict[int, list[int]] = {}
    for u in part:
        comps.setdefault(find(u), []).append(u)
    return sorted((tuple(sorted(c)) for c in comps.values()), key=lambda c: c[0])


def verify_multinet(m: Matroid, partition: Sequence[Sequence[int]],
                    mult: Sequence[int] | None = None, mode: str = "lenient") -> Multinet:
    """Check conditions (1)-(3), then classify by condition (4).

    Args:
        m: The matroid.
        partition: Parts as lists of 0-based elements.
        mult: Multiplicities (all 1 when omitted).
        mode: ``lenient`` or ``strict``.

    Returns:
        The multinet; ``connected`` is False for a weak multinet.

    Raises:
        MultinetViolation: If conditions (1)-(3) or the input shape fail.
    """
    _check_mode(mode)
    n = m.n
    parts = [tuple(sorted(p)) for p in partition]
    seen = sorted(u for p in parts for u in p)
    if seen != list(range(n)):
        raise MultinetViolation("parts", "the parts must partition the ground set", seen)
    if len(parts) < 3 or any(not p for p in parts):
        raise MultinetViolation("parts", "need at least three non-empty parts", len(parts))
    mult = tuple(mult) if mult is not None else (1,) * n
    if len(mult) != n or any(x < 1 for x in mult):
        raise MultinetViolation("multiplicity", "multiplicities must be positive integers")
    if reduce(math.gcd, mult) != 1:
        raise MultinetViolation("multiplicity", "multiplicities must have gcd 1", list(mult))
    sums = [sum(mult[u] for u in p) for p in parts]
    if len(set(sums)) != 1:
        bad = next(i for i, s in enumerate(sums) if s != sums[0])
        raise MultinetViolation("1", f"part weights {sums} differ", [list(parts[0]), list(parts[bad])])
    d = sums[0]
    lat = build_flat_lattice(m)
    owner = {u: i for i, p in enumerate(parts) for u in p}
    base: set[int] = set()
    for u, v in combinations(range(n), 2):
        if owner[u] == owner[v]:
            continue
        span = m.closure((1 << u) | (1 << v))
        if _irreducible(lat, span, mode):
            base.add(span)
        elif mode == "strict":
            raise MultinetViolation("2", "cross-part span is not an irreducible rank-2 flat",
                                    list(elems_of(span)))
    orders = {}
    for x in sorted(base, key=elems_of):
        weights = [0] * len(parts)
        for u in elems_of(x):
            weights[owner[u]] += mult[u]
        present = [w for w in weights if w] if mode == "lenient" else weights
        if len(set(present)) != 1:
            raise MultinetViolation("3", f"part weights {weights} on a base-locus flat",
                                    list(elems_of(x)))
        orders[x] = present[0]
    connected = all(len(_part_graph_components(m, lat, p, base, mode)) == 1 for p in parts)
    return Multinet(m, tuple(parts), mult, d, tuple(sorted(base, key=elems_of)), orders, mode, connected)


# ---------------------------------------------------------------- identities


@dataclass
class IdentityReport:
    """The three numerical identities of a multinet.

    Attributes:
        total_weight: ``(sum m_u, k d)``.
        point_orders: Elements where ``sum_{X containing u} n_X != d``.
        square_sum: ``(sum n_X^2, d^2)``.
    """

    total_weight: tuple[int, int]
    point_orders: dict[int, int]
    square_sum: tuple[int, int]

    @property
    def holds(self) -> bool:
        return (self.total_weight[0] == self.total_weight[1] and not self.point_orders
                and self.square_sum[0] == self.square_sum[1])

    def as_dict(self) -> dict:
        return {"total_weight": list(self.total_weight),
                "point_order_failures": {str(u + 1): v for u, v in self.point_orders.items()},
                "square_sum": list(self.square_sum), "holds": self.holds}


def multinet_identities(net: Multinet) -> IdentityReport:
    """Evaluate identities (i)-(iii); they are theorems for genuine multinets."""
    bad = {}
    for u in range(net.matroid.n):
        s = sum(v for x, v in net.orders.items() if x >> u & 1)
        if s != net.d:
            bad[u] = s
    return IdentityReport((sum(net.mult), net.k * net.d), bad,
                          (sum(v * v for v in net.orders.values()), net.d * net.d))


def rh_check(net: Multinet) -> tuple[bool, int]:
    """Both sides of the Riemann-Hurwitz type inequality; returns ``(holds, slack)``."""
    lat = build_flat_lattice(net.matroid)
    base = set(net.base_locus)
    lhs = 3 + len(base)
    off = sum(f.size - 1 for f in lat.flats(2) if f.mask not in base)
    rhs = 2 * net.matroid.n - (net.k - 2) * (3 * net.d - sum(net.orders.values())) - off
    return lhs >= rhs, lhs - rhs


def refine_weak(net: Multinet) -> Multinet:
    """Split every part into its path components; base locus must not change.

    Raises:
        ConsistencyError: If the refinement fails to verify or moves the base locus.
    """
    m = net.matroid
    lat = build_flat_lattice(m)
    base = set(net.base_locus)
    parts = []
    for p in net.parts:
        parts.extend(_part_graph_components(m, lat, p, base, net.mode))
    parts.sort(key=lambda c: c[0])
    try:
        out = verify_multinet(m, parts, net.mult, net.mode)
    except MultinetViolation as exc:
        raise ConsistencyError(f"refinement does not verify: {exc}") from exc
    if set(out.base_locus) != base:
        raise ConsistencyError("refinement changed the base locus")
    if not out.connected:
        raise ConsistencyError("refinement is still disconnected")
    return out


# ---------------------------------------------------------------- search


def search_multinets(m: Matroid, k: int, m_max: int = 1, mode: str = "lenient",
                     budget: int = SEARCH_BUDGET, include_weak: bool = False) -> list[Multinet]:
    """All ``k``-multinets with multiplicities at most ``m_max``, up to part order.

    Partitions are canonical: element 0 lies in part 0 and parts are opened
    in order of their least element.  Branches die as soon as a part weight
    exceeds ``d``, a completed flat breaks the order condition, or (strict
    mode) a cross-part span is reducible.

    Raises:
        ResourceError: If more than ``budget`` search nodes are needed.
    """
    _check_mode(mode)
    if k < 3:
        raise ValueError("multinets have at least three parts")
    n = m.n
    if n < k:
        return []
    lat = build_flat_lattice(m)
    lines = [f.mask for f in lat.flats(2)] if m.rank >= 2 else []
    irr = {x: _irreducible(lat, x, mode) for x in lines}
    closing: list[list[int]] = [[] for _ in range(n)]
    for x in lines:
        closing[max(elems_of(x))].append(x)
    found: dict[tuple, Multinet] = {}
    nodes = 0
    part = [-1] * n
    mult = [0] * n

    def flat_ok(x: int, nparts: int) -> bool:
        weights: dict[int, int] = {}
        for u in elems_of(x):
            weights[part[u]] = weights.get(part[u], 0) + mult[u]
        if len(weights) < 2:
            return True
        if not irr[x]:
            return mode == "lenient"
        if mode == "strict" and len(weights) < k:
            return False
        return len(set(weights.values())) == 1

    for d in range(1, n * m_max // k + 1):
        if m_max == 1 and n != k * d:
            continue
        sums = [0] * k

        def rec(u: int, nparts: int) -> None:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise ResourceError(f"multinet search exceeded {budget} nodes")
            if u == n:
                if nparts == k and all(s == d for s in sums) and reduce(math.gcd, mult) == 1:
                    parts = [tuple(v for v in range(n) if part[v] == a) for a in range(k)]
                    try:
                        net = verify_multinet(m, parts, mult, mode)
                    except MultinetViolation:
                        return
                    if net.connected or include_weak:
                        found.setdefault(net.key(), net)
                return
            if nparts + (n - u) < k:
                return
            for a in range(min(nparts + 1, k)):
                for w in range(1, m_max + 1):
                    if sums[a] + w > d:
                        break
                    part[u], mult[u] = a, w
                    sums[a] += w
                    if all(flat_ok(x, max(nparts, a + 1)) for x in closing[u]):
                        rec(u + 1, max(nparts, a + 1))
                    sums[a] -= w
            part[u], mult[u] = -1, 0

        rec(0, 0)
    out = list(found.values())
    if mode == "strict":
        # lenient verification admits partitions that break the identities
        _assert_search_invariants(m, out)
    return out


def _assert_search_invariants(m: Matroid, nets: list[Multinet]) -> None:
    lat = build_flat_lattice(m)
    sizes = [f.size for f in lat.flats(2)]
    for net in nets:
        if not net.connected:
            continue
        if not multinet_identities(net).holds:
            raise ConsistencyError(f"identities fail on {net.as_dict()}")
        if sizes and max(sizes) <= 3 and net.k != 3:
            raise ConsistencyError("a multinet on a matroid without 4-point lines must be a 3-net")
        kr_lines = any(s % net.k == 0 and s // net.k > 1 for s in sizes)
        if net.reduced and not net.is_net and len(net.base_locus) > 1 and not kr_lines:
            raise ConsistencyError("reduced multinet without kr-fold lines must be a net")
        if net.is_net:
            if m.n != net.k * net.d or len(net.base_locus) != net.d ** 2:
                raise ConsistencyError("net counts |E| = kd, |X| = d^2 fail")
            if not all(m.is_line_closed(mask_of(p)) for p in net.parts):
                raise ConsistencyError("a part of a net is not line-closed")


# ---------------------------------------------------------------- Latin squares


def is_latin(square: Sequence[Sequence[int]]) -> bool:
    d = len(square)
    want = list(range(1, d + 1))
    return (all(len(r) == d and sorted(r) == want for r in square)
            and all(sorted(square[i][j] for i in range(d)) == want for j in range(d)))


def are_orthogonal(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    d = len(a)
    return len({(a[i][j], b[i][j]) for i in range(d) for j in range(d)}) == d * d


def net_to_latin(net: Multinet) -> list[list[list[int]]]:
    """Latin squares of a net: one for ``k = 3``, ``k - 2`` orthogonal ones beyond.

    Entry ``(p, q)`` of square ``c`` is the 1-based position, within part
    ``c + 2``, of the point on the line through the ``p``-th point of part 0
    and the ``q``-th point of part 1.

    Raises:
        ValueError: If ``net`` is not a net.
        ConsistencyError: If the extracted squares are not (orthogonal) Latin.
    """
    if not net.is_net:
        raise ValueError("only nets encode Latin squares")
    m = net.matroid
    p0, p1 = net.parts[0], net.parts[1]
    squares = []
    for part in net.parts[2:]:
        pos = {u: i + 1 for i, u in enumerate(part)}
        sq = []
        for u in p0:
            row = []
            for v in p1:
                hit = [w for w in elems_of(m.closure((1 << u) | (1 << v))) if w in pos]
                if len(hit) != 1:
                    raise ConsistencyError("a base-locus line misses a part")
                row.append(pos[hit[0]])
            sq.append(row)
        if not is_latin(sq):
            raise ConsistencyError("extracted square is not Latin")
        squares.append(sq)
    for a, b in combinations(squares, 2):
        if not are_orthogonal(a, b):
            raise ConsistencyError("extracted squares are not orthogonal")
    return squares


def latin_to_matroid(square: Sequence[Sequence[int]]) -> tuple[Matroid, Multinet]:
    """Rank-3 matroid on ``3d`` points carrying a 3-net with the given square.

    Points ``0..d-1``, ``d..2d-1`` and ``2d..3d-1`` form the three parts; the
    lines are ``{p, d + q, 2d + square[p][q] - 1}``.

    Raises:
        ValueError: If the square is not Latin.
        ConsistencyError: If a part restriction is not uniform.
    """
    if not square or not is_latin(square):
        raise ValueError("not a Latin square")
    d = len(square)
    lines = [[p, d + q, 2 * d + square[p][q] - 1] for p in range(d) for q in range(d)]
    m = from_lines(3 * d, lines)
    parts = [list(range(a * d, (a + 1) * d)) for a in range(3)]
    for p in parts:
        pm = mask_of(p)
        rk = m.rank_of_set(pm)
        if any(c & pm == c and popcount(c) <= rk for c in m.circuits):
            raise ConsistencyError("a part restriction is not uniform")
    return m, verify_multinet(m, parts)


def latin_squares(d: int) -> list[list[list[int]]]:
    """Every Latin square of order ``d`` (small ``d`` only)."""
    rows = list(permutations(range(1, d + 1)))
    out: list[list[list[int]]] = []

    def rec(acc):
        if len(acc) == d:
            out.append([list(r) for r in acc])
            return
        for r in rows:
            if all(r[j] != a[j] for a in acc for j in range(d)):
                rec(acc + [r])

    rec([])
    return out


def same_up_to_relabeling(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> bool:
    """Equal after renaming symbols (rows and columns keep their order)."""
    d = len(a)
    if len(b) != d:
        return False
    ren: dict[int, int] = {}
    for i in range(d):
        for j in range(d):
            if ren.setdefault(a[i][j], b[i][j]) != b[i][j]:
                return False
    return len(set(ren.values())) == len(ren)


# ---------------------------------------------------------------- resonance components


def subspace_of_multinet(net: Multinet, ring: Ring = QQ, check: bool = True) -> list[list[int]]:
    """Basis ``w_a - w_0`` of the linear resonance component of a multinet.

    Raises:
        ConsistencyError: If a basis vector leaves the first resonance variety
            or the basis is dependent.
    """
    from .resonance import resonance_membership

    n = net.matroid.n
    ws = []
    for p in net.parts:
        w = [0] * n
        for u in p:
            w[u] = net.mult[u]
        ws.append(w)
    basis = [[a - b for a, b in zip(w, ws[0])] for w in ws[1:]]
    if check:
        if rank_of(ExactMatrix.from_rows(basis, ring, n)) != net.k - 1:
            raise ConsistencyError("multinet subspace has the wrong dimension")
        for v in basis:
            if not resonance_membership(net.matroid, v, 1, 1):
                raise ConsistencyError(f"vector {v} is not resonant")
    return basis


@dataclass
class Component:
    """A linear component of the first resonance variety.

    Attributes:
        kind: ``local`` (from a rank-2 flat) or ``essential``.
        support: Elements of the sub-matroid, as a bitmask.
        basis: Integer basis vectors in the ambient coordinates.
        parts: Number of parts of the defining multinet.
    """

    kind: str
    support: int
    basis: list[list[int]]
    parts: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "support": [u + 1 for u in elems_of(self.support)],
                "dim": self.dim, "parts": self.parts, "basis": self.basis}


@dataclass
class ComponentReport:
    """Components of ``R^1_s`` for ``s = 1..smax``.

    Attributes:
        by_depth: ``s`` to the components of dimension above ``s``.
        complete: False when a budget cut the sub-matroid enumeration short.
        notes: Conventions in force.
    """

    by_depth: dict[int, list[Component]]
    complete: bool
    notes: list[str]

    def as_dict(self) -> dict:
        return {"complete": self.complete, "notes": self.notes,
                "by_depth": {str(s): [c.as_dict() for c in cs] for s, cs in self.by_depth.items()}}


def r1_components(m: Matroid, smax: int = 1, m_max: int = 1, kmax: int = 5,
                  supports: str = "all", max_support: int = 12,
                  budget: int = SEARCH_BUDGET) -> ComponentReport:
    """Linear components of the first resonance varieties from multinets.

    Local components come from rank-2 flats with at least three points.
    Essential candidates come from strict-mode multinets with more than one
    base-locus flat on restrictions of rank at least 3.  Those multinets have
    up to ``kmax`` parts and multiplicities up to ``m_max``.  Candidates that
    lie inside a larger listed subspace are dropped, since only maximal
    subspaces are components.

    Args:
        m: The matroid.
        smax: Largest depth reported.
        m_max: Largest multiplicity searched.
        kmax: Largest number of parts searched.
        supports: ``all`` restrictions, or only ``line-closed`` ones.
        max_support: Largest restriction searched.
        budget: Search-node budget shared by all restrictions.

    Raises:
        ConsistencyError: If two listed components meet outside 0.
    """
    if supports not in ("all", "line-closed"):
        raise ValueError(f"unknown support mode {supports!r}")
    n = m.n
    lat = build_flat_lattice(m)
    cands: list[Component] = []
    for f in lat.flats(2) if m.rank >= 2 else []:
        if f.size >= 3:
            es = f.elements
            basis = [[int(u == e) - int(u == es[0]) for u in range(n)] for e in es[1:]]
            cands.append(Component("local", f.mask, basis, f.size))
    complete = max_support >= n
    nodes = [0]
    seen_spans: set[tuple] = set()
    for size in range(5, min(n, max_support) + 1):
        for sub in combinations(range(n), size):
            s = mask_of(sub)
            if supports == "line-closed" and not m.is_line_closed(s):
                continue
            if m.rank_of_set(s) < 3:
                continue
            mm = m.restriction(s)
            for k in range(3, kmax + 1):
                try:
                    nets = search_multinets(mm, k, m_max, "strict", max(budget - nodes[0], 1))
                except ResourceError:
                    complete = False
                    continue
                nodes[0] += 1
                for net in nets:
                    if len(net.base_locus) <= 1:
                        continue
                    basis = [[0] * n for _ in range(k - 1)]
                    for row, v in zip(basis, subspace_of_multinet(net, check=False)):
                        for i, e in enumerate(sub):
                            row[e] = v[i]
                    key = _span_key(basis)
                    if key not in seen_spans:
                        seen_spans.add(key)
                        cands.append(Component("essential", s, basis, k))
    comps = [c for c in cands if not any(
        o is not c and o.dim > c.dim and _contains(o.basis, c.basis, n) for o in cands)]
    _assert_trivial_meets(comps, n)
    by_depth = {s: [c for c in comps if c.dim > s] for s in range(1, smax + 1)}
    notes = [f"multiplicities up to {m_max}", f"at most {kmax} parts",
             f"{supports} supports of size at most {max_support}"]
    return ComponentReport(by_depth, complete, notes)


def _contains(big: list[list[int]], small: list[list[int]], n: int) -> bool:
    return rank_of(ExactMatrix.from_rows(big + small, QQ, n)) == len(big)


def _span_key(basis: list[list[int]]) -> tuple:
    from .linalg import rref_field

    red, _ = rref_field([list(r) for r in basis], QQ)
    return tuple(tuple(r) for r in red)


def _assert_trivial_meets(comps: list[Component], n: int) -> None:
    for a, b in combinations(comps, 2):
        joint = rank_of(ExactMatrix.from_rows(a.basis + b.basis, QQ, n))
        if joint != a.dim + b.dim:
            raise ConsistencyError(
                f"components on {elems_of(a.support)} and {elems_of(b.support)} meet outside 0")


def union_point_count(comps: Sequence[Component], p: int) -> int:
    """Points of ``GF(p)^n`` in the union of components meeting pairwise in 0."""
    return 1 + sum(p ** c.dim - 1 for c in comps)

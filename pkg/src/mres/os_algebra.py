"""Orlik-Solomon algebras with their no-broken-circuit bases.

Exterior monomials are sorted tuples of 0-based elements.  Elements of the
exterior algebra ``E`` and of ``A = E / I`` are dicts ``{monomial: coeff}``
with integer coefficients; field versions are obtained by reduction.

Reduction to the NBC basis uses the straightening rule coming from the
boundary of a circuit: in ``e_{T-B} * d(e_C)`` the term carrying the broken
circuit ``B = C - min C`` is traded for lexicographically smaller monomials.
Because the NBC monomials form a Z-basis, the resulting coordinates are
integral and reduce correctly modulo any prime.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterable, Mapping

from .linalg import QQ, Ring, RingError, sparse_rank
from .matroid import Matroid, build_flat_lattice, elems_of, mask_of

Monomial = tuple[int, ...]
Element = dict[Monomial, int]


class ConsistencyError(AssertionError):
    """Two independent computation routes disagree."""


def wedge_sign(a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
    """Sign and sorted support of ``e_a ^ e_b`` (``None`` if they overlap)."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if y < x:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def circuit_boundary(s: Monomial) -> Element:
    """Boundary ``d(e_S) = sum_i (-1)^(i-1) e_{S - u_i}`` for sorted ``S``."""
    out: Element = {}
    for i in range(len(s)):
        out[s[:i] + s[i + 1:]] = -1 if i % 2 else 1
    return out


def boundary(x: Mapping[Monomial, int]) -> Element:
    """Extend the boundary linearly to an exterior element."""
    out: Element = {}
    for mono, c in x.items():
        for t, s in circuit_boundary(mono).items():
            out[t] = out.get(t, 0) + c * s
    return {k: v for k, v in out.items() if v}


def exterior_product(x: Mapping[Monomial, int], y: Mapping[Monomial, int]) -> Element:
    out: Element = {}
    for a, ca in x.items():
        for b, cb in y.items():
            s, m = wedge_sign(a, b)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return {k: v for k, v in out.items() if v}


class OSAlgebra:
    """Orlik-Solomon algebra of a matroid over ``QQ`` or ``GF(p)``.

    Degrees are materialized lazily.  Coordinates are integral; ``ring`` only
    affects dimension checks and rank computations done by consumers.

    Args:
        matroid: The underlying simple matroid.
        ring: Coefficient field used for consistency checks.
    """

    def __init__(self, matroid: Matroid, ring: Ring = QQ):
        if not ring.is_field:
            raise RingError("OS algebra slices are built over a field")
        self.matroid = matroid
        self.ring = ring
        self.n = matroid.n
        self.rank = matroid.rank
        circuits = [elems_of(c) for c in matroid.circuits]
        # (broken circuit mask, full circuit tuple), in fixed circuit order
        self._broken = [(mask_of(c[1:]), c) for c in circuits]
        self._reduce_memo: dict[Monomial, Element] = {}
        self._basis: dict[int, list[Monomial]] = {}
        self._index: dict[int, dict[Monomial, int]] = {}
        self._checked: set[int] = set()

    # -- bases

    def is_nbc(self, mono: Monomial) -> bool:
        m = mask_of(mono)
        return not any(b & m == b for b, _ in self._broken)

    def basis(self, k: int) -> list[Monomial]:
        """NBC monomials of degree ``k`` in lexicographic order."""
        if k not in self._basis:
            if k < 0 or k > self.n:
                self._basis[k] = []
            else:
                self._basis[k] = [t for t in combinations(range(self.n), k) if self.is_nbc(t)]
            self._index[k] = {t: i for i, t in enumerate(self._basis[k])}
        return self._basis[k]

    def index(self, k: int) -> dict[Monomial, int]:
        self.basis(k)
        return self._index[k]

    def dim(self, k: int) -> int:
        return len(self.basis(k))

    def betti_numbers(self) -> list[int]:
        return [self.dim(k) for k in range(self.rank + 1)]

    # -- reduction

    def reduce_monomial(self, mono: Monomial) -> Element:
        """NBC coordinates of ``e_mono`` in ``A``."""
        got = self._reduce_memo.get(mono)
        if got is not None:
            return got
        m = mask_of(mono)
        hit = next(((b, c) for b, c in self._broken if b & m == b), None)
        if hit is None:
            res = {mono: 1}
        else:
            b, circ = hit
            c0 = circ[0]
            if m >> c0 & 1:
                res = {}  # e_T is a multiple of e_C, which lies in I
            else:
                rest = tuple(x for x in mono if not b >> x & 1)
                # rest ^ d(e_C) lies in I; its first term is rest ^ e_B = s0 * e_T
                s0, _ = wedge_sign(rest, circ[1:])
                acc: Element = {}
                for i in range(1, len(circ)):
                    sign_i = -1 if i % 2 else 1
                    s, t = wedge_sign(rest, circ[:i] + circ[i + 1:])
                    if s:
                        for mm, cc in self.reduce_monomial(t).items():
                            acc[mm] = acc.get(mm, 0) - s0 * s * sign_i * cc
                res = {k: v for k, v in acc.items() if v}
        self._reduce_memo[mono] = res
        return res

    def reduce(self, x: Mapping[Monomial, int]) -> Element:
        out: Element = {}
        for mono, c in x.items():
            for t, v in self.reduce_monomial(mono).items():
                out[t] = out.get(t, 0) + c * v
        return {k: v for k, v in out.items() if v}

    def multiply(self, x: Mapping[Monomial, int], y: Mapping[Monomial, int]) -> Element:
        """Product in ``A``, reduced to NBC coordinates."""
        return self.reduce(exterior_product(x, y))

    def coords(self, x: Mapping[Monomial, int], k: int) -> list[int]:
        idx = self.index(k)
        v = [0] * len(idx)
        for mono, c in self.reduce(x).items():
            v[idx[mono]] += c
        return v

    # -- structure maps (integer matrices as sparse columns)

    def left_multiplication(self, i: int, q: int) -> list[dict[int, int]]:
        """Columns of ``e_i * - : A^q -> A^(q+1)`` in NBC coordinates."""
        idx = self.index(q + 1)
        cols = []
        for f in self.basis(q):
            s, t = wedge_sign((i,), f)
            col: dict[int, int] = {}
            if s:
                for mono, c in self.reduce_monomial(t).items():
                    col[idx[mono]] = col.get(idx[mono], 0) + s * c
            cols.append({k: v for k, v in col.items() if v})
        return cols

    def boundary_map(self, k: int) -> list[dict[int, int]]:
        """Columns of the induced boundary ``A^k -> A^(k-1)``."""
        idx = self.index(k - 1)
        cols = []
        for f in self.basis(k):
            col: dict[int, int] = {}
            for t, s in circuit_boundary(f).items():
                for mono, c in self.reduce_monomial(t).items():
                    col[idx[mono]] = col.get(idx[mono], 0) + s * c
            cols.append({a: b for a, b in col.items() if b})
        return cols

    # -- independent routes

    def ideal_span(self, k: int) -> list[Element]:
        """Spanning set ``{e_T ^ d(e_S)}`` of the degree-``k`` piece of ``I``."""
        out = []
        for c in self.matroid.circuits:
            circ = elems_of(c)
            d = circuit_boundary(circ)
            t_size = k - (len(circ) - 1)
            if t_size < 0:
                continue
            for t in combinations(range(self.n), t_size):
                prod = exterior_product({t: 1}, d)
                if prod:
                    out.append(prod)
        return out

    def elimination_dim(self, k: int, ring: Ring | None = None) -> int:
        """``C(n,k) - rank I^k`` computed by elimination over ``ring``."""
        ring = ring or self.ring
        idx = {t: i for i, t in enumerate(combinations(range(self.n), k))}
        rows = [{idx[m]: c for m, c in x.items()} for x in self.ideal_span(k)]
        return comb(self.n, k) - sparse_rank(rows, len(idx), ring)

    def check_degree(self, k: int) -> int:
        """Cross-check NBC count, elimination and the Moebius formula."""
        nbc = self.dim(k)
        if k not in self._checked:
            elim = self.elimination_dim(k)
            lat = build_flat_lattice(self.matroid)
            mob = (-1) ** k * sum(f.mobius for f in lat.flats(k)) if k <= self.rank else 0
            if not nbc == elim == mob:
                raise ConsistencyError(
                    f"degree {k}: NBC {nbc}, elimination {elim}, Moebius {mob}")
            self._checked.add(k)
        return nbc

    def quadratic_probe(self, k: int = 3) -> bool:
        """True iff ``E^(k-2) * I^2`` already spans ``I^k``."""
        idx = {t: i for i, t in enumerate(combinations(range(self.n), k))}
        full = [{idx[m]: c for m, c in x.items()} for x in self.ideal_span(k)]
        deg2 = []
        for c in self.matroid.circuits:
            circ = elems_of(c)
            if len(circ) != 3:
                continue
            d = circuit_boundary(circ)
            for t in combinations(range(self.n), k - 2):
                prod = exterior_product({t: 1}, d)
                if prod:
                    deg2.append({idx[m]: v for m, v in prod.items()})
        return sparse_rank(deg2, len(idx), self.ring) == sparse_rank(full, len(idx), self.ring)


def betti_numbers(m: Matroid) -> list[int]:
    """Betti numbers ``b_k = (-1)^k sum_{X in L_k} mu(X)``."""
    lat = build_flat_lattice(m)
    return [(-1) ** k * s for k, s in enumerate(lat.characteristic_mobius_sums())]


def poincare_polynomial(m: Matroid) -> list[int]:
    """Coefficient list of the Poincare polynomial."""
    return betti_numbers(m)


def verified_betti_numbers(m: Matroid, ring: Ring = QQ) -> list[int]:
    """Betti numbers confirmed by NBC count, elimination and Moebius sums."""
    a = OSAlgebra(m, ring)
    return [a.check_degree(k) for k in range(m.rank + 1)]


def projective_dims(m: Matroid, ring: Ring = QQ) -> list[int]:
    """Dimensions of the projective subalgebra ``ker(d_A)``, trailing zeros dropped."""
    a = OSAlgebra(m, ring)
    out = []
    for k in range(m.rank + 1):
        if k == 0:
            out.append(1)
            continue
        cols = a.boundary_map(k)
        out.append(a.dim(k) - sparse_rank(cols, a.dim(k - 1), ring))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def kernel_of_boundary(a: OSAlgebra, k: int, ring: Ring) -> list[list]:
    """Basis of ``ker(d_A) in A^k`` as coordinate vectors over ``ring``."""
    from .linalg import ExactMatrix, kernel_basis

    if k == 0:
        return [[ring.coerce(1)]]
    cols = a.boundary_map(k)
    rows_n = a.dim(k - 1)
    dense = [[0] * len(cols) for _ in range(rows_n)]
    for j, col in enumerate(cols):
        for i, v in col.items():
            dense[i][j] = v
    if rows_n == 0:
        return [[ring.coerce(int(i == j)) for i in range(len(cols))] for j in range(len(cols))]
    return [list(v) for v in kernel_basis(ExactMatrix.from_rows(dense, ring, len(cols)))]


def convolve(a: Iterable[int], b: Iterable[int]) -> list[int]:
    a, b = list(a), list(b)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out

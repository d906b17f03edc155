"""Holonomy Lie algebras: graded ranks, torsion, local bounds and Chen ranks.

The holonomy Lie algebra is the free Lie algebra on ``x_1..x_n`` modulo the
quadratic relations ``[x_u, sum_{v in X} x_v]`` for rank-2 flats ``X`` and
``u in X``.  Two independent routes compute its graded pieces.

Direct route.  The free Lie algebra is written in the Lyndon basis.  Every
element is expanded in the tensor algebra, and the smallest word of a Lie
element is Lyndon with coefficient one.  That makes the rewrite to Lyndon
coordinates triangular and integral.  Let ``I`` be the ideal generated by
the relations.  Then ``I_r = [L_1, I_{r-1}]`` for ``r >= 3``.  The reason:
``I`` is generated in degree 2 and ``L`` is generated in degree 1, and
Jacobi turns ``[[a, b], w]`` into ``[a, [b, w]] - [b, [a, w]]``.  The same
argument runs over ``ZZ``, so a Smith form of ``I_r`` inside ``L_r`` gives
the free rank and the torsion of ``h_r``.

Quotient route, over ``GF(p)`` only.  The algebra is built one degree at a
time as ``h_s = (V (x) h_{s-1}) / K_s``.  The kernel ``K_s`` is the image of
the Chevalley-Eilenberg boundaries ``d(x ^ b ^ c)``, where ``x`` is a
generator and ``b``, ``c`` are basis elements.  Those boundaries are pushed
into ``V (x) h_{s-1}`` by a retraction ``rho`` that repeatedly unfolds the
second factor through its defining bracket ``w = [y, w']``:
``rho(u ^ [y, w']) = rho([u, y] ^ w') + y (x) [u, w']``.
Boundaries with a generator slot suffice, because the relation ``d d = 0``
on four-fold wedges moves any triple towards one that contains a generator.
This route needs only the dimensions of ``h``.  The direct route instead
carries the whole free Lie algebra, which is far larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .linalg import (
    BLAS_PRIME, QQ, ExactMatrix, ModpEchelon, Ring, divisors, kernel_basis,
    mm_mod, mobius, row_space_basis, series_mul, solve_exponents,
    sparse_invariant_factors, sparse_rank,
)
from .matroid import (
    Matroid, ResourceError, build_flat_lattice, is_supersolvable,
)
from .os_algebra import ConsistencyError, OSAlgebra

Word = tuple[int, ...]
Poly = dict[Word, int]

# Lyndon-word budget of the direct route (n = 9 reaches degree 6).
LYNDON_BUDGET = 110_000


def witt_number(n: int, r: int) -> int:
    """Rank of the degree-``r`` piece of the free Lie algebra on ``n`` letters."""
    if r < 1:
        return 0
    return sum(mobius(d) * n ** (r // d) for d in divisors(r)) // r


# ---------------------------------------------------------------- Lyndon basis


def lyndon_words(n: int, r: int) -> list[Word]:
    """Lyndon words of length exactly ``r`` over ``0..n-1``, in lex order."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        if len(w) == r:
            out.append(tuple(w))
        m = len(w)
        while len(w) < r:
            w.append(w[-m])
        while w and w[-1] == n - 1:
            w.pop()
    return out


class LyndonBasis:
    """Lyndon basis of the free Lie algebra with standard bracketing.

    Degrees are built lazily.  ``expansion(w)`` is the tensor-algebra
    polynomial of the bracketed word.  ``ad_generator(r)`` holds the integer
    structure constants of ``[x_i, -] : L_r -> L_{r+1}``.

    Args:
        n: Number of generators.
        budget: Largest degree piece allowed.
    """

    def __init__(self, n: int, budget: int = LYNDON_BUDGET):
        self.n = n
        self.budget = budget
        self._words: dict[int, list[Word]] = {}
        self._index: dict[int, dict[Word, int]] = {}
        self._poly: dict[Word, Poly] = {}
        self._ad: dict[int, list[list[dict[int, int]]]] = {}

    def words(self, r: int) -> list[Word]:
        if r not in self._words:
            if witt_number(self.n, r) > self.budget:
                raise ResourceError(
                    f"free Lie piece of degree {r} on {self.n} letters has "
                    f"{witt_number(self.n, r)} elements (budget {self.budget})")
            self._words[r] = lyndon_words(self.n, r)
            self._index[r] = {w: i for i, w in enumerate(self._words[r])}
        return self._words[r]

    def index(self, r: int) -> dict[Word, int]:
        self.words(r)
        return self._index[r]

    def dim(self, r: int) -> int:
        return len(self.words(r))

    def standard_factorization(self, w: Word) -> tuple[Word, Word]:
        """Split ``w = u v`` with ``v`` the longest proper Lyndon suffix."""
        for i in range(1, len(w)):
            if w[i:] in self.index(len(w) - i):
                return w[:i], w[i:]
        raise ValueError(f"{w} is not a Lyndon word of length >= 2")

    def expansion(self, w: Word) -> Poly:
        """Tensor-algebra expansion of the standard bracketing of ``w``."""
        got = self._poly.get(w)
        if got is None:
            if len(w) == 1:
                got = {w: 1}
            else:
                u, v = self.standard_factorization(w)
                got = commutator(self.expansion(u), self.expansion(v))
            self._poly[w] = got
        return got

    def coordinates(self, poly: Mapping[Word, int], r: int) -> dict[int, int]:
        """Lyndon coordinates of a homogeneous Lie polynomial of degree ``r``.

        Raises:
            ValueError: If ``poly`` is not a Lie element.
        """
        idx = self.index(r)
        f = {k: v for k, v in poly.items() if v}
        out: dict[int, int] = {}
        while f:
            u = min(f)
            c = f[u]
            i = idx.get(u)
            if i is None:
                raise ValueError(f"leading word {u} is not Lyndon: not a Lie element")
            out[i] = c
            for word, a in self.expansion(u).items():
                nv = f.get(word, 0) - c * a
                if nv:
                    f[word] = nv
                else:
                    f.pop(word, None)
        return out

    def ad_generator(self, r: int) -> list[list[dict[int, int]]]:
        """``table[i][k]`` = Lyndon coordinates of ``[x_i, b_k]`` for ``b_k`` in degree ``r``."""
        if r not in self._ad:
            nxt = self.index(r + 1)
            table = []
            for i in range(self.n):
                cols = []
                for w in self.words(r):
                    if i < w[0]:
                        # i w is Lyndon with standard factorization (i, w)
                        cols.append({nxt[(i,) + w]: 1})
                    else:
                        cols.append(self.coordinates(
                            commutator({(i,): 1}, self.expansion(w)), r + 1))
                table.append(cols)
            self._ad[r] = table
        return self._ad[r]

    def bracket_with_generator(self, i: int, vec: Mapping[int, int], r: int) -> dict[int, int]:
        """``[x_i, v]`` for ``v`` given by Lyndon coordinates in degree ``r``."""
        cols = self.ad_generator(r)[i]
        out: dict[int, int] = {}
        for k, c in vec.items():
            for j, a in cols[k].items():
                out[j] = out.get(j, 0) + c * a
        return {j: v for j, v in out.items() if v}


def commutator(a: Mapping[Word, int], b: Mapping[Word, int]) -> Poly:
    """``ab - ba`` in the tensor algebra."""
    out: Poly = {}
    for u, x in a.items():
        for v, y in b.items():
            out[u + v] = out.get(u + v, 0) + x * y
            out[v + u] = out.get(v + u, 0) - x * y
    return {k: v for k, v in out.items() if v}


def lyndon_basis(n: int, r: int, budget: int = LYNDON_BUDGET) -> LyndonBasis:
    """Lyndon basis with degrees ``1..r`` materialized."""
    lb = LyndonBasis(n, budget)
    for k in range(1, r + 1):
        lb.words(k)
    return lb


# ---------------------------------------------------------------- presentation


@dataclass
class HolonomyPresentation:
    """Quadratic relations of the holonomy Lie algebra.

    Attributes:
        n: Number of generators.
        relations: Integer vectors over the pair basis ``[x_u, x_v]``, ``u < v``
            (pair ``(u, v)`` sits at its position in lexicographic order).
        flats: The rank-2 flats, each as a sorted tuple.
        span_dim: Rank of the relations over ``QQ``.
    """

    n: int
    relations: list[dict[int, int]]
    flats: list[tuple[int, ...]]
    span_dim: int


def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pr: i for i, pr in enumerate(combinations(range(n), 2))}


def _relation_vectors(m: Matroid) -> tuple[list[dict[int, int]], list[tuple[int, ...]]]:
    pidx = _pair_index(m.n)
    lat = build_flat_lattice(m)
    flats = [f.elements for f in lat.flats(2)] if m.rank >= 2 else []
    rels = []
    for x in flats:
        for u in x:
            vec = {}
            for v in x:
                if v != u:
                    vec[pidx[(min(u, v), max(u, v))]] = 1 if u < v else -1
            rels.append(vec)
    return rels, [tuple(f) for f in flats]


def holonomy_relations(m: Matroid) -> HolonomyPresentation:
    """Relations ``[x_u, sum_{v in X} x_v]`` with an independent span check.

    The span is compared over ``QQ`` with the image of the dual of the
    Orlik-Solomon multiplication ``Lambda^2 A^1 -> A^2``.  That image is the
    annihilator of the degree-2 part of the Orlik-Solomon ideal.

    Raises:
        ConsistencyError: If the two spans differ.
    """
    n = m.n
    rels, flats = _relation_vectors(m)
    npairs = n * (n - 1) // 2
    rk = sparse_rank(rels, npairs, QQ) if rels else 0
    # annihilator of I^2, from the exterior side
    pidx = _pair_index(n)
    ideal = [{pidx[t]: c for t, c in g.items()} for g in OSAlgebra(m, QQ).ideal_span(2)]
    if ideal:
        dense = [[g.get(j, 0) for j in range(npairs)] for g in ideal]
        ann = kernel_basis(ExactMatrix.from_rows(dense, QQ, npairs))
    else:
        ann = [tuple(int(i == j) for i in range(npairs)) for j in range(npairs)]
    ann_rows = [{j: v for j, v in enumerate(_integral(a)) if v} for a in ann]
    both = sparse_rank(rels + ann_rows, npairs, QQ) if npairs else 0
    if not (rk == len(ann_rows) == both):
        raise ConsistencyError(
            f"holonomy relation span {rk} vs OS annihilator {len(ann_rows)} (joint {both})")
    return HolonomyPresentation(n, rels, flats, rk)


def _integral(v: Sequence) -> list[int]:
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return [int(x * den) for x in v]


# ---------------------------------------------------------------- graded ranks


@dataclass
class GradedPieceReport:
    """Rank data of one graded piece.

    Attributes:
        degree: The degree ``r``.
        ring: Coefficient ring label.
        rank: Dimension over a field, free rank over ``ZZ``.
        invariant_factors: Torsion orders over ``ZZ`` (empty over fields).
        method: ``"direct"`` or ``"quotient"``.
    """

    degree: int
    ring: str
    rank: int
    invariant_factors: list[int] = field(default_factory=list)
    method: str = "direct"

    def as_dict(self) -> dict:
        return {"degree": self.degree, "ring": self.ring, "rank": self.rank,
                "invariant_factors": list(self.invariant_factors), "method": self.method}


def _reduce_rows(rows: list[dict[int, int]], ring: Ring) -> list[dict[int, int]]:
    if ring.kind != "GF":
        return [r for r in rows if r]
    p = ring.p
    out = []
    for r in rows:
        d = {k: v % p for k, v in r.items() if v % p}
        if d:
            out.append(d)
    return out


def _direct_ranks(m: Matroid, R: int, ring: Ring, budget: int) -> list[GradedPieceReport]:
    n = m.n
    lb = LyndonBasis(n, budget)
    for r in range(1, R + 1):
        lb.words(r)  # budget check before any work
    reports = [GradedPieceReport(1, str(ring), n)] if R >= 1 else []
    if R < 2:
        return reports
    rels, _ = _relation_vectors(m)
    # pair index and degree-2 Lyndon index agree: both are lex order on (u, v)
    span = _reduce_rows(rels, ring)
    for r in range(2, R + 1):
        if r > 2:
            basis = row_space_basis(span, lb.dim(r - 1), ring)
            span = _reduce_rows(
                [lb.bracket_with_generator(i, v, r - 1) for v in basis for i in range(n)], ring)
        dim = lb.dim(r)
        if ring.kind == "ZZ":
            inv = sparse_invariant_factors(span, dim) if span else []
            reports.append(GradedPieceReport(r, str(ring), dim - len(inv), [d for d in inv if d > 1]))
        else:
            reports.append(GradedPieceReport(r, str(ring), dim - (sparse_rank(span, dim, ring) if span else 0)))
    return reports


def holonomy_ranks_quotient(m: Matroid, R: int, p: int = BLAS_PRIME) -> list[int]:
    """``dim h_1..h_R`` over ``GF(p)`` by the graded quotient construction.

    Args:
        m: The matroid.
        R: Top degree.
        p: Prime below ``2^19``.
    """
    return _QuotientBuilder(m, p).run(R)


class _QuotientBuilder:
    """Degree-by-degree construction of ``h`` over ``GF(p)``.

    State per degree ``k``: ``dims[k]``; ``defs[k][w] = (y, w')`` meaning basis
    element ``w = [x_y, w']``; ``br[(a, b)]`` of shape ``(d_a, d_b, d_{a+b})``
    holding all brackets with ``a + b`` below the current degree.
    """

    def __init__(self, m: Matroid, p: int):
        self.m = m
        self.n = m.n
        self.p = p
        self.dims = {1: m.n}
        self.defs: dict[int, list[tuple[int, int]]] = {}
        self.br: dict[tuple[int, int], np.ndarray] = {}

    def run(self, R: int) -> list[int]:
        out = [self.n][:max(R, 0)]
        if R >= 2:
            out.append(self._degree_two())
        for s in range(3, R + 1):
            out.append(self._degree(s, final=(s == R)))
        return out

    def _set_bracket(self, a: int, b: int, t: np.ndarray) -> None:
        self.br[(a, b)] = t
        if a != b:
            self.br[(b, a)] = np.mod(-t.transpose(1, 0, 2), self.p)

    def _degree_two(self) -> int:
        n, p = self.n, self.p
        pairs = list(combinations(range(n), 2))
        rels, _ = _relation_vectors(self.m)
        ech = ModpEchelon(len(pairs), p)
        if rels:
            dense = np.zeros((len(rels), len(pairs)))
            for i, r in enumerate(rels):
                for j, v in r.items():
                    dense[i, j] = v
            ech.add(dense)
        free, cls = ech.classes()
        d2 = len(free)
        t = np.zeros((n, n, d2))
        for j, (u, v) in enumerate(pairs):
            t[u, v] = cls[j]
            t[v, u] = np.mod(-cls[j], p)
        self.br[(1, 1)] = t
        self.defs[2] = [pairs[j] for j in free]
        self.dims[2] = d2
        return d2

    def _rho_tables(self, s: int) -> dict[int, np.ndarray]:
        """``P[a][u, w] = rho(b_u ^ b_w)`` for ``b_u`` in degree ``a``, ``a + deg w = s``."""
        n, p = self.n, self.p
        dm = self.dims
        d_prev = dm[s - 1]
        N = n * d_prev
        P: dict[int, np.ndarray] = {}
        for j in range(2, s - 1):
            a = s - j
            tab = np.zeros((dm[a], dm[j], N))
            # adjoint matrices u -> [u, y]
            ad_right = self.br[(a, 1)]  # (d_a, n, d_{a+1})
            for w, (y, w1) in enumerate(self.defs[j]):
                first = ad_right[:, y, :]  # (d_a, d_{a+1})
                if j == 2:
                    # rho(b_t ^ x_{w1}) = -x_{w1} (x) b_t
                    blk = tab[:, w, w1 * d_prev:(w1 + 1) * d_prev]
                    blk -= first
                else:
                    tab[:, w, :] += mm_mod(first, P[a + 1][:, w1, :], p)
                tab[:, w, y * d_prev:(y + 1) * d_prev] += self.br[(a, j - 1)][:, w1, :]
            np.mod(tab, p, out=tab)
            P[a] = tab
        return P

    def _degree(self, s: int, final: bool) -> int:
        n, p = self.n, self.p
        dm = self.dims
        d_prev = dm[s - 1]
        N = n * d_prev
        P = self._rho_tables(s)
        ech = ModpEchelon(N, p)
        def place(x_idx: np.ndarray, vecs: np.ndarray) -> np.ndarray:
            # rows x_idx (x) vecs
            out = np.zeros((len(x_idx), N))
            for r, x in enumerate(x_idx):
                out[r, x * d_prev:(x + 1) * d_prev] = vecs[r]
            return out

        for i in range(1, (s - 1) // 2 + 1):
            j = s - 1 - i
            if i == 1:
                # triples x ^ y ^ c with generators x < y
                xs, ys = np.triu_indices(n, 1)
                for c in range(dm[j]):
                    if j == 1:
                        keep = ys < c
                        if not np.any(keep):
                            continue
                        xx, yy = xs[keep], ys[keep]
                        cc = np.full(len(xx), c)
                        rows = -place(cc, self.br[(1, 1)][xx, yy])
                    else:
                        xx, yy = xs, ys
                        rows = mm_mod(self.br[(1, 1)][xx, yy], P[2][:, c, :], p)
                    rows += place(yy, self.br[(1, j)][xx, c])
                    rows -= place(xx, self.br[(1, j)][yy, c])
                    ech.add(rows)
            else:
                bx = self.br[(1, i)]  # (n, d_i, d_{i+1})
                for c in range(dm[j]):
                    bs = range(c + 1, dm[i]) if i == j else range(dm[i])
                    bs = np.array(list(bs), dtype=np.int64)
                    if not len(bs):
                        continue
                    xx = np.repeat(np.arange(n), len(bs))
                    bb = np.tile(bs, n)
                    rows = mm_mod(bx[xx, bb], P[i + 1][:, c, :], p)
                    xc = self.br[(1, j)][xx, c]  # [x, c] in degree j + 1
                    # rho([x, c] ^ b), grouped by b
                    for k, b in enumerate(bs):
                        sel = np.arange(k, len(xx), len(bs))
                        rows[sel] -= mm_mod(xc[sel], P[j + 1][:, b, :], p)
                    rows -= place(xx, self.br[(i, j)][bb, c])
                    ech.add(rows)
        # rho lives on h (x) h; symmetric tensors are killed by the bracket too
        for a, tab in P.items():
            jj = s - a
            if a < jj:
                ech.add(np.mod(tab + P[jj].transpose(1, 0, 2), p).reshape(-1, N))
            elif a == jj:
                iu, ju = np.triu_indices(dm[a])
                ech.add(np.mod(tab[iu, ju] + tab[ju, iu] * (iu != ju)[:, None], p))
        free, cls = ech.classes()
        d_s = len(free)
        dm[s] = d_s
        if final:
            return d_s
        # bracket tables landing in degree s
        self._set_bracket(1, s - 1, cls.reshape(n, d_prev, d_s))
        for a, tab in P.items():
            jj = s - a
            if a <= jj:
                self._set_bracket(a, jj, mm_mod(tab.reshape(-1, N), cls, p).reshape(dm[a], dm[jj], d_s))
        self.defs[s] = [(int(f) // d_prev, int(f) % d_prev) for f in free]
        return d_s


# ---------------------------------------------------------------- public ranks

_RANK_CACHE: dict[tuple, list[GradedPieceReport]] = {}


def holonomy_method(m: Matroid, r: int, ring: Ring, budget: int = LYNDON_BUDGET) -> str:
    """Route ``holonomy_rank`` picks: ``direct`` within the Lyndon budget,
    ``quotient`` beyond it over a small enough prime field.

    Raises:
        ResourceError: If neither route applies.
    """
    total = sum(witt_number(m.n, k) for k in range(1, r + 1))
    if total <= budget:
        return "direct"
    if ring.kind == "GF" and ring.p < (1 << 19):
        return "quotient"
    raise ResourceError(
        f"degree {r} needs {total} Lyndon words (budget {budget}); "
        "over a prime field below 2^19 the quotient route can go further")


def holonomy_ranks(m: Matroid, R: int, ring: Ring = QQ, method: str = "auto",
                   budget: int = LYNDON_BUDGET) -> list[GradedPieceReport]:
    """Reports for ``h_1..h_R`` (results are cached per matroid and ring).

    Args:
        m: The matroid.
        R: Top degree.
        ring: ``QQ``, ``ZZ`` or ``GF(p)``.
        method: ``auto``, ``direct`` or ``quotient`` (prime fields only).
        budget: Largest number of Lyndon words the direct route may create.

    Raises:
        ResourceError: If the chosen route exceeds its budget.
        ValueError: On an unknown method or a quotient request off ``GF(p)``.
    """
    if method == "auto":
        method = holonomy_method(m, R, ring, budget)
    if method not in ("direct", "quotient"):
        raise ValueError(f"unknown method {method!r}")
    if method == "quotient" and ring.kind != "GF":
        raise ValueError("the quotient route works over prime fields only")
    key = (m, str(ring), method)
    got = _RANK_CACHE.get(key, [])
    if len(got) < R:
        if method == "direct":
            got = _direct_ranks(m, R, ring, budget)
        else:
            dims = holonomy_ranks_quotient(m, R, ring.p)
            got = [GradedPieceReport(r, str(ring), d, method="quotient")
                   for r, d in enumerate(dims, start=1)]
        _RANK_CACHE[key] = got
    return got[:R]


def holonomy_rank(m: Matroid, r: int, ring: Ring = QQ, method: str = "auto",
                  budget: int = LYNDON_BUDGET) -> GradedPieceReport:
    """Rank (and torsion over ``ZZ``) of the degree-``r`` holonomy piece."""
    if r < 1:
        raise ValueError("degree must be positive")
    return holonomy_ranks(m, r, ring, method, budget)[r - 1]


# ---------------------------------------------------------------- local bounds


def _big_flat_mobius(m: Matroid) -> list[int]:
    """``mu(X) = |X| - 1`` for rank-2 flats with at least three elements."""
    if m.rank < 2:
        return []
    return [f.size - 1 for f in build_flat_lattice(m).flats(2) if f.size >= 3]


def local_holonomy_rank(m: Matroid, r: int) -> int:
    """Rank of the degree-``r`` piece of the product of the localizations."""
    return sum(witt_number(mu, r) for mu in _big_flat_mobius(m))


def local_chen_rank(m: Matroid, r: int) -> int:
    """Chen rank of the product of the localizations, for ``r >= 2``."""
    return (r - 1) * sum(math.comb(mu + r - 2, r) for mu in _big_flat_mobius(m))


def is_decomposable(m: Matroid, ring: Ring = QQ, primes: Sequence[int] = (2, 3, 5)) -> bool:
    """Whether degree 3 of the holonomy algebra matches its localization.

    Over ``ZZ`` the test runs over ``QQ`` and each listed prime field, which
    approximates the integral statement (torsion at other primes is not seen).
    """
    local = local_holonomy_rank(m, 3)
    if ring.kind == "ZZ":
        from .linalg import GF
        return all(holonomy_rank(m, 3, k).rank == local for k in [QQ] + [GF(p) for p in primes])
    return holonomy_rank(m, 3, ring).rank == local


# ---------------------------------------------------------------- Chen ranks


def chen_ranks(m: Matroid, R: int, ring: Ring = QQ) -> list[int]:
    """``theta_2..theta_R`` from the strands of the first Koszul module.

    Raises:
        ConsistencyError: If ``theta_r != phi_r`` for some ``r <= 3``.
    """
    from .resonance import koszul_module_dim

    thetas = [koszul_module_dim(m, 1, r - 2, ring) for r in range(2, R + 1)]
    for r in range(2, min(R, 3) + 1):
        phi = holonomy_rank(m, r, ring).rank
        if thetas[r - 2] != phi:
            raise ConsistencyError(f"theta_{r} = {thetas[r - 2]} but phi_{r} = {phi}")
    return thetas


def clique_counts(vertices: int, edges: Sequence[tuple[int, int]]) -> dict[int, int]:
    """``kappa_s``: number of complete subgraphs on ``s`` vertices, ``s >= 1``."""
    adj = [0] * vertices
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    counts: dict[int, int] = {}

    def grow(size: int, cand: int) -> None:
        counts[size] = counts.get(size, 0) + 1
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            grow(size + 1, cand & adj[v])

    for v in range(vertices):
        grow(1, adj[v] & ~((1 << (v + 1)) - 1))
    return counts


def chen_closed_form(kind: str, params, r: int) -> int:
    """Closed-form Chen ranks.

    Args:
        kind: ``free`` (params ``n``), ``uniform2`` (params ``n``) or
            ``graphic`` (params ``(vertices, edges)``, 0-based).
        params: As above.
        r: Degree, at least 2.

    Raises:
        ValueError: On an unknown kind or ``r < 2``.
    """
    if r < 2:
        raise ValueError("closed forms start at degree 2")
    if kind == "free":
        return (r - 1) * math.comb(params + r - 2, r)
    if kind == "uniform2":
        return (r - 1) * math.comb(params + r - 3, r)
    if kind == "graphic":
        kappa = clique_counts(*params)
        k3, k4 = kappa.get(3, 0), kappa.get(4, 0)
        return k3 if r == 2 else (r - 1) * (k3 + k4)
    raise ValueError(f"unknown closed-form kind {kind!r}")


# ---------------------------------------------------------------- product formulas


def _check_against_direct(m: Matroid, phis: list[int], top: int) -> None:
    top = min(top, len(phis))
    if sum(witt_number(m.n, k) for k in range(1, top + 1)) > LYNDON_BUDGET:
        return
    direct = [rep.rank for rep in holonomy_ranks(m, top, QQ, "direct")]
    if direct != phis[:top]:
        raise ConsistencyError(f"product formula gives {phis[:top]}, direct route {direct}")


def lcs_from_betti(m: Matroid, R: int) -> list[int]:
    """``phi_1..phi_R`` from the Betti numbers of a supersolvable matroid.

    Raises:
        ValueError: If the matroid is not supersolvable.
        ConsistencyError: If the direct route disagrees for ``r <= 5``.
    """
    ok, _ = is_supersolvable(m)
    if not ok:
        raise ValueError("the Betti product formula is only available for supersolvable matroids")
    from .os_algebra import betti_numbers

    series = [(-1) ** k * b for k, b in enumerate(betti_numbers(m))]
    phis = solve_exponents(series, R)
    _check_against_direct(m, phis, 5)
    return phis


def glcs_exponents(vertices: int, edges: Sequence[tuple[int, int]]) -> dict[int, int]:
    """Exponents ``e_j`` of ``(1 - j t)`` in the graphic product formula."""
    kappa = clique_counts(vertices, edges)
    top = max(kappa, default=0)
    return {j: sum((-1) ** (s - j) * math.comb(s, j) * kappa.get(s + 1, 0) for s in range(j, top))
            for j in range(1, top)}


def glcs_graphic(vertices: int, edges: Sequence[tuple[int, int]], R: int) -> list[int]:
    """``phi_1..phi_R`` of a graphic matroid from its clique counts.

    Raises:
        ConsistencyError: If the direct route disagrees (checked for ``r <= 4``
            on graphs with at most five vertices).
    """
    from .linalg import _binom_general
    from .matroid import graphic

    series = [1] + [0] * R
    for j, e in glcs_exponents(vertices, edges).items():
        factor = [_binom_general(e, k) * (-j) ** k for k in range(R + 1)]
        series = series_mul(series, factor, R)
    phis = solve_exponents(series, R)
    if vertices <= 5 and edges:
        _check_against_direct(graphic(vertices, edges), phis, 4)
    return phis


# ---------------------------------------------------------------- Chen ranks conjecture


@dataclass
class ConjectureReport:
    """Both sides of the multinet formula for Chen ranks.

    Attributes:
        counts: ``k`` to the number of counted ``k``-multinets.
        rows: ``(r, theta_r, formula_r)`` for each tested degree.
        agree_from: Smallest ``r`` from which every tested degree agrees,
            or ``None`` if the top degree disagrees.
        last_disagreement: Largest disagreeing degree, if any.
        partial: True when the multinet enumeration hit a budget.
        notes: The counting convention in force.
    """

    counts: dict[int, int]
    rows: list[tuple[int, int, int]]
    agree_from: int | None
    last_disagreement: int | None
    partial: bool
    notes: list[str]

    def as_dict(self) -> dict:
        return {"counts": {str(k): v for k, v in sorted(self.counts.items())},
                "rows": [{"r": r, "theta": t, "formula": f, "agree": t == f} for r, t, f in self.rows],
                "agree_from": self.agree_from, "last_disagreement": self.last_disagreement,
                "partial": self.partial, "notes": self.notes}


def conjecture_formula(counts: Mapping[int, int], r: int) -> int:
    """``(r - 1) sum_k n_k binom(k + r - 3, r)``."""
    return (r - 1) * sum(c * math.comb(k + r - 3, r) for k, c in counts.items())


def chen_conjecture_report(m: Matroid, R: int, ring: Ring = QQ, **search) -> ConjectureReport:
    """Compare ``theta_r`` with the multinet formula for ``4 <= r <= R``.

    A multinet is counted when its subspace is a component of the first
    resonance variety: one per rank-2 flat with at least three points, plus
    the maximal essential ones.  Nothing is asserted, since the formula is
    only expected for large ``r``.

    Args:
        m: The matroid.
        R: Top degree.
        ring: Field for the Chen ranks.
        **search: Passed to the component enumeration.
    """
    from .multinet import r1_components

    comps = r1_components(m, 1, **search)
    counts: dict[int, int] = {}
    for c in comps.by_depth[1]:
        counts[c.dim + 1] = counts.get(c.dim + 1, 0) + 1
    thetas = chen_ranks(m, R, ring) if R >= 2 else []
    rows = [(r, thetas[r - 2], conjecture_formula(counts, r)) for r in range(4, R + 1)]
    bad = [r for r, t, f in rows if t != f]
    last_bad = max(bad) if bad else None
    agree_from = None
    if rows and (last_bad is None or last_bad < R):
        agree_from = (last_bad + 1) if last_bad is not None else rows[0][0]
    notes = ["one multinet per component: each rank-2 flat with at least three points, "
             "plus maximal essential subspaces"] + comps.notes
    return ConjectureReport(counts, rows, agree_from, last_bad, not comps.complete, notes)

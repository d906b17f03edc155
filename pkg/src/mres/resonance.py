"""Resonance varieties, Aomoto complexes and Koszul modules of matroids.

Pointwise computations over prime fields are exhaustive: points of the
ambient space are enumerated projectively (resonance loci are stable under
scaling), each evaluated matrix is ranked by a compiled kernel, and affine
counts are recovered by multiplying out the scalars.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from math import comb
from typing import Sequence

import numba
import numpy as np

from .linalg import (QQ, ExactMatrix, GF, Ring, RingError, kernel_basis, rank_of,
                     sparse_rank)
from .matroid import Matroid, ResourceError, build_flat_lattice, elems_of
from .os_algebra import OSAlgebra, kernel_of_boundary

DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 15


def enumeration_budget() -> int:
    """Point budget for exhaustive enumeration (``MRES_BUDGET`` overrides)."""
    raw = os.environ.get("MRES_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# ---------------------------------------------------------------- linear matrices


@dataclass(frozen=True)
class LinearMatrix:
    """Matrix whose entries are linear forms ``sum_i c_i x_i``.

    ``coeffs[i, r, c]`` is the coefficient of ``x_i`` in entry ``(r, c)``.
    """

    coeffs: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1], self.coeffs.shape[2]

    @property
    def nvars(self) -> int:
        return self.coeffs.shape[0]

    def evaluate(self, a: Sequence, ring: Ring = QQ) -> ExactMatrix:
        r, c = self.shape
        vals = [[0] * c for _ in range(r)]
        for i, ai in enumerate(a):
            ai = ring.coerce(ai)
            if ai == 0:
                continue
            nz = np.nonzero(self.coeffs[i])
            for rr, cc in zip(*nz):
                vals[rr][cc] += ai * int(self.coeffs[i, rr, cc])
        return ExactMatrix.from_rows(vals, ring, c)

    def transpose(self) -> LinearMatrix:
        return LinearMatrix(np.ascontiguousarray(self.coeffs.transpose(0, 2, 1)))

    def compose_right(self, b: np.ndarray) -> LinearMatrix:
        """``L(x) @ b`` for a constant integer matrix ``b``."""
        return LinearMatrix(np.einsum("irc,ck->irk", self.coeffs, b))

    def compose_left(self, b: np.ndarray) -> LinearMatrix:
        """``b @ L(x)`` for a constant integer matrix ``b``."""
        return LinearMatrix(np.einsum("kr,irc->ikc", b, self.coeffs))


def universal_aomoto(m: Matroid | OSAlgebra, q: int, ring: Ring = QQ) -> LinearMatrix:
    """Universal Aomoto differential ``delta^q_A`` as a linear matrix.

    Rows index the NBC basis of ``A^(q+1)``, columns that of ``A^q``; entry
    ``(u, w)`` is ``sum_i [u](e_i w) x_i``.
    """
    a = m if isinstance(m, OSAlgebra) else _algebra(m, ring)
    rows, cols = a.dim(q + 1), a.dim(q)
    coeffs = np.zeros((a.n, rows, cols), dtype=np.int64)
    if rows and cols:
        for i in range(a.n):
            for c, col in enumerate(a.left_multiplication(i, q)):
                for r, v in col.items():
                    coeffs[i, r, c] = v
    return LinearMatrix(coeffs)


def _algebra(m: Matroid, ring: Ring = QQ) -> OSAlgebra:
    cache = m.__dict__.setdefault("_os_cache", {})
    key = "QQ" if ring.kind != "GF" else f"F{ring.p}"
    if key not in cache:
        cache[key] = OSAlgebra(m, ring if ring.is_field else QQ)
    return cache[key]


def _aomoto_stack(m: Matroid, qmax: int) -> list[LinearMatrix]:
    cache = m.__dict__.setdefault("_aomoto_cache", {})
    for q in range(qmax + 1):
        if q not in cache:
            cache[q] = universal_aomoto(m, q)
    return [cache[q] for q in range(qmax + 1)]


def aomoto_cohomology_dim(m: Matroid, a: Sequence, q: int, ring: Ring = QQ) -> int:
    """``dim H^q(A, a)`` as ``b_q - rank delta^(q-1)_a - rank delta^q_a``."""
    if not ring.is_field:
        raise RingError("Aomoto cohomology is computed over a field")
    alg = _algebra(m, ring)
    if q < 0 or q > m.rank:
        return 0
    bq = alg.dim(q)
    r_prev = rank_of(universal_aomoto(alg, q - 1).evaluate(a, ring)) if q >= 1 else 0
    r_next = rank_of(universal_aomoto(alg, q).evaluate(a, ring)) if q < m.rank else 0
    return bq - r_prev - r_next


def resonance_membership(m: Matroid, a: Sequence, q: int, s: int = 1) -> bool:
    """Exact test over Q: is ``dim H^q(A, a) >= s``?"""
    return aomoto_cohomology_dim(m, a, q, QQ) >= s


# ---------------------------------------------------------------- compiled kernels


@numba.njit(cache=True)
def _decode_points(start, count, m, n, p, vbar):  # pragma: no cover - compiled
    """Projective points of F_p^m (first nonzero coordinate 1), by index."""
    out = np.zeros((count, n), dtype=np.int64)
    for t in range(count):
        idx = start + t
        lead = 0
        block = 1
        for _ in range(m - 1):
            block *= p
        while idx >= block:
            idx -= block
            lead += 1
            block //= p
        out[t, lead] = 1
        pos = m - 1
        while pos > lead:
            out[t, pos] = idx % p
            idx //= p
            pos -= 1
        if vbar:
            s = 0
            for j in range(m):
                s += out[t, j]
            out[t, n - 1] = (-s) % p
    return out


@numba.njit(cache=True)
def _stream_ranks(points, col_ptr, ent_var, ent_row, ent_coef, nrows, p, inv, stop):  # pragma: no cover
    """Rank of ``L(a)`` for each point ``a``, streaming columns of ``L``.

    Columns are reduced against an incremental echelon basis; when ``stop`` is
    positive the scan ends as soon as the rank reaches it.  Reductions modulo
    ``p`` are deferred: entries stay far below 2^63 for the small primes
    used in enumeration.
    """
    b = points.shape[0]
    ncols = col_ptr.shape[0] - 1
    out = np.zeros(b, dtype=np.int64)
    basis = np.zeros((nrows, nrows), dtype=np.int64)
    prow = np.zeros(nrows, dtype=np.int64)
    v = np.zeros(nrows, dtype=np.int64)
    for t in range(b):
        rank = 0
        for c in range(ncols):
            v[:] = 0
            nz = False
            for k in range(col_ptr[c], col_ptr[c + 1]):
                x = points[t, ent_var[k]]
                if x != 0:
                    v[ent_row[k]] += x * ent_coef[k]
                    nz = True
            if not nz:
                continue
            for j in range(rank):
                f = v[prow[j]] % p
                if f != 0:
                    g = p - f
                    for r in range(nrows):
                        v[r] += g * basis[j, r]
            piv = -1
            for r in range(nrows):
                v[r] %= p
                if piv < 0 and v[r] != 0:
                    piv = r
            if piv < 0:
                continue
            s = inv[v[piv]]
            for r in range(nrows):
                basis[rank, r] = v[r] * s % p
            prow[rank] = piv
            rank += 1
            if rank == stop or rank == nrows:
                break
        out[t] = rank
    return out


class _CompiledLinear:
    """Column-compressed integer form of a linear matrix for the kernels."""

    def __init__(self, lm: LinearMatrix, p: int):
        coeffs = lm.coeffs % p
        nv, nr, nc = coeffs.shape
        ptr = [0]
        var, row, coef = [], [], []
        for c in range(nc):
            for i in range(nv):
                rs = np.nonzero(coeffs[i, :, c])[0]
                for r in rs:
                    var.append(i)
                    row.append(r)
                    coef.append(int(coeffs[i, r, c]))
            ptr.append(len(var))
        self.nrows = nr
        self.ncols = nc
        self.p = p
        self.col_ptr = np.array(ptr, dtype=np.int64)
        self.var = np.array(var, dtype=np.int64)
        self.row = np.array(row, dtype=np.int64)
        self.coef = np.array(coef, dtype=np.int64)
        self.inv = _inverse_table(p)

    def ranks(self, points: np.ndarray, stop: int = 0) -> np.ndarray:
        if self.nrows == 0 or self.ncols == 0:
            return np.zeros(points.shape[0], dtype=np.int64)
        return _stream_ranks(points, self.col_ptr, self.var, self.row, self.coef,
                             self.nrows, self.p, self.inv, stop)


def _inverse_table(p: int) -> np.ndarray:
    from .linalg import _inverse_table as tab

    return tab(p)


def _oriented(lm: LinearMatrix) -> LinearMatrix:
    # stream the longer side so early exit bites sooner
    r, c = lm.shape
    return lm.transpose() if r > c else lm


def projective_count(p: int, m: int) -> int:
    return (p**m - 1) // (p - 1) if m > 0 else 0


def iter_projective_chunks(n: int, p: int, ambient: str = "vbar", chunk: int = _CHUNK):
    """Yield arrays of projective points of ``V-bar`` or of the full space."""
    if ambient not in ("vbar", "full"):
        raise ValueError(f"unknown ambient {ambient!r}")
    vbar = ambient == "vbar"
    m = n - 1 if vbar else n
    total = projective_count(p, m)
    if p ** m > enumeration_budget():
        raise ResourceError(f"{p}^{m} points exceed the enumeration budget {enumeration_budget()}")
    start = 0
    while start < total:
        cnt = min(chunk, total - start)
        yield _decode_points(start, cnt, m, n, p, vbar)
        start += cnt


def _expand(points: np.ndarray, p: int) -> set[tuple[int, ...]]:
    out = set()
    for row in points:
        for lam in range(1, p):
            out.add(tuple(int(x) * lam % p for x in row))
    return out


# ---------------------------------------------------------------- point sets


@dataclass
class ResonancePointSet:
    """Exhaustively computed ``R^q_s`` over ``F_p``."""

    p: int
    q: int
    s: int
    ambient: str
    count: int
    points: set[tuple[int, ...]] | None = None
    containment_violations: list[tuple[int, ...]] = field(default_factory=list)

    def sorted_points(self) -> list[list[int]]:
        return sorted(list(x) for x in self.points) if self.points is not None else []


def _dims_at(m: Matroid, p: int, points: np.ndarray, qmax: int,
             cache: dict) -> np.ndarray:
    """``dim H^q`` for ``q = 0..qmax`` at each point (rows of the result)."""
    alg = _algebra(m, GF(p))
    key = ("dims", p)
    if key not in cache:
        cache[key] = [_CompiledLinear(_oriented(lm), p) for lm in _aomoto_stack(m, m.rank)]
    comp = cache[key]
    ranks = np.zeros((points.shape[0], m.rank + 2), dtype=np.int64)
    for q in range(min(qmax, m.rank - 1) + 1):
        ranks[:, q + 1] = comp[q].ranks(points)
    dims = np.zeros((points.shape[0], qmax + 1), dtype=np.int64)
    for q in range(qmax + 1):
        b = alg.dim(q) if q <= m.rank else 0
        nxt = ranks[:, q + 1] if q < m.rank else 0
        dims[:, q] = b - ranks[:, q] - nxt
    return dims


def _r1_fast(m: Matroid, p: int, points: np.ndarray, cache: dict) -> np.ndarray:
    """Boolean mask of points (all nonzero) lying in ``R^1_1``."""
    key = ("r1", p)
    if key not in cache:
        cache[key] = _CompiledLinear(_oriented(_aomoto_stack(m, 1)[1]), p)
    # for a != 0: dim H^1 = n - 1 - rank delta^1_a
    return cache[key].ranks(points, stop=m.n - 1) < m.n - 1


def resonance_point_set(m: Matroid, p: int, q: int, s: int = 1, ambient: str = "vbar",
                        count_only: bool = False) -> ResonancePointSet:
    """Exact ``R^q_s(M, F_p)`` by exhaustive projective enumeration.

    Args:
        m: Matroid.
        p: Prime.
        q: Cohomological degree.
        s: Depth (``s >= 1``).
        ambient: ``vbar`` (the sum-zero hyperplane) or ``full``.
        count_only: Return only the affine point count.

    Raises:
        ResourceError: If ``p^(dim ambient)`` exceeds the budget.
    """
    if s < 1:
        raise ValueError("depth must be at least 1")
    alg = _algebra(m, GF(p))
    bq = alg.dim(q) if 0 <= q <= m.rank else 0
    cache: dict = {}
    hits = 0
    pts: set | None = None if count_only else set()
    violations: list[tuple[int, ...]] = []
    for chunk in iter_projective_chunks(m.n, p, ambient):
        if q == 1 and s == 1 and m.n >= 2:
            mask = _r1_fast(m, p, chunk, cache)
        else:
            mask = _dims_at(m, p, chunk, q, cache)[:, q] >= s
        sel = chunk[mask]
        hits += sel.shape[0]
        if ambient == "full" and sel.shape[0]:
            off = sel[sel.sum(axis=1) % p != 0]
            violations.extend(tuple(int(x) for x in r) for r in off[:10])
        if pts is not None:
            pts |= _expand(sel, p)
    zero_in = s <= bq
    count = hits * (p - 1) + int(zero_in)
    if pts is not None and zero_in:
        pts.add((0,) * m.n)
    return ResonancePointSet(p, q, s, ambient, count, pts, violations)


# ---------------------------------------------------------------- structure checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witnesses: list = field(default_factory=list)


@dataclass
class StructureReport:
    matroid: str
    p: int
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"matroid": self.matroid, "p": self.p, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail,
                            "witnesses": [list(w) for w in c.witnesses[:5]]}
                           for c in self.checks]}


def _projective_dim_table(m: Matroid, p: int, ambient: str, qmax: int):
    cache: dict = {}
    pts, dims = [], []
    for chunk in iter_projective_chunks(m.n, p, ambient):
        pts.append(chunk)
        dims.append(_dims_at(m, p, chunk, qmax, cache))
    return np.concatenate(pts), np.concatenate(dims)


def _projective_aomoto_dims(m: Matroid, p: int, points: np.ndarray) -> np.ndarray:
    """``dim H^q(A-bar, a)`` for points of ``V-bar`` (``q = 0..rank``)."""
    ring = GF(p)
    alg = _algebra(m, ring)
    ell = m.rank
    bases = []
    for q in range(ell + 1):
        vecs = kernel_of_boundary(alg, q, ring)
        bmat = np.array([[int(x) for x in v] for v in vecs], dtype=np.int64).T
        if bmat.size == 0:
            bmat = np.zeros((alg.dim(q), 0), dtype=np.int64)
        bases.append(bmat)
    stack = _aomoto_stack(m, ell)
    ranks = np.zeros((points.shape[0], ell + 2), dtype=np.int64)
    for q in range(ell):
        if bases[q].shape[1] == 0:
            continue
        lm = stack[q].compose_right(bases[q])
        ranks[:, q + 1] = _CompiledLinear(_oriented(lm), p).ranks(points)
    dims = np.zeros((points.shape[0], ell + 1), dtype=np.int64)
    for q in range(ell + 1):
        dims[:, q] = bases[q].shape[1] - ranks[:, q] - (ranks[:, q + 1] if q < ell else 0)
    return dims


def _witness(points, mask, limit=5):
    return [tuple(int(x) for x in r) for r in points[mask][:limit]]


def verify_structure(m: Matroid, p: int, qmax: int | None = None,
                     name: str = "") -> StructureReport:
    """Pointwise verification of the structural properties of resonance.

    Checks containment in ``V-bar`` (full-space scan), propagation
    ``R^q_1 in R^(q+1)_1``, the depth bound ``R^q_1 in R^(q+1)_s``, the
    top-degree identity for connected matroids, agreement with the
    projective subalgebra when ``p`` does not divide ``n``, the depth
    filtration, the Euler characteristic, and ``delta o delta = 0``.
    """
    ell = m.rank
    qmax = ell if qmax is None else min(qmax, ell)
    alg = _algebra(m, GF(p))
    betti = [alg.dim(q) for q in range(ell + 1)]
    checks: list[CheckResult] = []

    # full-space containment
    fpts, fdims = _projective_dim_table(m, p, "full", ell)
    outside = fpts.sum(axis=1) % p != 0
    bad = outside & (fdims[:, : qmax + 1] > 0).any(axis=1)
    checks.append(CheckResult("containment_in_vbar", not bad.any(),
                              f"{int(outside.sum())} projective points off V-bar scanned",
                              _witness(fpts, bad)))
    pts, dims = fpts[~outside], fdims[~outside]
    in_r = dims >= 1  # projective points are nonzero

    # zero point and depth-filtration facts
    euler_b = sum((-1) ** q * b for q, b in enumerate(betti))
    euler = (dims * np.array([(-1) ** q for q in range(ell + 1)])).sum(axis=1)
    checks.append(CheckResult("euler_characteristic", bool((euler == euler_b).all()),
                              f"alternating sum {euler_b}", _witness(pts, euler != euler_b)))
    full_depth = np.zeros(len(pts), dtype=bool)
    for q in range(1, ell + 1):
        full_depth |= (dims[:, q] >= betti[q]) & (betti[q] > 0)
    checks.append(CheckResult("depth_filtration_top_is_origin", not full_depth.any(),
                              "R^q_{b_q} = {0}", _witness(pts, full_depth)))

    # propagation
    ok = True
    wit = []
    for q in range(0, ell):
        badq = in_r[:, q] & ~in_r[:, q + 1]
        if badq.any():
            ok = False
            wit += _witness(pts, badq)
    checks.append(CheckResult("propagation", ok, f"q = 0..{ell - 1}", wit))

    # depth bound
    ok = True
    wit = []
    for q in range(0, ell - 1):
        smax = 2
        if q < ell - 2:
            smax = max(2, 1 + (ell - 3) // (q + 1))
        badq = in_r[:, q] & (dims[:, q + 1] < smax)
        if badq.any():
            ok = False
            wit += _witness(pts, badq)
    checks.append(CheckResult("depth_bound", ok, "R^q_1 in R^(q+1)_s", wit))

    # chain / top degree
    if m.is_connected() and ell >= 1:
        badt = ~in_r[:, ell - 1] | ~in_r[:, ell]
        checks.append(CheckResult("top_degree_equals_vbar", not badt.any(),
                                  f"R^{ell - 1}_1 = R^{ell}_1 = V-bar", _witness(pts, badt)))
    else:
        checks.append(CheckResult("top_degree_equals_vbar", True, "not connected: skipped"))

    # projective subalgebra
    if m.n % p:
        pdims = _projective_aomoto_dims(m, p, pts)
        badp = np.zeros(len(pts), dtype=bool)
        for q in range(ell):
            badp |= (pdims[:, q] >= 1) != in_r[:, q]
        checks.append(CheckResult("projective_agreement", not badp.any(),
                                  f"q = 0..{ell - 1}", _witness(pts, badp)))
    else:
        checks.append(CheckResult("projective_agreement", True, f"{p} divides n: skipped"))

    # delta o delta = 0 on a sample of points
    stack = _aomoto_stack(m, ell)
    sample = pts[:: max(1, len(pts) // 50)]
    good = True
    for a in sample:
        for q in range(ell - 1):
            d1 = np.einsum("i,irc->rc", a, stack[q].coeffs) % p
            d2 = np.einsum("i,irc->rc", a, stack[q + 1].coeffs) % p
            if d1.size and d2.size and ((d2 @ d1) % p).any():
                good = False
    checks.append(CheckResult("differential_squares_to_zero", good, f"{len(sample)} points"))
    return StructureReport(name or repr(m), p, checks)


# ---------------------------------------------------------------- envelopes


@dataclass
class EnvelopeReport:
    mode: str
    q: int
    p: int
    contained: bool
    resonant: int
    envelope: int
    slack: int
    witnesses: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"mode": self.mode, "q": self.q, "p": self.p, "contained": self.contained,
                "resonant_points": self.resonant, "envelope_points": self.envelope,
                "slack": self.slack, "witnesses": [list(w) for w in self.witnesses[:5]]}


def envelope_flats(m: Matroid, q: int, predicate: str = "connected") -> list[int]:
    lat = build_flat_lattice(m)
    return [f.mask for f in lat.flats() if 1 <= f.rank <= q + 1
            and lat.is_irreducible(f.mask, predicate)]


def envelope_check(m: Matroid, p: int, q: int, mode: str = "denham",
                   predicate: str = "connected") -> EnvelopeReport:
    """Compare ``R^q_1`` with a linear envelope, pointwise over ``F_p``.

    ``denham`` is the union of ``P_{X, [n]-X}`` over irreducible flats of rank
    ``1..q+1``.  ``covers`` is the union of intersections over families of
    such flats that cover the ground set; a point belongs to it exactly when
    the flats whose subspace contains it already cover the ground set (a
    minimal cover admits a surjection with private representatives).
    """
    if mode not in ("denham", "covers"):
        raise ValueError(f"unknown envelope mode {mode!r}")
    flats = envelope_flats(m, q, predicate)
    fm = np.zeros((len(flats), m.n), dtype=np.int64)
    for k, x in enumerate(flats):
        for e in elems_of(x):
            fm[k, e] = 1
    cache: dict = {}
    res = env = slack = 0
    wit: list = []
    for chunk in iter_projective_chunks(m.n, p, "vbar"):
        dims = _dims_at(m, p, chunk, q, cache)[:, q]
        resonant = dims >= 1
        sums = (chunk @ fm.T) % p == 0  # (B, flats): P_{X, rest} contains the point
        if mode == "denham":
            inside = sums.any(axis=1)
        else:
            covered = (sums.astype(np.int64) @ fm) > 0
            inside = covered.all(axis=1)
        res += int(resonant.sum())
        env += int(inside.sum())
        slack += int((inside & ~resonant).sum())
        badm = resonant & ~inside
        if badm.any():
            wit += _witness(chunk, badm)
    scale = p - 1
    return EnvelopeReport(mode, q, p, not wit, res * scale + 1, env * scale + 1,
                          slack * scale, wit)


# ---------------------------------------------------------------- Koszul modules


class _Monomials:
    """Monomials of fixed degree in ``n`` variables with multiply-by-x_i maps."""

    def __init__(self, n: int):
        self.n = n
        self._index: dict[int, dict[tuple[int, ...], int]] = {}

    def index(self, d: int) -> dict[tuple[int, ...], int]:
        if d not in self._index:
            if d < 0:
                self._index[d] = {}
            else:
                self._index[d] = {m: k for k, m in
                                  enumerate(combinations_with_replacement(range(self.n), d))}
        return self._index[d]

    def count(self, d: int) -> int:
        return comb(self.n + d - 1, d) if d >= 0 else 0

    def times(self, i: int, mono: tuple[int, ...]) -> tuple[int, ...]:
        lst = list(mono)
        k = 0
        while k < len(lst) and lst[k] < i:
            k += 1
        lst.insert(k, i)
        return tuple(lst)


def _strand_rows(maps: list[list[dict[int, int]]], src_dim: int, tgt_dim: int,
                 mons: _Monomials, deg: int) -> tuple[list[dict[int, int]], int]:
    """Rows of ``A_{k}(x)S_deg -> A_{k-1}(x)S_{deg+1}`` for the dual differential.

    ``maps[i]`` are the columns of multiplication by ``e_i`` from the smaller
    degree (size ``tgt_dim``) into the larger one (size ``src_dim``).
    """
    src_idx = mons.index(deg)
    tgt_idx = mons.index(deg + 1)
    ntgt = len(tgt_idx)
    # transpose e_i-multiplication: for source basis u, the w with [u](e_i w) != 0
    trans: list[list[list[tuple[int, int]]]] = []
    for cols in maps:
        t: list[list[tuple[int, int]]] = [[] for _ in range(src_dim)]
        for w, col in enumerate(cols):
            for u, v in col.items():
                t[u].append((w, v))
        trans.append(t)
    rows = []
    for u in range(src_dim):
        for mono in src_idx:
            row: dict[int, int] = {}
            for i, t in enumerate(trans):
                if not t[u]:
                    continue
                col = tgt_idx[mons.times(i, mono)]
                for w, v in t[u]:
                    key = w * ntgt + col
                    row[key] = row.get(key, 0) + v
            row = {k: v for k, v in row.items() if v}
            if row:
                rows.append(row)
    return rows, tgt_dim * ntgt


def koszul_module_dim(m: Matroid, q: int, d: int, ring: Ring = QQ) -> int:
    """``dim W_q(A)_d``, the homology of the dualized universal complex.

    The degree-``d`` piece is computed at ``A_q (x) S_(d+q)``, so ``W_0 = k``
    sits in degree 0 and ``W_1`` starts with the second Chen rank.
    """
    if not ring.is_field:
        raise RingError("Koszul module dimensions are computed over a field")
    if d < 0 or q < 0:
        return 0
    alg = _algebra(m, ring)
    mons = _Monomials(m.n)
    j = d + q  # polynomial degree on the middle term
    mid = alg.dim(q) * mons.count(j)
    if mid == 0:
        return 0
    out_rank = 0
    if q >= 1:
        maps = [alg.left_multiplication(i, q - 1) for i in range(m.n)]
        rows, ncols = _strand_rows(maps, alg.dim(q), alg.dim(q - 1), mons, j)
        out_rank = sparse_rank(rows, ncols, ring)
    in_rank = 0
    if q + 1 <= m.rank and j >= 1:
        maps = [alg.left_multiplication(i, q) for i in range(m.n)]
        rows, ncols = _strand_rows(maps, alg.dim(q + 1), alg.dim(q), mons, j - 1)
        in_rank = sparse_rank(rows, ncols, ring)
    return mid - out_rank - in_rank


# ---------------------------------------------------------------- W1 presentation


@dataclass
class W1Presentation:
    """``W_1 = coker [d3^E | iota]`` over ``S = Sym(A_1)``.

    Attributes:
        pairs: Basis of ``E_2 = Lambda^2 A_1`` (generators), as 0-based pairs.
        k_perp: Basis of ``K^perp = ker(Lambda^2 A^1 -> A^2)`` in pair coordinates.
        iota: Basis of ``K``, the functionals vanishing on ``K^perp`` (constant
            columns of the presentation), as integer vectors.
        ring: Field used.
    """

    n: int
    pairs: list[tuple[int, int]]
    k_perp: list[list]
    iota: list[list[int]]
    ring: Ring

    @property
    def rank_free(self) -> int:
        return len(self.pairs)

    def relation_matrix(self) -> LinearMatrix:
        """``[d3^E | iota]`` with ``iota`` columns as constant forms on ``x_0``.

        Only the linear part is meaningful as a form; constants are returned
        separately by :meth:`evaluate`.
        """
        triples = list(combinations(range(self.n), 3))
        pidx = {pr: k for k, pr in enumerate(self.pairs)}
        coeffs = np.zeros((self.n, len(self.pairs), len(triples)), dtype=np.int64)
        for c, (i, j, k) in enumerate(triples):
            coeffs[i, pidx[(j, k)], c] += 1
            coeffs[j, pidx[(i, k)], c] -= 1
            coeffs[k, pidx[(i, j)], c] += 1
        return LinearMatrix(coeffs)

    def evaluate(self, a: Sequence) -> ExactMatrix:
        """``[d3^E(a) | iota]`` at a point."""
        ring = self.ring
        d3 = self.relation_matrix().evaluate(a, ring)
        rows = []
        for r in range(d3.rows):
            rows.append(list(d3.entries[r]) + [ring.coerce(v[r]) for v in self.iota])
        return ExactMatrix.from_rows(rows, ring, d3.cols + len(self.iota))

    def cokernel_dim(self, d: int) -> int:
        """Dimension of the degree-``d`` piece of the cokernel."""
        if d < 0:
            return 0
        mons = _Monomials(self.n)
        idx_d = mons.index(d)
        nd = len(idx_d)
        pidx = {pr: k for k, pr in enumerate(self.pairs)}
        rows: list[dict[int, int]] = []
        if d >= 1:
            for (i, j, k) in combinations(range(self.n), 3):
                for mono in mons.index(d - 1):
                    row: dict[int, int] = {}
                    for var, pr, sgn in ((i, (j, k), 1), (j, (i, k), -1), (k, (i, j), 1)):
                        key = pidx[pr] * nd + idx_d[mons.times(var, mono)]
                        row[key] = row.get(key, 0) + sgn
                    rows.append(row)
        for v in self.iota:
            for t in range(nd):
                rows.append({r * nd + t: x for r, x in enumerate(v) if x})
        return len(self.pairs) * nd - sparse_rank(rows, len(self.pairs) * nd, self.ring)


def _integral(vec: Sequence) -> list[int]:
    from fractions import Fraction
    from math import lcm

    fr = [Fraction(x) for x in vec]
    den = lcm(*[x.denominator for x in fr]) if fr else 1
    return [int(x * den) for x in fr]


def w1_presentation(m: Matroid, ring: Ring = QQ) -> W1Presentation:
    """Build the linear presentation of the first Koszul module."""
    if not ring.is_field:
        raise RingError("presentation is built over a field")
    alg = _algebra(m, ring)
    pairs = list(combinations(range(m.n), 2))
    b2 = alg.dim(2)
    idx2 = alg.index(2)
    # multiplication Lambda^2 A^1 -> A^2, one column per pair
    mult = [[0] * len(pairs) for _ in range(b2)]
    for c, pr in enumerate(pairs):
        for mono, v in alg.reduce_monomial(pr).items():
            mult[idx2[mono]][c] += v
    if b2:
        k_perp = [list(v) for v in kernel_basis(ExactMatrix.from_rows(mult, ring, len(pairs)))]
    else:
        k_perp = [[ring.coerce(int(i == j)) for i in range(len(pairs))] for j in range(len(pairs))]
    if k_perp:
        iota_f = kernel_basis(ExactMatrix.from_rows(k_perp, ring, len(pairs)))
    else:
        iota_f = [tuple(ring.coerce(int(i == j)) for i in range(len(pairs))) for j in range(len(pairs))]
    if ring.kind == "QQ":
        iota = [_integral(v) for v in iota_f]
    else:
        iota = [[int(x) for x in v] for v in iota_f]
    return W1Presentation(m.n, pairs, k_perp, iota, ring)


def w1_support_contains(m: Matroid, a: Sequence, ring: Ring = QQ,
                        pres: W1Presentation | None = None) -> bool:
    """Is ``a`` in the support of ``W_1``?  Tests ``rank[d3^E(a) | iota] < C(n,2)``."""
    pres = pres or w1_presentation(m, ring)
    if not pres.pairs:
        return False
    return rank_of(pres.evaluate(a)) < len(pres.pairs)


def _koszul_d2_iota(pres: W1Presentation) -> LinearMatrix:
    """``d2^E(x) o iota``: ``E_2 -> E_1`` restricted to ``K`` (n x dim K)."""
    n = pres.n
    coeffs = np.zeros((n, n, len(pres.iota)), dtype=np.int64)
    for c, v in enumerate(pres.iota):
        for r, (i, j) in enumerate(pres.pairs):
            x = v[r]
            if x:
                # d2(e_ij) = x_i e_j - x_j e_i
                coeffs[i, j, c] += x
                coeffs[j, i, c] -= x
    return LinearMatrix(coeffs)


def w1_support_point_set(m: Matroid, p: int, count_only: bool = False) -> ResonancePointSet:
    """Exhaustive support of ``W_1`` on ``V-bar`` over ``F_p``.

    For ``a != 0`` Koszul exactness gives
    ``rank[d3^E(a) | iota] = C(n-1, 2) + rank(d2^E(a) o iota)``, so the
    support test reduces to ``rank(d2^E(a) o iota) < n - 1``.
    """
    pres = w1_presentation(m, GF(p))
    comp = _CompiledLinear(_oriented(_koszul_d2_iota(pres)), p)
    hits = 0
    pts: set | None = None if count_only else set()
    for chunk in iter_projective_chunks(m.n, p, "vbar"):
        mask = comp.ranks(chunk, stop=m.n - 1) < m.n - 1
        sel = chunk[mask]
        hits += sel.shape[0]
        if pts is not None:
            pts |= _expand(sel, p)
    zero_in = len(pres.iota) < len(pres.pairs)
    if pts is not None and zero_in:
        pts.add((0,) * m.n)
    return ResonancePointSet(p, 1, 1, "vbar", hits * (p - 1) + int(zero_in), pts)

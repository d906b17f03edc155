"""Exact linear algebra over the rationals, prime fields and the integers.

Small dense matrices are handled by pure-Python fraction-free elimination.
Large sparse systems go through a unit-pivot sparse eliminator that peels
off every pivot equal to +-1 and hands the (usually tiny) remaining core to
FLINT.  Both paths are exact; the test-suite cross-checks them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint
import numba
import numpy as np

SparseRow = dict[int, int]

# Above this many entries a dense matrix is routed through the sparse engine.
_DENSE_LIMIT = 40_000


class RingError(ValueError):
    """Raised when an operation is requested over an unsupported ring."""


class NonIntegralExponent(ValueError):
    """Raised by :func:`solve_exponents` when an exponent is not an integer."""

    def __init__(self, index: int, value: Fraction):
        super().__init__(f"exponent phi_{index} = {value} is not an integer")
        self.index = index
        self.value = value


@dataclass(frozen=True)
class Ring:
    """Coefficient ring tag: ``QQ``, ``ZZ`` or ``GF`` with a prime ``p``."""

    kind: str
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("QQ", "ZZ", "GF"):
            raise RingError(f"unknown ring kind {self.kind!r}")
        if self.kind == "GF":
            if not (2 <= self.p < 2**31) or not _is_prime(self.p):
                raise RingError(f"{self.p} is not a prime below 2^31")

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "GF" else 0

    def coerce(self, x) -> int | Fraction:
        """Normalise a scalar into this ring."""
        if self.kind == "QQ":
            return Fraction(x)
        if self.kind == "ZZ":
            f = Fraction(x)
            if f.denominator != 1:
                raise RingError(f"{x} is not an integer")
            return int(f)
        f = Fraction(x)
        return f.numerator * pow(f.denominator, -1, self.p) % self.p

    def __str__(self) -> str:
        return f"F{self.p}" if self.kind == "GF" else self.kind


QQ = Ring("QQ")
ZZ = Ring("ZZ")


def GF(p: int) -> Ring:
    """Return the prime field with ``p`` elements."""
    return Ring("GF", p)


def parse_ring(text: str) -> Ring:
    """Parse ``Q``, ``QQ``, ``Z``, ``ZZ``, ``F5``, ``GF5``, ``GF(5)`` or ``p=5``."""
    t = text.strip().upper().replace("_", "").replace("(", "").replace(")", "")
    if t in ("Q", "QQ"):
        return QQ
    if t in ("Z", "ZZ"):
        return ZZ
    for prefix in ("GF", "F", "P="):
        if t.startswith(prefix) and t[len(prefix):].isdigit():
            return GF(int(t[len(prefix):]))
    raise RingError(f"cannot parse ring {text!r}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class ExactMatrix:
    """Immutable dense matrix with entries normalised into ``ring``."""

    rows: int
    cols: int
    entries: tuple[tuple, ...]
    ring: Ring

    @classmethod
    def from_rows(cls, data: Sequence[Sequence], ring: Ring = QQ,
                  cols: int | None = None) -> ExactMatrix:
        if cols is None:
            if not data:
                raise ValueError("column count required for an empty matrix")
            cols = len(data[0])
        entries = []
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged rows")
            entries.append(tuple(ring.coerce(x) for x in row))
        return cls(len(entries), cols, tuple(entries), ring)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring: Ring = QQ) -> ExactMatrix:
        z = ring.coerce(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)), ring)

    @classmethod
    def identity(cls, n: int, ring: Ring = QQ) -> ExactMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], ring, n)

    def __getitem__(self, ij: tuple[int, int]):
        i, j = ij
        return self.entries[i][j]

    def transpose(self) -> ExactMatrix:
        t = tuple(tuple(self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))
        return ExactMatrix(self.cols, self.rows, t, self.ring)

    def integer_rows(self) -> list[list[int]]:
        """Rows scaled by their denominators; row space and kernel are unchanged."""
        out = []
        for row in self.entries:
            if self.ring.kind == "QQ":
                den = 1
                for x in row:
                    den = den * x.denominator // _gcd(den, x.denominator)
                out.append([int(x * den) for x in row])
            else:
                out.append([int(x) for x in row])
        return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------- dense kernels


def bareiss_rank(rows: list[list[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free elimination.

    Pivots are chosen as the first nonzero entry in column order.
    """
    a = [list(r) for r in rows]
    m = len(a)
    if m == 0:
        return 0
    ncols = len(a[0])
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(rank, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][c]
        prow = a[rank]
        for i in range(rank + 1, m):
            row = a[i]
            f = row[c]
            for j in range(c + 1, ncols):
                # exact division is the Bareiss invariant
                row[j] = (p * row[j] - f * prow[j]) // prev
            row[c] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank_mod_p_dense(rows: list[list[int]], p: int) -> int:
    """Rank over F_p by straight Gaussian elimination."""
    if not rows or not rows[0]:
        return 0
    a = np.array(rows, dtype=object if p >= 2**31 else np.int64) % p
    return _rank_mod_p_np(a, p)


def _rank_mod_p_np(a: np.ndarray, p: int) -> int:
    m, ncols = a.shape
    rank = 0
    for c in range(ncols):
        if rank == m:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, c]), -1, p)
        a[rank] = (a[rank] * inv) % p
        below = a[rank + 1:, c].copy()
        mask = below != 0
        if mask.any():
            idx = np.nonzero(mask)[0] + rank + 1
            a[idx] = (a[idx] - np.outer(below[mask], a[rank])) % p
        rank += 1
    return rank


def rref_field(rows: list[list], ring: Ring) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q (Fractions) or F_p, with pivot columns."""
    if ring.kind == "QQ":
        a = [[Fraction(x) for x in r] for r in rows]
        inv = lambda x: 1 / x  # noqa: E731
        red = lambda x: x  # noqa: E731
    elif ring.kind == "GF":
        p = ring.p
        a = [[int(x) % p for x in r] for r in rows]
        inv = lambda x: pow(x, -1, p)  # noqa: E731
        red = lambda x: x % p  # noqa: E731
    else:
        raise RingError("row reduction needs a field")
    m = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        s = inv(a[r][c])
        a[r] = [red(x * s) for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [red(x - f * y) for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a[:r], pivots


# ---------------------------------------------------------------- sparse engine


class SparseEliminator:
    """Sparse row elimination with unit pivots.

    Over ``ZZ`` and ``QQ`` only pivots equal to +-1 are used, so every step is
    unimodular: the quotient ``Z^cols / rowspan`` is preserved and the
    remaining *core* carries all the torsion.  Over ``GF(p)`` every nonzero
    entry is a unit, so the elimination runs to completion unless the fill
    grows too dense, in which case the rest is handed to FLINT as well.

    Args:
        rows: Sparse integer rows (column -> value); zero values are ignored.
        ncols: Number of columns.
        ring: Ring over which pivots are judged.
    """

    def __init__(self, rows: Iterable[Mapping[int, int]], ncols: int, ring: Ring):
        self.ncols = ncols
        self.ring = ring
        p = ring.p if ring.kind == "GF" else 0
        self.rows: list[SparseRow] = []
        for r in rows:
            if p:
                d = {c: v % p for c, v in r.items() if v % p}
            else:
                d = {c: v for c, v in r.items() if v}
            if d:
                self.rows.append(d)
        self.pivots = 0
        self.pivot_rows: list[tuple[int, SparseRow]] = []

    def _unit(self, v: int) -> bool:
        if self.ring.kind == "GF":
            return v != 0
        return v == 1 or v == -1

    def run(self, keep_pivot_rows: bool = False, fill_limit: float = 0.25) -> None:
        """Eliminate greedily until no usable pivot remains.

        Args:
            keep_pivot_rows: Record retired pivot rows (as they were at pivot
                time) in ``pivot_rows``.
            fill_limit: Stop early when the active part becomes denser than
                this fraction; the rest is then cheaper as a dense core.
        """
        p = self.ring.p if self.ring.kind == "GF" else 0
        rows = self.rows
        alive = [True] * len(rows)
        colidx: dict[int, set[int]] = {}
        for i, r in enumerate(rows):
            for c in r:
                colidx.setdefault(c, set()).add(i)
        heap = [(len(r), i) for i, r in enumerate(rows)]
        heapq.heapify(heap)
        nnz = sum(len(r) for r in rows)
        active_rows = len(rows)
        active_cols = len(colidx)
        while heap:
            ln, i = heapq.heappop(heap)
            if not alive[i] or ln != len(rows[i]):
                continue
            row = rows[i]
            if not row:
                alive[i] = False
                active_rows -= 1
                continue
            best = None
            for c, v in row.items():
                if self._unit(v):
                    k = len(colidx[c])
                    if best is None or k < best[0]:
                        best = (k, c)
                        if k == 1:
                            break
            if best is None:
                continue  # no unit in this row; it stays in the core
            c = best[1]
            v = row[c]
            alive[i] = False
            active_rows -= 1
            self.pivots += 1
            if keep_pivot_rows:
                self.pivot_rows.append((c, dict(row)))
            for cc in row:
                colidx[cc].discard(i)
            nnz -= len(row)
            inv = pow(v, -1, p) if p else v  # v = +-1 over ZZ
            for j in list(colidx[c]):
                other = rows[j]
                f = other[c] * inv
                if p:
                    f %= p
                nnz -= len(other)
                for cc, w in row.items():
                    nv = other.get(cc, 0) - f * w
                    if p:
                        nv %= p
                    if nv:
                        if cc not in other:
                            colidx[cc].add(j)
                        other[cc] = nv
                    elif cc in other:
                        del other[cc]
                        colidx[cc].discard(j)
                nnz += len(other)
                heapq.heappush(heap, (len(other), j))
            del colidx[c]
            active_cols -= 1
            if (active_rows > 200 and active_cols > 200
                    and nnz > fill_limit * active_rows * active_cols):
                break
        self.rows = [r for i, r in enumerate(rows) if alive[i] and r]

    def core(self) -> tuple[list[list[int]], list[int]]:
        """Dense core of the remaining rows and the columns they touch."""
        cols = sorted({c for r in self.rows for c in r})
        pos = {c: k for k, c in enumerate(cols)}
        dense = []
        for r in self.rows:
            d = [0] * len(cols)
            for c, v in r.items():
                d[pos[c]] = v
            dense.append(d)
        return dense, cols


def _flint_rank(dense: list[list[int]], ring: Ring) -> int:
    if not dense or not dense[0]:
        return 0
    if ring.kind == "GF":
        return flint.nmod_mat(dense, ring.p).rank()
    return flint.fmpz_mat(dense).rank()


def sparse_rank(rows: Iterable[Mapping[int, int]], ncols: int, ring: Ring) -> int:
    """Rank of a sparse integer matrix over ``QQ`` or ``GF(p)``."""
    if not ring.is_field:
        raise RingError("rank over ZZ is not defined; use smith_normal_form")
    el = SparseEliminator(rows, ncols, ring)
    el.run()
    dense, _ = el.core()
    return el.pivots + _flint_rank(dense, ring)


def sparse_invariant_factors(rows: Iterable[Mapping[int, int]], ncols: int) -> list[int]:
    """Nonzero invariant factors of the row lattice of a sparse integer matrix."""
    el = SparseEliminator(rows, ncols, ZZ)
    el.run()
    dense, _ = el.core()
    return [1] * el.pivots + _snf_dense(dense)


def row_space_basis(rows: Iterable[Mapping[int, int]], ncols: int, ring: Ring) -> list[SparseRow]:
    """Basis of the row space (a lattice basis over ``ZZ``) as sparse rows.

    Unit-pivot rows are kept as they stood when they were retired; the
    leftover core is finished by FLINT (RREF over a field, HNF over ``ZZ``).
    """
    el = SparseEliminator(rows, ncols, ring)
    el.run(keep_pivot_rows=True)
    out = [r for _, r in el.pivot_rows]
    dense, cols = el.core()
    if not dense or not cols:
        return out
    if ring.kind == "GF":
        red, rk = flint.nmod_mat(dense, ring.p).rref()
        red_rows = [[int(x) for x in r] for r in red.table()[:rk]]
    elif ring.kind == "QQ":
        red, _den, rk = flint.fmpz_mat(dense).rref()
        red_rows = [[int(x) for x in r] for r in red.tolist()[:rk]]
    else:
        red_rows = [[int(x) for x in r] for r in flint.fmpz_mat(dense).hnf().tolist()]
    for r in red_rows:
        d = {cols[j]: v for j, v in enumerate(r) if v}
        if d:
            out.append(d)
    return out


def _snf_dense(dense: list[list[int]]) -> list[int]:
    if not dense or not dense[0]:
        return []
    s = flint.fmpz_mat(dense).snf()
    k = min(s.nrows(), s.ncols())
    return [abs(int(s[i, i])) for i in range(k) if s[i, i] != 0]


def smith_normal_form_reference(rows: list[list[int]]) -> list[int]:
    """Invariant factors by textbook row/column reduction (slow; test oracle)."""
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    out = []
    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        a[t], a[i] = a[i], a[t]
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        for r in a:
                            r[t], r[j] = r[j], r[t]
                        done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % a[t][t]), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        out.append(abs(a[t][t]))
        t += 1
    return out


# ---------------------------------------------------------------- public ops


def _to_sparse(rows: list[list[int]]) -> list[SparseRow]:
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


def rank_of(m: ExactMatrix) -> int:
    """Rank of a matrix over a field.

    Raises:
        RingError: If the matrix lives over ``ZZ``.
    """
    if not m.ring.is_field:
        raise RingError("rank over ZZ is not defined; use smith_normal_form")
    if m.rows == 0 or m.cols == 0:
        return 0
    rows = m.integer_rows()
    if m.rows * m.cols > _DENSE_LIMIT:
        return sparse_rank(_to_sparse(rows), m.cols, m.ring)
    if m.ring.kind == "QQ":
        return bareiss_rank(rows)
    return rank_mod_p_dense(rows, m.ring.p)


def kernel_basis(m: ExactMatrix) -> list[tuple]:
    """Basis of the right kernel ``{x : m x = 0}`` as column-vector tuples."""
    if not m.ring.is_field:
        raise RingError("kernel basis needs a field")
    if m.rows == 0:
        one = m.ring.coerce(1)
        zero = m.ring.coerce(0)
        return [tuple(one if i == j else zero for i in range(m.cols)) for j in range(m.cols)]
    red, pivots = rref_field(m.integer_rows(), m.ring)
    return _kernel_from_rref(red, pivots, m.cols, m.ring)


def _kernel_from_rref(red, pivots, ncols, ring) -> list[tuple]:
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [ring.coerce(0)] * ncols
        v[f] = ring.coerce(1)
        for row, pc in zip(red, pivots):
            v[pc] = ring.coerce(-row[f])
        basis.append(tuple(v))
    return basis


def smith_normal_form(m: ExactMatrix) -> list[int]:
    """Nonzero invariant factors ``d1 | d2 | ...`` of an integer matrix."""
    if m.ring.kind == "GF":
        raise RingError("Smith normal form needs integer entries")
    rows = m.integer_rows() if m.ring.kind == "ZZ" else None
    if rows is None:
        if any(x.denominator != 1 for r in m.entries for x in r):
            raise RingError("Smith normal form needs integer entries")
        rows = [[int(x) for x in r] for r in m.entries]
    if m.rows == 0 or m.cols == 0:
        return []
    return sparse_invariant_factors(_to_sparse(rows), m.cols)


def torsion(m: ExactMatrix) -> list[int]:
    """Torsion orders of ``Z^cols / rowspan(m)`` (invariant factors above 1)."""
    return [d for d in smith_normal_form(m) if d > 1]


# ---------------------------------------------------------------- power series


def mobius(n: int) -> int:
    """Number-theoretic Moebius function."""
    res = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            res = -res
        d += 1
    return -res if n > 1 else res


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def series_mul(a: Sequence[int], b: Sequence[int], order: int) -> list[int]:
    """Product of two power series truncated to degree ``order``."""
    out = [0] * (order + 1)
    for i, x in enumerate(a[:order + 1]):
        if x:
            for j, y in enumerate(b[:order + 1 - i]):
                out[i + j] += x * y
    return out


def expand_lcs_product(phis: Sequence[int], order: int) -> list[int]:
    """Coefficients of ``prod_r (1 - t^r)^phi_r`` up to ``t^order``."""
    out = [1] + [0] * order
    for r, e in enumerate(phis, start=1):
        if r > order or e == 0:
            continue
        factor = [0] * (order + 1)
        for k in range(order // r + 1):
            factor[k * r] = (-1) ** k * _binom_general(e, k)
        out = series_mul(out, factor, order)
    return out


def _binom_general(e: int, k: int) -> int:
    num = 1
    for i in range(k):
        num *= e - i
    den = 1
    for i in range(2, k + 1):
        den *= i
    return num // den


def solve_exponents(series: Sequence[int], order: int | None = None) -> list[int]:
    """Exponents ``phi_1..phi_R`` with ``prod (1 - t^r)^phi_r = series (mod t^(R+1))``.

    Args:
        series: Integer coefficients ``c_0..c_k`` with ``c_0 = 1``; missing
            higher coefficients are zero.
        order: Truncation order ``R``; defaults to ``len(series) - 1``.

    Raises:
        ValueError: If ``c_0 != 1``.
        NonIntegralExponent: If some ``phi_r`` is not an integer.
    """
    if not series or series[0] != 1:
        raise ValueError("series must start with constant term 1")
    R = len(series) - 1 if order is None else order
    c = list(series[:R + 1]) + [0] * max(0, R + 1 - len(series))
    # m*L_m for L = log(series); then m*L_m = -sum_{r | m} r*phi_r
    mL = [0] * (R + 1)
    for m in range(1, R + 1):
        mL[m] = m * c[m] - sum(mL[j] * c[m - j] for j in range(1, m))
    phis = []
    for r in range(1, R + 1):
        total = sum(mobius(r // d) * -mL[d] for d in divisors(r))
        if total % r:
            raise NonIntegralExponent(r, Fraction(total, r))
        phis.append(total // r)
    return phis


# ---------------------------------------------------------------- batched F_p


@numba.njit(cache=True)
def _batch_rank_kernel(mats, p, inv):  # pragma: no cover - compiled
    b, m, k = mats.shape
    out = np.zeros(b, dtype=np.int64)
    work = np.empty((m, k), dtype=np.int64)
    for t in range(b):
        for i in range(m):
            for j in range(k):
                work[i, j] = mats[t, i, j] % p
        rank = 0
        for c in range(k):
            if rank == m:
                break
            piv = -1
            for i in range(rank, m):
                if work[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for j in range(c, k):
                    tmp = work[rank, j]
                    work[rank, j] = work[piv, j]
                    work[piv, j] = tmp
            s = inv[work[rank, c]]
            for j in range(c, k):
                work[rank, j] = work[rank, j] * s % p
            for i in range(rank + 1, m):
                f = work[i, c]
                if f != 0:
                    for j in range(c, k):
                        work[i, j] = (work[i, j] - f * work[rank, j]) % p
            rank += 1
        out[t] = rank
    return out


@lru_cache(maxsize=None)
def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    return inv


def batch_rank_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of small matrices of shape ``(B, m, k)``.

    Intended for exhaustive enumeration with small primes (``p < 2^16``).
    """
    if p >= 2**16:
        raise RingError("batched kernel expects a small prime")
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    if mats.ndim != 3:
        raise ValueError("expected a 3-dimensional stack")
    if mats.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    if mats.shape[1] == 0 or mats.shape[2] == 0:
        return np.zeros(mats.shape[0], dtype=np.int64)
    return _batch_rank_kernel(mats, p, _inverse_table(p))


# ---------------------------------------------------------------- dense F_p on BLAS

# float64 holds integers exactly below 2^53; with entries below 2^19 every
# partial sum of at most 2^14 products stays below that bound.
BLAS_PRIME = 524287
_BLAS_P_MAX = 1 << 19
_BLAS_INNER = 1 << 14


def _check_blas_prime(p: int) -> None:
    if not (2 <= p < _BLAS_P_MAX and _is_prime(p)):
        raise RingError(f"dense F_p kernels need a prime below 2^19, got {p}")


def mm_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for float64 arrays holding residues in ``[0, p)``."""
    k = a.shape[-1]
    if k <= _BLAS_INNER:
        return np.mod(a @ b, p)
    out = np.zeros(a.shape[:-1] + b.shape[-1:])
    for s in range(0, k, _BLAS_INNER):
        out += np.mod(a[..., s:s + _BLAS_INNER] @ b[s:s + _BLAS_INNER], p)
        np.mod(out, p, out=out)
    return out


class ModpEchelon:
    """Incrementally built echelon basis over ``GF(p)``.

    Rows are float64 residues; all products go through :func:`mm_mod`, so the
    arithmetic is exact integer arithmetic carried by BLAS.  The basis is a
    list of blocks; each block is in reduced form on its own pivots and is
    zero on the pivots of every older block.  Reduction therefore runs block
    by block in creation order, and full back-substitution is deferred to
    :meth:`classes`.

    Args:
        ncols: Width of the rows.
        p: Prime below ``2^19``.
    """

    def __init__(self, ncols: int, p: int):
        _check_blas_prime(p)
        self.ncols = ncols
        self.p = p
        self.blocks: list[tuple[np.ndarray, np.ndarray]] = []
        self.rank = 0

    @property
    def pivots(self) -> np.ndarray:
        if not self.blocks:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([piv for _, piv in self.blocks])

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Residues of ``x`` modulo the current row space."""
        x = np.mod(x, self.p)
        for rows, piv in self.blocks:
            x -= mm_mod(x[:, piv], rows, self.p)
            np.mod(x, self.p, out=x)
        return x

    def add(self, x: np.ndarray) -> None:
        """Add the rows of ``x`` (integer-valued float64) to the span."""
        p = self.p
        for start in range(0, len(x), 1024):
            if self.rank == self.ncols:
                return
            rest = self.reduce(x[start:start + 1024])
            rest = rest[np.any(rest != 0, axis=1)]
            while len(rest) and self.rank < self.ncols:
                new, piv = self._eliminate(rest[:64])
                rest = rest[64:]
                if len(piv):
                    self._push(new, piv)
                    if len(rest):
                        rest = np.mod(rest - mm_mod(rest[:, piv], new, p), p)
                        rest = rest[np.any(rest != 0, axis=1)]

    def _push(self, rows: np.ndarray, piv: np.ndarray) -> None:
        self.rank += len(piv)
        if self.blocks and len(self.blocks[-1][1]) + len(piv) <= 2048:
            # grow the newest block: reduce it on the new pivots first
            old, opiv = self.blocks.pop()
            old = np.mod(old - mm_mod(old[:, piv], rows, self.p), self.p)
            rows, piv = np.vstack([old, rows]), np.concatenate([opiv, piv])
        self.blocks.append((rows, piv))

    def _eliminate(self, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = self.p
        a = a[np.any(a != 0, axis=1)].copy()
        piv = []
        r = 0
        while r < len(a):
            nz = np.flatnonzero(a[r])
            if not len(nz):
                a[r] = a[-1]
                a = a[:-1]
                continue
            c = int(nz[0])
            a[r] = np.mod(a[r] * pow(int(a[r, c]), -1, p), p)
            f = a[:, c].copy()
            f[r] = 0
            if np.any(f):
                a -= np.outer(f, a[r])
                np.mod(a, p, out=a)
            piv.append(c)
            r += 1
        return a, np.array(piv, dtype=np.int64)

    def reduced_rows(self) -> tuple[np.ndarray, np.ndarray]:
        """Fully reduced row echelon form ``(rows, pivots)``."""
        done: list[np.ndarray] = []
        done_piv = np.zeros(0, dtype=np.int64)
        for rows, piv in reversed(self.blocks):
            if len(done_piv):
                stacked = np.vstack(done)
                rows = np.mod(rows - mm_mod(rows[:, done_piv], stacked, self.p), self.p)
            done.insert(0, rows)
            done_piv = np.concatenate([piv, done_piv])
        if not done:
            return np.zeros((0, self.ncols)), done_piv
        return np.vstack(done), done_piv

    def classes(self) -> tuple[np.ndarray, np.ndarray]:
        """Free columns and the matrix sending each column to its class.

        Returns:
            ``(free, cls)`` where ``free`` lists non-pivot columns and row ``j``
            of ``cls`` gives the coordinates of unit vector ``e_j`` in the
            quotient, expressed in the basis indexed by ``free``.
        """
        rows, piv = self.reduced_rows()
        mask = np.ones(self.ncols, dtype=bool)
        mask[piv] = False
        free = np.flatnonzero(mask)
        cls = np.zeros((self.ncols, len(free)))
        cls[free, np.arange(len(free))] = 1
        if len(piv):
            cls[piv] = np.mod(-rows[:, free], self.p)
        return free, cls

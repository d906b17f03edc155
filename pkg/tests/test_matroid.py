"""Matroid construction, rank and closure, and the lattice of flats."""

import random
from collections import Counter
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mres import catalog
from mres.matroid import (
    Matroid, MatroidError, build_flat_lattice, direct_sum, elems_of,
    from_circuits, from_lines, graphic, is_supersolvable, mask_of, realization, uniform,
)
from mres.os_algebra import convolve

from conftest import SEEDS, k4, matroids, random_matroid, random_vectors, u23_sum


def circuits_of(m: Matroid) -> set[frozenset[int]]:
    return {frozenset(elems_of(c)) for c in m.circuits}


def brute_flats(m: Matroid) -> dict[int, int]:
    """All flats with their ranks, by testing every subset."""
    out = {}
    for s in range(1 << m.n):
        if all(m.rank_of_set(s | 1 << e) > m.rank_of_set(s) for e in range(m.n) if not s >> e & 1):
            out[s] = m.rank_of_set(s)
    return out


def brute_mobius(flats: dict[int, int]) -> dict[int, int]:
    mu = {}
    for x in sorted(flats, key=lambda f: (flats[f], f)):
        below = [y for y in mu if y & x == y and y != x]
        mu[x] = 1 if not below and flats[x] == min(flats.values()) else -sum(mu[y] for y in below)
    return mu


class TestConstruction:
    def test_uniform_circuits(self):
        assert circuits_of(uniform(2, 3)) == {frozenset({0, 1, 2})}

    def test_triangle_is_u23(self):
        assert graphic(3, [(0, 1), (1, 2), (0, 2)]) == uniform(2, 3)

    def test_nonfano_lines(self, nonfano):
        lat = build_flat_lattice(nonfano)
        assert nonfano.n == 7
        assert Counter(f.size for f in lat.flats(2)) == {3: 6, 2: 3}

    def test_lines_reject_double_intersection(self):
        with pytest.raises(MatroidError):
            from_lines(5, [[0, 1, 2], [0, 1, 3]])

    def test_non_simple_rejected(self):
        with pytest.raises(MatroidError):
            realization([[1, 2, 0], [0, 0, 1]])
        with pytest.raises(MatroidError):
            graphic(3, [(0, 1), (1, 0)])
        with pytest.raises(MatroidError):
            uniform(1, 3)

    def test_circuit_axioms_checked(self):
        with pytest.raises(MatroidError, match="contains"):
            from_circuits(4, [[0, 1, 2], [0, 1, 2, 3]])
        with pytest.raises(MatroidError, match="elimination"):
            from_circuits(5, [[0, 1, 2], [0, 3, 4]])

    def test_k4_cycles(self):
        m = k4()
        assert Counter(len(c) for c in circuits_of(m)) == {3: 4, 4: 3}

    @pytest.mark.parametrize("seed", range(20))
    def test_generic_realization_is_uniform(self, seed):
        rng = random.Random(seed)
        r, n = rng.randint(2, 4), rng.randint(4, 7)
        cols = random_vectors(rng, n, r, span=50)
        m = realization([[c[i] for c in cols] for i in range(r)])
        if m != uniform(r, n):
            # a degenerate draw has a small minor vanishing; the circuits must say so
            assert any(sympy.Matrix([[cols[j][i] for j in sub] for i in range(r)]).rank() < r
                       for sub in combinations(range(n), r))

    def test_realization_matches_lines(self):
        doc = catalog.document("nonfano")
        assert realization(doc["realization"]) == catalog.load("nonfano")


class TestRankClosure:
    def test_u23_closure(self):
        assert uniform(2, 3).closure(mask_of([0, 1])) == 0b111

    def test_spanning_tree(self):
        m = k4()
        tree = mask_of([0, 1, 2])  # edges 12, 13, 14
        assert m.rank_of_set(tree) == 3 and m.is_independent(tree)

    def test_cross_pair_in_sum(self):
        m = u23_sum()
        s = mask_of([0, 4])
        assert m.rank_of_set(s) == 2 and m.closure(s) == s

    @settings(max_examples=80, deadline=None)
    @given(matroids(), st.integers(0, 255))
    def test_closure_properties(self, m, raw):
        s = raw & m.full
        c = m.closure(s)
        assert c & s == s
        assert m.closure(c) == c
        assert m.rank_of_set(c) == m.rank_of_set(s)
        for e in range(m.n):
            assert (m.rank_of_set(s | 1 << e) == m.rank_of_set(s)) == bool(c >> e & 1)
        t = s | (raw >> 3) & m.full
        assert m.closure(t) & c == c

    @pytest.mark.parametrize("seed", range(30))
    def test_rank_matches_sympy(self, seed):
        rng = random.Random(seed)
        r = rng.randint(2, 4)
        cols = random_vectors(rng, rng.randint(r, 7), r)
        m = realization([[c[i] for c in cols] for i in range(r)])
        for s in range(1 << m.n):
            sub = elems_of(s)
            want = sympy.Matrix([[cols[j][i] for j in sub] for i in range(r)]).rank() if sub else 0
            assert m.rank_of_set(s) == want


class TestLattice:
    def test_u23(self):
        lat = build_flat_lattice(uniform(2, 3))
        assert [len(lat.flats(k)) for k in range(3)] == [1, 3, 1]
        assert lat.flats(2)[0].mobius == 2

    def test_boolean(self):
        lat = build_flat_lattice(uniform(3, 3))
        assert [len(lat.flats(k)) for k in range(4)] == [1, 3, 3, 1]
        assert lat.flats(3)[0].mobius == -1

    def test_nonfano_l2(self, nonfano):
        assert len(build_flat_lattice(nonfano).flats(2)) == 9

    @pytest.mark.parametrize("seed", list(SEEDS)[:60])
    def test_against_brute_force(self, seed):
        m = random_matroid(seed, max_n=7)
        lat = build_flat_lattice(m)
        flats = brute_flats(m)
        assert {f.mask: f.rank for f in lat.flats()} == flats
        mu = brute_mobius(flats)
        assert all(f.mobius == mu[f.mask] for f in lat.flats())
        for f in lat.flats(2):
            assert f.mobius == f.size - 1
        sums = lat.characteristic_mobius_sums()
        assert all((-1) ** k * s > 0 for k, s in enumerate(sums))
        for x, y in combinations([f.mask for f in lat.flats()], 2):
            assert (m.rank_of_set(x) + m.rank_of_set(y)
                    >= m.rank_of_set(lat.join(x, y)) + m.rank_of_set(lat.meet(x, y)))

    def test_irreducible_predicates(self):
        lat = build_flat_lattice(u23_sum())
        line = mask_of([0, 1, 2])
        assert not lat.is_irreducible(line, "strict")
        assert lat.is_irreducible(line, "lenient")
        assert lat.is_irreducible(line, "connected")
        cross = mask_of([0, 3])
        assert not lat.is_irreducible(cross, "connected")

    def test_product_census(self):
        names = ["braid-K4", "nonfano", "pappus"]
        for a, b in combinations(names, 2):
            ma, mb = catalog.load(a), catalog.load(b)
            la, lb = build_flat_lattice(ma), build_flat_lattice(mb)
            ls = build_flat_lattice(direct_sum(ma, mb))
            ca = [len(la.flats(k)) for k in range(la.rank + 1)]
            cb = [len(lb.flats(k)) for k in range(lb.rank + 1)]
            assert [len(ls.flats(k)) for k in range(ls.rank + 1)] == convolve(ca, cb)


class TestStructure:
    def test_connectivity(self):
        assert uniform(2, 3).is_connected()
        assert not u23_sum().is_connected()
        assert k4().is_connected()

    @pytest.mark.parametrize("r,n", [(r, n) for n in range(2, 7) for r in range(2, n + 1)])
    def test_uniform_supersolvable(self, r, n):
        assert is_supersolvable(uniform(r, n))[0] == (r in (2, n))

    def test_graphic_chordal(self):
        ok, chain = is_supersolvable(k4())
        assert ok and len(chain) == 4
        lat = build_flat_lattice(k4())
        assert all(lat.by_mask[mask_of(x)].modular for x in chain)
        assert not is_supersolvable(graphic(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))[0]

    def test_nonfano_not_supersolvable(self, nonfano):
        assert not is_supersolvable(nonfano)[0]

    def test_localization_is_uniform(self, nonfano):
        for f in build_flat_lattice(nonfano).flats(2):
            loc = nonfano.localization(f.mask)
            assert loc == uniform(2, f.size)

    def test_localization_needs_flat(self):
        with pytest.raises(MatroidError):
            uniform(2, 3).localization(0b011)

    def test_direct_sum(self):
        assert circuits_of(u23_sum()) == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}
        empty = Matroid(0, [])
        assert direct_sum(k4(), empty) == k4() == direct_sum(empty, k4())

    def test_line_closed(self):
        m = uniform(2, 3)
        assert m.is_line_closed(m.full)
        assert not m.is_line_closed(0b011)

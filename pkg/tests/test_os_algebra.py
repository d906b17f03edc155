"""Orlik-Solomon algebras: boundary, NBC bases, products, Betti numbers."""

import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mres import catalog
from mres.linalg import GF, QQ, rank_mod_p_dense, sparse_rank
from mres.matroid import direct_sum, uniform
from mres.os_algebra import (
    OSAlgebra, betti_numbers, boundary, circuit_boundary, convolve, exterior_product,
    poincare_polynomial, projective_dims, verified_betti_numbers,
)

from conftest import SEEDS, k4, matroids, random_matroid, random_pair


def in_ideal(a: OSAlgebra, x: dict, k: int) -> bool:
    """Membership of a degree-k exterior element in the OS ideal, by rank."""
    idx = {t: i for i, t in enumerate(combinations(range(a.n), k))}
    span = [{idx[m]: c for m, c in y.items()} for y in a.ideal_span(k)]
    vec = {idx[m]: c for m, c in x.items() if c}
    return sparse_rank(span + [vec], len(idx), QQ) == sparse_rank(span, len(idx), QQ)


def random_element(rng: random.Random, a: OSAlgebra, k: int) -> dict:
    monos = list(combinations(range(a.n), k))
    picks = rng.sample(monos, min(len(monos), 3))
    return {m: rng.randint(-3, 3) for m in picks}


class TestBoundary:
    def test_two_terms(self):
        assert circuit_boundary((0, 1)) == {(1,): 1, (0,): -1}

    def test_three_terms(self):
        assert circuit_boundary((0, 1, 2)) == {(1, 2): 1, (0, 2): -1, (0, 1): 1}

    def test_square_zero(self):
        assert boundary(circuit_boundary((0, 1, 2))) == {}

    @settings(max_examples=100, deadline=None)
    @given(st.sets(st.integers(0, 7), min_size=1, max_size=6))
    def test_square_zero_random(self, s):
        assert boundary(boundary({tuple(sorted(s)): 1})) == {}

    @settings(max_examples=100, deadline=None)
    @given(st.sets(st.integers(0, 6), max_size=4), st.sets(st.integers(0, 6), max_size=4))
    def test_leibniz(self, s, t):
        a, b = tuple(sorted(s)), tuple(sorted(t))
        lhs = boundary(exterior_product({a: 1}, {b: 1}))
        rhs = exterior_product(boundary({a: 1}), {b: 1})
        for m, c in exterior_product({a: 1}, boundary({b: 1})).items():
            rhs[m] = rhs.get(m, 0) + (-1) ** len(a) * c
        assert lhs == {m: c for m, c in rhs.items() if c}


class TestBases:
    def test_u23(self):
        assert OSAlgebra(uniform(2, 3)).dim(2) == 2

    def test_boolean(self):
        assert OSAlgebra(uniform(3, 3)).dim(2) == 3

    def test_k4(self):
        assert OSAlgebra(k4()).dim(2) == 11

    @pytest.mark.parametrize("ring", [QQ, GF(2), GF(3), GF(5)])
    @pytest.mark.parametrize("name", ["braid-K4", "nonfano", "pappus", "nonpappus"])
    def test_routes_agree(self, name, ring):
        m = catalog.load(name)
        assert verified_betti_numbers(m, ring) == betti_numbers(m)

    @pytest.mark.parametrize("seed", list(SEEDS)[:40])
    def test_routes_agree_random(self, seed):
        m = random_matroid(seed, max_n=7)
        assert verified_betti_numbers(m) == betti_numbers(m)

    def test_boundary_preserves_ideal(self, nonfano):
        a = OSAlgebra(nonfano)
        for k in (2, 3):
            for x in a.ideal_span(k):
                assert in_ideal(a, boundary(x), k - 1)


class TestBetti:
    def test_k4(self):
        assert betti_numbers(k4()) == [1, 6, 11, 6]

    @pytest.mark.parametrize("n", range(3, 7))
    def test_rank_two(self, n):
        assert betti_numbers(uniform(2, n)) == [1, n, n - 1]

    def test_nonfano(self, nonfano):
        assert betti_numbers(nonfano)[2] == 15

    def test_poincare(self):
        assert poincare_polynomial(k4()) == convolve(convolve([1, 1], [1, 2]), [1, 3])

    @pytest.mark.parametrize("seed", list(SEEDS)[:40])
    def test_direct_sum(self, seed):
        a, b = random_pair(seed)
        assert betti_numbers(direct_sum(a, b)) == convolve(betti_numbers(a), betti_numbers(b))


class TestProduct:
    def test_unit(self):
        a = OSAlgebra(k4())
        x = {(0, 3): 2, (1, 2): -1}
        assert a.multiply({(): 1}, x) == a.reduce(x)

    def test_square_zero(self):
        a = OSAlgebra(k4())
        assert a.multiply({(0,): 1}, {(0,): 1}) == {}

    def test_triangle_relation(self):
        a = OSAlgebra(uniform(2, 3))
        rel = a.reduce({(0, 1): 1, (0, 2): -1, (1, 2): 1})
        assert rel == {}

    @pytest.mark.parametrize("seed", list(SEEDS)[:30])
    def test_commutativity_and_representatives(self, seed):
        rng = random.Random(seed)
        m = random_matroid(seed, max_n=7)
        a = OSAlgebra(m)
        for p in range(m.rank + 1):
            for q in range(m.rank + 1 - p):
                x, y = random_element(rng, a, p), random_element(rng, a, q)
                xy, yx = a.multiply(x, y), a.multiply(y, x)
                assert xy == {mm: (-1) ** (p * q) * c for mm, c in yx.items()}
                raw = exterior_product(x, y)
                diff = dict(raw)
                for mm, c in xy.items():
                    diff[mm] = diff.get(mm, 0) - c
                if p + q <= m.n:
                    assert in_ideal(a, diff, p + q)
                assert all(a.is_nbc(mm) for mm in xy)


class TestProjective:
    def test_k4(self):
        assert projective_dims(k4()) == [1, 5, 6]

    def test_boolean(self):
        assert projective_dims(uniform(2, 2)) == [1, 1]

    def test_nonfano_char_seven(self, nonfano):
        # 7 divides n here, so no factorization is assumed; dense kernel oracle
        a = OSAlgebra(nonfano, GF(7))
        want = [1]
        for k in (1, 2, 3):
            dense = [[0] * a.dim(k) for _ in range(a.dim(k - 1))]
            for j, col in enumerate(a.boundary_map(k)):
                for i, v in col.items():
                    dense[i][j] = v
            want.append(a.dim(k) - rank_mod_p_dense(dense, 7))
        while want[-1] == 0:
            want.pop()
        assert projective_dims(nonfano, GF(7)) == want == [1, 6, 9]

    @settings(max_examples=40, deadline=None)
    @given(matroids(max_n=7))
    def test_halving(self, m):
        b = betti_numbers(m)
        pd = projective_dims(m)
        pd += [0] * (len(b) - len(pd))
        assert convolve([1, 1], pd)[: len(b)] == b

    def test_quadratic_probe_supersolvable(self):
        for m in (k4(), uniform(2, 5), uniform(3, 3)):
            assert OSAlgebra(m).quadratic_probe(3)

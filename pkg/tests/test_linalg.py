"""Exact linear algebra over QQ, GF(p) and ZZ, and power-series utilities."""

from fractions import Fraction
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from mres.linalg import (
    GF, QQ, ZZ, ExactMatrix, ModpEchelon, NonIntegralExponent, RingError, bareiss_rank,
    batch_rank_mod_p, expand_lcs_product, kernel_basis, parse_ring, rank_mod_p_dense, rank_of,
    smith_normal_form, smith_normal_form_reference, solve_exponents, sparse_invariant_factors,
    sparse_rank, torsion,
)

from conftest import witt_by_brute_force


small_ints = st.integers(min_value=-4, max_value=4)


def int_matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)))


class TestRings:
    def test_parse_variants(self):
        assert parse_ring("Q") == QQ and parse_ring("ZZ") == ZZ
        assert parse_ring("F5") == parse_ring("GF(5)") == parse_ring("p=5") == GF(5)

    @pytest.mark.parametrize("text", ["F4", "GF1", "R", "F"])
    def test_parse_rejects(self, text):
        with pytest.raises(RingError):
            parse_ring(text)

    def test_scalars_normalised(self):
        assert QQ.coerce("6/4") == Fraction(3, 2)
        assert GF(7).coerce(-1) == 6
        assert GF(7).coerce(Fraction(1, 2)) == 4
        with pytest.raises(RingError):
            ZZ.coerce(Fraction(1, 2))


class TestRank:
    def test_identity(self):
        assert rank_of(ExactMatrix.identity(3)) == 3

    def test_zero_over_f2(self):
        assert rank_of(ExactMatrix.zeros(4, 7, GF(2))) == 0

    def test_proportional_rows(self):
        assert rank_of(ExactMatrix.from_rows([[1, 2], [2, 4]])) == 1

    def test_rejects_integers(self):
        with pytest.raises(RingError):
            rank_of(ExactMatrix.identity(2, ZZ))

    def test_characteristic_matters(self):
        m = [[1, 1], [1, -1]]
        assert rank_of(ExactMatrix.from_rows(m)) == 2
        assert rank_of(ExactMatrix.from_rows(m, GF(2))) == 1

    @settings(max_examples=60, deadline=None)
    @given(int_matrices())
    def test_bareiss_matches_sympy(self, rows):
        assert bareiss_rank([r[:] for r in rows]) == sympy.Matrix(rows).rank()

    @settings(max_examples=60, deadline=None)
    @given(int_matrices(), st.sampled_from([2, 3, 5, 7]))
    def test_modp_routes_agree(self, rows, p):
        dense = rank_mod_p_dense([r[:] for r in rows], p)
        sparse = sparse_rank([{j: v for j, v in enumerate(r) if v} for r in rows], len(rows[0]), GF(p))
        batched = int(batch_rank_mod_p(np.array([rows], dtype=np.int64) % p, p)[0])
        assert dense == sparse == batched
        assert dense == rank_of(ExactMatrix.from_rows(rows, GF(p)))

    @pytest.mark.parametrize("p", [2, 3, 7, 524287])
    def test_echelon_matches_dense(self, p):
        rng = np.random.default_rng(p)
        for _ in range(5):
            rows, cols = rng.integers(1, 120), rng.integers(1, 90)
            a = rng.integers(0, p, size=(rows, cols))
            a[rng.random(a.shape) < 0.6] = 0
            ech = ModpEchelon(cols, p)
            ech.add(a.astype(np.float64))
            assert ech.rank == rank_mod_p_dense(a.tolist(), p)


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        assert kernel_basis(ExactMatrix.identity(4)) == []

    def test_zero_matrix(self):
        ker = kernel_basis(ExactMatrix.zeros(2, 3))
        assert len(ker) == 3
        assert rank_of(ExactMatrix.from_rows(ker)) == 3

    def test_sum_zero_hyperplane(self):
        ker = kernel_basis(ExactMatrix.from_rows([[1, 1, 1]]))
        assert len(ker) == 2
        assert all(sum(v) == 0 for v in ker)

    @settings(max_examples=60, deadline=None)
    @given(int_matrices(), st.sampled_from([QQ, GF(2), GF(5)]))
    def test_rank_nullity(self, rows, ring):
        m = ExactMatrix.from_rows(rows, ring)
        ker = kernel_basis(m)
        assert rank_of(m) + len(ker) == m.cols
        for v in ker:
            for row in m.entries:
                s = sum(a * b for a, b in zip(row, v))
                assert (s % ring.p if ring.kind == "GF" else s) == 0
        if ker:
            assert rank_of(ExactMatrix.from_rows(ker, ring)) == len(ker)


class TestSmith:
    def test_identity(self):
        assert smith_normal_form(ExactMatrix.identity(2, ZZ)) == [1, 1]

    def test_diag(self):
        assert smith_normal_form(ExactMatrix.from_rows([[2, 0], [0, 0]], ZZ)) == [2]
        assert torsion(ExactMatrix.from_rows([[2, 0], [0, 3]], ZZ)) == [6]

    def test_rejects_prime_field(self):
        with pytest.raises(RingError):
            smith_normal_form(ExactMatrix.identity(2, GF(3)))

    @settings(max_examples=60, deadline=None)
    @given(int_matrices())
    def test_matches_reference_and_rank(self, rows):
        snf = sparse_invariant_factors([{j: v for j, v in enumerate(r) if v} for r in rows], len(rows[0]))
        assert snf == smith_normal_form_reference([r[:] for r in rows])
        assert len(snf) == sympy.Matrix(rows).rank()
        assert all(b % a == 0 for a, b in zip(snf, snf[1:]))


class TestSeries:
    def test_braid_series(self):
        assert solve_exponents([1, -6, 11, -6], 4) == [6, 4, 10, 21]
        assert [sum(witt_by_brute_force(j, r) for j in (1, 2, 3)) for r in range(1, 5)] == [6, 4, 10, 21]

    def test_one_generator(self):
        assert solve_exponents([1, -1], 5) == [1, 0, 0, 0, 0]

    def test_free_on_two(self):
        assert solve_exponents([1, -2], 7) == [witt_by_brute_force(2, r) for r in range(1, 8)]

    def test_non_integral(self):
        with pytest.raises(NonIntegralExponent) as info:
            solve_exponents([1, 0, Fraction(1, 2)], 2)
        assert info.value.index == 2

    def test_constant_term(self):
        with pytest.raises(ValueError):
            solve_exponents([2, 1])

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 8).flatmap(lambda R: st.tuples(
        st.just(R), st.lists(st.integers(0, 6), min_size=R, max_size=R))))
    def test_left_inverse(self, case):
        R, phis = case
        assert solve_exponents(expand_lcs_product(phis, R), R) == phis

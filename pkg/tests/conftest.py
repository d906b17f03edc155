"""Shared helpers: random small simple matroids and catalog fixtures."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import strategies as st

from mres import catalog
from mres.matroid import Matroid, complete_graph_edges, direct_sum, graphic, realization, uniform

SEEDS = range(200)


def witt_by_brute_force(n: int, r: int) -> int:
    """Count Lyndon words of length r over n letters by enumeration."""
    return sum(all(w < w[i:] + w[:i] for i in range(1, r)) for w in product(range(n), repeat=r))


def random_vectors(rng: random.Random, n: int, rank: int, span: int = 2) -> list[list[int]]:
    """Pairwise non-parallel nonzero integer vectors (columns of a realization)."""
    seen: set[tuple[Fraction, ...]] = set()
    cols: list[list[int]] = []
    attempts = 0
    while len(cols) < n and attempts < 10_000:
        attempts += 1
        v = [rng.randint(-span, span) for _ in range(rank)]
        lead = next((x for x in v if x), 0)
        if not lead:
            continue
        key = tuple(Fraction(x, lead) for x in v)
        if key in seen:
            continue
        seen.add(key)
        cols.append(v)
    return cols


def random_matroid(seed: int, max_n: int = 8) -> Matroid:
    """Simple matroid from a random rational realization or a random graph."""
    rng = random.Random(seed)
    if seed % 4 == 3:
        v = rng.randint(3, 5)
        edges = [e for e in combinations(range(v), 2) if rng.random() < 0.7]
        edges = edges[:max_n] or [(0, 1)]
        return graphic(v, edges)
    rank = rng.randint(2, 4)
    n = rng.randint(rank, max_n)
    cols = random_vectors(rng, n, rank)
    matrix = [[c[i] for c in cols] for i in range(rank)]
    return realization(matrix)


def random_pair(seed: int) -> tuple[Matroid, Matroid]:
    rng = random.Random(10_000 + seed)
    a = random_matroid(rng.randrange(10**6), max_n=4)
    b = random_matroid(rng.randrange(10**6), max_n=4)
    return a, b


def matroids(max_n: int = 8):
    return st.integers(0, 10**6).map(lambda s: random_matroid(s, max_n))


def k4() -> Matroid:
    return graphic(4, complete_graph_edges(4))


def u23_sum() -> Matroid:
    return direct_sum(uniform(2, 3), uniform(2, 3))


@pytest.fixture(scope="session")
def braid():
    return catalog.load("braid-K4")


@pytest.fixture(scope="session")
def nonfano():
    return catalog.load("nonfano")


@pytest.fixture(scope="session")
def hessian():
    return catalog.load("hessian")


_CRITERIA: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    title = dict(report.user_properties).get("criterion")
    if title and (report.when == "call" or report.failed):
        _CRITERIA.append((title, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for title, outcome in _CRITERIA:
            terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {title}")

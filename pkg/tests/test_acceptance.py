"""Acceptance criteria, one test per criterion.

Each test collects its sub-checks and fails with the list of the ones that
did not hold.  A summary line per criterion is printed at the end of the run.
"""

import json
import random
import time
from itertools import combinations
from math import comb
from pathlib import Path

import networkx as nx
import pytest

from mres import catalog
from mres.linalg import GF, QQ, ZZ, ExactMatrix, expand_lcs_product, rank_of, series_mul
from mres.matroid import (
    ResourceError, build_flat_lattice, complete_graph_edges, direct_sum, graphic,
    is_supersolvable, mask_of, uniform,
)
from mres.lie import (
    chen_closed_form, chen_ranks, glcs_exponents, glcs_graphic, holonomy_ranks, is_decomposable,
    lcs_from_betti, local_chen_rank, local_holonomy_rank,
)
from mres.multinet import (
    MultinetViolation, are_orthogonal, latin_squares, latin_to_matroid, multinet_identities,
    net_to_latin, r1_components, refine_weak, rh_check, same_up_to_relabeling, search_multinets,
    union_point_count, verify_multinet,
)
from mres.os_algebra import (
    OSAlgebra, betti_numbers, boundary, convolve, verified_betti_numbers,
)
from mres.resonance import (
    aomoto_cohomology_dim, resonance_point_set, verify_structure, w1_support_point_set,
)

from conftest import SEEDS, random_matroid, random_pair

GOLDEN = Path(__file__).parent / "golden"
CATALOG = list(catalog.SHIPPED)


class Checks:
    """Sub-check collector: every sub-check runs, failures are listed together."""

    def __init__(self):
        self.failed: list[str] = []
        self.count = 0

    def __call__(self, name: str, ok: bool, detail="") -> bool:
        self.count += 1
        if not ok:
            self.failed.append(f"{name}: {detail}")
        return ok

    def done(self) -> None:
        assert not self.failed, f"{len(self.failed)}/{self.count} sub-checks failed:\n" + "\n".join(
            self.failed)


@pytest.fixture
def checks(request, record_property):
    doc = request.function.__doc__.strip().splitlines()[0]
    record_property("criterion", doc)
    return Checks()


def graphs_on(vertices: int):
    """Every graph on ``vertices`` vertices with at least one edge, up to isomorphism."""
    for g in nx.graph_atlas_g():
        if g.number_of_nodes() == vertices and g.number_of_edges():
            yield g


def has_k4(g) -> bool:
    return max(len(c) for c in nx.find_cliques(g)) >= 4


def test_criterion_01_betti(checks):
    """Criterion 1: Betti numbers and Poincare polynomials."""
    braid = catalog.load("braid-K4")
    checks("braid-K4", betti_numbers(braid) == [1, 6, 11, 6], betti_numbers(braid))
    for n in range(3, 7):
        b = betti_numbers(uniform(2, n))
        checks(f"uniform(2,{n})", b == [1, n, n - 1], b)
    for name in CATALOG:
        want = betti_numbers(catalog.load(name))
        for ring in (QQ, GF(2), GF(3)):
            got = verified_betti_numbers(catalog.load(name), ring)
            checks(f"{name} routes over {ring}", got == want, f"{got} vs {want}")
    checks.done()


def test_criterion_02_supersolvable(checks):
    """Criterion 2: supersolvability of uniform and graphic matroids."""
    for n in range(2, 7):
        for r in range(2, n + 1):
            ok, _ = is_supersolvable(uniform(r, n))
            checks(f"uniform({r},{n})", ok == (r in (2, n)), ok)
    checks("K4 chordal", is_supersolvable(graphic(4, complete_graph_edges(4)))[0])
    c4 = graphic(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    checks("C4 not chordal", not is_supersolvable(c4)[0])
    checks.done()


def test_criterion_03_nonfano_holonomy(checks):
    """Criterion 3: non-Fano holonomy ranks with 2-torsion in degree 4."""
    m = catalog.load("nonfano")
    start = time.perf_counter()
    phis = [r.rank for r in holonomy_ranks(m, 4, QQ)]
    integral = holonomy_ranks(m, 4, ZZ)
    f2 = holonomy_ranks(m, 4, GF(2))[3].rank
    elapsed = time.perf_counter() - start
    checks("phi over Q", phis == [7, 6, 17, 42], phis)
    checks("free rank over Z", [r.rank for r in integral] == [7, 6, 17, 42])
    checks("invariant factors in degree 4", integral[3].invariant_factors == [2],
           integral[3].invariant_factors)
    checks("no torsion below degree 4", all(not r.invariant_factors for r in integral[:3]))
    checks("dimension over F2", f2 == 43, f2)
    checks("runtime under 2 minutes", elapsed < 120, f"{elapsed:.1f}s")
    checks.done()


def test_criterion_04_supersolvable_lcs(checks):
    """Criterion 4: LCS product formula for the braid arrangement."""
    m = catalog.load("braid-K4")
    direct = [r.rank for r in holonomy_ranks(m, 4, QQ, "direct")]
    formula = lcs_from_betti(m, 4)
    checks("direct route", direct == [6, 4, 10, 21], direct)
    checks("Betti product formula", formula == direct, formula)
    edges = complete_graph_edges(4)
    checks("clique formula", glcs_graphic(4, edges, 4) == direct, glcs_graphic(4, edges, 4))
    exps = glcs_exponents(4, edges)
    checks("clique exponents", exps == {1: 1, 2: 1, 3: 1}, exps)
    # the exponents are the roots of the Poincare polynomial
    poly = [1]
    for j, e in exps.items():
        for _ in range(e):
            poly = convolve(poly, [1, j])
    checks("exponents factor the Poincare polynomial", poly == betti_numbers(m), poly)
    # and they give the same series as the LCS product
    lhs = [1, 0, 0, 0, 0]
    for j, e in exps.items():
        for _ in range(e):
            lhs = series_mul(lhs, [1, -j], 4)
    checks("series identity", lhs == expand_lcs_product(direct, 4), lhs)
    checks.done()


def test_criterion_05_chen_ranks(checks):
    """Criterion 5: Chen ranks of rank-2 uniform, complete graphic and non-Fano matroids."""
    for n in range(2, 6):
        got = chen_ranks(uniform(2, n), 8)
        want = [(r - 1) * comb(n + r - 3, r) for r in range(2, 9)]
        checks(f"uniform(2,{n})", got == want, f"{got} vs {want}")
    k4 = chen_ranks(graphic(4, complete_graph_edges(4)), 4)
    checks("K4 theta_4", k4[-1] == 15, k4)
    k5 = chen_ranks(graphic(5, complete_graph_edges(5)), 6)
    literal = [(r - 1) * 30 for r in range(2, 7)]
    checks("K5 theta_r = (r-1)*30 for r <= 6", k5 == literal,
           f"computed {k5}, stated {literal}; the clique closed form gives "
           f"{[chen_closed_form('graphic', (5, complete_graph_edges(5)), r) for r in range(2, 7)]}")
    nf = chen_ranks(catalog.load("nonfano"), 8)[2:]
    checks("non-Fano theta_4..theta_8", nf == [9 * (r - 1) for r in range(4, 9)], nf)
    checks.done()


def test_criterion_06_local_bounds(checks):
    """Criterion 6: local lower bounds on the catalog for r <= 6."""
    for name in CATALOG:
        m = catalog.load(name)
        try:
            phis = [r.rank for r in holonomy_ranks(m, 6, QQ)]
        except ResourceError as exc:
            checks(f"{name} phi_6", False, f"ResourceError: {exc}")
            phis = [r.rank for r in holonomy_ranks(m, 5, QQ)]
        thetas = chen_ranks(m, 6)
        for r in range(2, len(phis) + 1):
            lo = local_holonomy_rank(m, r)
            ok = phis[r - 1] >= lo and (r > 2 or phis[r - 1] == lo)
            checks(f"{name} phi_{r}", ok, f"{phis[r - 1]} vs local {lo}")
        for r in range(2, 7):
            lo = local_chen_rank(m, r)
            ok = thetas[r - 2] >= lo and (r > 2 or thetas[r - 2] == lo)
            checks(f"{name} theta_{r}", ok, f"{thetas[r - 2]} vs local {lo}")
    for n in (4, 5):
        m = graphic(n, complete_graph_edges(n))
        t3 = chen_ranks(m, 3)[1]
        checks(f"K{n} theta_3", t3 == 2 * comb(n + 1, 4) > 2 * comb(n, 3) == local_chen_rank(m, 3),
               f"{t3}, 2 binom({n + 1},4) = {2 * comb(n + 1, 4)}, local {local_chen_rank(m, 3)}")
    checks.done()


def test_criterion_07_decomposable(checks):
    """Criterion 7: decomposable graphic matroids are the K4-free ones."""
    for v in (4, 5):
        for g in graphs_on(v):
            m = graphic(v, list(g.edges()))
            got = is_decomposable(m)
            checks(f"{v} vertices {sorted(g.edges())}", got == (not has_k4(g)), got)
    names = CATALOG + ["uniform-2-5", "uniform-3-5"]
    decomposable = [nm for nm in names if is_decomposable(catalog.load(nm))]
    checks("non-Pappus is decomposable", "nonpappus" in decomposable, decomposable)
    for name in decomposable:
        m = catalog.load(name)
        phis = [r.rank for r in holonomy_ranks(m, 5, QQ)]
        thetas = chen_ranks(m, 5)
        for r in range(2, 6):
            checks(f"{name} phi_{r}", phis[r - 1] == local_holonomy_rank(m, r),
                   f"{phis[r - 1]} vs {local_holonomy_rank(m, r)}")
            checks(f"{name} theta_{r}", thetas[r - 2] == local_chen_rank(m, r),
                   f"{thetas[r - 2]} vs {local_chen_rank(m, r)}")
    checks.done()


def test_criterion_08_resonance_structure(checks):
    """Criterion 8: containment, propagation, top degree and products of resonance."""
    cases = {"braid-K4": catalog.load("braid-K4"), "nonfano": catalog.load("nonfano"),
             "U23+U23": direct_sum(uniform(2, 3), uniform(2, 3))}
    for name, m in cases.items():
        ell = m.rank
        for p in (2, 3):
            rep = verify_structure(m, p)
            for c in rep.checks:
                checks(f"{name} F{p} {c.name}", c.passed, c.detail)
            sets = {q: resonance_point_set(m, p, q, 1, ambient="full").points
                    for q in range(ell + 1)}
            for q, pts in sets.items():
                checks(f"{name} F{p} R^{q} in V-bar", all(sum(a) % p == 0 for a in pts))
            for q in range(1, ell - 1):
                checks(f"{name} F{p} R^{q} in R^{q + 1}", sets[q] <= sets[q + 1])
            if m.is_connected():
                checks(f"{name} F{p} R^{ell - 1} = V-bar", len(sets[ell - 1]) == p ** (m.n - 1),
                       len(sets[ell - 1]))
    one = uniform(2, 3)
    for p in (2, 3):
        parts = {q: resonance_point_set(one, p, q, 1, ambient="full").points for q in range(3)}
        whole = cases["U23+U23"]
        for q in range(whole.rank + 1):
            want = {a + b for i in range(q + 1) if i <= 2 and q - i <= 2
                    for a in parts[i] for b in parts[q - i]}
            got = resonance_point_set(whole, p, q, 1, ambient="full").points
            checks(f"U23+U23 F{p} product formula q={q}", got == want,
                   f"{len(got)} points vs {len(want)}")
    checks.done()


def test_criterion_09_w1_support(checks):
    """Criterion 9: the support of W1 equals the first resonance variety."""
    for name in CATALOG:
        m = catalog.load(name)
        if not any(f.size >= 3 for f in build_flat_lattice(m).flats(2)):
            continue
        for p in (3, 5):
            r1 = resonance_point_set(m, p, 1, 1).points
            w1 = w1_support_point_set(m, p).points
            checks(f"{name} F{p}", r1 == w1, f"{len(r1)} resonant, {len(w1)} in the support")
            if name == "braid-K4" and p == 5:
                checks("braid-K4 F5 census", len(r1) == len(w1) == 121, len(r1))
    checks.done()


def test_criterion_10_multinets(checks):
    """Criterion 10: nets on the braid and Hessian matroids and Latin squares."""
    braid = catalog.load("braid-K4")
    nets = search_multinets(braid, 3, 1, "strict")
    checks("braid-K4 one 3-net", len(nets) == 1 and nets[0].is_net and nets[0].d == 2, len(nets))
    if nets:
        (sq,) = net_to_latin(nets[0])
        checks("braid-K4 Z2 table", same_up_to_relabeling(sq, [[1, 2], [2, 1]]), sq)
        checks("braid-K4 rh slack", rh_check(nets[0]) == (True, 0), rh_check(nets[0]))
    hessian = catalog.load("hessian")
    hnets = search_multinets(hessian, 4, 1, "strict")
    checks("Hessian one (4,3)-net", len(hnets) == 1 and hnets[0].is_net and hnets[0].d == 3,
           len(hnets))
    if hnets:
        a, b = net_to_latin(hnets[0])
        checks("Hessian orthogonal squares", are_orthogonal(a, b))
    for name in CATALOG:
        for k in (3, 4, 5):
            for net in search_multinets(catalog.load(name), k, 1, "strict"):
                checks(f"{name} k={k} identities", multinet_identities(net).holds,
                       multinet_identities(net).as_dict())
    for d in (2, 3):
        for sq in latin_squares(d):
            _, net = latin_to_matroid(sq)
            (back,) = net_to_latin(net)
            checks(f"round trip {sq}", same_up_to_relabeling(back, sq), back)
    checks.done()


def test_criterion_11_weak_example(checks):
    """Criterion 11: the weak (3,2)-multinet on U23 + U23."""
    want = json.loads((GOLDEN / "weak_multinet.json").read_text())
    m = direct_sum(uniform(2, 3), uniform(2, 3))
    parts = [[u - 1 for u in p] for p in want["parts"]]
    weak = verify_multinet(m, parts, mode="lenient")
    checks("lenient report", weak.as_dict() == want["lenient"], weak.as_dict())
    checks("weak only", weak.is_weak_only and weak.k == 3 and weak.d == 2)
    refined = refine_weak(weak)
    checks("refined report", refined.as_dict() == want["refined"], refined.as_dict())
    checks("singleton parts", all(len(p) == 1 for p in refined.parts))
    checks("same base locus", set(refined.base_locus) == set(weak.base_locus))
    try:
        verify_multinet(m, parts, mode="strict")
        checks("strict outcome", False, "strict mode accepted the partition")
    except MultinetViolation as exc:
        got = {"condition": exc.condition, "witness": [u + 1 for u in exc.witness]}
        checks("strict outcome", got == want["strict"], got)
    checks.done()


def test_criterion_12_components(checks):
    """Criterion 12: first resonance components from multinets."""
    m = graphic(4, complete_graph_edges(4))
    comps = r1_components(m).by_depth[1]
    kinds = sorted(c.kind for c in comps)
    checks("K4 census", kinds == ["essential"] + ["local"] * 4, kinds)
    checks("K4 dimensions", all(c.dim == 2 for c in comps), [c.dim for c in comps])
    for a, b in combinations(comps, 2):
        joint = rank_of(ExactMatrix.from_rows(a.basis + b.basis, QQ, m.n))
        checks("K4 trivial meets", joint == a.dim + b.dim, joint)
    count = resonance_point_set(m, 5, 1, 1, count_only=True).count
    checks("K4 union count over F5", union_point_count(comps, 5) == count == 121,
           f"{union_point_count(comps, 5)} vs {count}")
    for v in (4, 5):
        for g in graphs_on(v):
            if has_k4(g):
                continue
            gm = graphic(v, list(g.edges()))
            cs = r1_components(gm).by_depth[1]
            triangles = sum(1 for f in build_flat_lattice(gm).flats(2) if f.size == 3) \
                if gm.rank >= 2 else 0
            checks(f"{sorted(g.edges())} local only",
                   all(c.kind == "local" for c in cs) and len(cs) == triangles,
                   [c.kind for c in cs])
    checks.done()


def test_criterion_13_properties(checks):
    """Criterion 13: randomized property suites on 200 seeds."""
    for seed in SEEDS:
        rng = random.Random(seed)
        m = random_matroid(seed, max_n=8)
        tag = f"seed {seed}"
        # boundary squares to zero on NBC monomials
        alg = OSAlgebra(m)
        for k in range(1, m.rank + 1):
            for mono in alg.basis(k)[:10]:
                checks(f"{tag} d^2 {mono}", boundary(boundary({mono: 1})) == {})
        # closure is idempotent
        for s in rng.sample(range(1 << m.n), min(64, 1 << m.n)):
            c = m.closure(s)
            checks(f"{tag} closure {s}", m.closure(c) == c and c & s == s)
        # resonance: scaling, depth filtration, Euler characteristic
        p = 3
        b = betti_numbers(m)
        prev = None
        for s in range(1, b[1] + 2):
            pts = resonance_point_set(m, p, 1, s).points
            checks(f"{tag} scaling s={s}", all(tuple(2 * x % p for x in a) in pts for a in pts))
            if prev is not None:
                checks(f"{tag} depth s={s}", pts <= prev)
            prev = pts
        a = [rng.randint(-2, 2) for _ in range(m.n)]
        chi = sum((-1) ** q * aomoto_cohomology_dim(m, a, q) for q in range(m.rank + 1))
        checks(f"{tag} Euler characteristic", chi == sum((-1) ** q * x for q, x in enumerate(b)))
        # holonomy and Chen ranks add over direct sums
        x, y = random_pair(seed)
        s = direct_sum(x, y)
        phis = [[r.rank for r in holonomy_ranks(mm, 4, QQ)] for mm in (x, y, s)]
        checks(f"{tag} phi additive", [u + v for u, v in zip(phis[0], phis[1])] == phis[2], phis)
        thetas = [chen_ranks(mm, 4) for mm in (x, y, s)]
        checks(f"{tag} theta additive",
               [u + v for u, v in zip(thetas[0], thetas[1])] == thetas[2], thetas)
        # nets: parts line-closed, |E| = kd, |X| = d^2
        d = 1 + seed % 3
        square = rng.choice(latin_squares(d))
        lm, _ = latin_to_matroid(square)
        for host in (m, lm):
            for k in (3, 4):
                for net in search_multinets(host, k, 1, "strict"):
                    if not net.is_net:
                        continue
                    checks(f"{tag} net counts", host.n == net.k * net.d
                           and len(net.base_locus) == net.d ** 2)
                    checks(f"{tag} net parts line-closed",
                           all(host.is_line_closed(mask_of(q)) for q in net.parts))
    checks.done()

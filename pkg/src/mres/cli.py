"""Command-line interface: ``mres <command> <input> [options]``.

The input is a catalog name (``braid-K4``, ``nonfano``, ``pappus``,
``nonpappus``, ``hessian``, ``uniform-r-n``), a path to a ``matroid-v1``
JSON document, or ``-`` for standard input.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for invalid
input, 3 when a computation budget runs out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable

from . import __version__, catalog
from .io import InputError, parse_document, to_document
from .linalg import GF, QQ, RingError, parse_ring
from .matroid import Matroid, ResourceError, build_flat_lattice, elems_of, is_supersolvable
from .os_algebra import ConsistencyError, betti_numbers, projective_dims, verified_betti_numbers

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class Input:
    """A loaded matroid together with its source document."""

    source: str
    matroid: Matroid
    document: dict

    @property
    def graph(self) -> tuple[int, list[tuple[int, int]]] | None:
        d = self.document.get("definition", {})
        if d.get("kind") != "graph":
            return None
        return d["vertices"], [(u - 1, v - 1) for u, v in d["edges"]]

    @property
    def uniform_rank(self) -> int | None:
        d = self.document.get("definition", {})
        return d["rank"] if d.get("kind") == "uniform" else None

    def digest(self) -> str:
        canon = json.dumps(to_document(self.matroid)["definition"], sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


@dataclass
class RunReport:
    """Everything one command produces."""

    command: list[str]
    input: dict
    results: dict = field(default_factory=dict)
    checks: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "detail": detail})
        return passed

    def guarded(self, name: str, fn: Callable[[], Any]) -> Any:
        """Run ``fn``; a consistency failure becomes a failed check."""
        try:
            return fn()
        except ConsistencyError as exc:
            self.check(name, False, str(exc))
            return None

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def as_dict(self) -> dict:
        return {"command": self.command, "input": self.input, "results": self.results,
                "checks": self.checks, "passed": self.passed,
                "wall_time": round(self.wall_time, 3)}


def load_input(source: str) -> Input:
    """Resolve a catalog name, a file path or ``-``.

    Raises:
        InputError: On unreadable or invalid documents and unknown names.
    """
    if catalog.is_catalog_name(source):
        try:
            m = catalog.load(source)
        except catalog.CatalogError as exc:
            raise InputError(str(exc)) from exc
        if source in catalog.SHIPPED:
            doc = catalog.document(source)
        else:
            r, n = (int(x) for x in source.split("-")[1:])
            doc = {"format": "matroid-v1", "n": n, "definition": {"kind": "uniform", "rank": r}}
        return Input(source, m, doc)
    try:
        text = sys.stdin.read() if source == "-" else open(source, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {source!r} ({exc.strerror}); known catalog names: "
                         f"{', '.join(catalog.names())}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    return Input(source, parse_document(doc), doc)


# ---------------------------------------------------------------- commands


def cmd_info(inp: Input, args, rep: RunReport) -> None:
    m = inp.matroid
    lat = build_flat_lattice(m)
    ok, chain = is_supersolvable(m)
    rep.results.update({
        "n": m.n, "rank": m.rank, "connected": m.is_connected(),
        "components": [[u + 1 for u in elems_of(c)] for c in m.components()],
        "supersolvable": ok,
        "modular_chain": [[u + 1 for u in x] for x in chain] if chain else None,
        "flat_census": [len(lat.flats(k)) for k in range(lat.rank + 1)],
        "mobius_table": [{str(mu): c for mu, c in sorted(Counter(f.mobius for f in lat.flats(k)).items())}
                         for k in range(lat.rank + 1)],
        "rank2_sizes": dict(sorted(Counter(f.size for f in lat.flats(2)).items())) if m.rank >= 2 else {},
    })
    sums = lat.characteristic_mobius_sums()
    rep.check("mobius_signs_alternate", all((-1) ** k * s > 0 for k, s in enumerate(sums)),
              f"Moebius sums {sums}")


def cmd_betti(inp: Input, args, rep: RunReport) -> None:
    m = inp.matroid
    ring = parse_ring(args.field)
    betti = betti_numbers(m)
    rep.results["field"] = str(ring)
    rep.results["betti"] = betti
    rep.results["poincare"] = " + ".join(
        f"{b}" if k == 0 else f"{b}t" if k == 1 else f"{b}t^{k}" for k, b in enumerate(betti) if b)
    routes = rep.guarded("routes_agree", lambda: verified_betti_numbers(m, ring))
    if routes is not None:
        rep.check("routes_agree", routes == betti, f"NBC/elimination/Moebius {routes}")
    rep.results["projective_dims"] = projective_dims(m, ring)
    rep.check("projective_sum", sum(rep.results["projective_dims"]) * 2 == sum(betti) or m.n == 0,
              "projective subalgebra carries half the total dimension")


def cmd_resonance(inp: Input, args, rep: RunReport) -> None:
    from .resonance import envelope_check, resonance_point_set, verify_structure

    m = inp.matroid
    pts = resonance_point_set(m, args.p, args.q, args.s, args.ambient,
                              count_only=not args.points)
    rep.results.update({"p": args.p, "q": args.q, "s": args.s, "ambient": args.ambient,
                        "count": pts.count})
    if args.points:
        rep.results["points"] = pts.sorted_points()
    if args.ambient == "full":
        rep.check("containment_in_vbar", not pts.containment_violations,
                  f"{len(pts.containment_violations)} points off the sum-zero hyperplane")
    if args.check:
        st = verify_structure(m, args.p, name=inp.source)
        rep.results["structure"] = st.as_dict()
        for c in st.checks:
            rep.check(c.name, c.passed, c.detail)
        env = envelope_check(m, args.p, args.q)
        rep.results["envelope"] = env.as_dict()
        rep.check("envelope_contains_resonance", env.contained,
                  f"{env.resonant} resonant points, envelope {env.envelope}")


def cmd_multinet(inp: Input, args, rep: RunReport) -> None:
    from .lie import chen_conjecture_report
    from .multinet import (
        multinet_identities, net_to_latin, r1_components, rh_check, search_multinets,
        subspace_of_multinet,
    )

    m = inp.matroid
    nets = search_multinets(m, args.k, args.mmax, args.mode)
    out = []
    for net in nets:
        d = net.as_dict()
        ids = multinet_identities(net)
        holds, slack = rh_check(net)
        d["identities"] = ids.as_dict()
        d["rh"] = {"holds": holds, "slack": slack}
        rep.check(f"identities[{len(out)}]", ids.holds, json.dumps(ids.as_dict()))
        basis = rep.guarded(f"subspace[{len(out)}]", lambda: subspace_of_multinet(net))
        if basis is not None:
            d["subspace"] = basis
            rep.check(f"subspace[{len(out)}]", len(basis) == net.k - 1, "dimension k - 1, resonant")
        if args.latin and net.is_net:
            d["latin"] = net_to_latin(net)
        out.append(d)
    rep.results.update({"k": args.k, "mmax": args.mmax, "mode": args.mode, "multinets": out})
    if args.components:
        comps = r1_components(m, args.smax)
        rep.results["r1_components"] = comps.as_dict()
        rep.check("r1_enumeration_complete", comps.complete, "; ".join(comps.notes))
    if args.conjecture:
        rep.results["chen_conjecture"] = chen_conjecture_report(m, args.conjecture).as_dict()


def cmd_lie(inp: Input, args, rep: RunReport) -> None:
    from .lie import (
        chen_ranks, glcs_graphic, holonomy_ranks, is_decomposable, lcs_from_betti,
        local_chen_rank, local_holonomy_rank,
    )

    m = inp.matroid
    ring = parse_ring(args.ring)
    R = args.max_degree
    reps = holonomy_ranks(m, R, ring, args.method)
    rep.results["ring"] = str(ring)
    rep.results["phi"] = [r.rank for r in reps]
    rep.results["pieces"] = [r.as_dict() for r in reps]
    local = [local_holonomy_rank(m, r) for r in range(2, R + 1)]
    rep.results["local_phi"] = local
    for r, lo in zip(range(2, R + 1), local):
        phi = reps[r - 1].rank
        rep.check(f"phi_bound[{r}]", phi >= lo and (r > 2 or phi == lo), f"phi={phi} local={lo}")
    if R >= 2:
        phi2 = sum(comb(f.size - 1, 2) for f in build_flat_lattice(m).flats(2))
        rep.check("phi2_closed_form", reps[1].rank == phi2, f"sum binom(mu, 2) = {phi2}")
    if args.chen:
        cring = QQ if ring.kind == "ZZ" else ring
        thetas = rep.guarded("theta_equals_phi", lambda: chen_ranks(m, args.chen, cring))
        if thetas is not None:
            rep.results["theta"] = thetas
            lc = [local_chen_rank(m, r) for r in range(2, args.chen + 1)]
            rep.results["local_theta"] = lc
            for r, t, lo in zip(range(2, args.chen + 1), thetas, lc):
                rep.check(f"theta_bound[{r}]", t >= lo and (r > 2 or t == lo), f"theta={t} local={lo}")
            closed = _closed_form(inp, args.chen)
            if closed is not None:
                rep.results["theta_closed_form"] = closed
                rep.check("theta_closed_form", closed == thetas, f"{closed}")
    if args.decomposable:
        rep.results["decomposable"] = is_decomposable(m, ring)
    if ring.kind == "QQ" and is_supersolvable(m)[0]:
        betti_phis = rep.guarded("lcs_product_formula", lambda: lcs_from_betti(m, R))
        if betti_phis is not None:
            rep.results["phi_from_betti"] = betti_phis
            rep.check("lcs_product_formula", betti_phis == rep.results["phi"], f"{betti_phis}")
    if ring.kind == "QQ" and inp.graph is not None:
        g = rep.guarded("glcs_formula", lambda: glcs_graphic(*inp.graph, R))
        if g is not None:
            rep.results["phi_from_cliques"] = g
            rep.check("glcs_formula", g == rep.results["phi"], f"{g}")


def _closed_form(inp: Input, R: int) -> list[int] | None:
    from .lie import chen_closed_form

    m = inp.matroid
    if inp.graph is not None and R >= 2:
        return [chen_closed_form("graphic", inp.graph, r) for r in range(2, R + 1)]
    if inp.uniform_rank == 2:
        return [chen_closed_form("uniform2", m.n, r) for r in range(2, R + 1)]
    if inp.uniform_rank == m.n:
        return [0] * (R - 1)  # Boolean: the holonomy Lie algebra is abelian
    return None


def cmd_check(inp: Input, args, rep: RunReport) -> None:
    """Invariant suite of every module on one input."""
    from .lie import (
        chen_ranks, holonomy_relations, holonomy_ranks, local_chen_rank, local_holonomy_rank,
    )
    from .multinet import r1_components, search_multinets, union_point_count
    from .resonance import resonance_point_set, verify_structure, w1_support_point_set

    m = inp.matroid
    # interchange
    again = parse_document(to_document(m))
    rep.check("json_round_trip", set(again.circuits) == set(m.circuits))
    # Betti numbers
    betti = betti_numbers(m)
    rep.results["betti"] = betti
    for ring in (QQ, GF(2), GF(3)):
        got = rep.guarded(f"betti_routes[{ring}]", lambda: verified_betti_numbers(m, ring))
        if got is not None:
            rep.check(f"betti_routes[{ring}]", got == betti, f"{got}")
    # holonomy
    rep.guarded("holonomy_relation_span", lambda: holonomy_relations(m))
    R = args.max_degree
    phis = [r.rank for r in holonomy_ranks(m, R, QQ)]
    rep.results["phi"] = phis
    for r in range(2, R + 1):
        lo = local_holonomy_rank(m, r)
        rep.check(f"phi_bound[{r}]", phis[r - 1] >= lo and (r > 2 or phis[r - 1] == lo),
                  f"phi={phis[r - 1]} local={lo}")
    thetas = rep.guarded("theta_equals_phi", lambda: chen_ranks(m, args.chen))
    if thetas is not None:
        rep.results["theta"] = thetas
        for r, t in zip(range(2, args.chen + 1), thetas):
            lo = local_chen_rank(m, r)
            rep.check(f"theta_bound[{r}]", t >= lo and (r > 2 or t == lo), f"theta={t} local={lo}")
            if r <= R:
                rep.check(f"theta_le_phi[{r}]", t <= phis[r - 1], f"theta={t} phi={phis[r - 1]}")
    # resonance over small fields
    big_lines = any(f.size >= 3 for f in build_flat_lattice(m).flats(2)) if m.rank >= 2 else False
    for p in args.primes:
        st = verify_structure(m, p, name=inp.source)
        for c in st.checks:
            rep.check(f"{c.name}[F{p}]", c.passed, c.detail)
        if big_lines:
            r1 = resonance_point_set(m, p, 1, 1)
            w1 = w1_support_point_set(m, p)
            rep.check(f"w1_support_equals_r1[F{p}]", r1.points == w1.points,
                      f"{r1.count} resonant, {w1.count} in the support")
    # multinets and components
    nets = [n for k in (3, 4) for n in search_multinets(m, k, 1, "strict")]
    rep.results["nets"] = [n.as_dict() for n in nets]
    rep.check("multinet_search_invariants", True, f"{len(nets)} multinets with k in (3, 4)")
    if m.n <= 12:
        comps = r1_components(m, 1)
        rep.results["r1_components"] = Counter(f"{c.kind}:{c.dim}" for c in comps.by_depth[1])
        p = args.component_prime
        count = resonance_point_set(m, p, 1, 1, count_only=True).count
        rep.check(f"r1_components_cover[F{p}]", count == union_point_count(comps.by_depth[1], p),
                  f"enumerated {count}, components give {union_point_count(comps.by_depth[1], p)}")


COMMANDS = {"info": cmd_info, "betti": cmd_betti, "resonance": cmd_resonance,
            "multinet": cmd_multinet, "lie": cmd_lie, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mres", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="catalog name, path to a matroid-v1 document, or -")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--threads", type=int, default=1, help="worker threads for enumeration")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common], help="lattice data")
    p = sub.add_parser("betti", parents=[common], help="Betti numbers by two routes")
    p.add_argument("--field", default="Q")
    p = sub.add_parser("resonance", parents=[common], help="resonance varieties over F_p")
    p.add_argument("--p", type=int, default=3)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--ambient", choices=("vbar", "full"), default="vbar")
    p.add_argument("--check", action="store_true", help="verify structure and envelopes")
    p.add_argument("--points", action="store_true", help="list the points")
    p = sub.add_parser("multinet", parents=[common], help="multinet search and components")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--mmax", type=int, default=1)
    p.add_argument("--mode", choices=("lenient", "strict"), default="lenient")
    p.add_argument("--latin", action="store_true", help="export Latin squares of nets")
    p.add_argument("--components", action="store_true", help="list first resonance components")
    p.add_argument("--smax", type=int, default=1)
    p.add_argument("--conjecture", type=int, default=0, metavar="R",
                   help="compare Chen ranks with the multinet formula up to degree R")
    p = sub.add_parser("lie", parents=[common], help="holonomy and Chen ranks")
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--ring", default="Q")
    p.add_argument("--method", choices=("auto", "direct", "quotient"), default="auto")
    p.add_argument("--chen", type=int, default=0, metavar="R", help="Chen ranks up to degree R")
    p.add_argument("--decomposable", action="store_true")
    p = sub.add_parser("check", parents=[common], help="full invariant suite")
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--chen", type=int, default=5)
    p.add_argument("--primes", type=int, nargs="+", default=[2, 3])
    p.add_argument("--component-prime", type=int, default=5)
    return ap


def _print_human(rep: RunReport, out) -> None:
    print(f"input  {rep.input['source']}  (digest {rep.input['digest']})", file=out)
    for key, val in rep.results.items():
        text = json.dumps(val) if not isinstance(val, str) else val
        if len(text) > 100:
            text = text[:97] + "..."
        print(f"{key:<22}{text}", file=out)
    for c in rep.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}  {c['detail']}", file=out)
    print(f"{'all checks passed' if rep.passed else 'CHECKS FAILED'} in {rep.wall_time:.2f}s", file=out)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.threads > 1:
        import numba

        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    start = time.perf_counter()
    try:
        inp = load_input(args.input)
        rep = RunReport(argv, {"source": inp.source, "n": inp.matroid.n, "digest": inp.digest()})
        COMMANDS[args.command](inp, args, rep)
    except (InputError, RingError, ValueError) as exc:
        pointer = getattr(exc, "pointer", None)
        msg = {"error": "input", "message": str(exc)}
        if pointer:
            msg["pointer"] = pointer
        print(json.dumps(msg) if args.json else f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(json.dumps({"error": "budget", "message": str(exc)}) if args.json
              else f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    rep.wall_time = time.perf_counter() - start
    if args.json:
        json.dump(rep.as_dict(), sys.stdout, indent=2, default=list)
        print()
    else:
        _print_human(rep, sys.stdout)
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())

"""Named matroids shipped with the package.

Each entry is a ``matroid-v1`` document under ``mres/data``, together with
self-checks: rank, the census of rank-2 flats by size, and Betti numbers.
When an entry ships a realization, the check also confirms that it gives
the same circuits.  The checks run on every load, so a bad transcription
fails at once.  ``uniform-r-n`` names are generated on the fly.
"""

from __future__ import annotations

import json
import re
from functools import lru_cache
from importlib import resources

from .io import parse_document
from .matroid import Matroid, build_flat_lattice, realization, uniform
from .os_algebra import betti_numbers

SHIPPED = ("braid-K4", "nonfano", "pappus", "nonpappus", "hessian")
_UNIFORM = re.compile(r"^uniform-(\d+)-(\d+)$")


class CatalogError(LookupError):
    """Unknown catalog name or a failed load-time self-check."""


def names() -> list[str]:
    return list(SHIPPED) + ["uniform-r-n"]


def document(name: str) -> dict:
    """Raw JSON document of a shipped entry."""
    if name not in SHIPPED:
        raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(names())}")
    text = resources.files("mres").joinpath("data", f"{name}.json").read_text()
    return json.loads(text)


def is_catalog_name(name: str) -> bool:
    return name in SHIPPED or bool(_UNIFORM.match(name))


@lru_cache(maxsize=None)
def load(name: str) -> Matroid:
    """Matroid for a catalog name, after its self-checks pass."""
    um = _UNIFORM.match(name)
    if um:
        r, n = int(um.group(1)), int(um.group(2))
        return uniform(r, n)
    doc = document(name)
    m = parse_document(doc)
    _self_check(name, m, doc)
    return m


def _self_check(name: str, m: Matroid, doc: dict) -> None:
    checks = doc.get("checks", {})
    lat = build_flat_lattice(m)
    if "rank" in checks and m.rank != checks["rank"]:
        raise CatalogError(f"{name}: rank {m.rank}, expected {checks['rank']}")
    if "l2_census" in checks:
        census: dict[str, int] = {}
        for f in lat.flats(2):
            census[str(f.size)] = census.get(str(f.size), 0) + 1
        if census != checks["l2_census"]:
            raise CatalogError(f"{name}: rank-2 flat census {census}, expected {checks['l2_census']}")
    if "betti" in checks and betti_numbers(m) != checks["betti"]:
        raise CatalogError(f"{name}: Betti numbers {betti_numbers(m)}, expected {checks['betti']}")
    if "realization" in doc:
        real = realization(doc["realization"])
        if set(real.circuits) != set(m.circuits):
            raise CatalogError(f"{name}: realization and incidence data disagree")

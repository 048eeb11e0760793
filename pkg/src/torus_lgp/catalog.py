"""Catalog of standard split root data.

Each irreducible type comes in two forms. In the simply connected form
``M`` is the weight lattice in the basis of fundamental weights and
``M^vee`` the coroot lattice; in the adjoint form ``M`` is the root
lattice in the basis of simple roots. Simple roots follow Bourbaki
numbering.

The shipped JSON files under ``data/`` are generated by
:func:`build_root_datum`; ``python -m torus_lgp.catalog`` rewrites them.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from math import factorial

import numpy as np

from .root_datum import PinnedRootDatum, RootDatum, standard_cartan

__all__ = [
    "CATALOG_TYPES",
    "FORMS",
    "build_root_datum",
    "load",
    "load_pinned",
    "all_entries",
    "weyl_order_formula",
]

CATALOG_TYPES = (
    "A1", "A2", "A3", "A4", "A5",
    "B2", "B3", "B4",
    "C2", "C3", "C4",
    "D4", "D5", "D6",
    "G2", "F4",
)
FORMS = ("sc", "ad")


def weyl_order_formula(label: str) -> int:
    """Closed-form order of the Weyl group of an irreducible type."""
    kind, n = label[0], int(label[1:])
    if kind == "A":
        return factorial(n + 1)
    if kind in "BC":
        return 2 ** n * factorial(n)
    if kind == "D":
        return 2 ** (n - 1) * factorial(n)
    return {"G2": 12, "F4": 1152, "E6": 51840, "E7": 2903040, "E8": 696729600}[label]


def build_root_datum(label: str, form: str) -> tuple[RootDatum, tuple[int, ...]]:
    """Generate a catalog datum from its Cartan matrix.

    Returns the datum and the indices of the Bourbaki simple roots. Roots
    are listed positive first (by height, then lexicographically in
    simple-root coordinates), followed by their negatives in the same order.
    """
    C = standard_cartan(label)
    n = C.shape[0]
    # work in simple-root coordinates for roots and simple-coroot coordinates for coroots
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    pairs = {s: s for s in simple}  # root coords -> coroot coords
    frontier = list(simple)
    while frontier:
        new = []
        for a in frontier:
            av = pairs[a]
            for j in range(n):
                # <alpha_j^vee, a> and <a^vee, alpha_j>
                p = sum(C[j, k] * a[k] for k in range(n))
                q = sum(av[k] * C[k, j] for k in range(n))
                b = tuple(a[k] - p * int(k == j) for k in range(n))
                bv = tuple(av[k] - q * int(k == j) for k in range(n))
                if b not in pairs:
                    pairs[b] = bv
                    new.append(b)
        frontier = new
    pos = sorted((r for r in pairs if all(x >= 0 for x in r)), key=lambda r: (sum(r), tuple(-x for x in r)))
    ordered = pos + [tuple(-x for x in r) for r in pos]
    if form == "ad":
        # M = root lattice; coroot a^vee pairs with alpha_k by sum_i a^vee_i C[i, k]
        roots = ordered
        coroots = [tuple(int(sum(pairs[r][i] * C[i, k] for i in range(n))) for k in range(n)) for r in ordered]
    elif form == "sc":
        # M = weight lattice; alpha_j = sum_i C[i, j] omega_i
        roots = [tuple(int(sum(C[i, k] * r[k] for k in range(n))) for i in range(n)) for r in ordered]
        coroots = [pairs[r] for r in ordered]
    else:
        raise ValueError(f"unknown form {form!r}")
    delta = tuple(ordered.index(s) for s in simple)
    return RootDatum(n, roots, coroots, f"{label}-{form}"), delta


def _data_file(label: str, form: str):
    return resources.files("torus_lgp").joinpath("data", f"{label}_{form}.json")


@lru_cache(maxsize=None)
def load_pinned(label: str, form: str = "sc") -> PinnedRootDatum:
    """Catalog datum with its Bourbaki simple system."""
    path = _data_file(label, form)
    if not path.is_file():
        raise KeyError(f"no catalog entry for {label} ({form})")
    payload = json.loads(path.read_text())
    psi = RootDatum(payload["rank"], payload["roots"], payload["coroots"], f"{label}-{form}")
    return PinnedRootDatum(psi, tuple(payload["simple"]))


def load(label: str, form: str = "sc") -> RootDatum:
    """Catalog datum ``label`` (e.g. ``"C3"``) in form ``"sc"`` or ``"ad"``."""
    return load_pinned(label, form).base


def all_entries():
    """Yield ``(label, form, RootDatum)`` for the whole catalog."""
    for label in CATALOG_TYPES:
        for form in FORMS:
            yield label, form, load(label, form)


def _write_catalog(directory) -> None:
    for label in CATALOG_TYPES:
        for form in FORMS:
            psi, delta = build_root_datum(label, form)
            payload = {
                "type": label,
                "form": form,
                "rank": psi.rank,
                "cartan": np.asarray(standard_cartan(label)).tolist(),
                "simple": list(delta),
                "roots": [list(r) for r in psi.roots],
                "coroots": [list(c) for c in psi.coroots],
            }
            (directory / f"{label}_{form}.json").write_text(json.dumps(payload) + "\n")


if __name__ == "__main__":
    from pathlib import Path

    _write_catalog(Path(__file__).parent / "data")

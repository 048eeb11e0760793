"""Random instances for property checks: lattices, twisted data, etale algebras.

Every sampler takes a ``numpy.random.Generator`` so runs are reproducible
from a seed.
"""

from __future__ import annotations

import numpy as np

from .algebra_model import EtaleInvolution, etale_involution
from .catalog import load
from .galois import (
    FiniteGroup,
    GammaLattice,
    GammaSet,
    TwistedRootDatum,
    augmentation_sub,
    cyclic_group,
    direct_product,
    induced_lattice,
    norm_one_quotient,
    small_group_catalog,
)
from .root_datum import RootDatumError, _closure, _root_permutation, aut_group

__all__ = [
    "subgroups",
    "random_cyclic_lattice",
    "random_twisted_datum",
    "random_etale_involution",
    "sample_groups",
]


def _closure_indices(G: FiniteGroup, idx) -> frozenset[int]:
    table = G.table
    out = {0}
    frontier = list(out)
    gens = list(idx)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = int(table[g, x])
            if y not in out:
                out.add(y)
                frontier.append(y)
    return frozenset(out)


def _small_generators(G: FiniteGroup, members: frozenset[int]) -> list[int]:
    gens: list[int] = []
    current = frozenset({0})
    for x in sorted(members, key=lambda k: (-G.element_order(k), k)):
        if x not in current:
            gens.append(x)
            current = _closure_indices(G, gens)
        if current == members:
            break
    return gens


def subgroups(G: FiniteGroup) -> list[FiniteGroup]:
    """All subgroups, ordered by (order, element indices), each with few generators."""
    found = {_closure_indices(G, [k]) for k in range(G.order)}
    frontier = list(found)
    while frontier:
        new = []
        for A in frontier:
            for B in list(found):
                C = _closure_indices(G, sorted(A | B))
                if C not in found:
                    found.add(C)
                    new.append(C)
        frontier = new
    ordered = sorted(found, key=lambda s: (len(s), sorted(s)))
    return [G.subgroup_by_indices(_small_generators(G, s)) for s in ordered]


def _cyclic_blocks(n: int) -> list[GammaLattice]:
    G = cyclic_group(n)
    blocks = [GammaLattice.trivial(G, 1)]
    if n % 2 == 0:
        blocks.append(GammaLattice.from_character(G, [-1]))
    for d in range(2, n + 1):
        if n % d:
            continue
        X = GammaSet(G, d, (tuple((i + 1) % d for i in range(d)),))
        blocks += [induced_lattice(X), norm_one_quotient(X), augmentation_sub(X)]
        if n % 2 == 0:
            perm = induced_lattice(X).generator_matrices[0]
            blocks.append(GammaLattice(G, d, [-perm], name="Z(-1)[X]"))
    return [b for b in blocks if b.rank]


def _block_sum(G: FiniteGroup, blocks: list[GammaLattice]) -> np.ndarray:
    r = sum(b.rank for b in blocks)
    A = np.zeros((r, r), dtype=np.int64)
    off = 0
    for b in blocks:
        A[off:off + b.rank, off:off + b.rank] = b.generator_matrices[0]
        off += b.rank
    return A


def _random_unimodular(rng: np.random.Generator, r: int, steps: int = 2) -> tuple[np.ndarray, np.ndarray]:
    U = np.eye(r, dtype=np.int64)
    Ui = np.eye(r, dtype=np.int64)
    for _ in range(steps if r > 1 else 0):
        i, j = rng.choice(r, size=2, replace=False)
        c = int(rng.choice([-1, 1]))
        E = np.eye(r, dtype=np.int64)
        E[i, j] = c
        Ei = np.eye(r, dtype=np.int64)
        Ei[i, j] = -c
        U, Ui = E @ U, Ui @ Ei
    return U, Ui


def random_cyclic_lattice(rng: np.random.Generator, n: int, max_rank: int = 4) -> GammaLattice:
    """A ``ZZ/n``-lattice of rank ``<= max_rank``: a sum of standard blocks, conjugated.

    Blocks are the trivial and sign characters and the permutation,
    norm-one and augmentation lattices of ``ZZ/n -> ZZ/d`` (also twisted by
    the sign when ``n`` is even).
    """
    G = cyclic_group(n)
    if n == 1:
        return GammaLattice(G, int(rng.integers(1, max_rank + 1)), [], name="random")
    options = [b for b in _cyclic_blocks(n) if b.rank <= max_rank]
    chosen: list[GammaLattice] = []
    while True:
        fits = [b for b in options if b.rank + sum(c.rank for c in chosen) <= max_rank]
        if not fits or (chosen and rng.random() < 0.4):
            break
        chosen.append(fits[int(rng.integers(len(fits)))])
    A = _block_sum(G, chosen)
    U, Ui = _random_unimodular(rng, len(A))
    return GammaLattice(G, len(A), [U @ A @ Ui], name="random")


TWIST_TYPES = ("A1", "A2", "A3", "B2", "C2", "C3", "G2", "B3", "D4")


def random_twisted_datum(rng: np.random.Generator, max_order: int = 12, labels=TWIST_TYPES) -> TwistedRootDatum:
    """Catalog datum with ``Gamma`` acting through a random subgroup of ``Aut``.

    ``Gamma`` is realised as the permutation group on roots induced by one
    or two random automorphisms, sometimes times a cyclic factor acting
    trivially, subject to ``|Gamma| <= max_order``.
    """
    while True:
        label = labels[int(rng.integers(len(labels)))]
        form = "sc" if rng.random() < 0.5 else "ad"
        psi = load(label, form)
        A = aut_group(psi)
        k = int(rng.integers(1, 3))
        picks = [A.elements[int(i)] for i in rng.integers(A.order, size=k)]
        try:
            _closure(psi.rank, np.array(picks), cap=max_order)
        except RootDatumError:
            continue
        perms = [tuple(int(x) for x in _root_permutation(psi, psi, m)) for m in picks]
        image = FiniteGroup(psi.n_roots, perms)
        extra = max_order // image.order
        if extra >= 2 and rng.random() < 0.3:
            c = int(rng.integers(2, min(extra, 3) + 1))
            group = direct_product(image, cyclic_group(c))
            mats = picks + [np.eye(psi.rank, dtype=np.int64)]
        else:
            group, mats = image, picks
        return TwistedRootDatum(psi, group, mats, f"{label}-{form}")


def sample_groups(max_order: int = 12) -> list[FiniteGroup]:
    """Groups of order ``<= max_order`` used for random etale algebras."""
    return [G for G in small_group_catalog(max_order) if G.order >= 2]


def _index_two_pairs(G: FiniteGroup, subs: list[FiniteGroup]):
    pairs = []
    for H in subs:
        for Hp in subs:
            if Hp.order * 2 == H.order and H.contains_group(Hp):
                pairs.append((H, Hp))
    return pairs


def random_etale_involution(rng: np.random.Generator, tau_type: str, group: FiniteGroup | None = None, max_points: int = 10, odd: bool | None = None, transitive: bool = False) -> EtaleInvolution:
    """Random ``(E, sigma)`` of the given type with at most ``max_points`` geometric points.

    For orthogonal type, ``odd`` selects the degree parity (default
    random). For unitary type a random index-two ``Gal(ks / K)`` is used
    when one exists. ``transitive`` asks for ``E`` a field (unitary only).
    """
    if group is None:
        groups = sample_groups(12)
        group = groups[int(rng.integers(len(groups)))]
    subs = subgroups(group)
    fixed = tau_type == "orthogonal" and (odd if odd is not None else bool(rng.random() < 0.5))
    budget = max_points - (1 if fixed else 0)
    k_sub = None
    if tau_type == "unitary":
        halves = [H for H in subs if 2 * H.order == group.order]
        k_sub = halves[int(rng.integers(len(halves)))] if halves and rng.random() < 0.8 else group
        in_k = set(int(i) for i in group.embedding(k_sub))
        quad = [(H, Hp) for H, Hp in _index_two_pairs(group, subs) if not set(int(i) for i in group.embedding(H)) <= in_k and set(int(i) for i in group.embedding(Hp)) <= in_k]
        split = [(H, H) for H in subs if set(int(i) for i in group.embedding(H)) <= in_k]
        if transitive:
            quad = [(H, Hp) for H, Hp in quad if group.order // Hp.order <= budget]
            if not quad:
                raise ValueError("no transitive unitary algebra fits the budget")
            H, Hp = quad[int(rng.integers(len(quad)))]
            return etale_involution(group, [(H, Hp)], "unitary", k_subgroup=k_sub)
        candidates = quad + split
    else:
        candidates = _index_two_pairs(group, subs) + [(H, H) for H in subs]
    factors = []
    used = 0
    # degree-2 orthogonal data are excluded, so even orthogonal needs 4 points
    minimum = 4 if tau_type == "orthogonal" and not fixed else 1
    while True:
        fits = [(H, Hp) for H, Hp in candidates if 2 * (group.order // H.order) + used <= budget]
        if not fits or (used >= minimum and rng.random() < 0.35):
            break
        H, Hp = fits[int(rng.integers(len(fits)))]
        factors.append((H, Hp))
        used += 2 * (group.order // H.order)
    if used < minimum and not fixed:
        raise ValueError("budget too small for the requested type")
    return etale_involution(group, factors, tau_type, fixed_point=fixed, k_subgroup=k_sub)


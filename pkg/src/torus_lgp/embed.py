"""Tits indices, orientations and the local and global embedding tests.

A reductive group ``G`` over a local field enters only through the
twisted root datum of one of its maximal tori together with its Tits
index, recorded as the set of anisotropic-kernel nodes ``Delta°``. An
orientation is a ``Gamma``-fixed ``W``-coset of root-datum isomorphisms;
each coset is stored through its unique member that carries the simple
system of the source onto the simple system of the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .cohomology import CHEBOTAREV, DEFAULT_COST_CAP, CohomologyGroup, PlaceModel, sha
from .exact_lattice import determinant, kernel_basis
from .galois import (
    FiniteGroup,
    TwistedRootDatum,
    fixed_sublattice,
    is_anisotropic,
    is_generic,
    star_action,
)
from .root_datum import (
    DynkinDiagram,
    PinnedRootDatum,
    RootDatumError,
    _adjugate,
    _dual_map,
    _root_permutation,
    canonical_representative,
    cartan_and_dynkin,
    coxeter_element,
    predicates,
    transport_isomorphism,
)

__all__ = [
    "EmbeddingError",
    "TitsIndex",
    "LocalGroupDatum",
    "Orientation",
    "GlobalScenario",
    "LocalDecision",
    "OrientationTable",
    "Verdict",
    "CertificateKind",
    "Certificate",
    "TRANSPORT_OPS",
    "compute_tits_index",
    "tits_index_from_roots",
    "pinned_isomorphisms",
    "enumerate_orientations",
    "identity_orientation",
    "compose_orientations",
    "inverse_orientation",
    "decide_local",
    "decide_all_orientations",
    "lgp_certificate",
    "obstruction_group",
    "transport_orientation",
    "transport_local_datum",
]

TRANSPORT_OPS = ("der", "ad", "ss", "sc")


class EmbeddingError(ValueError):
    """Raised for inconsistent embedding data."""


# ---------------------------------------------------------------------------
# Tits indices


@dataclass(frozen=True)
class TitsIndex:
    """Dynkin diagram with its anisotropic-kernel nodes ``Delta°``.

    Nodes are numbered as in the simple system of the owning datum.
    ``distinguished`` is empty for a split group and contains every node
    for an anisotropic one; the circled nodes of the usual picture are
    the complement.
    """

    diagram: DynkinDiagram
    distinguished: frozenset[int]

    def __post_init__(self):
        d = frozenset(int(i) for i in self.distinguished)
        if not d <= set(self.diagram.nodes):
            raise EmbeddingError(f"nodes {sorted(d - set(self.diagram.nodes))} are not in the diagram")
        object.__setattr__(self, "distinguished", d)

    @property
    def circled(self) -> frozenset[int]:
        return frozenset(self.diagram.nodes) - self.distinguished

    def is_stable(self, perms: Sequence[Sequence[int]]) -> bool:
        return all({p[i] for i in self.distinguished} == self.distinguished for p in perms)


def _require_reduced_semisimple(Psi: TwistedRootDatum):
    pr = predicates(Psi.base)
    if not pr.reduced:
        raise RootDatumError("operation needs a reduced root datum")
    if not pr.semisimple:
        raise RootDatumError("operation needs a semisimple root datum")


def _dominant(p: PinnedRootDatum, x: np.ndarray) -> np.ndarray:
    S, Sv = p.simple_roots, p.simple_coroots
    x = x.copy()
    for _ in range(10 * max(1, p.base.n_roots) ** 2):
        vals = S @ x
        neg = np.nonzero(vals < 0)[0]
        if neg.size == 0:
            return x
        i = int(neg[0])
        x = x - vals[i] * Sv[i]
    raise RootDatumError("folding did not terminate")


def compute_tits_index(Psi: TwistedRootDatum, D: FiniteGroup | None = None) -> TitsIndex:
    """``Delta°`` of ``Psi`` over the subgroup ``D`` (default the whole group).

    A cocharacter ``lambda`` generic in the ``D``-fixed cocharacters cuts
    out a minimal ``D``-stable parabolic set of roots. Moving ``lambda``
    into the dominant chamber, its type is the set of simple roots on
    which it vanishes.
    """
    _require_reduced_semisimple(Psi)
    local = Psi if D is None else Psi.restrict(D)
    _, diagram = cartan_and_dynkin(local.pinned)
    Y = fixed_sublattice(local.cocharacter_lattice())
    nodes = set(diagram.nodes)
    if Y.rank == 0:
        return TitsIndex(diagram, frozenset(nodes))
    basis = np.array(Y.generators.entries, dtype=np.int64).reshape(Y.rank, Psi.base.rank)
    Q = Psi.base.R @ basis.T  # <alpha, y_k>
    N = 2 * int(np.abs(Q).max()) + 1
    lam = sum((N ** k) * basis[k] for k in range(Y.rank))
    lam = _dominant(local.pinned, np.asarray(lam, dtype=np.int64))
    vals = local.pinned.simple_roots @ lam
    idx = TitsIndex(diagram, frozenset(int(i) for i in np.nonzero(vals == 0)[0]))
    if not idx.is_stable(star_action(local)):
        raise AssertionError("computed Tits index is not stable under the star action")
    return idx


def tits_index_from_roots(Psi: TwistedRootDatum, roots: Sequence[Sequence[int]]) -> TitsIndex:
    """Tits index whose distinguished nodes are the given simple roots (as vectors)."""
    _, diagram = cartan_and_dynkin(Psi.pinned)
    pos = {d: k for k, d in enumerate(Psi.pinned.delta)}
    nodes = set()
    for r in roots:
        i = Psi.base.root_index.get(tuple(int(x) for x in r))
        if i is None or i not in pos:
            raise EmbeddingError(f"{tuple(r)} is not a simple root")
        nodes.add(pos[i])
    return TitsIndex(diagram, frozenset(nodes))


@dataclass(frozen=True, eq=False)
class LocalGroupDatum:
    """A group over a local field: a twisted datum of a maximal torus and its Tits index."""

    datum: TwistedRootDatum
    index: TitsIndex

    def __post_init__(self):
        _, diagram = cartan_and_dynkin(self.datum.pinned)
        if diagram != self.index.diagram:
            raise EmbeddingError("Tits index diagram does not match the datum")
        if not self.index.is_stable(star_action(self.datum)):
            raise EmbeddingError("Tits index is not stable under the star action")


# ---------------------------------------------------------------------------
# Orientations


@dataclass(frozen=True, eq=False)
class Orientation:
    """``W(target)``-coset of isomorphisms ``source -> target`` fixed by ``Gamma``.

    ``matrix`` is the coset member sending simple roots to simple roots;
    ``diagram_map[i]`` is the target node hit by source node ``i``.
    """

    source: TwistedRootDatum
    target: TwistedRootDatum
    matrix: np.ndarray = field(repr=False)
    diagram_map: tuple[int, ...]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Orientation):
            return NotImplemented
        return (
            self.source.base == other.source.base
            and self.target.base == other.target.base
            and self.source.pinned.delta == other.source.pinned.delta
            and self.target.pinned.delta == other.target.pinned.delta
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        return hash((self.source.base, self.target.base, self.matrix.tobytes()))

    def contains(self, F) -> bool:
        """Whether the isomorphism ``F`` lies in this coset."""
        return bool(np.array_equal(canonical_representative(self.source.pinned, self.target.pinned, F), self.matrix))

    def is_identity_map(self) -> bool:
        return self.diagram_map == tuple(range(len(self.diagram_map)))


def _cartan(p: PinnedRootDatum) -> np.ndarray:
    d = list(p.delta)
    return p.base.pairing[np.ix_(d, d)] if d else np.zeros((0, 0), dtype=np.int64)


def _diagram_bijections(C_src: np.ndarray, C_dst: np.ndarray) -> list[tuple[int, ...]]:
    n = C_src.shape[0]
    out: list[tuple[int, ...]] = []

    def extend(partial: list[int], used: set[int]):
        k = len(partial)
        if k == n:
            out.append(tuple(partial))
            return
        for j in range(n):
            if j in used or C_dst[j, j] != C_src[k, k]:
                continue
            if all(C_dst[partial[a], j] == C_src[a, k] and C_dst[j, partial[a]] == C_src[k, a] for a in range(k)):
                partial.append(j)
                used.add(j)
                extend(partial, used)
                partial.pop()
                used.discard(j)

    extend([], set())
    return out


def pinned_isomorphisms(p_src: PinnedRootDatum, p_dst: PinnedRootDatum) -> list[tuple[np.ndarray, tuple[int, ...]]]:
    """Isomorphisms carrying ``p_src``'s simple system onto ``p_dst``'s.

    One per ``W``-coset of ``Isom``. Returns ``(matrix, diagram map)``
    pairs. A central part of rank at most one is supported (its only
    automorphisms are ``+-1``).
    """
    src, dst = p_src.base, p_dst.base
    if src.rank != dst.rank or src.n_roots != dst.n_roots or len(p_src.delta) != len(p_dst.delta):
        return []
    l, r = len(p_src.delta), src.rank
    k = r - l
    if k > 1:
        raise EmbeddingError("orientations are only enumerated for a central part of rank at most one")
    if k == 1:
        zs = np.array(kernel_basis(src.Rv.tolist(), r).generators.entries[0], dtype=np.int64) if src.n_roots else np.ones(1, dtype=np.int64)
        zd = np.array(kernel_basis(dst.Rv.tolist(), r).generators.entries[0], dtype=np.int64) if dst.n_roots else np.ones(1, dtype=np.int64)
        signs = (1, -1)
    else:
        signs = (1,)
    A = p_src.simple_roots.T if l else np.zeros((r, 0), dtype=np.int64)
    if k == 1:
        A = np.concatenate([A, zs[:, None]], axis=1)
    det = determinant(A.tolist()) if r else 1
    adj = _adjugate(A) if r else np.zeros((0, 0), dtype=np.int64)
    out = []
    for pi in _diagram_bijections(_cartan(p_src), _cartan(p_dst)):
        for eps in signs:
            B = p_dst.simple_roots[list(pi)].T if l else np.zeros((r, 0), dtype=np.int64)
            if k == 1:
                B = np.concatenate([B, eps * zd[:, None]], axis=1)
            num = B @ adj
            if np.any(num % det):
                continue
            F = num // det
            if r and determinant(F.tolist()) not in (1, -1):
                continue
            if _root_permutation(src, dst, F) is None:
                continue
            out.append((F, tuple(int(x) for x in pi)))
    return out


def _align_groups(Psi: TwistedRootDatum, Phi: TwistedRootDatum) -> tuple[TwistedRootDatum, TwistedRootDatum]:
    if Psi.group.elements == Phi.group.elements:
        return Psi, Phi
    if Psi.group.contains_group(Phi.group):
        return Psi.restrict(Phi.group), Phi
    if Phi.group.contains_group(Psi.group):
        return Psi, Phi.restrict(Psi.group)
    raise EmbeddingError("the two data are acted on by unrelated groups")


def _is_fixed(Psi: TwistedRootDatum, Phi: TwistedRootDatum, F: np.ndarray) -> bool:
    G = Psi.group
    for k in G.generator_indices:
        moved = Phi.action[k] @ F @ Psi.action[G.inv(k)]
        if not np.array_equal(canonical_representative(Psi.pinned, Phi.pinned, moved), F):
            return False
    return True


def _check_same_type(Psi: TwistedRootDatum, Phi: TwistedRootDatum):
    _, d1 = cartan_and_dynkin(Psi.pinned)
    _, d2 = cartan_and_dynkin(Phi.pinned)
    if sorted(d1.component_labels) != sorted(d2.component_labels) or Psi.base.rank != Phi.base.rank:
        raise EmbeddingError(f"type mismatch: {d1.label} vs {d2.label}")


def enumerate_orientations(Psi: TwistedRootDatum, Phi: TwistedRootDatum) -> list[Orientation]:
    """All ``Gamma``-fixed points of ``Isomext(Psi, Phi)``.

    If one datum is acted on by a subgroup of the other's group, the
    larger one is restricted first.
    """
    _check_same_type(Psi, Phi)
    Psi, Phi = _align_groups(Psi, Phi)
    out = []
    for F, pi in pinned_isomorphisms(Psi.pinned, Phi.pinned):
        if _is_fixed(Psi, Phi, F):
            out.append(Orientation(Psi, Phi, F, pi))
    return out


def identity_orientation(Psi: TwistedRootDatum) -> Orientation:
    return Orientation(Psi, Psi, np.eye(Psi.base.rank, dtype=np.int64), tuple(range(len(Psi.pinned.delta))))


def compose_orientations(u: Orientation, w: Orientation) -> Orientation:
    """``u o w`` for ``w: G -> Psi`` and ``u: Psi -> G'``."""
    if u.source.base != w.target.base or u.source.pinned.delta != w.target.pinned.delta:
        raise EmbeddingError("orientations are not composable")
    F = u.matrix @ w.matrix
    pi = tuple(u.diagram_map[w.diagram_map[i]] for i in range(len(w.diagram_map)))
    return Orientation(w.source, u.target, F, pi)


def inverse_orientation(u: Orientation) -> Orientation:
    Finv = _dual_map(u.matrix).T
    pi = [0] * len(u.diagram_map)
    for i, j in enumerate(u.diagram_map):
        pi[j] = i
    return Orientation(u.target, u.source, Finv, tuple(pi))


# ---------------------------------------------------------------------------
# Local and global decisions


@dataclass(frozen=True)
class LocalDecision:
    """Result of the local test: ``ok`` iff ``mapped`` contains ``Delta°(G)``."""

    ok: bool
    mapped: frozenset[int]
    required: frozenset[int]

    def __bool__(self) -> bool:
        return self.ok


def decide_local(psi_index: TitsIndex, G: LocalGroupDatum, u: Orientation) -> LocalDecision:
    """Local existence of an embedding with orientation ``u``: ``u(Delta°(Psi)) >= Delta°(G)``."""
    if u.target.base != G.datum.base:
        raise EmbeddingError("orientation target differs from the group datum")
    if len(u.diagram_map) != len(psi_index.diagram.nodes):
        raise EmbeddingError("orientation and Tits index have different diagrams")
    mapped = frozenset(u.diagram_map[i] for i in psi_index.distinguished)
    required = G.index.distinguished
    return LocalDecision(required <= mapped, mapped, required)


class Verdict(str, Enum):
    GLOBAL_OK = "GLOBAL_OK"
    LOCAL_ONLY = "LOCAL_ONLY"
    LOCAL_FAIL = "LOCAL_FAIL"


@dataclass(frozen=True, eq=False)
class GlobalScenario:
    """Global data: ``Psi`` over ``Gamma``, one local group datum per place.

    ``g_global`` optionally gives the twisted datum of ``G`` over the
    whole group; its fixed orientations are then the global candidates.
    Without it, every pinned isomorphism fixed at all places is a
    candidate.
    """

    group: FiniteGroup
    psi: TwistedRootDatum
    g_data: dict
    places: list
    g_global: TwistedRootDatum | None = None

    def __post_init__(self):
        labels = [p.label for p in self.places]
        if len(set(labels)) != len(labels):
            raise EmbeddingError("place labels must be distinct")
        for p in self.places:
            if p.label not in self.g_data:
                raise EmbeddingError(f"no group datum for place {p.label}")
            if not self.group.contains_group(p.decomposition):
                raise EmbeddingError(f"decomposition group at {p.label} is not a subgroup")
            _check_same_type(self.psi, self.g_data[p.label].datum)


@dataclass(frozen=True, eq=False)
class OrientationTable:
    """Per-place, per-orientation results and the resulting verdict."""

    orientations: list
    place_labels: list
    table: list  # table[o][v]: LocalDecision
    local_exists: list
    local_witnesses: list
    psi_indices: list
    verdict: Verdict


def decide_all_orientations(scenario: GlobalScenario) -> OrientationTable:
    """Evaluate every global orientation at every place.

    ``GLOBAL_OK`` if one orientation works everywhere, ``LOCAL_ONLY`` if
    each place has some working local orientation but no global one works
    everywhere, ``LOCAL_FAIL`` otherwise.
    """
    psi = scenario.psi
    places = scenario.places
    if scenario.g_global is not None:
        rows = enumerate_orientations(psi, scenario.g_global)
        g_base = scenario.g_global
    else:
        g_base = scenario.g_data[places[0].label].datum if places else psi
        rows = [Orientation(psi, g_base, F, pi) for F, pi in pinned_isomorphisms(psi.pinned, g_base.pinned)]
    psi_indices, table_cols, exists, witnesses = [], [], [], []
    for p in places:
        G = scenario.g_data[p.label]
        if G.datum.base != g_base.base:
            raise EmbeddingError(f"group datum at {p.label} has a different split datum")
        local_psi = psi.restrict(p.decomposition)
        I = compute_tits_index(local_psi)
        psi_indices.append(I)
        col = []
        for u in rows:
            local_u = Orientation(local_psi, G.datum, u.matrix, u.diagram_map)
            col.append(decide_local(I, G, local_u) if _is_fixed(*_align_groups(local_psi, G.datum), u.matrix) else LocalDecision(False, frozenset(), G.index.distinguished))
        table_cols.append(col)
        found = None
        for v in enumerate_orientations(local_psi, G.datum):
            if decide_local(I, G, v):
                found = v
                break
        exists.append(found is not None)
        witnesses.append(found)
    if scenario.g_global is None:
        keep = [i for i in range(len(rows)) if all(_is_fixed(*_align_groups(psi.restrict(p.decomposition), scenario.g_data[p.label].datum), rows[i].matrix) for p in places)]
        rows = [rows[i] for i in keep]
        table_cols = [[col[i] for i in keep] for col in table_cols]
    table = [[table_cols[v][o] for v in range(len(places))] for o in range(len(rows))]
    if any(all(row) for row in table):
        verdict = Verdict.GLOBAL_OK
    elif all(exists):
        verdict = Verdict.LOCAL_ONLY
        distinct = {u.diagram_map for u in rows} | {w.diagram_map for w in witnesses}
        assert len(distinct) >= 2, "a purely local solution needs at least two orientations"
    else:
        verdict = Verdict.LOCAL_FAIL
    return OrientationTable(rows, [p.label for p in places], table, exists, witnesses, psi_indices, verdict)


# ---------------------------------------------------------------------------
# Local-global certificates and the obstruction group


class CertificateKind(str, Enum):
    TYPE_C = "TYPE_C"
    ANISOTROPIC_AT = "ANISOTROPIC_AT"
    GENERIC = "GENERIC"
    NONE = "NONE"


@dataclass(frozen=True)
class Certificate:
    """Reason the local-global principle holds, if one is found.

    ``place`` names the anisotropic place; ``witness`` is the index of a
    group element acting as a Coxeter element for ``GENERIC``.
    """

    kind: CertificateKind
    place: str | None = None
    witness: int | None = None


def _is_type_c(label: str) -> bool:
    return label in ("A1", "B2") or label.startswith("C")


def _places(Psi: TwistedRootDatum, places) -> list[PlaceModel]:
    if places is CHEBOTAREV:
        return [PlaceModel(f"cyc{i}", D) for i, D in enumerate(Psi.group.cyclic_subgroup_classes())]
    return [p if isinstance(p, PlaceModel) else PlaceModel(str(i), p) for i, p in enumerate(places)]


def lgp_certificate(Psi: TwistedRootDatum, places) -> Certificate:
    """First applicable certificate among type C, anisotropy at a place, genericity."""
    if not predicates(Psi.base).reduced:
        raise RootDatumError("lgp_certificate needs a reduced root datum")
    if Psi.base.n_roots:
        _, diagram = cartan_and_dynkin(Psi.pinned)
        if diagram.component_labels and all(_is_type_c(lab) for lab in diagram.component_labels):
            return Certificate(CertificateKind.TYPE_C)
    generic = bool(Psi.base.n_roots) and predicates(Psi.base).semisimple and is_generic(Psi)
    # under the Chebotarev model the Coxeter place is always listed; report the stronger reason
    if generic and places is CHEBOTAREV:
        return _generic_certificate(Psi)
    for p in _places(Psi, places):
        if is_anisotropic(Psi, p.decomposition):
            return Certificate(CertificateKind.ANISOTROPIC_AT, place=p.label)
    if generic:
        return _generic_certificate(Psi)
    return Certificate(CertificateKind.NONE)


def _generic_certificate(Psi: TwistedRootDatum) -> Certificate:
    c = coxeter_element(Psi.pinned)
    for k in range(Psi.group.order):
        if np.array_equal(Psi.action[k], c):
            return Certificate(CertificateKind.GENERIC, witness=k)
    raise AssertionError("generic datum without a Coxeter element in its image")


def obstruction_group(Psi: TwistedRootDatum, places, cost_cap: int = DEFAULT_COST_CAP) -> CohomologyGroup:
    """``Sha^1`` of the character lattice of ``sc(Psi)`` over ``places``.

    ``places`` may be :data:`CHEBOTAREV`. A trivial result certifies the
    local-global principle for the oriented embedding functor.
    """
    if not predicates(Psi.base).reduced:
        raise RootDatumError("obstruction_group needs a reduced root datum")
    sc = Psi.derive("sc")
    return sha(1, Psi.group, sc.lattice, places if places is CHEBOTAREV else [p.decomposition if isinstance(p, PlaceModel) else p for p in places], cost_cap)


def transport_orientation(u: Orientation, op: str) -> Orientation:
    """The orientation between ``op(source)`` and ``op(target)`` induced by ``u``."""
    if op not in TRANSPORT_OPS:
        raise EmbeddingError(f"op must be one of {TRANSPORT_OPS}")
    src, dst = u.source.derive(op), u.target.derive(op)
    F = transport_isomorphism(u.source.base, u.target.base, u.matrix, op)
    F = canonical_representative(src.pinned, dst.pinned, F)
    moved = Orientation(src, dst, F, u.diagram_map)
    # the diagram map is read off from where simple roots land
    pos = {d: i for i, d in enumerate(dst.pinned.delta)}
    images = dst.base._root_lookup.find(src.pinned.simple_roots @ F.T)
    if tuple(pos.get(int(j), -1) for j in images) != u.diagram_map:
        raise AssertionError("transport changed the diagram map")
    return moved


def transport_local_datum(G: LocalGroupDatum, op: str) -> LocalGroupDatum:
    """``G`` with its torus datum derived by ``op``; the Tits index nodes are unchanged."""
    datum = G.datum.derive(op)
    _, diagram = cartan_and_dynkin(datum.pinned)
    return LocalGroupDatum(datum, TitsIndex(diagram, G.index.distinguished))

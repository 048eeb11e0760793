"""Split root data.

A root datum is stored with ``M = ZZ^rank`` and ``M^vee`` identified with
``ZZ^rank`` through the dot product, so the transpose of a lattice map
is literally the matrix transpose. Root ``i`` is paired with coroot ``i``.

Morphisms are stored as character-lattice maps ``f: M_1 -> M_2`` with
``f(R_1) = R_2`` and ``f^T(R_2^vee) = R_1^vee``. The corresponding map of
tori goes the other way.

Cartan matrices use ``C[i][j] = <alpha_i^vee, alpha_j>``. With this
convention a double bond ``i - j`` has ``|C[j][i]| = 2`` exactly when
``alpha_i`` is the long root, and the diagram arrow points long to short.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .exact_lattice import (
    IntMatrix,
    Sublattice,
    determinant,
    kernel_basis,
    quotient_invariants,
    saturate,
    solve_integer,
    solve_rational,
)

__all__ = [
    "RootDatum",
    "PinnedRootDatum",
    "WeylGroup",
    "DynkinDiagram",
    "RootDatumMorphism",
    "Violation",
    "ValidationReport",
    "Predicates",
    "AutGroup",
    "RootDatumError",
    "validate",
    "reflection",
    "reflection_matrix",
    "weyl_group",
    "simple_system",
    "cartan_and_dynkin",
    "derive",
    "derive_with_transport",
    "DERIVE_OPS",
    "predicates",
    "aut_group",
    "coxeter_element",
    "isomorphisms",
    "is_automorphism",
    "factor_weyl_diagram",
    "diagram_map",
    "canonical_representative",
    "in_weyl_group",
    "transport_isomorphism",
    "direct_sum",
    "gl_datum",
]

DERIVE_OPS = ("ad", "sc", "der", "ss", "rad", "corad", "dual")


class RootDatumError(ValueError):
    """Raised for inputs outside an operation's domain."""


def _mat(a) -> np.ndarray:
    return np.asarray(a, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RootDatum:
    """Root datum ``(M, M^vee, R, R^vee)`` with ``M = ZZ^rank``.

    Parameters
    ----------
    rank : int
        Rank of the character lattice ``M``.
    roots : sequence of int vectors
        Roots, indexed.
    coroots : sequence of int vectors
        Coroots; ``coroots[i]`` is the coroot of ``roots[i]``.
    name : str, optional
        Display label; ignored by equality.
    """

    rank: int
    roots: tuple[tuple[int, ...], ...]
    coroots: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        roots = tuple(tuple(int(x) for x in r) for r in self.roots)
        coroots = tuple(tuple(int(x) for x in c) for c in self.coroots)
        if len(roots) != len(coroots):
            raise RootDatumError("roots and coroots must have the same length")
        for v in roots + coroots:
            if len(v) != self.rank:
                raise RootDatumError(f"vector {v} does not have length {self.rank}")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "coroots", coroots)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootDatum):
            return NotImplemented
        return (self.rank, self.roots, self.coroots) == (other.rank, other.roots, other.coroots)

    def __hash__(self) -> int:
        return hash((self.rank, self.roots, self.coroots))

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<RootDatum{label} rank={self.rank} roots={len(self.roots)}>"

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @cached_property
    def R(self) -> np.ndarray:
        """Roots as an ``(N, rank)`` int64 array."""
        return _mat(self.roots).reshape(len(self.roots), self.rank)

    @cached_property
    def Rv(self) -> np.ndarray:
        """Coroots as an ``(N, rank)`` int64 array."""
        return _mat(self.coroots).reshape(len(self.coroots), self.rank)

    @cached_property
    def pairing(self) -> np.ndarray:
        """``P[i, j] = <alpha_i^vee, alpha_j>``."""
        return self.Rv @ self.R.T

    @cached_property
    def root_index(self) -> dict[tuple[int, ...], int]:
        return {r: i for i, r in enumerate(self.roots)}

    @cached_property
    def _root_lookup(self):
        return _VectorLookup(self.R)

    @cached_property
    def _coroot_lookup(self):
        return _VectorLookup(self.Rv)

    def index_of(self, root: Sequence[int]) -> int:
        return self.root_index[tuple(int(x) for x in root)]

    def dual(self) -> "RootDatum":
        return RootDatum(self.rank, self.coroots, self.roots, _suffix(self.name, "dual"))


def _suffix(name: str, op: str) -> str:
    return f"{op}({name})" if name else ""


class _VectorLookup:
    """Vectorised membership test for a fixed set of integer vectors."""

    def __init__(self, vectors: np.ndarray):
        self.vectors = vectors
        n, r = vectors.shape
        bound = int(np.abs(vectors).max()) if vectors.size else 0
        self.base = 2 * bound + 3
        self.weights = np.array([self.base ** (r - 1 - k) for k in range(r)], dtype=np.int64) \
            if r else np.zeros(0, dtype=np.int64)
        keys = vectors @ self.weights if n else np.zeros(0, dtype=np.int64)
        order = np.argsort(keys, kind="stable")
        self.sorted_keys = keys[order]
        self.order = order

    def find(self, images: np.ndarray) -> np.ndarray:
        """Index of each row of ``images`` in the set, ``-1`` when absent."""
        m = images.shape[0]
        out = np.full(m, -1, dtype=np.int64)
        if m == 0 or self.vectors.shape[0] == 0:
            return out
        keys = images @ self.weights
        pos = np.searchsorted(self.sorted_keys, keys)
        pos = np.clip(pos, 0, len(self.sorted_keys) - 1)
        cand = self.order[pos]
        ok = np.all(self.vectors[cand] == images, axis=1)
        out[ok] = cand[ok]
        return out


# ---------------------------------------------------------------------------
# Validation and reflections


@dataclass(frozen=True)
class Violation:
    axiom: str
    index: int
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(psi: RootDatum) -> ValidationReport:
    """Check the root datum axioms, reporting every failure with a witness index."""
    out: list[Violation] = []
    n = psi.n_roots
    if len(set(psi.roots)) != n:
        seen = {}
        for i, r in enumerate(psi.roots):
            if r in seen:
                out.append(Violation("distinct_roots", i, f"root {r} repeats index {seen[r]}"))
            seen.setdefault(r, i)
    P = psi.pairing
    for i in range(n):
        if P[i, i] != 2:
            out.append(Violation("pairing", i, f"<alpha_{i}^vee, alpha_{i}> = {int(P[i, i])} != 2"))
    if n:
        neg = psi._root_lookup.find(-psi.R)
        for i in range(n):
            if neg[i] < 0:
                out.append(Violation("negation", i, f"-alpha_{i} is not a root"))
            elif psi.coroots[neg[i]] != tuple(-x for x in psi.coroots[i]):
                out.append(Violation("negation", i, f"coroot of -alpha_{i} is not -alpha_{i}^vee"))
    if out:
        return ValidationReport(tuple(out))
    R, Rv = psi.R, psi.Rv
    for i in range(n):
        imgs = R - np.outer(P[i, :], R[i])          # s_i(alpha_j)
        coimgs = Rv - np.outer(P[:, i], Rv[i])      # s_i^vee(alpha_j^vee)
        idx = psi._root_lookup.find(imgs)
        bad = np.nonzero(idx < 0)[0]
        if bad.size:
            out.append(Violation("reflection_roots", i,
                                 f"s_{i} sends alpha_{int(bad[0])} outside R"))
            continue
        if not np.array_equal(Rv[idx], coimgs):
            j = int(np.nonzero(np.any(Rv[idx] != coimgs, axis=1))[0][0])
            out.append(Violation("reflection_coroots", i,
                                 f"s_{i} breaks the root/coroot bijection at index {j}"))
    return ValidationReport(tuple(out))


def reflection_matrix(psi: RootDatum, i: int) -> np.ndarray:
    """Matrix of ``x -> x - <alpha_i^vee, x> alpha_i`` acting on column vectors."""
    if not 0 <= i < psi.n_roots:
        raise IndexError(f"root index {i} out of range")
    return np.eye(psi.rank, dtype=np.int64) - np.outer(psi.R[i], psi.Rv[i])


def reflection(psi: RootDatum, i: int, x: Sequence[int]) -> tuple[int, ...]:
    """``s_{alpha_i}(x) = x - <alpha_i^vee, x> alpha_i``."""
    if not 0 <= i < psi.n_roots:
        raise IndexError(f"root index {i} out of range")
    c = sum(a * b for a, b in zip(psi.coroots[i], x))
    return tuple(int(xk) - c * ak for xk, ak in zip(x, psi.roots[i]))


# ---------------------------------------------------------------------------
# Weyl groups


class WeylGroup:
    """Weyl group as a finite set of integer matrices acting on ``M``.

    Parameters
    ----------
    generators : array of shape (k, rank, rank)
        Reflection matrices of the simple roots.
    elements : array of shape (order, rank, rank)
        All elements; ``elements[0]`` is the identity.
    """

    def __init__(self, rank: int, generators: np.ndarray, elements: np.ndarray):
        self.rank = rank
        self.generators = generators
        self.elements = elements
        self._index = {m.tobytes(): i for i, m in enumerate(elements)}

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, m) -> bool:
        return np.ascontiguousarray(m, dtype=np.int64).tobytes() in self._index

    def index(self, m) -> int:
        return self._index[np.ascontiguousarray(m, dtype=np.int64).tobytes()]


def _closure(rank: int, gens: np.ndarray, cap: int | None = None) -> np.ndarray:
    """All products of ``gens`` (a finite matrix group), identity first."""
    ident = np.eye(rank, dtype=np.int64)
    seen = {ident.tobytes()}
    elements = [ident]
    frontier = ident[None]
    while frontier.size:
        new = []
        for g in gens:
            prods = np.ascontiguousarray(frontier @ g)
            for m in prods:
                k = m.tobytes()
                if k not in seen:
                    seen.add(k)
                    new.append(m)
        if cap is not None and len(seen) > cap:
            raise RootDatumError(f"matrix group exceeds the cap of {cap} elements")
        elements.extend(new)
        frontier = np.array(new, dtype=np.int64).reshape(-1, rank, rank)
    return np.array(elements, dtype=np.int64).reshape(-1, rank, rank)


_WEYL_CACHE: dict[tuple, WeylGroup] = {}


def weyl_group(psi: RootDatum) -> WeylGroup:
    """Enumerate ``W(psi)`` by closure over the simple reflections."""
    key = (psi.rank, psi.roots, psi.coroots)
    if key in _WEYL_CACHE:
        return _WEYL_CACHE[key]
    if psi.n_roots:
        delta = simple_system(psi).delta
        gens = np.array([reflection_matrix(psi, i) for i in delta], dtype=np.int64)
    else:
        gens = np.zeros((0, psi.rank, psi.rank), dtype=np.int64)
    W = WeylGroup(psi.rank, gens, _closure(psi.rank, gens))
    _WEYL_CACHE[key] = W
    return W


# ---------------------------------------------------------------------------
# Simple systems


@dataclass(frozen=True, eq=False)
class PinnedRootDatum:
    """Root datum with a system of simple roots ``delta`` (root indices)."""

    base: RootDatum
    delta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(int(i) for i in self.delta))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PinnedRootDatum):
            return NotImplemented
        return self.base == other.base and self.delta == other.delta

    def __hash__(self) -> int:
        return hash((self.base, self.delta))

    @property
    def simple_roots(self) -> np.ndarray:
        return self.base.R[list(self.delta)].reshape(len(self.delta), self.base.rank)

    @property
    def simple_coroots(self) -> np.ndarray:
        return self.base.Rv[list(self.delta)].reshape(len(self.delta), self.base.rank)

    @cached_property
    def coefficients(self) -> np.ndarray:
        """``(N, |delta|)`` array expressing every root over ``delta``."""
        n = self.base.n_roots
        if not self.delta:
            if n:
                raise RootDatumError("empty simple system for a nonempty root set")
            return np.zeros((0, 0), dtype=np.int64)
        A = self.simple_roots.T.tolist()
        X = solve_rational(A, self.base.R.T.tolist())
        if X is None:
            raise RootDatumError("roots are not in the span of the simple system")
        if any(x.denominator != 1 for row in X for x in row):
            raise RootDatumError("roots are not integral combinations of the simple system")
        return np.array([[int(x) for x in row] for row in X], dtype=np.int64).T

    def is_valid(self) -> bool:
        try:
            c = self.coefficients
        except RootDatumError:
            return False
        return bool(np.all((c >= 0).all(axis=1) | (c <= 0).all(axis=1)))

    @cached_property
    def positive(self) -> tuple[int, ...]:
        c = self.coefficients
        return tuple(int(i) for i in np.nonzero((c >= 0).all(axis=1))[0])


def simple_system(psi: RootDatum) -> PinnedRootDatum:
    """Deterministic simple system from the functional ``(N^(r-1), ..., N, 1)``.

    ``N`` starts above twice the largest root coordinate and increases if
    some root pairs to zero. The simple roots are listed in decreasing
    order of their value under the functional.
    """
    if psi.n_roots == 0:
        return PinnedRootDatum(psi, ())
    N = 2 * int(np.abs(psi.R).max()) + 1
    while True:
        phi = np.array([N ** (psi.rank - 1 - k) for k in range(psi.rank)], dtype=object)
        vals = [sum(int(a) * b for a, b in zip(r, phi)) for r in psi.roots]
        if all(v != 0 for v in vals):
            break
        N += 1
    pos = [i for i, v in enumerate(vals) if v > 0]
    pos_set = {psi.roots[i] for i in pos}
    decomposable = set()
    for a in pos:
        ra = psi.roots[a]
        for b in pos:
            s = tuple(x + y for x, y in zip(ra, psi.roots[b]))
            if s in pos_set:
                decomposable.add(s)
    simple = [i for i in pos if psi.roots[i] not in decomposable]
    simple.sort(key=lambda i: (-vals[i], i))
    return PinnedRootDatum(psi, tuple(simple))


# ---------------------------------------------------------------------------
# Cartan matrices and Dynkin diagrams


@dataclass(frozen=True)
class DynkinDiagram:
    """Dynkin diagram on the nodes ``0..len(delta)-1`` of a pinned datum.

    ``bonds`` holds ``(i, j, multiplicity, long_node)`` with ``i < j``;
    ``long_node`` is ``None`` for simple bonds. ``components`` lists node
    tuples in Bourbaki order, one per connected component, with matching
    ``component_labels``.
    """

    nodes: tuple[int, ...]
    bonds: tuple[tuple[int, int, int, int | None], ...]
    components: tuple[tuple[int, ...], ...]
    component_labels: tuple[str, ...]

    @property
    def label(self) -> str:
        return "x".join(self.component_labels) if self.component_labels else "T"

    def bourbaki_label(self, node: int) -> tuple[int, int]:
        """``(component, 1-based Bourbaki index)`` of ``node``."""
        for c, comp in enumerate(self.components):
            if node in comp:
                return c, comp.index(node) + 1
        raise KeyError(node)

    def is_automorphism(self, perm: Sequence[int], cartan: np.ndarray) -> bool:
        p = list(perm)
        return bool(np.array_equal(cartan[np.ix_(p, p)], cartan))


def standard_cartan(label: str) -> np.ndarray:
    """Cartan matrix of an irreducible type in Bourbaki numbering."""
    kind, n = label[0], int(label[1:])
    C = 2 * np.eye(n, dtype=np.int64)

    def link(i, j, cij=-1, cji=-1):
        C[i, j], C[j, i] = cij, cji

    if kind in "ABC":
        for i in range(n - 1):
            link(i, i + 1)
        if kind == "B" and n >= 2:
            link(n - 2, n - 1, -1, -2)
        if kind == "C" and n >= 2:
            link(n - 2, n - 1, -2, -1)
    elif kind == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif kind == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif kind == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif kind == "G":
        link(0, 1, -3, -1)
    else:
        raise RootDatumError(f"unknown type {label}")
    return C


def _classify_component(nodes: list[int], C: np.ndarray) -> tuple[str, tuple[int, ...]]:
    adj = {i: [j for j in nodes if j != i and C[i, j] != 0] for i in nodes}
    n = len(nodes)
    mult = {}
    for i in nodes:
        for j in adj[i]:
            mult[(i, j)] = int(C[i, j] * C[j, i])
    if n == 1:
        return "A1", tuple(nodes)
    edges = sum(len(v) for v in adj.values()) // 2
    if edges != n - 1:
        raise RootDatumError("Dynkin component contains a cycle")
    ends = sorted(i for i in nodes if len(adj[i]) == 1)
    branch = [i for i in nodes if len(adj[i]) >= 3]

    def walk(start, avoid=()):
        path, prev, cur = [start], None, start
        while True:
            nxt = [j for j in adj[cur] if j != prev and j not in avoid]
            if len(nxt) != 1:
                return path
            prev, cur = cur, nxt[0]
            path.append(cur)

    def long_of(i, j):  # long root among a multiple bond
        return i if abs(C[j, i]) > 1 else j

    multiple = [(i, j) for (i, j), m in mult.items() if m > 1 and i < j]
    if multiple:
        (i, j), = multiple
        m = mult[(i, j)]
        if m == 3:
            if n != 2:
                raise RootDatumError("triple bond outside G2")
            lg = long_of(i, j)
            short = j if lg == i else i
            return "G2", (short, lg)
        if m != 2:
            raise RootDatumError(f"bond multiplicity {m} is not crystallographic")
        if n == 2:
            lg = long_of(i, j)
            short = j if lg == i else i
            return "B2", (lg, short)
        if branch:
            raise RootDatumError("branched diagram with a double bond")
        if n == 4 and len(adj[i]) == 2 and len(adj[j]) == 2:
            lg = long_of(i, j)
            start = next(e for e in ends if e in adj[lg])
            return "F4", tuple(walk(start))
        # chain with the double bond at one end
        end = i if len(adj[i]) == 1 else j
        other = j if end == i else i
        start = next(e for e in ends if e != end)
        order = tuple(walk(start))
        return ("B" if long_of(end, other) == other else "C") + str(n), order
    if not branch:
        return f"A{n}", tuple(walk(ends[0]))
    if len(branch) > 1:
        raise RootDatumError("simply laced diagram with two branch nodes")
    b = branch[0]
    if len(adj[b]) != 3:
        raise RootDatumError("branch node of degree > 3")
    arms = sorted((walk(j, avoid=(b,)) for j in adj[b]), key=lambda a: (len(a), a))
    lens = tuple(len(a) for a in arms)
    if lens[0] == 1 and lens[1] == 1:
        long_arm = arms[2][::-1]
        return f"D{n}", tuple(long_arm) + (b, arms[0][0], arms[1][0])
    if lens in ((1, 2, 2), (1, 2, 3), (1, 2, 4)):
        a1, a2, a3 = arms
        # Bourbaki: 1-3-4-5-..., with 2 attached to 4
        order = (a2[1], a1[0], a2[0], b) + tuple(a3)
        return f"E{n}", order
    raise RootDatumError(f"unrecognised simply laced diagram with arms {lens}")


def cartan_and_dynkin(p: PinnedRootDatum) -> tuple[np.ndarray, DynkinDiagram]:
    """Cartan matrix ``C[i][j] = <alpha_i^vee, alpha_j>`` and the classified diagram."""
    psi = p.base
    if not predicates(psi).reduced:
        raise RootDatumError("Dynkin classification needs a reduced root datum")
    d = list(p.delta)
    C = psi.pairing[np.ix_(d, d)].copy() if d else np.zeros((0, 0), dtype=np.int64)
    nodes = list(range(len(d)))
    seen, comps = set(), []
    for s in nodes:
        if s in seen:
            continue
        comp, queue = [], [s]
        seen.add(s)
        while queue:
            i = queue.pop()
            comp.append(i)
            for j in nodes:
                if j not in seen and C[i, j] != 0:
                    seen.add(j)
                    queue.append(j)
        comps.append(sorted(comp))
    labels, orders = [], []
    for comp in comps:
        label, order = _classify_component(comp, C)
        std = standard_cartan(label)
        sub = C[np.ix_(list(order), list(order))]
        if not np.array_equal(sub, std):
            raise RootDatumError(f"component {comp} does not match the {label} catalog matrix")
        labels.append(label)
        orders.append(order)
    bonds = []
    for i in nodes:
        for j in nodes:
            if i < j and C[i, j] != 0:
                m = int(C[i, j] * C[j, i])
                long_node = None if m == 1 else (i if abs(C[j, i]) > 1 else j)
                bonds.append((i, j, m, long_node))
    return C, DynkinDiagram(tuple(nodes), tuple(bonds), tuple(orders), tuple(labels))


# ---------------------------------------------------------------------------
# Derived root data


def _induce(psi: RootDatum, basis: IntMatrix, name: str):
    """Root datum induced on the sublattice with row basis ``basis``.

    Returns the new datum together with the matrices needed to move
    automorphisms across (``basis^T`` expresses new coordinates in old ones).
    """
    k = basis.rows
    BT = basis.T
    if psi.n_roots:
        coords = solve_integer(BT, IntMatrix.from_rows(psi.R.T.tolist(), psi.n_roots))
        if coords is None:
            raise RootDatumError("roots do not lie in the sublattice")
        roots = [tuple(coords.entries[i][j] for i in range(k)) for j in range(psi.n_roots)]
        coroots = [basis.apply(c) for c in psi.coroots]
    else:
        roots, coroots = [], []
    return RootDatum(k, roots, coroots, name)


def _restrict_map(basis: IntMatrix, a: np.ndarray) -> np.ndarray:
    """Matrix of ``a`` on the sublattice spanned by the rows of ``basis``."""
    BT = basis.T
    if basis.rows == 0:
        return np.zeros((0, 0), dtype=np.int64)
    image = IntMatrix.from_rows((np.asarray(a, dtype=object) @ np.array(BT.tolist(), dtype=object)).tolist(),
                                basis.rows)
    sol = solve_integer(BT, image)
    if sol is None:
        raise RootDatumError("map does not preserve the sublattice")
    return np.array(sol.tolist(), dtype=np.int64).reshape(basis.rows, basis.rows)


def derive_with_transport(psi: RootDatum, op: str):
    """Derived datum plus a function moving automorphisms of ``psi`` to it.

    The returned callable takes an integer matrix acting on ``M`` (an
    element of ``Aut(psi)``) and returns its matrix on the new character
    lattice.
    """
    if op == "dual":
        return psi.dual(), _dual_map
    if op in ("ad", "ss"):
        gens = Sublattice.span(psi.rank, psi.roots) if psi.n_roots else Sublattice(psi.rank, IntMatrix.zeros(0, psi.rank))
        L = gens.basis() if op == "ad" else saturate(gens)
        basis = L.generators
        new = _induce(psi, basis, _suffix(psi.name, op))
        return new, lambda a, basis=basis: _restrict_map(basis, a)
    if op == "corad":
        if psi.n_roots:
            basis = kernel_basis(IntMatrix.from_rows(psi.coroots, psi.rank)).generators
        else:
            basis = IntMatrix.identity(psi.rank)
        new = RootDatum(basis.rows, (), (), _suffix(psi.name, op))
        return new, lambda a, basis=basis: _restrict_map(basis, a)
    dual_of = {"sc": "ad", "der": "ss", "rad": "corad"}
    if op in dual_of:
        inner, t_inner = derive_with_transport(psi.dual(), dual_of[op])
        new = inner.dual()
        new = RootDatum(new.rank, new.roots, new.coroots, _suffix(psi.name, op))

        def transport(a, t_inner=t_inner):
            return _dual_map(t_inner(_dual_map(np.asarray(a, dtype=np.int64))))

        return new, transport
    raise RootDatumError(f"unknown operation {op!r}; expected one of {DERIVE_OPS}")


def derive(psi: RootDatum, op: str) -> RootDatum:
    """One of the derived data ``ad, sc, der, ss, rad, corad, dual``."""
    return derive_with_transport(psi, op)[0]


# ---------------------------------------------------------------------------
# Predicates


@dataclass(frozen=True)
class Predicates:
    reduced: bool
    semisimple: bool
    adjoint: bool
    simply_connected: bool


def _span(rank: int, vectors) -> Sublattice:
    vectors = list(vectors)
    if not vectors:
        return Sublattice(rank, IntMatrix.zeros(0, rank))
    return Sublattice.span(rank, vectors)


def predicates(psi: RootDatum) -> Predicates:
    """Reduced / semisimple / adjoint / simply-connected flags."""
    rs = set(psi.roots)
    reduced = all(tuple(2 * x for x in r) not in rs for r in psi.roots)
    G = _span(psi.rank, psi.roots)
    Gv = _span(psi.rank, psi.coroots)
    semisimple = G.rank == psi.rank
    adjoint = quotient_invariants(psi.rank, G).is_trivial
    sc = quotient_invariants(psi.rank, Gv).is_trivial
    return Predicates(reduced, semisimple, adjoint, sc)


# ---------------------------------------------------------------------------
# Morphisms and automorphisms


@dataclass(frozen=True, eq=False)
class RootDatumMorphism:
    """Isomorphism stored as the character-lattice map ``M_source -> M_target``."""

    source: RootDatum
    target: RootDatum
    map: IntMatrix

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.map.tolist(), dtype=np.int64).reshape(self.map.shape)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RootDatumMorphism):
            return NotImplemented
        return (self.source, self.target, self.map) == (other.source, other.target, other.map)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.map))


def _root_permutation(src: RootDatum, dst: RootDatum, F: np.ndarray) -> np.ndarray | None:
    """Index map of ``F`` on roots if ``F`` is an isomorphism ``src -> dst``, else ``None``.

    Checks ``F(R_src) = R_dst`` and ``F^T(F(alpha)^vee) = alpha^vee``.
    """
    if src.n_roots != dst.n_roots:
        return None
    if src.n_roots == 0:
        return np.zeros(0, dtype=np.int64)
    idx = dst._root_lookup.find(src.R @ F.T)
    if np.any(idx < 0):
        return None
    if len(set(idx.tolist())) != len(idx):
        return None
    if not np.array_equal(dst.Rv[idx] @ F, src.Rv):
        return None
    return idx


def is_automorphism(psi: RootDatum, a) -> bool:
    a = np.asarray(a, dtype=np.int64)
    if a.shape != (psi.rank, psi.rank):
        return False
    if determinant(a.tolist()) not in (1, -1):
        return False
    return _root_permutation(psi, psi, a) is not None


def _cartan_images(P_dst: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Ordered tuples of target roots whose mutual pairings reproduce ``C``.

    Returns an ``(K, l)`` array, built level by level with vectorised
    filtering of all extensions of the partial tuples.
    """
    l = C.shape[0]
    cand = np.nonzero(np.diag(P_dst) == 2)[0]
    partial = np.zeros((1, 0), dtype=np.int64)
    for k in range(l):
        K = partial.shape[0]
        ext = np.repeat(partial, len(cand), axis=0)
        new = np.tile(cand, K)
        keep = np.ones(len(new), dtype=bool)
        for a in range(k):
            keep &= P_dst[ext[:, a], new] == C[a, k]
            keep &= P_dst[new, ext[:, a]] == C[k, a]
        partial = np.concatenate([ext[keep], new[keep, None]], axis=1)
    return partial


def _require_semisimple(*data: RootDatum):
    for psi in data:
        if not predicates(psi).semisimple:
            raise RootDatumError(
                "automorphism group may be infinite; apply derive(psi, 'ss') first")


def _pinned_maps(src: PinnedRootDatum, dst: RootDatum, chunk: int = 4096):
    """All isomorphisms ``src.base -> dst``.

    Returns ``(maps, perms)``: an ``(K, r, r)`` array of matrices and the
    ``(K, N)`` array of induced root index maps.
    """
    A = src.simple_roots.T  # columns are the simple roots
    r = src.base.rank
    if A.shape[1] != r:
        raise RootDatumError("simple roots do not span the character lattice")
    det = determinant(A.tolist())
    adj = _adjugate(A)
    C = src.base.pairing[np.ix_(list(src.delta), list(src.delta))]
    images = _cartan_images(dst.pairing, C)
    maps, perms = [], []
    look = dst._root_lookup
    N = src.base.n_roots
    for start in range(0, len(images), chunk):
        img = images[start:start + chunk]
        B = np.transpose(dst.R[img], (0, 2, 1))          # (K, r, l)
        num = B @ adj
        ok = np.all((num % det) == 0, axis=(1, 2))
        F = num[ok] // det
        if not len(F):
            continue
        ims = np.einsum("nr,ksr->kns", src.base.R, F)    # F(alpha_n) for every map
        idx = look.find(ims.reshape(-1, r)).reshape(len(F), N)
        good = np.all(idx >= 0, axis=1)
        cov = np.einsum("knr,krs->kns", dst.Rv[np.where(idx >= 0, idx, 0)], F)
        good &= np.all(cov == src.base.Rv[None], axis=(1, 2))
        if np.any(good):
            sorted_idx = np.sort(idx[good], axis=1)
            good_idx = np.nonzero(good)[0]
            bij = np.all(sorted_idx == np.arange(N)[None], axis=1) if dst.n_roots == N else np.zeros(len(good_idx), bool)
            maps.append(F[good_idx[bij]])
            perms.append(idx[good_idx[bij]])
    if not maps:
        return np.zeros((0, r, r), dtype=np.int64), np.zeros((0, N), dtype=np.int64)
    return np.concatenate(maps), np.concatenate(perms)


def _adjugate(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=np.int64)
    out = np.zeros((n, n), dtype=np.int64)
    L = np.asarray(A).tolist()
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(L) if k != i]
            out[j, i] = (-1) ** (i + j) * determinant(minor)
    return out


def isomorphisms(psi1: RootDatum, psi2: RootDatum) -> list[RootDatumMorphism]:
    """Every isomorphism ``psi1 -> psi2`` (empty list if none).

    Found by sending a simple system of ``psi1`` to every Cartan-compatible
    tuple of roots of ``psi2`` and keeping the integral maps that carry
    roots onto roots and pull coroots back to coroots.
    """
    _require_semisimple(psi1, psi2)
    if psi1.rank != psi2.rank or psi1.n_roots != psi2.n_roots:
        return []
    if psi1.n_roots == 0:
        return [RootDatumMorphism(psi1, psi2, IntMatrix.identity(psi1.rank))] if psi1.rank == 0 else []
    maps, _ = _pinned_maps(simple_system(psi1), psi2)
    out = []
    for F in maps:
        if determinant(F.tolist()) in (1, -1):
            out.append(RootDatumMorphism(psi1, psi2, IntMatrix.from_rows(F.tolist(), psi1.rank)))
    return out


def _simple_reflection_perms(p: PinnedRootDatum) -> np.ndarray:
    """``(l, N)`` root index permutations of the simple reflections."""
    psi = p.base
    out = []
    for i in p.delta:
        imgs = psi.R - np.outer(psi.pairing[i, :], psi.R[i])
        out.append(psi._root_lookup.find(imgs))
    return np.array(out, dtype=np.int64).reshape(len(p.delta), psi.n_roots)


def _fold_permutations(p: PinnedRootDatum, perms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split root permutations ``g`` of automorphisms as ``g = w e``.

    Returns the permutations of ``w`` and ``e``. ``e`` preserves the
    positive roots of ``p``; ``w`` is a product of simple reflections found
    by repeatedly reflecting in a simple root sent to a negative root.
    """
    K, N = perms.shape
    sref = _simple_reflection_perms(p)
    positive = np.zeros(N, dtype=bool)
    positive[list(p.positive)] = True
    delta = np.array(p.delta, dtype=np.int64)
    ginv = np.empty_like(perms)
    ginv[np.arange(K)[:, None], perms] = np.arange(N)[None]
    rows = np.arange(K)
    for _ in range(N + 1):
        bad = ~positive[ginv[:, delta]]                 # alpha_i not in g(R+)
        active = bad.any(axis=1)
        if not active.any():
            break
        first = np.argmax(bad, axis=1)
        act = rows[active]
        # g <- s_i g, so g^{-1} <- g^{-1} s_i
        ginv[act] = ginv[act[:, None], sref[first[active]]]
    else:
        raise RootDatumError("chamber folding did not terminate")
    e = np.empty_like(ginv)
    e[rows[:, None], ginv] = np.arange(N)[None]
    # w = g e^{-1}: w[e[k]] = g[k]
    w = np.empty_like(perms)
    w[rows[:, None], e] = perms
    return w, e


def _dual_map(a: np.ndarray) -> np.ndarray:
    """Inverse transpose of a unimodular integer matrix."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if n == 0:
        return a.copy()
    d = determinant(a.tolist())
    if d not in (1, -1):
        raise RootDatumError("automorphism is not unimodular")
    return (_adjugate(a) * d).T


def _dominant_cocharacter(p: PinnedRootDatum) -> np.ndarray:
    """Sum of positive coroots: pairs to 2 with every simple root."""
    pos = [i for i in p.positive]
    return p.base.Rv[pos].sum(axis=0) if pos else np.zeros(p.base.rank, dtype=np.int64)


def factor_weyl_diagram(p: PinnedRootDatum, a) -> tuple[np.ndarray, np.ndarray, tuple[int, ...]]:
    """Factor an automorphism as ``a = w e`` with ``w`` in ``W`` and ``e(delta) = delta``.

    Returns ``(w, e, perm)`` where ``e(alpha_{delta[i]}) = alpha_{delta[perm[i]]}``.
    Works by folding ``a^{-T} x0`` back to the dominant chamber with simple
    reflections, where ``x0`` is a regular dominant cocharacter.
    """
    psi = p.base
    a = np.asarray(a, dtype=np.int64)
    word = _fold_word(p, _dual_map(a) @ _dominant_cocharacter(p))
    w_inv = np.eye(psi.rank, dtype=np.int64)
    w = np.eye(psi.rank, dtype=np.int64)
    for i in word:
        s = reflection_matrix(psi, p.delta[i])
        w_inv = s @ w_inv
        w = w @ s
    e = w_inv @ a
    pos = {d: k for k, d in enumerate(p.delta)}
    imgs = psi._root_lookup.find(p.simple_roots @ e.T)
    perm = tuple(pos.get(int(j), -1) for j in imgs)
    if -1 in perm:
        raise RootDatumError("matrix does not normalise the simple system")
    return w, e, perm


def _fold_word(p: PinnedRootDatum, x: np.ndarray) -> list[int]:
    """Simple-reflection indices moving cocharacter ``x`` into the dominant chamber."""
    psi = p.base
    S = p.simple_roots
    Sv = p.simple_coroots
    x = x.copy()
    word = []
    while True:
        vals = S @ x
        neg = np.nonzero(vals < 0)[0]
        if neg.size == 0:
            return word
        i = int(neg[0])
        x = x - vals[i] * Sv[i]
        word.append(i)
        if len(word) > 10 * max(1, psi.n_roots) ** 2:
            raise RootDatumError("folding did not terminate")


def diagram_map(p_src: PinnedRootDatum, p_dst: PinnedRootDatum, F) -> tuple[int, ...]:
    """Node map induced by an isomorphism ``F: M_src -> M_dst``.

    ``F`` sends the simple system of ``p_src`` to a base of the target;
    composing with the unique Weyl element that returns it to ``p_dst``'s
    simple system gives a bijection of nodes.
    """
    F = np.asarray(F, dtype=np.int64)
    dst = p_dst.base
    x = _dual_map(F) @ _dominant_cocharacter(p_src)
    word = _fold_word(p_dst, x)
    imgs = p_src.simple_roots @ F.T
    for i in word:
        s = reflection_matrix(dst, p_dst.delta[i])
        imgs = imgs @ s.T
    pos = {d: k for k, d in enumerate(p_dst.delta)}
    found = dst._root_lookup.find(imgs)
    perm = tuple(pos.get(int(j), -1) for j in found)
    if -1 in perm:
        raise RootDatumError("map does not carry simple roots to a base")
    return perm


def canonical_representative(p_src: PinnedRootDatum, p_dst: PinnedRootDatum, F) -> np.ndarray:
    """The element ``w F`` (``w`` in ``W(p_dst)``) sending the simple roots of
    ``p_src`` onto those of ``p_dst``."""
    F = np.asarray(F, dtype=np.int64)
    x = _dual_map(F) @ _dominant_cocharacter(p_src)
    for i in _fold_word(p_dst, x):
        F = reflection_matrix(p_dst.base, p_dst.delta[i]) @ F
    return F


def in_weyl_group(p: PinnedRootDatum, a) -> bool:
    """Membership of an automorphism in ``W`` (its diagram factor is trivial)."""
    _, e, _ = factor_weyl_diagram(p, a)
    return bool(np.array_equal(e, np.eye(p.base.rank, dtype=np.int64)))


def _derived_basis(psi: RootDatum, op: str) -> IntMatrix:
    if op in ("ad", "ss"):
        if not psi.n_roots:
            return IntMatrix.zeros(0, psi.rank)
        gens = Sublattice.span(psi.rank, psi.roots)
        return (gens.basis() if op == "ad" else saturate(gens)).generators
    if op == "corad":
        if not psi.n_roots:
            return IntMatrix.identity(psi.rank)
        return kernel_basis(IntMatrix.from_rows(psi.coroots, psi.rank)).generators
    raise RootDatumError(f"no sublattice for {op!r}")


def transport_isomorphism(src: RootDatum, dst: RootDatum, F, op: str) -> np.ndarray:
    """Matrix of the isomorphism ``derive(src, op) -> derive(dst, op)`` induced by ``F``."""
    F = np.asarray(F, dtype=np.int64)
    if op == "dual":
        return _dual_map(F)
    if op in ("ad", "ss", "corad"):
        Bs, Bd = _derived_basis(src, op), _derived_basis(dst, op)
        if Bs.rows == 0:
            return np.zeros((0, 0), dtype=np.int64)
        image = IntMatrix.from_rows((np.asarray(F, dtype=object) @ np.array(Bs.T.tolist(), dtype=object)).tolist(), Bs.rows)
        sol = solve_integer(Bd.T, image)
        if sol is None:
            raise RootDatumError("map does not carry the derived sublattices onto each other")
        return np.array(sol.tolist(), dtype=np.int64).reshape(Bd.rows, Bs.rows)
    dual_of = {"sc": "ad", "der": "ss", "rad": "corad"}
    if op in dual_of:
        inner = transport_isomorphism(src.dual(), dst.dual(), _dual_map(F), dual_of[op])
        return _dual_map(inner)
    raise RootDatumError(f"unknown operation {op!r}; expected one of {DERIVE_OPS}")


@dataclass
class AutGroup:
    """``Aut(psi) = W x| E_delta`` with every element factored.

    ``elements[k] == weyl.elements[w] @ e_delta[e]`` for
    ``(w, e) = factorization[k]``; ``e_perms[e]`` is the node permutation
    of ``e_delta[e]``.
    """

    pinned: PinnedRootDatum
    weyl: WeylGroup
    e_delta: list[np.ndarray]
    e_perms: list[tuple[int, ...]]
    elements: np.ndarray
    factorization: np.ndarray

    @property
    def order(self) -> int:
        return len(self.elements)


def _weyl_root_perms(psi: RootDatum, W: WeylGroup) -> np.ndarray:
    ims = np.einsum("nr,ksr->kns", psi.R, W.elements)
    return psi._root_lookup.find(ims.reshape(-1, psi.rank)).reshape(W.order, psi.n_roots)


def aut_group(psi: RootDatum, delta: PinnedRootDatum | Sequence[int] | None = None) -> AutGroup:
    """Enumerate ``Aut(psi)`` and factor each element as ``w e``.

    Elements are found independently of ``W`` by sending the simple
    system to every Cartan-compatible tuple of roots. Each is then split
    as ``w e`` by chamber folding on root permutations, and the pieces are
    looked up in the enumerated Weyl group.
    """
    _require_semisimple(psi)
    if isinstance(delta, PinnedRootDatum):
        p = delta
    elif delta is None:
        p = simple_system(psi)
    else:
        p = PinnedRootDatum(psi, tuple(delta))
    W = weyl_group(psi)
    if psi.n_roots == 0:
        ident = np.eye(psi.rank, dtype=np.int64)
        return AutGroup(p, W, [ident], [()], ident[None], np.zeros((1, 2), dtype=np.int64))
    maps, perms = _pinned_maps(p, psi)
    w_perm, e_perm = _fold_permutations(p, perms)
    w_lookup = {row.tobytes(): k for k, row in enumerate(np.ascontiguousarray(_weyl_root_perms(psi, W)))}
    delta_arr = np.array(p.delta)
    node_of = np.full(psi.n_roots, -1, dtype=np.int64)
    node_of[delta_arr] = np.arange(len(delta_arr))
    e_keys: dict[bytes, int] = {}
    e_list, e_perms = [], []
    fact = np.zeros((len(maps), 2), dtype=np.int64)
    for k in range(len(maps)):
        wk = w_lookup.get(np.ascontiguousarray(w_perm[k]).tobytes())
        if wk is None:
            raise RootDatumError("Weyl factor is not in the enumerated Weyl group")
        key = np.ascontiguousarray(e_perm[k]).tobytes()
        if key not in e_keys:
            node_perm = tuple(int(x) for x in node_of[e_perm[k][delta_arr]])
            if -1 in node_perm:
                raise RootDatumError("diagram factor does not preserve the simple system")
            e_keys[key] = len(e_list)
            # e = w^{-1} a as a matrix
            w_mat = W.elements[wk]
            e_list.append(_dual_map(w_mat).T @ maps[k])
            e_perms.append(node_perm)
        fact[k] = (wk, e_keys[key])
    order = sorted(range(len(e_list)), key=lambda i: (e_perms[i] != tuple(range(len(p.delta))), e_perms[i]))
    remap = np.empty(len(order), dtype=np.int64)
    remap[order] = np.arange(len(order))
    e_list = [e_list[i] for i in order]
    e_perms = [e_perms[i] for i in order]
    fact[:, 1] = remap[fact[:, 1]]
    return AutGroup(p, W, e_list, e_perms, maps, fact)


def coxeter_element(p: PinnedRootDatum) -> np.ndarray:
    """Product of the simple reflections in the order of ``p.delta``."""
    c = np.eye(p.base.rank, dtype=np.int64)
    for i in p.delta:
        c = c @ reflection_matrix(p.base, i)
    return c


# ---------------------------------------------------------------------------
# Constructors


def direct_sum(*data: RootDatum, name: str = "") -> RootDatum:
    """Orthogonal direct sum of root data."""
    rank = sum(d.rank for d in data)
    roots, coroots = [], []
    off = 0
    for d in data:
        for r, c in zip(d.roots, d.coroots):
            roots.append((0,) * off + r + (0,) * (rank - off - d.rank))
            coroots.append((0,) * off + c + (0,) * (rank - off - d.rank))
        off += d.rank
    return RootDatum(rank, roots, coroots, name or "x".join(d.name or "?" for d in data))


def gl_datum(n: int) -> RootDatum:
    """Root datum of ``GL_n``: roots and coroots ``e_i - e_j``."""
    vecs = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = [0] * n
                v[i], v[j] = 1, -1
                vecs.append(tuple(v))
    return RootDatum(n, vecs, vecs, f"GL{n}")

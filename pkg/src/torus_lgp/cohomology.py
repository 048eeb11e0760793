"""Cohomology of finite groups with coefficients in lattices and finite modules.

Cochains are normalised inhomogeneous (bar) cochains. A cocycle is
stored through its values on the group generators only: ``f(s)`` in
degree one and ``f(s, k)`` in degree two. The values everywhere else are
forced by the cocycle identity along the breadth-first tree of the group
enumeration,

    f(s h)    = f(s) + s f(h)
    f(s h, k) = s f(h, k) + f(s, h k) - f(s, h),

and the parameters that are consistent on the remaining edges of the
Cayley graph are exactly the cocycles. This shrinks the linear systems
from ``|Gamma|^(i+1)`` to ``|generators| |Gamma|^i`` blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact_lattice import AbelianInvariants, IntMatrix, Subquotient, kernel_basis
from .galois import FiniteGroup, GammaLattice

__all__ = [
    "DEFAULT_COST_CAP",
    "CohomologyCostError",
    "CohomologyGroup",
    "CohomologyClass",
    "PlaceModel",
    "CHEBOTAREV",
    "h",
    "restriction",
    "sha",
    "sha_cyclic",
    "tate_cyclic_oracle",
    "preimage",
]

DEFAULT_COST_CAP = 4_000_000
_OVERFLOW_BOUND = 2 ** 40


class CohomologyCostError(RuntimeError):
    """Raised when a computation would exceed the configured cost cap."""


@dataclass(frozen=True)
class PlaceModel:
    """A place, modelled by its decomposition subgroup."""

    label: str
    decomposition: FiniteGroup


class _Chebotarev:
    """Sentinel place list: one place per conjugacy class of cyclic subgroups."""

    def __repr__(self) -> str:
        return "CHEBOTAREV"


CHEBOTAREV = _Chebotarev()


def _arr(rows, ncols: int) -> np.ndarray:
    return np.array(rows, dtype=np.int64).reshape(len(rows), ncols)


def _rows(A: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in row] for row in A]


def _compact_rows(A: np.ndarray) -> np.ndarray:
    """Drop zero and repeated rows (the row space is unchanged)."""
    if A.size == 0:
        return A
    A = A[np.any(A != 0, axis=1)]
    if len(A) == 0:
        return A
    return np.unique(A, axis=0)


def preimage(A: np.ndarray, relations: np.ndarray, ncols: int) -> np.ndarray:
    """Rows spanning ``{x in ZZ^ncols : A x in span(relations)}``.

    ``relations`` rows live in the target of ``A``.
    """
    A = np.asarray(A, dtype=np.int64)
    A = A.reshape(A.size // ncols if ncols else len(A), ncols)
    if len(relations):
        rel = np.asarray(relations, dtype=np.int64).reshape(-1, A.shape[0])
        big = np.concatenate([A, rel.T], axis=1)
    else:
        big = _compact_rows(A)
    if len(big) == 0:
        return np.eye(ncols, dtype=np.int64)
    K = kernel_basis(_rows(big), big.shape[1])
    vecs = _arr(K.generators.entries, big.shape[1])[:, :ncols]
    return vecs


def _block_relations(relations: np.ndarray, blocks: int) -> np.ndarray:
    """Relation rows repeated in each of ``blocks`` consecutive ``rank``-blocks."""
    ell, r = relations.shape
    out = np.zeros((blocks * ell, blocks * r), dtype=np.int64)
    for b in range(blocks):
        out[b * ell:(b + 1) * ell, b * r:(b + 1) * r] = relations
    return out


class _Cochains:
    """Cocycle parametrisation, coboundaries and the quotient for one degree."""

    def __init__(self, degree: int, group: FiniteGroup, M: GammaLattice, cost_cap: int):
        if M.group is not group and M.group.elements != group.elements:
            raise ValueError("module is defined over a different group")
        self.degree = degree
        self.group = group
        self.M = M
        n, r = group.order, M.rank
        g = len(group.generators)
        rel = M.relations
        if degree == 0:
            self.P = r
            self.expand = np.eye(r, dtype=np.int64)
            num = preimage(np.concatenate([m - np.eye(r, dtype=np.int64) for m in M.generator_matrices]) if g else np.zeros((0, r)), _block_relations(rel, g) if len(rel) else rel, r)
            den = rel
        elif degree == 1:
            self.P = g * r
            self._check_cost(g * n * r * self.P, cost_cap)
            self.expand = self._expand1()
            num, den = self._cocycles1(), self._coboundaries1()
        elif degree == 2:
            self.P = g * (n - 1) * r
            self._check_cost(g * n * n * r * self.P, cost_cap)
            self.expand = self._expand2()
            num, den = self._cocycles2(), self._coboundaries2()
        else:
            raise ValueError("degree must be 0, 1 or 2")
        if degree > 0 and len(rel):
            den = np.concatenate([den, _block_relations(rel, self.P // r)])
        self.numerator = num
        self.quotient = Subquotient(
            self.P,
            IntMatrix.from_rows(_rows(num), self.P),
            IntMatrix.from_rows(_rows(_compact_rows(den)), self.P),
        )

    @staticmethod
    def _check_cost(cost: int, cap: int):
        if cost > cap:
            raise CohomologyCostError(f"cochain system of size {cost} exceeds the cost cap {cap}")

    # degree one ---------------------------------------------------------
    def _expand1(self) -> np.ndarray:
        G, A = self.group, self.M.action
        n, r, P = G.order, self.M.rank, self.P
        E = np.zeros((n, r, P), dtype=np.int64)
        for k in range(1, n):
            s, hh = G.parent[k]
            E[k] = A[G.generator_indices[s]] @ E[hh]
            E[k][:, s * r:(s + 1) * r] += np.eye(r, dtype=np.int64)
            if E[k].size and np.abs(E[k]).max() > _OVERFLOW_BOUND:
                raise CohomologyCostError("cochain coefficients overflow")
        return E

    def _cocycles1(self) -> np.ndarray:
        G, A, E = self.group, self.M.action, self.expand
        r = self.M.rank
        lt = G.left_gen_table
        blocks = []
        for s in range(len(G.generators)):
            pred = np.einsum("ij,hjp->hip", A[G.generator_indices[s]], E)
            pred[:, :, s * r:(s + 1) * r] += np.eye(r, dtype=np.int64)
            blocks.append((E[lt[s]] - pred).reshape(G.order * r, self.P))
        C = np.concatenate(blocks) if blocks else np.zeros((0, self.P), dtype=np.int64)
        return self._solve(C)

    def _coboundaries1(self) -> np.ndarray:
        G, A = self.group, self.M.action
        r = self.M.rank
        cols = [A[i] - np.eye(r, dtype=np.int64) for i in G.generator_indices]
        if not cols:
            return np.zeros((0, self.P), dtype=np.int64)
        # row j: parameters of d(e_j)
        return np.concatenate(cols, axis=0).T.copy()

    # degree two ---------------------------------------------------------
    def _selector(self) -> np.ndarray:
        G = self.group
        n, r, P = G.order, self.M.rank, self.P
        SEL = np.zeros((len(G.generators), n, r, P), dtype=np.int64)
        for s in range(len(G.generators)):
            for k in range(1, n):
                c = (s * (n - 1) + k - 1) * r
                SEL[s, k, :, c:c + r] = np.eye(r, dtype=np.int64)
        return SEL

    def _expand2(self) -> np.ndarray:
        G, A = self.group, self.M.action
        n, r, P = G.order, self.M.rank, self.P
        T = G.table
        self._SEL = SEL = self._selector()
        E = np.zeros((n, n, r, P), dtype=np.int64)
        for x in range(1, n):
            s, hh = G.parent[x]
            E[x] = np.einsum("ij,kjp->kip", A[G.generator_indices[s]], E[hh]) + SEL[s][T[hh]] - SEL[s][hh][None]
            if E[x].size and np.abs(E[x]).max() > _OVERFLOW_BOUND:
                raise CohomologyCostError("cochain coefficients overflow")
        return E

    def _cocycles2(self) -> np.ndarray:
        G, A, E, SEL = self.group, self.M.action, self.expand, self._SEL
        n = G.order
        T = G.table
        lt = G.left_gen_table
        blocks = []
        for s in range(len(G.generators)):
            As = A[G.generator_indices[s]]
            for hh in range(n):
                x = lt[s, hh]
                if G.parent[x] == (s, hh):
                    continue  # tree edge: holds by construction
                pred = np.einsum("ij,kjp->kip", As, E[hh]) + SEL[s][T[hh]] - SEL[s][hh][None]
                blocks.append((E[x] - pred).reshape(n * self.M.rank, self.P))
        C = np.concatenate(blocks) if blocks else np.zeros((0, self.P), dtype=np.int64)
        return self._solve(C)

    def _coboundaries2(self) -> np.ndarray:
        G, A = self.group, self.M.action
        n, r = G.order, self.M.rank
        lt = G.left_gen_table
        rows = []
        # d c (s, k) = s c(k) - c(s k) + c(s), for c supported on one element x != e
        for x in range(1, n):
            for j in range(r):
                row = np.zeros(self.P, dtype=np.int64)
                for s, gi in enumerate(G.generator_indices):
                    base = s * (n - 1)
                    # term s c(k): k = x
                    c = (base + x - 1) * r
                    row[c:c + r] += A[gi][:, j]
                    # term -c(s k): s k = x
                    k = int(np.nonzero(lt[s] == x)[0][0])
                    if k:
                        c = (base + k - 1) * r
                        row[c + j] -= 1
                    # term c(s): for every k != e when s = x
                    if gi == x:
                        for k in range(1, n):
                            c = (base + k - 1) * r
                            row[c + j] += 1
                rows.append(row)
        return _arr(rows, self.P)

    # shared -------------------------------------------------------------
    def _solve(self, C: np.ndarray) -> np.ndarray:
        """Parameters whose constraint rows vanish in the module."""
        r = self.M.rank
        rel = self.M.relations
        if not len(rel):
            C = _compact_rows(C)
            if len(C) == 0:
                return np.eye(self.P, dtype=np.int64)
            K = kernel_basis(_rows(C), self.P)
            return _arr(K.generators.entries, self.P)
        blocks = C.shape[0] // r
        return preimage(C, _block_relations(rel, blocks), self.P)

    def params(self, values: np.ndarray) -> np.ndarray:
        """Generator parameters of a cocycle given by its full value table."""
        G = self.group
        if self.degree == 0:
            return np.asarray(values, dtype=np.int64).reshape(-1)
        if self.degree == 1:
            return np.concatenate([values[i] for i in G.generator_indices]) if G.generators else np.zeros(0, dtype=np.int64)
        return np.concatenate([values[i][1:].reshape(-1) for i in G.generator_indices]) if G.generators else np.zeros(0, dtype=np.int64)

    def values(self, p: Sequence[int]) -> np.ndarray:
        p = np.asarray(p, dtype=np.int64)
        if self.degree == 0:
            return p.copy()
        return np.einsum("...p,p->...", self.expand, p)


@dataclass(frozen=True)
class CohomologyGroup:
    """``H^degree(group, module)`` or a subgroup of it.

    Parameters
    ----------
    degree : int
        0, 1 or 2.
    group : FiniteGroup
        The acting group.
    module : GammaLattice
        Coefficients.
    invariants : AbelianInvariants
        Abstract structure.
    cocycle_basis : tuple of arrays
        One representative cocycle per cyclic factor, as a value table:
        shape ``(rank,)`` in degree 0, ``(n, rank)`` in degree 1 and
        ``(n, n, rank)`` in degree 2 (indexed by group element indices).
    """

    degree: int
    group: FiniteGroup
    module: GammaLattice
    invariants: AbelianInvariants
    cocycle_basis: tuple
    _cochains: _Cochains = field(repr=False, compare=False)
    _gen_coords: tuple = field(default=(), repr=False, compare=False)
    ambient: "CohomologyGroup | None" = field(default=None, repr=False, compare=False)

    @property
    def orders(self) -> tuple[int, ...]:
        if self.ambient is None:
            return self._cochains.quotient.orders
        return tuple(list(self.invariants.torsion) + [0] * self.invariants.free_rank)

    @property
    def is_trivial(self) -> bool:
        return self.invariants.is_trivial

    @property
    def order(self) -> int | None:
        return self.invariants.order

    def class_of(self, values) -> "CohomologyClass":
        """Class of a cocycle given as a full value table (ambient group only)."""
        self._require_ambient()
        p = self._cochains.params(np.asarray(values, dtype=np.int64))
        return CohomologyClass(self, self._cochains.quotient.coordinates(_rows(p[None])[0]))

    def element(self, coords: Sequence[int]) -> "CohomologyClass":
        coords = tuple(int(c) % o if o else int(c) for c, o in zip(coords, self.orders))
        return CohomologyClass(self, coords)

    def zero(self) -> "CohomologyClass":
        return self.element([0] * len(self.orders))

    def generators(self) -> list["CohomologyClass"]:
        return [self.element([int(i == j) for j in range(len(self.orders))]) for i in range(len(self.orders))]

    def elements(self) -> list["CohomologyClass"]:
        """All classes of a finite group, in lexicographic coordinate order."""
        if any(o == 0 for o in self.orders):
            raise ValueError("group is infinite")
        out = [()]
        for o in self.orders:
            out = [c + (x,) for c in out for x in range(o)]
        return [self.element(c) for c in out]

    def representative(self, coords: Sequence[int]) -> np.ndarray:
        """A cocycle value table in the class with these coordinates."""
        total = np.zeros(self.cocycle_basis[0].shape if self.cocycle_basis else self._zero_shape(), dtype=np.int64)
        for c, z in zip(coords, self.cocycle_basis):
            total = total + int(c) * z
        return total

    def ambient_coordinates(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Coordinates in the full cohomology group of a class of this subgroup."""
        if self.ambient is None:
            return tuple(coords)
        total = [0] * len(self.ambient.orders)
        for c, g in zip(coords, self._gen_coords):
            total = [t + int(c) * x for t, x in zip(total, g)]
        return self.ambient.element(total).coords

    def _zero_shape(self):
        n, r = self.group.order, self.module.rank
        return {0: (r,), 1: (n, r), 2: (n, n, r)}[self.degree]

    def _require_ambient(self):
        if self.ambient is not None:
            raise ValueError("operation only available on a full cohomology group")

    def __str__(self) -> str:
        return f"H^{self.degree} = {self.invariants}"


@dataclass(frozen=True)
class CohomologyClass:
    """Element of a :class:`CohomologyGroup`, by coordinates on its generators."""

    parent: CohomologyGroup
    coords: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        return self.parent.element([a + b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "CohomologyClass":
        return self.parent.element([-a for a in self.coords])

    def __mul__(self, k: int) -> "CohomologyClass":
        return self.parent.element([k * a for a in self.coords])

    __rmul__ = __mul__

    def representative(self) -> np.ndarray:
        return self.parent.representative(self.coords)


def h(i: int, group: FiniteGroup, M: GammaLattice, cost_cap: int = DEFAULT_COST_CAP) -> CohomologyGroup:
    """``H^i(group, M)`` for ``i`` in ``{0, 1, 2}``."""
    cc = _Cochains(i, group, M, cost_cap)
    reps = tuple(cc.values(g) for g in cc.quotient.generators)
    return CohomologyGroup(i, group, M, cc.quotient.invariants, reps, cc)


def _restricted_values(H: CohomologyGroup, values: np.ndarray, D: FiniteGroup) -> np.ndarray:
    emb = H.group.embedding(D)
    if H.degree == 0:
        return values
    if H.degree == 1:
        return values[emb]
    return values[np.ix_(emb, emb)]


def restriction(c: CohomologyClass, D: FiniteGroup, target: CohomologyGroup | None = None) -> CohomologyClass:
    """Restriction of a class to the subgroup ``D``.

    ``target`` may pass a precomputed ``h(i, D, M|D)``.
    """
    H = c.parent
    if H.ambient is not None:
        H = H.ambient
        c = H.element(c.parent.ambient_coordinates(c.coords))
    if target is None:
        target = h(H.degree, D, H.module.restrict(D))
    vals = _restricted_values(H, c.representative(), D)
    return target.class_of(vals)


def _kernel_subgroup(H: CohomologyGroup, images: list[tuple[tuple[int, ...], tuple[int, ...]]]) -> CohomologyGroup:
    """Kernel of ``H -> prod_v H_v`` given generator images and target orders.

    ``images[v] = (orders_v, matrix)`` where ``matrix[j]`` is the image of
    generator ``j`` of ``H`` in ``H_v``.
    """
    orders = H.orders
    J = len(orders)
    if any(o == 0 for o in orders):
        raise ValueError("sha is only defined for torsion cohomology")
    cols = []
    mods = []
    for target_orders, mat in images:
        for k, o in enumerate(target_orders):
            cols.append([row[k] for row in mat])
            mods.append(o)
    # x in ZZ^J with sum_j x_j image_j = 0 in every target factor
    if cols:
        A = np.array(cols, dtype=np.int64).reshape(len(cols), J)
        rel = np.diag([m for m in mods]).astype(np.int64)
        keep = [i for i, m in enumerate(mods) if m != 1]
        A = A[keep]
        rel = rel[np.ix_(keep, keep)]
        num = preimage(A, rel[np.any(rel != 0, axis=1)] if len(rel) else rel, J) if len(A) else np.eye(J, dtype=np.int64)
    else:
        num = np.eye(J, dtype=np.int64)
    den = np.diag(orders).astype(np.int64) if J else np.zeros((0, 0), dtype=np.int64)
    Q = Subquotient(J, IntMatrix.from_rows(_rows(num), J), IntMatrix.from_rows(_rows(den), J))
    gen_coords = tuple(H.element(g).coords for g in Q.generators)
    reps = tuple(H.representative(g) for g in gen_coords)
    return CohomologyGroup(H.degree, H.group, H.module, Q.invariants, reps, H._cochains, gen_coords, H)


def sha(i: int, group: FiniteGroup, M: GammaLattice, places, cost_cap: int = DEFAULT_COST_CAP) -> CohomologyGroup:
    """Kernel of the joint restriction of ``H^i`` to the decomposition groups of ``places``.

    ``places`` is a list of :class:`PlaceModel` (or bare subgroups), or
    :data:`CHEBOTAREV` for one place per cyclic subgroup class.
    """
    if i not in (1, 2):
        raise ValueError("sha is defined in degrees 1 and 2")
    if places is CHEBOTAREV:
        subgroups = group.cyclic_subgroup_classes()
    else:
        subgroups = [p.decomposition if isinstance(p, PlaceModel) else p for p in places]
    H = h(i, group, M, cost_cap)
    images = []
    if not H.is_trivial:
        for D in subgroups:
            if not group.contains_group(D):
                raise ValueError(f"{D!r} is not a subgroup of {group!r}")
            HD = h(i, D, M.restrict(D), cost_cap)
            if HD.is_trivial:
                continue
            mat = [restriction(g, D, HD).coords for g in H.generators()]
            images.append((HD.orders, mat))
    return _kernel_subgroup(H, images)


def sha_cyclic(i: int, group: FiniteGroup, M: GammaLattice, cost_cap: int = DEFAULT_COST_CAP) -> CohomologyGroup:
    """:func:`sha` over one representative of each conjugacy class of cyclic subgroups."""
    return sha(i, group, M, CHEBOTAREV, cost_cap)


def tate_cyclic_oracle(group: FiniteGroup, M: GammaLattice, i: int) -> AbelianInvariants:
    """``H^i`` of a cyclic group from the two-periodic norm complex.

    ``H^1 = ker N / im(g - 1)`` and ``H^2 = ker(g - 1) / im N`` where ``g``
    generates ``group`` and ``N`` is the sum of its powers. Independent of
    the bar-resolution code above.
    """
    k = group.cyclic_generator()
    if k is None:
        raise ValueError("tate_cyclic_oracle needs a cyclic group")
    r = M.rank
    n = group.order
    g = M.action[k]
    I = np.eye(r, dtype=np.int64)
    N = np.zeros((r, r), dtype=np.int64)
    power = I.copy()
    for _ in range(n):
        N += power
        power = g @ power
    rel = M.relations
    if i == 1:
        kernel_map, image_map = N, g - I
    elif i == 2:
        kernel_map, image_map = g - I, N
    else:
        raise ValueError("oracle covers degrees 1 and 2")
    num = preimage(kernel_map, rel, r) if r else np.zeros((0, 0), dtype=np.int64)
    den = np.concatenate([image_map.T, rel]) if len(rel) else image_map.T
    den = _compact_rows(den)
    Q = Subquotient(r, IntMatrix.from_rows(_rows(num), r), IntMatrix.from_rows(_rows(den), r))
    return Q.invariants

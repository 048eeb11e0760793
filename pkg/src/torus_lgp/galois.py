"""Finite groups acting on lattices, on root data and on finite sets.

A Galois action is modelled through a finite quotient ``Gamma`` of the
absolute Galois group, namely the image acting on a chosen splitting
field. Groups are permutation groups; lattices are ``ZZ^rank`` with one
unimodular matrix per group element, optionally modulo a stable
sublattice to describe finite modules such as ``ZZ/3``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import Callable, Hashable, Sequence

import numpy as np

from .exact_lattice import (
    IntMatrix,
    Sublattice,
    hermite_normal_form,
    kernel_basis,
    smith_normal_form,
)
from .root_datum import (
    PinnedRootDatum,
    RootDatum,
    RootDatumError,
    _closure,
    derive_with_transport,
    factor_weyl_diagram,
    is_automorphism,
    predicates,
    reflection_matrix,
    simple_system,
    _dual_map,
)

__all__ = [
    "DEFAULT_GROUP_CAP",
    "GroupCapError",
    "FiniteGroup",
    "GammaLattice",
    "TwistedRootDatum",
    "GammaSet",
    "cyclic_group",
    "dihedral_group",
    "symmetric_group",
    "alternating_group",
    "direct_product",
    "metacyclic_group",
    "matrix_group_mod",
    "regular_group",
    "small_group_catalog",
    "fixed_sublattice",
    "is_anisotropic",
    "is_generic",
    "star_action",
    "induced_lattice",
    "augmentation_sub",
    "norm_one_quotient",
    "sublattice_module",
    "quotient_module",
]

DEFAULT_GROUP_CAP = 10_000

Perm = tuple[int, ...]


class GroupCapError(RuntimeError):
    """Raised when an enumeration would exceed the configured group order cap."""


def _compose(p: Perm, q: Perm) -> Perm:
    """``(p q)(x) = p(q(x))``."""
    return tuple(p[i] for i in q)


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


class FiniteGroup:
    """Finite permutation group given by generators.

    Parameters
    ----------
    degree : int
        Size of the permuted set ``{0, ..., degree - 1}``.
    generators : sequence of permutations
        Each a sequence of images; ``(p q)(x) = p(q(x))``.
    cap : int, optional
        Enumeration stops with :class:`GroupCapError` past this order.
    name : str, optional
        Display label.

    Notes
    -----
    Elements are enumerated breadth first; ``elements[0]`` is the identity
    and every other element is ``generators[s] * elements[h]`` for the
    recorded ``parent[k] = (s, h)`` with ``h < k``.
    """

    def __init__(self, degree: int, generators: Sequence[Sequence[int]], cap: int = DEFAULT_GROUP_CAP, name: str = ""):
        self.degree = int(degree)
        gens = []
        for g in generators:
            p = tuple(int(x) for x in g)
            if sorted(p) != list(range(self.degree)):
                raise ValueError(f"{p} is not a permutation of {self.degree} points")
            gens.append(p)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self.cap = cap
        self.name = name
        ident = tuple(range(self.degree))
        elements = [ident]
        index = {ident: 0}
        parent: list[tuple[int, int]] = [(-1, -1)]
        queue = deque([0])
        while queue:
            h = queue.popleft()
            for s, g in enumerate(self.generators):
                x = _compose(g, elements[h])
                if x not in index:
                    if len(elements) >= cap:
                        raise GroupCapError(f"group order exceeds the cap of {cap}")
                    index[x] = len(elements)
                    elements.append(x)
                    parent.append((s, h))
                    queue.append(index[x])
        self.elements: tuple[Perm, ...] = tuple(elements)
        self._index = index
        self.parent = tuple(parent)
        if factorial(self.degree) % len(elements):
            raise AssertionError("group order does not divide the factorial of the degree")

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{label} order={self.order} degree={self.degree}>"

    def __len__(self) -> int:
        return self.order

    @property
    def order(self) -> int:
        return len(self.elements)

    def index(self, p: Sequence[int]) -> int:
        return self._index[tuple(int(x) for x in p)]

    def __contains__(self, p) -> bool:
        return tuple(int(x) for x in p) in self._index

    @cached_property
    def generator_indices(self) -> tuple[int, ...]:
        return tuple(self._index[g] for g in self.generators)

    @cached_property
    def _perm_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64).reshape(self.order, self.degree)

    @cached_property
    def _lookup(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self._perm_array)}

    @cached_property
    def left_gen_table(self) -> np.ndarray:
        """``T[s, h]`` is the index of ``generators[s] * elements[h]``."""
        E = self._perm_array
        out = np.empty((len(self.generators), self.order), dtype=np.int64)
        for s, g in enumerate(self.generators):
            prods = np.ascontiguousarray(np.asarray(g, dtype=np.int64)[E])
            out[s] = [self._lookup[row.tobytes()] for row in prods]
        return out

    @cached_property
    def table(self) -> np.ndarray:
        """Multiplication table: ``table[i, j]`` indexes ``elements[i] * elements[j]``."""
        E = self._perm_array
        n = self.order
        out = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            prods = np.ascontiguousarray(E[i][E])
            out[i] = [self._lookup[row.tobytes()] for row in prods]
        return out

    def mul(self, i: int, j: int) -> int:
        return self._index[_compose(self.elements[i], self.elements[j])]

    def inv(self, i: int) -> int:
        return self._index[_inverse(self.elements[i])]

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.array([self.inv(i) for i in range(self.order)], dtype=np.int64)

    def word(self, k: int) -> list[int]:
        """Generator indices ``[s1, s2, ...]`` with ``elements[k] = g_s1 g_s2 ...``."""
        out = []
        while k:
            s, k = self.parent[k]
            out.append(s)
        return out

    def element_order(self, k: int) -> int:
        p = self.elements[k]
        q, n = p, 1
        while q != self.elements[0]:
            q = _compose(p, q)
            n += 1
        return n

    def subgroup(self, generators: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        """Subgroup generated by ``generators`` (permutations in this group)."""
        for g in generators:
            if tuple(int(x) for x in g) not in self._index:
                raise ValueError(f"{tuple(g)} is not an element of {self!r}")
        return FiniteGroup(self.degree, generators, self.cap, name)

    def subgroup_by_indices(self, idx: Sequence[int], name: str = "") -> "FiniteGroup":
        return self.subgroup([self.elements[i] for i in idx], name)

    def trivial_subgroup(self) -> "FiniteGroup":
        return FiniteGroup(self.degree, [], self.cap, "1")

    def contains_group(self, D: "FiniteGroup") -> bool:
        return D.degree == self.degree and all(g in self._index for g in D.generators)

    def embedding(self, D: "FiniteGroup") -> np.ndarray:
        """Indices in this group of the elements of the subgroup ``D``."""
        if not self.contains_group(D):
            raise ValueError(f"{D!r} is not a subgroup of {self!r}")
        return np.array([self._index[p] for p in D.elements], dtype=np.int64)

    def cyclic_generator(self) -> int | None:
        """Index of a generating element if the group is cyclic, else ``None``."""
        n = self.order
        for k in range(n):
            if self.element_order(k) == n:
                return k
        return None

    def is_cyclic(self) -> bool:
        return self.cyclic_generator() is not None

    def cyclic_subgroup(self, k: int) -> "FiniteGroup":
        return self.subgroup([self.elements[k]], name=f"<g{k}>")

    def cyclic_subgroup_classes(self) -> list["FiniteGroup"]:
        """One cyclic subgroup per conjugacy class, ordered by (order, canonical form)."""
        table = self.table
        inv = self.inverses
        seen: dict[tuple[int, ...], int] = {}
        for k in range(self.order):
            members = self._powers(k)
            conj = [tuple(sorted(int(table[table[x, m], inv[x]]) for m in members)) for x in range(self.order)]
            key = min(conj)
            if key not in seen:
                seen[key] = k
        reps = sorted(seen.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return [self.cyclic_subgroup(k) for _, k in reps]

    def _powers(self, k: int) -> list[int]:
        out = [0]
        x = k
        while x != 0:
            out.append(x)
            x = self.mul(k, x)
        return out

    def conjugate_subgroup(self, D: "FiniteGroup", x: int) -> "FiniteGroup":
        """``x D x^-1``."""
        g, gi = self.elements[x], self.elements[self.inv(x)]
        return self.subgroup([_compose(_compose(g, h), gi) for h in D.generators])


# ---------------------------------------------------------------------------
# Group constructors


def cyclic_group(n: int) -> FiniteGroup:
    if n == 1:
        return FiniteGroup(1, [], name="Z1")
    return FiniteGroup(n, [tuple((i + 1) % n for i in range(n))], name=f"Z{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of an ``n``-gon (order ``2n``)."""
    if n < 3:
        if n == 1:
            return cyclic_group(2)
        return direct_product(cyclic_group(2), cyclic_group(2), name="D2")
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return FiniteGroup(n, [rot, ref], name=f"D{n}")


def symmetric_group(n: int) -> FiniteGroup:
    if n <= 1:
        return FiniteGroup(1, [], name="S1")
    gens = [tuple([1, 0] + list(range(2, n)))]
    if n > 2:
        gens.append(tuple((i + 1) % n for i in range(n)))
    return FiniteGroup(n, gens, name=f"S{n}")


def alternating_group(n: int) -> FiniteGroup:
    if n < 3:
        return FiniteGroup(max(n, 1), [], name=f"A{n}")
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = p[1], p[k], p[0]
        gens.append(tuple(p))
    return FiniteGroup(n, gens, name=f"A{n}")


def direct_product(*groups: FiniteGroup, name: str = "") -> FiniteGroup:
    """Product acting on the disjoint union of the permuted sets."""
    degree = sum(G.degree for G in groups)
    gens = []
    offset = 0
    for G in groups:
        for g in G.generators:
            p = list(range(degree))
            for i, j in enumerate(g):
                p[offset + i] = offset + j
            gens.append(tuple(p))
        offset += G.degree
    return FiniteGroup(degree, gens, name=name or "x".join(G.name for G in groups))


def regular_group(elements: Sequence[Hashable], mul: Callable, generators: Sequence[Hashable], name: str = "") -> FiniteGroup:
    """Left regular permutation representation of an abstract finite group."""
    pos = {e: i for i, e in enumerate(elements)}
    gens = [tuple(pos[mul(g, e)] for e in elements) for g in generators]
    return FiniteGroup(len(elements), gens, name=name)


def metacyclic_group(n: int, m: int, r: int, name: str = "") -> FiniteGroup:
    """``ZZ/n  x|  ZZ/m`` with the generator of ``ZZ/m`` acting by ``x -> r x``."""
    if pow(r, m, n) != 1 % n:
        raise ValueError("r^m must be 1 mod n")
    elements = [(a, b) for b in range(m) for a in range(n)]

    def mul(x, y):
        return ((x[0] + pow(r, x[1], n) * y[0]) % n, (x[1] + y[1]) % m)

    return regular_group(elements, mul, [(1 % n, 0), (0, 1 % m)], name or f"Z{n}:Z{m}")


def matrix_group_mod(p: int, generators: Sequence, name: str = "") -> FiniteGroup:
    """Regular representation of the group generated by 2x2-style matrices mod ``p``."""
    gens = [tuple(tuple(int(x) % p for x in row) for row in g) for g in generators]
    d = len(gens[0])

    def mul(a, b):
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(d)) % p for j in range(d)) for i in range(d))

    ident = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    elements = [ident]
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(g, x)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                queue.append(y)
    return regular_group(elements, mul, gens, name)


def small_group_catalog(max_order: int = 24) -> list[FiniteGroup]:
    """A deterministic list of small groups, one instance per listed isomorphism type."""
    out: list[FiniteGroup] = []
    for n in range(1, max_order + 1):
        out.append(cyclic_group(n))
    for n in range(2, max_order // 2 + 1):
        out.append(dihedral_group(n))
    extra = [
        ("S4", lambda: symmetric_group(4)),
        ("A4", lambda: alternating_group(4)),
        ("Q8", lambda: matrix_group_mod(3, [[[0, 2], [1, 0]], [[1, 1], [1, 2]]], "Q8")),
        ("Dic3", lambda: metacyclic_group(3, 4, 2, "Dic3")),
        ("Dic5", lambda: metacyclic_group(5, 4, 4, "Dic5")),
        ("Z5:Z4", lambda: metacyclic_group(5, 4, 2, "F20")),
        ("Z7:Z3", lambda: metacyclic_group(7, 3, 2, "F21")),
        ("Z3:Z8", lambda: metacyclic_group(3, 8, 2, "Z3:Z8")),
        ("Z4:Z4", lambda: metacyclic_group(4, 4, 3, "Z4:Z4")),
        ("M16", lambda: metacyclic_group(8, 2, 5, "M16")),
        ("SD16", lambda: metacyclic_group(8, 2, 3, "SD16")),
        ("SL(2,3)", lambda: matrix_group_mod(3, [[[1, 1], [0, 1]], [[0, 2], [1, 0]]], "SL(2,3)")),
        ("Z2xZ2", lambda: direct_product(cyclic_group(2), cyclic_group(2))),
        ("Z2xZ4", lambda: direct_product(cyclic_group(2), cyclic_group(4))),
        ("Z2^3", lambda: direct_product(cyclic_group(2), cyclic_group(2), cyclic_group(2))),
        ("Z3xZ3", lambda: direct_product(cyclic_group(3), cyclic_group(3))),
        ("Z4xZ4", lambda: direct_product(cyclic_group(4), cyclic_group(4))),
        ("Z2xZ8", lambda: direct_product(cyclic_group(2), cyclic_group(8))),
        ("Z2^2xZ4", lambda: direct_product(cyclic_group(2), cyclic_group(2), cyclic_group(4))),
        ("Z2^4", lambda: direct_product(*[cyclic_group(2)] * 4)),
        ("Z2xZ6", lambda: direct_product(cyclic_group(2), cyclic_group(6))),
        ("Z2xD4", lambda: direct_product(cyclic_group(2), dihedral_group(4))),
        ("Z2xQ8", lambda: direct_product(cyclic_group(2), matrix_group_mod(3, [[[0, 2], [1, 0]], [[1, 1], [1, 2]]], "Q8"))),
        ("Z3xS3", lambda: direct_product(cyclic_group(3), symmetric_group(3))),
        ("Z2xA4", lambda: direct_product(cyclic_group(2), alternating_group(4))),
        ("Z2xZ2xS3", lambda: direct_product(cyclic_group(2), cyclic_group(2), symmetric_group(3))),
        ("Z4xS3", lambda: direct_product(cyclic_group(4), symmetric_group(3))),
        ("Z3xD4", lambda: direct_product(cyclic_group(3), dihedral_group(4))),
        ("Z3xQ8", lambda: direct_product(cyclic_group(3), matrix_group_mod(3, [[[0, 2], [1, 0]], [[1, 1], [1, 2]]], "Q8"))),
        ("Z2xDic3", lambda: direct_product(cyclic_group(2), metacyclic_group(3, 4, 2, "Dic3"))),
        ("Z3xZ6", lambda: direct_product(cyclic_group(3), cyclic_group(6))),
        ("Z2xZ10", lambda: direct_product(cyclic_group(2), cyclic_group(10))),
        ("Z2xZ12", lambda: direct_product(cyclic_group(2), cyclic_group(12))),
        ("Z2^2xZ6", lambda: direct_product(cyclic_group(2), cyclic_group(2), cyclic_group(6))),
        ("Z3:S3", lambda: _generalized_dihedral_z3z3()),
    ]
    for name, build in extra:
        G = build()
        if G.order <= max_order:
            G.name = name
            out.append(G)
    return out


def _generalized_dihedral_z3z3() -> FiniteGroup:
    elements = [(a, b, c) for c in range(2) for a in range(3) for b in range(3)]

    def mul(x, y):
        s = -1 if x[2] else 1
        return ((x[0] + s * y[0]) % 3, (x[1] + s * y[1]) % 3, (x[2] + y[2]) % 2)

    return regular_group(elements, mul, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], "Z3:S3")


# ---------------------------------------------------------------------------
# Gamma-lattices and finite modules


def _as_matrix(m, rank: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64).reshape(rank, rank)
    return a


def _propagate(group: FiniteGroup, gen_mats: np.ndarray, rank: int) -> np.ndarray:
    """Matrices of every element from generator matrices along the BFS tree."""
    out = np.empty((group.order, rank, rank), dtype=np.int64)
    out[0] = np.eye(rank, dtype=np.int64)
    for k in range(1, group.order):
        s, h = group.parent[k]
        out[k] = gen_mats[s] @ out[h]
    return out


def _check_homomorphism(group: FiniteGroup, gen_mats: np.ndarray, action: np.ndarray) -> bool:
    lt = group.left_gen_table
    for s in range(len(group.generators)):
        if not np.array_equal(np.einsum("ij,hjk->hik", gen_mats[s], action), action[lt[s]]):
            return False
    return True


class GammaLattice:
    """``ZZ^rank`` (optionally modulo a stable sublattice) with a ``Gamma``-action.

    Parameters
    ----------
    group : FiniteGroup
        The acting group.
    rank : int
        Rank of the underlying free module.
    generator_matrices : sequence of arrays
        One unimodular ``rank x rank`` matrix per group generator.
    relations : array, optional
        Rows spanning a ``Gamma``-stable sublattice ``L``; the module is then
        ``ZZ^rank / L``.
    name : str, optional
        Display label.
    """

    def __init__(self, group: FiniteGroup, rank: int, generator_matrices, relations=None, name: str = ""):
        self.group = group
        self.rank = int(rank)
        self.name = name
        mats = np.array([_as_matrix(m, self.rank) for m in generator_matrices], dtype=np.int64)
        mats = mats.reshape(len(group.generators), self.rank, self.rank)
        if len(mats) != len(group.generators):
            raise ValueError("need one matrix per group generator")
        for m in mats:
            if round(abs(np.linalg.det(m))) != 1 and self.rank:
                raise ValueError("generator matrices must be unimodular")
        self.generator_matrices = mats
        self.action = _propagate(group, mats, self.rank)
        if not _check_homomorphism(group, mats, self.action):
            raise ValueError("generator matrices do not define a group action")
        if relations is not None and len(relations):
            rel = hermite_normal_form(IntMatrix.from_rows(np.asarray(relations).tolist(), self.rank), self.rank)
            L = Sublattice(self.rank, rel)
            for m in mats:
                for row in rel.entries:
                    if not L.contains(tuple(int(x) for x in m @ np.array(row, dtype=np.int64))):
                        raise ValueError("relation sublattice is not stable under the action")
            self.relations = np.array(rel.entries, dtype=np.int64).reshape(rel.rows, self.rank)
        else:
            self.relations = np.zeros((0, self.rank), dtype=np.int64)

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        tors = f" / {len(self.relations)} relations" if self.has_torsion else ""
        return f"<GammaLattice{label} rank={self.rank}{tors} over {self.group!r}>"

    @property
    def has_torsion(self) -> bool:
        return len(self.relations) > 0

    def matrix(self, k: int) -> np.ndarray:
        return self.action[k]

    def restrict(self, D: FiniteGroup) -> "GammaLattice":
        """The same module viewed as a ``D``-module for a subgroup ``D``."""
        idx = [self.group.index(g) for g in D.generators]
        return GammaLattice(D, self.rank, [self.action[i] for i in idx], self.relations, self.name)

    @classmethod
    def trivial(cls, group: FiniteGroup, rank: int = 1, modulus: int | None = None) -> "GammaLattice":
        mats = [np.eye(rank, dtype=np.int64)] * len(group.generators)
        rel = None if modulus is None else modulus * np.eye(rank, dtype=np.int64)
        name = "Z" if modulus is None else f"Z/{modulus}"
        return cls(group, rank, mats, rel, name)

    @classmethod
    def from_character(cls, group: FiniteGroup, signs: Sequence[int], modulus: int | None = None) -> "GammaLattice":
        """Rank-one module where generator ``s`` acts by ``signs[s]`` (``+-1``)."""
        mats = [np.array([[int(x)]]) for x in signs]
        rel = None if modulus is None else [[modulus]]
        return cls(group, 1, mats, rel, "Z(chi)")


@dataclass(frozen=True)
class GammaSet:
    """Finite ``Gamma``-set ``{0, ..., size - 1}``.

    ``generator_perms[s]`` is the permutation by which generator ``s`` acts.
    """

    group: FiniteGroup
    size: int
    generator_perms: tuple[Perm, ...]

    def __post_init__(self):
        perms = tuple(tuple(int(x) for x in p) for p in self.generator_perms)
        if len(perms) != len(self.group.generators):
            raise ValueError("need one permutation per group generator")
        for p in perms:
            if sorted(p) != list(range(self.size)):
                raise ValueError(f"{p} is not a permutation of {self.size} points")
        object.__setattr__(self, "generator_perms", perms)
        action = [tuple(range(self.size))]
        for k in range(1, self.group.order):
            s, h = self.group.parent[k]
            action.append(_compose(perms[s], action[h]))
        lt = self.group.left_gen_table
        for s, p in enumerate(perms):
            for h in range(self.group.order):
                if _compose(p, action[h]) != action[lt[s, h]]:
                    raise ValueError("permutations do not define a group action")
        object.__setattr__(self, "_action", tuple(action))

    @property
    def action(self) -> tuple[Perm, ...]:
        return self._action

    def orbits(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for y in range(self.size):
            if y in seen:
                continue
            orb = sorted({p[y] for p in self._action})
            seen.update(orb)
            out.append(tuple(orb))
        return out

    def restrict(self, D: FiniteGroup) -> "GammaSet":
        return GammaSet(D, self.size, tuple(self._action[self.group.index(g)] for g in D.generators))

    @classmethod
    def regular(cls, group: FiniteGroup) -> "GammaSet":
        lt = group.left_gen_table
        return cls(group, group.order, tuple(tuple(int(x) for x in lt[s]) for s in range(len(group.generators))))


class TwistedRootDatum:
    """Root datum with ``Gamma`` acting through automorphisms.

    Parameters
    ----------
    base : RootDatum
        The underlying (split) root datum.
    group : FiniteGroup
        The acting group.
    generator_matrices : sequence of arrays
        Action of each generator on the character lattice ``M``; each must
        lie in ``Aut(base)``.
    name : str, optional
        Display label.
    delta : sequence of int, optional
        Root indices of the simple system used to number diagram nodes;
        defaults to :func:`simple_system` of the base.
    """

    def __init__(self, base: RootDatum, group: FiniteGroup, generator_matrices, name: str = "", delta=None):
        self.base = base
        self.group = group
        self.name = name
        self.lattice = GammaLattice(group, base.rank, generator_matrices, name=name or base.name)
        for m in self.lattice.generator_matrices:
            if not is_automorphism(base, m):
                raise ValueError("action matrix is not an automorphism of the root datum")
        if delta is None:
            self.pinned = simple_system(base)
        else:
            self.pinned = PinnedRootDatum(base, tuple(delta))
            if not self.pinned.is_valid():
                raise ValueError("delta is not a simple system of the base")

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<TwistedRootDatum{label} base={self.base!r} group order={self.group.order}>"

    @property
    def action(self) -> np.ndarray:
        return self.lattice.action

    @cached_property
    def coaction(self) -> np.ndarray:
        """Action on the cocharacter lattice, ``g -> (g^-1)^T``."""
        return np.array([_dual_map(a) for a in self.action], dtype=np.int64).reshape(self.action.shape)

    def cocharacter_lattice(self) -> GammaLattice:
        gens = [self.coaction[i] for i in self.group.generator_indices]
        return GammaLattice(self.group, self.base.rank, gens, name=f"dual({self.lattice.name})")

    def restrict(self, D: FiniteGroup) -> "TwistedRootDatum":
        idx = [self.group.index(g) for g in D.generators]
        return TwistedRootDatum(self.base, D, [self.action[i] for i in idx], self.name, self.pinned.delta)

    def derive(self, op: str) -> "TwistedRootDatum":
        """``derive(base, op)`` with the action moved along.

        Roots keep their indices, so the simple system and the diagram
        node numbering carry over unchanged.
        """
        new, transport = derive_with_transport(self.base, op)
        mats = [transport(m) for m in self.lattice.generator_matrices]
        delta = self.pinned.delta if new.n_roots else ()
        return TwistedRootDatum(new, self.group, mats, f"{op}({self.name})" if self.name else "", delta)

    @classmethod
    def split(cls, base: RootDatum, group: FiniteGroup, delta=None) -> "TwistedRootDatum":
        return cls(base, group, [np.eye(base.rank, dtype=np.int64)] * len(group.generators), base.name, delta)


# ---------------------------------------------------------------------------
# Operations


def _subgroup_matrices(L: GammaLattice, D: FiniteGroup | None) -> list[np.ndarray]:
    if D is None:
        return list(L.generator_matrices)
    if not L.group.contains_group(D):
        raise ValueError(f"{D!r} is not a subgroup of {L.group!r}")
    return [L.action[L.group.index(g)] for g in D.generators]


def fixed_sublattice(L: GammaLattice | TwistedRootDatum, D: FiniteGroup | None = None) -> Sublattice:
    """Saturated basis of ``{x : g x = x}`` for all ``g`` in ``D`` (default the whole group)."""
    if isinstance(L, TwistedRootDatum):
        L = L.lattice
    if L.has_torsion:
        raise ValueError("fixed_sublattice needs a lattice without torsion")
    mats = _subgroup_matrices(L, D)
    if not mats:
        return Sublattice.full(L.rank)
    stacked = np.concatenate([m - np.eye(L.rank, dtype=np.int64) for m in mats])
    return kernel_basis(stacked.tolist(), L.rank)


def is_anisotropic(T: GammaLattice | TwistedRootDatum, D: FiniteGroup | None = None) -> bool:
    """``True`` iff the ``D``-fixed part of the character lattice is zero."""
    return fixed_sublattice(T, D).rank == 0


def _require_semisimple(psi: RootDatum):
    if not predicates(psi).semisimple:
        raise RootDatumError("operation needs a semisimple root datum")


def is_generic(Psi: TwistedRootDatum) -> bool:
    """``True`` iff the image of ``Gamma`` in ``Aut(base)`` contains the Weyl group."""
    _require_semisimple(Psi.base)
    image = _closure(Psi.base.rank, Psi.lattice.generator_matrices)
    keys = {np.ascontiguousarray(m).tobytes() for m in image}
    p = Psi.pinned
    return all(np.ascontiguousarray(reflection_matrix(Psi.base, i)).tobytes() in keys for i in p.delta)


def star_action(Psi: TwistedRootDatum, pinned=None) -> tuple[Perm, ...]:
    """Diagram permutation of every group element (the ``*``-action).

    Entry ``k`` maps node ``i`` to node ``perm[i]`` in the node order of
    ``pinned`` (default :func:`simple_system` of the base).
    """
    if not predicates(Psi.base).reduced:
        raise RootDatumError("star action needs a reduced root datum")
    p = pinned if pinned is not None else Psi.pinned
    return tuple(factor_weyl_diagram(p, a)[2] for a in Psi.action)


def _perm_matrix(p: Sequence[int]) -> np.ndarray:
    n = len(p)
    m = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(p):
        m[j, i] = 1
    return m


def induced_lattice(X: GammaSet) -> GammaLattice:
    """Permutation lattice ``ZZ[X]``."""
    return GammaLattice(X.group, X.size, [_perm_matrix(p) for p in X.generator_perms], name="Z[X]")


def _adapted_basis(S: np.ndarray, rank: int) -> tuple[np.ndarray, np.ndarray]:
    """For saturated ``S`` (rows), return ``(W, Vt)``: rows of ``W`` form a
    basis of ``ZZ^rank`` whose first ``len(S)`` rows span ``S``, and
    ``Vt = W^{-T}`` gives coordinates ``c = Vt x``."""
    k = len(S)
    if k == 0:
        I = np.eye(rank, dtype=np.int64)
        return I, I
    _, D, V = smith_normal_form(IntMatrix.from_rows(S.tolist(), rank))
    if any(d != 1 for d in D.diagonal()[:k]) or len(D.diagonal()) < k:
        raise ValueError("sublattice is not saturated or not of full row rank")
    Vn = np.array(V.entries, dtype=np.int64).reshape(rank, rank)
    W = _dual_map(Vn)  # (V^-1)^T
    W = W.T  # rows of V^-1
    return W, Vn.T


def _stable_split(L: GammaLattice, S: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    W, Vt = _adapted_basis(S, L.rank)
    k = len(S)
    sub, quo = [], []
    for m in L.generator_matrices:
        B = Vt @ m @ W.T
        if np.any(B[k:, :k]):
            raise ValueError("sublattice is not stable under the action")
        sub.append(B[:k, :k])
        quo.append(B[k:, k:])
    return sub, quo


def sublattice_module(L: GammaLattice, S) -> GammaLattice:
    """Action on a saturated stable sublattice (rows of ``S``), in an adapted basis."""
    S = np.asarray(S, dtype=np.int64).reshape(-1, L.rank)
    sub, _ = _stable_split(L, S)
    return GammaLattice(L.group, len(S), sub, name=f"sub({L.name})")


def quotient_module(L: GammaLattice, S) -> GammaLattice:
    """Action on ``L / S`` for a saturated stable sublattice ``S``."""
    S = np.asarray(S, dtype=np.int64).reshape(-1, L.rank)
    _, quo = _stable_split(L, S)
    return GammaLattice(L.group, L.rank - len(S), quo, name=f"quot({L.name})")


def augmentation_sub(X: GammaSet) -> GammaLattice:
    """Kernel of the sum map ``ZZ[X] -> ZZ``."""
    L = induced_lattice(X)
    K = kernel_basis([[1] * X.size], X.size)
    return sublattice_module(L, np.array(K.generators.entries, dtype=np.int64).reshape(K.generators.rows, X.size))


def norm_one_quotient(X: GammaSet) -> GammaLattice:
    """``ZZ[X] / ZZ (sum of x)``: the character lattice of a norm-one torus."""
    L = induced_lattice(X)
    M = quotient_module(L, np.ones((1, X.size), dtype=np.int64))
    M.name = "J_X"
    return M

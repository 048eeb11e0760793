"""Etale algebras with involution, their split models and twisted root data.

An etale algebra ``E`` with involution ``sigma`` is modelled by its
geometric points ``Y`` as a finite ``Gamma``-set together with a
commuting involution of ``Y``. For the second kind, the centre ``K`` is
remembered through a ``Gamma``-equivariant map from ``Y`` onto the two
geometric points of ``K``. Square classes ``d_i`` of the orthogonal
discussion become splitting data of the double cover ``Y -> Y / sigma``
over each ``Gamma``-orbit.

Split models use matrix indices ``0..n-1``. The torus character lattice
has basis ``e_1..e_m`` where ``e_k`` is the character ``t -> t_a`` for the
first index ``a`` of the ``k``-th ``sigma_0``-pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cohomology import PlaceModel
from .embed import EmbeddingError, Orientation, enumerate_orientations
from .exact_lattice import Sublattice, kernel_basis, solve_rational
from .galois import (
    FiniteGroup,
    GammaLattice,
    GammaSet,
    TwistedRootDatum,
    fixed_sublattice,
    induced_lattice,
)
from .root_datum import (
    PinnedRootDatum,
    RootDatum,
    transport_isomorphism,
    validate,
)

__all__ = [
    "TAU_TYPES",
    "A_DESCRIPTIONS",
    "AlgebraModelError",
    "EtaleInvolution",
    "SplitModel",
    "LocalAlgebraData",
    "Lemma26Report",
    "split_model",
    "split_root_datum",
    "etale_involution",
    "split_etale_involution",
    "torus_lattice",
    "build_twisted_datum",
    "cover_splits",
    "thm25_hypothesis",
    "lemma26_check",
    "thm27_case",
    "second_kind_orientation",
    "other_orientation",
]

TAU_TYPES = ("orthogonal", "symplectic", "unitary")
A_DESCRIPTIONS = ("matrix_over_field", "odd_over_quaternion", "even_over_quaternion")

Perm = tuple[int, ...]


class AlgebraModelError(ValueError):
    """Raised for algebra data outside an operation's domain."""


def _compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    return tuple(p[x] for x in q)


# ---------------------------------------------------------------------------
# Etale algebras with involution


@dataclass(frozen=True)
class EtaleInvolution:
    """Etale algebra with involution, as a ``Gamma``-set with an involution.

    Parameters
    ----------
    gamma_set : GammaSet
        Geometric points ``Y`` of ``E`` over ``k``.
    involution : sequence of int
        The permutation ``sigma`` of ``Y``; commutes with ``Gamma``.
    kind : {"first", "second"}
        Kind of the involution.
    tau_type : {"orthogonal", "symplectic", "unitary"}
        Type of the involution on the ambient central simple algebra.
    k_map : sequence of int, optional
        Second kind only: the fibre (0 or 1) of each point over the two
        geometric points of ``K``.
    """

    gamma_set: GammaSet
    involution: Perm
    kind: str
    tau_type: str
    k_map: Perm | None = None

    def __post_init__(self):
        sigma = tuple(int(x) for x in self.involution)
        object.__setattr__(self, "involution", sigma)
        n = self.gamma_set.size
        if sorted(sigma) != list(range(n)):
            raise AlgebraModelError("involution must be a permutation of Y")
        if any(sigma[sigma[y]] != y for y in range(n)):
            raise AlgebraModelError("involution must square to the identity")
        for p in self.gamma_set.generator_perms:
            if _compose(p, sigma) != _compose(sigma, p):
                raise AlgebraModelError("involution does not commute with the Galois action")
        if self.tau_type not in TAU_TYPES:
            raise AlgebraModelError(f"tau_type must be one of {TAU_TYPES}")
        if self.kind not in ("first", "second"):
            raise AlgebraModelError("kind must be 'first' or 'second'")
        if (self.kind == "second") != (self.tau_type == "unitary"):
            raise AlgebraModelError("unitary involutions are exactly those of the second kind")
        fixed = sum(1 for y in range(n) if sigma[y] == y)
        if self.tau_type == "orthogonal" and fixed != n % 2:
            raise AlgebraModelError(f"orthogonal type on {n} points needs {n % 2} fixed point(s), found {fixed}")
        if self.tau_type == "symplectic" and (n % 2 or fixed):
            raise AlgebraModelError("symplectic type needs an even number of points and no fixed point")
        if self.kind == "second":
            if self.k_map is None:
                raise AlgebraModelError("second kind needs k_map")
            kmap = tuple(int(x) for x in self.k_map)
            object.__setattr__(self, "k_map", kmap)
            if len(kmap) != n or set(kmap) - {0, 1}:
                raise AlgebraModelError("k_map must send every point to 0 or 1")
            if any(kmap[sigma[y]] == kmap[y] for y in range(n)):
                raise AlgebraModelError("sigma must exchange the two fibres over K")
            for p in self.gamma_set.generator_perms:
                image = {(kmap[y], kmap[p[y]]) for y in range(n)}
                if len({a for a, _ in image}) != len(image):
                    raise AlgebraModelError("k_map is not Galois-equivariant")
        elif self.k_map is not None:
            raise AlgebraModelError("k_map only applies to the second kind")

    @property
    def group(self) -> FiniteGroup:
        return self.gamma_set.group

    @property
    def size(self) -> int:
        return self.gamma_set.size

    @property
    def degree(self) -> int:
        """Degree of the split model: ``rk_K E``."""
        return self.size // 2 if self.kind == "second" else self.size

    def fixed_points(self) -> tuple[int, ...]:
        return tuple(y for y in range(self.size) if self.involution[y] == y)

    def representatives(self) -> tuple[int, ...]:
        """One point per free ``sigma``-orbit; fibre-0 points for the second kind."""
        sigma = self.involution
        if self.kind == "second":
            return tuple(y for y in range(self.size) if self.k_map[y] == 0)
        return tuple(y for y in range(self.size) if sigma[y] != y and y < sigma[y])

    def free_orbits(self) -> tuple[tuple[int, int], ...]:
        return tuple((y, self.involution[y]) for y in self.representatives())

    def restrict(self, D: FiniteGroup) -> "EtaleInvolution":
        return EtaleInvolution(self.gamma_set.restrict(D), self.involution, self.kind, self.tau_type, self.k_map)

    def without_fixed_point(self) -> tuple[GammaSet, Perm]:
        """``(Y', sigma')`` for ``E = K x E'`` in the odd orthogonal case."""
        fixed = self.fixed_points()
        if self.tau_type != "orthogonal" or len(fixed) != 1:
            raise AlgebraModelError("expected the odd orthogonal shape E = K x E'")
        keep = [y for y in range(self.size) if y != fixed[0]]
        pos = {y: i for i, y in enumerate(keep)}
        perms = tuple(tuple(pos[p[y]] for y in keep) for p in self.gamma_set.generator_perms)
        return GammaSet(self.group, len(keep), perms), tuple(pos[self.involution[y]] for y in keep)


def _cosets(group: FiniteGroup, H: FiniteGroup) -> tuple[list[int], list[int]]:
    """Left cosets ``x H``: returns ``(coset id per element, representative per coset)``."""
    h_idx = group.embedding(H)
    table = group.table
    coset_of = [-1] * group.order
    reps = []
    for x in range(group.order):
        if coset_of[x] < 0:
            for j in h_idx:
                coset_of[int(table[x, j])] = len(reps)
            reps.append(x)
    return coset_of, reps


def etale_involution(group: FiniteGroup, factors, tau_type: str, fixed_point: bool = False, k_subgroup: FiniteGroup | None = None) -> EtaleInvolution:
    """Assemble ``(E, sigma)`` from factor data.

    Each factor is a pair ``(H, H')`` of subgroups with ``H'`` of index 1
    or 2 in ``H``. Index 2 gives the quadratic field extension ``E_i`` of
    ``F_i`` with ``sigma`` its Galois involution (``Y_i = Gamma / H'``);
    index 1 gives ``E_i = F_i x F_i`` with ``sigma`` exchanging the copies.
    ``fixed_point`` adds a ``sigma``-fixed factor ``k`` (odd orthogonal
    case). For the unitary type, ``k_subgroup`` is ``Gal(ks / K)``
    (default ``Gamma``, i.e. ``K = k x k``).
    """
    kind = "second" if tau_type == "unitary" else "first"
    if kind == "second":
        if fixed_point:
            raise AlgebraModelError("unitary data have no sigma-fixed point")
        GK = k_subgroup if k_subgroup is not None else group
        if group.order % GK.order or group.order // GK.order > 2 or not group.contains_group(GK):
            raise AlgebraModelError("k_subgroup must have index 1 or 2")
        in_gk = np.zeros(group.order, dtype=bool)
        in_gk[group.embedding(GK)] = True
    points: list[tuple[int, int, int]] = []  # (factor, coset, copy)
    sigma_of: dict[tuple[int, int, int], tuple[int, int, int]] = {}
    kmap_of: dict[tuple[int, int, int], int] = {}
    factor_data = []
    for f, (H, Hp) in enumerate(factors):
        if not (group.contains_group(H) and H.contains_group(Hp)):
            raise AlgebraModelError(f"factor {f}: need H' <= H <= Gamma")
        index = H.order // Hp.order
        if index not in (1, 2):
            raise AlgebraModelError(f"factor {f}: H' must have index 1 or 2 in H")
        coset_of, reps = _cosets(group, Hp)
        factor_data.append((coset_of, index))
        copies = (0,) if index == 2 else (0, 1)
        if index == 2:
            h = next(int(i) for i in group.embedding(H) if coset_of[int(i)] != coset_of[0])
        for c, x in enumerate(reps):
            for copy in copies:
                pt = (f, c, copy)
                points.append(pt)
                if index == 2:
                    sigma_of[pt] = (f, coset_of[group.mul(x, h)], 0)
                else:
                    sigma_of[pt] = (f, c, 1 - copy)
                if kind == "second":
                    kmap_of[pt] = int(not in_gk[x]) ^ copy
        if kind == "second" and index == 2:
            if H.order == len([i for i in group.embedding(H) if in_gk[int(i)]]) or Hp.order != len([i for i in group.embedding(Hp) if in_gk[int(i)]]):
                raise AlgebraModelError(f"factor {f}: need H' = H meet Gal(ks/K) with H not inside it")
        if kind == "second" and index == 1 and not all(in_gk[int(i)] for i in group.embedding(H)):
            raise AlgebraModelError(f"factor {f}: split factors need H inside Gal(ks/K)")
    if fixed_point:
        pt = (-1, 0, 0)
        points.insert(0, pt)
        sigma_of[pt] = pt
    pos = {pt: i for i, pt in enumerate(points)}
    gen_idx = group.generator_indices
    perms = []
    for s in range(len(group.generators)):
        g = gen_idx[s]
        image = []
        for f, c, copy in points:
            if f < 0:
                image.append(pos[(f, c, copy)])
                continue
            coset_of, _ = factor_data[f]
            x = next(i for i in range(group.order) if coset_of[i] == c)
            image.append(pos[(f, coset_of[group.mul(g, x)], copy)])
        perms.append(tuple(image))
    Y = GammaSet(group, len(points), tuple(perms))
    sigma = tuple(pos[sigma_of[pt]] for pt in points)
    kmap = tuple(kmap_of[pt] for pt in points) if kind == "second" else None
    return EtaleInvolution(Y, sigma, kind, tau_type, kmap)


def split_etale_involution(tau_type: str, n: int, group: FiniteGroup) -> EtaleInvolution:
    """The split ``(E_0, sigma_0)`` of degree ``n`` with trivial ``Gamma``-action."""
    model = split_model(tau_type, n)
    size = 2 * n if tau_type == "unitary" else n
    ident = tuple(range(size))
    Y = GammaSet(group, size, tuple(ident for _ in group.generators))
    kmap = tuple(0 if a < n else 1 for a in range(size)) if tau_type == "unitary" else None
    return EtaleInvolution(Y, model.sigma0, "second" if tau_type == "unitary" else "first", tau_type, kmap)


# ---------------------------------------------------------------------------
# Split models


@dataclass(frozen=True, eq=False)
class SplitModel:
    """Split algebra with involution ``(A_0, tau_0)`` and ``E_0 = k^n`` on the diagonal.

    For the first kind ``tau_0(M) = B M^T B^-1``. For the second kind
    ``A_0 = M_n x M_n^op`` is stored as block-diagonal ``2n x 2n``
    matrices ``diag(M, N^T)``; the exchange involution is then
    ``X -> B X^T B^-1`` with ``B`` the block swap.

    Attributes
    ----------
    tau_type : str
    n : int
        Degree of ``A_0`` over its centre.
    B : numpy.ndarray
        The involution matrix.
    sigma0 : tuple of int
        The involution induced on the diagonal ``E_0``.
    pairs : tuple of (int, int)
        ``sigma_0``-orbits of size two, in lattice-coordinate order.
    """

    tau_type: str
    n: int
    B: np.ndarray
    sigma0: Perm
    pairs: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.sigma0)

    @property
    def rank(self) -> int:
        return len(self.pairs)

    def tau0(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        return self.B @ X.T @ self.B.T

    def iota0(self, x: Sequence) -> np.ndarray:
        """Diagonal embedding ``E_0 -> A_0``."""
        if len(x) != self.size:
            raise AlgebraModelError(f"expected {self.size} coordinates")
        return np.diag(np.asarray(x, dtype=object))

    def allowed(self, a: int, b: int) -> bool:
        """Whether the matrix unit ``E_ab`` lies in ``A_0``."""
        return self.tau_type != "unitary" or (a < self.n) == (b < self.n)

    def character(self, a: int) -> np.ndarray:
        """Character ``t -> t_a`` of the diagonal torus ``T_0`` in lattice coordinates."""
        c = np.zeros(self.rank, dtype=np.int64)
        for k, (i, j) in enumerate(self.pairs):
            if a == i:
                c[k] = 1
            elif a == j:
                c[k] = -1
        return c


def split_model(tau_type: str, n: int) -> SplitModel:
    """The split model of degree ``n`` for ``tau_type``."""
    if tau_type not in TAU_TYPES:
        raise AlgebraModelError(f"tau_type must be one of {TAU_TYPES}")
    if n < 1:
        raise AlgebraModelError("degree must be at least 1")
    if tau_type == "symplectic" and n % 2:
        raise AlgebraModelError("symplectic involutions need even degree")
    if tau_type == "unitary":
        size, m, off = 2 * n, n, 0
    elif tau_type == "orthogonal" and n % 2:
        size, m, off = n, n // 2, 1
    else:
        size, m, off = n, n // 2, 0
    B = np.zeros((size, size), dtype=np.int64)
    if off:
        B[0, 0] = 1
    for i in range(off, size):
        for j in range(off, size):
            if tau_type == "symplectic":
                B[i, j] = 1 if j == i + m else (-1 if j == i - m else 0)
            elif i == j + m or j == i + m:
                B[i, j] = 1
    if not np.array_equal(B @ B.T, np.eye(size, dtype=np.int64)):
        raise AssertionError("B is not a signed permutation matrix")
    sigma0 = tuple(int(np.flatnonzero(B[i])[0]) for i in range(size))
    pairs = tuple((i, i + m) for i in range(off, off + m))
    model = SplitModel(tau_type, n, B, sigma0, pairs)
    for a in range(size):
        for b in range(size):
            if not model.allowed(a, b):
                continue
            E = np.zeros((size, size), dtype=np.int64)
            E[a, b] = 1
            if not np.array_equal(model.tau0(model.tau0(E)), E):
                raise AssertionError("tau_0 is not an involution")
    D = model.tau0(np.diag(np.arange(1, size + 1)))
    if not np.array_equal(np.diag(np.diag(D)), D) or tuple(int(D[i, i]) - 1 for i in range(size)) != sigma0:
        raise AssertionError("tau_0 does not preserve the diagonal")
    return model


def _bourbaki_simple_roots(tau_type: str, size_m: int) -> list[np.ndarray]:
    m = size_m
    e = np.eye(m, dtype=np.int64)
    simple = [e[k] - e[k + 1] for k in range(m - 1)]
    if tau_type == "unitary" or m == 0:
        return simple
    if tau_type == "symplectic":
        return simple + [2 * e[m - 1]]
    return simple  # completed by the caller for orthogonal types


def split_root_datum(tau_type: str, n: int) -> PinnedRootDatum:
    """Root datum of ``(G_0, T_0)`` from the weight decomposition of ``Lie(G_0)``.

    ``Lie(G_0) = {X in A_0 : tau_0(X) = -X}`` is decomposed under the
    diagonal torus on the span of matrix units; each nonzero weight space
    must be a line ``k X_alpha`` and the coroot is read off from
    ``H = [X_alpha, X_-alpha]``. The simple system is the standard one.
    """
    if tau_type == "orthogonal" and n == 2:
        raise AlgebraModelError("orthogonal involutions of degree 2 are excluded: G_0 is the one dimensional split torus itself")
    model = split_model(tau_type, n)
    size, m = model.size, model.rank
    chars = [model.character(a) for a in range(size)]
    spaces: dict[tuple[int, ...], list[np.ndarray]] = {}
    for a in range(size):
        for b in range(size):
            if not model.allowed(a, b):
                continue
            E = np.zeros((size, size), dtype=np.int64)
            E[a, b] = 1
            X = E - model.tau0(E)
            if X.any():
                spaces.setdefault(tuple(int(x) for x in chars[a] - chars[b]), []).append(X)
    zero = (0,) * m
    cartan = spaces.pop(zero, [])
    if Sublattice.span(size * size, [X.ravel() for X in cartan]).rank != m:
        raise AssertionError("zero weight space is not the Lie algebra of T_0")
    root_vectors = {}
    for w, vecs in spaces.items():
        if Sublattice.span(size * size, [X.ravel() for X in vecs]).rank != 1:
            raise AssertionError(f"weight space {w} is not a line")
        root_vectors[w] = vecs[0]
    roots = sorted(root_vectors)
    coroots = []
    for w in roots:
        Xp, Xm = root_vectors[w], root_vectors[tuple(-x for x in w)]
        H = Xp @ Xm - Xm @ Xp
        if np.count_nonzero(H - np.diag(np.diag(H))):
            raise AssertionError("bracket of opposite root vectors is not diagonal")
        u = [Fraction(int(H[i, i])) for i, _ in model.pairs]
        if any(H[j, j] != -H[i, i] for i, j in model.pairs):
            raise AssertionError("bracket is not in Lie(T_0)")
        value = sum(Fraction(x) * y for x, y in zip(w, u))
        cor = [2 * y / value for y in u]
        if any(c.denominator != 1 for c in cor):
            raise AssertionError("coroot is not integral")
        coroots.append(tuple(int(c) for c in cor))
    label = {"orthogonal": "SO", "symplectic": "Sp", "unitary": "GL"}[tau_type]
    psi = RootDatum(m, roots, coroots, f"{label}{n}")
    report = validate(psi)
    if not report:
        raise AssertionError(f"weight decomposition produced an invalid root datum: {report.violations}")
    simple = _bourbaki_simple_roots(tau_type, m)
    if tau_type == "orthogonal" and m:
        e = np.eye(m, dtype=np.int64)
        simple.append(e[m - 1] if n % 2 else e[m - 2] + e[m - 1])
    delta = tuple(psi.index_of(r) for r in simple)
    pinned = PinnedRootDatum(psi, delta)
    if not pinned.is_valid():
        raise AssertionError("standard simple roots do not form a simple system")
    return pinned


# ---------------------------------------------------------------------------
# Torus lattice and twisted root datum


def _signed_matrix(E: EtaleInvolution, perm: Sequence[int]) -> np.ndarray:
    reps = E.representatives()
    pos = {y: k for k, y in enumerate(reps)}
    sigma = E.involution
    m = len(reps)
    A = np.zeros((m, m), dtype=np.int64)
    for k, y in enumerate(reps):
        z = perm[y]
        if z in pos:
            A[pos[z], k] = 1
        else:
            A[pos[sigma[z]], k] = -1
    return A


def torus_lattice(E: EtaleInvolution) -> GammaLattice:
    """``X*(T)`` for ``T = U(E, sigma)°``: ``ZZ[Y] / <y + sigma y>`` modulo torsion.

    The basis is the class of each point of :meth:`EtaleInvolution.representatives`;
    ``g`` sends it to the class of ``g y``, which is ``-1`` times a basis
    vector when ``g y`` is not a representative. Fixed points of
    ``sigma`` have order two in the quotient and disappear.
    """
    mats = [_signed_matrix(E, p) for p in E.gamma_set.generator_perms]
    return GammaLattice(E.group, len(E.representatives()), mats, name="X*(T)")


def build_twisted_datum(E: EtaleInvolution, name: str = "") -> TwistedRootDatum:
    """Twisted root datum ``Psi`` of ``T`` inside ``G``.

    The split datum of :func:`split_root_datum` with ``Gamma`` acting by
    the signed permutations of :func:`torus_lattice`, i.e. through
    ``Aut(E_0, sigma_0) -> Aut(Psi_0)`` after identifying the
    representatives of ``Y`` with the first index of each ``sigma_0``-pair.
    """
    pinned = split_root_datum(E.tau_type, E.degree)
    L = torus_lattice(E)
    if L.rank != pinned.base.rank:
        raise AssertionError("torus lattice and split datum have different ranks")
    try:
        return TwistedRootDatum(pinned.base, E.group, L.generator_matrices, name or pinned.base.name, pinned.delta)
    except ValueError as exc:
        raise AlgebraModelError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Orthogonal hypotheses


def cover_splits(Y: GammaSet, sigma: Sequence[int], orbit: Sequence[int], D: FiniteGroup | None = None) -> bool:
    """Whether ``Y -> Y / sigma`` splits over ``orbit`` for the action of ``D``.

    ``orbit`` is a set of points of ``Y`` closed under ``sigma``. The
    cover splits iff no ``D``-orbit contains a pair ``{y, sigma y}``.
    """
    X = Y if D is None else Y.restrict(D)
    action = X.action
    return all(sigma[y] not in {p[y] for p in action} for y in orbit)


def _factor_orbits(Y: GammaSet, sigma: Sequence[int]) -> list[tuple[int, ...]]:
    """Preimages in ``Y`` of the ``Gamma``-orbits on ``Y / sigma`` (the factors ``F_i``)."""
    seen: set[int] = set()
    out = []
    for y in range(Y.size):
        if y in seen:
            continue
        orb = {p[z] for p in Y.action for z in (y, sigma[y])}
        seen |= orb
        out.append(tuple(sorted(orb)))
    return out


def _place_group(v) -> FiniteGroup:
    return v.decomposition if isinstance(v, PlaceModel) else v


def thm25_hypothesis(E: EtaleInvolution, v) -> bool:
    """Hypothesis at ``v`` for odd orthogonal ``E = K x E'``.

    True iff for every factor ``F_i`` of ``E'^sigma``, ``d_i`` is a global
    square exactly when it is a square at ``v``: the double cover over
    the ``i``-th orbit splits globally iff it splits for the decomposition
    group of ``v``.
    """
    if E.kind != "first" or E.tau_type != "orthogonal" or E.size % 2 == 0:
        raise AlgebraModelError("thm25_hypothesis needs the odd orthogonal shape")
    Y, sigma = E.without_fixed_point()
    D = _place_group(v)
    for orbit in _factor_orbits(Y, sigma):
        glob = cover_splits(Y, sigma, orbit)
        loc = cover_splits(Y, sigma, orbit, D)
        if glob and not loc:
            raise AssertionError("a split cover cannot become non-split after restriction")
        if glob != loc:
            return False
    return True


@dataclass(frozen=True)
class Lemma26Report:
    """Outcome of :func:`lemma26_check`.

    ``isomorphic`` records that the explicit map ``P -> J_E'`` is
    ``Gamma``-equivariant with image the kernel of ``J_E' -> J_E'^sigma``;
    ``parity_ok`` that lifting along ``J_E'^Gamma -> J_E'^sigma^Gamma``
    matched the parity rule on every tested vector.
    """

    rank_P: int
    rank_J: int
    rank_J_sigma: int
    isomorphic: bool
    parity_ok: bool
    tested: int
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.isomorphic and self.parity_ok and self.rank_P == self.rank_J - self.rank_J_sigma

    def __bool__(self) -> bool:
        return self.ok


def _sc_in_base_coordinates(Psi: TwistedRootDatum) -> tuple[TwistedRootDatum, list[list[Fraction]]]:
    """``sc(Psi)`` and the rational matrix sending its coordinates to those of ``M``."""
    sc = Psi.derive("sc")
    # roots keep their indices, so L(sc simple root) = simple root fixes L
    idx = list(sc.pinned.delta)
    A = [list(map(int, sc.base.R[i])) for i in idx]
    Bm = [list(map(int, Psi.base.R[i])) for i in idx]
    Lt = solve_rational(A, Bm)
    if Lt is None:
        raise AssertionError("simple roots do not span the rational character space")
    return sc, Lt


def lemma26_check(E: EtaleInvolution, coefficient_range: int = 2) -> Lemma26Report:
    """Build ``P = X*(sc T)`` two ways and re-run the parity rule.

    Route one derives ``sc`` of :func:`build_twisted_datum`. Route two is
    the kernel of ``J_E' -> J_E'^sigma`` induced by ``Y' -> Y' / sigma``.
    The map ``e_k -> y_k - sigma y_k`` (extended rationally) must carry
    route one onto route two equivariantly. The parity rule says
    ``sum a_i gamma_i`` in ``J_E'^sigma`` lifts to ``J_E'^Gamma`` iff the
    ``a_i`` over non-split factors share one parity.
    """
    Y, sigma = E.without_fixed_point()
    n = Y.size
    Psi = build_twisted_datum(E)
    m = Psi.base.rank
    full_reps = E.representatives()
    fixed = E.fixed_points()[0]
    keep = [y for y in range(E.size) if y != fixed]
    pos = {y: i for i, y in enumerate(keep)}
    reps = [pos[y] for y in full_reps]
    # phi: M (x) Q -> Q[Y'], e_k -> y_k - sigma(y_k)
    phi = np.zeros((n, m), dtype=object)
    for k, y in enumerate(reps):
        phi[y, k] += 1
        phi[sigma[y], k] -= 1
    witness = None
    # route one: sc lattice, carried into M (x) Q
    if m:
        sc, Lt = _sc_in_base_coordinates(Psi)
        L = np.array([[Lt[j][i] for j in range(m)] for i in range(m)], dtype=object)  # columns: images of sc basis
    else:
        L = np.zeros((0, 0), dtype=object)
    image = phi.dot(L) if m else np.zeros((n, 0), dtype=object)
    isomorphic = True
    # J_E' = Z[Y'] / Z(sum y): shift each column by a multiple of the norm element
    for k in range(m):
        col = [Fraction(x) for x in image[:, k]]
        shift = col[0] - (col[0].numerator // col[0].denominator)
        col = [x - shift for x in col]
        if any(x.denominator != 1 for x in col):
            isomorphic, witness = False, "image of P is not integral in J_E'"
            break
        image[:, k] = col
    orbits = sorted({tuple(sorted((y, sigma[y]))) for y in range(n)})
    opos = {}
    for i, o in enumerate(orbits):
        for y in o:
            opos[y] = i
    r = len(orbits)
    proj = np.zeros((r, n), dtype=np.int64)
    for y in range(n):
        proj[opos[y], y] = 1
    ones_y = [1] * n
    if isomorphic:
        img_rows = [[int(Fraction(image[y, k])) for y in range(n)] for k in range(m)]
        route_one = Sublattice.span(n, img_rows + [ones_y])
        # route two: preimage in Z[Y'] of ker(J_E' -> J_E'^sigma)
        diffs = [[int(proj[i, y] - proj[0, y]) for y in range(n)] for i in range(1, r)]
        route_two = kernel_basis(diffs, n) if diffs else Sublattice.full(n)
        if route_one != route_two:
            isomorphic, witness = False, "phi(P) differs from the kernel of J_E' -> J_E'^sigma"
        elif route_one.rank != m + 1:
            isomorphic, witness = False, "phi is not injective modulo the norm element"
    if isomorphic and m:
        phiL = phi.dot(L)
        for s, A in enumerate(sc.lattice.generator_matrices):
            g_y = np.array(_perm_cols(Y.generator_perms[s]), dtype=object)
            if not np.array_equal(phiL.dot(np.asarray(A, dtype=object)), g_y.dot(phiL)):
                isomorphic, witness = False, f"phi is not equivariant for generator {s}"
                break
    # parity rule on J_E'^sigma
    factors = _factor_orbits(Y, sigma)
    fac_of_orbit = {}
    for i, f in enumerate(factors):
        for y in f:
            fac_of_orbit[opos[y]] = i
    nonsplit = [i for i, f in enumerate(factors) if not cover_splits(Y, sigma, f)]
    fix_y = fixed_sublattice(induced_lattice(Y))
    gamma_cols = {i: [1 if fac_of_orbit[o] == i else 0 for o in range(r)] for i in range(len(factors))}
    lifts = [list(map(int, proj.dot(np.array(v, dtype=np.int64)))) for v in fix_y.vectors()]
    liftable = Sublattice.span(r, lifts + [[1] * r])
    parity_ok, tested = True, 0
    span = range(-coefficient_range, coefficient_range + 1)
    combos = itertools.product(span, repeat=len(factors)) if len(factors) <= 4 else _sample_combos(len(factors), span)
    for a in combos:
        y = [sum(a[i] * gamma_cols[i][o] for i in range(len(factors))) for o in range(r)]
        direct = liftable.contains(y)
        rule = len({a[i] % 2 for i in nonsplit}) <= 1
        tested += 1
        if direct != rule:
            parity_ok, witness = False, f"coefficients {a}: lift {direct}, parity rule {rule}"
            break
    return Lemma26Report(m, n - 1, r - 1, isomorphic, parity_ok, tested, witness)


def _sample_combos(k: int, span: range):
    rng = np.random.default_rng(k)
    vals = list(span)
    for _ in range(200):
        yield tuple(int(x) for x in rng.choice(vals, size=k))


def _perm_cols(p: Sequence[int]) -> list[list[int]]:
    n = len(p)
    m = [[0] * n for _ in range(n)]
    for i, j in enumerate(p):
        m[j][i] = 1
    return m


@dataclass(frozen=True)
class LocalAlgebraData:
    """Local behaviour of ``A`` at a place: is ``A_v`` split, is the discriminant split."""

    place: PlaceModel
    a_split: bool
    disc_split: bool


def thm27_case(A_desc: str, locals_: Sequence[LocalAlgebraData], E: EtaleInvolution) -> bool:
    """Side condition of the even orthogonal case for the shape of ``A``.

    ``matrix_over_field`` and ``odd_over_quaternion`` carry no condition.
    For ``even_over_quaternion``, at every place where ``A_v`` is not split
    and the discriminant is, ``E_v`` must not split over ``E_v^sigma``:
    some decomposition-group orbit must meet both points of a
    ``sigma``-pair.
    """
    if A_desc not in A_DESCRIPTIONS:
        raise AlgebraModelError(f"A_desc must be one of {A_DESCRIPTIONS}")
    if E.kind != "first" or E.tau_type != "orthogonal" or E.size % 2:
        raise AlgebraModelError("thm27_case needs the even orthogonal shape")
    labels = [d.place.label for d in locals_]
    if len(set(labels)) != len(labels):
        raise AlgebraModelError("duplicate place labels in local data")
    for d in locals_:
        if A_desc == "matrix_over_field" and not d.a_split:
            raise AlgebraModelError(f"place {d.place.label}: a matrix algebra over K is split everywhere")
        if not E.group.contains_group(d.place.decomposition):
            raise AlgebraModelError(f"place {d.place.label}: decomposition group is not a subgroup")
    if A_desc != "even_over_quaternion":
        return True
    Y, sigma = E.gamma_set, E.involution
    for d in locals_:
        if not d.a_split and d.disc_split and cover_splits(Y, sigma, range(Y.size), d.place.decomposition):
            return False
    return True


# ---------------------------------------------------------------------------
# Second kind


def _radical_sign(u: Orientation) -> int:
    R = transport_isomorphism(u.source.base, u.target.base, u.matrix, "rad")
    if R.shape != (1, 1) or abs(int(R[0, 0])) != 1:
        raise AssertionError("second-kind data must have central rank one")
    return int(R[0, 0])


def second_kind_orientation(E: EtaleInvolution, G_datum: TwistedRootDatum) -> Orientation:
    """The orientation acting as the identity on the radical.

    Both ``Psi`` and ``G_datum`` have radical identified with the
    character lattice of ``R^(1)_{K/k}(G_m)`` through the sum of
    coordinates, so the distinguished orientation is the ``Gamma``-fixed
    coset whose induced map on radicals is ``+1``.
    """
    if E.kind != "second":
        raise AlgebraModelError("second_kind_orientation needs an involution of the second kind")
    Psi = build_twisted_datum(E)
    if G_datum.base.rank != Psi.base.rank:
        raise EmbeddingError("group datum has a different rank")
    found = [u for u in enumerate_orientations(Psi, G_datum) if _radical_sign(u) == 1]
    assert found, "the orientation torsor of the second kind must be trivial"
    if len(found) != 1:
        raise AssertionError("more than one orientation is the identity on the radical")
    return found[0]


def other_orientation(u: Orientation) -> Orientation:
    """The second ``Gamma``-fixed coset, if any: ``u`` composed with ``-1`` on the radical."""
    others = [w for w in enumerate_orientations(u.source, u.target) if w != u]
    if len(others) != 1:
        raise AssertionError("expected exactly two orientations")
    return others[0]


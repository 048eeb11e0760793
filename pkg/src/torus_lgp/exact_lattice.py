"""Exact integer linear algebra.

Everything here works on plain Python integers, so intermediate growth
during elimination never overflows. Matrices are stored row-major as
tuples of tuples and wrapped in :class:`IntMatrix`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "Sublattice",
    "AbelianInvariants",
    "Subquotient",
    "as_rows",
    "smith_normal_form",
    "hermite_normal_form",
    "kernel_basis",
    "saturate",
    "quotient_invariants",
    "solve_integer",
    "solve_rational",
    "determinant",
]


def as_rows(A, ncols: int | None = None) -> list[list[int]]:
    """Return a fresh list-of-lists copy of ``A`` with Python ``int`` entries.

    ``A`` may be an :class:`IntMatrix`, a numpy array or any nested
    sequence. Non-integral values raise ``ValueError``.
    """
    if isinstance(A, IntMatrix):
        return [list(r) for r in A.entries]
    rows = []
    for r in A:
        row = []
        for x in r:
            xi = int(x)
            if xi != x:
                raise ValueError(f"non-integer entry {x!r}")
            row.append(xi)
        rows.append(row)
    if ncols is not None and rows and any(len(r) != ncols for r in rows):
        raise ValueError("ragged matrix")
    return rows


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense integer matrix.

    Parameters
    ----------
    entries : tuple of tuple of int
        Row-major entries.
    ncols : int
        Column count, needed to represent matrices with zero rows.
    """

    entries: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def from_rows(cls, rows, ncols: int | None = None) -> "IntMatrix":
        data = as_rows(rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for an empty matrix")
            ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        return cls(tuple(tuple(r) for r in data), ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(tuple((0,) * n for _ in range(m)), n)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return self.ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.ncols)

    @property
    def T(self) -> "IntMatrix":
        if not self.entries:
            return IntMatrix(tuple(() for _ in range(self.ncols)), 0)
        return IntMatrix(tuple(zip(*self.entries)), self.rows)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return self.rows

    def __matmul__(self, other) -> "IntMatrix":
        B = other if isinstance(other, IntMatrix) else IntMatrix.from_rows(other)
        if self.ncols != B.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {B.shape}")
        cols = list(zip(*B.entries)) if B.entries else [()] * B.ncols
        out = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
            for row in self.entries
        )
        return IntMatrix(out, B.ncols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product."""
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def to_numpy(self):
        import numpy as np

        return np.array(self.tolist(), dtype=object).reshape(self.shape)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.entries) for j, x in enumerate(r) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.shape)))


@dataclass(frozen=True)
class Sublattice:
    """Integer span of ``generators`` inside ``ZZ^ambient_rank``."""

    ambient_rank: int
    generators: IntMatrix

    @classmethod
    def span(cls, ambient_rank: int, vectors: Iterable[Sequence[int]]) -> "Sublattice":
        return cls(ambient_rank, IntMatrix.from_rows(list(vectors), ambient_rank))

    @classmethod
    def full(cls, n: int) -> "Sublattice":
        return cls(n, IntMatrix.identity(n))

    def basis(self) -> "Sublattice":
        """Same lattice with its Hermite normal form as generators."""
        return Sublattice(self.ambient_rank, hermite_normal_form(self.generators))

    @property
    def rank(self) -> int:
        return self.basis().generators.rows

    def vectors(self) -> list[tuple[int, ...]]:
        return list(self.generators.entries)

    def contains(self, v: Sequence[int]) -> bool:
        return solve_integer(self.generators.T, [[x] for x in v]) is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sublattice):
            return NotImplemented
        return (self.ambient_rank == other.ambient_rank
                and self.basis().generators == other.basis().generators)

    def __hash__(self) -> int:
        return hash((self.ambient_rank, self.basis().generators))


@dataclass(frozen=True)
class AbelianInvariants:
    """``ZZ^free_rank + ZZ/d_1 + ... + ZZ/d_k`` with ``d_1 | d_2 | ... | d_k``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion)
        if any(d <= 1 for d in t):
            raise ValueError("torsion factors must exceed 1")
        if any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError("torsion factors must form a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_diagonal(cls, diag: Iterable[int], ambient: int) -> "AbelianInvariants":
        """Invariants of ``ZZ^ambient / diag(d)`` for a Smith diagonal."""
        d = [abs(x) for x in diag if x != 0]
        return cls(ambient - len(d), tuple(x for x in d if x > 1))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Group order, or ``None`` when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def _find_pivot(A, t, m, n):
    best = None
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(A) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``U @ A @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with non-negative
    entries ``d_1 | d_2 | ...``. Pivots are chosen by smallest absolute
    value, ties broken by lowest row then lowest column, so the output is
    a deterministic function of ``A``.
    """
    if isinstance(A, IntMatrix):
        m, n = A.shape
        M = A.tolist()
    else:
        M = as_rows(A)
        m = len(M)
        n = len(M[0]) if M else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        M[i], M[k] = M[k], M[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in M:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rs, rd = M[src], M[dst]
        for j in range(n):
            if rs[j]:
                rd[j] -= q * rs[j]
        us, ud = U[src], U[dst]
        for j in range(m):
            if us[j]:
                ud[j] -= q * us[j]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in M:
            if row[src]:
                row[dst] -= q * row[src]
        for row in V:
            if row[src]:
                row[dst] -= q * row[src]

    r = min(m, n)
    for t in range(r):
        piv = _find_pivot(M, t, m, n)
        if piv is None:
            break
        while True:
            _, pi, pj = piv
            if pi != t:
                swap_rows(t, pi)
            if pj != t:
                swap_cols(t, pj)
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, M[i][t] // p)
                    dirty = dirty or M[i][t] != 0
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, M[t][j] // p)
                    dirty = dirty or M[t][j] != 0
            if not dirty:
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if M[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(t, bad, -1)
            # restrict pivot search to row/column t plus the trailing block
            piv = _find_pivot(M, t, m, n)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
    return (IntMatrix.from_rows(U, m), IntMatrix.from_rows(M, n), IntMatrix.from_rows(V, n))


def hermite_normal_form(A, ncols: int | None = None) -> IntMatrix:
    """Row-style Hermite normal form of the row span of ``A``, zero rows removed.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``. Two generator sets span the same lattice iff their
    Hermite forms coincide.
    """
    if isinstance(A, IntMatrix):
        n = A.ncols
        M = A.tolist()
    else:
        M = as_rows(A)
        n = ncols if ncols is not None else (len(M[0]) if M else 0)
    M = [row for row in M if any(row)]
    out: list[list[int]] = []
    col = 0
    while M and col < n:
        nz = [row for row in M if row[col]]
        if not nz:
            col += 1
            continue
        rest = [row for row in M if not row[col]]
        while len(nz) > 1:
            nz.sort(key=lambda row: abs(row[col]))
            p = nz[0]
            new = [p]
            for row in nz[1:]:
                q = row[col] // p[col]
                red = [a - q * b for a, b in zip(row, p)]
                if red[col]:
                    new.append(red)
                elif any(red):
                    rest.append(red)
            nz = new
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        M = rest
        col += 1
    # reduce above pivots
    pivots = [next(j for j, x in enumerate(row) if x) for row in out]
    for k in range(len(out)):
        pc = pivots[k]
        for i in range(k):
            q = out[i][pc] // out[k][pc]
            if q:
                out[i] = [a - q * b for a, b in zip(out[i], out[k])]
    return IntMatrix.from_rows(out, n)


def determinant(A) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    M = as_rows(A)
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Kernels, saturation and quotients


def kernel_basis(A, ncols: int | None = None) -> Sublattice:
    """Saturated basis of ``{x in ZZ^n : A x = 0}``."""
    if isinstance(A, IntMatrix):
        n = A.ncols
    else:
        rows = as_rows(A)
        n = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        A = IntMatrix.from_rows(rows, n)
    if A.rows == 0:
        return Sublattice.full(n)
    _, D, V = smith_normal_form(A)
    rank = sum(1 for d in D.diagonal() if d)
    vecs = [tuple(V.entries[i][j] for i in range(n)) for j in range(rank, n)]
    return Sublattice(n, hermite_normal_form(IntMatrix.from_rows(vecs, n)))


def saturate(L: Sublattice) -> Sublattice:
    """``(L tensor QQ) meet ZZ^n``, returned in Hermite normal form."""
    n = L.ambient_rank
    G = L.generators
    if G.rows == 0:
        return Sublattice(n, IntMatrix.zeros(0, n))
    _, D, V = smith_normal_form(G)
    rank = sum(1 for d in D.diagonal() if d)
    Vinv = _unimodular_inverse(V)
    return Sublattice(n, hermite_normal_form(IntMatrix(Vinv.entries[:rank], n)))


def quotient_invariants(ambient_rank: int, L: Sublattice) -> AbelianInvariants:
    """Invariant factors of ``ZZ^ambient_rank / L``."""
    if L.ambient_rank != ambient_rank:
        raise ValueError("sublattice lives in a different ambient lattice")
    if L.generators.rows == 0:
        return AbelianInvariants(ambient_rank, ())
    _, D, _ = smith_normal_form(L.generators)
    return AbelianInvariants.from_diagonal(D.diagonal(), ambient_rank)


def _unimodular_inverse(V: IntMatrix) -> IntMatrix:
    sol = solve_integer(V, IntMatrix.identity(V.rows))
    if sol is None:
        raise ValueError("matrix is not unimodular")
    return sol


def solve_rational(A, B) -> list[list[Fraction]] | None:
    """Solve ``A X = B`` over QQ; ``None`` if inconsistent.

    Free variables are set to zero, so the result is unique when ``A``
    has full column rank.
    """
    A = as_rows(A)
    B = as_rows(B)
    m = len(A)
    n = len(A[0]) if A else 0
    k = len(B[0]) if B else 0
    M = [[Fraction(x) for x in A[i]] + [Fraction(x) for x in B[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if any(M[i][n + j] != 0 for j in range(k)):
            return None
    X = [[Fraction(0)] * k for _ in range(n)]
    for i, c in enumerate(pivots):
        X[c] = M[i][n:]
    return X


def solve_integer(A, B) -> IntMatrix | None:
    """Integer solution of ``A X = B`` (columns of ``B`` are right-hand sides).

    Returns ``None`` when no integral solution exists. Uses the Smith form
    ``U A V = D`` so ``X = V Y`` with ``D Y = U B``.
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix.from_rows(as_rows(A))
    B = B if isinstance(B, IntMatrix) else IntMatrix.from_rows(as_rows(B))
    m, n = A.shape
    if B.rows != m:
        raise ValueError("row count mismatch")
    U, D, V = smith_normal_form(A)
    UB = U @ B
    k = B.ncols
    Y = [[0] * k for _ in range(n)]
    diag = D.diagonal()
    for i in range(m):
        d = diag[i] if i < len(diag) else 0
        for j in range(k):
            b = UB.entries[i][j]
            if d == 0:
                if b:
                    return None
            else:
                if b % d:
                    return None
                Y[i][j] = b // d
    return V @ IntMatrix.from_rows(Y, k)


# ---------------------------------------------------------------------------
# Finitely generated subquotients


@dataclass(frozen=True)
class Subquotient:
    """The group ``N / Q`` for lattices ``Q <= N <= ZZ^n``.

    ``numerator`` rows span ``N``; ``denominator`` rows span ``Q``.
    After construction, :attr:`invariants` presents ``N/Q``,
    :attr:`generators` holds one representative vector per nontrivial
    cyclic factor (torsion first, then free), and :meth:`coordinates`
    maps a vector of ``N`` to its coordinates in those factors.
    """

    ambient: int
    numerator: IntMatrix
    denominator: IntMatrix
    invariants: AbelianInvariants = field(init=False)
    generators: tuple[tuple[int, ...], ...] = field(init=False)
    _basis: IntMatrix = field(init=False, repr=False)
    _transform: IntMatrix = field(init=False, repr=False)
    _orders: tuple[int, ...] = field(init=False, repr=False)
    _slots: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = self.ambient
        basis = hermite_normal_form(self.numerator, n)
        z = basis.rows
        if self.denominator.rows:
            Y = solve_integer(basis.T, self.denominator.T)
            if Y is None:
                raise ValueError("denominator is not contained in numerator")
        else:
            Y = IntMatrix.zeros(z, 0)
        if z and Y.ncols:
            U, D, _ = smith_normal_form(Y)
            diag = list(D.diagonal()) + [0] * (z - min(D.shape))
        else:
            U = IntMatrix.identity(z)
            diag = [0] * z
        # coordinates of x in N: c with basis^T c = x, then U c mod diag
        Uinv = _unimodular_inverse(U) if z else IntMatrix.zeros(0, 0)
        reps = (basis.T @ Uinv).T if z else IntMatrix.zeros(0, n)
        slots, orders = [], []
        for i, d in enumerate(diag):
            if d != 1:
                slots.append(i)
                orders.append(d)
        # torsion factors first, in increasing order, then free factors
        order_key = sorted(range(len(slots)), key=lambda s: (orders[s] == 0, orders[s], slots[s]))
        slots = [slots[s] for s in order_key]
        orders = [orders[s] for s in order_key]
        object.__setattr__(self, "_basis", basis)
        object.__setattr__(self, "_transform", U)
        object.__setattr__(self, "_slots", tuple(slots))
        object.__setattr__(self, "_orders", tuple(orders))
        object.__setattr__(self, "generators", tuple(reps.entries[s] for s in slots))
        object.__setattr__(
            self,
            "invariants",
            AbelianInvariants(sum(1 for d in orders if d == 0), tuple(d for d in orders if d)),
        )

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each generator (0 for infinite order)."""
        return self._orders

    def coordinates(self, x: Sequence[int]) -> tuple[int, ...]:
        """Coordinates of ``x`` (a vector of ``N``) on :attr:`generators`.

        Torsion coordinates are reduced into ``[0, order)``.
        """
        if self._basis.rows == 0:
            if any(x):
                raise ValueError("vector is not in the numerator lattice")
            return ()
        c = solve_integer(self._basis.T, [[v] for v in x])
        if c is None:
            raise ValueError("vector is not in the numerator lattice")
        uc = self._transform @ c
        out = []
        for s, d in zip(self._slots, self._orders):
            v = uc.entries[s][0]
            out.append(v % d if d else v)
        return tuple(out)

    def is_zero(self, x: Sequence[int]) -> bool:
        return not any(self.coordinates(x))

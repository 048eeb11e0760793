"""Independent reference computations used only by the tests.

Nothing here calls the package's lattice or cohomology code; each routine
uses a different method (minors, brute-force enumeration, closed formulas).
"""

import itertools
from math import factorial, gcd

import numpy as np


def _det(M):
    """Integer determinant by cofactor expansion (exact, small sizes only)."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        total += (-1) ** j * M[0][j] * _det(minor)
    return total


def determinantal_divisors(A):
    """Smith diagonal from gcds of k x k minors: d_k = D_k / D_{k-1}."""
    A = [list(map(int, row)) for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    out, prev = [], 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, _det([[A[i][j] for j in cols] for i in rows]))
        if g == 0:
            out += [0] * (min(m, n) - k + 1)
            break
        out.append(g // prev)
        prev = g
    return out


def weyl_order(label: str) -> int:
    kind, n = label[0], int(label[1:])
    if kind == "A":
        return factorial(n + 1)
    if kind in "BC":
        return 2 ** n * factorial(n)
    if kind == "D":
        return 2 ** (n - 1) * factorial(n)
    return {"G2": 12, "F4": 1152, "E6": 51840, "E7": 2903040, "E8": 696729600}[label]


def group_matrices(gens, mats, degree):
    """Every element with its matrix, by BFS over words in the generators."""
    rank = np.asarray(mats[0]).shape[0] if mats else 0
    ident = tuple(range(degree))
    table = {ident: np.eye(rank, dtype=np.int64)}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g, m in zip(gens, mats):
                y = tuple(g[x[i]] for i in range(degree))
                if y not in table:
                    table[y] = np.asarray(m, dtype=np.int64) @ table[x]
                    nxt.append(y)
        frontier = nxt
    return table


def fixed_count_mod(mats, n):
    """``|(M / n M)^G|`` by enumerating ``M / n M``."""
    r = mats[0].shape[0]
    count = 0
    for v in itertools.product(range(n), repeat=r):
        v = np.array(v, dtype=np.int64)
        if all(np.array_equal((m @ v) % n, v) for m in mats):
            count += 1
    return count


def fixed_rank(mats):
    """Rank of ``M^G`` over QQ."""
    r = mats[0].shape[0]
    A = np.vstack([m - np.eye(r, dtype=np.int64) for m in mats]) if mats else np.zeros((0, r))
    return r - (np.linalg.matrix_rank(A) if A.size else 0)


def h1_order(gens, mats, degree, group_order):
    """``|H^1(G, M)|`` for a lattice ``M`` from ``0 -> M -n-> M -> M/n -> 0``, ``n = |G|``.

    Since ``n`` kills ``H^1``: ``|H^1| = |(M/n)^G| / n^{rank M^G}``.
    """
    n = group_order
    if n == 1:
        return 1
    return fixed_count_mod([np.asarray(m) for m in mats], n) // n ** fixed_rank([np.asarray(m) for m in mats])


def crossed_hom_count(gens, mats, degree, n):
    """``|Z^1(G, M/n)|`` by enumerating values on generators and checking every pair."""
    table = group_matrices(gens, mats, degree)
    elems = list(table)
    r = np.asarray(mats[0]).shape[0]
    count = 0
    for vals in itertools.product(itertools.product(range(n), repeat=r), repeat=len(gens)):
        f = {tuple(range(degree)): np.zeros(r, dtype=np.int64)}
        frontier = [tuple(range(degree))]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, m, v in zip(gens, mats, vals):
                    y = tuple(g[x[i]] for i in range(degree))
                    val = (np.array(v) + np.asarray(m) @ f[x]) % n
                    if y in f:
                        if not np.array_equal(f[y], val):
                            ok = False
                            break
                    else:
                        f[y] = val
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        for a in elems:
            for b in elems:
                ab = tuple(a[b[i]] for i in range(degree))
                if not np.array_equal(f[ab], (f[a] + table[a] @ f[b]) % n):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


def h2_order(gens, mats, degree, group_order):
    """``|H^2(G, M)| = |H^1(G, M/n)| / |H^1(G, M)|`` with ``n = |G|``."""
    n = group_order
    if n == 1:
        return 1
    arrs = [np.asarray(m) for m in mats]
    r = arrs[0].shape[0]
    fixed = fixed_count_mod(arrs, n)
    h1_mod = crossed_hom_count(gens, arrs, degree, n) * fixed // n ** r
    return h1_mod // h1_order(gens, arrs, degree, group_order)

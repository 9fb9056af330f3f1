"""Pure-Python dense integer elimination; reference twin of the compiled kernel.

Plain elimination with minimal pivots is fast on the matrices homology
produces, but entries can grow exponentially on unlucky inputs.  When they
pass ``GROWTH_LIMIT`` the matrix is redone modulo a nonzero maximal minor
``D``: the product of the invariant factors divides ``D``, so each factor is
recovered as ``gcd(entry, D)`` and every entry stays below ``D``.
"""
from __future__ import annotations

from math import gcd

GROWTH_LIMIT = 1 << 62


class _Growth(Exception):
    pass


def invariant_factors(diag) -> list[int]:
    """Normalize a diagonal to the divisibility chain d1 | d2 | ... ."""
    ds = sorted(abs(d) for d in diag if d)
    n = len(ds)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                a, b = ds[i], ds[j]
                if b % a:
                    g = gcd(a, b)
                    ds[i], ds[j] = g, a // g * b
                    changed = True
        ds.sort()
    return ds


def dense_diagonal(mat: list[list[int]]) -> list[int]:
    """Reduce ``mat`` in place to diagonal form; return absolute nonzero diagonal.

    Pivot choice is the entry of minimal absolute value in the remaining block.
    The result is not yet normalized to invariant factors.
    """
    original = [row[:] for row in mat]
    try:
        return _eliminate(mat, guard=True)
    except _Growth:
        return modular_diagonal(original)


def rank_and_minor(mat: list[list[int]]) -> tuple[int, int]:
    """Rank and the absolute value of a nonzero maximal minor, by fraction-free elimination."""
    A = [row[:] for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    prev, r = 1, 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p, prow = A[r][c], A[r]
        for i in range(r + 1, m):
            row = A[i]
            a = row[c]
            for j in range(c + 1, n):
                row[j] = (p * row[j] - a * prow[j]) // prev
            row[c] = 0
        prev = p
        r += 1
        if r == m:
            break
    return r, abs(prev)


def modular_diagonal(mat: list[list[int]]) -> list[int]:
    """Invariant factors via elimination modulo a maximal minor."""
    r, D = rank_and_minor(mat)
    if r == 0:
        return []
    if D == 1:
        return [1] * r
    reduced = [[_residue(v, D) for v in row] for row in mat]
    diag = [gcd(v, D) for v in _eliminate(reduced, modulus=D)]
    # positions past the rank come out as 0 = D mod D; the chain keeps the first r
    diag += [D] * (min(len(mat), len(mat[0])) - len(diag))
    return invariant_factors(diag)[:r]


def _residue(v: int, D: int) -> int:
    v %= D
    return v - D if 2 * v > D else v


def _eliminate(mat: list[list[int]], *, modulus: int | None = None, guard: bool = False) -> list[int]:
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    diag: list[int] = []
    t = 0
    while t < nrows and t < ncols:
        best = 0
        bi = bj = -1
        for i in range(t, nrows):
            row = mat[i]
            for j in range(t, ncols):
                v = row[j]
                if v:
                    av = v if v > 0 else -v
                    if best == 0 or av < best:
                        best, bi, bj = av, i, j
                        if av == 1:
                            break
            if best == 1:
                break
        if best == 0:
            break
        if bi != t:
            mat[t], mat[bi] = mat[bi], mat[t]
        if bj != t:
            for row in mat:
                row[t], row[bj] = row[bj], row[t]
        while True:
            piv = mat[t][t]
            moved = False
            prow = mat[t]
            for i in range(t + 1, nrows):
                row = mat[i]
                v = row[t]
                if v:
                    q = v // piv
                    if q:
                        for j in range(t, ncols):
                            if prow[j]:
                                row[j] -= q * prow[j]
                        if modulus:
                            mat[i] = row = [_residue(x, modulus) for x in row]
                        elif guard and (max(row) > GROWTH_LIMIT or min(row) < -GROWTH_LIMIT):
                            raise _Growth
                    if row[t]:
                        mat[t], mat[i] = mat[i], mat[t]
                        moved = True
                        break
            if moved:
                continue
            piv = mat[t][t]
            prow = mat[t]
            for j in range(t + 1, ncols):
                v = prow[j]
                if v:
                    q = v // piv
                    if q:
                        for i in range(t, nrows):
                            if mat[i][t]:
                                x = mat[i][j] - q * mat[i][t]
                                if modulus:
                                    x = _residue(x, modulus)
                                elif guard and not -GROWTH_LIMIT <= x <= GROWTH_LIMIT:
                                    raise _Growth
                                mat[i][j] = x
                    if prow[j]:
                        for row in mat:
                            row[t], row[j] = row[j], row[t]
                        moved = True
                        break
            if not moved:
                break
        p = mat[t][t]
        diag.append(p if p > 0 else -p)
        t += 1
    return diag

"""Dense reference computations, independent of the sparse kernel.

Rational ranks come from fraction-exact Gaussian elimination; torsion from a
textbook Smith normal form on dense integer matrices.  Both are slow and only
meant for cross-checking small complexes.
"""
from __future__ import annotations

from fractions import Fraction

from .complexes import FreeComplex, HomologyRecord


def dense_matrix(C: FreeComplex, p: int) -> list[list[int]]:
    """Rows indexed by ``C^{p+1}``, columns by ``C^p``, in sorted-repr order."""
    cols = sorted(C.gens(p), key=repr)
    rows = sorted(C.gens(p + 1), key=repr)
    at = {g: i for i, g in enumerate(rows)}
    M = [[0] * len(cols) for _ in rows]
    for j, g in enumerate(cols):
        for h, x in C.d.get(g, {}).items():
            M[at[h]][j] = x
    return M


def rational_rank(M: list[list[int]]) -> int:
    A = [[Fraction(x) for x in row] for row in M]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(A)) if A[r][c] != 0), None)
        if pivot is None:
            continue
        A[rank], A[pivot] = A[pivot], A[rank]
        for r in range(len(A)):
            if r != rank and A[r][c] != 0:
                f = A[r][c] / A[rank][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def naive_snf(M: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form, by repeated row/column gcd steps."""
    A = [list(row) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // A[t][t]
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                if A[i][t]:
                    A[t], A[i] = A[i], A[t]
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    for row in A:
                        row[t], row[j] = row[j], row[t]
                    done = False
            if done:
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]), None)
                if bad is not None:
                    A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                    done = False
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def betti_numbers(C: FreeComplex) -> dict[int, int]:
    """Rational betti numbers per degree."""
    ranks = {p: rational_rank(dense_matrix(C, p)) for p in C.degrees()}
    return {p: C.rank(p) - ranks.get(p, 0) - ranks.get(p - 1, 0) for p in C.degrees()}


def homology(C: FreeComplex) -> list[HomologyRecord]:
    """Integral homology via the naive Smith form."""
    divs = {p: naive_snf(dense_matrix(C, p)) for p in C.degrees()}
    out = []
    for p in C.degrees():
        inc = divs.get(p - 1, [])
        out.append(HomologyRecord(p, C.rank(p) - len(divs[p]) - len(inc), tuple(sorted(x for x in inc if x > 1))))
    return out

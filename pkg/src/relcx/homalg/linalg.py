"""Exact integer linear algebra on sparse matrices.

Matrices are dicts ``{col: {row: value}}`` over arbitrary hashable row and
column keys, with zero entries never stored.  Homology-sized questions (rank,
elementary divisors, kernels, solvability) are answered per connected block of
the nonzero pattern, which keeps the dense work small.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable

from . import _kernel
from ._snf_py import invariant_factors

SparseCols = dict  # {col: {row: int}}

DENSE_LIMIT = 160


def blocks(cols: SparseCols) -> list[tuple[list, list]]:
    """Connected components of the bipartite row/column incidence graph.

    Returns ``(rows, cols)`` pairs; columns without entries are omitted.
    """
    parent: dict = {}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for c, col in cols.items():
        if not col:
            continue
        ck = ("c", c)
        parent.setdefault(ck, ck)
        rc = find(ck)
        for r in col:
            rk = ("r", r)
            if rk not in parent:
                parent[rk] = rc
            else:
                rr = find(rk)
                if rr != rc:
                    parent[rr] = rc
    groups: dict = {}
    for key in parent:
        root = find(key)
        rows, cs = groups.setdefault(root, ([], []))
        (rows if key[0] == "r" else cs).append(key[1])
    return list(groups.values())


def _sparse_unit_eliminate(rows: list[dict]) -> tuple[int, list[dict]]:
    """Eliminate with +-1 pivots while possible; returns (pivots used, leftover rows)."""
    colrows: dict = {}
    for i, row in enumerate(rows):
        for c in row:
            colrows.setdefault(c, set()).add(i)
    alive = set(i for i, r in enumerate(rows) if r)
    rank = 0
    while True:
        best = None
        for i in sorted(alive, key=lambda k: len(rows[k])):
            row = rows[i]
            cand = [c for c, v in row.items() if v == 1 or v == -1]
            if cand:
                c = min(cand, key=lambda k: len(colrows[k]))
                best = (i, c)
                break
        if best is None:
            break
        pi, pc = best
        prow = rows[pi]
        pv = prow[pc]
        for i in list(colrows[pc]):
            if i == pi:
                continue
            row = rows[i]
            f = row[pc] * pv
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    if c not in row:
                        colrows[c].add(i)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    colrows[c].discard(i)
            if not row:
                alive.discard(i)
        for c in prow:
            colrows[c].discard(pi)
        rows[pi] = {}
        alive.discard(pi)
        rank += 1
        # drop the pivot column from every remaining row (already zero there)
        colrows.pop(pc, None)
    return rank, [rows[i] for i in sorted(alive)]


def _dense_block_diagonal(rows: list[dict]) -> list[int]:
    cols = sorted({c for r in rows for c in r}, key=repr)
    cidx = {c: j for j, c in enumerate(cols)}
    mat = [[0] * len(cols) for _ in rows]
    for i, r in enumerate(rows):
        for c, v in r.items():
            mat[i][cidx[c]] = v
    if len(rows) > len(cols):
        mat = [list(x) for x in zip(*mat)]
    return _kernel.dense_diagonal(mat)


def elementary_divisors(cols: SparseCols) -> list[int]:
    """Nonzero invariant factors of the matrix (length = rank)."""
    out: list[int] = []
    for rws, cs in blocks(cols):
        rowid = {r: i for i, r in enumerate(rws)}
        rows = [dict() for _ in rws]
        for c in cs:
            for r, v in cols[c].items():
                rows[rowid[r]][c] = v
        if len(rws) > DENSE_LIMIT and len(cs) > DENSE_LIMIT:
            k, rows = _sparse_unit_eliminate(rows)
            out.extend([1] * k)
            rows = [r for r in rows if r]
        if rows:
            out.extend(_dense_block_diagonal(rows))
    return invariant_factors(out)


def rank(cols: SparseCols) -> int:
    return len(elementary_divisors(cols))


# ---------------------------------------------------------------- dense tools


def _dense(cols: SparseCols, rows: list, cs: list) -> list[list[int]]:
    rowid = {r: i for i, r in enumerate(rows)}
    mat = [[0] * len(cs) for _ in rows]
    for j, c in enumerate(cs):
        for r, v in cols.get(c, {}).items():
            mat[rowid[r]][j] = v
    return mat


class ColumnEchelon:
    """Column-Hermite reduction ``H = A V`` with ``V`` unimodular.

    Pivot ``k`` sits at row ``pivot_rows[k]`` in column ``k``; columns past the
    last pivot are zero, so the matching columns of ``V`` span the kernel.
    """

    def __init__(self, mat: list[list[int]], ncols: int):
        a = [row[:] for row in mat]
        v = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
        t = 0
        pivots: list[int] = []
        for i in range(len(a)):
            if t >= ncols:
                break
            while True:
                nz = [j for j in range(t, ncols) if a[i][j]]
                if not nz:
                    break
                j0 = min(nz, key=lambda j: abs(a[i][j]))
                if j0 != t:
                    for row in a:
                        row[t], row[j0] = row[j0], row[t]
                    for row in v:
                        row[t], row[j0] = row[j0], row[t]
                piv = a[i][t]
                done = True
                for j in range(t + 1, ncols):
                    if a[i][j]:
                        q = a[i][j] // piv
                        for row in a:
                            if row[t]:
                                row[j] -= q * row[t]
                        for row in v:
                            if row[t]:
                                row[j] -= q * row[t]
                        if a[i][j]:
                            done = False
                if done:
                    pivots.append(i)
                    t += 1
                    break
        self.h = a
        self.v = v
        self.ncols = ncols
        self.pivot_rows = pivots

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def kernel(self) -> list[list[int]]:
        n, t = self.ncols, self.rank
        return [[self.v[r][j] for r in range(n)] for j in range(t, n)]

    def solve(self, b: list[int], rational: bool = False):
        """Solution of ``A x = b`` (list) or None; Fractions allowed when ``rational``."""
        h = self.h
        y: list = []
        for k, r in enumerate(self.pivot_rows):
            acc = b[r] - sum(h[r][j] * y[j] for j in range(k))
            piv = h[r][k]
            if rational:
                y.append(Fraction(acc, piv))
            else:
                if acc % piv:
                    return None
                y.append(acc // piv)
        for i in range(len(h)):
            if sum(h[i][j] * y[j] for j in range(len(y))) != b[i]:
                return None
        return [sum(self.v[r][j] * y[j] for j in range(len(y))) for r in range(self.ncols)]


def hermite_kernel(mat: list[list[int]], ncols: int) -> list[list[int]]:
    """Integer basis of the right kernel of ``mat`` (a saturated lattice)."""
    return ColumnEchelon(mat, ncols).kernel()


class BlockSolver:
    """Solve ``M x = b`` for many right-hand sides, one echelon per block."""

    def __init__(self, cols: SparseCols):
        self.cols = cols
        self._blocks = blocks(cols)
        self._row_block = {}
        for bi, (rws, _) in enumerate(self._blocks):
            for r in rws:
                self._row_block[r] = bi
        self._echelons: dict[int, ColumnEchelon] = {}

    def _echelon(self, bi: int) -> ColumnEchelon:
        e = self._echelons.get(bi)
        if e is None:
            rws, cs = self._blocks[bi]
            e = ColumnEchelon(_dense(self.cols, rws, cs), len(cs))
            self._echelons[bi] = e
        return e

    def solve(self, rhs: dict, rational: bool = False):
        """Dict solution, or None when none exists over the integers (or rationals)."""
        touched: dict[int, None] = {}
        for r, v in rhs.items():
            if not v:
                continue
            bi = self._row_block.get(r)
            if bi is None:
                return None
            touched[bi] = None
        out: dict = {}
        for bi in touched:
            rws, cs = self._blocks[bi]
            x = self._echelon(bi).solve([rhs.get(r, 0) for r in rws], rational)
            if x is None:
                return None
            for c, v in zip(cs, x):
                if v:
                    out[c] = v
        return out


def solve_sparse(cols: SparseCols, rhs: dict) -> dict | None:
    return BlockSolver(cols).solve(rhs)


def solvable_rational(cols: SparseCols, rhs: dict) -> bool:
    return BlockSolver(cols).solve(rhs, rational=True) is not None


def kernel_sparse(cols: SparseCols, domain: Iterable) -> list[dict]:
    """Integer basis of the kernel of the matrix restricted to ``domain`` columns."""
    domain = list(domain)
    basis: list[dict] = []
    present = set()
    for rws, cs in blocks({c: cols.get(c, {}) for c in domain}):
        present.update(cs)
        for k in hermite_kernel(_dense(cols, rws, cs), len(cs)):
            vec = {c: v for c, v in zip(cs, k) if v}
            if vec:
                basis.append(vec)
    for c in domain:
        if c not in present:
            basis.append({c: 1})
    return basis

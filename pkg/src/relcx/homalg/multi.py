"""Multigraded complexes in both sign conventions, partial totalization and products.

A ``MultiComplex`` of arity n assigns a multidegree in Z^n to each generator
and carries n differentials.  In the ANTICOMMUTING convention distinct
differentials anticommute; in the COMMUTING ("quoted") convention they commute,
and totalization inserts the sign (-1)^{deg_1 + ... + deg_{k-1}} in front of
d_k before summing.
"""
from __future__ import annotations

from enum import Enum
from itertools import product as iproduct
from typing import Mapping, Sequence

from ..ordsets import FiniteOrderedSet, InvalidArgument, OrderedSurjection
from .complexes import ChainMap, FreeComplex, InvalidComplex, apply_table, tensor, tensor_maps, vclean


class Convention(Enum):
    COMMUTING = "commuting"
    ANTICOMMUTING = "anticommuting"


class MultiComplex:
    def __init__(
        self,
        degree: Mapping,
        diffs: Sequence[Mapping],
        convention: Convention = Convention.COMMUTING,
        *,
        validate: bool = True,
        name: str = "",
    ):
        self.degree = {g: tuple(p) for g, p in degree.items()}
        self.diffs = [{g: vclean(v) for g, v in d.items() if v} for d in diffs]
        self.convention = convention
        self.name = name
        if validate:
            self.validate()

    @property
    def arity(self) -> int:
        return len(self.diffs)

    def apply(self, k: int, v: Mapping) -> dict:
        return apply_table(self.diffs[k], v)

    def validate(self) -> None:
        n = self.arity
        for g, p in self.degree.items():
            if len(p) != n:
                raise InvalidComplex(f"{self.name}: generator {g!r} has multidegree of length {len(p)}")
        for k, d in enumerate(self.diffs):
            for g, img in d.items():
                p = self.degree.get(g)
                if p is None:
                    raise InvalidComplex(f"{self.name}: d_{k + 1} defined on unknown generator {g!r}")
                want = p[:k] + (p[k] + 1,) + p[k + 1 :]
                for h in img:
                    if self.degree.get(h) != want:
                        raise InvalidComplex(f"{self.name}: d_{k + 1}({g!r}) has wrong multidegree at {h!r}")
        sign = 1 if self.convention is Convention.COMMUTING else -1
        for g in self.degree:
            for k in range(n):
                dk = self.diffs[k].get(g, {})
                if self.apply(k, dk):
                    raise InvalidComplex(f"{self.name}: d_{k + 1}^2 != 0 at {g!r}")
                for l in range(k + 1, n):
                    dl = self.diffs[l].get(g, {})
                    a = self.apply(l, dk)
                    b = self.apply(k, dl)
                    for h in set(a) | set(b):
                        if a.get(h, 0) != sign * b.get(h, 0):
                            raise InvalidComplex(
                                f"{self.name}: d_{k + 1}, d_{l + 1} violate the {self.convention.value} relation at {g!r}"
                            )

    def total(self, name: str = "") -> FreeComplex:
        """The single total complex."""
        flat = totalize(self, [0] * self.arity) if self.arity != 1 else self
        return FreeComplex({g: p[0] for g, p in flat.degree.items()}, flat.diffs[0] if flat.diffs else {}, name=name or self.name, validate=False)

    def anticommuting(self) -> "MultiComplex":
        """Same data viewed in the anticommuting convention."""
        if self.convention is Convention.ANTICOMMUTING:
            return self
        diffs = []
        for k, d in enumerate(self.diffs):
            nd = {}
            for g, img in d.items():
                s = -1 if sum(self.degree[g][:k]) % 2 else 1
                nd[g] = {h: s * x for h, x in img.items()}
            diffs.append(nd)
        return MultiComplex(self.degree, diffs, Convention.ANTICOMMUTING, validate=False, name=self.name)


def _fibers(f, n: int) -> list[int]:
    """Normalize ``f`` to a list mapping coordinate k to its block index (0-based)."""
    if isinstance(f, OrderedSurjection):
        src = f.source.elements
        if len(src) != n:
            raise InvalidArgument("surjection source size differs from the arity")
        tgt = f.target
        return [tgt.position(f(x)) for x in src]
    blocks = list(f)
    if len(blocks) != n:
        raise InvalidArgument("block assignment length differs from the arity")
    if blocks and (blocks[0] != 0 or any(b - a not in (0, 1) for a, b in zip(blocks, blocks[1:]))):
        raise InvalidArgument(f"{blocks} is not an order-preserving surjection onto an initial segment")
    return blocks


def totalize(M: MultiComplex, f) -> MultiComplex:
    """Partial totalization along an order-preserving surjection of coordinates.

    ``f`` is an ``OrderedSurjection`` on positions or a list of 0-based block
    indices.  The result keeps the input's convention.
    """
    blocks = _fibers(f, M.arity)
    m = (max(blocks) + 1) if blocks else 0
    quoted = M.convention is Convention.COMMUTING
    degree = {}
    for g, p in M.degree.items():
        q = [0] * m
        for k, b in enumerate(blocks):
            q[b] += p[k]
        degree[g] = tuple(q)
    diffs = [dict() for _ in range(m)]
    for k, d in enumerate(M.diffs):
        b = blocks[k]
        for g, img in d.items():
            s = 1
            if quoted:
                before = sum(M.degree[g][j] for j in range(k) if blocks[j] == b)
                s = -1 if before % 2 else 1
            acc = diffs[b].setdefault(g, {})
            for h, x in img.items():
                y = acc.get(h, 0) + s * x
                if y:
                    acc[h] = y
                else:
                    acc.pop(h, None)
    return MultiComplex(degree, diffs, M.convention, validate=False, name=M.name)


def from_complex(C: FreeComplex) -> MultiComplex:
    return MultiComplex({g: (p,) for g, p in C.degree.items()}, [C.d], validate=False, name=C.name)


def tensor_as_multi(*factors: FreeComplex) -> MultiComplex:
    """Tensor product as a quoted multicomplex in reversed grading order.

    Coordinate k carries the degree of factor n-k, so totalizing reproduces
    ``complexes.tensor``.
    """
    n = len(factors)
    degree: dict = {}
    diffs = [dict() for _ in range(n)]
    lists = [list(C.degree.items()) for C in factors]
    for combo in iproduct(*lists):
        g = tuple(x for x, _ in combo)
        degree[g] = tuple(combo[n - 1 - k][1] for k in range(n))
        for k in range(n):
            i = n - 1 - k
            di = factors[i].d.get(g[i])
            if di:
                diffs[k][g] = {g[:i] + (h,) + g[i + 1 :]: x for h, x in di.items()}
    return MultiComplex(degree, diffs, Convention.COMMUTING, validate=False)


def dtimes(A: MultiComplex, B: MultiComplex, name: str = "") -> MultiComplex:
    """Product of two quoted double complexes; generators are pairs ``(a, b)``."""
    for X in (A, B):
        if X.arity != 2 or X.convention is not Convention.COMMUTING:
            raise InvalidArgument("dtimes needs quoted double complexes")
    degree: dict = {}
    d1: dict = {}
    d2: dict = {}
    for (ga, (a, p)), (gb, (b, q)) in iproduct(A.degree.items(), B.degree.items()):
        g = (ga, gb)
        degree[g] = (a + b, p + q)
        for k, (tgt, sgn) in enumerate(((d1, -1 if b % 2 else 1), (d2, -1 if q % 2 else 1))):
            img: dict = {}
            for h, x in (A.diffs[k].get(ga) or {}).items():
                img[(h, gb)] = sgn * x
            for h, x in (B.diffs[k].get(gb) or {}).items():
                img[(ga, h)] = img.get((ga, h), 0) + x
            img = vclean(img)
            if img:
                tgt[g] = img
    return MultiComplex(degree, [d1, d2], Convention.COMMUTING, validate=True, name=name)


def u_iso(A: MultiComplex, B: MultiComplex, E: MultiComplex | None = None) -> ChainMap:
    """``Tot(A) ⊗ Tot(B) -> Tot(A × B)``, the sign (-1)^{aq} on A^{a,p} ⊗ B^{b,q}."""
    E = E or dtimes(A, B)
    src = tensor(A.total(), B.total(), name="Tot(A)⊗Tot(B)")
    tgt = E.total(name="Tot(A×B)")
    table = {}
    for ga, gb in src.degree:
        a = A.degree[ga][0]
        q = B.degree[gb][1]
        table[(ga, gb)] = {(ga, gb): -1 if (a * q) % 2 else 1}
    return ChainMap(src, tgt, table, name="u")


def u_coherence_witness(A: MultiComplex, B: MultiComplex, C: MultiComplex):
    """First generator where ``u_{A×B,C}(u_{A,B} ⊗ 1)`` and ``u_{A,B×C}(1 ⊗ u_{B,C})`` disagree.

    Both composites are compared on ``Tot A ⊗ Tot B ⊗ Tot C`` after identifying
    ``((a, b), c)`` with ``(a, (b, c))``.  Returns None when the square commutes.
    """
    AB, BC = dtimes(A, B), dtimes(B, C)
    uAB, uBC = u_iso(A, B, AB), u_iso(B, C, BC)
    uAB_C, uA_BC = u_iso(AB, C), u_iso(A, BC)
    tA, tB, tC = A.total(), B.total(), C.total()
    left_src = tensor(uAB.src, tC)
    right_src = tensor(tA, uBC.src)
    idA = ChainMap.identity(tA)
    idC = ChainMap.identity(tC)
    left = uAB_C @ tensor_maps([uAB, idC], left_src, uAB_C.src)
    right = uA_BC @ tensor_maps([idA, uBC], right_src, uA_BC.src)
    for (a, b), c in left_src.degree:
        lhs = {((x, y), z): v for ((x, y), z), v in left.image(((a, b), c)).items()}
        rhs = {((x, y), z): v for (x, (y, z)), v in right.image((a, (b, c))).items()}
        if lhs != rhs:
            return (a, b, c)
    return None

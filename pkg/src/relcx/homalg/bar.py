"""Bar complex of an interval-indexed family of complexes with associative products.

A ``BarSystem`` assigns a complex ``A(I)`` to every sub-interval of length at
least two and a product ``A(I') ⊗ A(I'') -> A(I' ∪ I'')`` to every two-piece
segmentation.  The bar complex sums the tensor products over all
segmentations.  Generators are ``(sigma, (g_1, ..., g_c))`` where ``sigma`` is
the tuple of cut points.
"""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Mapping

from ..ordsets import FiniteOrderedSet, InvalidArgument, segment, subsets
from .complexes import ChainMap, FreeComplex, InvalidComplex, tensor, vadd

Key = tuple  # (init label, term label)


def _key(I: FiniteOrderedSet) -> Key:
    return (I.init, I.term)


class BarSystem:
    """Complexes on sub-intervals plus associative binary products."""

    def __init__(
        self,
        parent: FiniteOrderedSet,
        complexes: Mapping[Key, FreeComplex],
        product: Callable[[Key, Key, object, object], Mapping],
        *,
        validate: bool = True,
    ):
        if len(parent) < 2:
            raise InvalidArgument("bar systems need at least two indices")
        self.parent = parent
        self.complexes = dict(complexes)
        self._product = product
        self.products: dict = {}
        for I in self.intervals():
            if _key(I) not in self.complexes:
                raise InvalidArgument(f"no complex assigned to {I!r}")
        for I in self.intervals():
            for k in I.interior():
                L, R = I.interval(I.init, k), I.interval(k, I.term)
                src = tensor(self.A(L), self.A(R))
                table = {}
                for g1, g2 in src.degree:
                    img = product(_key(L), _key(R), g1, g2)
                    if img:
                        table[(g1, g2)] = dict(img)
                self.products[(_key(L), _key(R))] = ChainMap(src, self.A(I), table, validate=validate, name=f"rho{_key(L)}{_key(R)}")
        if validate:
            self.check_associative()

    def intervals(self) -> list[FiniteOrderedSet]:
        els = self.parent.elements
        return [FiniteOrderedSet(els[a : b + 1]) for a in range(len(els)) for b in range(a + 1, len(els))]

    def A(self, I: FiniteOrderedSet) -> FreeComplex:
        return self.complexes[_key(I)]

    def multiply(self, L: Key, R: Key, v1: Mapping, v2: Mapping) -> dict:
        rho = self.products[(L, R)]
        out: dict = {}
        for g1, x in v1.items():
            for g2, y in v2.items():
                vadd(out, rho.image((g1, g2)), x * y)
        return out

    def check_associative(self) -> None:
        for I in self.intervals():
            for a, b in combinations(I.interior(), 2):
                P, Q, R = I.interval(I.init, a), I.interval(a, b), I.interval(b, I.term)
                PQ, QR = I.interval(I.init, b), I.interval(a, I.term)
                for g1 in self.A(P).degree:
                    for g2 in self.A(Q).degree:
                        left = self.multiply(_key(P), _key(Q), {g1: 1}, {g2: 1})
                        for g3 in self.A(R).degree:
                            lhs = self.multiply(_key(PQ), _key(R), left, {g3: 1})
                            right = self.multiply(_key(Q), _key(R), {g2: 1}, {g3: 1})
                            rhs = self.multiply(_key(P), _key(QR), {g1: 1}, right)
                            if lhs != rhs:
                                raise InvalidComplex(f"product not associative on {I!r} at {(g1, g2, g3)!r}")


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def bar_complex(system: BarSystem, I: FiniteOrderedSet | None = None, S=(), name: str = "") -> FreeComplex:
    """``B(I|S)``: summands with cut set containing ``S``, differential d̄ + ρ̄."""
    I = I or system.parent
    S = set(S)
    if not S <= set(I.interior()):
        raise InvalidArgument(f"{sorted(S)} is not inside the interior of {I!r}")
    degree: dict = {}
    d: dict = {}
    free = [k for k in I.interior() if k not in S]
    for extra in subsets(free):
        sigma = I.sort(S | set(extra))
        pieces = segment(I, sigma)
        cs = [system.A(P) for P in pieces]
        for gens in _product(cs):
            eps = [c.degree[g] - 1 for c, g in zip(cs, gens)]
            key = (sigma, gens)
            degree[key] = sum(eps)
            img: dict = {}
            # d̄
            for i, (c, g) in enumerate(zip(cs, gens)):
                s = -_sign(sum(eps[i + 1 :]))
                for h, x in c.d.get(g, {}).items():
                    k2 = (sigma, gens[:i] + (h,) + gens[i + 1 :])
                    img[k2] = img.get(k2, 0) + s * x
            # ρ̄: merge pieces i-1 and i at their shared cut point
            for i in range(1, len(pieces)):
                k = pieces[i].init
                if k in S:
                    continue
                s = _sign(sum(eps[i:]))
                prod = system.multiply(_key(pieces[i - 1]), _key(pieces[i]), {gens[i - 1]: 1}, {gens[i]: 1})
                new_sigma = tuple(x for x in sigma if x != k)
                for h, x in prod.items():
                    k2 = (new_sigma, gens[: i - 1] + (h,) + gens[i + 1 :])
                    img[k2] = img.get(k2, 0) + s * x
            img = {h: x for h, x in img.items() if x}
            if img:
                d[key] = img
    return FreeComplex(degree, d, name=name or f"B({I!r}|{sorted(S)})")


def _product(cs):
    out = [()]
    for c in cs:
        out = [t + (g,) for t in out for g in c.degree]
    return out


def bar_quotient(system: BarSystem, S, I: FiniteOrderedSet | None = None) -> FreeComplex:
    return bar_complex(system, I, S)


def bar_tau(system: BarSystem, S, S2, I: FiniteOrderedSet | None = None) -> ChainMap:
    """The quotient map ``B(I|S) -> B(I|S2)`` for ``S ⊆ S2``."""
    if not set(S) <= set(S2):
        raise InvalidArgument("tau needs S ⊆ S′")
    src = bar_complex(system, I, S)
    tgt = bar_complex(system, I, S2)
    table = {g: {g: 1} for g in src.degree if g in tgt.degree}
    return ChainMap(src, tgt, table, name="tau")


def graded_piece(system: BarSystem, k: int, I: FiniteOrderedSet | None = None) -> FreeComplex:
    """Subquotient on the summands with exactly ``k`` cut points, differential d̄ only."""
    I = I or system.parent
    B = bar_complex(system, I)
    keep = [g for g in B.degree if len(g[0]) == k]
    return B.restrict_to(keep, check="quotient", name=f"Gr^{k}")

"""Function complexes of a sequence of finite varieties.

For an interval ``I`` and ``J ⊆ interior(I)`` the space ``X^J_I`` is the product
of the ``X_i`` with the interior factors outside ``J`` replaced by their
compactifications.  The closed set ``A_I`` is the locus where all coordinates
lie over one base point; its complement is covered by the opens ``U_{J^t}``
attached to the segments of ``I`` cut at ``J``.  The Čech complex of that
covering is ``ℱ(I, J)``, with generators ``(chain, point)``.

Assembled complexes use these generator shapes:

* ``ℱ(I)``: ``(J, (chain, point))`` in degree ``|J| + 1 + len(chain)``.
* ``ℱ(I, J | Σ)``: tuples of ``(chain, point)``, one per Σ-segment.
* ``ℱ(I | Σ)``: tuples of ``ℱ(I_j)`` generators.
* ``F(I | S)``: ``(Σ, gens)`` with ``gens`` a ``ℱ(I | Σ)`` generator.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .cech import CechComplex, Constraint, Covering, distinguished, point_cech, refine
from .geomodel import PointModel, Variety
from .homalg.bar import BarSystem, bar_complex, graded_piece
from .homalg import linalg
from .homalg.complexes import (
    ChainMap,
    FreeComplex,
    InvalidComplex,
    ZigZag,
    direct_sum,
    equal_on_homology,
    tensor,
    vadd,
)
from .ordsets import FiniteOrderedSet, InvalidArgument, segment, subsets


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def _key(I: FiniteOrderedSet) -> tuple:
    return (I.init, I.term)


def _sub(I: FiniteOrderedSet, xs: Iterable) -> tuple:
    xs = set(xs)
    return tuple(x for x in I if x in xs)


# ---------------------------------------------------------------- cube totalization


def lemma_tot(T: Sequence, complexes: Mapping, step: Callable, *, offset: int = 0, check: bool = True,
              name: str = "Tot") -> FreeComplex:
    """Total complex of a cube of complexes indexed by subsets of ``T``.

    ``complexes[S]`` is keyed by subsets as tuples in ``T`` order;
    ``step(S, k)`` is the map ``C_S -> C_{S ∪ {k}}``.  Generators are
    ``(S, g)`` in degree ``|S| + offset + deg g`` with differential
    ``Σ_k (-1)^{|S_{>k}|} f_{S,S∪k} + (-1)^{|S|+offset} d``.
    """
    T = tuple(T)
    pos = {t: i for i, t in enumerate(T)}
    maps = {}
    for S in subsets(T):
        for k in T:
            if k not in S:
                maps[(S, k)] = step(S, k)
    if check:
        for S in subsets(T):
            rest = [k for k in T if k not in S]
            for k, l in combinations(rest, 2):
                Sk = tuple(sorted(S + (k,), key=pos.get))
                Sl = tuple(sorted(S + (l,), key=pos.get))
                a = maps[(Sk, l)] @ maps[(S, k)]
                b = maps[(Sl, k)] @ maps[(S, l)]
                if not a.same_as(b):
                    raise InvalidArgument(f"cube is not functorial at {S} with {k}, {l}: {a.difference_witness(b)!r}")
    degree: dict = {}
    d: dict = {}
    for S in subsets(T):
        C = complexes[S]
        a = len(S) + offset
        s_inner = _sign(a)
        for g, q in C.degree.items():
            key = (S, g)
            degree[key] = a + q
            img: dict = {}
            for h, x in C.d.get(g, {}).items():
                img[(S, h)] = s_inner * x
            for k in T:
                if k in S:
                    continue
                S2 = tuple(sorted(S + (k,), key=pos.get))
                s = _sign(sum(1 for t in S if pos[t] > pos[k]))
                for h, x in maps[(S, k)].table.get(g, {}).items():
                    img[(S2, h)] = img.get((S2, h), 0) + s * x
            img = {h: x for h, x in img.items() if x}
            if img:
                d[key] = img
    return FreeComplex(degree, d, name=name, validate=check)


# ---------------------------------------------------------------- the bundle


class FunctionComplexes:
    """All function complexes of one point-model sequence, built lazily and cached."""

    def __init__(self, model: PointModel, *, check: bool = True):
        self.model = model
        self.check = check
        self._cache: dict = {}
        self._bases: dict = {}

    # -- helpers
    def _memo(self, key, build):
        v = self._cache.get(key)
        if v is None:
            v = build()
            self._cache[key] = v
        return v

    def interval(self, I=None) -> FiniteOrderedSet:
        if I is None:
            return self.model.order
        if isinstance(I, FiniteOrderedSet):
            return I
        return FiniteOrderedSet(tuple(I))

    def _check_sub(self, I: FiniteOrderedSet, xs, what: str) -> tuple:
        xs = tuple(xs)
        inner = set(I.interior())
        bad = [x for x in xs if x not in inner]
        if bad:
            raise InvalidArgument(f"{what} {bad!r} not inside the interior of {I!r}")
        return _sub(I, xs)

    def _base(self, i, p):
        b = self._bases.get(i)
        if b is None:
            b = self.model.variety(i).base_map
            self._bases[i] = b
        return b[p]

    def segments(self, I, J=()) -> list[FiniteOrderedSet]:
        I = self.interval(I)
        return segment(I, J)

    # -- spaces
    def space(self, I, J=()) -> list[tuple]:
        """Points of ``X^J_I``."""
        I = self.interval(I)
        J = set(J)
        return self.model.product_space(I, [i for i in I.interior() if i not in J])

    def closed_set(self, I) -> list[tuple]:
        """``A_I``: points of ``X^J_I`` with all coordinates over one base point."""
        I = self.interval(I)
        return [x for x in self.space(I, I.interior()) if self._agree(I, x, I)]

    def _agree(self, I: FiniteOrderedSet, x: tuple, seg: FiniteOrderedSet) -> bool:
        a, b = I.position(seg.init), I.position(seg.term)
        bases = {self._base(I[t], x[t]) for t in range(a, b + 1)}
        return len(bases) <= 1

    def covering_of(self, I, J=()) -> Covering:
        """``U(J)``: opens ``U_{J^t}`` of ``X^J_I`` indexed by ``0..r``."""
        I = self.interval(I)
        J = self._check_sub(I, J, "J")
        if len(I) < 2:
            raise InvalidArgument("function complexes need |I| >= 2")

        def build():
            segs = segment(I, J)
            pts = self.space(I, J)
            opens = tuple(frozenset(x for x in pts if not self._agree(I, x, seg)) for seg in segs)
            return Covering(tuple(pts), FiniteOrderedSet.range(0, len(segs) - 1), opens)

        return self._memo(("cov", I.elements, J), build)

    # -- ℱ(I, J)
    def fcal(self, I, J=()) -> CechComplex:
        I = self.interval(I)
        J = self._check_sub(I, J, "J")

        def build():
            C = point_cech(self.covering_of(I, J), name=f"F({I!r},{set(J) or '∅'})")
            if self.check:
                C.complex.validate()
            return C

        return self._memo(("fcal", I.elements, J), build)

    def iota(self, I, J=()) -> ChainMap:
        """``Z(A_I) -> ℱ(I, J)``."""
        I = self.interval(I)
        C = self.fcal(I, J)
        A = self.closed_set(I)
        ZA = FreeComplex({x: 0 for x in A}, {}, validate=False, name=f"Z(A{I!r})")
        return ChainMap(ZA, C.complex, {x: {((), x): 1} for x in A}, validate=self.check, name="iota")

    def fcal_restrict(self, I, J, J2) -> ChainMap:
        """``r_{J,J'}: ℱ(I, J) -> ℱ(I, J')`` for ``J ⊆ J'``."""
        I = self.interval(I)
        J = self._check_sub(I, J, "J")
        J2 = self._check_sub(I, J2, "J'")
        if not set(J) <= set(J2):
            raise InvalidArgument("restriction needs J ⊆ J'")

        def build():
            segs = segment(I, J)
            segs2 = segment(I, J2)
            lam = {}
            for t2, s2 in enumerate(segs2):
                for t, s in enumerate(segs):
                    if I.position(s.init) <= I.position(s2.init) and I.position(s2.term) <= I.position(s.term):
                        lam[t2] = t
                        break
            return refine(self.fcal(I, J), self.fcal(I, J2), lam, check=self.check)

        return self._memo(("r", I.elements, J, J2), build)

    def fcal_project(self, I, J, K) -> ChainMap:
        """``π_K: ℱ(I, J) -> ℱ(I - K, J)``: restrict to the preimage covering, then push forward."""
        I = self.interval(I)
        J = self._check_sub(I, J, "J")
        K = self._check_sub(I, K, "K")
        if set(J) & set(K):
            raise InvalidArgument("π_K needs K disjoint from J")

        def build():
            src = self.fcal(I, J)
            if not K:
                return ChainMap.identity(src.complex)
            I2 = I.remove(K)
            tgt = self.fcal(I2, J)
            keep = [t for t, i in enumerate(I) if i not in K]
            table = {}
            tdeg = tgt.complex.degree
            for g in src.complex.degree:
                chain, x = g
                h = (chain, tuple(x[t] for t in keep))
                if h in tdeg:
                    table[g] = {h: 1}
            return ChainMap(src.complex, tgt.complex, table, validate=self.check, name=f"pi{K}")

        return self._memo(("pi", I.elements, J, K), build)

    # -- ℱ(I)
    def fcal_total(self, I) -> FreeComplex:
        I = self.interval(I)

        def build():
            T = I.interior()
            comps = {S: self.fcal(I, S).complex for S in subsets(T)}
            return lemma_tot(T, comps, lambda S, k: self.fcal_restrict(I, S, _sub(I, S + (k,))), offset=1,
                             check=self.check, name=f"F({I!r})")

        return self._memo(("total", I.elements), build)

    # -- ℱ(I, J | Σ) and ℱ(I | Σ)
    def split(self, I, xs, Sigma) -> list[tuple]:
        """``xs ∩ interior(I_j)`` for the Σ-segments ``I_j``."""
        I = self.interval(I)
        return [_sub(P, [x for x in xs if x in P.interior()]) for P in segment(I, Sigma)]

    def _check_disjoint(self, I, J, Sigma):
        J = self._check_sub(I, J, "J")
        Sigma = self._check_sub(I, Sigma, "Σ")
        if set(J) & set(Sigma):
            raise InvalidArgument("J and Σ must be disjoint")
        return J, Sigma

    def fcal_sigma(self, I, J=(), Sigma=()) -> FreeComplex:
        """``ℱ(I, J | Σ) = ⊗_j ℱ(I_j, J_j)`` over the Σ-segments."""
        I = self.interval(I)
        J, Sigma = self._check_disjoint(I, J, Sigma)

        def build():
            segs = segment(I, Sigma)
            parts = self.split(I, J, Sigma)
            return tensor(*[self.fcal(P, Jp).complex for P, Jp in zip(segs, parts)], name=f"F({I!r},{J}|{Sigma})")

        return self._memo(("fsig", I.elements, J, Sigma), build)

    def fcal_sigma_total(self, I, Sigma=()) -> FreeComplex:
        """``ℱ(I | Σ) = ⊗_j ℱ(I_j)``."""
        I = self.interval(I)
        Sigma = self._check_sub(I, Sigma, "Σ")
        return self._memo(("fsigtot", I.elements, Sigma),
                          lambda: tensor(*[self.fcal_total(P) for P in segment(I, Sigma)], name=f"F({I!r}|{Sigma})"))

    def _factorwise(self, src: FreeComplex, tgt: FreeComplex, maps: Sequence[ChainMap], name: str) -> ChainMap:
        table: dict = {}
        for g in src.degree:
            img = {(): 1}
            for f, x in zip(maps, g):
                nxt: dict = {}
                for key, c in img.items():
                    for h, y in f.table.get(x, {}).items():
                        nxt[key + (h,)] = nxt.get(key + (h,), 0) + c * y
                img = {k: v for k, v in nxt.items() if v}
                if not img:
                    break
            if img:
                table[g] = img
        return ChainMap(src, tgt, table, validate=self.check, name=name)

    def r_sigma(self, I, J, J2, Sigma=()) -> ChainMap:
        """``r_{J,J'}`` on ``ℱ(I, J | Σ)``, factor by factor."""
        I = self.interval(I)
        J, Sigma = self._check_disjoint(I, J, Sigma)
        J2, _ = self._check_disjoint(I, J2, Sigma)
        segs = segment(I, Sigma)
        maps = [self.fcal_restrict(P, a, b) for P, a, b in zip(segs, self.split(I, J, Sigma), self.split(I, J2, Sigma))]
        return self._memo(("rsig", I.elements, J, J2, Sigma),
                          lambda: self._factorwise(self.fcal_sigma(I, J, Sigma), self.fcal_sigma(I, J2, Sigma), maps, "r"))

    def pi_sigma(self, I, J, Sigma, K) -> ChainMap:
        """``π_K: ℱ(I, J | Σ) -> ℱ(I - K, J | Σ)``."""
        I = self.interval(I)
        J, Sigma = self._check_disjoint(I, J, Sigma)
        K = self._check_sub(I, K, "K")
        if set(K) & (set(J) | set(Sigma)):
            raise InvalidArgument("π_K needs K disjoint from J and Σ")
        I2 = I.remove(K)

        def build():
            segs = segment(I, Sigma)
            maps = [self.fcal_project(P, a, k) for P, a, k in zip(segs, self.split(I, J, Sigma), self.split(I, K, Sigma))]
            return self._factorwise(self.fcal_sigma(I, J, Sigma), self.fcal_sigma(I2, J, Sigma), maps, f"pi{K}")

        return self._memo(("pisig", I.elements, J, Sigma, K), build)

    @staticmethod
    def glue_pair(J1: tuple, g1, k, J2: tuple, g2):
        """Concatenate two Čech generators at the shared index ``k``; None if the points differ there."""
        c1, x1 = g1
        c2, x2 = g2
        if x1[-1] != x2[0]:
            return None
        shift = len(J1) + 1
        return (c1 + tuple(t + shift for t in c2), x1 + x2[1:])

    def rho_sigma(self, I, J, Sigma, K) -> ChainMap:
        """``ρ_K: ℱ(I, J | Σ) -> ℱ(I, J ∪ K | Σ - K)`` by concatenation, no signs."""
        I = self.interval(I)
        J, Sigma = self._check_disjoint(I, J, Sigma)
        K = self._check_sub(I, K, "K")
        if not set(K) <= set(Sigma):
            raise InvalidArgument("ρ_K needs K ⊆ Σ")
        Sigma2 = _sub(I, set(Sigma) - set(K))
        J2 = _sub(I, set(J) | set(K))

        def build():
            src = self.fcal_sigma(I, J, Sigma)
            tgt = self.fcal_sigma(I, J2, Sigma2)
            segs = segment(I, Sigma)
            parts = self.split(I, J, Sigma)
            # group the Σ-segments into the (Σ - K)-segments
            groups: list[list[int]] = [[0]]
            for idx in range(1, len(segs)):
                if segs[idx].init in K:
                    groups[-1].append(idx)
                else:
                    groups.append([idx])
            table = {}
            tdeg = tgt.degree
            for g in src.degree:
                out = []
                for grp in groups:
                    cur, Jcur = g[grp[0]], parts[grp[0]]
                    for idx in grp[1:]:
                        cur = self.glue_pair(Jcur, cur, segs[idx].init, parts[idx], g[idx])
                        if cur is None:
                            break
                        Jcur = Jcur + (segs[idx].init,) + parts[idx]
                    if cur is None:
                        out = None
                        break
                    out.append(cur)
                if out is None:
                    continue
                h = tuple(out)
                if h not in tdeg:
                    raise InvalidComplex(f"glued generator {h!r} missing from the target")
                table[g] = {h: 1}
            return ChainMap(src, tgt, table, validate=self.check, name=f"rho{K}")

        return self._memo(("rhosig", I.elements, J, Sigma, K), build)

    def iota_sigma(self, I, J, Sigma, T) -> ChainMap:
        """``ι_{Σ/T}: ℱ(I, J | Σ) -> ⊗_b ℱ(I_b, J_b | Σ_b)`` regrouping over the T-segments."""
        I = self.interval(I)
        J, Sigma = self._check_disjoint(I, J, Sigma)
        T = self._check_sub(I, T, "T")
        if not set(T) <= set(Sigma):
            raise InvalidArgument("ι_{Σ/T} needs T ⊆ Σ")
        blocks = segment(I, T)
        sizes = [len(segment(B, [s for s in Sigma if s in B.interior()])) for B in blocks]
        tgt = tensor(*[self.fcal_sigma(B, [j for j in J if j in B.interior()], [s for s in Sigma if s in B.interior()])
                       for B in blocks], name="⊗F(I_b,J_b|Σ_b)")
        src = self.fcal_sigma(I, J, Sigma)
        table = {}
        for g in src.degree:
            out, at = [], 0
            for s in sizes:
                out.append(tuple(g[at : at + s]))
                at += s
            table[g] = {tuple(out): 1}
        return ChainMap(src, tgt, table, validate=self.check, name="iota_S/T")

    def psi(self, I, K) -> ZigZag:
        """``ψ_K = π_K ∘ r^{-1} ∘ ρ_K`` from ``ℱ(I, ∅ | °I)`` to ``ℱ(I - K, ∅ | °(I - K))``."""
        I = self.interval(I)
        K = self._check_sub(I, K, "K")
        top = I.interior()
        rest = _sub(I, set(top) - set(K))
        rho = self.rho_sigma(I, (), top, K)
        r = self.r_sigma(I, (), K, rest)
        pi = self.pi_sigma(I, (), rest, K)
        return ZigZag([(rho, False), (r, True), (pi, False)])

    # -- F(I | S)
    def bar_system(self, I=None) -> BarSystem:
        I = self.interval(I)

        def product(L, R, g1, g2):
            J1, h1 = g1
            J2, h2 = g2
            k = L[1]
            glued = self.glue_pair(J1, h1, k, J2, h2)
            if glued is None:
                return {}
            sgn = _sign((len(J1) + 1) * len(h2[0]))
            return {(J1 + (k,) + J2, glued): sgn}

        def build():
            comps = {}
            for a in range(len(I)):
                for b in range(a + 1, len(I)):
                    P = FiniteOrderedSet(I.elements[a : b + 1])
                    comps[_key(P)] = self.fcal_total(P)
            return BarSystem(I, comps, product, validate=self.check)

        return self._memo(("bar", I.elements), build)

    def F(self, I=None, S=()) -> FreeComplex:
        """``F(I | S) = ⊕_{Σ ⊇ S} ℱ(I | Σ)`` with ``d_F = d̄ + ρ̄``."""
        I = self.interval(I)
        S = self._check_sub(I, S, "S")
        if len(I) == 1:
            raise InvalidArgument("F needs |I| >= 2")
        return self._memo(("F", I.elements, S), lambda: bar_complex(self.bar_system(I), I, S, name=f"F({I!r}|{S})"))

    def graded(self, I, k: int) -> FreeComplex:
        return graded_piece(self.bar_system(I), k, self.interval(I))

    def sigma(self, I, S, S2) -> ChainMap:
        """``σ_{S,S'}: F(I | S) -> F(I | S')``, the quotient onto summands with Σ ⊇ S'."""
        I = self.interval(I)
        S = self._check_sub(I, S, "S")
        S2 = self._check_sub(I, S2, "S'")
        if not set(S) <= set(S2):
            raise InvalidArgument("σ needs S ⊆ S'")

        def build():
            src, tgt = self.F(I, S), self.F(I, S2)
            return ChainMap(src, tgt, {g: {g: 1} for g in src.degree if g in tgt.degree},
                            validate=self.check, name="sigma")

        return self._memo(("sigma", I.elements, S, S2), build)

    def tensor_target(self, I, S) -> tuple[list[FiniteOrderedSet], FreeComplex]:
        """``F(I_1) ⊗ ... ⊗ F(I_c)`` for the S-segmentation."""
        I = self.interval(I)
        S = self._check_sub(I, S, "S")
        segs = segment(I, S)
        return segs, self._memo(("Ften", I.elements, S), lambda: tensor(*[self.F(P) for P in segs], name=f"⊗F|{S}"))

    def iota_S(self, I, S, T=None) -> ChainMap:
        """``ι_{S/T}: F(I | S) -> ⊗_b F(I_b | S_b)`` for ``T ⊆ S`` (default ``T = S``)."""
        I = self.interval(I)
        S = self._check_sub(I, S, "S")
        T = S if T is None else self._check_sub(I, T, "T")
        if not set(T) <= set(S):
            raise InvalidArgument("ι_{S/T} needs T ⊆ S")

        def build():
            blocks = segment(I, T)
            subS = [_sub(B, [s for s in S if s in B.interior()]) for B in blocks]
            tgt = tensor(*[self.F(B, Sb) for B, Sb in zip(blocks, subS)], name="⊗F(I_b|S_b)")
            src = self.F(I, S)
            table = {}
            for g in src.degree:
                sigma, gens = g
                out, at = [], 0
                for B in blocks:
                    sb = tuple(x for x in sigma if x in B.interior())
                    n = len(sb) + 1
                    out.append((sb, tuple(gens[at : at + n])))
                    at += n
                table[g] = {tuple(out): 1}
            return ChainMap(src, tgt, table, validate=self.check, name="iota_S")

        return self._memo(("iotaS", I.elements, S, T), build)

    def tau(self, I, S, S2=None) -> ChainMap:
        """``τ_S = ι_S σ_{∅,S}`` on ``F(I)``, or ``τ_{S,S'} = ⊗ τ_{S'_j}`` when ``S2`` is given."""
        I = self.interval(I)
        if S2 is None:
            return self._memo(("tau", I.elements, tuple(S)),
                              lambda: self.iota_S(I, S) @ self.sigma(I, (), S))
        S = self._check_sub(I, S, "S")
        S2 = self._check_sub(I, S2, "S'")
        if not set(S) <= set(S2):
            raise InvalidArgument("τ_{S,S'} needs S ⊆ S'")

        def build():
            segs, src = self.tensor_target(I, S)
            _, tgt = self.tensor_target(I, S2)
            parts = [self.tau(P, [s for s in S2 if s in P.interior()]) for P in segs]
            table = {}
            for g in src.degree:
                img = {(): 1}
                for f, x in zip(parts, g):
                    nxt: dict = {}
                    for key, c in img.items():
                        for h, y in f.table.get(x, {}).items():
                            nxt[key + h] = nxt.get(key + h, 0) + c * y
                    img = {k: v for k, v in nxt.items() if v}
                    if not img:
                        break
                if img:
                    table[g] = img
            return ChainMap(src, tgt, table, validate=self.check, name="tau_SS'")

        return self._memo(("tau2", I.elements, S, S2), build)

    def phi(self, I, K, S=()) -> ChainMap:
        """``φ_K: F(I | S) -> F(I - K | S)``: ``π_K`` where defined, zero where ``K`` meets ``J`` or ``Σ``."""
        I = self.interval(I)
        K = self._check_sub(I, K, "K")
        S = self._check_sub(I, S, "S")
        if set(K) & set(S):
            raise InvalidArgument("φ_K needs K disjoint from S")

        def build():
            src = self.F(I, S)
            if not K:
                return ChainMap.identity(src)
            I2 = I.remove(K)
            tgt = self.F(I2, S)
            Kset = set(K)
            table = {}
            for g in src.degree:
                sigma, gens = g
                if Kset & set(sigma):
                    continue
                segs = segment(I, sigma)
                img = {(): 1}
                for P, (Jp, h) in zip(segs, gens):
                    Kp = _sub(P, [k for k in K if k in P.interior()])
                    if set(Jp) & Kset:
                        img = {}
                        break
                    f = self.fcal_project(P, Jp, Kp)
                    nxt: dict = {}
                    for key, c in img.items():
                        for h2, y in f.table.get(h, {}).items():
                            k2 = key + ((Jp, h2),)
                            nxt[k2] = nxt.get(k2, 0) + c * y
                    img = {k: v for k, v in nxt.items() if v}
                    if not img:
                        break
                if img:
                    table[g] = {(sigma, key): c for key, c in img.items()}
            return ChainMap(src, tgt, table, validate=self.check, name=f"phi{K}")

        return self._memo(("phi", I.elements, K, S), build)

    def top_quotient(self, I) -> ChainMap:
        """``F(I) -> ℱ(I, ∅ | °I)``, the canonical surjection with generators renamed to Čech ones."""
        I = self.interval(I)

        def build():
            top = I.interior()
            src = self.F(I)
            tgt = self.fcal_sigma(I, (), top)
            table = {}
            for g in src.degree:
                sigma, gens = g
                if sigma == top:
                    table[g] = {tuple(h for _, h in gens): 1}
            return ChainMap(src, tgt, table, validate=self.check, name="F->F(I|°I)")

        return self._memo(("topq", I.elements), build)

    # -- checks
    def check_prop_phi_psi(self, I, K) -> "PhiPsiReport":
        """Compare ``ψ_K ∘ (F(I) -> top)`` with ``(F(I-K) -> top) ∘ φ_K`` on homology."""
        I = self.interval(I)
        K = self._check_sub(I, K, "K")
        q = self.top_quotient(I)
        upper = ZigZag([(q, False)] + self.psi(I, K).steps) if K else ZigZag([(q, False)])
        lower = ZigZag([(self.phi(I, K), False), (self.top_quotient(I.remove(K)), False)])
        res = equal_on_homology(upper, lower, source=self.F(I))
        sign = None
        if not res.equal:
            neg = ZigZag([(self.phi(I, K), False), (-self.top_quotient(I.remove(K)), False)])
            if equal_on_homology(upper, neg, source=self.F(I)).equal:
                sign = -1
        return PhiPsiReport(res.equal, res.exact, res.witness, res.degrees, sign)

    def check_sigma_exactness(self, I, R, J) -> "ExactnessReport":
        I = self.interval(I)
        R = self._check_sub(I, R, "R")
        J = self._check_sub(I, J, "J")
        if not J:
            raise InvalidArgument("J must be non-empty")
        if set(R) & set(J):
            raise InvalidArgument("R and J must be disjoint")
        pos = I.position
        levels = [list(subsets(J, [k])) for k in range(len(J) + 1)]

        def term(level):
            return [(S, self.F(I, _sub(I, set(R) | set(S)))) for S in level]

        def stage_map(k):
            """Alternating σ from level k to level k+1 as a sparse column dict."""
            cols: dict = {}
            for S in levels[k]:
                src = self.F(I, _sub(I, set(R) | set(S)))
                for j in J:
                    if j in S:
                        continue
                    S2 = tuple(sorted(S + (j,), key=pos))
                    s = _sign(sum(1 for t in S if pos(t) > pos(j)))
                    tgt = self.F(I, _sub(I, set(R) | set(S2)))
                    for g in src.degree:
                        if g in tgt.degree:
                            cols.setdefault((S, g), {})[(S2, g)] = s
            return cols

        maps = [stage_map(k) for k in range(len(J))]
        problems = []

        for k in range(len(J) + 1):
            spaces = term(levels[k])
            by_deg: dict = {}
            for S, C in spaces:
                for g, p in C.degree.items():
                    by_deg.setdefault(p, []).append((S, g))
            for p, gens in sorted(by_deg.items()):
                incoming = {}
                if k > 0:
                    prev = maps[k - 1]
                    for S, C in term(levels[k - 1]):
                        for g in C.gens(p):
                            col = prev.get((S, g))
                            if col:
                                incoming[(S, g)] = col
                outgoing = {}
                if k < len(J):
                    for key in gens:
                        col = maps[k].get(key)
                        if col:
                            outgoing[key] = col
                if k == 0:
                    continue  # no exactness claimed at the first term
                # composite is zero
                if k < len(J):
                    for key, col in incoming.items():
                        acc: dict = {}
                        for h, x in col.items():
                            vadd(acc, maps[k].get(h, {}), x)
                        if acc:
                            problems.append(("composite", k, p, key))
                            break
                divs = linalg.elementary_divisors(incoming)
                r_out = linalg.rank(outgoing) if outgoing else 0
                if len(divs) + r_out != len(gens) or any(x != 1 for x in divs):
                    problems.append(("homology", k, p, len(gens), len(divs), r_out))
        return ExactnessReport(not problems, problems)

    def filtration_ok(self, I, S=()) -> bool:
        """Summands with ``|Σ| >= k`` form a subcomplex for every ``k`` (ρ̄ lowers |Σ|, so it is a quotient filtration)."""
        C = self.F(I, S)
        for g, img in C.d.items():
            for h in img:
                if len(h[0]) > len(g[0]):
                    return False
        return True


@dataclass
class PhiPsiReport:
    equal: bool
    exact: bool
    witness: object
    degrees: tuple
    sign: int | None = None  # -1 when the square commutes only up to a global sign


@dataclass
class ExactnessReport:
    exact: bool
    problems: list


# ---------------------------------------------------------------- structure-map laws


def _chains(xs: tuple, length: int):
    """Increasing chains ``A_1 ⊆ ... ⊆ A_length`` of subsets of ``xs``."""
    subs = list(subsets(xs))
    out = [[a] for a in subs]
    for _ in range(length - 1):
        out = [c + [b] for c in out for b in subs if set(c[-1]) <= set(b)]
    return out


def _flatten_keys(f: ChainMap) -> dict:
    return {g: {sum(k, ()): c for k, c in img.items()} for g, img in f.table.items() if img}


def structure_law_problems(fc: FunctionComplexes, I=None) -> list[tuple]:
    """Every σ/ι/τ/φ law and r/π/ρ commutation on ``I``, as exact map identities.

    Returns ``(law, arguments, witness generator)`` for each failure.
    """
    I = fc.interval(I)
    inner = I.interior()
    out: list[tuple] = []

    def expect(law, args, lhs: ChainMap, rhs: ChainMap):
        w = lhs.difference_witness(rhs)
        if w is not None:
            out.append((law, args, w))

    for S, S1, S2 in _chains(inner, 3):
        expect("sigma-transitive", (S, S1, S2), fc.sigma(I, S, S2), fc.sigma(I, S1, S2) @ fc.sigma(I, S, S1))
        # τ_{∅,S} is τ_S on F(I); otherwise both sides start from the tensor product
        first = fc.tau(I, S, S1) if S else fc.tau(I, S1)
        expect("tau-transitive", (S, S1, S2), fc.tau(I, S1, S2) @ first, fc.tau(I, S, S2) if S else fc.tau(I, S2))
    for S, S1 in _chains(inner, 2):
        if S:
            expect("sigma-tau", (S, S1), fc.tau(I, S, S1) @ fc.iota_S(I, S), fc.iota_S(I, S1) @ fc.sigma(I, S, S1))
        for T in subsets(S):
            blocks = segment(I, T)
            src = fc.iota_S(I, S, T).tgt
            tgt = fc.iota_S(I, S1, T).tgt
            maps = [fc.sigma(B, _sub(B, [x for x in S if x in B.interior()]), _sub(B, [x for x in S1 if x in B.interior()]))
                    for B in blocks]
            lhs = fc._factorwise(src, tgt, maps, "sigma") @ fc.iota_S(I, S, T)
            expect("iota-sigma", (S, S1, T), lhs, fc.iota_S(I, S1, T) @ fc.sigma(I, S, S1))
            inner_iota = [fc.iota_S(B, _sub(B, [x for x in S if x in B.interior()])) for B in blocks]
            comp = fc._factorwise(src, tensor(*[f.tgt for f in inner_iota]), inner_iota, "iota") @ fc.iota_S(I, S, T)
            if _flatten_keys(comp) != {g: v for g, v in fc.iota_S(I, S).table.items() if v}:
                out.append(("iota-composite", (S, T), None))
        for K in subsets([k for k in inner if k not in S1]):
            if not K:
                continue
            expect("sigma-phi", (S, S1, K), fc.phi(I, K, S1) @ fc.sigma(I, S, S1),
                   fc.sigma(I.remove(K), S, S1) @ fc.phi(I, K, S))
    for S in subsets(inner):
        free = [k for k in inner if k not in S]
        for K in subsets(free):
            for K1 in subsets(K):
                K2 = tuple(k for k in K if k not in K1)
                expect("phi-transitive", (S, K1, K2), fc.phi(I, K, S), fc.phi(I.remove(K1), K2, S) @ fc.phi(I, K1, S))
    # Čech-level maps
    for J, J1, J2 in _chains(inner, 3):
        expect("r-transitive", (J, J1, J2), fc.fcal_restrict(I, J, J2), fc.fcal_restrict(I, J1, J2) @ fc.fcal_restrict(I, J, J1))
    for J in subsets(inner):
        free = [k for k in inner if k not in J]
        for K in subsets(free):
            for K1 in subsets(K):
                K2 = tuple(k for k in K if k not in K1)
                expect("pi-transitive", (J, K1, K2), fc.fcal_project(I, J, K),
                       fc.fcal_project(I.remove(K1), J, K2) @ fc.fcal_project(I, J, K1))
            for J2 in subsets([k for k in inner if k not in K]):
                if not set(J) <= set(J2) or not K:
                    continue
                expect("r-pi", (J, J2, K), fc.fcal_project(I, J2, K) @ fc.fcal_restrict(I, J, J2),
                       fc.fcal_restrict(I.remove(K), J, J2) @ fc.fcal_project(I, J, K))
    for Sigma in subsets(inner):
        for J in subsets([k for k in inner if k not in Sigma]):
            for K in subsets(Sigma):
                for K1 in subsets(K):
                    K2 = tuple(k for k in K if k not in K1)
                    if not K1 or not K2:
                        continue
                    J1 = _sub(I, set(J) | set(K1))
                    S1 = _sub(I, set(Sigma) - set(K1))
                    expect("rho-transitive", (J, Sigma, K1, K2), fc.rho_sigma(I, J, Sigma, K),
                           fc.rho_sigma(I, J1, S1, K2) @ fc.rho_sigma(I, J, Sigma, K1))
    return out


# ---------------------------------------------------------------- F-level distinguished subcomplexes


def f_generators(C: FreeComplex) -> set:
    """``sF(I)``: the generator set of a function complex."""
    return set(C.degree)


def f_distinguished(bundle: FunctionComplexes, family: Sequence[tuple[FiniteOrderedSet, tuple]], constraint: Constraint):
    """``([⊗_j F(I_j | S_j)]_C, ⊗_j F(I_j | S_j))``.

    The oracle sees, for each factor, the interval key and the generator; in
    the point model every tuple is proper.
    """
    factors = [(_key(P), bundle.F(P, Sp)) for P, Sp in family]
    return distinguished(bundle.model, factors, constraint)


def segmentation_hat_equals(bundle: FunctionComplexes, I, S) -> bool:
    """Whether ``F(I_1) ⊗̂ ... ⊗̂ F(I_c)`` equals ``F(I | S)`` generator by generator."""
    I = bundle.interval(I)
    segs = segment(I, S)
    sub, _ = f_distinguished(bundle, [(P, ()) for P in segs],
                             Constraint(()) if not segs else _hat(len(segs)))
    iota = bundle.iota_S(I, S)
    image = set()
    for g, img in iota.table.items():
        if list(img.values()) != [1] or len(img) != 1:
            return False
        image.add(next(iter(img)))
    return image == set(sub.degree) and len(image) == len(bundle.F(I, S).degree)


def _hat(r: int) -> Constraint:
    from .cech import hat_constraint

    return hat_constraint(r)


# ---------------------------------------------------------------- symbols


@dataclass(frozen=True)
class Symbol:
    """Formal sum of pairs ``(variety, r)``."""

    terms: tuple  # ((Variety, int), ...)

    @classmethod
    def of(cls, *pairs) -> "Symbol":
        return cls(tuple(pairs))

    def __add__(self, other: "Symbol") -> "Symbol":
        return Symbol(self.terms + other.terms)


def symbol_dims(pairs: Sequence[tuple[Variety, int]]) -> list[int]:
    """Step dimensions ``dim X_{i+1} - r_{i+1} + r_i``."""
    return [pairs[i + 1][0].dim - pairs[i + 1][1] + pairs[i][1] for i in range(len(pairs) - 1)]


@dataclass
class SymbolBundle:
    components: list  # [(index tuple, FunctionComplexes)]

    def F(self, S=()) -> FreeComplex:
        return direct_sum([(idx, fc.F(None, S)) for idx, fc in self.components], name="F(K)")


def symbol_complex(model_S: Sequence, model_Sbar: Sequence, symbols: Sequence[Symbol], *, check: bool = True) -> SymbolBundle:
    """Direct sum over component tuples of the function complexes with the induced dimensions."""
    if len(symbols) < 2:
        raise InvalidArgument("symbol complexes need n >= 2")
    from itertools import product as iproduct

    comps = []
    for combo in iproduct(*[list(enumerate(s.terms)) for s in symbols]):
        idx = tuple(i for i, _ in combo)
        pairs = [t for _, t in combo]
        varieties = {i + 1: v for i, (v, _) in enumerate(pairs)}
        model = PointModel(model_S, model_Sbar, varieties, symbol_dims(pairs), validate=check)
        comps.append((idx, FunctionComplexes(model, check=check)))
    return SymbolBundle(comps)

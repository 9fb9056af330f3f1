"""Finite geometry models: spaces, maps, fibering sequences and properness.

Two models are provided.  ``PointModel`` treats every variety as a finite set
of points over a finite base; all cycle complexes are free on the points in
degree 0 and every tuple intersects properly.  ``TableModel`` loads explicit
complexes, products and a table of proper tuples, so that the restricted
tensor product can be strictly smaller than the full one.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import combinations, product as iproduct
from typing import Iterable, Mapping, Sequence

from .homalg.complexes import ChainMap, FreeComplex, InvalidComplex, tensor, vadd
from .ordsets import FiniteOrderedSet, InvalidArgument


class ModelError(ValueError):
    """Model data violates one of the interface laws; carries every problem found."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) if self.problems else "invalid model")


class GeometryModel(ABC):
    @abstractmethod
    def cycle_of(self, space) -> FreeComplex: ...

    @abstractmethod
    def dim(self, space) -> int: ...

    @abstractmethod
    def is_proper(self, tup: Mapping) -> bool:
        """Whether the generator tuple ``{index: generator}`` intersects properly."""

    def proper_element(self, tup: Mapping[object, Mapping]) -> bool:
        """Element-level properness: every tuple drawn from the supports is proper."""
        keys = list(tup)
        supports = [list(tup[k]) for k in keys]
        return all(self.is_proper(dict(zip(keys, gens))) for gens in iproduct(*supports))


# ---------------------------------------------------------------- point model


@dataclass(frozen=True)
class Variety:
    """A finite variety over S with a compactification over S̄."""

    name: str
    points: tuple  # ((label, s), ...)
    bar_points: tuple = ()  # ((label, sbar), ...) extra points of the compactification
    dim: int = 0

    @property
    def X(self) -> tuple:
        return tuple(p for p, _ in self.points)

    @property
    def Xbar(self) -> tuple:
        return self.X + tuple(p for p, _ in self.bar_points)

    @property
    def base_map(self) -> dict:
        return dict(self.points + self.bar_points)

    def base(self, x):
        return self.base_map[x]


@dataclass(frozen=True)
class PointMap:
    source: tuple
    target: tuple
    table: tuple  # ((x, y), ...)
    smooth: bool = True
    projective: bool = True

    @classmethod
    def from_dict(cls, source, target, table: Mapping, **flags) -> "PointMap":
        return cls(tuple(source), tuple(target), tuple((x, table[x]) for x in source), **flags)

    def __call__(self, x):
        return dict(self.table)[x]

    def compose(self, inner: "PointMap") -> "PointMap":
        t = dict(self.table)
        return PointMap(inner.source, self.target, tuple((x, t[y]) for x, y in inner.table),
                        self.smooth and inner.smooth, self.projective and inner.projective)


class PointModel(GeometryModel):
    """Varieties are finite point sets; indices carry opaque ordered labels."""

    def __init__(self, S: Sequence, Sbar: Sequence, varieties: Mapping, dims_a: Sequence[int] | None = None,
                 order: FiniteOrderedSet | None = None, *, validate: bool = True):
        self.S = tuple(S)
        self.Sbar = tuple(Sbar)
        self.varieties = dict(varieties)
        self.order = order or FiniteOrderedSet(tuple(self.varieties))
        self.dims_a = tuple(dims_a) if dims_a is not None else tuple(0 for _ in range(len(self.order) - 1))
        self._space_cache: dict = {}
        if validate:
            problems = self.problems()
            if problems:
                raise ModelError(problems)

    # -- validation
    def problems(self) -> list[str]:
        out = []
        S, Sbar = set(self.S), set(self.Sbar)
        if len(S) != len(self.S) or len(Sbar) != len(self.Sbar):
            out.append("base points must be distinct")
        if not S <= Sbar:
            out.append("S must be contained in S̄")
        if set(self.order) != set(self.varieties):
            out.append("index order and varieties disagree")
        if len(self.dims_a) != max(len(self.order) - 1, 0):
            out.append(f"expected {len(self.order) - 1} step dimensions, got {len(self.dims_a)}")
        for i, V in self.varieties.items():
            labels = V.Xbar
            if len(set(labels)) != len(labels):
                out.append(f"variety {V.name!r}: repeated point labels")
            for p, s in V.points:
                if s not in S:
                    out.append(f"variety {V.name!r}: point {p!r} maps to {s!r} outside S")
            for p, s in V.bar_points:
                if s not in Sbar or s in S:
                    out.append(f"variety {V.name!r}: boundary point {p!r} must map into S̄ - S, got {s!r}")
        return out

    # -- basic data
    @property
    def n(self) -> int:
        return len(self.order)

    def variety(self, i) -> Variety:
        return self.varieties[i]

    def dim(self, space) -> int:
        return 0

    def a_I(self, I: FiniteOrderedSet) -> int:
        """Dimension label of the interval: step labels summed, minus dim X_i at interior indices.

        This is the reading for which a_[i,i+1] = a_i and gluing at c subtracts dim X_c.
        """
        pos = self.order.position
        lo, hi = pos(I.init), pos(I.term)
        return sum(self.dims_a[lo:hi]) - sum(self.varieties[self.order[i]].dim for i in range(lo + 1, hi))

    def cycle_of(self, space: Iterable) -> FreeComplex:
        return FreeComplex({x: 0 for x in space}, {}, validate=False)

    def is_proper(self, tup: Mapping) -> bool:
        for k in tup:
            if k not in self.order and not isinstance(k, tuple):
                raise InvalidArgument(f"index {k!r} outside the sequence")
        return True

    # -- products, opens
    def product_space(self, I: FiniteOrderedSet, bar: Iterable = ()) -> list[tuple]:
        """Points of ∏_{i∈I} X'_i with X'_i = X̄_i for i in ``bar``."""
        bar = frozenset(bar)
        key = (I.elements, bar)
        pts = self._space_cache.get(key)
        if pts is None:
            factors = [self.varieties[i].Xbar if i in bar else self.varieties[i].X for i in I]
            pts = list(iproduct(*factors))
            self._space_cache[key] = pts
        return pts

    def agree(self, I: FiniteOrderedSet, x: tuple, J: Iterable) -> bool:
        """Whether the coordinates of ``x`` at the indices ``J`` share a point of S̄."""
        pos = {i: k for k, i in enumerate(I)}
        bases = {self.varieties[j].base(x[pos[j]]) for j in J}
        return len(bases) <= 1

    def fiber_product(self, I: FiniteOrderedSet) -> list[tuple]:
        """X_{i1} ×_S ... ×_S X_{ik}."""
        return [x for x in self.product_space(I) if self.agree(I, x, I)]

    def restrict(self, labels: Iterable) -> "PointModel":
        """Sub-sequence on the given labels (order inherited)."""
        labels = self.order.sort(labels)
        order = FiniteOrderedSet(labels)
        pos = self.order.position
        # step dimensions of the restricted sequence are the interval labels
        dims = []
        for a, b in zip(labels, labels[1:]):
            lo, hi = pos(a), pos(b)
            dims.append(sum(self.dims_a[lo:hi]) - sum(self.varieties[self.order[i]].dim for i in range(lo + 1, hi)))
        return PointModel(self.S, self.Sbar, {i: self.varieties[i] for i in labels}, dims, order, validate=False)

    def pullback_sequence(self, lam) -> "PointModel":
        """Sequence on ``lam.source`` with variety X_{lam(i)} at index i."""
        src = lam.source
        vs = {i: self.varieties[lam(i)] for i in src}
        dims = []
        pos = self.order.position
        for a, b in zip(src, src[1:]):
            if lam(a) == lam(b):
                dims.append(self.varieties[lam(a)].dim)
            else:
                dims.append(self.dims_a[pos(lam(a))])
        return PointModel(self.S, self.Sbar, vs, dims, src, validate=False)

    def is_constant(self) -> bool:
        return len(set(self.varieties.values())) <= 1


def pushforward(f: PointMap, src: FreeComplex | None = None, tgt: FreeComplex | None = None) -> ChainMap:
    if not f.projective:
        raise InvalidArgument("pushforward needs a projective map")
    src = src or FreeComplex({x: 0 for x in f.source}, {}, validate=False)
    tgt = tgt or FreeComplex({y: 0 for y in f.target}, {}, validate=False)
    return ChainMap(src, tgt, {x: {y: 1} for x, y in f.table}, name="push")


def pullback(f: PointMap, src: FreeComplex | None = None, tgt: FreeComplex | None = None) -> ChainMap:
    """``f^*: Z(target) -> Z(source)``, a point goes to the sum of its fiber."""
    if not f.smooth:
        raise InvalidArgument("pullback needs a smooth map")
    zt = src or FreeComplex({y: 0 for y in f.target}, {}, validate=False)
    zs = tgt or FreeComplex({x: 0 for x in f.source}, {}, validate=False)
    table: dict = {}
    for x, y in f.table:
        table.setdefault(y, {})[x] = 1
    return ChainMap(zt, zs, table, name="pull")


# ---------------------------------------------------------------- fibering sequences


@dataclass
class FiberingSequence:
    """Spaces M_1..M_n (point sets) with maps M_i -> Y_i <- M_{i+1}."""

    spaces: list  # list of tuples of points
    right: list  # right[i]: dict M_i -> Y_i, for i < n
    left: list  # left[i]: dict M_{i+1} -> Y_i

    def __post_init__(self):
        n = len(self.spaces)
        if len(self.right) != n - 1 or len(self.left) != n - 1:
            raise InvalidArgument("a sequence of n spaces needs n-1 maps on each side")
        for i in range(n - 1):
            if set(self.right[i]) != set(self.spaces[i]) or set(self.left[i]) != set(self.spaces[i + 1]):
                raise InvalidArgument(f"maps at step {i + 1} are not total")

    @property
    def n(self) -> int:
        return len(self.spaces)

    condition_star = True  # every map of finite sets is smooth in this model

    def fiber_space(self, lo: int, hi: int) -> list[tuple]:
        """M_{[lo,hi]} (1-based, inclusive) as tuples of points."""
        if not 1 <= lo <= hi <= self.n:
            raise InvalidArgument(f"[{lo},{hi}] is not a sub-interval of [1,{self.n}]")
        out = [(x,) for x in self.spaces[lo - 1]]
        for i in range(lo, hi):
            f, g = self.right[i - 1], self.left[i - 1]
            out = [t + (y,) for t in out for y in self.spaces[i] if f[t[-1]] == g[y]]
        return out

    def projection(self, lo: int, hi: int, sub: tuple[int, int]) -> PointMap:
        a, b = sub
        src = self.fiber_space(lo, hi)
        tgt = self.fiber_space(a, b)
        return PointMap.from_dict(src, tgt, {x: x[a - lo : b - lo + 1] for x in src})

    def glue(self, blocks: Sequence[tuple[int, int]], pieces: Sequence[tuple]):
        """Product of points of M_{I_1},...,M_{I_r} for a partition: the tuple point or None."""
        out: tuple = ()
        for (a, b), x in zip(blocks, pieces):
            if out:
                i = a - 1  # step between a-1 and a
                if self.right[i - 1][out[-1]] != self.left[i - 1][x[0]]:
                    return None
            out += tuple(x)
        return out


def fiber_space(seq: FiberingSequence, I: FiniteOrderedSet | tuple[int, int]):
    lo, hi = (I.init, I.term) if isinstance(I, FiniteOrderedSet) else I
    return seq.fiber_space(lo, hi)


def cycle_of(model: GeometryModel, space) -> FreeComplex:
    return model.cycle_of(space)


# ---------------------------------------------------------------- table model


def interval_key(lo: int, hi: int) -> str:
    return str(lo) if lo == hi else f"{lo}-{hi}"


def parse_key(key: str) -> tuple[int, int]:
    if "-" in key:
        a, b = key.split("-")
        return int(a), int(b)
    return int(key), int(key)


@dataclass
class TableMap:
    name: str
    source: str
    target: str
    chain_map: ChainMap
    smooth: bool = False
    projective: bool = False


@dataclass
class TableCovering:
    """A covering declared by explicit Čech data."""

    name: str
    space: str
    index: tuple  # covering labels
    complexes: dict  # chain tuple -> FreeComplex (chain () is the ambient space)
    restrictions: dict  # (chain, bigger chain) -> ChainMap
    closed: FreeComplex | None = None  # cycles on the closed complement
    iota: ChainMap | None = None  # Z(A) -> Z(M)


class TableModel(GeometryModel):
    """Explicit complexes over interval keys ``"i"`` and ``"i-j"`` with tabulated products.

    ``proper`` holds generator tuples ``frozenset({(key, gen), ...})`` of size
    at least two; single generators are always proper.  Products are binary,
    keyed by adjacent interval keys, and are consulted only on proper pairs.
    """

    def __init__(self, n: int, spaces: Mapping[str, FreeComplex], dims: Mapping[str, int], products: Mapping,
                 proper: Iterable[frozenset], maps: Sequence[TableMap] = (), coverings: Sequence[TableCovering] = (),
                 *, validate: bool = True):
        self.n = n
        self.spaces = dict(spaces)
        self.dims = dict(dims)
        self.products = dict(products)  # (Lkey, Rkey) -> {(g1, g2): {gen: coef}}
        self.proper = set(proper)
        self.maps = list(maps)
        self.coverings = list(coverings)
        if validate:
            problems = self.problems()
            if problems:
                raise ModelError(problems)

    # -- interface
    def cycle_of(self, space: str) -> FreeComplex:
        return self.spaces[space]

    def dim(self, space: str) -> int:
        return self.dims.get(space, 0)

    def is_proper(self, tup: Mapping) -> bool:
        for k in tup:
            if k not in self.spaces:
                raise InvalidArgument(f"index {k!r} outside the sequence")
        if len(tup) <= 1:
            return True
        return frozenset(tup.items()) in self.proper

    def product(self, L: str, R: str, g1, g2) -> dict:
        """``g1 ∘ g2`` for a proper pair; error when the pair is not proper."""
        if not self.is_proper({L: g1, R: g2}):
            raise InvalidArgument(f"product requested outside the restricted tensor product: {L}:{g1!r}, {R}:{g2!r}")
        return dict(self.products.get((L, R), {}).get((g1, g2), {}))

    def multiply(self, L: str, R: str, v1: Mapping, v2: Mapping) -> dict:
        out: dict = {}
        for g1, x in v1.items():
            for g2, y in v2.items():
                vadd(out, self.product(L, R, g1, g2), x * y)
        return out

    def keys(self) -> list[str]:
        return [interval_key(a, b) for a in range(1, self.n + 1) for b in range(a, self.n + 1) if interval_key(a, b) in self.spaces]

    # -- restricted tensor products
    def restricted_tensor(self, keys: Sequence[str], name: str = "") -> tuple[FreeComplex, FreeComplex]:
        """(⊗̂, ⊗) for the given factors."""
        full = tensor(*[self.spaces[k] for k in keys], name=name or "⊗")
        keep = [g for g in full.degree if self.is_proper(dict(zip(keys, g)))]
        sub = full.restrict_to(keep, check="sub", name=name or "⊗̂")
        return sub, full

    # -- validation
    def problems(self) -> list[str]:
        out: list[str] = []
        for k in self.spaces:
            try:
                lo, hi = parse_key(k)
            except ValueError:
                out.append(f"space key {k!r} is not of the form i or i-j")
                continue
            if not 1 <= lo <= hi <= self.n:
                out.append(f"space key {k!r} outside [1,{self.n}]")
        for i in range(1, self.n + 1):
            if str(i) not in self.spaces:
                out.append(f"missing space {i}")
        for tup in self.proper:
            for k, g in tup:
                if k not in self.spaces:
                    out.append(f"proper tuple names unknown space {k!r}")
                elif g not in self.spaces[k].degree:
                    out.append(f"proper tuple names unknown generator {g!r} of space {k}")
        out += self.boundary_closure_problems()
        out += self._product_problems()
        for m in self.maps:
            w = m.chain_map.commutation_witness()
            if w is not None:
                out.append(f"map {m.name!r} does not commute with differentials at {w!r}")
        for cov in self.coverings:
            out += _covering_problems(cov)
        return out

    def boundary_closure_problems(self) -> list[str]:
        out = []
        for tup in sorted(self.proper, key=repr):
            d = dict(tup)
            for k, g in d.items():
                for h in self.spaces[k].d.get(g, {}) if k in self.spaces else ():
                    moved = dict(d)
                    moved[k] = h
                    if not self.is_proper(moved):
                        out.append(f"properness not closed under boundary: {sorted(d.items())} proper but "
                                   f"{sorted(moved.items())} is not")
        return out

    def _product_problems(self) -> list[str]:
        out = []
        for (L, R), table in self.products.items():
            lo, mid = parse_key(L)
            mid2, hi = parse_key(R)
            target = interval_key(lo, hi)
            if mid2 != mid + 1 or target not in self.spaces:
                out.append(f"product {L}∘{R} has no target space {target}")
                continue
            try:
                src, _ = self.restricted_tensor([L, R])
            except InvalidComplex:
                continue  # already reported by the boundary-closure check
            for (g1, g2), img in table.items():
                if (g1, g2) not in src.degree:
                    out.append(f"product {L}∘{R} defined on improper or unknown pair {(g1, g2)!r}")
                for h in img:
                    if h not in self.spaces[target].degree:
                        out.append(f"product {L}∘{R} hits unknown generator {h!r}")
            try:
                ChainMap(src, self.spaces[target], {g: v for g, v in table.items() if g in src.degree}, name=f"{L}∘{R}")
            except InvalidComplex as exc:
                out.append(str(exc))
        out += self.associativity_problems()
        return out

    def associativity_problems(self) -> list[str]:
        out = []
        for a in range(1, self.n + 1):
            for b in range(a, self.n + 1):
                for c in range(b + 1, self.n + 1):
                    for e in range(c + 1, self.n + 2):
                        # three consecutive blocks [a,b], [b+1,c], [c+1,e-1]
                        P, Q, R = interval_key(a, b), interval_key(b + 1, c), interval_key(c + 1, e - 1)
                        PQ, QR = interval_key(a, c), interval_key(b + 1, e - 1)
                        if e - 1 > self.n or not all(k in self.spaces for k in (P, Q, R, PQ, QR)):
                            continue
                        if not all(x in self.products for x in ((P, Q), (PQ, R), (Q, R), (P, QR))):
                            continue
                        for g1, g2, g3 in iproduct(self.spaces[P].degree, self.spaces[Q].degree, self.spaces[R].degree):
                            if not self.is_proper({P: g1, Q: g2, R: g3}):
                                continue
                            try:
                                lhs = self.multiply(PQ, R, self.product(P, Q, g1, g2), {g3: 1})
                                rhs = self.multiply(P, QR, {g1: 1}, self.product(Q, R, g2, g3))
                            except InvalidArgument as exc:
                                out.append(f"proper triple {(g1, g2, g3)!r} has an improper partial product: {exc}")
                                continue
                            if lhs != rhs:
                                out.append(f"products not associative on {(P, Q, R)} at {(g1, g2, g3)!r}")
        return out

    def proper_triples(self):
        for tup in self.proper:
            if len(tup) == 3:
                yield dict(tup)


def _covering_problems(cov: TableCovering) -> list[str]:
    out = []
    for (c, c2), f in cov.restrictions.items():
        w = f.commutation_witness()
        if w is not None:
            out.append(f"covering {cov.name!r}: restriction {c}->{c2} not a chain map at {w!r}")
    for c in cov.complexes:
        for j in cov.index:
            if j in c:
                continue
            c2 = tuple(x for x in cov.index if x in c or x == j)
            if c2 in cov.complexes and (c, c2) not in cov.restrictions:
                out.append(f"covering {cov.name!r}: missing restriction {c}->{c2}")
    if cov.iota is not None:
        w = cov.iota.commutation_witness()
        if w is not None:
            out.append(f"covering {cov.name!r}: iota not a chain map at {w!r}")
    return out


# ---------------------------------------------------------------- properness for partitioned families


def proper(model: GeometryModel, tup: Mapping) -> bool:
    """Properness of a tuple of generators or of elements (dict values are vectors)."""
    if any(isinstance(v, Mapping) for v in tup.values()):
        return model.proper_element({k: (v if isinstance(v, Mapping) else {v: 1}) for k, v in tup.items()})
    return model.is_proper(tup)


def all_subtuples(tup: Mapping, min_size: int = 2):
    keys = list(tup)
    for r in range(min_size, len(keys) + 1):
        for ks in combinations(keys, r):
            yield {k: tup[k] for k in ks}

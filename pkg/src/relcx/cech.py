"""Čech cycle complexes of covered spaces, their functorialities and products.

A generator of ``Z(M, U)`` is ``(chain, g)`` where ``chain`` is an increasing
tuple of covering labels (the empty chain stands for the ambient space) and
``g`` a generator of the cycle complex of the corresponding intersection.  It
sits in bidegree ``(len(chain), deg g)`` and the total differential is
``δ + (-1)^{len(chain)} ∂``.  The Čech part ``δ`` inserts a label ``j`` at
position ``r`` of a chain of new length ``L`` with sign ``(-1)^{L-1-r}``, so
that ``δ(∅, x) = Σ_j (j, x)`` and concatenation of chains is a map of double
complexes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .geomodel import GeometryModel, TableCovering, proper
from .homalg.complexes import ChainMap, FreeComplex, InvalidComplex, tensor, vadd
from .ordsets import FiniteOrderedSet, InvalidArgument


def insertion_sign(chain: tuple, j, order: FiniteOrderedSet) -> tuple[tuple, int]:
    """The chain with ``j`` inserted, and the Čech sign of that insertion."""
    pos = order.position
    pj = pos(j)
    r = sum(1 for x in chain if pos(x) < pj)
    new = chain[:r] + (j,) + chain[r:]
    return new, (-1 if (len(chain) - r) % 2 else 1)


def _subchains(labels: Sequence) -> list[tuple]:
    out = [()]
    for k in range(1, len(labels) + 1):
        out += list(combinations(labels, k))
    return out


# ---------------------------------------------------------------- coverings on point sets


@dataclass(frozen=True)
class Covering:
    """Open covering of ``U ⊆ M`` by subsets indexed by a finite ordered set."""

    space: tuple
    index: FiniteOrderedSet
    opens: tuple  # one frozenset per index label, in index order
    U: frozenset | None = None

    def __post_init__(self):
        if len(self.opens) != len(self.index):
            raise InvalidArgument("one open per covering label is required")
        pts = set(self.space)
        opens = tuple(frozenset(o) for o in self.opens)
        object.__setattr__(self, "opens", opens)
        for j, o in zip(self.index, opens):
            if not o <= pts:
                raise InvalidArgument(f"open {j!r} is not contained in the space")
        union = frozenset().union(*opens) if opens else frozenset()
        if self.U is not None and frozenset(self.U) != union:
            raise InvalidArgument("the opens do not cover U exactly")
        object.__setattr__(self, "U", union)

    @classmethod
    def from_dict(cls, space: Iterable, opens: Mapping, index: FiniteOrderedSet | None = None, U=None) -> "Covering":
        index = index or FiniteOrderedSet(tuple(opens))
        return cls(tuple(space), index, tuple(opens[j] for j in index), None if U is None else frozenset(U))

    def open(self, j) -> frozenset:
        return self.opens[self.index.position(j)]

    def intersection(self, chain: tuple) -> frozenset:
        if not chain:
            return frozenset(self.space)
        out = self.open(chain[0])
        for j in chain[1:]:
            out = out & self.open(j)
        return out

    @property
    def closed(self) -> tuple:
        return tuple(x for x in self.space if x not in self.U)

    def membership(self, x) -> tuple:
        return tuple(j for j, o in zip(self.index, self.opens) if x in o)

    def preimage(self, space: Iterable, p: Callable) -> "Covering":
        """``p^{-1}`` of this covering on ``space``."""
        space = tuple(space)
        opens = tuple(frozenset(x for x in space if p(x) in o) for o in self.opens)
        return Covering(space, self.index, opens)


@dataclass
class CechComplex:
    complex: FreeComplex
    index: FiniteOrderedSet
    covering: Covering | None = None
    closed_complex: FreeComplex | None = None  # Z(A) for A the complement of U
    iota_table: dict = field(default_factory=dict)

    def bidegree(self, g) -> tuple[int, int]:
        chain, _ = g
        return len(chain), self.complex.degree[g] - len(chain)

    def iota(self) -> ChainMap:
        """The canonical map ``Z(A) -> Z(M, U)`` into the empty-chain column."""
        if self.closed_complex is None:
            raise InvalidArgument("no closed complement recorded for this Čech complex")
        return ChainMap(self.closed_complex, self.complex, self.iota_table, name="iota")


def point_cech(cov: Covering, name: str = "") -> CechComplex:
    """``Z(M, U)`` for a covering of a finite point set (cycles in degree 0)."""
    index = cov.index
    degree: dict = {}
    d: dict = {}
    for x in cov.space:
        labels = cov.membership(x)
        for chain in _subchains(labels):
            degree[(chain, x)] = len(chain)
            img = {}
            for j in labels:
                if j in chain:
                    continue
                new, s = insertion_sign(chain, j, index)
                img[(new, x)] = s
            if img:
                d[(chain, x)] = img
    C = FreeComplex(degree, d, validate=False, name=name or "Z(M,U)")
    A = cov.closed
    ZA = FreeComplex({x: 0 for x in A}, {}, validate=False, name="Z(A)")
    return CechComplex(C, index, cov, ZA, {x: {((), x): 1} for x in A})


def table_cech(tcov: TableCovering, name: str = "") -> CechComplex:
    """``Z(M, U)`` assembled from explicit complexes and restriction maps."""
    index = FiniteOrderedSet(tuple(tcov.index))
    if () not in tcov.complexes:
        raise InvalidArgument(f"covering {tcov.name!r} lacks the ambient complex")
    degree: dict = {}
    d: dict = {}
    for chain, Z in tcov.complexes.items():
        sgn = -1 if len(chain) % 2 else 1
        for g, q in Z.degree.items():
            key = (chain, g)
            degree[key] = len(chain) + q
            img: dict = {}
            for h, x in Z.d.get(g, {}).items():
                img[(chain, h)] = sgn * x
            for j in index:
                if j in chain:
                    continue
                new, s = insertion_sign(chain, j, index)
                if new not in tcov.complexes:
                    continue
                res = tcov.restrictions[(chain, new)]
                for h, x in res.table.get(g, {}).items():
                    img[(new, h)] = img.get((new, h), 0) + s * x
            img = {h: x for h, x in img.items() if x}
            if img:
                d[key] = img
    C = FreeComplex(degree, d, name=name or tcov.name)
    ZA, iota = tcov.closed, {}
    if tcov.iota is not None:
        iota = {g: {((), h): x for h, x in v.items()} for g, v in tcov.iota.table.items()}
    return CechComplex(C, index, None, ZA, iota)


def cech(model_or_cov, cov=None, name: str = "") -> CechComplex:
    """Dispatch: ``cech(Covering)`` or ``cech(model, TableCovering)``."""
    if isinstance(model_or_cov, Covering):
        return point_cech(model_or_cov, name)
    if isinstance(cov, TableCovering):
        return table_cech(cov, name)
    if isinstance(cov, Covering):
        return point_cech(cov, name)
    raise InvalidArgument("unsupported covering type")


# ---------------------------------------------------------------- functorialities


def refine(src: CechComplex, tgt: CechComplex, lam: Mapping, *, check: bool = True) -> ChainMap:
    """Restriction along a map of coverings ``lam: tgt labels -> src labels``.

    The target space may be an open subset of the source space; points outside
    it are dropped.  A chain ``c`` goes to every increasing ``c'`` on which
    ``lam`` is injective with image ``c``.
    """
    lam = dict(lam)
    if set(lam) != set(tgt.index):
        raise InvalidArgument("the covering map must be defined on every target label")
    if check and src.covering is not None and tgt.covering is not None:
        pts = set(src.covering.space)
        if not set(tgt.covering.space) <= pts:
            raise InvalidArgument("target space is not inside the source space")
        for j in tgt.index:
            if not tgt.covering.open(j) <= src.covering.open(lam[j]):
                raise InvalidArgument(f"open {j!r} is not inside open {lam[j]!r}")
    table: dict = {}
    for g in tgt.complex.degree:
        chain, x = g
        image = tuple(lam[j] for j in chain)
        if len(set(image)) != len(image):
            continue
        image = src.index.sort(image)
        s = (image, x)
        if s in src.complex.degree:
            table.setdefault(s, {})[g] = 1
    return ChainMap(src.complex, tgt.complex, table, validate=check, name="refine")


def push(src: CechComplex, tgt: CechComplex, p: Callable, *, check: bool = True) -> ChainMap:
    """``p_*: Z(M, p^{-1}V) -> Z(N, V)`` for a projective map."""
    table: dict = {}
    for g in src.complex.degree:
        chain, x = g
        h = (chain, p(x))
        if h not in tgt.complex.degree:
            raise InvalidArgument(f"{g!r} does not map into the target covering; is the source covering p^-1 V?")
        table[g] = {h: 1}
    return ChainMap(src.complex, tgt.complex, table, validate=check, name="push")


def pull(src: CechComplex, tgt: CechComplex, p: Callable, *, check: bool = True) -> ChainMap:
    """``p^*: Z(N, V) -> Z(M, p^{-1}V)`` for a smooth map ``p: M -> N``."""
    table: dict = {}
    for g in tgt.complex.degree:
        chain, x = g
        h = (chain, p(x))
        if h not in src.complex.degree:
            raise InvalidArgument(f"{g!r} lies over {h!r}, which is not in the source; is the covering p^-1 V?")
        table.setdefault(h, {})[g] = 1
    return ChainMap(src.complex, tgt.complex, table, validate=check, name="pull")


def cover_preimage(cov: Covering, space: Iterable, p: Callable) -> Covering:
    return cov.preimage(space, p)


# ---------------------------------------------------------------- products


def product_covering(factors: Sequence[Covering], space: Iterable, proj: Callable) -> Covering:
    """Covering of a glued space by preimages of all factor opens.

    Labels are ``(factor position, label)`` ordered factor by factor;
    ``proj(x)`` returns the tuple of factor points of ``x``.
    """
    space = tuple(space)
    labels, opens = [], []
    for i, cov in enumerate(factors):
        for j, o in zip(cov.index, cov.opens):
            labels.append((i, j))
            opens.append(frozenset(x for x in space if proj(x)[i] in o))
    return Covering(space, FiniteOrderedSet(tuple(labels)), tuple(opens))


def concat_product(factors: Sequence[CechComplex], target: CechComplex, glue: Callable, *, check: bool = True) -> ChainMap:
    """``ρ: ⊗ Z(M_i, U_i) -> Z(M, U_1 * ... * U_n)`` by concatenating chains.

    ``glue(points)`` returns the glued point or None when the points do not
    lie over a common point.  Target chain labels are ``(i, label)``.  Factor
    model degrees are zero for point sets, so no Koszul sign arises.
    """
    src = tensor(*[f.complex for f in factors], name="⊗Z(M_i,U_i)")
    table: dict = {}
    for g in src.degree:
        x = glue(tuple(pt for _, pt in g))
        if x is None:
            continue
        chain = tuple((i, j) for i, (c, _) in enumerate(g) for j in c)
        h = (chain, x)
        if h in target.complex.degree:
            table[g] = {h: 1}
    return ChainMap(src, target.complex, table, validate=check, name="rho")


def restricted_tensor(model: GeometryModel, factors: Sequence[tuple[Hashable, FreeComplex]],
                      gen_of: Callable = lambda g: g, name: str = "") -> tuple[FreeComplex, FreeComplex]:
    """``(⊗̂, ⊗)``: the span of generator tuples whose model generators are proper."""
    keys = [k for k, _ in factors]
    full = tensor(*[C for _, C in factors], name=name or "⊗")
    keep = [g for g in full.degree if model.is_proper({k: gen_of(x) for k, x in zip(keys, g)})]
    return full.restrict_to(keep, check="sub", name=name or "⊗̂"), full


def inclusion(sub: FreeComplex, full: FreeComplex) -> ChainMap:
    return ChainMap(sub, full, {g: {g: 1} for g in sub.degree}, name="incl")


# ---------------------------------------------------------------- constraints


@dataclass(frozen=True)
class SingleConstraint:
    """Members at ``positions`` together with the ``fixed`` elements must be proper.

    ``fixed`` maps an oracle key to an element ``{generator: coefficient}``.
    """

    positions: tuple
    fixed: tuple = ()  # ((key, element dict as tuple of pairs)), ...)

    @classmethod
    def build(cls, positions: Iterable[int], fixed: Mapping | None = None) -> "SingleConstraint":
        fixed = fixed or {}
        return cls(tuple(positions), tuple((k, tuple(sorted(v.items(), key=repr))) for k, v in fixed.items()))

    def fixed_elements(self) -> dict:
        return {k: dict(v) for k, v in self.fixed}


@dataclass(frozen=True)
class Constraint:
    singles: tuple = ()

    def problems(self, model: GeometryModel) -> list[str]:
        out = []
        for i, c in enumerate(self.singles):
            fx = c.fixed_elements()
            if len(fx) >= 2 and not proper(model, fx):
                out.append(f"constraint {i}: fixed elements do not intersect properly")
        return out

    def validate(self, model: GeometryModel) -> None:
        problems = self.problems(model)
        if problems:
            raise InvalidArgument("; ".join(problems))

    def admits(self, model: GeometryModel, keys: Sequence, gens: Sequence) -> bool:
        for c in self.singles:
            tup = {keys[i]: {gens[i]: 1} for i in c.positions}
            tup.update(c.fixed_elements())
            if len(tup) >= 2 and not proper(model, tup):
                return False
        return True


def distinguished(model: GeometryModel, factors: Sequence[tuple[Hashable, FreeComplex]], constraint: Constraint,
                  gen_of: Callable = lambda g: g, name: str = "") -> tuple[FreeComplex, FreeComplex]:
    """``([⊗ C_i]_C, ⊗ C_i)``; the first is checked to be a subcomplex."""
    constraint.validate(model)
    keys = [k for k, _ in factors]
    full = tensor(*[C for _, C in factors], name="⊗")
    keep = [g for g in full.degree if constraint.admits(model, keys, [gen_of(x) for x in g])]
    return full.restrict_to(keep, check="sub", name=name or "[⊗]_C"), full


def hat_constraint(r: int) -> Constraint:
    """The single constraint whose distinguished subcomplex is the restricted tensor product."""
    return Constraint((SingleConstraint.build(range(r)),))

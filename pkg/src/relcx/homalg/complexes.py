"""Free graded complexes over the integers with named generators.

Elements are sparse vectors ``{generator: int}``.  A complex stores the degree
of every generator and the image of each generator under the differential of
degree +1.  Chain maps store generator images the same way, so equality of maps
is equality of canonical dicts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import linalg

Gen = Hashable
Vec = dict


class InvalidComplex(ValueError):
    """A differential or map violated its defining identity."""


# ------------------------------------------------------------------ vectors


def vadd(acc: Vec, v: Mapping, c: int = 1) -> Vec:
    """``acc += c * v`` in place, dropping zeros."""
    if not c:
        return acc
    for g, x in v.items():
        y = acc.get(g, 0) + c * x
        if y:
            acc[g] = y
        else:
            acc.pop(g, None)
    return acc


def vscale(v: Mapping, c: int) -> Vec:
    return {g: c * x for g, x in v.items()} if c else {}


def vclean(v: Mapping) -> Vec:
    return {g: x for g, x in v.items() if x}


def apply_table(table: Mapping, v: Mapping) -> Vec:
    out: Vec = {}
    for g, x in v.items():
        img = table.get(g)
        if img:
            vadd(out, img, x)
    return out


# ------------------------------------------------------------------ records


@dataclass(frozen=True)
class HomologyRecord:
    degree: int
    betti: int
    torsion: tuple = ()

    @property
    def is_zero(self) -> bool:
        return self.betti == 0 and not self.torsion


# ------------------------------------------------------------------ complexes


class FreeComplex:
    """Finitely generated free complex with differential of degree +1."""

    def __init__(self, degree: Mapping[Gen, int], d: Mapping[Gen, Mapping], *, validate: bool = True, name: str = ""):
        self.degree: dict = dict(degree)
        self.d: dict = {g: vclean(v) for g, v in d.items() if v}
        self.name = name
        self._by_degree: dict | None = None
        self._divisors: dict = {}
        if validate:
            self.validate()

    @classmethod
    def from_basis(cls, basis: Mapping[int, Sequence], dfun: Callable[[Gen], Mapping] | Mapping | None = None, **kw) -> "FreeComplex":
        degree = {g: p for p, gs in basis.items() for g in gs}
        if dfun is None:
            d = {}
        elif callable(dfun):
            d = {g: dfun(g) for g in degree}
        else:
            d = dict(dfun)
        return cls(degree, d, **kw)

    @classmethod
    def zero(cls, name: str = "") -> "FreeComplex":
        return cls({}, {}, name=name)

    # -- structure
    def gens(self, p: int | None = None) -> list:
        if p is None:
            return list(self.degree)
        return self.by_degree().get(p, [])

    def by_degree(self) -> dict:
        if self._by_degree is None:
            out: dict = {}
            for g, p in self.degree.items():
                out.setdefault(p, []).append(g)
            self._by_degree = out
        return self._by_degree

    def degrees(self) -> list[int]:
        return sorted(self.by_degree())

    def rank(self, p: int | None = None) -> int:
        return len(self.degree) if p is None else len(self.gens(p))

    def __len__(self) -> int:
        return len(self.degree)

    def __contains__(self, g) -> bool:
        return g in self.degree

    def diff(self, v: Mapping) -> Vec:
        return apply_table(self.d, v)

    def matrix(self, p: int) -> dict:
        """Sparse columns of ``d: C^p -> C^{p+1}``."""
        return {g: self.d[g] for g in self.gens(p) if g in self.d}

    def validate(self) -> None:
        for g, img in self.d.items():
            if g not in self.degree:
                raise InvalidComplex(f"{self.name}: differential on unknown generator {g!r}")
            p = self.degree[g]
            for h in img:
                q = self.degree.get(h)
                if q is None:
                    raise InvalidComplex(f"{self.name}: d({g!r}) hits unknown generator {h!r}")
                if q != p + 1:
                    raise InvalidComplex(f"{self.name}: d({g!r}) has wrong degree at {h!r}")
        bad = self.dd_witness()
        if bad is not None:
            raise InvalidComplex(f"{self.name}: d∘d != 0 at generator {bad!r}")

    def dd_witness(self):
        """A generator with ``d(d(g)) != 0``, or None."""
        for g, img in self.d.items():
            if self.diff(img):
                return g
        return None

    # -- homology
    def divisors(self, p: int) -> list[int]:
        if p not in self._divisors:
            self._divisors[p] = linalg.elementary_divisors(self.matrix(p))
        return self._divisors[p]

    def homology(self, p: int) -> HomologyRecord:
        incoming = self.divisors(p - 1)
        outgoing = self.divisors(p)
        betti = self.rank(p) - len(outgoing) - len(incoming)
        return HomologyRecord(p, betti, tuple(x for x in incoming if x > 1))

    def homology_all(self) -> list[HomologyRecord]:
        return [self.homology(p) for p in self.degrees()]

    def is_acyclic(self) -> bool:
        return all(h.is_zero for h in self.homology_all())

    def cycles(self, p: int) -> list[Vec]:
        return linalg.kernel_sparse(self.d, self.gens(p))

    # -- sub and quotient
    def restrict_to(self, keep: Iterable[Gen], *, name: str = "", check: str = "sub") -> "FreeComplex":
        """Subcomplex (``check='sub'``) or quotient (``check='quotient'``) on ``keep``."""
        keep = set(keep)
        if check == "sub":
            for g in keep:
                for h in self.d.get(g, {}):
                    if h not in keep:
                        raise InvalidComplex(f"{name or self.name}: span not closed under d at {g!r}")
        deg = {g: p for g, p in self.degree.items() if g in keep}
        d = {g: {h: x for h, x in self.d[g].items() if h in keep} for g in deg if g in self.d}
        return FreeComplex(deg, d, name=name or self.name, validate=True)

    def relabel(self, f: Callable[[Gen], Gen], name: str = "") -> "FreeComplex":
        deg = {f(g): p for g, p in self.degree.items()}
        d = {f(g): {f(h): x for h, x in img.items()} for g, img in self.d.items()}
        return FreeComplex(deg, d, name=name or self.name, validate=False)

    def __repr__(self) -> str:
        ranks = ", ".join(f"{p}:{self.rank(p)}" for p in self.degrees())
        return f"FreeComplex({self.name or '?'}; {ranks})"


# ------------------------------------------------------------------ chain maps


class ChainMap:
    """Degree-preserving (up to ``shift``) map given by generator images."""

    def __init__(self, src: FreeComplex, tgt: FreeComplex, table: Mapping[Gen, Mapping], shift: int = 0, *, validate: bool = True, name: str = ""):
        self.src = src
        self.tgt = tgt
        self.shift = shift
        self.table: dict = {g: vclean(v) for g, v in table.items() if v}
        self.name = name
        if validate:
            self.validate()

    @classmethod
    def from_function(cls, src, tgt, f: Callable[[Gen], Mapping], **kw) -> "ChainMap":
        return cls(src, tgt, {g: f(g) for g in src.degree}, **kw)

    @classmethod
    def identity(cls, C: FreeComplex) -> "ChainMap":
        return cls(C, C, {g: {g: 1} for g in C.degree}, validate=False, name="id")

    @classmethod
    def zero(cls, src, tgt) -> "ChainMap":
        return cls(src, tgt, {}, validate=False)

    def __call__(self, v: Mapping) -> Vec:
        return apply_table(self.table, v)

    def image(self, g) -> Vec:
        return self.table.get(g, {})

    def matrix(self, p: int) -> dict:
        return {g: self.table[g] for g in self.src.gens(p) if g in self.table}

    def validate(self) -> None:
        for g, img in self.table.items():
            if g not in self.src.degree:
                raise InvalidComplex(f"{self.name}: map defined on unknown generator {g!r}")
            p = self.src.degree[g] + self.shift
            for h in img:
                if self.tgt.degree.get(h) != p:
                    raise InvalidComplex(f"{self.name}: image of {g!r} leaves degree {p} at {h!r}")
        bad = self.commutation_witness()
        if bad is not None:
            raise InvalidComplex(f"{self.name}: d∘f != f∘d at generator {bad!r}")

    def commutation_witness(self):
        for g in self.src.degree:
            lhs = self.tgt.diff(self.table.get(g, {}))
            rhs = self(self.src.d.get(g, {}))
            if lhs != rhs:
                return g
        return None

    def compose(self, inner: "ChainMap", name: str = "") -> "ChainMap":
        """``self ∘ inner``."""
        table = {g: self(img) for g, img in inner.table.items()}
        return ChainMap(inner.src, self.tgt, table, inner.shift + self.shift, validate=False, name=name)

    def __matmul__(self, inner: "ChainMap") -> "ChainMap":
        return self.compose(inner)

    def _combine(self, other: "ChainMap", c: int) -> "ChainMap":
        table = {g: dict(v) for g, v in self.table.items()}
        for g, v in other.table.items():
            vadd(table.setdefault(g, {}), v, c)
        return ChainMap(self.src, self.tgt, table, self.shift, validate=False)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return ChainMap(self.src, self.tgt, {g: vscale(v, -1) for g, v in self.table.items()}, self.shift, validate=False)

    def same_as(self, other: "ChainMap") -> bool:
        return self.difference_witness(other) is None

    def difference_witness(self, other: "ChainMap"):
        for g in set(self.table) | set(other.table):
            if self.table.get(g, {}) != other.table.get(g, {}):
                return g
        return None

    def __eq__(self, other) -> bool:
        return isinstance(other, ChainMap) and self.same_as(other)

    __hash__ = None  # type: ignore[assignment]


# ------------------------------------------------------------------ constructions


def shift(C: FreeComplex, k: int, tag=None) -> FreeComplex:
    """``C[k]``: degree p holds C^{p+k}; differential multiplied by (-1)^k.

    Generator ids are kept unless ``tag`` is given, in which case each id
    becomes ``(tag, g)``.
    """
    s = -1 if k % 2 else 1
    f = (lambda g: g) if tag is None else (lambda g: (tag, g))
    deg = {f(g): p - k for g, p in C.degree.items()}
    d = {f(g): {f(h): s * x for h, x in img.items()} for g, img in C.d.items()}
    return FreeComplex(deg, d, name=f"{C.name}[{k}]", validate=False)


def direct_sum(parts: Sequence[tuple[Hashable, FreeComplex]], name: str = "") -> FreeComplex:
    deg, d = {}, {}
    for tag, C in parts:
        for g, p in C.degree.items():
            deg[(tag, g)] = p
        for g, img in C.d.items():
            d[(tag, g)] = {(tag, h): x for h, x in img.items()}
    return FreeComplex(deg, d, name=name, validate=False)


def tensor(*factors: FreeComplex, name: str = "") -> FreeComplex:
    """Tensor product with the reversed-order sign rule.

    ``d(x1⊗...⊗xn) = Σ_i (-1)^{Σ_{j>i} deg xj} x1⊗...⊗d(xi)⊗...⊗xn``.
    Generators are tuples in lexicographic factor order.
    """
    deg: dict = {}
    d: dict = {}
    lists = [list(C.degree.items()) for C in factors]
    for combo in iproduct(*lists):
        g = tuple(x for x, _ in combo)
        degs = [p for _, p in combo]
        deg[g] = sum(degs)
        img: Vec = {}
        tail = 0
        for i in range(len(combo) - 1, -1, -1):
            di = factors[i].d.get(g[i])
            if di:
                s = -1 if tail % 2 else 1
                for h, x in di.items():
                    key = g[:i] + (h,) + g[i + 1 :]
                    img[key] = img.get(key, 0) + s * x
            tail += degs[i]
        img = vclean(img)
        if img:
            d[g] = img
    return FreeComplex(deg, d, name=name, validate=False)


def tensor_sign(degs: Sequence[int], i: int) -> int:
    """Sign attached to the differential of factor ``i`` in a tensor product."""
    return -1 if sum(degs[i + 1 :]) % 2 else 1


def tensor_maps(maps: Sequence[ChainMap], src: FreeComplex, tgt: FreeComplex) -> ChainMap:
    """``f1 ⊗ ... ⊗ fn`` between tensor complexes built by ``tensor`` (degree-preserving maps)."""
    table: dict = {}
    for g in src.degree:
        img: Vec = {(): 1}
        for f, x in zip(maps, g):
            nxt: Vec = {}
            for key, c in img.items():
                for h, y in f.table.get(x, {}).items():
                    k2 = key + (h,)
                    nxt[k2] = nxt.get(k2, 0) + c * y
            img = vclean(nxt)
            if not img:
                break
        if img:
            table[g] = img
    return ChainMap(src, tgt, table, validate=False)


def cone(f: ChainMap, name: str = "") -> FreeComplex:
    """``Cone(f)^p = A^{p+1} ⊕ B^p`` with ``d(a, b) = (-da, f(a) + db)``."""
    if f.shift:
        raise InvalidComplex("cone needs a degree-preserving map")
    A, B = f.src, f.tgt
    deg = {("src", g): p - 1 for g, p in A.degree.items()}
    deg.update({("tgt", g): p for g, p in B.degree.items()})
    d: dict = {}
    for g in A.degree:
        img = {("src", h): -x for h, x in A.d.get(g, {}).items()}
        for h, x in f.table.get(g, {}).items():
            img[("tgt", h)] = img.get(("tgt", h), 0) + x
        d[("src", g)] = img
    for g, img in B.d.items():
        d[("tgt", g)] = {("tgt", h): x for h, x in img.items()}
    return FreeComplex(deg, d, name=name or f"Cone({f.name})", validate=False)


def is_quasi_iso(f: ChainMap) -> bool:
    return cone(f).is_acyclic()


# ------------------------------------------------------------------ homology comparisons


@dataclass
class ZigZag:
    """Composite of chain maps, some of which are inverted on homology.

    ``steps`` are applied left to right; an inverted step ``t: W -> D`` is
    traversed from ``D`` back to ``W``.
    """

    steps: list = field(default_factory=list)  # (ChainMap, inverted: bool)

    def then(self, f: ChainMap, inverted: bool = False) -> "ZigZag":
        return ZigZag(self.steps + [(f, inverted)])


@dataclass
class ComparisonResult:
    equal: bool
    exact: bool  # False when a rational lift was needed somewhere
    witness: object = None
    degrees: tuple = ()


class _Inverter:
    """Lift cycles of ``D`` through a quasi-isomorphism ``t: W -> D`` up to boundaries."""

    def __init__(self, t: ChainMap):
        self.t = t
        self._solvers: dict = {}

    def lift(self, y: Vec, p: int):
        solver = self._solvers.get(p)
        if solver is None:
            W, D = self.t.src, self.t.tgt
            cols: dict = {}
            for w in W.gens(p):
                col = {("D", h): x for h, x in self.t.table.get(w, {}).items()}
                for h, x in W.d.get(w, {}).items():
                    col[("W", h)] = x
                cols[("w", w)] = col
            for b in D.gens(p - 1):
                col = {("D", h): x for h, x in D.d.get(b, {}).items()}
                if col:
                    cols[("b", b)] = col
            solver = linalg.BlockSolver(cols)
            self._solvers[p] = solver
        rhs = {("D", h): x for h, x in y.items()}
        sol = solver.solve(rhs)
        exact = True
        if sol is None:
            sol = solver.solve(rhs, rational=True)
            exact = False
            if sol is None:
                return None, False
        return {key[1]: x for key, x in sol.items() if key[0] == "w"}, exact


def _boundary_check(D: FreeComplex, v: Vec, p: int, cache: dict):
    """(is boundary over Z, is boundary over Q)."""
    if not v:
        return True, True
    solver = cache.get(p)
    if solver is None:
        solver = linalg.BlockSolver({g: D.d[g] for g in D.gens(p - 1) if g in D.d})
        cache[p] = solver
    if solver.solve(v) is not None:
        return True, True
    return False, solver.solve(v, rational=True) is not None


def equal_on_homology(f, g, source: FreeComplex | None = None, degrees: Iterable[int] | None = None) -> ComparisonResult:
    """Whether two maps (ChainMaps or ZigZags) from the same source agree on homology.

    Checks every integral cycle basis vector in the relevant degrees.  When an
    inverted step needs a non-integral lift the comparison is done over the
    rationals and ``exact`` is False.
    """
    zf = f if isinstance(f, ZigZag) else ZigZag([(f, False)])
    zg = g if isinstance(g, ZigZag) else ZigZag([(g, False)])
    C = source or zf.steps[0][0].src
    target = _zigzag_target(zf)
    inverters: dict = {}
    exact = True
    bcache: dict = {}
    if degrees is None:
        degrees = [p for p in C.degrees() if not C.homology(p).is_zero]
    degrees = tuple(degrees)
    for p in degrees:
        for z in C.cycles(p):
            vals = []
            for zz in (zf, zg):
                v, ex = _run(zz, z, p, inverters)
                if v is None:
                    return ComparisonResult(False, False, ("no lift", p, z), degrees)
                exact &= ex
                vals.append(v)
            diff = vadd(dict(vals[0]), vals[1], -1)
            if any(not isinstance(x, int) for x in diff.values()):
                exact = False
                ok = _boundary_check(target, diff, p + _zigzag_shift(zf), bcache)[1]
            else:
                zint, zrat = _boundary_check(target, diff, p + _zigzag_shift(zf), bcache)
                ok = zint if exact else zrat
            if not ok:
                return ComparisonResult(False, exact, (p, z), degrees)
    return ComparisonResult(True, exact, None, degrees)


def _zigzag_target(z: ZigZag) -> FreeComplex:
    f, inv = z.steps[-1]
    return f.src if inv else f.tgt


def _zigzag_shift(z: ZigZag) -> int:
    return sum((-f.shift if inv else f.shift) for f, inv in z.steps)


def _run(z: ZigZag, v: Vec, p: int, inverters: dict):
    exact = True
    for f, inv in z.steps:
        if inv:
            key = id(f)
            if key not in inverters:
                inverters[key] = _Inverter(f)
            v, ex = inverters[key].lift(v, p - f.shift)
            if v is None:
                return None, False
            exact &= ex
            p -= f.shift
        else:
            v = f(v) if all(isinstance(x, int) for x in v.values()) else _apply_rational(f, v)
            p += f.shift
    return v, exact


def _apply_rational(f: ChainMap, v: Vec) -> Vec:
    out: dict = {}
    for g, x in v.items():
        for h, y in f.table.get(g, {}).items():
            out[h] = out.get(h, 0) + x * y
    return {h: x for h, x in out.items() if x}

"""Scenario files, the property-check runner, random scenarios and the ``relcx`` command."""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Callable

from .cech import Constraint, SingleConstraint, distinguished, hat_constraint, inclusion, restricted_tensor
from .diagonal import DiagonalEngine, check_delta_props, check_diag_compat, constant_model, diag, surjections
from .funcx import FunctionComplexes, lemma_tot, segmentation_hat_equals, structure_law_problems
from .geomodel import ModelError, PointModel, TableMap, TableModel, Variety, interval_key, parse_key
from .homalg import oracle
from .homalg.complexes import ChainMap, FreeComplex, InvalidComplex, cone, is_quasi_iso, shift
from .homalg.multi import u_coherence_witness, u_iso
from .homalg.samples import random_double_complex, random_quasi_iso_cube
from .ordsets import FiniteOrderedSet, InvalidArgument, subsets

DATA_PACKAGE = "relcx.data"
CORPUS = ("point_n3.json", "point_n4.json", "point_const.json", "table_sample.json")
NEGATIVE = ("table_broken.json",)


# ---------------------------------------------------------------- loading


class LoadError(Exception):
    """Every schema or validator problem found in a scenario, each with a location."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{loc}: {msg}" for loc, msg in problems))


@dataclass
class Scenario:
    kind: str  # "point" or "table"
    model: object
    n: int
    dims_a: tuple
    checks: dict
    seed: int = 0
    name: str = ""


def _resolve(path: str | Path) -> Path:
    """Paths under ``examples/`` fall back to the fixtures shipped with the package."""
    p = Path(path)
    if p.exists():
        return p
    if p.parts and p.parts[0] == "examples":
        bundled = resources.files(DATA_PACKAGE).joinpath(p.name)
        if bundled.is_file():
            return Path(str(bundled))
    return p


def load_scenario(path: str | Path) -> Scenario:
    p = _resolve(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise LoadError([(str(path), f"cannot read: {exc.strerror or exc}")]) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoadError([(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)]) from None
    return scenario_from_dict(data, name=p.stem)


def scenario_from_dict(data, name: str = "") -> Scenario:
    errs: list[tuple[str, str]] = []
    if not isinstance(data, dict):
        raise LoadError([("$", "scenario must be an object")])
    kind = data.get("model")
    if kind == "point":
        sc = _load_point(data, errs, name)
    elif kind == "table":
        sc = _load_table(data, errs, name)
    else:
        raise LoadError([("model", f"expected 'point' or 'table', got {kind!r}")])
    checks = data.get("checks", {})
    if not isinstance(checks, dict):
        errs.append(("checks", "must be an object"))
    elif sc is not None:
        _check_options(checks, sc.n, errs)
    if errs:
        raise LoadError(errs)
    return sc


def _index_set(v, n: int) -> bool:
    return isinstance(v, list) and all(isinstance(x, int) and 1 < x < n for x in v) and len(set(v)) == len(v)


def _check_options(checks: dict, n: int, errs: list) -> None:
    """Validate optional per-check inputs against the interior indices 2..n-1."""
    for i, case in enumerate(checks.get("exactness", [])):
        loc = f"checks.exactness[{i}]"
        if not (isinstance(case, list) and len(case) == 2 and all(_index_set(x, n) for x in case)):
            errs.append((loc, "expected [R, J] with R, J lists of interior indices"))
        elif not case[1]:
            errs.append((loc, "J must be non-empty"))
        elif set(case[0]) & set(case[1]):
            errs.append((loc, "R and J must be disjoint"))
    for i, K in enumerate(checks.get("K", [])):
        if not _index_set(K, n):
            errs.append((f"checks.K[{i}]", "expected a list of interior indices"))


def _expect_list(data, key, errs, loc) -> list:
    v = data.get(key, [])
    if not isinstance(v, list):
        errs.append((f"{loc}{key}", "must be a list"))
        return []
    return v


def _load_point(data: dict, errs: list, name: str) -> Scenario | None:
    base = data.get("base")
    if not isinstance(base, dict):
        errs.append(("base", "missing object with S and Sbar"))
        base = {}
    S = [str(x) for x in _expect_list(base, "S", errs, "base.")]
    Sbar = [str(x) for x in _expect_list(base, "Sbar", errs, "base.")]
    raw = _expect_list(data, "varieties", errs, "")
    if not raw:
        errs.append(("varieties", "at least one variety is required"))
    varieties = {}
    for i, v in enumerate(raw, start=1):
        loc = f"varieties[{i - 1}]"
        if not isinstance(v, dict):
            errs.append((loc, "must be an object"))
            continue
        pts = []
        for j, pt in enumerate(_expect_list(v, "points", errs, loc + ".")):
            if not isinstance(pt, dict) or "label" not in pt or "toS" not in pt:
                errs.append((f"{loc}.points[{j}]", "needs label and toS"))
                continue
            if str(pt["toS"]) not in S:
                errs.append((f"{loc}.points[{j}]", f"maps to {pt['toS']!r}, which is not in S"))
            pts.append((str(pt["label"]), str(pt["toS"])))
        bars = []
        for j, pt in enumerate(_expect_list(v, "bar_points", errs, loc + ".")):
            if not isinstance(pt, dict) or "label" not in pt or "toSbar" not in pt:
                errs.append((f"{loc}.bar_points[{j}]", "needs label and toSbar"))
                continue
            if str(pt["toSbar"]) not in Sbar or str(pt["toSbar"]) in S:
                errs.append((f"{loc}.bar_points[{j}]", f"maps to {pt['toSbar']!r}, which is not in Sbar - S"))
            bars.append((str(pt["label"]), str(pt["toSbar"])))
        dim = v.get("dim", 0)
        if not isinstance(dim, int):
            errs.append((f"{loc}.dim", "must be an integer"))
            dim = 0
        varieties[i] = Variety(str(v.get("name", f"X{i}")), tuple(pts), tuple(bars), dim)
    n = len(varieties)
    dims_a = data.get("dims_a", [0] * max(n - 1, 0))
    if not isinstance(dims_a, list) or not all(isinstance(x, int) for x in dims_a):
        errs.append(("dims_a", "must be a list of integers"))
        dims_a = [0] * max(n - 1, 0)
    if n < 2:
        errs.append(("varieties", "a sequence needs at least two varieties"))
    if errs:
        return None
    order = FiniteOrderedSet(tuple(range(1, n + 1)))
    model = PointModel(S, Sbar, varieties, dims_a, order, validate=False)
    errs.extend(("model", msg) for msg in model.problems())
    return Scenario("point", model, n, tuple(dims_a), data.get("checks", {}), int(data.get("seed", 0)), name)


def _load_complex(key: str, desc, errs: list) -> FreeComplex | None:
    loc = f"complexes.{key}"
    if not isinstance(desc, dict):
        errs.append((loc, "must be an object"))
        return None
    degree = {}
    gens = desc.get("generators", {})
    if not isinstance(gens, dict):
        errs.append((f"{loc}.generators", "must map degrees to generator lists"))
        return None
    for p, names in gens.items():
        try:
            deg = int(p)
        except ValueError:
            errs.append((f"{loc}.generators.{p}", "degree is not an integer"))
            continue
        for g in names:
            if str(g) in degree:
                errs.append((f"{loc}.generators.{p}", f"repeated generator {g!r}"))
            degree[str(g)] = deg
    d: dict = {}
    ok = True
    for t, entry in enumerate(desc.get("d", [])):
        eloc = f"{loc}.d[{t}]"
        if not (isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], int)):
            errs.append((eloc, "triplet must be [source, target, integer]"))
            ok = False
            continue
        a, b, c = str(entry[0]), str(entry[1]), entry[2]
        if a not in degree or b not in degree:
            errs.append((eloc, f"unknown generator in {entry!r}"))
            ok = False
            continue
        if degree[b] != degree[a] + 1:
            errs.append((eloc, f"{a}->{b} does not raise degree by one"))
            ok = False
            continue
        d.setdefault(a, {})
        d[a][b] = d[a].get(b, 0) + c
    if not ok:
        return None
    try:
        return FreeComplex(degree, d, name=key)
    except InvalidComplex as exc:
        errs.append((loc, str(exc)))
        return None


def _load_table(data: dict, errs: list, name: str) -> Scenario | None:
    n = data.get("n")
    if not isinstance(n, int) or n < 2:
        errs.append(("n", "must be an integer >= 2"))
        return None
    raw = data.get("complexes", {})
    if not isinstance(raw, dict):
        errs.append(("complexes", "must be an object keyed by i or i-j"))
        return None
    spaces = {}
    for key, desc in raw.items():
        try:
            parse_key(key)
        except ValueError:
            errs.append((f"complexes.{key}", "key is not of the form i or i-j"))
            continue
        C = _load_complex(key, desc, errs)
        if C is not None:
            spaces[key] = C
    products: dict = {}
    for t, pr in enumerate(_expect_list(data, "products", errs, "")):
        loc = f"products[{t}]"
        L, R = str(pr.get("left")), str(pr.get("right"))
        if L not in spaces or R not in spaces:
            errs.append((loc, f"unknown factor {L if L not in spaces else R!r}"))
            continue
        table: dict = {}
        for u, e in enumerate(pr.get("entries", [])):
            if not (isinstance(e, list) and len(e) == 4 and isinstance(e[3], int)):
                errs.append((f"{loc}.entries[{u}]", "entry must be [left gen, right gen, target gen, integer]"))
                continue
            img = table.setdefault((str(e[0]), str(e[1])), {})
            img[str(e[2])] = img.get(str(e[2]), 0) + e[3]
        products[(L, R)] = table
    proper = set()
    for t, tup in enumerate(_expect_list(data, "proper", errs, "")):
        loc = f"proper[{t}]"
        if not isinstance(tup, list) or len(tup) < 2 or not all(isinstance(x, list) and len(x) == 2 for x in tup):
            errs.append((loc, "a proper tuple lists at least two [space, generator] pairs"))
            continue
        proper.add(frozenset((str(k), str(g)) for k, g in tup))
    maps = []
    for t, m in enumerate(_expect_list(data, "maps", errs, "")):
        loc = f"maps[{t}]"
        src, tgt = spaces.get(str(m.get("source"))), spaces.get(str(m.get("target")))
        if src is None or tgt is None:
            errs.append((loc, "unknown source or target space"))
            continue
        table = {}
        bad = False
        for u, e in enumerate(m.get("entries", [])):
            if not (isinstance(e, list) and len(e) == 3 and isinstance(e[2], int)) or str(e[0]) not in src.degree \
                    or str(e[1]) not in tgt.degree:
                errs.append((f"{loc}.entries[{u}]", f"bad triplet {e!r}"))
                bad = True
                continue
            img = table.setdefault(str(e[0]), {})
            img[str(e[1])] = img.get(str(e[1]), 0) + e[2]
        if bad:
            continue
        try:
            cm = ChainMap(src, tgt, table, validate=False, name=str(m.get("name", loc)))
        except InvalidComplex as exc:
            errs.append((loc, str(exc)))
            continue
        maps.append(TableMap(cm.name, str(m["source"]), str(m["target"]), cm, bool(m.get("smooth")), bool(m.get("projective"))))
    dims = data.get("dims", {})
    if errs:
        return None
    model = TableModel(n, spaces, dims, products, proper, maps, validate=False)
    errs.extend(("model", msg) for msg in model.problems())
    return Scenario("table", model, n, (), data.get("checks", {}), int(data.get("seed", 0)), name)


# ---------------------------------------------------------------- witnesses


def minimize(items: list, fails: Callable[[list], bool]) -> list:
    """Greedy deletion: drop items one at a time while ``fails`` stays true."""
    keep = list(items)
    i = 0
    while i < len(keep):
        trial = keep[:i] + keep[i + 1 :]
        if trial and fails(trial):
            keep = trial
        else:
            i += 1
    return keep


def _dd_witness(C: FreeComplex):
    bad = [g for g in C.d if C.diff(C.d[g])]
    if not bad:
        return None
    g = minimize(bad, lambda gs: any(C.diff(C.d[x]) for x in gs))[0]
    return {"generator": repr(g), "degree": C.degree[g]}


def _map_witness(f: ChainMap, g: ChainMap, where=None):
    diff = [x for x in set(f.table) | set(g.table) if f.table.get(x, {}) != g.table.get(x, {})]
    if not diff:
        return None
    diff.sort(key=repr)
    x = minimize(diff, lambda xs: any(f.table.get(y, {}) != g.table.get(y, {}) for y in xs))[0]
    return {"generator": repr(x), "degree": f.src.degree.get(x), "where": repr(where)}


# ---------------------------------------------------------------- checks


class Skip(Exception):
    pass


@dataclass
class Outcome:
    ok: bool
    witness: dict | None = None
    detail: str = ""


@dataclass
class CheckResult:
    check_id: str
    anchor: str
    status: str  # PASS, FAIL, SKIP
    elapsed_ms: int
    witness: dict | None = None
    detail: str = ""


@dataclass
class CheckReport:
    scenario: str
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != "FAIL" for r in self.results)

    def to_text(self, timings: bool = True) -> str:
        lines = []
        for r in self.results:
            ms = str(r.elapsed_ms) if timings else "-"
            lines.append(f"{r.status} {r.check_id} {r.anchor} {ms}")
            if r.status == "FAIL":
                if r.witness is not None:
                    lines.append(f"  witness: {json.dumps(r.witness, sort_keys=True)}")
                if r.detail:
                    lines.append(f"  detail: {r.detail}")
        return "\n".join(lines)

    def to_json(self, timings: bool = True) -> str:
        rows = []
        for r in self.results:
            row = {"id": r.check_id, "anchor": r.anchor, "status": r.status,
                   "elapsed_ms": r.elapsed_ms if timings else None}
            if r.witness is not None:
                row["witness"] = r.witness
            if r.detail:
                row["detail"] = r.detail
            rows.append(row)
        return json.dumps({"scenario": self.scenario, "ok": self.ok, "checks": rows}, indent=2, sort_keys=True)


class Context:
    """Lazily built objects shared by the checks of one scenario."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self._fc = None
        self._engines: dict = {}

    @property
    def fc(self) -> FunctionComplexes:
        if self.sc.kind != "point":
            raise Skip("function complexes are built for point models only")
        if self._fc is None:
            self._fc = FunctionComplexes(self.sc.model)
        return self._fc

    def intervals(self, min_len=2, max_len=None):
        order = self.sc.model.order
        els = order.elements
        max_len = max_len or len(els)
        out = []
        for a in range(len(els)):
            for b in range(a + min_len - 1, min(len(els), a + max_len)):
                out.append(FiniteOrderedSet(els[a : b + 1]))
        return out

    def constant_engines(self, length: int = 4):
        """One engine per distinct variety, on the constant sequence of that variety."""
        if self.sc.kind != "point":
            raise Skip("diagonal cycles are built for point models only")
        m = self.sc.model
        seen = []
        for i in m.order:
            V = m.variety(i)
            if V not in seen:
                seen.append(V)
        for V in seen:
            if V not in self._engines:
                self._engines[V] = _shape_engine(_shape(V), length, m.S, m.Sbar)
        return [(V.name, self._engines[V]) for V in seen]

    def rng(self, salt: str) -> random.Random:
        return random.Random(f"{self.sc.seed}:{salt}")


def _shape(V: Variety) -> tuple:
    """The variety up to relabeling points: sorted base images and dimension."""
    return tuple(sorted(s for _, s in V.points)), tuple(sorted(s for _, s in V.bar_points)), V.dim


@lru_cache(maxsize=64)
def _shape_engine(shape: tuple, length: int, S: tuple, Sbar: tuple) -> DiagonalEngine:
    points, bars, dim = shape
    V = Variety("shape", tuple((f"p{i}", s) for i, s in enumerate(points)),
                tuple((f"q{i}", s) for i, s in enumerate(bars)), dim)
    return DiagonalEngine(constant_model(V, length, S, Sbar))


def _point_complexes(ctx: Context, max_len=None):
    fc = ctx.fc
    for I in ctx.intervals(max_len=max_len):
        for J in subsets(I.interior()):
            yield (I.elements, "fcal", J), fc.fcal(I, J).complex
            for Sigma in subsets([k for k in I.interior() if k not in J]):
                if Sigma:
                    yield (I.elements, "fcal_sigma", J, Sigma), fc.fcal_sigma(I, J, Sigma)
            yield (I.elements, "cone_iota", J), cone(fc.iota(I, J))
        yield (I.elements, "fcal_total"), fc.fcal_total(I)
        for S in subsets(I.interior()):
            yield (I.elements, "F", S), fc.F(I, S)


def _table_complexes(model: TableModel):
    for k, C in model.spaces.items():
        yield ("space", k), C
    keys = model.keys()
    for r in (2, 3):
        for ks in combinations(keys, r):
            if _consecutive(ks):
                sub, full = model.restricted_tensor(list(ks))
                yield ("restricted", ks), sub
                yield ("tensor", ks), full
                yield ("cone", ks), cone(inclusion(sub, full))


def _consecutive(ks) -> bool:
    bounds = [parse_key(k) for k in ks]
    return all(b[1] + 1 == c[0] for b, c in zip(bounds, bounds[1:]))


def check_dd(ctx: Context) -> Outcome:
    gen = _point_complexes(ctx) if ctx.sc.kind == "point" else _table_complexes(ctx.sc.model)
    count = 0
    for where, C in gen:
        count += 1
        w = _dd_witness(C)
        if w:
            w["where"] = repr(where)
            return Outcome(False, w)
    return Outcome(True, detail=f"{count} complexes")


def check_iota(ctx: Context) -> Outcome:
    fc = ctx.fc
    for I in ctx.intervals():
        A = fc.closed_set(I)
        for J in subsets(I.interior()):
            C = fc.fcal(I, J).complex
            if not is_quasi_iso(fc.iota(I, J)):
                bad = [h.degree for h in cone(fc.iota(I, J)).homology_all() if not h.is_zero]
                return Outcome(False, {"where": repr((I.elements, J)), "degree": bad[0]})
            if C.homology(0).betti != len(A):
                return Outcome(False, {"where": repr((I.elements, J)), "degree": 0},
                               f"H0 rank {C.homology(0).betti} != |A| = {len(A)}")
    return Outcome(True)


def check_acyclic(ctx: Context) -> Outcome:
    fc = ctx.fc
    for I in ctx.intervals():
        T = fc.fcal_total(I)
        if len(I) == 2:
            want = [(h.degree, h.betti, h.torsion) for h in shift(fc.fcal(I, ()).complex, -1).homology_all() if not h.is_zero]
            got = [(h.degree, h.betti, h.torsion) for h in T.homology_all() if not h.is_zero]
            if want != got:
                return Outcome(False, {"where": repr(I.elements)}, f"{got} != {want}")
            continue
        bad = [h for h in T.homology_all() if not h.is_zero]
        if bad:
            return Outcome(False, {"where": repr(I.elements), "degree": bad[0].degree})
    return Outcome(True)


def check_cube(ctx: Context, count: int = 50) -> Outcome:
    rng = ctx.rng("cube")
    for t in range(count):
        T = tuple(range(rng.randint(1, 3)))
        comps, step = random_quasi_iso_cube(rng, T)
        tot = lemma_tot(T, comps, step)
        bad = [h for h in tot.homology_all() if not h.is_zero]
        if bad:
            return Outcome(False, {"sample": t, "degree": bad[0].degree})
    return Outcome(True, detail=f"{count} cubes")


def check_laws(ctx: Context) -> Outcome:
    fc = ctx.fc
    for I in ctx.intervals(min_len=3, max_len=4):
        problems = structure_law_problems(fc, I)
        if problems:
            law, args, g = problems[0]
            return Outcome(False, {"where": repr(I.elements), "law": law, "arguments": repr(args), "generator": repr(g)})
    return Outcome(True)


def _exactness_cases(ctx: Context):
    m = ctx.sc.model
    I = m.order
    inner = I.interior()
    given = ctx.sc.checks.get("exactness")
    if given:
        return [(I, tuple(R), tuple(J)) for R, J in given]
    cases = [(R, J) for R in subsets(inner) for J in subsets([k for k in inner if k not in R]) if J]
    if len(I) >= 5:
        rng = ctx.rng("exact")
        cases = sorted(rng.sample(cases, min(4, len(cases))))
    return [(I, R, J) for R, J in cases]


def check_exact(ctx: Context) -> Outcome:
    fc = ctx.fc
    if ctx.sc.n < 3:
        raise Skip("needs at least one interior index")
    for I, R, J in _exactness_cases(ctx):
        rep = fc.check_sigma_exactness(I, R, J)
        if not rep.exact:
            kind, stage, degree, *_ = rep.problems[0]
            return Outcome(False, {"R": list(R), "J": list(J), "stage": stage, "degree": degree}, kind)
    return Outcome(True)


def check_phipsi(ctx: Context) -> Outcome:
    fc = ctx.fc
    Ks = ctx.sc.checks.get("K")
    for I in ctx.intervals(min_len=3, max_len=4):
        for K in (subsets(I.interior()) if Ks is None else [tuple(k) for k in Ks if set(k) <= set(I.interior())]):
            if not K:
                continue
            rep = fc.check_prop_phi_psi(I, K)
            if not rep.equal:
                note = "commutes up to a global sign" if rep.sign == -1 else ""
                return Outcome(False, {"where": repr((I.elements, K)), "degree": repr(rep.witness)}, note)
    return Outcome(True)


def check_delta(ctx: Context) -> Outcome:
    for name, eng in ctx.constant_engines():
        fc = eng.base
        for k in range(2, 5):
            I = fc.interval(tuple(range(1, k + 1)))
            rep = check_delta_props(fc, I)
            if not rep.ok:
                bad = [f"tau{S}" for S, v in rep.tau.items() if not v] + [f"phi{K}" for K, v in rep.phi.items() if not v]
                if not rep.cocycle:
                    bad.insert(0, "cocycle")
                return Outcome(False, {"variety": name, "where": repr(I.elements), "property": bad[0] if bad else "length-two"})
    return Outcome(True)


def check_diag(ctx: Context) -> Outcome:
    for name, eng in ctx.constant_engines():
        maps = {}
        for m in range(2, 5):
            for n in range(2, min(m, 3) + 1):
                for lam in surjections(m, n):
                    D = diag(eng, lam)
                    g = D.commutation_witness()
                    if g is not None:
                        return Outcome(False, {"variety": name, "surjection": repr(lam.table), "generator": repr(g),
                                               "degree": D.src.degree[g]}, "not a chain map")
                    maps[lam] = D
                    for ell in lam.source.interior():
                        rep = check_diag_compat(eng, lam, ell)
                        if not rep.ok:
                            which = "phi" if not rep.phi else "tau"
                            return Outcome(False, {"variety": name, "surjection": repr(lam.table), "l": ell,
                                                   "square": which})
        for outer in maps:
            for inner in maps:
                if inner.target != outer.source or len(inner.source) > 4:
                    continue
                comp = outer.compose(inner)
                w = _map_witness(diag(eng, comp), maps[inner] @ maps[outer], (outer.table, inner.table))
                if w:
                    w["variety"] = name
                    return Outcome(False, w, "functoriality")
    return Outcome(True)


def check_u(ctx: Context, count: int = 20) -> Outcome:
    rng = ctx.rng("u")
    for t in range(count):
        A, B, C = (random_double_complex(rng, tag=x) for x in "ABC")
        u = u_iso(A, B)
        images = [next(iter(v)) for v in u.table.values() if len(v) == 1 and abs(next(iter(v.values()))) == 1]
        if len(images) != len(u.src.degree) or len(set(images)) != len(u.tgt.degree):
            return Outcome(False, {"sample": t}, "u is not a signed bijection of generators")
        g = u.commutation_witness()
        if g is not None:
            return Outcome(False, {"sample": t, "generator": repr(g)}, "u is not a chain map")
        w = u_coherence_witness(A, B, C)
        if w is not None:
            return Outcome(False, {"sample": t, "generator": repr(w)}, "three-factor square")
    return Outcome(True, detail=f"{count} triples")


def check_distinguished(ctx: Context) -> Outcome:
    sc = ctx.sc
    if sc.kind == "point":
        fc = ctx.fc
        for I in ctx.intervals(min_len=3, max_len=4):
            for S in subsets(I.interior()):
                if S and not segmentation_hat_equals(fc, I, S):
                    return Outcome(False, {"where": repr((I.elements, S))}, "F-level restricted tensor")
        return Outcome(True)
    model: TableModel = sc.model
    if model.boundary_closure_problems():
        return Outcome(False, {"problem": model.boundary_closure_problems()[0]})
    strict = 0
    for ks, sub, full in _table_restricted(model):
        factors = [(k, model.spaces[k]) for k in ks]
        hat, _ = restricted_tensor(model, factors)
        dist, _ = distinguished(model, factors, hat_constraint(len(ks)))
        if set(hat.degree) != set(dist.degree) or set(hat.degree) != set(sub.degree):
            return Outcome(False, {"factors": list(ks)}, "restricted tensor differs from the distinguished subcomplex")
        if len(sub.degree) < len(full.degree):
            strict += 1
            if not is_quasi_iso(inclusion(sub, full)):
                return Outcome(False, {"factors": list(ks)}, "inclusion is not a quasi-isomorphism")
    return Outcome(True, detail=f"{strict} strict restricted products")


def _table_restricted(model: TableModel):
    keys = model.keys()
    for r in (2, 3):
        for ks in combinations(keys, r):
            if _consecutive(ks):
                sub, full = model.restricted_tensor(list(ks))
                yield ks, sub, full


def check_oracle(ctx: Context) -> Outcome:
    gen = _point_complexes(ctx) if ctx.sc.kind == "point" else _table_complexes(ctx.sc.model)
    count = 0
    for where, C in gen:
        if len(C.degree) > 64:
            continue
        count += 1
        fast = {h.degree: h for h in C.homology_all()}
        betti = oracle.betti_numbers(C)
        for p, b in betti.items():
            if fast[p].betti != b:
                return Outcome(False, {"where": repr(where), "degree": p}, f"betti {fast[p].betti} != {b}")
        if len(C.degree) <= 24:
            for h in oracle.homology(C):
                if tuple(sorted(fast[h.degree].torsion)) != h.torsion:
                    return Outcome(False, {"where": repr(where), "degree": h.degree}, "torsion differs")
    return Outcome(True, detail=f"{count} complexes")


CHECKS: dict[str, tuple[str, Callable[[Context], Outcome]]] = {
    "acyclic": ("function-complex-acyclic", check_acyclic),
    "cube": ("cube-totalization-acyclic", check_cube),
    "dd": ("d-squared-zero", check_dd),
    "delta": ("diagonal-cycle", check_delta),
    "diag": ("diagonal-extension", check_diag),
    "distinguished": ("distinguished-subcomplex", check_distinguished),
    "exact": ("sigma-sequence-exact", check_exact),
    "iota": ("cech-resolution", check_iota),
    "laws": ("structure-map-laws", check_laws),
    "oracle": ("oracle-crosscheck", check_oracle),
    "phipsi": ("phi-psi-square", check_phipsi),
    "u": ("product-coherence", check_u),
}


def parse_selection(props: str | None) -> list[str]:
    if not props or props == "all":
        return sorted(CHECKS)
    ids = [p.strip() for p in props.split(",") if p.strip()]
    unknown = [p for p in ids if p not in CHECKS]
    if unknown:
        raise InvalidArgument(f"unknown check ids {unknown}; known: {sorted(CHECKS)}")
    return sorted(set(ids))


def run_checks(sc: Scenario, selection=None) -> CheckReport:
    """Run the selected checks in check-id order."""
    ids = sorted(selection) if selection else sorted(CHECKS)
    ctx = Context(sc)
    report = CheckReport(sc.name)
    for cid in ids:
        anchor, fn = CHECKS[cid]
        t0 = time.perf_counter()
        try:
            out = fn(ctx)
            status = "PASS" if out.ok else "FAIL"
            witness, detail = out.witness, out.detail
        except Skip as exc:
            status, witness, detail = "SKIP", None, str(exc)
        ms = int((time.perf_counter() - t0) * 1000)
        report.results.append(CheckResult(cid, anchor, status, ms, witness, detail))
    return report


# ---------------------------------------------------------------- random scenarios


def gen_scenario(n: int, sizes: int = 3, seed: int = 0, base_size: int | None = None) -> dict:
    """A random point-model scenario as a JSON-ready dict, determined by its arguments."""
    if not 2 <= n <= 5:
        raise InvalidArgument("n must lie in [2, 5]")
    if not 1 <= sizes <= 5:
        raise InvalidArgument("variety sizes must lie in [1, 5]")
    if base_size is not None and not 1 <= base_size <= 3:
        raise InvalidArgument("|S| must lie in [1, 3]")
    rng = random.Random(seed)
    S = [f"s{i}" for i in range(1, (base_size or rng.randint(1, 3)) + 1)]
    boundary = [f"b{i}" for i in range(1, rng.randint(0, 2) + 1)]
    varieties = []
    for i in range(1, n + 1):
        k = rng.randint(1, sizes)
        points = [{"label": f"x{i}_{j}", "toS": rng.choice(S)} for j in range(1, k + 1)]
        bars = [{"label": f"y{i}_{j}", "toSbar": rng.choice(boundary)} for j in range(1, rng.randint(0, 1) + 1)] if boundary else []
        varieties.append({"name": f"X{i}", "points": points, "bar_points": bars, "dim": 0})
    return {
        "model": "point",
        "seed": seed,
        "base": {"S": S, "Sbar": S + boundary},
        "varieties": varieties,
        "dims_a": [0] * (n - 1),
        "checks": {},
    }


def dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- command line


def _emit(report: CheckReport, fmt: str, timings: bool, out=None):
    print(report.to_json(timings) if fmt == "json" else report.to_text(timings), file=out or sys.stdout)


def cmd_check(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except LoadError as exc:
        for loc, msg in exc.problems:
            print(f"error: {loc}: {msg}", file=sys.stderr)
        return 2
    try:
        sel = parse_selection(args.props)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_checks(sc, sel)
    _emit(report, args.report, not args.no_timings)
    return 0 if report.ok else 1


def cmd_gen(args) -> int:
    try:
        data = gen_scenario(args.n, args.sizes, args.seed)
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dump(data)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def cmd_demo(args) -> int:
    code = 0
    for fname in CORPUS + NEGATIVE:
        path = resources.files(DATA_PACKAGE).joinpath(fname)
        print(f"== {fname}")
        try:
            sc = load_scenario(Path(str(path)))
        except LoadError as exc:
            expected = fname in NEGATIVE
            for loc, msg in exc.problems:
                print(f"load error: {loc}: {msg}")
            print("rejected as expected" if expected else "unexpected load error")
            if not expected:
                code = 2
            continue
        if fname in NEGATIVE:
            print("negative fixture was accepted")
            code = max(code, 1)
            continue
        report = run_checks(sc, parse_selection(args.props))
        _emit(report, args.report, not args.no_timings)
        if not report.ok:
            code = max(code, 1)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relcx", description="Property checks for relative cycle complexes on finite models.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run property checks on a scenario file")
    c.add_argument("--scenario", required=True)
    c.add_argument("--props", default="all", help="comma-separated check ids, or 'all'")
    c.add_argument("--report", choices=("text", "json"), default="text")
    c.add_argument("--no-timings", action="store_true", help="print '-' instead of elapsed milliseconds")
    c.set_defaults(func=cmd_check)
    g = sub.add_parser("gen", help="write a random point-model scenario")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--sizes", type=int, default=3, help="maximum number of points per variety")
    g.add_argument("--out", required=True, help="output path, or - for stdout")
    g.set_defaults(func=cmd_gen)
    d = sub.add_parser("demo", help="run the bundled corpus")
    d.add_argument("--props", default="all")
    d.add_argument("--report", choices=("text", "json"), default="text")
    d.add_argument("--no-timings", action="store_true")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

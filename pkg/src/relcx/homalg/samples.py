"""Seeded random inputs: small complexes, quasi-isomorphic cubes, quoted double complexes.

Everything is built from elementary summands (``Z`` alone, ``Z -k-> Z``) and
then scrambled by random transvections inside each (multi)degree, so the
differentials are not diagonal but the homology is known by construction.
"""
from __future__ import annotations

import random
from itertools import product as iproduct

from ..ordsets import subsets
from .complexes import ChainMap, FreeComplex, vadd, vclean
from .multi import Convention, MultiComplex


def _convert(v: dict, i, j, c: int) -> dict:
    """Rewrite ``v`` in the basis where ``e_i`` was replaced by ``e_i + c e_j``."""
    if i not in v:
        return dict(v)
    out = dict(v)
    out[j] = out.get(j, 0) - c * v[i]
    return vclean(out)


class _Scramble:
    """Random transvections within each degree class, with the induced isomorphism."""

    def __init__(self, degree: dict, diffs: list[dict], rng: random.Random, steps: int):
        self.degree = degree
        self.diffs = [dict(d) for d in diffs]
        gens = sorted(degree, key=repr)
        self.forward = {g: {g: 1} for g in gens}  # old generator -> new coordinates
        self.backward = {g: {g: 1} for g in gens}  # new generator -> old coordinates
        classes: dict = {}
        for g in gens:
            classes.setdefault(degree[g], []).append(g)
        pools = [c for c in classes.values() if len(c) >= 2]
        for _ in range(steps if pools else 0):
            cls = rng.choice(pools)
            i, j = rng.sample(cls, 2)
            c = rng.choice((-2, -1, 1, 2))
            self._transvect(i, j, c)

    def _transvect(self, i, j, c):
        for d in self.diffs:
            new = {}
            for g in self.degree:
                img = dict(d.get(g, {}))
                if g == i:
                    vadd(img, d.get(j, {}), c)
                img = _convert(vclean(img), i, j, c)
                if img:
                    new[g] = img
            d.clear()
            d.update(new)
        self.forward = {g: _convert(v, i, j, c) for g, v in self.forward.items()}
        inv_i = dict(self.backward[i])
        vadd(inv_i, self.backward[j], c)
        self.backward[i] = vclean(inv_i)


def _pieces(rng: random.Random, tag, budget: int, *, acyclic: bool, degrees=(-1, 0, 1)):
    """Elementary summands as (degree dict, differential dict)."""
    degree: dict = {}
    d: dict = {}
    n = 0
    while n < budget:
        p = rng.choice(degrees)
        kind = rng.random()
        if not acyclic and (kind < 0.3 or budget - n < 2):
            degree[(tag, n)] = p
            n += 1
            continue
        if budget - n < 2:
            break
        k = 1 if acyclic or kind < 0.7 else rng.choice((2, 3))
        a, b = (tag, n), (tag, n + 1)
        degree[a], degree[b] = p, p + 1
        d[a] = {b: rng.choice((-1, 1)) * k}
        n += 2
    return degree, d


def random_complex(rng: random.Random, max_rank: int = 6, *, acyclic: bool = False, tag="c", steps: int = 8) -> FreeComplex:
    degree, d = _pieces(rng, tag, rng.randint(0, max_rank), acyclic=acyclic)
    sc = _Scramble(degree, [d], rng, steps)
    return FreeComplex(degree, sc.diffs[0], name=f"rand{tag}")


def random_quasi_iso_cube(rng: random.Random, T: tuple, total_rank: int = 24):
    """A commuting cube of quasi-isomorphisms over the subsets of ``T``.

    Each vertex is ``C ⊕ A_S`` with ``A_S`` acyclic, scrambled independently;
    the maps are the identity on ``C`` and zero on ``A_S`` before scrambling.
    Returns ``(complexes, step)`` in the form taken by the cube totalization.
    """
    verts = list(subsets(T))
    per = max(1, total_rank // len(verts))
    core_deg, core_d = _pieces(rng, "core", rng.randint(0, max(1, per // 2)), acyclic=False)
    complexes, fwd, bwd = {}, {}, {}
    for S in verts:
        room = per - len(core_deg)
        extra_deg, extra_d = _pieces(rng, ("acyc", S), rng.randint(0, max(0, room)), acyclic=True)
        degree = {**core_deg, **extra_deg}
        sc = _Scramble(degree, [{**core_d, **extra_d}], rng, 6)
        complexes[S] = FreeComplex(degree, sc.diffs[0], name=f"C{S}")
        fwd[S], bwd[S] = sc.forward, sc.backward

    def step(S, k):
        S2 = tuple(t for t in T if t in S or t == k)
        table = {}
        for g in complexes[S].degree:
            out: dict = {}
            for h, x in bwd[S][g].items():
                if h in core_deg:
                    vadd(out, fwd[S2][h], x)
            out = vclean(out)
            if out:
                table[g] = out
        return ChainMap(complexes[S], complexes[S2], table, name=f"f{S}{k}")

    return complexes, step


def random_double_complex(rng: random.Random, max_rank: int = 12, tag="E") -> MultiComplex:
    """A quoted (commuting) double complex: sums of outer products, scrambled per bidegree."""
    degree: dict = {}
    d1: dict = {}
    d2: dict = {}
    counts: dict = {}
    for t in range(rng.randint(1, 2)):
        C = random_complex(rng, 3, tag=(tag, t, "h"), steps=2)
        D = random_complex(rng, 3, tag=(tag, t, "v"), steps=2)
        added: dict = {}
        for a, b in iproduct(C.degree, D.degree):
            p = (C.degree[a], D.degree[b])
            added[p] = added.get(p, 0) + 1
        # whole summands only, so that d² = 0 survives the size cap
        if any(counts.get(p, 0) + x > max_rank for p, x in added.items()):
            continue
        for p, x in added.items():
            counts[p] = counts.get(p, 0) + x
        for a, b in iproduct(C.degree, D.degree):
            g = (a, b)
            degree[g] = (C.degree[a], D.degree[b])
            if C.d.get(a):
                d1[g] = {(h, b): x for h, x in C.d[a].items()}
            if D.d.get(b):
                d2[g] = {(a, h): x for h, x in D.d[b].items()}
    sc = _Scramble(degree, [d1, d2], rng, 10)
    return MultiComplex(degree, sc.diffs, Convention.COMMUTING, name=str(tag))

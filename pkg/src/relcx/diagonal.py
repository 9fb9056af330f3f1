"""Diagonal cycles and diagonal extensions along order-preserving surjections.

For a constant sequence (the same variety X at every index) the diagonal
``Δ(I)`` lies in the empty-chain column of ``ℱ(I, ∅)``.  Tensoring diagonals
over segmentations gives ``𝚫(I) = Σ_Σ Δ(I|Σ)``, a degree-0 cocycle of ``F(I)``.

A surjection ``λ: I' -> I`` pulls the sequence back to ``I'``.  When
``λ`` collapses one fiber ``{k_1 < ... < k_m}`` onto ``k``, ``diag`` sends
the block ``ℱ(I, J | Σ)`` to every admissible block ``ℱ(I', J' | Σ')``:
segments of ``I'`` mapping onto segments of ``I`` receive the pushed-forward
factor (duplicate the coordinate at ``k``) and segments inside the fiber
receive a diagonal.  General surjections factor into such steps.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .funcx import FunctionComplexes
from .geomodel import PointModel
from .homalg.complexes import ChainMap, FreeComplex, vadd
from .ordsets import FiniteOrderedSet, InvalidArgument, OrderedSurjection, segment, subsets


def _tensor_vectors(vectors: Sequence[Mapping]) -> dict:
    out = {(): 1}
    for v in vectors:
        nxt: dict = {}
        for key, c in out.items():
            for g, x in v.items():
                nxt[key + (g,)] = nxt.get(key + (g,), 0) + c * x
        out = {k: x for k, x in nxt.items() if x}
    return out


class DiagonalEngine:
    """Function complexes of pulled-back sequences, shared across diagonal maps.

    ``model`` is the base sequence; every other sequence is described by a
    map from its labels to base labels.
    """

    def __init__(self, model: PointModel, *, check: bool = True):
        self.model = model
        self.check = check
        self._bundles: dict = {}
        self.base = self.bundle(tuple((i, i) for i in model.order))

    def bundle(self, to_base: tuple) -> FunctionComplexes:
        """Bundle on the labels of ``to_base`` (pairs ``(label, base label)``, in order)."""
        # the complexes depend only on the variety at each label
        key = tuple((a, self.model.variety(b)) for a, b in to_base)
        fc = self._bundles.get(key)
        if fc is None:
            labels = FiniteOrderedSet(tuple(a for a, _ in to_base))
            vs = {a: self.model.variety(b) for a, b in to_base}
            dims = []
            for (a, b), (a2, b2) in zip(to_base, to_base[1:]):
                dims.append(self.model.variety(b).dim if b == b2 else self.model.a_I(self.model.order.interval(b, b2)))
            model = PointModel(self.model.S, self.model.Sbar, vs, dims, labels, validate=False)
            fc = FunctionComplexes(model, check=self.check)
            self._bundles[key] = fc
        return fc

    def bundle_over(self, I: FiniteOrderedSet, to_base: Mapping | None = None) -> FunctionComplexes:
        to_base = to_base or {i: i for i in I}
        return self.bundle(tuple((i, to_base[i]) for i in I))


# ---------------------------------------------------------------- diagonal cycles


def _require_constant(fc: FunctionComplexes, I: FiniteOrderedSet):
    vs = {fc.model.variety(i) for i in I}
    if len(vs) != 1:
        raise InvalidArgument(f"the sequence on {I!r} is not constant")
    return next(iter(vs))


def delta_fcal(fc: FunctionComplexes, I) -> dict:
    """``Δ(I)`` as an element of ``ℱ(I, ∅)`` (generators ``(chain, point)``)."""
    I = fc.interval(I)
    X = _require_constant(fc, I)
    return {((), (x,) * len(I)): 1 for x in X.X}


def delta_total(fc: FunctionComplexes, I) -> dict:
    """``Δ(I)`` inside ``ℱ(I)``."""
    return {((), g): c for g, c in delta_fcal(fc, I).items()}


@dataclass
class DiagonalElement:
    I: FiniteOrderedSet
    per_sigma: dict  # Σ -> element of ℱ(I | Σ), keyed by F-generators (Σ, gens)
    vector: dict  # the sum, an element of F(I)

    def is_cocycle(self, fc: FunctionComplexes) -> bool:
        F = fc.F(self.I)
        return all(F.degree[g] == 0 for g in self.vector) and not F.diff(self.vector)


def delta_element(fc: FunctionComplexes, I=None) -> DiagonalElement:
    """``𝚫(I) = Σ_Σ Δ(I_1) ⊗ ... ⊗ Δ(I_c)`` in ``F(I)``."""
    I = fc.interval(I)
    _require_constant(fc, I)
    per: dict = {}
    vec: dict = {}
    for sigma in subsets(I.interior()):
        parts = [delta_total(fc, P) for P in segment(I, sigma)]
        v = {(sigma, gens): c for gens, c in _tensor_vectors(parts).items()}
        per[sigma] = v
        vadd(vec, v)
    return DiagonalElement(I, per, vec)


@dataclass
class DeltaReport:
    cocycle: bool
    degree_zero: bool
    tau: dict  # S -> bool
    phi: dict  # K -> bool
    length_two: bool | None = None

    @property
    def ok(self) -> bool:
        checks = [self.cocycle, self.degree_zero, *self.tau.values(), *self.phi.values()]
        if self.length_two is not None:
            checks.append(self.length_two)
        return all(checks)


def check_delta_props(fc: FunctionComplexes, I=None, S_list=None, K_list=None) -> DeltaReport:
    """Cocycle property, ``τ_S(𝚫) = ⊗ 𝚫(I_j)`` and ``φ_K(𝚫) = 𝚫(I - K)``."""
    I = fc.interval(I)
    D = delta_element(fc, I)
    F = fc.F(I)
    inner = I.interior()
    S_list = list(subsets(inner)) if S_list is None else [tuple(s) for s in S_list]
    K_list = list(subsets(inner)) if K_list is None else [tuple(k) for k in K_list]
    tau = {}
    for S in S_list:
        lhs = fc.tau(I, S)(D.vector)
        rhs = _tensor_vectors([delta_element(fc, P).vector for P in segment(I, S)])
        tau[S] = lhs == rhs
    phi = {}
    for K in K_list:
        phi[K] = fc.phi(I, K)(D.vector) == delta_element(fc, I.remove(K)).vector
    two = None
    if len(I) == 2:
        two = D.vector == {((), (g,)): c for g, c in delta_total(fc, I).items()}
    return DeltaReport(not F.diff(D.vector), all(F.degree[g] == 0 for g in D.vector), tau, phi, two)


# ---------------------------------------------------------------- elementary diagonal maps


@dataclass(frozen=True)
class Step:
    """An order-preserving surjection with at most one fiber of size >= 2."""

    lam: OrderedSurjection
    src_fc: FunctionComplexes  # bundle holding I (the target of λ)
    tgt_fc: FunctionComplexes  # bundle holding I' (the source of λ)

    @property
    def I(self) -> FiniteOrderedSet:
        return self.lam.target

    @property
    def Ip(self) -> FiniteOrderedSet:
        return self.lam.source

    @property
    def collapsed(self):
        big = [y for y in self.I if len(self.lam.fiber(y)) >= 2]
        if len(big) > 1:
            raise InvalidArgument("an elementary step collapses at most one fiber")
        return big[0] if big else None


def admissible_targets(step: Step, J: tuple, Sigma: tuple) -> list[tuple[tuple, tuple]]:
    """Pairs ``(J', Σ')`` matching ``(J, Σ)`` under the step's surjection."""
    lam, I, Ip = step.lam, step.I, step.Ip
    k = step.collapsed
    fiber = lam.fiber(k) if k is not None else ()
    inner_p = set(Ip.interior())

    def pre(xs):
        return [x for x in Ip if lam(x) in xs and x not in fiber]

    baseJ = pre(set(J))
    baseS = pre(set(Sigma))
    if k is None:
        return [(Ip.sort(baseJ), Ip.sort(baseS))]
    Jchoices = [baseJ + [f] for f in fiber if f in inner_p] if k in J else [baseJ]
    if k in I.interior():
        if k in Sigma:
            Schoices = [baseS + list(c) for r in range(1, len(fiber) + 1) for c in combinations(fiber, r)]
        else:
            Schoices = [baseS]
    else:
        free = [f for f in fiber if f in inner_p]
        Schoices = [baseS + list(c) for r in range(len(free) + 1) for c in combinations(free, r)]
    return [(Ip.sort(a), Ip.sort(b)) for a in Jchoices for b in Schoices]


def _push_point(I: FiniteOrderedSet, P: FiniteOrderedSet, x: tuple, Pp: FiniteOrderedSet, lam) -> tuple:
    pos = {i: t for t, i in enumerate(P)}
    return tuple(x[pos[lam(t)]] for t in Pp)


def block_image(step: Step, gens: tuple, Sigma: tuple, J2: tuple, Sigma2: tuple) -> dict:
    """Image of an F-level generator tuple of ``ℱ(I | Σ)`` in the ``(J', Σ')`` block.

    ``gens`` holds one ``(J_j, (chain, point))`` per Σ-segment; the result is
    keyed by tuples of the same shape over the Σ'-segments of ``I'``.
    """
    lam, I, Ip = step.lam, step.I, step.Ip
    k = step.collapsed
    segs = segment(I, Sigma)
    segs2 = segment(Ip, Sigma2)
    fiber = set(lam.fiber(k)) if k is not None else set()
    X = step.tgt_fc.model
    factors = []
    j = 0
    for P2 in segs2:
        if k is not None and set(P2) <= fiber:
            pts = X.variety(P2.init).X
            factors.append({((), ((), (x,) * len(P2))): 1 for x in pts})
            continue
        if j >= len(segs):
            raise InvalidArgument("segments do not match under the surjection")
        P = segs[j]
        if (lam(P2.init), lam(P2.term)) != (P.init, P.term):
            raise InvalidArgument(f"segment {P2!r} does not map onto {P!r}")
        Jj, (c, x) = gens[j]
        Jp = tuple(t for t in P2.interior() if t in set(J2))
        factors.append({(Jp, (c, _push_point(I, P, x, P2, lam))): 1})
        j += 1
    if j != len(segs):
        raise InvalidArgument("segments do not match under the surjection")
    return _tensor_vectors(factors)


def delta_push(step: Step, J, Sigma, J2, Sigma2) -> ChainMap:
    """``δ_*`` or ``Δ(Σ, Σ')`` as a map ``ℱ(I, J | Σ) -> ℱ(I', J' | Σ')`` of Čech tensor complexes."""
    I, Ip = step.I, step.Ip
    J, Sigma, J2, Sigma2 = I.sort(J), I.sort(Sigma), Ip.sort(J2), Ip.sort(Sigma2)
    if (J2, Sigma2) not in admissible_targets(step, J, Sigma):
        raise InvalidArgument(f"({J2}, {Sigma2}) is not admissible for ({J}, {Sigma})")
    src = step.src_fc.fcal_sigma(I, J, Sigma)
    tgt = step.tgt_fc.fcal_sigma(Ip, J2, Sigma2)
    Jparts = step.src_fc.split(I, J, Sigma)
    table = {}
    for g in src.degree:
        gens = tuple((Jp, h) for Jp, h in zip(Jparts, g))
        img = block_image(step, gens, Sigma, J2, Sigma2)
        table[g] = {tuple(h for _, h in key): c for key, c in img.items()}
    return ChainMap(src, tgt, table, validate=step.src_fc.check, name="delta_push")


def step_diag(step: Step, *, validate: bool = False) -> ChainMap:
    """``diag: F(I) -> F(I')`` for one elementary step: the plain sum over admissible blocks."""
    I, Ip = step.I, step.Ip
    src = step.src_fc.F(I)
    tgt = step.tgt_fc.F(Ip)
    table = {}
    for g in src.degree:
        Sigma, gens = g
        J = tuple(x for Jj, _ in gens for x in Jj)
        img: dict = {}
        for J2, Sigma2 in admissible_targets(step, J, Sigma):
            for key, c in block_image(step, gens, Sigma, J2, Sigma2).items():
                h = (Sigma2, key)
                if h not in tgt.degree:
                    raise InvalidArgument(f"diagonal image {h!r} is not a generator of F({Ip!r})")
                img[h] = img.get(h, 0) + c
        img = {h: c for h, c in img.items() if c}
        if img:
            table[g] = img
    return ChainMap(src, tgt, table, validate=validate, name="diag")


def diag(engine: DiagonalEngine, lam: OrderedSurjection, to_base: Mapping | None = None, *, validate: bool = False) -> ChainMap:
    """``λ^* = diag(I, I'): F(I) -> F(I')`` through the elementary factorization of ``λ``.

    ``to_base`` maps the labels of ``I = λ.target`` to base labels (identity by default).
    """
    I = lam.target
    to_base = dict(to_base or {i: i for i in I})
    current = engine.bundle_over(I, to_base)
    factors = lam.elementary_factors()
    # λ = f_1 ∘ ... ∘ f_r; apply f_1^* first
    result = None
    base_of = dict(to_base)
    for f in factors:
        nxt_base = {x: base_of[f(x)] for x in f.source}
        nxt = engine.bundle_over(f.source, nxt_base)
        m = step_diag(Step(f, current, nxt), validate=validate)
        result = m if result is None else m @ result
        current, base_of = nxt, nxt_base
    if result is None:
        return ChainMap.identity(current.F(I))
    return result


# ---------------------------------------------------------------- compatibility checks


@dataclass
class DiagCompatReport:
    phi: bool
    tau: bool | None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.phi and self.tau is not False


def restrict_surjection(lam: OrderedSurjection, drop_src=(), drop_tgt=()) -> OrderedSurjection:
    src = lam.source.remove(drop_src)
    tgt = lam.target.remove(drop_tgt)
    return OrderedSurjection(src, tgt, tuple((x, lam(x)) for x in src))


def check_diag_compat(engine: DiagonalEngine, lam: OrderedSurjection, ell) -> DiagCompatReport:
    """The φ and τ compatibilities of ``diag`` at ``ℓ ∈ interior(I')``."""
    I, Ip = lam.target, lam.source
    if ell not in Ip.interior():
        raise InvalidArgument(f"{ell!r} is not in the interior of {Ip!r}")
    k = lam(ell)
    D = diag(engine, lam)
    fc_I = engine.bundle_over(I)
    to_base_p = {x: lam(x) for x in Ip}
    fc_Ip = engine.bundle_over(Ip, to_base_p)
    phi_p = fc_Ip.phi(Ip, (ell,))
    if len(lam.fiber(k)) == 1:
        lower = diag(engine, restrict_surjection(lam, (ell,), (k,))) @ fc_I.phi(I, (k,))
    else:
        lower = diag(engine, restrict_surjection(lam, (ell,)))
    phi_ok = (phi_p @ D).same_as(lower)
    tau_ok = None
    tau_p = fc_Ip.tau(Ip, (ell,))
    upper = tau_p @ D
    segs_p = segment(Ip, (ell,))
    if k in I.interior():
        segs = segment(I, (k,))
        parts = [diag(engine, OrderedSurjection(Q, P, tuple((x, lam(x)) for x in Q))) for P, Q in zip(segs, segs_p)]
        _, tgt = fc_Ip.tensor_target(Ip, (ell,))
        tau_I = fc_I.tau(I, (k,))
        table = {}
        for g, v in tau_I.table.items():
            acc: dict = {}
            for key, c in v.items():
                vadd(acc, _tensor_vectors([parts[0].image(key[0]), parts[1].image(key[1])]), c)
            if acc:
                table[g] = acc
        lower2 = ChainMap(tau_I.src, tgt, table, validate=False)
        tau_ok = upper.same_as(lower2)
    else:
        # the constant piece gets the diagonal cycle
        const, other = (0, 1) if k == I.init else (1, 0)
        Q = segs_p[other]
        sub = diag(engine, OrderedSurjection(Q, I, tuple((x, lam(x)) for x in Q)))
        dvec = delta_element(engine.bundle_over(segs_p[const], {x: lam(x) for x in segs_p[const]}), segs_p[const]).vector
        table = {}
        for g, v in sub.table.items():
            acc: dict = {}
            for key, c in v.items():
                pieces = [dvec, {key: 1}] if const == 0 else [{key: 1}, dvec]
                vadd(acc, _tensor_vectors(pieces), c)
            if acc:
                table[g] = acc
        tau_ok = upper.table == table
    return DiagCompatReport(phi_ok, tau_ok)


def surjections(m: int, n: int) -> list[OrderedSurjection]:
    """All order-preserving surjections ``[1, m] -> [1, n]``."""
    src, tgt = FiniteOrderedSet.range(1, m), FiniteOrderedSet.range(1, n)
    out = []
    for cuts in combinations(range(1, m), n - 1):
        table, block = {}, 1
        for x in range(1, m + 1):
            if block - 1 < len(cuts) and x > cuts[block - 1]:
                block += 1
            table[x] = block
        out.append(OrderedSurjection.from_dict(src, tgt, table))
    return out


def constant_model(X, n: int, S, Sbar, labels: Sequence | None = None) -> PointModel:
    labels = tuple(labels or range(1, n + 1))
    return PointModel(S, Sbar, {i: X for i in labels}, [X.dim] * (len(labels) - 1), FiniteOrderedSet(labels))

"""Finite totally ordered index sets and the interval combinatorics built on them.

Labels are opaque hashable tokens.  Their order is whatever order the owning
``FiniteOrderedSet`` lists them in; nothing is inferred from label values.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

Label = Hashable


class InvalidArgument(ValueError):
    """Raised when an ordered-set operation receives inconsistent input."""


@dataclass(frozen=True)
class FiniteOrderedSet:
    elements: tuple

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if not els:
            raise InvalidArgument("ordered set must be non-empty")
        if len(set(els)) != len(els):
            raise InvalidArgument(f"repeated labels in {els!r}")

    @classmethod
    def range(cls, lo: int, hi: int) -> "FiniteOrderedSet":
        return cls(tuple(range(lo, hi + 1)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._pos

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def _pos(self) -> dict:
        cache = self.__dict__.get("_pos_cache")
        if cache is None:
            cache = {x: i for i, x in enumerate(self.elements)}
            object.__setattr__(self, "_pos_cache", cache)
        return cache

    def position(self, x) -> int:
        try:
            return self._pos[x]
        except KeyError:
            raise InvalidArgument(f"{x!r} is not an element of {self.elements!r}") from None

    def less(self, x, y) -> bool:
        return self.position(x) < self.position(y)

    def sort(self, xs: Iterable) -> tuple:
        return tuple(sorted(xs, key=self.position))

    @property
    def init(self):
        return self.elements[0]

    @property
    def term(self):
        return self.elements[-1]

    def interior(self) -> tuple:
        """Elements strictly between init and term."""
        return self.elements[1:-1]

    def interval(self, lo, hi) -> "FiniteOrderedSet":
        a, b = self.position(lo), self.position(hi)
        if a > b:
            raise InvalidArgument(f"empty interval [{lo!r}, {hi!r}]")
        return FiniteOrderedSet(self.elements[a : b + 1])

    def remove(self, xs: Iterable) -> "FiniteOrderedSet":
        drop = set(xs)
        return FiniteOrderedSet(tuple(x for x in self.elements if x not in drop))

    def is_subinterval_of(self, other: "FiniteOrderedSet") -> bool:
        if self.init not in other:
            return False
        a = other.position(self.init)
        return other.elements[a : a + len(self)] == self.elements

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


@dataclass(frozen=True)
class Interval:
    """Contiguous slice ``parent[lo..hi]`` given by element indices."""

    parent: FiniteOrderedSet
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi < len(self.parent)):
            raise InvalidArgument(f"bad interval bounds {self.lo}..{self.hi}")

    def as_set(self) -> FiniteOrderedSet:
        return FiniteOrderedSet(self.parent.elements[self.lo : self.hi + 1])

    def __len__(self) -> int:
        return self.hi - self.lo + 1


def subsets(xs: Sequence, sizes: Iterable[int] | None = None):
    """All subsets of ``xs`` as tuples in the order of ``xs``, by increasing size."""
    xs = tuple(xs)
    rng = range(len(xs) + 1) if sizes is None else sizes
    for k in rng:
        yield from combinations(xs, k)


def segment(I: FiniteOrderedSet, sigma: Iterable) -> list[FiniteOrderedSet]:
    """Segmentation of ``I`` cut at the points of ``sigma``."""
    if len(I) < 2:
        raise InvalidArgument("segmentation needs |I| >= 2")
    interior = set(I.interior())
    cuts = set(sigma)
    bad = cuts - interior
    if bad:
        raise InvalidArgument(f"cut points {sorted(map(str, bad))} not in the interior of {I!r}")
    points = [I.init, *I.sort(cuts), I.term]
    return [I.interval(a, b) for a, b in zip(points, points[1:])]


@dataclass(frozen=True)
class Segmentation:
    parent: FiniteOrderedSet
    sigma: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", self.parent.sort(self.sigma))
        segment(self.parent, self.sigma)

    @property
    def intervals(self) -> list[FiniteOrderedSet]:
        return segment(self.parent, self.sigma)


@dataclass(frozen=True)
class Partition:
    """Disjoint decomposition of ``parent`` into consecutive blocks."""

    parent: FiniteOrderedSet
    cuts: tuple  # element indices where a new block starts (excluding 0)

    def __post_init__(self):
        cuts = tuple(self.cuts)
        if list(cuts) != sorted(set(cuts)) or any(not 0 < c < len(self.parent) for c in cuts):
            raise InvalidArgument(f"bad partition cuts {cuts}")
        object.__setattr__(self, "cuts", cuts)

    @property
    def blocks(self) -> list[tuple]:
        bounds = [0, *self.cuts, len(self.parent)]
        return [self.parent.elements[a:b] for a, b in zip(bounds, bounds[1:])]

    @classmethod
    def from_blocks(cls, parent: FiniteOrderedSet, blocks: Sequence[Sequence]) -> "Partition":
        flat = [x for b in blocks for x in b]
        if tuple(flat) != parent.elements:
            raise InvalidArgument("blocks do not cover the parent in order")
        cuts, acc = [], 0
        for b in blocks[:-1]:
            acc += len(b)
            cuts.append(acc)
        return cls(parent, tuple(cuts))


def partition_from_subset(n: int, P: Iterable[int]) -> Partition:
    """Maximal runs inside ``P`` as blocks, every other element a singleton."""
    P = set(P)
    if any(not 1 <= p <= n for p in P):
        raise InvalidArgument(f"subset {sorted(P)} not inside [1,{n}]")
    parent = FiniteOrderedSet.range(1, n)
    blocks: list[list[int]] = []
    for i in range(1, n + 1):
        if i in P and blocks and blocks[-1][-1] == i - 1 and (i - 1) in P:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return Partition.from_blocks(parent, blocks)


@dataclass(frozen=True)
class OrderedSurjection:
    source: FiniteOrderedSet
    target: FiniteOrderedSet
    assignment: tuple  # pairs (source label, target label)

    def __post_init__(self):
        table = dict(self.assignment)
        if set(table) != set(self.source.elements):
            raise InvalidArgument("assignment must be total on the source")
        images = [table[x] for x in self.source]
        pos = [self.target.position(y) for y in images]
        if any(a > b for a, b in zip(pos, pos[1:])):
            raise InvalidArgument("map is not order-preserving")
        if set(images) != set(self.target.elements):
            raise InvalidArgument("map is not surjective")
        object.__setattr__(self, "assignment", tuple((x, table[x]) for x in self.source))

    @classmethod
    def from_dict(cls, source, target, table: dict) -> "OrderedSurjection":
        return cls(source, target, tuple(table.items()))

    def __call__(self, x):
        return dict(self.assignment)[x]

    @property
    def table(self) -> dict:
        return dict(self.assignment)

    def fiber(self, y) -> tuple:
        return tuple(x for x, z in self.assignment if z == y)

    def compose(self, inner: "OrderedSurjection") -> "OrderedSurjection":
        """``self ∘ inner``: first ``inner`` then ``self``."""
        if inner.target != self.source:
            raise InvalidArgument("composition of incompatible surjections")
        t = self.table
        return OrderedSurjection(inner.source, self.target, tuple((x, t[y]) for x, y in inner.assignment))

    def is_identity(self) -> bool:
        return self.source == self.target and all(x == y for x, y in self.assignment)

    def elementary_factors(self) -> list["OrderedSurjection"]:
        """Factor as ``self = f_1 ∘ f_2 ∘ ... ∘ f_r``; returns ``[f_1, ..., f_r]``.

        Each factor either collapses one fiber of size >= 2 and is the identity
        elsewhere, or is an order-preserving relabelling bijection.
        """
        table = self.table
        current = self.source
        steps: list[OrderedSurjection] = []
        for y in self.target:
            fib = self.fiber(y)
            if len(fib) < 2:
                continue
            label = y if y not in current or y in fib else ("collapsed", y)
            els = []
            for x in current:
                if x in fib:
                    if x == fib[0]:
                        els.append(label)
                else:
                    els.append(x)
            nxt = FiniteOrderedSet(tuple(els))
            steps.append(OrderedSurjection(current, nxt, tuple((x, label if x in fib else x) for x in current)))
            table[label] = y
            current = nxt
        relabel = OrderedSurjection(current, self.target, tuple((x, table[x]) for x in current))
        factors = [] if relabel.is_identity() else [relabel]
        factors += list(reversed(steps))
        return factors or [relabel]


@dataclass(frozen=True)
class AlmostDisjointFamily:
    parent: FiniteOrderedSet
    intervals: tuple  # tuple of FiniteOrderedSet

    def __post_init__(self):
        ivs = tuple(self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for iv in ivs:
            if len(iv) < 2:
                raise InvalidArgument(f"member {iv!r} has fewer than two elements")
            if not iv.is_subinterval_of(self.parent):
                raise InvalidArgument(f"member {iv!r} is not a sub-interval of {self.parent!r}")
        for a, b in combinations(ivs, 2):
            if len(set(a) & set(b)) > 1:
                raise InvalidArgument(f"members {a!r} and {b!r} share more than one element")

    @property
    def ordered(self) -> bool:
        p = self.parent.position
        return all(p(a.term) <= p(b.init) for a, b in zip(self.intervals, self.intervals[1:]))


def associated_partition(fam: AlmostDisjointFamily) -> Partition:
    """Blocks of [1, r] joined by shared endpoints of consecutive members."""
    if not fam.ordered:
        raise InvalidArgument("family is not ordered")
    r = len(fam.intervals)
    blocks: list[list[int]] = [[1]] if r else []
    for j in range(1, r):
        if fam.intervals[j - 1].term == fam.intervals[j].init:
            blocks[-1].append(j + 1)
        else:
            blocks.append([j + 1])
    return Partition.from_blocks(FiniteOrderedSet.range(1, r), blocks)


def is_pseudo_segmentation(fam: AlmostDisjointFamily) -> bool:
    if not fam.ordered or not fam.intervals:
        return False
    p = fam.parent.position
    ivs = fam.intervals
    if ivs[0].init != fam.parent.init or ivs[-1].term != fam.parent.term:
        return False
    return all(p(b.init) - p(a.term) in (0, 1) for a, b in zip(ivs, ivs[1:]))


@dataclass(frozen=True)
class MergedOrder:
    order: FiniteOrderedSet  # tokens ("I", j) and ("J", k)
    partition: Partition

    def labels(self, primes: str = "′") -> list[str]:
        return [f"{j}" if s == "I" else f"{j}{primes}" for s, j in self.order]


def merged_order(fam_I: AlmostDisjointFamily, fam_J: AlmostDisjointFamily) -> MergedOrder:
    """Order the union of two families by initial element; blocks by shared endpoints."""
    if fam_I.parent != fam_J.parent:
        raise InvalidArgument("families live in different parents")
    tokens = [("I", j + 1) for j in range(len(fam_I.intervals))]
    tokens += [("J", k + 1) for k in range(len(fam_J.intervals))]
    members = {("I", j + 1): iv for j, iv in enumerate(fam_I.intervals)}
    members.update({("J", k + 1): iv for k, iv in enumerate(fam_J.intervals)})
    AlmostDisjointFamily(fam_I.parent, tuple(members[t] for t in tokens))  # validates the union
    p = fam_I.parent.position
    tokens.sort(key=lambda t: p(members[t].init))
    ordered = AlmostDisjointFamily(fam_I.parent, tuple(members[t] for t in tokens))
    part = associated_partition(ordered)
    order = FiniteOrderedSet(tuple(tokens))
    blocks = [tuple(tokens[i - 1] for i in b) for b in part.blocks]
    return MergedOrder(order, Partition.from_blocks(order, blocks))

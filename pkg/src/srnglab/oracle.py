"""Exhaustive baselines for small instances of the mapping problem.

A deterministic encoder-decoder pair with at most m decoded values is,
up to relabeling, a partition of the source support into at most m blocks
together with one distinct representative per block.  Enumerating those
partitions through restricted growth strings and the representative
assignments on top gives the true optimum of the divergence over every
mapping, which is what the constructions and bounds are tested against.

Two enumeration modes exist.  For nonincreasing curves with zero slope at
infinity the uncovered support contributes nothing and a representative is
never hurt by being heavier, so optimal representatives can be drawn from
the heaviest k atoms and only their k! block assignments matter.  The full
mode ranges representatives over the whole space, including zero-mass
outcomes; it is kept deliberately unreduced so the reduction itself can be
cross-checked on tiny instances.

Values are scanned in floats first, then every plan within a small band of
the float minimum is re-evaluated in exact arithmetic when the curve and
the source allow it, so reported minima compare exactly against the
constructions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .construction import MappingPair
from .divergence import FCurve, _term
from .errors import CapExceeded, OutOfRange
from .probability import AtomicDistribution, Mass, sort_descending

__all__ = [
    "OracleResult",
    "PartitionPlan",
    "min_fdiv_bruteforce",
    "min_fdiv_bruteforce_full",
    "min_set_bruteforce",
]

#: Widest support the partition search will enumerate.
SUPPORT_CAP = 10

#: Widest support for the unreduced representative search.
FULL_SUPPORT_CAP = 6

#: Largest codebook either search will enumerate.
CODEBOOK_CAP = 4

#: Largest support the subset search will enumerate.
SUBSET_CAP = 14


@dataclass(frozen=True)
class PartitionPlan:
    """One candidate mapping: support blocks plus their representatives."""

    blocks: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    m: int

    def to_mapping(self, size: int) -> MappingPair:
        phi = [0] * size
        for j, block in enumerate(self.blocks):
            for x in block:
                phi[x] = j
        psi = tuple(self.representatives) + (self.representatives[-1],) * (
            self.m - len(self.representatives)
        )
        return MappingPair(tuple(phi), psi, self.m)


@dataclass(frozen=True)
class OracleResult:
    """The exhaustive minimum for one curve, with the plan achieving it."""

    curve: str
    value: Mass
    plan: PartitionPlan
    exact: bool


def _set_partitions(
    items: Sequence[int], max_blocks: int
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of items into at most max_blocks nonempty blocks.

    Restricted growth: item 0 opens block 0 and each later item joins an
    existing block or opens the next one, so every partition appears
    exactly once, blocks ordered by first member.
    """
    n = len(items)
    if n == 0:
        return
    labels = [0] * n

    def rec(i: int, used: int) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(used)]
            for item, lab in zip(items, labels):
                blocks[lab].append(item)
            yield tuple(tuple(b) for b in blocks)
            return
        for lab in range(min(used + 1, max_blocks)):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    yield from rec(1, 1)


def _iter_plans(
    dist: AtomicDistribution, m: int, full: bool
) -> Iterator[tuple[tuple[tuple[int, ...], ...], tuple[int, ...], tuple[Mass, ...]]]:
    """Yield (blocks, representatives, block_masses) in a fixed order."""
    support = [x for x, mass in enumerate(dist.masses) if mass > 0]
    heaviest = [x for x in sort_descending(dist) if dist.masses[x] > 0]
    size = len(dist.masses)
    for blocks in _set_partitions(support, min(m, len(support))):
        k = len(blocks)
        q_masses = tuple(sum(dist.masses[x] for x in block) for block in blocks)
        if full:
            candidates: Iterator[tuple[int, ...]] = itertools.permutations(range(size), k)
        else:
            candidates = itertools.permutations(heaviest[:k])
        for reps in candidates:
            yield blocks, reps, q_masses


def _plan_value(
    curve: FCurve,
    dist: AtomicDistribution,
    reps: Sequence[int],
    q_masses: Sequence[Mass],
    support_mass: Mass,
    as_float: bool,
) -> Mass:
    total: Mass = 0
    covered: Mass = 0
    for y, q in zip(reps, q_masses):
        p = dist.masses[y]
        if p > 0:
            covered = covered + p
        if as_float:
            p, q = float(p), float(q)
        term = _term(curve, p, q)
        if term == math.inf:
            return math.inf
        total = total + term
    uncovered = support_mass - covered
    if uncovered > 0:
        stray = _term(curve, float(uncovered) if as_float else uncovered, 0)
        if stray == math.inf:
            return math.inf
        total = total + stray
    return total


def _search(
    dist: AtomicDistribution,
    m: int,
    curves: Sequence[FCurve],
    full: bool,
    band: float,
) -> dict[str, OracleResult]:
    support_mass = sum(mass for mass in dist.masses if mass > 0)
    best_float: dict[str, float] = {}
    best_plan: dict[str, PartitionPlan] = {}
    for blocks, reps, q_masses in _iter_plans(dist, m, full):
        plan = None
        for curve in curves:
            value = float(_plan_value(curve, dist, reps, q_masses, support_mass, True))
            if curve.name not in best_float or value < best_float[curve.name]:
                if plan is None:
                    plan = PartitionPlan(blocks, reps, m)
                best_float[curve.name] = value
                best_plan[curve.name] = plan

    results: dict[str, OracleResult] = {}
    refine = [
        curve
        for curve in curves
        if dist.exact and isinstance(curve.eval_at(Fraction(1, 2)), (int, Fraction))
    ]
    best_exact: dict[str, Mass] = {}
    if refine:
        for blocks, reps, q_masses in _iter_plans(dist, m, full):
            for curve in refine:
                coarse = float(_plan_value(curve, dist, reps, q_masses, support_mass, True))
                if coarse > best_float[curve.name] + band:
                    continue
                value = _plan_value(curve, dist, reps, q_masses, support_mass, False)
                if curve.name not in best_exact or value < best_exact[curve.name]:
                    best_exact[curve.name] = value
                    best_plan[curve.name] = PartitionPlan(blocks, reps, m)
    for curve in curves:
        if curve.name in best_exact:
            results[curve.name] = OracleResult(
                curve.name, best_exact[curve.name], best_plan[curve.name], True
            )
        else:
            results[curve.name] = OracleResult(
                curve.name, best_float[curve.name], best_plan[curve.name], False
            )
    return results


def min_fdiv_bruteforce(
    dist: AtomicDistribution,
    m: int,
    curves: Sequence[FCurve],
    band: float = 1e-9,
) -> dict[str, OracleResult]:
    """True minimum divergence over every mapping with at most m values.

    Representatives are restricted to the heaviest block-count atoms, which
    is lossless for nonincreasing curves with zero slope at infinity; pass
    curves outside that class to min_fdiv_bruteforce_full instead.
    """
    support = sum(1 for mass in dist.masses if mass > 0)
    if support > SUPPORT_CAP:
        raise CapExceeded(f"support of {support} atoms exceeds the search cap {SUPPORT_CAP}")
    if m > CODEBOOK_CAP:
        raise CapExceeded(f"codebook of {m} exceeds the search cap {CODEBOOK_CAP}")
    if m < 1:
        raise OutOfRange(f"codebook size must be positive, got {m}")
    return _search(dist, m, curves, full=False, band=band)


def min_fdiv_bruteforce_full(
    dist: AtomicDistribution,
    m: int,
    curves: Sequence[FCurve],
    band: float = 1e-9,
) -> dict[str, OracleResult]:
    """Unreduced search: representatives range over the whole space.

    Exists to validate the heaviest-atom reduction and to handle curves
    with positive slope at infinity, where uncovered support costs mass.
    Tightly capped, since the assignment count grows factorially.
    """
    support = sum(1 for mass in dist.masses if mass > 0)
    if support > FULL_SUPPORT_CAP:
        raise CapExceeded(f"support of {support} atoms exceeds the full-search cap {FULL_SUPPORT_CAP}")
    if m > CODEBOOK_CAP:
        raise CapExceeded(f"codebook of {m} exceeds the search cap {CODEBOOK_CAP}")
    if m < 1:
        raise OutOfRange(f"codebook size must be positive, got {m}")
    return _search(dist, m, curves, full=True, band=band)


def min_set_bruteforce(dist: AtomicDistribution, delta: Mass) -> tuple[int, tuple[int, ...]]:
    """Smallest support subset holding mass at least 1 - delta, by full scan.

    Returns the minimum cardinality and the first witness in lexicographic
    order.  The empty set is excluded, mirroring the greedy convention that
    the mode is always kept; if float accumulation never reaches the
    target, the whole support is returned.
    """
    if delta < 0 or delta > 1:
        raise OutOfRange(f"tail budget must lie in [0, 1], got {delta}")
    support = tuple(x for x, mass in enumerate(dist.masses) if mass > 0)
    if len(support) > SUBSET_CAP:
        raise CapExceeded(f"support of {len(support)} atoms exceeds the subset cap {SUBSET_CAP}")
    target: Mass = 1 - Fraction(delta) if dist.exact else 1.0 - float(delta)
    for r in range(1, len(support) + 1):
        for combo in itertools.combinations(support, r):
            total: Mass = 0
            for x in combo:
                total = total + dist.masses[x]
            if total >= target:
                return r, combo
    return len(support), support

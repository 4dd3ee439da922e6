"""Explicit encoder-decoder pairs that squeeze a block source into M values.

Both constructions here produce a deterministic encoder phi from outcomes
to code indices and a decoder psi back into the outcome space, so the
decoded variable psi(phi(X^n)) is supported on at most M outcomes.  The
quality target is the f-divergence between the source law and the decoded
law, and each construction comes with a closed-form finite-n guarantee
plus a matching converse that floors every possible mapping.

The common mechanism: pick a set of representatives rich enough to carry
the source's weight, keep them fixed under the mapping, and merge every
lighter outcome upward onto a high-probability core so that the decoded
law imitates the source conditioned on that core.  The merge is a greedy
first-fit pass whose overshoot is provably below e^{-n gamma}; the trace
returned alongside the mapping records every set, every allocation, and
the step at which the pool ran dry, so tests can audit the invariants the
guarantees lean on.

Classification thresholds are computed through the same expressions the
spectrum module uses, which keeps the probability of the core once it is
compared against a cdf bit-identical between construction and bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .divergence import FCurve, check_conditions, f_inverse
from .errors import DimensionMismatch, InvalidModel, OutOfRange
from .probability import AtomicDistribution, Mass, self_information, sort_descending
from .spectrum import SpectrumSummary, cdf_at

__all__ = [
    "BoundReport",
    "ConstructionTrace",
    "MappingPair",
    "achievability_bound",
    "apply_mapping",
    "baseline_collapse_mapping",
    "build_mapping",
    "build_smooth_entropy_mapping",
    "converse_bound",
    "entropy_mapping_bound",
    "rate_window",
    "trace_to_jsonable",
]


def rate_window(m: int, n: int, gamma: Mass) -> tuple[float, float]:
    """Self-information thresholds (low, high) that classify outcomes.

    low marks mass e^{n gamma}/m and high marks mass 1/m, both in
    per-symbol nats.  Construction and bounds must share these exact
    expressions so that their classifications agree float for float.
    """
    high = math.log(m) / n
    return high - float(gamma), high


@dataclass(frozen=True)
class MappingPair:
    """An encoder phi over outcome ids and a decoder psi over code indices.

    phi[x] is the code index of outcome x and psi[j] the outcome decoded
    from index j.  len(psi) is exactly the codebook size m_n, so the
    decoded variable takes at most m_n values.
    """

    phi: tuple[int, ...]
    psi: tuple[int, ...]
    m_n: int

    def __post_init__(self) -> None:
        if self.m_n < 1:
            raise InvalidModel("codebook size must be positive")
        if len(self.psi) != self.m_n:
            raise InvalidModel("decoder table must have one entry per code index")
        if not self.phi:
            raise InvalidModel("encoder table is empty")
        if any(not 0 <= j < self.m_n for j in self.phi):
            raise InvalidModel("encoder produced an index outside the codebook")
        if any(not 0 <= x < len(self.phi) for x in self.psi):
            raise InvalidModel("decoder produced an outcome outside the space")


@dataclass(frozen=True)
class ConstructionTrace:
    """Everything needed to audit one construction after the fact.

    kind             "spectrum_split" or "entropy_prefix"
    core             ids whose conditional law the decoded variable imitates,
                     descending mass
    band             ids kept under the identity map, descending mass
    pool             ids merged upward onto core representatives, descending
    off_support      zero-mass ids with no role beyond phi sending them to 0
    representatives  decoder image in order, psi before padding
    allocations      pool ids merged onto each core representative, aligned
                     with core order; a single entry on the degenerate paths
                     where the whole pool collapses onto representative 0
    stop_index       position at which the pool ran dry, or the last position
                     when the remainder was dumped there
    conditional      source conditioned on the core, None when the core is
                     empty
    core_mass        exact total source mass of the core
    """

    kind: str
    core: tuple[int, ...]
    band: tuple[int, ...]
    pool: tuple[int, ...]
    off_support: tuple[int, ...]
    representatives: tuple[int, ...]
    allocations: tuple[tuple[int, ...], ...]
    stop_index: int
    gamma: Mass
    m: int
    n: int
    core_mass: Mass
    conditional: AtomicDistribution | None
    flags: tuple[str, ...]
    source: AtomicDistribution


@dataclass(frozen=True)
class BoundReport:
    """A one-sided guarantee; clamped marks an argument pushed to a limit."""

    value: float
    clamped: bool
    detail: tuple[tuple[str, str], ...] = ()


def _zero(dist: AtomicDistribution) -> Mass:
    return Fraction(0) if dist.exact else 0.0


def _greedy_allocate(
    dist: AtomicDistribution,
    core: Sequence[int],
    pool: Sequence[int],
    core_mass: Mass,
) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Merge pool atoms onto core representatives without exceeding targets.

    For each representative in order the capacity is the gap between its
    conditional mass P(x)/core_mass and its own mass; every remaining pool
    atom that still fits is taken, in descending order.  Maximality is the
    point: when an atom is skipped, the unfilled gap is smaller than that
    atom, and pool atoms are lighter than 1/m, which is what caps the final
    overshoot.  The step that empties the pool is the stop index; a pool
    that survives the last representative is dumped onto it wholesale.
    """
    remaining = list(pool)
    allocations: list[tuple[int, ...]] = []
    stop = len(core) - 1
    stopped = False
    for idx, rep in enumerate(core):
        if stopped:
            allocations.append(())
            continue
        capacity = dist.masses[rep] / core_mass - dist.masses[rep]
        taken: list[int] = []
        kept: list[int] = []
        load: Mass = 0
        for atom in remaining:
            mass = dist.masses[atom]
            if load + mass <= capacity:
                taken.append(atom)
                load = load + mass
            else:
                kept.append(atom)
        remaining = kept
        if idx == len(core) - 1 and remaining:
            taken.extend(remaining)
            remaining = []
        if not remaining:
            stop, stopped = idx, True
        allocations.append(tuple(taken))
    return tuple(allocations), stop


def _conditional(dist: AtomicDistribution, core: Sequence[int], core_mass: Mass) -> AtomicDistribution:
    masses = [_zero(dist)] * len(dist.masses)
    for x in core:
        masses[x] = dist.masses[x] / core_mass
    return AtomicDistribution.from_masses(masses, dist.n, dist.alphabet_size, exact=dist.exact)


def _encode(
    size: int,
    representatives: Sequence[int],
    core: Sequence[int],
    allocations: Sequence[Sequence[int]],
    m: int,
) -> MappingPair:
    # Everything unmentioned (off-support atoms) encodes to index 0.
    position = {x: j for j, x in enumerate(representatives)}
    phi = [0] * size
    for x, j in position.items():
        phi[x] = j
    for rep, atoms in zip(core, allocations):
        for atom in atoms:
            phi[atom] = position[rep]
    psi = tuple(representatives) + (representatives[-1],) * (m - len(representatives))
    return MappingPair(phi=tuple(phi), psi=psi, m_n=m)


def build_mapping(
    dist: AtomicDistribution, m: int, gamma: Mass
) -> tuple[MappingPair, ConstructionTrace]:
    """Spectrum-split construction at codebook size m and slack exponent gamma.

    Outcomes carrying at least 1/m become representatives, so there are
    never more than m of them; among those, outcomes above the e^{n gamma}/m
    line form the core and the rest keep the identity map.  Lighter
    outcomes are greedily merged onto core representatives until the
    decoded law matches the core conditional to within one pool atom per
    step.  Membership in the representative set is decided by exact
    comparison against 1/m; the core line is the shared float threshold
    from rate_window.

    Degenerate sources are handled by explicit fallbacks: with an empty
    core the band keeps the identity and the pool collapses onto its top
    element, and with nothing heavy at all every outcome collapses onto
    the mode.
    """
    if m < 1:
        raise OutOfRange(f"codebook size must be positive, got {m}")
    if gamma <= 0:
        raise OutOfRange(f"slack exponent must be positive, got {gamma}")
    n = dist.n
    size = len(dist.masses)
    r_low, _ = rate_window(m, n, gamma)
    cut = Fraction(1, m)
    order = sort_descending(dist)
    heavy = [x for x in order if dist.masses[x] >= cut]
    light = [x for x in order if 0 < dist.masses[x] < cut]
    off = tuple(x for x in order if dist.masses[x] == 0)
    core = [x for x in heavy if self_information(dist, x) <= r_low]
    in_core = set(core)
    band = [x for x in heavy if x not in in_core]

    if not heavy:
        mode = order[0]
        pool = tuple(x for x in light if x != mode)
        trace = ConstructionTrace(
            kind="spectrum_split",
            core=(),
            band=(mode,),
            pool=pool,
            off_support=off,
            representatives=(mode,),
            allocations=(pool,),
            stop_index=0,
            gamma=gamma,
            m=m,
            n=n,
            core_mass=_zero(dist),
            conditional=None,
            flags=("empty_core", "empty_core_and_band"),
            source=dist,
        )
        return MappingPair((0,) * size, (mode,) * m, m), trace

    if not core:
        pool = tuple(light)
        trace = ConstructionTrace(
            kind="spectrum_split",
            core=(),
            band=tuple(band),
            pool=pool,
            off_support=off,
            representatives=tuple(heavy),
            allocations=(pool,),
            stop_index=0,
            gamma=gamma,
            m=m,
            n=n,
            core_mass=_zero(dist),
            conditional=None,
            flags=("empty_core",),
            source=dist,
        )
        return _encode(size, heavy, heavy[:1], (pool,), m), trace

    core_mass: Mass = _zero(dist)
    for x in core:
        core_mass = core_mass + dist.masses[x]
    allocations, stop = _greedy_allocate(dist, core, light, core_mass)
    trace = ConstructionTrace(
        kind="spectrum_split",
        core=tuple(core),
        band=tuple(band),
        pool=tuple(light),
        off_support=off,
        representatives=tuple(heavy),
        allocations=allocations,
        stop_index=stop,
        gamma=gamma,
        m=m,
        n=n,
        core_mass=core_mass,
        conditional=_conditional(dist, core, core_mass),
        flags=(),
        source=dist,
    )
    return _encode(size, heavy, core, allocations, m), trace


def build_smooth_entropy_mapping(
    dist: AtomicDistribution, curve: FCurve, delta: Mass, gamma: Mass
) -> tuple[MappingPair, ConstructionTrace]:
    """Entropy-prefix construction meeting divergence budget delta.

    The core is the smallest descending prefix whose mass reaches
    f^{-1}(delta), the codebook size is |core| e^{n gamma} rounded up, and
    the representatives are simply the heaviest m outcomes: identity on
    them, greedy merge of everything lighter onto the core.  When the
    demanded codebook already exceeds the whole space the identity mapping
    is returned and flagged, since zero divergence is then free.
    """
    if gamma <= 0:
        raise OutOfRange(f"slack exponent must be positive, got {gamma}")
    if delta < 0:
        raise OutOfRange(f"divergence budget must be nonnegative, got {delta}")
    n = dist.n
    size = len(dist.masses)
    thr: Mass = 0 if delta >= curve.f_at_zero else f_inverse(curve, delta)
    order = sort_descending(dist)
    core: list[int] = []
    cum: Mass = _zero(dist)
    for x in order:
        mass = dist.masses[x]
        if mass == 0:
            break
        core.append(x)
        cum = cum + mass
        if cum >= thr:
            break
    core_mass: Mass = _zero(dist)
    for x in core:
        core_mass = core_mass + dist.masses[x]
    m = math.ceil(len(core) * math.exp(n * float(gamma)))

    if m > size:
        in_core = set(core)
        trace = ConstructionTrace(
            kind="entropy_prefix",
            core=tuple(core),
            band=tuple(x for x in order if x not in in_core),
            pool=(),
            off_support=(),
            representatives=tuple(order),
            allocations=((),) * len(core),
            stop_index=0,
            gamma=gamma,
            m=m,
            n=n,
            core_mass=core_mass,
            conditional=_conditional(dist, core, core_mass),
            flags=("size_exceeds_space",),
            source=dist,
        )
        # The demanded codebook does not fit in the space, so the pair is
        # the identity on all of it; m_n is the space size, not m, which
        # could be astronomically large.
        phi = [0] * size
        for j, x in enumerate(order):
            phi[x] = j
        return MappingPair(tuple(phi), tuple(order), size), trace

    representatives = order[:m]
    band = representatives[len(core):]
    pool = [x for x in order[m:] if dist.masses[x] > 0]
    off = tuple(x for x in order[m:] if dist.masses[x] == 0)
    allocations, stop = _greedy_allocate(dist, core, pool, core_mass)
    trace = ConstructionTrace(
        kind="entropy_prefix",
        core=tuple(core),
        band=tuple(band),
        pool=tuple(pool),
        off_support=off,
        representatives=tuple(representatives),
        allocations=allocations,
        stop_index=stop,
        gamma=gamma,
        m=m,
        n=n,
        core_mass=core_mass,
        conditional=_conditional(dist, core, core_mass),
        flags=(),
        source=dist,
    )
    return _encode(size, representatives, core, allocations, m), trace


def baseline_collapse_mapping(dist: AtomicDistribution, m: int, gamma: Mass) -> MappingPair:
    """Reference mapping that keeps the core and collapses the rest onto it.

    Same classification as build_mapping but with no band and no mass
    shaping: everything outside the core encodes to index 0.  Its
    divergence shows what the greedy allocation buys.
    """
    if m < 1:
        raise OutOfRange(f"codebook size must be positive, got {m}")
    if gamma <= 0:
        raise OutOfRange(f"slack exponent must be positive, got {gamma}")
    r_low, _ = rate_window(m, dist.n, gamma)
    cut = Fraction(1, m)
    order = sort_descending(dist)
    core = [
        x
        for x in order
        if dist.masses[x] >= cut and self_information(dist, x) <= r_low
    ]
    if not core:
        core = [order[0]]
    phi = [0] * len(dist.masses)
    for j, x in enumerate(core):
        phi[x] = j
    psi = tuple(core) + (core[-1],) * (m - len(core))
    return MappingPair(tuple(phi), psi, m)


def apply_mapping(dist: AtomicDistribution, mapping: MappingPair) -> AtomicDistribution:
    """Law of the decoded variable psi(phi(X^n)), on the original space."""
    if len(mapping.phi) != len(dist.masses):
        raise DimensionMismatch(
            f"mapping covers {len(mapping.phi)} outcomes, source has {len(dist.masses)}"
        )
    out = [_zero(dist)] * len(dist.masses)
    for x, mass in enumerate(dist.masses):
        if mass != 0:
            target = mapping.psi[mapping.phi[x]]
            out[target] = out[target] + mass
    return AtomicDistribution.from_masses(out, dist.n, dist.alphabet_size, exact=dist.exact)


def _require_nonincreasing(curve: FCurve, where: str) -> None:
    if not check_conditions(curve).nonincreasing:
        raise OutOfRange(f"{where} is only proved for nonincreasing curves, not {curve.name}")


def achievability_bound(trace: ConstructionTrace, curve: FCurve) -> BoundReport:
    """Closed-form guarantee for the spectrum-split construction.

    value = f(Pr{core} - e^{-n gamma}) + e^{-n gamma} f(1/m).  When the
    core holds no more than e^{-n gamma} of mass the first argument is
    pushed to the limit of f at zero and the report is flagged clamped;
    for curves bounded by that limit the flagged value is still a valid
    bound, if a vacuous one.
    """
    if trace.kind != "spectrum_split":
        raise InvalidModel(f"bound applies to spectrum_split traces, got {trace.kind}")
    _require_nonincreasing(curve, "the achievability guarantee")
    slack = math.exp(-trace.n * float(trace.gamma))
    arg = float(trace.core_mass) - slack
    clamped = arg <= 0
    first = float(curve.f_at_zero) if clamped else float(curve.eval_at(arg))
    tail = slack * float(curve.eval_at(Fraction(1, trace.m)))
    return BoundReport(
        value=first + tail,
        clamped=clamped,
        detail=(("core_mass", str(trace.core_mass)), ("slack", repr(slack))),
    )


def converse_bound(
    summary: SpectrumSummary, m: int, gamma: Mass, curve: FCurve
) -> BoundReport:
    """Floor under the divergence of every size-m encoder-decoder pair.

    value = max(f(F(log(m)/n + gamma) + e^{-n gamma}), 0) with F the cdf of
    the source spectrum, evaluated at exact spectrum points so rational
    sources contribute exact probabilities.  Clamping records that f went
    negative, which happens once the cdf argument passes 1.
    """
    if m < 1:
        raise OutOfRange(f"codebook size must be positive, got {m}")
    if gamma <= 0:
        raise OutOfRange(f"slack exponent must be positive, got {gamma}")
    _require_nonincreasing(curve, "the converse")
    n = summary.n
    v_star = math.log(m) / n + float(gamma)
    inner = cdf_at(summary, v_star) + math.exp(-n * float(gamma))
    raw = float(curve.eval_at(inner))
    return BoundReport(
        value=max(raw, 0.0),
        clamped=raw < 0,
        detail=(("threshold", repr(v_star)),),
    )


def entropy_mapping_bound(trace: ConstructionTrace, curve: FCurve) -> BoundReport:
    """Per-instance guarantee for the entropy-prefix construction.

    The filled steps before the stop index contribute f(Pr{core}) per unit
    of decoded mass, the stop step is charged at the slightly smaller
    argument (1 - e^{-n gamma}) Pr{core}, and the overshoot is charged
    e^{-n gamma} f(P(x_stop)).  On the identity path the whole bound
    collapses to f(Pr{core}).
    """
    if trace.kind != "entropy_prefix":
        raise InvalidModel(f"bound applies to entropy_prefix traces, got {trace.kind}")
    _require_nonincreasing(curve, "the entropy-prefix guarantee")
    pr_core = trace.core_mass
    if "size_exceeds_space" in trace.flags:
        return BoundReport(float(curve.eval_at(pr_core)), False, (("identity", "true"),))
    dist = trace.source
    slack = math.exp(-trace.n * float(trace.gamma))
    head: Mass = _zero(dist)
    for i in range(trace.stop_index):
        rep = trace.core[i]
        head = head + dist.masses[rep]
        for atom in trace.allocations[i]:
            head = head + dist.masses[atom]
    x_stop = trace.core[trace.stop_index]
    p_stop = dist.masses[x_stop]
    cond_stop = p_stop / pr_core
    arg = (1.0 - slack) * float(pr_core)
    clamped = arg <= 0
    middle = float(curve.f_at_zero) if clamped else float(curve.eval_at(arg))
    value = (
        float(head) * float(curve.eval_at(pr_core))
        + float(cond_stop) * middle
        + slack * float(curve.eval_at(p_stop))
    )
    return BoundReport(
        value=value,
        clamped=clamped,
        detail=(("core_mass", str(pr_core)), ("slack", repr(slack))),
    )


def trace_to_jsonable(trace: ConstructionTrace) -> dict:
    """Plain-dict view of a trace for JSON export; exact masses as strings."""
    return {
        "kind": trace.kind,
        "m": trace.m,
        "n": trace.n,
        "gamma": str(trace.gamma),
        "core": list(trace.core),
        "band": list(trace.band),
        "pool": list(trace.pool),
        "off_support": list(trace.off_support),
        "representatives": list(trace.representatives),
        "allocations": [list(atoms) for atoms in trace.allocations],
        "stop_index": trace.stop_index,
        "core_mass": str(trace.core_mass),
        "conditional": (
            None
            if trace.conditional is None
            else [str(v) for v in trace.conditional.masses]
        ),
        "flags": list(trace.flags),
    }

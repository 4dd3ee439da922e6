"""Mapping constructions, their audit traces, and the matching bounds.

The allocator invariants are checked on hand-built single-letter sources
chosen to force each of its paths: an early stop with idle trailing
representatives, an exact capacity fill, and a stranded atom dumped onto
the last representative.
"""

from __future__ import annotations

import math
from fractions import Fraction

import pytest

from srnglab import (
    AtomicDistribution,
    IID,
    InvalidModel,
    MappingPair,
    OutOfRange,
    SourceModel,
    achievability_bound,
    apply_mapping,
    baseline_collapse_mapping,
    build_mapping,
    build_smooth_entropy_mapping,
    cdf_at,
    converse_bound,
    divergence,
    entropy_mapping_bound,
    expand,
    f_inverse,
    hellinger,
    kl,
    rate_window,
    reverse_kl,
    smooth_max_entropy,
    spectrum_cdf,
    trace_to_jsonable,
    variational,
)

F = Fraction


def single_letter(*masses: Fraction) -> AtomicDistribution:
    return AtomicDistribution.from_masses(list(masses), 1, len(masses))


def quarter_block(n: int) -> AtomicDistribution:
    return expand(SourceModel(IID((F(1, 4), F(3, 4))), n))


def assert_trace_invariants(dist: AtomicDistribution, mapping: MappingPair, trace) -> None:
    ids = sorted(trace.core + trace.band + trace.pool + trace.off_support)
    assert ids == list(range(len(dist.masses)))
    assert trace.representatives == trace.core + trace.band
    assert len(set(mapping.psi)) <= trace.m
    decoded = apply_mapping(dist, mapping)
    assert sum(1 for v in decoded.masses if v > 0) <= trace.m
    if trace.kind == "spectrum_split" and not trace.flags:
        # Core atoms all clear the heavy cut with room e^{n gamma}.
        assert len(trace.core) <= trace.m * math.exp(-trace.n * float(trace.gamma)) + 1e-9
        for i, rep in enumerate(trace.core):
            target = dist.masses[rep] / trace.core_mass
            got = decoded.masses[rep]
            if i < trace.stop_index:
                assert target - F(1, trace.m) < got <= target
            elif i > trace.stop_index:
                assert got == dist.masses[rep]
        for rep in trace.band:
            assert decoded.masses[rep] == dist.masses[rep]


# ---------------------------------------------------------------------------
# the running block example


def test_running_example_trace_and_divergence() -> None:
    d = quarter_block(2)
    mapping, trace = build_mapping(d, 4, F(1, 20))
    assert trace.core == (3,)
    assert trace.band == ()
    assert trace.pool == (1, 2, 0)
    assert trace.stop_index == 0
    assert trace.flags == ()
    assert trace.core_mass == F(9, 16)
    decoded = apply_mapping(d, mapping)
    assert decoded.masses[3] == 1
    assert divergence(d, decoded, variational()) == F(7, 16)


def test_running_example_bounds_bracket_the_divergence() -> None:
    d = quarter_block(2)
    mapping, trace = build_mapping(d, 4, F(1, 20))
    decoded = apply_mapping(d, mapping)
    exact = divergence(d, decoded, variational())
    ach = achievability_bound(trace, variational())
    con = converse_bound(spectrum_cdf(d), 4, F(1, 20), variational())
    assert con.value <= float(exact) <= ach.value
    # core_mass - e^{-n gamma} < 0 pushes the first argument to its limit
    assert ach.clamped
    assert ach.value == pytest.approx(1 + math.exp(-0.1) * 0.75)
    assert con.value == 0.0


def test_positive_converse_value() -> None:
    d = quarter_block(6)
    s = spectrum_cdf(d)
    con = converse_bound(s, 2, F(1, 2), variational())
    threshold = math.log(2) / 6 + 0.5
    assert cdf_at(s, threshold) == F(2187, 4096)
    assert con.value == pytest.approx(1 - (2187 / 4096 + math.exp(-3.0)))
    assert con.value > 0.4


def test_unclamped_achievability() -> None:
    d = single_letter(F(9, 10), F(3, 50), F(1, 25))
    mapping, trace = build_mapping(d, 2, F(1, 2))
    assert trace.core == (0,)
    ach = achievability_bound(trace, variational())
    assert not ach.clamped
    slack = math.exp(-0.5)
    assert ach.value == pytest.approx((1 - (0.9 - slack)) + slack * 0.5)


# ---------------------------------------------------------------------------
# allocator paths


def test_early_stop_leaves_later_representatives_untouched() -> None:
    d = single_letter(F(15, 50), F(14, 50), F(13, 50), F(3, 50), F(3, 50), F(2, 50))
    mapping, trace = build_mapping(d, 4, F(2, 25))
    assert trace.core == (0, 1)
    assert trace.band == (2,)
    assert trace.allocations == ((3, 4, 5), ())
    assert trace.stop_index == 0
    decoded = apply_mapping(d, mapping)
    assert decoded.masses[0] == F(23, 50)
    assert decoded.masses[1] == F(14, 50)
    assert decoded.masses[2] == F(13, 50)
    assert_trace_invariants(d, mapping, trace)


def test_exact_capacity_fill_reaches_the_conditional() -> None:
    # Four heavy atoms of 23/100 and four pool atoms of 1/50; each pool
    # atom exactly fills one representative's gap to 1/4.
    d = single_letter(*([F(23, 100)] * 4 + [F(1, 50)] * 4))
    mapping, trace = build_mapping(d, 8, F(3, 10))
    assert trace.core == (0, 1, 2, 3)
    assert trace.allocations == ((4,), (5,), (6,), (7,))
    assert trace.stop_index == 3
    decoded = apply_mapping(d, mapping)
    assert decoded.masses[:4] == (F(1, 4), F(1, 4), F(1, 4), F(1, 4))
    assert divergence(d, decoded, variational()) == F(2, 25)
    assert_trace_invariants(d, mapping, trace)


def test_stranded_atom_is_dumped_on_the_last_representative() -> None:
    # The 1/25 atom exceeds every capacity of 1/30 and must be dumped.
    d = single_letter(F(30, 100), F(30, 100), F(30, 100), F(1, 25), F(3, 100), F(3, 100))
    mapping, trace = build_mapping(d, 6, F(2, 5))
    assert trace.core == (0, 1, 2)
    assert trace.allocations == ((4,), (5,), (3,))
    assert trace.stop_index == 2
    decoded = apply_mapping(d, mapping)
    assert decoded.masses[2] == F(17, 50)
    # Overshoot beyond the conditional target stays below e^{-n gamma}.
    overshoot = decoded.masses[2] - d.masses[2] / trace.core_mass
    assert 0 < overshoot < math.exp(-float(trace.gamma))
    assert_trace_invariants(d, mapping, trace)


def test_invariants_on_a_block_grid() -> None:
    for n in (2, 3, 4):
        d = quarter_block(n)
        for m in (1, 2, 4, 2**n):
            for gamma in (F(1, 50), F(1, 10), F(1, 2)):
                mapping, trace = build_mapping(d, m, gamma)
                assert_trace_invariants(d, mapping, trace)


# ---------------------------------------------------------------------------
# degenerate classifications


def test_no_heavy_atom_collapses_to_the_mode() -> None:
    d = single_letter(F(1, 4), F(1, 4), F(1, 4), F(1, 4))
    mapping, trace = build_mapping(d, 3, F(1, 10))
    assert trace.flags == ("empty_core", "empty_core_and_band")
    assert trace.core == ()
    assert trace.band == (0,)
    assert trace.pool == (1, 2, 3)
    assert trace.conditional is None
    decoded = apply_mapping(d, mapping)
    assert decoded.masses[0] == 1


def test_heavy_without_core_keeps_the_identity() -> None:
    # gamma so large that no heavy atom clears the self-information cut.
    d = single_letter(F(2, 5), F(3, 10), F(3, 10), F(0))
    mapping, trace = build_mapping(d, 4, F(3, 2))
    assert trace.flags == ("empty_core",)
    assert trace.core == ()
    assert trace.band == (0, 1, 2)
    assert trace.off_support == (3,)
    decoded = apply_mapping(d, mapping)
    assert decoded.masses == d.masses


def test_partition_invariant_holds_on_degenerate_paths() -> None:
    for masses, m, gamma in (
        ([F(1, 4)] * 4, 3, F(1, 10)),
        ([F(2, 5), F(3, 10), F(3, 10), F(0)], 4, F(3, 2)),
    ):
        d = single_letter(*masses)
        mapping, trace = build_mapping(d, m, gamma)
        ids = sorted(trace.core + trace.band + trace.pool + trace.off_support)
        assert ids == list(range(len(masses)))


def test_build_mapping_rejects_bad_parameters() -> None:
    d = quarter_block(2)
    with pytest.raises(OutOfRange):
        build_mapping(d, 0, F(1, 10))
    with pytest.raises(OutOfRange):
        build_mapping(d, 4, F(0))


# ---------------------------------------------------------------------------
# entropy-prefix construction


def test_entropy_core_is_the_minimal_prefix() -> None:
    d = quarter_block(6)
    delta = F(1, 10)
    mapping, trace = build_smooth_entropy_mapping(d, variational(), delta, F(1, 20))
    thr = f_inverse(variational(), delta)
    mass = sum(d.masses[x] for x in trace.core)
    assert mass >= thr
    assert mass - d.masses[trace.core[-1]] < thr
    assert trace.m == math.ceil(len(trace.core) * math.exp(6 / 20))
    assert len(trace.representatives) == trace.m
    assert trace.representatives[: len(trace.core)] == trace.core


def test_entropy_core_size_matches_the_greedy_set() -> None:
    d = quarter_block(5)
    for curve in (variational(), hellinger()):
        for delta in (F(1, 20), F(1, 10), F(1, 4)):
            _, trace = build_smooth_entropy_mapping(d, curve, delta, F(1, 20))
            _, kept = smooth_max_entropy(d, 1 - f_inverse(curve, delta))
            assert len(trace.core) == len(kept)


def test_entropy_bound_dominates_the_achieved_divergence() -> None:
    for n in (2, 4, 6):
        d = quarter_block(n)
        for delta in (F(1, 20), F(1, 10), F(1, 4)):
            for gamma in (F(1, 50), F(1, 10)):
                mapping, trace = build_smooth_entropy_mapping(d, variational(), delta, gamma)
                bound = entropy_mapping_bound(trace, variational())
                achieved = divergence(d, apply_mapping(d, mapping), variational())
                assert float(achieved) <= bound.value + 1e-12


def test_oversized_codebook_falls_back_to_the_identity() -> None:
    d = quarter_block(6)
    mapping, trace = build_smooth_entropy_mapping(d, variational(), F(1, 10), F(3))
    assert trace.flags == ("size_exceeds_space",)
    assert trace.m > len(d.masses)
    assert mapping.m_n == len(d.masses)
    decoded = apply_mapping(d, mapping)
    assert decoded.masses == d.masses
    assert divergence(d, decoded, variational()) == 0


# ---------------------------------------------------------------------------
# baseline and helpers


def test_baseline_collapse_is_no_better_than_the_greedy_split() -> None:
    d = single_letter(F(15, 50), F(14, 50), F(13, 50), F(3, 50), F(3, 50), F(2, 50))
    m, gamma = 4, F(2, 25)
    mapping, _ = build_mapping(d, m, gamma)
    greedy = divergence(d, apply_mapping(d, mapping), variational())
    collapsed = divergence(d, apply_mapping(d, baseline_collapse_mapping(d, m, gamma)), variational())
    assert greedy == F(8, 50)
    assert collapsed == F(21, 50)
    assert greedy <= collapsed


def test_rate_window_brackets_log_m_over_n() -> None:
    low, high = rate_window(4, 2, F(1, 20))
    assert high == pytest.approx(math.log(4) / 2)
    assert low == pytest.approx(math.log(4) / 2 - 0.05)
    assert low < high


def test_mapping_pair_validation() -> None:
    with pytest.raises(InvalidModel):
        MappingPair(phi=(0, 2), psi=(0, 1), m_n=2)
    with pytest.raises(InvalidModel):
        MappingPair(phi=(0, 1), psi=(0,), m_n=2)
    with pytest.raises(InvalidModel):
        MappingPair(phi=(0, 1), psi=(0, 5), m_n=2)


def test_apply_mapping_pushes_mass_forward() -> None:
    d = single_letter(F(1, 2), F(1, 3), F(1, 6))
    pair = MappingPair(phi=(0, 0, 1), psi=(1, 2), m_n=2)
    decoded = apply_mapping(d, pair)
    assert decoded.masses == (F(0), F(5, 6), F(1, 6))


def test_bounds_reject_curves_without_monotonicity() -> None:
    d = quarter_block(2)
    _, trace = build_mapping(d, 4, F(1, 20))
    _, entropy_trace = build_smooth_entropy_mapping(d, variational(), F(1, 10), F(1, 20))
    with pytest.raises(OutOfRange):
        achievability_bound(trace, kl())
    with pytest.raises(OutOfRange):
        converse_bound(spectrum_cdf(d), 4, F(1, 20), kl())
    with pytest.raises(OutOfRange):
        entropy_mapping_bound(entropy_trace, kl())
    with pytest.raises(InvalidModel):
        entropy_mapping_bound(trace, variational())


def test_trace_serializes_to_plain_json_types() -> None:
    import json

    d = quarter_block(3)
    _, trace = build_mapping(d, 5, F(1, 20))
    blob = trace_to_jsonable(trace)
    text = json.dumps(blob, sort_keys=True)
    assert json.loads(text) == blob
    assert blob["kind"] == "spectrum_split"
    assert blob["stop_index"] == trace.stop_index


def test_reverse_kl_achievability_is_infinite_when_clamped() -> None:
    d = quarter_block(2)
    _, trace = build_mapping(d, 4, F(1, 20))
    ach = achievability_bound(trace, reverse_kl())
    assert ach.clamped
    assert ach.value == math.inf

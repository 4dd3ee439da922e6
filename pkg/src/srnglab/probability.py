"""Finite-blocklength sources and exact distributions over the outcome space.

A source model (IID, Markov chain, or a finite mixture of IID components)
is materialized at blocklength n as an explicit probability mass function
over all alphabet_size**n outcomes.  Outcomes are indexed lexicographically
by their symbol strings, so outcome ids double as base-k integers.

Two arithmetic modes are supported.  In exact mode every mass is a
`fractions.Fraction` and all comparisons are exact; this is the default
whenever the model parameters are rational.  In float mode masses are
doubles and the usual 1e-12 normalization tolerance applies.  Exact mode
matters because the downstream mapping constructions compare cumulative
masses against thresholds, and ties must resolve reproducibly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import CapExceeded, InvalidModel, ZeroMassOutcome

Mass = Union[Fraction, float]

#: Default limit on the number of atoms expand() will materialize.
DEFAULT_ATOM_CAP = 1 << 24

#: Normalization tolerance for float-mode distributions.
FLOAT_MASS_TOL = 1e-12

__all__ = [
    "DEFAULT_ATOM_CAP",
    "FLOAT_MASS_TOL",
    "AtomicDistribution",
    "IID",
    "Markov",
    "Mass",
    "Mixture",
    "Outcome",
    "SourceModel",
    "expand",
    "outcome_from_id",
    "outcome_id",
    "pmf_entropy",
    "self_information",
    "self_information_value",
    "sort_descending",
]


@dataclass(frozen=True)
class Outcome:
    """One element of X^n: its lexicographic rank and its symbol string."""

    id: int
    symbols: tuple[int, ...]


def outcome_id(symbols: Sequence[int], alphabet_size: int) -> int:
    """Lexicographic rank of a symbol string, i.e. its value in base k."""
    rank = 0
    for s in symbols:
        if not 0 <= s < alphabet_size:
            raise InvalidModel(f"symbol {s} outside alphabet of size {alphabet_size}")
        rank = rank * alphabet_size + s
    return rank


def outcome_from_id(oid: int, n: int, alphabet_size: int) -> Outcome:
    """Inverse of outcome_id: decode a rank into its base-k symbol string."""
    digits = [0] * n
    rem = oid
    for pos in range(n - 1, -1, -1):
        rem, digits[pos] = divmod(rem, alphabet_size)
    if rem:
        raise InvalidModel(f"outcome id {oid} outside space of size {alphabet_size}**{n}")
    return Outcome(oid, tuple(digits))


def _is_exact(value: Mass) -> bool:
    return isinstance(value, (Fraction, int))


def _validate_pmf(row: Sequence[Mass], what: str) -> tuple[Mass, ...]:
    row = tuple(row)
    if not row:
        raise InvalidModel(f"{what} is empty")
    for v in row:
        if isinstance(v, float) and not math.isfinite(v):
            raise InvalidModel(f"{what} contains a non-finite entry")
        if v < 0:
            raise InvalidModel(f"{what} contains a negative entry")
    total = sum(row)
    if all(_is_exact(v) for v in row):
        if total != 1:
            raise InvalidModel(f"{what} sums to {total}, expected exactly 1")
    elif abs(total - 1) > FLOAT_MASS_TOL:
        raise InvalidModel(f"{what} sums to {total!r}, off by more than {FLOAT_MASS_TOL}")
    return row


@dataclass(frozen=True)
class AtomicDistribution:
    """An explicit pmf over the enumerated outcome space X^n.

    masses[i] is the probability of the outcome with id i.  The tuple has
    exactly alphabet_size**n entries.  `exact` records the arithmetic mode;
    in exact mode every entry is a Fraction.
    """

    masses: tuple[Mass, ...]
    n: int
    alphabet_size: int
    exact: bool

    def __post_init__(self) -> None:
        if self.n < 1 or self.alphabet_size < 1:
            raise InvalidModel("blocklength and alphabet size must be positive")
        if len(self.masses) != self.alphabet_size**self.n:
            raise InvalidModel(
                f"mass vector has {len(self.masses)} entries, "
                f"expected {self.alphabet_size}**{self.n}"
            )
        _validate_pmf(self.masses, "mass vector")
        if self.exact and not all(_is_exact(m) for m in self.masses):
            raise InvalidModel("exact mode requires rational masses")

    @classmethod
    def from_masses(
        cls,
        masses: Sequence[Mass],
        n: int,
        alphabet_size: int,
        exact: bool | None = None,
    ) -> "AtomicDistribution":
        """Build a distribution, inferring the arithmetic mode if not given."""
        entries = tuple(masses)
        if exact is None:
            exact = all(_is_exact(m) for m in entries)
        if exact:
            entries = tuple(Fraction(m) for m in entries)
        else:
            entries = tuple(float(m) for m in entries)
        return cls(entries, n, alphabet_size, exact)

    def mass(self, oid: int) -> Mass:
        return self.masses[oid]

    def outcome(self, oid: int) -> Outcome:
        return outcome_from_id(oid, self.n, self.alphabet_size)

    def support(self) -> tuple[int, ...]:
        """Ids of all outcomes with positive mass, in ascending order."""
        return tuple(i for i, m in enumerate(self.masses) if m > 0)


@dataclass(frozen=True)
class IID:
    """Independent repetitions of a single-symbol pmf."""

    pmf: tuple[Mass, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pmf", _validate_pmf(self.pmf, "single-symbol pmf"))

    @property
    def alphabet_size(self) -> int:
        return len(self.pmf)


@dataclass(frozen=True)
class Markov:
    """A homogeneous Markov chain given by an initial pmf and transition rows."""

    initial: tuple[Mass, ...]
    transition: tuple[tuple[Mass, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "initial", _validate_pmf(self.initial, "initial pmf"))
        rows = tuple(
            _validate_pmf(row, f"transition row {i}") for i, row in enumerate(self.transition)
        )
        object.__setattr__(self, "transition", rows)
        k = len(self.initial)
        if len(rows) != k or any(len(row) != k for row in rows):
            raise InvalidModel("transition matrix shape does not match the alphabet")

    @property
    def alphabet_size(self) -> int:
        return len(self.initial)


@dataclass(frozen=True)
class Mixture:
    """A finite mixture of IID components with positive weights summing to 1."""

    weights: tuple[Mass, ...]
    components: tuple[IID, ...]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.components) or not self.components:
            raise InvalidModel("mixture needs one weight per component")
        for w in self.weights:
            if w <= 0:
                raise InvalidModel("mixture weights must be positive")
        _validate_pmf(self.weights, "mixture weights")
        sizes = {c.alphabet_size for c in self.components}
        if len(sizes) != 1:
            raise InvalidModel("mixture components must share one alphabet")

    @property
    def alphabet_size(self) -> int:
        return self.components[0].alphabet_size


Variant = Union[IID, Markov, Mixture]


@dataclass(frozen=True)
class SourceModel:
    """A finite-n instantiation of a general source."""

    variant: Variant
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidModel("blocklength must be at least 1")

    @property
    def alphabet_size(self) -> int:
        return self.variant.alphabet_size

    @property
    def exact(self) -> bool:
        """True when every model parameter is rational."""
        v = self.variant
        if isinstance(v, IID):
            return all(_is_exact(p) for p in v.pmf)
        if isinstance(v, Markov):
            return all(_is_exact(p) for p in v.initial) and all(
                _is_exact(p) for row in v.transition for p in row
            )
        return all(_is_exact(w) for w in v.weights) and all(
            _is_exact(p) for c in v.components for p in c.pmf
        )


def _iid_type_mass(pmf: Sequence[Mass], counts: Sequence[int]) -> Mass:
    # One canonical product per symbol-count vector, so that every outcome of
    # the same type receives a bit-identical mass even in float mode.
    mass: Mass = 1
    for p, c in zip(pmf, counts):
        if c:
            mass = mass * p**c
    return mass


def expand(model: SourceModel, cap: int = DEFAULT_ATOM_CAP) -> AtomicDistribution:
    """Materialize the exact distribution of X^n for a source model.

    Raises CapExceeded when the outcome space would exceed `cap` atoms.
    """
    k = model.alphabet_size
    size = k**model.n
    if size > cap:
        raise CapExceeded(f"outcome space holds {size} atoms, cap is {cap}")

    exact = model.exact
    variant = model.variant
    masses: list[Mass] = []
    if isinstance(variant, Markov):
        init = variant.initial
        rows = variant.transition
        for oid in range(size):
            symbols = outcome_from_id(oid, model.n, k).symbols
            mass: Mass = init[symbols[0]]
            for prev, cur in zip(symbols, symbols[1:]):
                mass = mass * rows[prev][cur]
            masses.append(mass)
    else:
        if isinstance(variant, IID):
            weighted: tuple[tuple[Mass, tuple[Mass, ...]], ...] = ((1, variant.pmf),)
        else:
            weighted = tuple(zip(variant.weights, (c.pmf for c in variant.components)))
        for oid in range(size):
            symbols = outcome_from_id(oid, model.n, k).symbols
            counts = [0] * k
            for s in symbols:
                counts[s] += 1
            mass = sum(w * _iid_type_mass(pmf, counts) for w, pmf in weighted)
            masses.append(mass)
    return AtomicDistribution.from_masses(masses, model.n, k, exact=exact)


def sort_descending(dist: AtomicDistribution) -> tuple[int, ...]:
    """Outcome ids ordered by strictly descending mass, ties by ascending id.

    Python's sort is stable, so reversing on the mass key alone keeps equal
    masses in their original ascending-id order.
    """
    return tuple(sorted(range(len(dist.masses)), key=lambda i: dist.masses[i], reverse=True))


def self_information_value(mass: Mass, n: int) -> float:
    """(1/n) log(1/mass) in nats, robust for exact masses of any magnitude.

    Rational masses are split into integer logarithms so that values far
    below the double-precision range (deep type classes at large n) do not
    underflow on conversion.
    """
    if isinstance(mass, int):
        mass = Fraction(mass)
    if isinstance(mass, Fraction):
        return (math.log(mass.denominator) - math.log(mass.numerator)) / n
    return -math.log(mass) / n


def self_information(dist: AtomicDistribution, outcome: Outcome | int) -> float:
    """Normalized self-information (1/n) log(1/P(x)) of one outcome, in nats."""
    oid = outcome.id if isinstance(outcome, Outcome) else outcome
    mass = dist.masses[oid]
    if mass == 0:
        raise ZeroMassOutcome(f"outcome {oid} has probability zero")
    return self_information_value(mass, dist.n)


def pmf_entropy(pmf: Sequence[Mass]) -> float:
    """Shannon entropy of a single-symbol pmf, in nats."""
    total = 0.0
    for p in pmf:
        if p > 0:
            total += float(p) * self_information_value(p, 1)
    return total

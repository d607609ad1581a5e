"""Exact probability distributions over finite product spaces, and couplings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Mapping, Sequence

from .errors import (
    EmptyKeepSet,
    InvalidDistribution,
    MismatchedOutcomeSets,
    ParseError,
    UnknownCoordinate,
)


def as_rational(value) -> Fraction:
    """Parse an exact rational from a Fraction, int or ``"num/den"`` string.

    Floats are refused: every probability in the package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational: {value!r}") from None
    raise ParseError(f"not an exact rational: {value!r} (use a 'num/den' string)")


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Distribution:
    """A probability table on ``outcomes ** len(coordinates)``.

    ``table`` maps outcome tuples (aligned with ``coordinates``) to
    :class:`~fractions.Fraction`; zero cells are dropped, so absent keys read
    as 0 and two distributions compare equal iff their laws coincide.
    """

    coordinates: tuple
    outcomes: tuple
    table: Mapping

    def __post_init__(self):
        object.__setattr__(self, "coordinates", tuple(self.coordinates))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if len(set(self.coordinates)) != len(self.coordinates):
            raise InvalidDistribution("repeated coordinate name")
        if not self.outcomes:
            raise InvalidDistribution("empty outcome set")
        valid = set(self.outcomes)
        k = len(self.coordinates)
        clean = {}
        total = Fraction(0)
        for key, value in dict(self.table).items():
            key = tuple(key)
            if len(key) != k or any(o not in valid for o in key):
                raise InvalidDistribution(f"cell {key!r} is not in O^{k}")
            value = as_rational(value)
            if value < 0:
                raise InvalidDistribution(f"negative probability {value} at {key!r}")
            total += value
            if value:
                clean[key] = clean.get(key, Fraction(0)) + value
        if total != 1:
            raise InvalidDistribution(f"probabilities sum to {total}, not 1")
        pos = {o: i for i, o in enumerate(self.outcomes)}
        ordered = sorted(clean.items(), key=lambda item: tuple(pos[o] for o in item[0]))
        object.__setattr__(self, "table", dict(ordered))

    def __hash__(self):
        return hash((self.coordinates, self.outcomes, tuple(self.table.items())))

    def __getitem__(self, key) -> Fraction:
        if isinstance(key, str) and len(self.coordinates) == 1:
            key = (key,)
        return self.table.get(tuple(key), Fraction(0))

    def cells(self):
        """All points of the product space in lexicographic order."""
        return itertools.product(self.outcomes, repeat=len(self.coordinates))

    def probabilities(self) -> list:
        """Dense list of probabilities in :meth:`cells` order."""
        return [self[c] for c in self.cells()]

    def same_law(self, other: "Distribution") -> bool:
        """Equality of tables, ignoring coordinate names."""
        return (
            len(self.coordinates) == len(other.coordinates)
            and self.outcomes == other.outcomes
            and self.table == other.table
        )

    def rename(self, coordinates) -> "Distribution":
        return Distribution(tuple(coordinates), self.outcomes, self.table)

    @classmethod
    def from_probabilities(cls, coordinates, outcomes, probs) -> "Distribution":
        """Build from a dense list in lexicographic cell order."""
        coordinates = tuple(coordinates)
        cells = list(itertools.product(outcomes, repeat=len(coordinates)))
        if len(probs) != len(cells):
            raise InvalidDistribution(f"expected {len(cells)} probabilities, got {len(probs)}")
        return cls(coordinates, tuple(outcomes), dict(zip(cells, map(as_rational, probs))))

    @classmethod
    def point_mass(cls, coordinates, outcomes, cell) -> "Distribution":
        return cls(tuple(coordinates), tuple(outcomes), {tuple(cell): Fraction(1)})

    @classmethod
    def uniform(cls, coordinates, outcomes) -> "Distribution":
        coordinates = tuple(coordinates)
        cells = list(itertools.product(outcomes, repeat=len(coordinates)))
        w = Fraction(1, len(cells))
        return cls(coordinates, tuple(outcomes), {c: w for c in cells})


def marginalize(d: Distribution, keep: Sequence) -> Distribution:
    """Sum out every coordinate not in ``keep``.

    The result's coordinates follow the order of ``keep``, so this doubles as
    a reindexing operation.
    """
    keep = tuple(keep)
    if not keep:
        raise EmptyKeepSet("keep set is empty")
    for c in keep:
        if c not in d.coordinates:
            raise UnknownCoordinate(f"{c!r} is not a coordinate of the distribution")
    if len(set(keep)) != len(keep):
        raise UnknownCoordinate("keep set repeats a coordinate")
    pos = [d.coordinates.index(c) for c in keep]
    out: dict = {}
    for cell, p in d.table.items():
        key = tuple(cell[i] for i in pos)
        out[key] = out.get(key, Fraction(0)) + p
    return Distribution(keep, d.outcomes, out)


def _check_targets(targets) -> tuple:
    targets = list(targets)
    if not targets:
        raise MismatchedOutcomeSets("need at least one distribution to couple")
    outcomes = targets[0].outcomes
    for t in targets:
        if len(t.coordinates) != 1:
            raise InvalidDistribution("coupling targets must be distributions over O")
        if t.outcomes != outcomes:
            raise MismatchedOutcomeSets("coupling targets use different outcome sets")
    return outcomes


def _default_names(n):
    return tuple(f"s{i}" for i in range(n))


@dataclass(frozen=True)
class Coupling:
    """A joint distribution whose i-th coordinate marginal is ``targets[i]``."""

    joint: Distribution
    targets: tuple

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        _check_targets(self.targets)
        if len(self.joint.coordinates) != len(self.targets):
            raise InvalidDistribution("joint dimension differs from number of targets")
        for name, target in zip(self.joint.coordinates, self.targets):
            if not marginalize(self.joint, [name]).same_law(target):
                raise InvalidDistribution(f"marginal on {name!r} differs from its target")

    @property
    def outcomes(self):
        return self.joint.outcomes


def product_coupling(targets: Sequence[Distribution], names=None) -> Coupling:
    outcomes = _check_targets(targets)
    names = tuple(names) if names is not None else _default_names(len(targets))
    table = {}
    for cell in itertools.product(outcomes, repeat=len(targets)):
        p = prod((t[o] for t, o in zip(targets, cell)), start=Fraction(1))
        if p:
            table[cell] = p
    return Coupling(Distribution(names, outcomes, table), tuple(targets))


def diagonal_mass(c: Coupling | Distribution) -> Fraction:
    """Probability that all coordinates agree."""
    joint = c.joint if isinstance(c, Coupling) else c
    k = len(joint.coordinates)
    return sum((joint[(o,) * k] for o in joint.outcomes), Fraction(0))


def maximal_coupling_value(targets: Sequence[Distribution]) -> Fraction:
    """Largest diagonal mass any coupling of ``targets`` can reach."""
    outcomes = _check_targets(targets)
    return sum((min(t[o] for t in targets) for o in outcomes), Fraction(0))


def maximal_coupling(targets: Sequence[Distribution], names=None) -> Coupling:
    """A coupling attaining :func:`maximal_coupling_value`.

    Each diagonal point gets the common mass ``min_i p_i(o)``; what is left of
    every target is coupled independently and rescaled. The residual product
    never touches the diagonal because at each outcome the minimising
    target's residual is zero.
    """
    outcomes = _check_targets(targets)
    n = len(targets)
    names = tuple(names) if names is not None else _default_names(n)
    common = {o: min(t[o] for t in targets) for o in outcomes}
    rest = 1 - sum(common.values())
    table = {}
    for o, m in common.items():
        if m:
            table[(o,) * n] = m
    if rest:
        residual = [{o: t[o] - common[o] for o in outcomes} for t in targets]
        scale = rest ** (n - 1)
        for cell in itertools.product(outcomes, repeat=n):
            p = prod((r[o] for r, o in zip(residual, cell)), start=Fraction(1))
            if p:
                table[cell] = table.get(cell, Fraction(0)) + p / scale
    return Coupling(Distribution(names, outcomes, table), tuple(targets))

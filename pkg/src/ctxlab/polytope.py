"""Linear descriptions of behaviour sets in vector coordinates.

Equality lists cut the non-disturbing and non-degenerate sets out of the
product of simplices; the non-contextual set is given by its vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .behaviour import BehaviourVector, behaviour_from_global, dimension, vectorize
from .distributions import Distribution
from .scenario import Scenario, contexts_of, iter_intersecting_pairs
from .solver import check_size


@dataclass(frozen=True)
class LinearEquality:
    """``coefficients · P == rhs`` with a provenance label."""

    coefficients: tuple
    rhs: Fraction
    label: dict

    def holds(self, vector) -> bool:
        entries = vector.entries if isinstance(vector, BehaviourVector) else vector
        return sum((a * v for a, v in zip(self.coefficients, entries) if a), Fraction(0)) == self.rhs


def _offsets(scenario: Scenario) -> dict:
    offsets, pos = {}, 0
    k = len(scenario.outcomes)
    for ctx in scenario.contexts:
        offsets[ctx] = pos
        pos += k ** len(ctx)
    return offsets


def _marginal_coefficients(scenario, offsets, ctx, subset, target, sign, coeffs):
    """Add ``sign`` at every coordinate (s|ctx) with ``s`` restricted to ``subset`` equal to ``target``."""
    where = [ctx.index(x) for x in subset]
    for i, cell in enumerate(itertools.product(scenario.outcomes, repeat=len(ctx))):
        if tuple(cell[w] for w in where) == target:
            coeffs[offsets[ctx] + i] += sign


def ndeg_equalities(scenario: Scenario) -> list:
    """One equality per measurement, consecutive pair of its contexts and outcome but the last."""
    offsets = _offsets(scenario)
    n = dimension(scenario)
    out = []
    for x in scenario.measurements:
        ctxs = contexts_of(scenario, x)
        for c, c2 in zip(ctxs, ctxs[1:]):
            for o in scenario.outcomes[:-1]:
                coeffs = [0] * n
                _marginal_coefficients(scenario, offsets, c, (x,), (o,), 1, coeffs)
                _marginal_coefficients(scenario, offsets, c2, (x,), (o,), -1, coeffs)
                label = {"measurement": x, "contexts": [list(c), list(c2)], "outcome": [o]}
                out.append(LinearEquality(tuple(map(Fraction, coeffs)), Fraction(0), label))
    return out


def nd_equalities(scenario: Scenario) -> list:
    """One equality per intersecting context pair and intersection cell but the last."""
    offsets = _offsets(scenario)
    n = dimension(scenario)
    out = []
    for c, d, shared in iter_intersecting_pairs(scenario):
        cells = list(itertools.product(scenario.outcomes, repeat=len(shared)))
        for r in cells[:-1]:
            coeffs = [0] * n
            _marginal_coefficients(scenario, offsets, c, shared, r, 1, coeffs)
            _marginal_coefficients(scenario, offsets, d, shared, r, -1, coeffs)
            label = {"contexts": [list(c), list(d)], "intersection": list(shared), "outcome": list(r)}
            out.append(LinearEquality(tuple(map(Fraction, coeffs)), Fraction(0), label))
    return out


def simplex_equalities(scenario: Scenario) -> list:
    """Normalisation of every context table (the product-of-simplices hull)."""
    offsets = _offsets(scenario)
    n = dimension(scenario)
    k = len(scenario.outcomes)
    out = []
    for ctx in scenario.contexts:
        coeffs = [Fraction(0)] * n
        for i in range(k ** len(ctx)):
            coeffs[offsets[ctx] + i] = Fraction(1)
        out.append(LinearEquality(tuple(coeffs), Fraction(1), {"normalise": list(ctx)}))
    return out


def satisfies(equalities: Sequence[LinearEquality], vector) -> bool:
    return all(e.holds(vector) for e in equalities)


def nc_vertices(scenario: Scenario, size_cap: Optional[int] = None) -> list:
    """Vectors of all deterministic behaviours; their convex hull is the non-contextual set."""
    check_size(len(scenario.outcomes) ** len(scenario.measurements), size_cap)
    seen = set()
    out = []
    for u in itertools.product(scenario.outcomes, repeat=len(scenario.measurements)):
        point = Distribution.point_mass(scenario.measurements, scenario.outcomes, u)
        v = vectorize(behaviour_from_global(scenario, point))
        if v.entries not in seen:
            seen.add(v.entries)
            out.append(v)
    return out

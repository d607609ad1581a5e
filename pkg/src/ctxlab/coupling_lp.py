"""Coupling polytopes as linear systems, solved exactly.

Independent of the closed-form constructions in :mod:`ctxlab.distributions`;
used to cross-check them and to prove uniqueness of maximal couplings.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from .distributions import Distribution, _check_targets
from .solver import LinearSystem, check_size, maximize, minimize


def coupling_system(targets: Sequence[Distribution], size_cap: Optional[int] = None):
    """Constraints on a table over ``O^n`` whose marginals are ``targets``.

    Returns ``(system, cells)``; variable j is the probability of ``cells[j]``.
    """
    outcomes = _check_targets(targets)
    n = len(targets)
    check_size(len(outcomes) ** n, size_cap)
    cells = list(itertools.product(outcomes, repeat=n))
    system = LinearSystem(len(cells))
    for i, t in enumerate(targets):
        for o in outcomes:
            row = {j: 1 for j, cell in enumerate(cells) if cell[i] == o}
            system.add(row, t[o], label=f"marginal {i} at {o}")
    return system, cells


def diagonal_objective(cells) -> dict:
    return {j: 1 for j, cell in enumerate(cells) if len(set(cell)) == 1}


def optimal_diagonal_mass(targets, size_cap=None):
    """Maximum diagonal mass over all couplings, by linear optimisation.

    Returns ``(value, joint)`` with ``joint`` an optimal coupling's table.
    """
    system, cells = coupling_system(targets, size_cap)
    out = maximize(diagonal_objective(cells), system)
    names = tuple(f"s{i}" for i in range(len(targets)))
    joint = Distribution(names, targets[0].outcomes, dict(zip(cells, out.witness)))
    return out.optimum, joint


def maximal_coupling_range(targets, size_cap=None) -> dict:
    """For every cell, the (min, max) probability over all maximal couplings."""
    system, cells = coupling_system(targets, size_cap)
    best = maximize(diagonal_objective(cells), system).optimum
    system.add(diagonal_objective(cells), best, label="diagonal mass")
    ranges = {}
    for j, cell in enumerate(cells):
        lo = minimize({j: 1}, system).optimum
        hi = maximize({j: 1}, system).optimum
        ranges[cell] = (lo, hi)
    return ranges


def is_unique_maximal_coupling(targets, joint: Distribution, size_cap=None) -> bool:
    """True iff ``joint`` is the only coupling of ``targets`` of maximal diagonal mass."""
    for cell, (lo, hi) in maximal_coupling_range(targets, size_cap).items():
        if not lo == hi == joint[cell]:
            return False
    return True

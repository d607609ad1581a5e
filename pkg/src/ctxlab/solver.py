"""Exact rational linear feasibility and optimisation.

Problems are equality systems ``A x = b`` over ``x >= 0`` (free variables are
split internally). The engine is a two-phase revised simplex (Dantzig
pricing with a Bland's-rule fallback against cycling) run on ``gmpy2.mpq``;
results come back as :class:`fractions.Fraction`. Every answer is checked
before it is returned: feasible points by substitution, infeasibility by a
Farkas vector ``y`` with ``y·A <= 0`` column-wise and ``y·b > 0``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from gmpy2 import mpq

from .errors import (
    DimensionMismatch,
    InfeasibleRegion,
    ProblemTooLarge,
    SolverError,
    UnboundedObjective,
)

DEFAULT_SIZE_CAP = 2_000_000
_ZERO = mpq(0)
_ONE = mpq(1)
# consecutive degenerate pivots tolerated before falling back to Bland's rule
DEGENERATE_STREAK = 50


def default_size_cap() -> int:
    """Variable cap; ``CTXLAB_SIZE_CAP`` overrides the built-in default."""
    env = os.environ.get("CTXLAB_SIZE_CAP")
    if env:
        cap = int(env)
        if cap < 1:
            raise ValueError("CTXLAB_SIZE_CAP must be >= 1")
        return cap
    return DEFAULT_SIZE_CAP


def check_size(size: int, cap: Optional[int] = None) -> None:
    cap = default_size_cap() if cap is None else cap
    if size > cap:
        raise ProblemTooLarge(size, cap)


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass
class LinearSystem:
    """Equalities ``sum_j a_j x_j = rhs`` over ``num_vars`` variables.

    Each coefficient vector is either a dense sequence of length ``num_vars``
    or a sparse mapping ``{index: value}``. ``labels`` optionally names the
    rows (used when reporting certificates).
    """

    num_vars: int
    equalities: list = field(default_factory=list)
    nonnegative: bool = True
    labels: Optional[list] = None

    def add(self, coefficients, rhs, label=None) -> None:
        self.equalities.append((coefficients, rhs))
        if label is not None or self.labels is not None:
            if self.labels is None:
                self.labels = [None] * (len(self.equalities) - 1)
            self.labels.append(label)

    def sparse_rows(self) -> list:
        """Rows as ``({index: Fraction}, Fraction)`` pairs, validated."""
        rows = []
        for k, (coeffs, rhs) in enumerate(self.equalities):
            if isinstance(coeffs, Mapping):
                row = {}
                for j, v in coeffs.items():
                    if not 0 <= j < self.num_vars:
                        raise DimensionMismatch(f"row {k} references variable {j}")
                    v = Fraction(v)
                    if v:
                        row[j] = v
            else:
                if len(coeffs) != self.num_vars:
                    raise DimensionMismatch(
                        f"row {k} has {len(coeffs)} coefficients, expected {self.num_vars}"
                    )
                row = {j: Fraction(v) for j, v in enumerate(coeffs) if v}
            rows.append((row, Fraction(rhs)))
        return rows


@dataclass(frozen=True)
class SolveOutcome:
    status: Status
    witness: Optional[tuple] = None
    optimum: Optional[Fraction] = None
    certificate: Optional[tuple] = None

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE

    def __bool__(self):
        return self.feasible


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


class _RevisedSimplex:
    """Two-phase revised simplex on ``A x = b, x >= 0`` with an explicit sparse inverse."""

    def __init__(self, rows, rhs, n):
        m = len(rows)
        self.n = n
        self.m = m
        self.sign = [1] * m
        self.b = []
        self.cols = [[] for _ in range(n)]
        for i, (row, r) in enumerate(zip(rows, rhs)):
            s = -1 if r < 0 else 1
            self.sign[i] = s
            self.b.append(mpq(r) * s)
            for j, a in row.items():
                self.cols[j].append((i, mpq(a) * s))
        # pricing fast path: columns whose entries are all +1 keep just their rows
        self.unit_rows = [
            tuple(i for i, _ in col) if all(a == 1 for _, a in col) else None
            for col in self.cols
        ]
        # artificial variable n + i is the unit column e_i
        self.basis = [n + i for i in range(m)]
        self.binv = [{i: _ONE} for i in range(m)]
        self.x = list(self.b)
        self.is_basic = bytearray(n + m)
        for v in self.basis:
            self.is_basic[v] = 1
        self.iterations = 0

    def _duals(self, cost):
        y = {}
        for r, var in enumerate(self.basis):
            c = cost(var)
            if c:
                for i, v in self.binv[r].items():
                    y[i] = y.get(i, _ZERO) + c * v
        return y

    def _column(self, j):
        col = self.cols[j]
        w = [_ZERO] * self.m
        for r, row in enumerate(self.binv):
            acc = _ZERO
            for i, a in col:
                v = row.get(i)
                if v is not None:
                    acc += v * a
            w[r] = acc
        return w

    def _pivot(self, p, j, w):
        piv = w[p]
        theta = self.x[p] / piv
        if theta:
            for r in range(self.m):
                if r != p and w[r]:
                    self.x[r] -= theta * w[r]
        self.x[p] = theta
        prow = {i: v / piv for i, v in self.binv[p].items()}
        self.binv[p] = prow
        for r in range(self.m):
            f = w[r]
            if r == p or not f:
                continue
            row = self.binv[r]
            for i, v in prow.items():
                nv = row.get(i, _ZERO) - f * v
                if nv:
                    row[i] = nv
                else:
                    row.pop(i, None)
        self.is_basic[self.basis[p]] = 0
        self.is_basic[j] = 1
        self.basis[p] = j
        self.iterations += 1

    def _reduced_cost(self, j, cj, y):
        rows = self.unit_rows[j]
        if rows is not None:
            return cj - sum([y[i] for i in rows], _ZERO)
        return cj - sum([y[i] * a for i, a in self.cols[j]], _ZERO)

    def run(self, cost):
        """Minimise ``sum cost(j) x_j`` from the current basis.

        Dantzig pricing, switching to Bland's rule once ``DEGENERATE_STREAK``
        consecutive pivots leave the objective unchanged; Bland's rule stays
        on until the objective moves again. Bland cannot cycle, and every
        nondegenerate pivot strictly lowers the objective, so this
        terminates. Returns False if the objective is unbounded below.
        """
        n, m = self.n, self.m
        costs = [cost(j) for j in range(n)]
        is_basic = self.is_basic
        streak = 0
        while True:
            yd = self._duals(cost)
            y = [yd.get(i, _ZERO) for i in range(m)]
            entering = None
            if streak >= DEGENERATE_STREAK:
                for j in range(n):
                    if not is_basic[j] and self._reduced_cost(j, costs[j], y) < 0:
                        entering = j
                        break
            else:
                best_d = _ZERO
                for j in range(n):
                    if not is_basic[j]:
                        d = self._reduced_cost(j, costs[j], y)
                        if d < best_d:
                            best_d, entering = d, j
            if entering is None:
                return True
            w = self._column(entering)
            leave = None
            best = None
            for r in range(m):
                if w[r] > 0:
                    ratio = self.x[r] / w[r]
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leave])
                    ):
                        best, leave = ratio, r
            if leave is None:
                return False
            streak = streak + 1 if best == 0 else 0
            self._pivot(leave, entering, w)

    def phase_one(self):
        n = self.n
        self.run(lambda j: _ONE if j >= n else _ZERO)
        infeasibility = sum((self.x[r] for r, v in enumerate(self.basis) if v >= n), _ZERO)
        return infeasibility

    def farkas(self):
        n = self.n
        y = self._duals(lambda j: _ONE if j >= n else _ZERO)
        return [y.get(i, _ZERO) * self.sign[i] for i in range(self.m)]

    def drive_out_artificials(self):
        for p in range(self.m):
            if self.basis[p] < self.n:
                continue
            row = self.binv[p]
            for j in range(self.n):
                if self.is_basic[j]:
                    continue
                acc = _ZERO
                for i, a in self.cols[j]:
                    v = row.get(i)
                    if v is not None:
                        acc += v * a
                if acc:
                    self._pivot(p, j, self._column(j))
                    break
            # otherwise the row is redundant and its artificial stays at zero

    def solution(self):
        x = [_ZERO] * self.n
        for r, var in enumerate(self.basis):
            if var < self.n:
                x[var] = self.x[r]
        return x


def _prepare(sys: LinearSystem):
    if sys.num_vars < 0:
        raise DimensionMismatch("num_vars must be nonnegative")
    rows = sys.sparse_rows()
    n = sys.num_vars
    if sys.nonnegative:
        return rows, n, lambda x: x
    split = []
    for row, rhs in rows:
        r = dict(row)
        for j, v in row.items():
            r[n + j] = -v
        split.append((r, rhs))
    return split, 2 * n, lambda x: [x[j] - x[n + j] for j in range(n)]


def check_witness(sys: LinearSystem, witness: Sequence) -> bool:
    """True iff ``witness`` satisfies every equality (and nonnegativity)."""
    if len(witness) != sys.num_vars:
        return False
    if sys.nonnegative and any(v < 0 for v in witness):
        return False
    for row, rhs in sys.sparse_rows():
        if sum((v * witness[j] for j, v in row.items()), Fraction(0)) != rhs:
            return False
    return True


def check_certificate(sys: LinearSystem, y: Sequence) -> bool:
    """True iff ``y`` proves the system has no (nonnegative) solution.

    For every variable the combination ``sum_i y_i a_ij`` must be ``<= 0``
    (``== 0`` for free variables) while ``sum_i y_i b_i > 0``.
    """
    rows = sys.sparse_rows()
    if len(y) != len(rows):
        return False
    combo = [Fraction(0)] * sys.num_vars
    total = Fraction(0)
    for yi, (row, rhs) in zip(y, rows):
        if not yi:
            continue
        total += yi * rhs
        for j, v in row.items():
            combo[j] += yi * v
    if sys.nonnegative:
        ok = all(c <= 0 for c in combo)
    else:
        ok = all(c == 0 for c in combo)
    return ok and total > 0


def _cap(sys, size_cap):
    check_size(sys.num_vars, size_cap)


def solve_feasibility(sys: LinearSystem, size_cap: Optional[int] = None) -> SolveOutcome:
    """Decide exactly whether the system has a solution.

    On success the outcome carries a witness; otherwise a Farkas certificate.
    Both are verified before returning.
    """
    _cap(sys, size_cap)
    rows, n, unsplit = _prepare(sys)
    lp = _RevisedSimplex([r for r, _ in rows], [b for _, b in rows], n)
    if lp.phase_one() > 0:
        y = tuple(_to_fraction(v) for v in lp.farkas())
        if not check_certificate(sys, y):
            raise SolverError("infeasibility certificate failed verification")
        return SolveOutcome(Status.INFEASIBLE, certificate=y)
    x = tuple(_to_fraction(v) for v in unsplit(lp.solution()))
    if not check_witness(sys, x):
        raise SolverError("feasible point failed verification")
    return SolveOutcome(Status.FEASIBLE, witness=x)


def maximize(objective, sys: LinearSystem, size_cap: Optional[int] = None) -> SolveOutcome:
    """Maximise ``objective · x`` over the system's solutions.

    ``objective`` is dense or a sparse ``{index: value}`` mapping.
    """
    _cap(sys, size_cap)
    if isinstance(objective, Mapping):
        obj = {j: Fraction(v) for j, v in objective.items() if v}
        if any(not 0 <= j < sys.num_vars for j in obj):
            raise DimensionMismatch("objective references an unknown variable")
    else:
        if len(objective) != sys.num_vars:
            raise DimensionMismatch("objective length differs from num_vars")
        obj = {j: Fraction(v) for j, v in enumerate(objective) if v}
    rows, n, unsplit = _prepare(sys)
    lp = _RevisedSimplex([r for r, _ in rows], [b for _, b in rows], n)
    if lp.phase_one() > 0:
        raise InfeasibleRegion("the constraint system has no solution")
    lp.drive_out_artificials()
    cost = {j: -mpq(v) for j, v in obj.items()}
    if not sys.nonnegative:
        cost.update({sys.num_vars + j: mpq(v) for j, v in obj.items()})
    if not lp.run(lambda j: cost.get(j, _ZERO)):
        raise UnboundedObjective("objective is unbounded above on the region")
    x = tuple(_to_fraction(v) for v in unsplit(lp.solution()))
    if not check_witness(sys, x):
        raise SolverError("optimal point failed verification")
    value = sum((v * x[j] for j, v in obj.items()), Fraction(0))
    return SolveOutcome(Status.FEASIBLE, witness=x, optimum=value)


def minimize(objective, sys: LinearSystem, size_cap: Optional[int] = None) -> SolveOutcome:
    if isinstance(objective, Mapping):
        neg = {j: -Fraction(v) for j, v in objective.items()}
    else:
        neg = [-Fraction(v) for v in objective]
    out = maximize(neg, sys, size_cap)
    return SolveOutcome(out.status, out.witness, -out.optimum, None)

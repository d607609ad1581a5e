"""Behaviours: one probability table per context.

Also the non-disturbance and non-degeneracy checks, the flat vector form
used by the polytope descriptions, and generators for standard fixtures.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .distributions import (
    Coupling,
    Distribution,
    as_rational,
    marginalize,
)
from .errors import (
    CoordinateMismatch,
    CouplingsEqual,
    EmptySubset,
    InvalidDistribution,
    MarginalMismatch,
    MeasurementNotInContext,
    MismatchedOutcomeSets,
    MissingContextTable,
    NegativeProbability,
    NotASubset,
    ParseError,
    SumNotOne,
    UnknownContext,
    ValidationError,
)
from .scenario import Scenario, contexts_of, iter_intersecting_pairs, validate_scenario


@dataclass(frozen=True)
class Behaviour:
    scenario: Scenario
    tables: Mapping

    def __post_init__(self):
        object.__setattr__(self, "tables", MappingProxyType(dict(self.tables)))

    def __getitem__(self, context) -> Distribution:
        return self.tables[tuple(sorted(context))]

    def __hash__(self):
        return hash((self.scenario, tuple(self.tables.items())))


@dataclass(frozen=True)
class Verdict:
    """Boolean verdict plus the object that justifies it (if any)."""

    holds: bool
    witness: object = None
    certificate: object = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class DisturbanceWitness:
    contexts: tuple
    subset: tuple
    lhs: Distribution
    rhs: Distribution


@dataclass(frozen=True)
class DegeneracyWitness:
    measurement: str
    contexts: tuple
    lhs: Distribution
    rhs: Distribution


def context_key(context) -> str:
    return ",".join(context)


def _parse_context(scenario, key):
    """Canonical context for ``key`` plus the member order the key was written in."""
    members = tuple(key.split(",") if isinstance(key, str) else (str(x) for x in key))
    ctx = tuple(sorted(members))
    if not scenario.has_context(ctx) or len(set(members)) != len(members):
        raise UnknownContext(f"{{{','.join(members)}}} is not a context of the scenario")
    return ctx, members


def _parse_table(scenario, ctx, raw, order=None) -> Distribution:
    if isinstance(raw, Distribution):
        if set(raw.coordinates) != set(ctx):
            raise CoordinateMismatch(f"table for {context_key(ctx)} has coordinates {raw.coordinates}")
        if raw.outcomes != scenario.outcomes:
            raise MismatchedOutcomeSets(f"table for {context_key(ctx)} uses another outcome set")
        raw, order = marginalize(raw, ctx).table, ctx
    if isinstance(raw, (list, tuple)):
        cells = list(itertools.product(scenario.outcomes, repeat=len(ctx)))
        if len(raw) != len(cells):
            raise ParseError(
                f"table for {context_key(ctx)} has {len(raw)} entries, expected {len(cells)}"
            )
        raw = dict(zip(cells, raw))
    if not isinstance(raw, Mapping):
        raise ParseError(f"table for {context_key(ctx)} must be an object")
    valid = set(scenario.outcomes)
    table = {}
    for key, value in raw.items():
        cell = tuple(key.split(",")) if isinstance(key, str) else tuple(str(o) for o in key)
        if len(cell) != len(ctx) or any(o not in valid for o in cell):
            raise ParseError(f"table for {context_key(ctx)}: {key!r} is not an outcome tuple")
        if cell in table:
            raise ParseError(f"table for {context_key(ctx)}: cell {key!r} given twice")
        p = as_rational(value)
        if p < 0:
            raise NegativeProbability(f"table for {context_key(ctx)}: p{cell} = {p} < 0")
        table[cell] = p
    total = sum(table.values(), Fraction(0))
    if total != 1:
        raise SumNotOne(ctx, total)
    if order is not None and order != ctx:
        return marginalize(Distribution(order, scenario.outcomes, table), ctx)
    return Distribution(ctx, scenario.outcomes, table)


def validate_behaviour(scenario: Scenario, raw: Mapping) -> Behaviour:
    """Check and canonicalise per-context tables into a :class:`Behaviour`.

    ``raw`` maps contexts (tuples of measurements, or comma-joined keys) to
    tables, each either a :class:`Distribution`, a mapping from outcome
    tuples (or comma-joined keys) to rationals, or a dense list in
    lexicographic cell order. Cells are aligned with the measurement order
    in which the context key is written. Missing cells read as 0.
    """
    scenario = validate_scenario(scenario)
    if isinstance(raw, Behaviour):
        raw = dict(raw.tables)
    if not isinstance(raw, Mapping):
        raise ParseError("behaviour tables must be an object keyed by context")
    parsed = {}
    for key, table in raw.items():
        ctx, order = _parse_context(scenario, key)
        if ctx in parsed:
            raise ParseError(f"two tables given for context {context_key(ctx)}")
        parsed[ctx] = _parse_table(scenario, ctx, table, order)
    for ctx in scenario.contexts:
        if ctx not in parsed:
            raise MissingContextTable(f"no table for context {{{context_key(ctx)}}}")
    return Behaviour(scenario, {ctx: parsed[ctx] for ctx in scenario.contexts})


def context_marginal(b: Behaviour, context, subset) -> Distribution:
    ctx = tuple(sorted(context))
    if not b.scenario.has_context(ctx):
        raise UnknownContext(f"{{{context_key(ctx)}}} is not a context")
    subset = tuple(sorted(subset))
    if not subset:
        raise EmptySubset("marginal over the empty set")
    if not set(subset) <= set(ctx):
        raise NotASubset(f"{set(subset)} is not a subset of {{{context_key(ctx)}}}")
    return marginalize(b[ctx], subset)


def point_distribution(b: Behaviour, context, x: str) -> Distribution:
    """The distribution of ``x`` as measured within ``context``."""
    ctx = tuple(sorted(context))
    if x not in ctx:
        raise MeasurementNotInContext(f"{x!r} is not in {{{context_key(ctx)}}}")
    return context_marginal(b, ctx, (x,))


def is_nondisturbing(b: Behaviour) -> Verdict:
    for c, d, shared in iter_intersecting_pairs(b.scenario):
        lhs = marginalize(b[c], shared)
        rhs = marginalize(b[d], shared)
        if lhs != rhs:
            return Verdict(False, DisturbanceWitness((c, d), shared, lhs, rhs))
    return Verdict(True)


def is_nondegenerate(b: Behaviour) -> Verdict:
    for x in b.scenario.measurements:
        ctxs = contexts_of(b.scenario, x)
        for c, c2 in zip(ctxs, ctxs[1:]):
            lhs = point_distribution(b, c, x)
            rhs = point_distribution(b, c2, x)
            if lhs != rhs:
                return Verdict(False, DegeneracyWitness(x, (c, c2), lhs, rhs))
    return Verdict(True)


def single_distributions(b: Behaviour) -> dict:
    """``x -> p_x`` for a non-degenerate behaviour."""
    out = {}
    for x in b.scenario.measurements:
        out[x] = point_distribution(b, contexts_of(b.scenario, x)[0], x)
    return out


# -- vector form ---------------------------------------------------------------


def vector_index(scenario: Scenario) -> list:
    """Labels ``(context, cell)`` of the vector coordinates, in order."""
    return [
        (ctx, cell)
        for ctx in scenario.contexts
        for cell in itertools.product(scenario.outcomes, repeat=len(ctx))
    ]


def dimension(scenario: Scenario) -> int:
    return sum(len(scenario.outcomes) ** len(c) for c in scenario.contexts)


@dataclass(frozen=True)
class BehaviourVector:
    scenario: Scenario
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if len(self.entries) != dimension(self.scenario):
            raise ValidationError(
                f"vector has {len(self.entries)} entries, expected {dimension(self.scenario)}"
            )

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def vectorize(b: Behaviour) -> BehaviourVector:
    entries = []
    for ctx in b.scenario.contexts:
        entries.extend(b[ctx].probabilities())
    return BehaviourVector(b.scenario, entries)


def devectorize(v: BehaviourVector | Sequence, scenario: Optional[Scenario] = None) -> Behaviour:
    """Inverse of :func:`vectorize`."""
    if isinstance(v, BehaviourVector):
        scenario, entries = v.scenario, v.entries
    else:
        entries = tuple(v)
        v = BehaviourVector(scenario, entries)
    raw = {}
    pos = 0
    k = len(scenario.outcomes)
    for ctx in scenario.contexts:
        size = k ** len(ctx)
        raw[ctx] = list(entries[pos : pos + size])
        pos += size
    return validate_behaviour(scenario, raw)


def mixture(behaviours: Sequence[Behaviour], weights: Sequence) -> Behaviour:
    """Convex combination of behaviours on a common scenario."""
    if len(behaviours) != len(weights) or not behaviours:
        raise ValidationError("need one weight per behaviour")
    weights = [as_rational(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights) != 1:
        raise ValidationError("weights must be nonnegative and sum to 1")
    scenario = behaviours[0].scenario
    if any(b.scenario != scenario for b in behaviours):
        raise ValidationError("behaviours live on different scenarios")
    vecs = [vectorize(b).entries for b in behaviours]
    mixed = [sum((w * v[i] for w, v in zip(weights, vecs)), Fraction(0)) for i in range(len(vecs[0]))]
    return devectorize(mixed, scenario)


# -- constructions -------------------------------------------------------------


def _joint(f):
    joint = f.joint if isinstance(f, Coupling) else f
    if len(joint.coordinates) != 2:
        raise InvalidDistribution("couplings for b, c must be joint distributions over O^2")
    return joint


def degenerate_counterexample(
    p_a: Distribution, p_d: Distribution, f, g
) -> Behaviour:
    """A non-degenerate but disturbing behaviour.

    Scenario: measurements a, b, c, d with contexts {a,b,c} and {b,c,d}.
    ``f`` and ``g`` are two different couplings of the same pair of
    distributions (for b and c); the first context's table is
    ``p_a(a) f(b, c)`` and the second's is ``g(b, c) p_d(d)``.
    """
    f, g = _joint(f), _joint(g)
    outcomes = p_a.outcomes
    for d in (p_d, f, g):
        if d.outcomes != outcomes:
            raise MismatchedOutcomeSets("all inputs must share one outcome set")
    if len(p_a.coordinates) != 1 or len(p_d.coordinates) != 1:
        raise InvalidDistribution("p_a and p_d must be distributions over O")
    for i in range(2):
        fi = marginalize(f, [f.coordinates[i]])
        gi = marginalize(g, [g.coordinates[i]])
        if not fi.same_law(gi):
            raise MarginalMismatch(f"f and g have different marginals on coordinate {i}")
    if f.same_law(g):
        raise CouplingsEqual("f and g are the same coupling")

    scenario = validate_scenario(
        {"measurements": ["a", "b", "c", "d"], "contexts": [["a", "b", "c"], ["b", "c", "d"]], "outcomes": list(outcomes)}
    )
    cells = list(itertools.product(outcomes, repeat=3))
    first = {(a, b, c): p_a[a] * f[(b, c)] for a, b, c in cells}
    second = {(b, c, d): g[(b, c)] * p_d[d] for b, c, d in cells}
    return validate_behaviour(scenario, {("a", "b", "c"): first, ("b", "c", "d"): second})


def behaviour_from_global(scenario: Scenario, global_dist: Distribution) -> Behaviour:
    """Restrict a distribution on all measurements to every context."""
    if sorted(global_dist.coordinates) != sorted(scenario.measurements):
        raise CoordinateMismatch("global distribution must range over exactly the measurements")
    if global_dist.outcomes != scenario.outcomes:
        raise MismatchedOutcomeSets("global distribution uses another outcome set")
    return Behaviour(scenario, {ctx: marginalize(global_dist, ctx) for ctx in scenario.contexts})


def _random_table(rng, n_cells, weight_bound):
    while True:
        weights = [rng.randint(0, weight_bound) for _ in range(n_cells)]
        total = sum(weights)
        if total:
            return [Fraction(w, total) for w in weights]


def sample_behaviour(scenario: Scenario, seed: int, weight_bound: int = 10) -> Behaviour:
    """A seeded random behaviour with integer-weight tables (generally disturbing)."""
    if weight_bound < 1:
        raise ValidationError("weight_bound must be >= 1")
    rng = random.Random(seed)
    k = len(scenario.outcomes)
    raw = {ctx: _random_table(rng, k ** len(ctx), weight_bound) for ctx in scenario.contexts}
    return validate_behaviour(scenario, raw)


def sample_global(scenario: Scenario, seed: int, weight_bound: int = 10) -> Distribution:
    rng = random.Random(seed)
    coords = scenario.measurements
    probs = _random_table(rng, len(scenario.outcomes) ** len(coords), weight_bound)
    return Distribution.from_probabilities(coords, scenario.outcomes, probs)


def pr_box(n: int = 4) -> Behaviour:
    """The PR box on the n-cycle.

    Outcomes are perfectly correlated on {x_i, x_{i+1}} for i < n-1 and
    anti-correlated on the closing context {x_{n-1}, x_0}; every single
    measurement is uniform.
    """
    from .scenario import ncycle_scenario

    scenario = ncycle_scenario(n, ("0", "1"))
    half = Fraction(1, 2)
    closing = tuple(sorted((f"x{n - 1}", "x0")))
    raw = {}
    for ctx in scenario.contexts:
        if ctx == closing:
            raw[ctx] = {("0", "1"): half, ("1", "0"): half}
        else:
            raw[ctx] = {("0", "0"): half, ("1", "1"): half}
    return validate_behaviour(scenario, raw)


def counterexample_fixture(outcomes: Sequence = ("0", "1")) -> Behaviour:
    """Counterexample with uniform p_a, p_d, perfectly correlated f and product g."""
    outcomes = tuple(outcomes)
    uni = Distribution.uniform(("o",), outcomes)
    k = len(outcomes)
    f = Distribution(("b", "c"), outcomes, {(o, o): Fraction(1, k) for o in outcomes})
    g = Distribution.uniform(("b", "c"), outcomes)
    return degenerate_counterexample(uni, uni, f, g)


def sample_counterexample(seed: int, n_outcomes: int = 2, weight_bound: int = 10) -> Behaviour:
    """Random admissible input for :func:`degenerate_counterexample`.

    ``f`` is a random table on O^2; ``g`` moves mass around one rectangle
    ``(i,j) (i,j') (i',j) (i',j')`` of ``f``, which keeps both marginals.
    """
    if n_outcomes < 2:
        raise ValidationError("two different couplings need at least two outcomes")
    rng = random.Random(seed)
    outcomes = tuple(str(i) for i in range(n_outcomes))

    def rand_dist(coords):
        probs = _random_table(rng, n_outcomes ** len(coords), weight_bound)
        return Distribution.from_probabilities(coords, outcomes, probs)

    while True:
        f = rand_dist(("b", "c"))
        i, i2 = rng.sample(outcomes, 2)
        j, j2 = rng.sample(outcomes, 2)
        room = min(f[(i, j2)], f[(i2, j)])
        if room:
            break
    t = room * Fraction(rng.randint(1, weight_bound), weight_bound)
    g = dict(f.table)
    for cell, delta in (((i, j), t), ((i2, j2), t), ((i, j2), -t), ((i2, j), -t)):
        g[cell] = g.get(cell, Fraction(0)) + delta
    g = Distribution(("b", "c"), outcomes, g)
    return degenerate_counterexample(rand_dist(("o",)), rand_dist(("o",)), f, g)

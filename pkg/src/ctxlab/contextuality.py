"""Standard and extended non-contextuality, behaviour extensions, classification.

All verdicts reduce to exact linear feasibility problems over tables on
``O^X`` (standard) or ``O^X~`` (extended, one copy of each measurement per
context). Positive verdicts carry a distribution that can be checked by
marginalisation; negative ones carry a Farkas certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .behaviour import (
    Behaviour,
    Verdict,
    behaviour_from_global,
    is_nondegenerate,
    is_nondisturbing,
    point_distribution,
    validate_behaviour,
    vectorize,
)
from .coupling_lp import is_unique_maximal_coupling
from .distributions import (
    Distribution,
    diagonal_mass,
    marginalize,
    maximal_coupling_value,
)
from .errors import (
    DegenerateBehaviour,
    ImageMismatch,
    InternalInconsistency,
    NotMaximalCoupling,
)
from .polytope import nc_vertices
from .scenario import ExtendedScenario, Scenario, contexts_of, extend_scenario
from .solver import LinearSystem, check_certificate, check_size, solve_feasibility


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Multipliers ``y`` over labelled rows with ``y·A <= 0`` and ``y·b > 0``."""

    labels: tuple
    multipliers: tuple

    def verify(self, system: LinearSystem) -> bool:
        return check_certificate(system, self.multipliers)


@dataclass(frozen=True)
class GlobalSection:
    distribution: Distribution

    def restricts_to(self, b: Behaviour) -> bool:
        return all(
            marginalize(self.distribution, ctx) == b[ctx] for ctx in b.scenario.contexts
        )


@dataclass(frozen=True)
class BehaviourExtension:
    base: Behaviour
    extension: ExtendedScenario
    extended: Behaviour


@dataclass(frozen=True)
class ExtendedWitness:
    """A table on ``O^X~`` matching every context and maximally coupling every connection."""

    extension: ExtendedScenario
    distribution: Distribution

    def connection_marginal(self, x: str) -> Distribution:
        return marginalize(self.distribution, self.extension.connections[x])

    def as_extension(self, b: Behaviour) -> BehaviourExtension:
        ext = self.extension
        tables = {c: marginalize(self.distribution, c) for c in ext.scenario.contexts}
        return BehaviourExtension(b, ext, validate_behaviour(ext.scenario, tables))


# -- system builders -----------------------------------------------------------


def _encode(u, positions, k):
    idx = 0
    for p in positions:
        idx = idx * k + u[p]
    return idx


def _decode_table(names, outcomes, values) -> Distribution:
    k = len(outcomes)
    n = len(names)
    table = {}
    for idx, v in enumerate(values):
        if v:
            digits = []
            for _ in range(n):
                idx, r = divmod(idx, k)
                digits.append(outcomes[r])
            table[tuple(reversed(digits))] = v
    return Distribution(names, outcomes, table)


def _marginal_system(names, outcomes, blocks, extra=(), size_cap=None):
    """Tables on ``O^names`` with prescribed marginals.

    ``blocks`` is a list of ``(label, positions, target_probabilities)``; each
    adds one equality per cell of ``O^positions``. ``extra`` holds
    ``(label, predicate, rhs)`` rows summing the cells where ``predicate``
    holds.
    """
    k = len(outcomes)
    n = len(names)
    size = k ** n
    check_size(size, size_cap)
    system = LinearSystem(size)
    rows = [{}]
    labels = ["normalisation"]
    rhs = [Fraction(1)]
    offsets = []
    for label, positions, target in blocks:
        offsets.append(len(rows))
        for cell, p in zip(itertools.product(outcomes, repeat=len(positions)), target):
            rows.append({})
            labels.append(f"{label}({','.join(cell)})")
            rhs.append(p)
    extra_start = len(rows)
    for label, _, value in extra:
        rows.append({})
        labels.append(label)
        rhs.append(value)
    for idx, u in enumerate(itertools.product(range(k), repeat=n)):
        rows[0][idx] = 1
        for off, (_, positions, _) in zip(offsets, blocks):
            rows[off + _encode(u, positions, k)][idx] = 1
        for i, (_, predicate, _) in enumerate(extra):
            if predicate(u):
                rows[extra_start + i][idx] = 1
    for row, value, label in zip(rows, rhs, labels):
        system.add(row, value, label=label)
    return system


def standard_system(b: Behaviour, size_cap: Optional[int] = None) -> LinearSystem:
    """Global tables on ``O^X`` whose restriction to each context is its table."""
    sc = b.scenario
    pos = {x: i for i, x in enumerate(sc.measurements)}
    blocks = [
        (f"p[{','.join(ctx)}]", [pos[x] for x in ctx], b[ctx].probabilities())
        for ctx in sc.contexts
    ]
    return _marginal_system(sc.measurements, sc.outcomes, blocks, size_cap=size_cap)


def connection_targets(b: Behaviour, x: str) -> list:
    """``(p^C_x : C containing x)`` in context order."""
    return [point_distribution(b, c, x) for c in contexts_of(b.scenario, x)]


def extended_system(b: Behaviour, ext: Optional[ExtendedScenario] = None, size_cap=None):
    """Tables on ``O^X~`` matching each context on its image, with every
    connection's diagonal mass pinned to its maximal-coupling value."""
    sc = b.scenario
    ext = ext or extend_scenario(sc)
    names = ext.scenario.measurements
    check_size(len(sc.outcomes) ** len(names), size_cap)
    pos = {name: i for i, name in enumerate(names)}
    blocks = [
        (f"p[{','.join(ctx)}]", [pos[nm] for nm in ext.context_images[ctx]], b[ctx].probabilities())
        for ctx in sc.contexts
    ]
    extra = []
    for x, members in ext.connections.items():
        where = [pos[nm] for nm in members]
        value = maximal_coupling_value(connection_targets(b, x))

        def constant(u, where=where):
            first = u[where[0]]
            return all(u[w] == first for w in where)

        extra.append((f"diagonal T({x})", constant, value))
    system = _marginal_system(names, sc.outcomes, blocks, extra, size_cap=size_cap)
    return system, ext


def vertex_system(b: Behaviour, size_cap: Optional[int] = None) -> LinearSystem:
    """Convex weights on deterministic vertices reproducing ``vectorize(b)``."""
    vertices = nc_vertices(b.scenario, size_cap)
    target = vectorize(b).entries
    system = LinearSystem(len(vertices))
    system.add({j: 1 for j in range(len(vertices))}, 1, label="weights")
    for i, value in enumerate(target):
        row = {j: v.entries[i] for j, v in enumerate(vertices) if v.entries[i]}
        system.add(row, value, label=f"coordinate {i}")
    return system


def _certificate(system, outcome) -> InfeasibilityCertificate:
    return InfeasibilityCertificate(tuple(system.labels), outcome.certificate)


# -- verdicts ------------------------------------------------------------------


def is_noncontextual_standard(b: Behaviour, size_cap: Optional[int] = None) -> Verdict:
    """Does a single distribution on all measurements restrict to every table?"""
    system = standard_system(b, size_cap)
    out = solve_feasibility(system, size_cap)
    if not out:
        return Verdict(False, certificate=_certificate(system, out))
    sc = b.scenario
    section = GlobalSection(_decode_table(sc.measurements, sc.outcomes, out.witness))
    if not section.restricts_to(b):
        raise InternalInconsistency("global section does not reproduce the behaviour")
    return Verdict(True, section)


def is_noncontextual_standard_vertex(b: Behaviour, size_cap: Optional[int] = None) -> Verdict:
    """Membership in the convex hull of deterministic behaviours."""
    system = vertex_system(b, size_cap)
    out = solve_feasibility(system, size_cap)
    if not out:
        return Verdict(False, certificate=_certificate(system, out))
    return Verdict(True, out.witness)


def is_noncontextual_extended(b: Behaviour, size_cap: Optional[int] = None) -> Verdict:
    """Is there a joint table on ``O^X~`` matching every context whose
    connection marginals are maximal couplings?"""
    system, ext = extended_system(b, size_cap=size_cap)
    out = solve_feasibility(system, size_cap)
    if not out:
        return Verdict(False, certificate=_certificate(system, out))
    dist = _decode_table(ext.scenario.measurements, b.scenario.outcomes, out.witness)
    witness = ExtendedWitness(ext, dist)
    for ctx in b.scenario.contexts:
        if not marginalize(dist, ext.context_images[ctx]).same_law(b[ctx]):
            raise InternalInconsistency("extended witness misses a context table")
    for x in ext.connections:
        if diagonal_mass(witness.connection_marginal(x)) != maximal_coupling_value(
            connection_targets(b, x)
        ):
            raise InternalInconsistency(f"extended witness is not maximal on T({x})")
    return Verdict(True, witness)


def trivial_extension(global_dist: Distribution, ext: ExtendedScenario) -> Distribution:
    """Copy each global assignment to all per-context copies of its measurements."""
    coords = global_dist.coordinates
    pos = {x: i for i, x in enumerate(coords)}
    where = [pos[x] for x, _ in ext.extended_measurements]
    names = [f"{x}@{i}" for x, i in ext.extended_measurements]
    table = {tuple(u[w] for w in where): p for u, p in global_dist.table.items()}
    d = Distribution(names, global_dist.outcomes, table)
    return marginalize(d, ext.scenario.measurements)


def is_constant_on_connections(dist: Distribution, ext: ExtendedScenario) -> bool:
    """True iff every cell of positive mass is constant on every connection."""
    index = {name: i for i, name in enumerate(dist.coordinates)}
    groups = [[index[nm] for nm in members] for members in ext.connections.values()]
    for cell in dist.table:
        for g in groups:
            if len({cell[i] for i in g}) > 1:
                return False
    return True


# -- extensions ----------------------------------------------------------------


def _extended_tables(ext: ExtendedScenario, tables: Mapping) -> dict:
    out = {}
    for key, table in tables.items():
        members = key.split(",") if isinstance(key, str) else list(key)
        out[tuple(sorted(members))] = table
    return out


def extend_behaviour(
    b: Behaviour, extended_tables: Mapping, ext: Optional[ExtendedScenario] = None
) -> BehaviourExtension:
    """Validate per-extended-context tables as an extension of ``b``.

    Each context's image must carry the context's own table, and every
    connection table must be a maximal coupling of the measurement's
    per-context distributions.
    """
    ext = ext or extend_scenario(b.scenario)
    f = validate_behaviour(ext.scenario, _extended_tables(ext, extended_tables))
    for ctx in b.scenario.contexts:
        image = ext.context_images[ctx]
        if not marginalize(f[image], image).same_law(b[ctx]):
            raise ImageMismatch(f"table on the image of {{{','.join(ctx)}}} differs from p^C")
    for x, members in ext.connections.items():
        joint = marginalize(f[members], members)
        targets = connection_targets(b, x)
        for name, target in zip(members, targets):
            if not marginalize(joint, [name]).same_law(target):
                raise NotMaximalCoupling(x, f"table on T({x}) is not a coupling of p^C_{x}")
        mass = diagonal_mass(joint)
        best = maximal_coupling_value(targets)
        if mass != best:
            raise NotMaximalCoupling(
                x, f"table on T({x}) has diagonal mass {mass}, maximal couplings reach {best}"
            )
    return BehaviourExtension(b, ext, f)


def unique_extension_nondegenerate(
    b: Behaviour, check_unique: bool = True, size_cap: Optional[int] = None
) -> BehaviourExtension:
    """The only extension of a non-degenerate behaviour.

    Context images carry the context tables; each connection carries the
    diagonal coupling of the measurement's (single) distribution. With
    ``check_unique`` the solver confirms that no other connection table is a
    maximal coupling.
    """
    verdict = is_nondegenerate(b)
    if not verdict:
        w = verdict.witness
        raise DegenerateBehaviour(f"behaviour is degenerate at {w.measurement!r}")
    ext = extend_scenario(b.scenario)
    tables = {}
    for ctx in b.scenario.contexts:
        tables[ext.context_images[ctx]] = b[ctx].rename(ext.context_images[ctx])
    for x, members in ext.connections.items():
        p_x = connection_targets(b, x)[0]
        diag = {(o,) * len(members): p_x[o] for o in b.scenario.outcomes}
        tables[members] = Distribution(members, b.scenario.outcomes, diag)
        if check_unique and not is_unique_maximal_coupling(
            connection_targets(b, x), tables[members], size_cap
        ):
            raise InternalInconsistency(f"maximal coupling on T({x}) is not unique")
    return extend_behaviour(b, tables, ext)


# -- classification ------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    scenario: Scenario
    nd: Verdict
    ndeg: Verdict
    nc: Verdict
    ncext: Verdict

    def flags(self) -> dict:
        return {
            "nd": self.nd.holds,
            "ndeg": self.ndeg.holds,
            "nc": self.nc.holds,
            "ncext": self.ncext.holds,
        }

    def summary(self) -> str:
        return " ".join(f"{k}={'true' if v else 'false'}" for k, v in self.flags().items())


def check_inclusions(nd: bool, ndeg: bool, nc: bool, ncext: bool) -> None:
    if nc and not nd:
        raise InternalInconsistency("non-contextual behaviour reported as disturbing")
    if nd and not ndeg:
        raise InternalInconsistency("non-disturbing behaviour reported as degenerate")
    if nc != (ncext and ndeg):
        raise InternalInconsistency(
            f"standard verdict {nc} disagrees with extended {ncext} and non-degenerate {ndeg}"
        )


def classify(b: Behaviour, size_cap: Optional[int] = None) -> ClassificationReport:
    """Run all four verdicts and check them against the inclusion laws.

    Verdicts are computed independently (no short-circuiting) so that every
    call doubles as a consistency check.
    """
    ndeg = is_nondegenerate(b)
    nd = is_nondisturbing(b)
    ncext = is_noncontextual_extended(b, size_cap)
    nc = is_noncontextual_standard(b, size_cap)
    check_inclusions(nd.holds, ndeg.holds, nc.holds, ncext.holds)
    return ClassificationReport(b.scenario, nd, ndeg, nc, ncext)


def deterministic_behaviour(scenario: Scenario, assignment) -> Behaviour:
    """Behaviour induced by one global outcome assignment."""
    if isinstance(assignment, Mapping):
        assignment = [assignment[x] for x in scenario.measurements]
    point = Distribution.point_mass(scenario.measurements, scenario.outcomes, assignment)
    return behaviour_from_global(scenario, point)

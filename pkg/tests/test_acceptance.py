"""Acceptance criteria, each checked at its stated size and time budget.

Every test appends one line to the acceptance log, printed as PASS/FAIL in
the pytest terminal summary.
"""

import random
import time
from fractions import Fraction as F

import pytest

from ctxlab.behaviour import (
    behaviour_from_global,
    counterexample_fixture,
    degenerate_counterexample,
    is_nondegenerate,
    is_nondisturbing,
    mixture,
    pr_box,
    sample_behaviour,
    sample_global,
    vectorize,
)
from ctxlab.contextuality import (
    classify,
    extend_behaviour,
    extended_system,
    is_noncontextual_extended,
    is_noncontextual_standard,
    is_noncontextual_standard_vertex,
    standard_system,
    unique_extension_nondegenerate,
    connection_targets,
)
from ctxlab.coupling_lp import coupling_system, diagonal_objective, maximal_coupling_range, optimal_diagonal_mass
from ctxlab.distributions import Distribution, diagonal_mass, marginalize, maximal_coupling, maximal_coupling_value, product_coupling
from ctxlab.polytope import nc_vertices, nd_equalities, ndeg_equalities, satisfies
from ctxlab.scenario import ncycle_scenario
from ctxlab.solver import LinearSystem, check_certificate, maximize, solve_feasibility

from helpers import (
    cycle_box,
    handcrafted_nondisturbing,
    mixed_instances,
    nondegenerate_instances,
    random_distribution,
    random_scenario,
    random_target,
)
from linalg import rank

pytestmark = pytest.mark.acceptance


class Criterion:
    """Times a block and records its outcome in the acceptance log."""

    def __init__(self, log, name, budget=None):
        self.log, self.name, self.budget = log, name, budget
        self.detail = ""

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        within = self.budget is None or elapsed < self.budget
        passed = exc_type is None and within
        budget = f" (budget {self.budget:g}s)" if self.budget else ""
        reason = "" if exc_type is None else f"; {exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        self.log.append((self.name, passed, f"{self.detail}{reason}; {elapsed:.2f}s{budget}"))
        if exc_type is None and not within:
            raise AssertionError(f"{self.name} took {elapsed:.2f}s, budget {self.budget}s")
        return False


def test_criterion_1_nondisturbance_implies_nondegeneracy(acceptance_log):
    rng = random.Random(101)
    with Criterion(acceptance_log, "1 ND => NDeg", 10) as c:
        behaviours = []
        for _ in range(500):
            sc = random_scenario(rng, 5, 3)
            behaviours.append(behaviour_from_global(sc, sample_global(sc, rng.randint(0, 10**9), rng.choice([1, 4, 10]))))
        behaviours += handcrafted_nondisturbing()
        exceptions = 0
        nd_count = 0
        for b in behaviours:
            if is_nondisturbing(b):
                nd_count += 1
                if not is_nondegenerate(b):
                    exceptions += 1
        c.detail = f"{len(behaviours)} behaviours, {nd_count} non-disturbing, {exceptions} exceptions"
        assert len(behaviours) == 550
        assert nd_count == 550
        assert exceptions == 0


def _different_coupling(rng, f):
    """Another joint table on O^2 with the same marginals as ``f`` (None if there is none)."""
    b_marg = marginalize(f, ["b"]).rename(("o",))
    c_marg = marginalize(f, ["c"]).rename(("o",))
    prod = product_coupling([b_marg, c_marg], ("b", "c")).joint
    if not prod.same_law(f) and rng.random() < 0.5:
        return prod
    # shift mass around a rectangle whose anti-diagonal corners carry mass
    outcomes = f.outcomes
    pairs = [(a, b) for a in outcomes for b in outcomes if a != b]
    rects = [(i, i2, j, j2) for i, i2 in pairs for j, j2 in pairs if f[(i, j2)] and f[(i2, j)]]
    if not rects:
        return None
    i, i2, j, j2 = rng.choice(rects)
    room = min(f[(i, j2)], f[(i2, j)])
    t = room * F(rng.randint(1, 4), 4)
    table = dict(f.table)
    for cell, delta in (((i, j), t), ((i2, j2), t), ((i, j2), -t), ((i2, j), -t)):
        table[cell] = table.get(cell, F(0)) + delta
    return Distribution(("b", "c"), outcomes, table)


def test_criterion_2_nondegenerate_but_disturbing(acceptance_log):
    rng = random.Random(202)
    with Criterion(acceptance_log, "2 NDeg not in ND", 10) as c:
        ok = 0
        for _ in range(200):
            k = rng.choice([2, 3])
            outcomes = tuple(str(i) for i in range(k))
            p_a = random_target(rng, outcomes, sparse=rng.random() < 0.3)
            p_d = random_target(rng, outcomes, sparse=rng.random() < 0.3)
            g = None
            while g is None:
                f = random_distribution(rng, ("b", "c"), outcomes)
                g = _different_coupling(rng, f)
            b = degenerate_counterexample(p_a, p_d, f, g)
            nd, ndeg = is_nondisturbing(b), is_nondegenerate(b)
            if ndeg and not nd:
                ok += 1
        c.detail = f"{ok}/200 non-degenerate and disturbing"
        assert ok == 200


_MIXED = {}


def _mixed():
    if "instances" not in _MIXED:
        _MIXED["instances"] = mixed_instances(200)
    return _MIXED["instances"]


def test_criterion_3_standard_iff_extended_and_nondegenerate(acceptance_log):
    with Criterion(acceptance_log, "3 NC <=> NCext and NDeg", 300) as c:
        instances = _mixed()
        disagreements = 0
        tally = {}
        for b in instances:
            nc = bool(is_noncontextual_standard(b))
            ncext = bool(is_noncontextual_extended(b))
            ndeg = bool(is_nondegenerate(b))
            key = (nc, ncext, ndeg)
            tally[key] = tally.get(key, 0) + 1
            if nc != (ncext and ndeg):
                disagreements += 1
        spread = ", ".join(f"nc={k[0]:d}/ncext={k[1]:d}/ndeg={k[2]:d}:{v}" for k, v in sorted(tally.items()))
        c.detail = f"{len(instances)} instances, {disagreements} disagreements [{spread}]"
        assert len(instances) == 200
        assert disagreements == 0


def test_criterion_4_maximal_coupling_oracle(acceptance_log):
    rng = random.Random(404)
    with Criterion(acceptance_log, "4 maximal coupling", 30) as c:
        mismatches = 0
        for _ in range(200):
            k = rng.randint(2, 4)
            n = rng.randint(1, 4 if k <= 3 else 3) if rng.random() < 0.8 else rng.randint(1, 4)
            outcomes = tuple(str(i) for i in range(k))
            targets = [random_target(rng, outcomes, sparse=rng.random() < 0.4) for _ in range(n)]
            construction = diagonal_mass(maximal_coupling(targets))
            formula = sum(min(t[o] for t in targets) for o in outcomes)
            optimum, _ = optimal_diagonal_mass(targets)
            if not construction == formula == optimum == maximal_coupling_value(targets):
                mismatches += 1
        # q(E) = 1 iff all distributions are equal, and then the maximal coupling is unique
        law_failures = 0
        for _ in range(30):
            k = rng.randint(2, 3)
            outcomes = tuple(str(i) for i in range(k))
            p = random_target(rng, outcomes)
            n = rng.randint(2, 3)
            equal = [p] * n
            value, _ = optimal_diagonal_mass(equal)
            ranges = maximal_coupling_range(equal)
            diag = maximal_coupling(equal).joint
            unique = all(lo == hi == diag[cell] for cell, (lo, hi) in ranges.items())
            q = random_target(rng, outcomes)
            unequal = [p] * (n - 1) + [q]
            other, _ = optimal_diagonal_mass(unequal)
            if not (value == 1 and unique and (other == 1) == q.same_law(p)):
                law_failures += 1
        c.detail = f"200 families, {mismatches} mismatches; equal-family law failures {law_failures}/30"
        assert mismatches == 0 and law_failures == 0


def test_criterion_5_pr_box(acceptance_log):
    with Criterion(acceptance_log, "5 PR box", 5) as c:
        box = pr_box(4)
        report = classify(box)
        flags = report.flags()
        nc_cert = report.nc.certificate
        ncext_cert = report.ncext.certificate
        assert flags == {"nd": True, "ndeg": True, "nc": False, "ncext": False}
        assert nc_cert is not None and nc_cert.verify(standard_system(box))
        assert ncext_cert is not None and ncext_cert.verify(extended_system(box)[0])
        c.detail = f"{report.summary()}, both certificates verified"


def test_criterion_6_counterexample(acceptance_log):
    with Criterion(acceptance_log, "6 counterexample fixture", 5) as c:
        cx = counterexample_fixture()
        report = classify(cx)
        c.detail = f"got {report.summary()}, expected nd=false ndeg=true nc=false ncext=true"
        assert report.flags() == {"nd": False, "ndeg": True, "nc": False, "ncext": True}
        witness = report.ncext.witness
        assert diagonal_mass(witness.connection_marginal("b")) == 1
        assert diagonal_mass(witness.connection_marginal("c")) == 1


def test_criterion_7_vertex_oracle_agreement(acceptance_log):
    with Criterion(acceptance_log, "7 LP vs vertex oracle") as c:
        instances = _mixed() + [pr_box(4)]
        disagreements = sum(
            bool(is_noncontextual_standard(b)) != bool(is_noncontextual_standard_vertex(b)) for b in instances
        )
        c.detail = f"{len(instances)} instances, {disagreements} disagreements"
        assert disagreements == 0


def _alternative_system(targets):
    """Homogenised search for a maximal coupling with positive off-diagonal mass.

    Variables: one per cell plus a scale ``lam >= 0``. The coupling rows and
    the diagonal-optimum row are scaled by ``lam``; the off-diagonal mass is
    fixed at 1. Since couplings form a bounded set, this system is feasible
    iff some maximal coupling puts mass off the diagonal, i.e. iff an
    alternative to the diagonal table exists.
    """
    base, cells = coupling_system(targets)
    best = maximize(diagonal_objective(cells), base).optimum
    n = len(cells)
    lam = n
    system = LinearSystem(n + 1)
    for coeffs, rhs in base.equalities:
        row = dict(coeffs) if isinstance(coeffs, dict) else {j: v for j, v in enumerate(coeffs) if v}
        row[lam] = -F(rhs)
        system.add(row, 0)
    diag = diagonal_objective(cells)
    system.add({**diag, lam: -best}, 0)
    system.add({j: 1 for j, cell in enumerate(cells) if j not in diag}, 1)
    return system


def test_criterion_8_unique_extension(acceptance_log):
    with Criterion(acceptance_log, "8 unique extension", 60) as c:
        instances = nondegenerate_instances(100)
        connections = 0
        for b in instances:
            ext = unique_extension_nondegenerate(b)
            tables = dict(ext.extended.tables)
            assert extend_behaviour(b, tables).extended == ext.extended
            for x in ext.extension.connections:
                connections += 1
                out = solve_feasibility(_alternative_system(connection_targets(b, x)))
                assert not out
        c.detail = f"100 behaviours, {connections} connections, no alternative table feasible"


def test_criterion_9_polytope(acceptance_log):
    rng = random.Random(909)
    with Criterion(acceptance_log, "9 polytope descriptions") as c:
        sc = ncycle_scenario(4)
        nd, ndeg, verts = nd_equalities(sc), ndeg_equalities(sc), nc_vertices(sc)
        assert len(nd) == 4 and rank([e.coefficients for e in nd]) == 4
        assert len(ndeg) == 4 and rank([e.coefficients for e in ndeg]) == 4
        assert len(verts) == 16
        mismatches = 0
        truths = set()
        for i in range(100):
            kind = i % 4
            if kind == 0:
                b = sample_behaviour(sc, rng.randint(0, 10**9), rng.choice([1, 2, 10]))
            elif kind == 1:
                b = behaviour_from_global(sc, sample_global(sc, rng.randint(0, 10**9)))
            elif kind == 2:
                b = cycle_box(4, {j for j in range(4) if rng.random() < 0.5}, F(rng.randint(0, 4), 4))
            else:
                g = behaviour_from_global(sc, sample_global(sc, rng.randint(0, 10**9)))
                b = mixture([g, sample_behaviour(sc, rng.randint(0, 10**9))], [F(1, 2), F(1, 2)])
            v = vectorize(b)
            pair = (satisfies(nd, v), satisfies(ndeg, v))
            truths.add(pair)
            if pair != (bool(is_nondisturbing(b)), bool(is_nondegenerate(b))):
                mismatches += 1
        c.detail = f"4 + 4 independent equalities, 16 vertices; 100 behaviours, {mismatches} mismatches"
        assert mismatches == 0
        assert (True, True) in truths and (False, False) in truths

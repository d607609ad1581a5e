"""Generators shared by the test modules."""

import itertools
import random
from fractions import Fraction

from ctxlab.behaviour import (
    behaviour_from_global,
    mixture,
    pr_box,
    sample_behaviour,
    sample_counterexample,
    sample_global,
    validate_behaviour,
)
from ctxlab.distributions import Distribution
from ctxlab.scenario import extend_scenario, ncycle_scenario, validate_scenario


def random_scenario(rng, max_measurements=5, max_outcomes=3, min_outcomes=2):
    """A random scenario: random subsets, pruned to an anti-chain, gaps filled by singletons."""
    n = rng.randint(1, max_measurements)
    names = [chr(ord("a") + i) for i in range(n)]
    subsets = set()
    for _ in range(rng.randint(1, 4)):
        size = rng.randint(1, n)
        subsets.add(frozenset(rng.sample(names, size)))
    contexts = [s for s in subsets if not any(s < t for t in subsets)]
    covered = set().union(*contexts)
    contexts += [frozenset([x]) for x in names if x not in covered]
    k = rng.randint(min_outcomes, max_outcomes)
    return validate_scenario(
        {
            "measurements": names,
            "contexts": [sorted(c) for c in contexts],
            "outcomes": [str(i) for i in range(k)],
        }
    )


def extended_size(scenario):
    return len(scenario.outcomes) ** len(extend_scenario(scenario).scenario.measurements)


def random_distribution(rng, coords, outcomes, weight_bound=6, sparse=False):
    cells = list(itertools.product(outcomes, repeat=len(coords)))
    while True:
        w = [rng.randint(0, weight_bound) for _ in cells]
        if sparse:
            w = [v if rng.random() < 0.5 else 0 for v in w]
        if sum(w):
            return Distribution(tuple(coords), tuple(outcomes), {c: Fraction(v, sum(w)) for c, v in zip(cells, w)})


def random_target(rng, outcomes, weight_bound=6, sparse=False):
    return random_distribution(rng, ("o",), outcomes, weight_bound, sparse)


def cycle_box(n, anti, weight=Fraction(1)):
    """n-cycle behaviour: perfect (anti)correlation per context, mixed with uniform noise.

    ``anti`` lists context positions i (context {x_i, x_{i+1}}) that are
    anti-correlated; ``weight`` is the mass on the box, the rest is uniform.
    Always non-disturbing: every single-measurement marginal is uniform.
    """
    scenario = ncycle_scenario(n)
    half = Fraction(1, 2)
    raw = {}
    for i in range(n):
        ctx = tuple(sorted((f"x{i}", f"x{(i + 1) % n}")))
        box = {("0", "1"): half, ("1", "0"): half} if i in anti else {("0", "0"): half, ("1", "1"): half}
        raw[ctx] = {
            cell: weight * box.get(cell, Fraction(0)) + (1 - weight) * Fraction(1, 4)
            for cell in itertools.product("01", repeat=2)
        }
    return validate_behaviour(scenario, raw)


def handcrafted_nondisturbing():
    """Fifty non-disturbing behaviours that do not come from a global section by construction."""
    out = []
    weights = [Fraction(1), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), Fraction(0)]
    for n in range(3, 8):
        for anti in ({n - 1}, set(), {0, 1}):
            for w in weights[: 4 if anti == set() else 5]:
                out.append(cycle_box(n, anti, w))
    rng = random.Random(7)
    while len(out) < 50:
        sc = ncycle_scenario(rng.randint(3, 6))
        g = behaviour_from_global(sc, sample_global(sc, rng.randint(0, 10**6)))
        out.append(mixture([pr_box(len(sc.measurements)), g], [Fraction(1, 3), Fraction(2, 3)]))
    return out[:50]


def mixed_instances(count=200, seed=2024, cap=4096):
    """Mixed behaviours (sampled, global, counterexample, mixtures) with |O|^|X~| <= cap."""
    rng = random.Random(seed)
    pool = [ncycle_scenario(n) for n in (3, 4, 5)]
    pool.append(validate_scenario({"measurements": list("abc"), "contexts": [["a", "b"], ["b", "c"]], "outcomes": ["0", "1", "2"]}))
    while len(pool) < 12:
        sc = random_scenario(rng, 5, 3)
        if extended_size(sc) <= cap and len(sc.outcomes) ** len(sc.measurements) <= cap:
            pool.append(sc)
    big = [ncycle_scenario(6)]  # exactly 4096 cells in the extended problem
    out = []
    kinds = ["sampled", "global", "counterexample", "mixture"]
    i = 0
    while len(out) < count:
        kind = kinds[i % 4]
        sc = big[0] if i % 25 == 24 else rng.choice(pool)
        s = rng.randint(0, 10**9)
        if kind == "sampled":
            b = sample_behaviour(sc, s, rng.choice([1, 3, 10]))
        elif kind == "global":
            b = behaviour_from_global(sc, sample_global(sc, s, rng.choice([1, 3, 10])))
        elif kind == "counterexample":
            b = sample_counterexample(s, rng.choice([2, 2, 3]), rng.choice([3, 10]))
        else:
            n = len(sc.measurements)
            parts = [behaviour_from_global(sc, sample_global(sc, s))]
            if n >= 3 and sc == ncycle_scenario(n) and rng.random() < 0.7:
                parts.append(pr_box(n))
            else:
                parts.append(sample_behaviour(sc, s + 1, 5))
            w = [Fraction(rng.randint(1, 3)), Fraction(rng.randint(1, 6))]
            b = mixture(parts, [x / sum(w) for x in w])
        assert extended_size(b.scenario) <= cap
        out.append(b)
        i += 1
    return out


def nondegenerate_instances(count=100, seed=99):
    """Non-degenerate behaviours: global sections, counterexamples, cycle boxes."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        r = len(out) % 3
        if r == 0:
            sc = random_scenario(rng, 5, 3)
            out.append(behaviour_from_global(sc, sample_global(sc, rng.randint(0, 10**6), 4)))
        elif r == 1:
            out.append(sample_counterexample(rng.randint(0, 10**6), rng.choice([2, 3]), 5))
        else:
            n = rng.randint(3, 6)
            anti = {i for i in range(n) if rng.random() < 0.4}
            out.append(cycle_box(n, anti, Fraction(rng.randint(0, 4), 4)))
    return out

"""Compatibility scenarios and their extensions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateContext,
    EmptyOutcomeSet,
    NestedContext,
    ParseError,
    UncoveredMeasurement,
    UnknownMeasurement,
    ValidationError,
)

Context = tuple  # sorted tuple of measurement names


def _token(value, what):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError(f"{what} must be a string token, got {value!r}")
    value = str(value)
    if not value:
        raise ParseError(f"{what} must be nonempty")
    if "," in value:
        raise ParseError(f"{what} {value!r} must not contain ','")
    return value


@dataclass(frozen=True)
class Scenario:
    """A triple (measurements, contexts, outcomes) in canonical order.

    Build instances through :func:`validate_scenario`; the constructor does
    not re-check the axioms.
    """

    measurements: tuple
    contexts: tuple
    outcomes: tuple
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {c: i for i, c in enumerate(self.contexts)}
        object.__setattr__(self, "_index", index)

    def context_index(self, context) -> int:
        key = tuple(sorted(context))
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"{{{','.join(key)}}} is not a context") from None

    def has_context(self, context) -> bool:
        return tuple(sorted(context)) in self._index

    @property
    def n_outcomes(self) -> int:
        return len(self.outcomes)

    def to_dict(self) -> dict:
        return {
            "measurements": list(self.measurements),
            "contexts": [list(c) for c in self.contexts],
            "outcomes": list(self.outcomes),
        }


def validate_scenario(raw: Mapping | Scenario) -> Scenario:
    """Check the scenario axioms and return the canonical :class:`Scenario`.

    ``raw`` is a mapping with ``measurements``, ``contexts`` and ``outcomes``
    lists. Measurements, contexts (as sorted member lists) and outcomes are
    sorted lexicographically.
    """
    if isinstance(raw, Scenario):
        raw = raw.to_dict()
    if not isinstance(raw, Mapping):
        raise ParseError("scenario must be an object")
    for key in ("measurements", "contexts", "outcomes"):
        if key not in raw:
            raise ParseError(f"scenario is missing field {key!r}")
        if not isinstance(raw[key], (list, tuple)):
            raise ParseError(f"scenario field {key!r} must be a list")

    measurements = [_token(m, "measurement") for m in raw["measurements"]]
    if len(set(measurements)) != len(measurements):
        raise ValidationError("duplicate measurement names")
    known = set(measurements)

    outcomes = [_token(o, "outcome") for o in raw["outcomes"]]
    if not outcomes:
        raise EmptyOutcomeSet("outcome set is empty")
    if len(set(outcomes)) != len(outcomes):
        raise ValidationError("duplicate outcomes")

    contexts = []
    for i, ctx in enumerate(raw["contexts"]):
        if not isinstance(ctx, (list, tuple)):
            raise ParseError(f"contexts[{i}] must be a list")
        members = [_token(m, "measurement") for m in ctx]
        if not members:
            raise ValidationError(f"contexts[{i}] is empty")
        if len(set(members)) != len(members):
            raise ValidationError(f"contexts[{i}] repeats a measurement")
        for m in members:
            if m not in known:
                raise UnknownMeasurement(f"contexts[{i}] uses unknown measurement {m!r}")
        contexts.append(tuple(sorted(members)))
    if not contexts:
        raise ValidationError("context set is empty")
    if len(set(contexts)) != len(contexts):
        raise DuplicateContext("the same context is listed twice")

    covered = set().union(*map(set, contexts))
    for m in sorted(known - covered):
        raise UncoveredMeasurement(f"measurement {m!r} lies in no context")

    sets = [frozenset(c) for c in contexts]
    for i, a in enumerate(sets):
        for j, b in enumerate(sets):
            if i != j and a < b:
                raise NestedContext(
                    f"context {{{','.join(contexts[i])}}} is a proper subset of "
                    f"{{{','.join(contexts[j])}}}"
                )

    return Scenario(tuple(sorted(measurements)), tuple(sorted(contexts)), tuple(sorted(outcomes)))


def ncycle_scenario(n: int, outcomes: Sequence = ("0", "1")) -> Scenario:
    """The n-cycle: measurements x_0..x_{n-1}, contexts {x_i, x_{i+1 mod n}}."""
    if n < 3:
        raise ValidationError(f"an n-cycle needs n >= 3, got {n}")
    names = [f"x{i}" for i in range(n)]
    return validate_scenario(
        {
            "measurements": names,
            "contexts": [[names[i], names[(i + 1) % n]] for i in range(n)],
            "outcomes": list(outcomes),
        }
    )


def contexts_of(scenario: Scenario, x: str) -> tuple:
    """All contexts containing ``x``, in canonical order."""
    if x not in scenario.measurements:
        raise UnknownMeasurement(f"unknown measurement {x!r}")
    return tuple(c for c in scenario.contexts if x in c)


def extended_name(x: str, context_index: int) -> str:
    return f"{x}@{context_index}"


@dataclass(frozen=True)
class ExtendedScenario:
    """The scenario obtained by splitting each measurement into per-context copies.

    ``extended_measurements`` holds pairs ``(x, i)`` for x in the i-th base
    context; their names are ``"x@i"``. ``context_images`` maps each base
    context to its image (names listed in the base context's member order)
    and ``connections`` maps every measurement lying in more than one context
    to its connection (names listed in context order).
    """

    base: Scenario
    extended_measurements: tuple
    context_images: dict
    connections: dict
    scenario: Scenario

    def name(self, x: str, context) -> str:
        return extended_name(x, self.base.context_index(context))

    @property
    def extended_contexts(self) -> tuple:
        return self.scenario.contexts


def extend_scenario(scenario: Scenario) -> ExtendedScenario:
    pairs = []
    images = {}
    for i, ctx in enumerate(scenario.contexts):
        images[ctx] = tuple(extended_name(x, i) for x in ctx)
        pairs.extend((x, i) for x in ctx)
    connections = {}
    for x in scenario.measurements:
        owning = [i for i, ctx in enumerate(scenario.contexts) if x in ctx]
        if len(owning) > 1:
            connections[x] = tuple(extended_name(x, i) for i in owning)
    raw = {
        "measurements": [extended_name(x, i) for x, i in pairs],
        "contexts": [list(v) for v in images.values()] + [list(v) for v in connections.values()],
        "outcomes": list(scenario.outcomes),
    }
    return ExtendedScenario(
        base=scenario,
        extended_measurements=tuple(pairs),
        context_images=images,
        connections=connections,
        scenario=validate_scenario(raw),
    )


def iter_intersecting_pairs(scenario: Scenario) -> Iterable:
    """Pairs (C, D, C∩D) of distinct intersecting contexts, C before D."""
    ctxs = scenario.contexts
    for i in range(len(ctxs)):
        for j in range(i + 1, len(ctxs)):
            shared = tuple(x for x in ctxs[i] if x in ctxs[j])
            if shared:
                yield ctxs[i], ctxs[j], shared

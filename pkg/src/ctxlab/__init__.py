"""Exact contextuality checks for behaviours in compatibility scenarios."""

from .behaviour import (
    Behaviour,
    BehaviourVector,
    Verdict,
    behaviour_from_global,
    context_marginal,
    degenerate_counterexample,
    devectorize,
    is_nondegenerate,
    is_nondisturbing,
    mixture,
    point_distribution,
    pr_box,
    sample_behaviour,
    validate_behaviour,
    vectorize,
)
from .contextuality import (
    ClassificationReport,
    classify,
    extend_behaviour,
    is_noncontextual_extended,
    is_noncontextual_standard,
    is_noncontextual_standard_vertex,
    unique_extension_nondegenerate,
)
from .distributions import (
    Coupling,
    Distribution,
    diagonal_mass,
    marginalize,
    maximal_coupling,
    maximal_coupling_value,
    product_coupling,
)
from .polytope import nc_vertices, nd_equalities, ndeg_equalities
from .scenario import (
    ExtendedScenario,
    Scenario,
    contexts_of,
    extend_scenario,
    ncycle_scenario,
    validate_scenario,
)
from .solver import LinearSystem, SolveOutcome, maximize, minimize, solve_feasibility

__version__ = "0.1.0"

"""Continuous-time self-appraisal dynamics on switching interaction networks.

Simulation (switch-aligned RK4), checks of the standing assumptions on a
switching schedule, and the closed-form exponential convergence-rate
certificate for doubly stochastic interaction.
"""
from ._kernels import BACKEND
from .certificate import (
    RateCertificate,
    bound_at,
    certificate,
    certificate_from_run,
    check_envelope,
    window_contraction,
)
from .core_types import (
    AppraisalState,
    Extremes,
    InteractionMatrix,
    extremes,
    new_interaction_matrix,
    simplex_state,
    support_graph,
)
from .dynamics import equilibrium_fixed, lemma4_v, opinion_rhs, rhs, w_matrix
from .graph import DirectedGraph
from .integrator import IntegratorConfig, Trajectory, first_positivity_time, integrate
from .switching import (
    DwellBounds,
    SwitchingSchedule,
    check_assumptions,
    dwell_bounds,
    smallest_window,
    union_graph,
    verify_assumption1,
    verify_assumption2,
)

__version__ = "0.1.0"

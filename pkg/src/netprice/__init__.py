"""Exact equilibria and revenue optimization for pricing on social networks."""

from .core import (
    AffineSegment,
    GroupedInstance,
    Instance,
    Mark,
    PiecewiseEquilibrium,
    PricingOutcome,
    Side,
    agent_utility,
    evaluate,
    structure_of,
    to_rat,
    validate_instance,
)
from .linalg import invert, is_strictly_diag_dominant, solve_linear, spectral_radius_below_one
from .pricing import (
    fptas,
    grid_bruteforce_opt,
    optimal_scaled,
    optimal_shifted,
    optimal_uniform_price,
    revenue_at,
)
from .linesweep import (
    build_subproblem,
    equilibrium_at_price_vector,
    find_pivot,
    optimistic_sweep,
    pessimistic_sweep,
    sweep,
)
from .transfer import (
    g_value,
    is_eps_approx_equilibrium,
    is_equilibrium_exact,
    iterate_fixed_point,
    transfer,
)

__version__ = "0.1.0"

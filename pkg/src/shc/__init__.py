"""Piecewise-affine laboratory for periodic orbits near SH-simple heterodimensional cycles."""
from .errors import ShcError
from .model import SHSimpleCycle, canonical_cycle, random_cycle, validate_cycle
from .oracle import Itinerary, enumerate_periodic_points, trace_orbit, verify_params
from .planner import interval_defaults, plan_exhaustion
from .solver import LoopParams, solve_loop

__all__ = [
    "ShcError", "SHSimpleCycle", "canonical_cycle", "random_cycle", "validate_cycle",
    "Itinerary", "enumerate_periodic_points", "trace_orbit", "verify_params",
    "interval_defaults", "plan_exhaustion", "LoopParams", "solve_loop",
]

__version__ = "0.1.0"

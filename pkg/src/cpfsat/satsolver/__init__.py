"""SAT back-ends: embedded DPLL, external binaries and in-process CaDiCaL."""
from .backends import (SOLVER_ENV, SatResult, SatStatus, SolverConfig, embedded_dpll, run_external,
                       run_library, solve)
from .dpll import Dpll, DpllResult, dpll

__all__ = [
    "Dpll", "DpllResult", "SOLVER_ENV", "SatResult", "SatStatus", "SolverConfig", "dpll",
    "embedded_dpll", "run_external", "run_library", "solve",
]

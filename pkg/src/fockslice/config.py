"""Numerical tolerances shared by every module.

All thresholds live here so that tests, the validation suite and the
library agree on what "zero" means.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # State construction
    trace: float = 1e-10
    hermitian: float = 1e-12
    min_eigenvalue: float = -1e-10
    # Built operators (relative to max |entry|)
    hamiltonian_hermitian_rel: float = 1e-12
    # Time evolution
    integrator_rtol: float = 1e-8
    integrator_atol: float = 1e-11
    trace_drift_fail: float = 1e-6
    trace_drift_report: float = 1e-8
    positivity_report: float = -1e-8
    # Steady states
    no_steady_state_rel: float = 1e-6
    degenerate_rel: float = 1e-9
    # Confinement
    leakage: float = 1e-10
    top_level_guard: float = 1e-8
    # Superoperator memory budget (largest Hilbert dimension allowed)
    max_superop_dim: int = 80


TOL = Tolerances()

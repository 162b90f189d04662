"""Trapped-ion couplings confined to Fock-space windows, and the engineered
reservoirs that use them to stabilize Fock states and two-level superpositions."""

from .config import TOL, Tolerances
from .experiments import ScenarioConfig, Trajectory, load_config, run_scenario
from .hamiltonians import (LaserConfig, SlicedParams, build_bichromatic, build_lb,
                           build_sliced_B, build_sliced_h, build_ub, chi, chi_n,
                           coupling_A, dark_state, lamb_dicke_series_h)
from .lindblad import (Liouvillian, LindbladTerm, engineered_absorption,
                       engineered_sliced, evolve, full_bipartite_liouvillian,
                       steady_state, thermal_liouvillian, vectorize)

__version__ = "0.1.0"

"""Measurements behind the validation suite.

Each function returns the measured quantity; callers decide pass/fail.
"""
from __future__ import annotations

import math

import numpy as np

from . import hamiltonians as hm
from . import lindblad as lb
from . import observables as obs
from . import operators as ops


def unitary_leakage(h: np.ndarray, psi0: np.ndarray, window: tuple[int, int],
                    periods: float = 50.0, samples: int = 400) -> float:
    """Max mode population outside ``window`` under ``exp(-i h t)``.

    ``h`` acts on qubit (x) mode.  Times run up to ``periods`` oscillations
    of the fastest frequency, ``t_max = periods * 2 pi / ||h||``.
    """
    w, v = np.linalg.eigh(h)
    t_max = periods * 2 * np.pi / np.max(np.abs(w))
    c0 = v.conj().T @ psi0
    m = h.shape[0] // 2
    lo, hi = window
    outside = np.ones(m, dtype=bool)
    outside[lo:hi + 1] = False
    worst = 0.0
    for t in np.linspace(0.0, t_max, samples):
        psi = v @ (np.exp(-1j * w * t) * c0)
        pops = (np.abs(psi.reshape(2, m)) ** 2).sum(axis=0)
        worst = max(worst, float(pops[outside].sum()))
    return worst


def _spread_ket(dim: int, levels, qubit: np.ndarray) -> np.ndarray:
    """Normalized equal-weight, varied-phase superposition over ``levels``."""
    mode = np.zeros(dim, dtype=complex)
    for j, n in enumerate(levels):
        mode[n] = np.exp(0.7j * j) * (1 + 0.1 * j)
    mode /= np.linalg.norm(mode)
    return np.kron(qubit, mode)


def ub_confinement(N: int, omega: float = 1.0, variant: hm.Variant = "JC",
                   qubit: np.ndarray = ops.KET_G, dim: int | None = None) -> float:
    dim = hm.default_dim(N) if dim is None else dim
    h = hm.build_ub(N, omega, variant, dim)
    return unitary_leakage(h, _spread_ket(dim, range(0, N + 1), qubit), (0, N))


def lb_confinement(N: int, omega: float = 1.0, variant: hm.Variant = "JC",
                   qubit: np.ndarray = ops.KET_G, dim: int | None = None) -> float:
    """Population pushed down to ``|N>`` or below from a state on ``N+1..dim-3``.

    The top two levels are a truncation skirt and count as inside.
    """
    dim = hm.default_dim(N) if dim is None else dim
    h = hm.build_lb(N, omega, variant, dim)
    return unitary_leakage(h, _spread_ket(dim, range(N + 1, dim - 2), qubit), (N + 1, dim - 1))


def sliced_confinement(N: int, omega_bar_3: float = 1.0, qubit: np.ndarray = ops.KET_G,
                       dim: int | None = None) -> float:
    p = hm.SlicedParams(N, omega_bar_3)
    dim = hm.default_dim(N) if dim is None else dim
    h = hm.build_sliced_h(p, dim)
    psi = np.kron(qubit, hm.dark_state(N, omega_bar_3, dim))
    return unitary_leakage(h, psi, (N, N + 1))


def dark_state_residual(N: int, omega_bar_3: float, dim: int | None = None) -> float:
    p = hm.SlicedParams(N, omega_bar_3)
    B = hm.build_sliced_B(p, dim)
    return float(np.linalg.norm(B @ hm.dark_state(N, omega_bar_3, B.shape[0])))


def slice_block_rank(N: int, omega_bar_3: float) -> int:
    B = hm.build_sliced_B(hm.SlicedParams(N, omega_bar_3))
    return int(np.linalg.matrix_rank(hm.slice_block(B, N), tol=1e-12))


def absorption_stationarity(N: int, omega: float, kappa: float, dim: int | None = None) -> float:
    """``max|L rho| / Gamma`` for ``rho = |N><N|`` under the engineered absorber."""
    dim = hm.default_dim(N) if dim is None else dim
    L = lb.engineered_absorption(N, omega, kappa, dim)
    return float(np.max(np.abs(L.apply(ops.fock_dm(dim, N)))) / L.max_rate)


def sliced_stationarity(N: int, omega: float, kappa: float, omega_bar_3: float = 1.0,
                        dim: int | None = None) -> float:
    dim = hm.default_dim(N) if dim is None else dim
    L = lb.engineered_sliced(hm.SlicedParams(N, omega_bar_3, omega), kappa, dim)
    rho = ops.projector(hm.dark_state(N, omega_bar_3, dim))
    return float(np.max(np.abs(L.apply(rho))) / L.max_rate)


def thermal_mean_n_error(nbar: float = 0.01, dim: int = 12, tau_max: float = 5.0,
                         n0: int = 0, method: str = "adaptive") -> float:
    """Max deviation of integrated <n>(tau) from ``nbar + (n0 - nbar) e^-tau``."""
    L = lb.thermal_liouvillian(1.0, nbar, dim)
    taus = np.linspace(0.0, tau_max, 51)
    ev = lb.evolve(ops.fock_dm(dim, n0), L, taus, method=method)
    got = np.array([obs.mean_n(r) for r in ev.states])
    exact = nbar + (n0 - nbar) * np.exp(-taus)
    return float(np.max(np.abs(got - exact)))


def elimination_distance(M: int, omega: float, kappa: float, gamma0: float = 10.0,
                         nbar: float = 0.01, mode_dim: int | None = None,
                         taus=None) -> dict:
    """Bipartite (explicit qubit decay) vs effective absorber evolution.

    Both start from the thermal mode state; the qubit starts in ``|g>``.
    Returns the largest trace distance between the reduced bipartite state
    and the effective one over the time grid.
    """
    mode_dim = M + 6 if mode_dim is None else mode_dim
    gamma = gamma0 * (1 + M) ** 0.7
    taus = np.geomspace(1e-6, 0.1, 60) if taus is None else np.asarray(taus)
    rho_th = ops.thermal_dm(nbar, mode_dim)

    h = hm.build_ub(M, omega, "AJC", mode_dim)
    full = lb.full_bipartite_liouvillian(h, kappa, gamma, nbar).scaled(gamma)
    rho_full0 = ops.tensor_qubit_mode(ops.projector(ops.KET_G), rho_th)
    ev_full = lb.evolve(rho_full0, full, taus)

    eff = (lb.engineered_absorption(M, omega, kappa, mode_dim)
           + lb.thermal_liouvillian(gamma, nbar, mode_dim)).scaled(gamma)
    ev_eff = lb.evolve(rho_th, eff, taus)

    dists = [obs.trace_distance(ops.partial_trace_qubit(rf), re)
             for rf, re in zip(ev_full.states, ev_eff.states)]
    excited = [float(np.real(ops.partial_trace_mode(rf)[1, 1])) for rf in ev_full.states]
    eta = math.sqrt(2 / M)
    return {
        "kappa": kappa,
        "omega": omega,
        "chi_over_kappa": hm.chi(eta, omega) / kappa,
        "Gamma_over_gamma": lb.absorption_rate(M, omega, kappa) / gamma,
        "max_trace_distance": float(max(dists)),
        "final_trace_distance": float(dists[-1]),
        "final_excited_population": excited[-1],
    }


def elimination_scan(M: int = 5, omega: float = 1.2e6, kappa: float = 4e6,
                     factors=(1.0, math.sqrt(10), 10.0), **kw) -> list[dict]:
    """Increase ``kappa`` by ``factors`` with ``Omega ~ sqrt(kappa)`` so Gamma is fixed."""
    return [elimination_distance(M, omega * math.sqrt(f), kappa * f, **kw) for f in factors]

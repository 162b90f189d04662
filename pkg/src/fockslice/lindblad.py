"""Master equations: Liouvillian assembly, vectorization, evolution, steady states.

Rates and Hamiltonians are built in Hz and converted to the dimensionless
time ``tau = gamma * t`` with :meth:`Liouvillian.scaled` before evolution.

Vectorization is column stacking, ``vec(A X B) = (B^T kron A) vec(X)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from . import operators as ops
from .config import TOL, Tolerances
from .hamiltonians import SlicedParams, build_sliced_B, chi


SPARSE_FILL = 0.1


class ResourceBudgetError(MemoryError):
    """Superoperator would exceed the configured dimension budget."""


class IntegrationError(RuntimeError):
    pass


class StiffnessError(IntegrationError):
    pass


class NoSteadyStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class LindbladTerm:
    collapse: np.ndarray
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"Lindblad rate must be nonnegative, got {self.rate}")
        ops._check_square(np.asarray(self.collapse), "collapse operator")


@dataclass(frozen=True)
class Liouvillian:
    """``rho -> -i[H, rho] + sum_k rate_k D[C_k] rho``."""

    dim: int
    hamiltonian: np.ndarray | None = None
    terms: tuple[LindbladTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        shapes = [t.collapse.shape for t in self.terms]
        if self.hamiltonian is not None:
            shapes.append(np.shape(self.hamiltonian))
        for s in shapes:
            if s != (self.dim, self.dim):
                raise ops.DimensionError(f"operator of shape {s} in a dim={self.dim} Liouvillian")

    def __add__(self, other: "Liouvillian") -> "Liouvillian":
        if self.dim != other.dim:
            raise ops.DimensionError("cannot add Liouvillians of different dimension")
        if self.hamiltonian is None:
            h = other.hamiltonian
        elif other.hamiltonian is None:
            h = self.hamiltonian
        else:
            h = ops.add(self.hamiltonian, other.hamiltonian)
        return Liouvillian(self.dim, h, self.terms + other.terms)

    def scaled(self, unit: float) -> "Liouvillian":
        """Express all rates in units of ``unit`` (e.g. ``gamma``)."""
        h = None if self.hamiltonian is None else ops.scale(1 / unit, self.hamiltonian)
        return Liouvillian(self.dim, h, tuple(LindbladTerm(t.collapse, t.rate / unit) for t in self.terms))

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Direct (matrix-level) action on ``rho``."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        if self.hamiltonian is not None:
            h = self.hamiltonian
            out += -1j * (h @ rho - rho @ h)
        for t in self.terms:
            c = t.collapse
            cd = c.conj().T
            cdc = cd @ c
            out += t.rate * (c @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc))
        return out

    @property
    def max_rate(self) -> float:
        return max((t.rate for t in self.terms), default=0.0)


# Builders ------------------------------------------------------------------

def thermal_liouvillian(gamma: float, nbar: float, dim: int) -> Liouvillian:
    """Damping of the mode toward a thermal state of mean occupation ``nbar``."""
    if gamma < 0 or nbar < 0:
        raise ValueError("gamma and nbar must be nonnegative")
    a = ops.annihilation(dim)
    return Liouvillian(dim, None, (LindbladTerm(a, (1 + nbar) * gamma),
                                   LindbladTerm(ops.adjoint(a), nbar * gamma)))


def absorption_rate(N: int, omega: float, kappa: float) -> float:
    """``Gamma = 4 chi^2 / kappa`` at ``eta^2 = 2/N``."""
    return 4 * chi(math.sqrt(2 / N), omega) ** 2 / kappa


def sliced_rate(omega: float, kappa: float) -> float:
    return 4 * omega**2 / kappa


def absorption_collapse(N: int, dim: int, confine: bool = True) -> np.ndarray:
    """``A^dag(eta)`` at ``eta^2 = 2/N``.

    With ``confine`` (default) only transitions ``|n> -> |n+1>`` with
    ``n < N`` are kept, i.e. the operator descending from the upper-bounded
    AJC coupling.  The bare operator also pumps levels above ``N`` upward.
    """
    if dim < N + 2:
        raise ops.DimensionError(f"need dim >= {N + 2} for N={N}")
    n = np.arange(dim - 1)
    # <n+1|A^dag|n> = sqrt(n+1) (1 - n/N); exactly zero at n = N
    amp = np.sqrt(n + 1.0) * (N - n) / N
    if confine:
        amp[N:] = 0.0
    return ops._frozen(np.diag(amp, -1))


def engineered_absorption(N: int, omega: float, kappa: float, dim: int,
                          confine: bool = True) -> Liouvillian:
    """Engineered pumping into ``|N>`` at rate ``4 chi^2 / kappa``."""
    return Liouvillian(dim, None, (LindbladTerm(absorption_collapse(N, dim, confine),
                                                absorption_rate(N, omega, kappa)),))


def engineered_sliced(p: SlicedParams, kappa: float, dim: int) -> Liouvillian:
    """Dissipator with collapse ``B`` at rate ``4 Omega^2 / kappa``."""
    return Liouvillian(dim, None, (LindbladTerm(build_sliced_B(p, dim),
                                                sliced_rate(p.omega_scale, kappa)),))


def full_bipartite_liouvillian(h_int: np.ndarray, kappa: float, gamma: float,
                               nbar: float) -> Liouvillian:
    """Qubit (x) mode model with explicit qubit decay at rate ``kappa``."""
    d = np.shape(h_int)[0]
    if d % 2:
        raise ops.DimensionError("h_int must act on qubit (x) mode")
    m = d // 2
    a = ops.annihilation(m)
    eye_q, eye_m = np.eye(2), np.eye(m)
    terms = (LindbladTerm(ops.tensor_qubit_mode(ops.SIGMA_MINUS, eye_m), kappa),
             LindbladTerm(ops.tensor_qubit_mode(eye_q, a), (1 + nbar) * gamma),
             LindbladTerm(ops.tensor_qubit_mode(eye_q, ops.adjoint(a)), nbar * gamma))
    return Liouvillian(d, ops._frozen(h_int), terms)


# Vectorization ---------------------------------------------------------------

def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    dim = int(round(math.sqrt(v.size))) if dim is None else dim
    return np.asarray(v).reshape(dim, dim, order="F")


def vectorize(L: Liouvillian, tol: Tolerances = TOL) -> np.ndarray:
    """Dense ``dim^2 x dim^2`` superoperator of ``L``."""
    d = L.dim
    if d > tol.max_superop_dim:
        raise ResourceBudgetError(
            f"dim={d} exceeds superoperator budget {tol.max_superop_dim} "
            f"({d**2}x{d**2} dense complex matrix)")
    eye = np.eye(d)
    S = np.zeros((d * d, d * d), dtype=complex)
    if L.hamiltonian is not None:
        h = np.asarray(L.hamiltonian)
        S += -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for t in L.terms:
        if t.rate == 0:
            continue
        c = np.asarray(t.collapse)
        cdc = c.conj().T @ c
        S += t.rate * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))
    return S


# Evolution -------------------------------------------------------------------

@dataclass
class Evolution:
    taus: np.ndarray
    states: np.ndarray                  # (len(taus), dim, dim)
    trace_errors: np.ndarray
    min_eigenvalues: np.ndarray
    method: str
    info: dict = field(default_factory=dict)


def _check_grid(tau_grid) -> np.ndarray:
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise ValueError("tau grid must be a nonempty 1-D sequence")
    if taus[0] < 0 or np.any(np.diff(taus) <= 0):
        raise ValueError("tau grid must be nonnegative and strictly increasing")
    return taus


def _propagate_adaptive(S, v0, taus, tol):
    t_end = taus[-1]
    if t_end == 0:
        return np.tile(v0, (taus.size, 1)), {}
    if np.count_nonzero(S) < SPARSE_FILL * S.size:
        # same matrix, sparse LU inside the Newton solves
        S = sp.csc_matrix(S)
    sol = solve_ivp(lambda t, y: S @ y, (0.0, t_end), v0, method="BDF",
                    t_eval=taus, jac=S, rtol=tol.integrator_rtol,
                    atol=tol.integrator_atol)
    if sol.status != 0:
        raise StiffnessError(
            f"adaptive integrator failed ({sol.message}); "
            "retry with method='expm' (superoperator exponential)")
    return sol.y.T, {"nfev": int(sol.nfev), "njev": int(sol.njev), "nlu": int(sol.nlu)}


def _propagate_expm(S, v0, taus):
    out = np.empty((taus.size, v0.size), dtype=complex)
    cache: dict[float, np.ndarray] = {}
    v, t_prev = v0, 0.0
    for i, t in enumerate(taus):
        dt = t - t_prev
        if dt > 0:
            key = float(f"{dt:.12g}")
            if key not in cache:
                cache[key] = sla.expm(S * dt)
            v = cache[key] @ v
        out[i] = v
        t_prev = t
    return out, {"n_expm": len(cache)}


def evolve(rho0: np.ndarray, L: Liouvillian, tau_grid, method: str = "adaptive",
           tol: Tolerances = TOL) -> Evolution:
    """Evolve ``rho0`` under ``L`` (already in units of the time axis).

    ``method="adaptive"`` uses an implicit BDF integrator with the exact
    superoperator as Jacobian; ``method="expm"`` multiplies by dense matrix
    exponentials of each grid step.
    """
    taus = _check_grid(tau_grid)
    rho0 = ops.density_matrix(rho0)
    if rho0.shape[0] != L.dim:
        raise ops.DimensionError(f"state dim {rho0.shape[0]} != Liouvillian dim {L.dim}")
    S = vectorize(L, tol)
    v0 = vec(rho0).astype(complex)
    if method == "adaptive":
        ys, info = _propagate_adaptive(S, v0, taus, tol)
    elif method == "expm":
        ys, info = _propagate_expm(S, v0, taus)
    else:
        raise ValueError(f"unknown method {method!r}")

    d = L.dim
    states = np.empty((taus.size, d, d), dtype=complex)
    tr_err = np.empty(taus.size)
    lmin = np.empty(taus.size)
    for i, y in enumerate(ys):
        rho = unvec(y, d)
        states[i] = rho
        tr_err[i] = abs(np.trace(rho) - 1)
        lmin[i] = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if tr_err.max() > tol.trace_drift_fail:
        raise IntegrationError(f"trace drifted by {tr_err.max():.2e}")
    return Evolution(taus, states, tr_err, lmin, method, info)


# Steady states ---------------------------------------------------------------

@dataclass
class SteadyState:
    rho: np.ndarray
    degeneracy: int
    residual: float         # smallest singular value / ||S||


def steady_state(L: Liouvillian, seed: np.ndarray | None = None,
                 tol: Tolerances = TOL) -> SteadyState:
    """Zero mode of ``L``, Hermitized and trace-normalized.

    When several zero modes exist the one closest to ``seed`` (projection
    of ``vec(seed)`` onto the null space) is returned.
    """
    S = vectorize(L, tol)
    d = L.dim
    norm = np.linalg.norm(S, 2) or 1.0
    _, s, vh = np.linalg.svd(S)
    rel = s / norm
    if rel[-1] > tol.no_steady_state_rel:
        raise NoSteadyStateError(f"smallest singular value {rel[-1]:.2e} x ||L||; no zero mode")
    null = vh[rel <= max(tol.degenerate_rel, rel[-1])].conj().T     # columns span the null space
    degeneracy = null.shape[1]
    if degeneracy == 1:
        v = null[:, 0]
    else:
        if seed is None:
            seed = np.eye(d) / d
        v = null @ (null.conj().T @ vec(np.asarray(seed, dtype=complex)))
    rho = unvec(v, d)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise NoSteadyStateError("null vector is traceless; supply a seed state")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return SteadyState(ops._frozen(rho), degeneracy, float(rel[-1]))

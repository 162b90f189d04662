"""Sideband Hamiltonians whose couplings vanish outside chosen Fock windows.

Every builder returns a Hermitian matrix on ``qubit (x) mode`` (see
:mod:`fockslice.operators` for the ordering), in Hz when a Rabi frequency is
supplied.  The laser phase is taken as zero in the bounded and sliced
builders; only :func:`lamb_dicke_series_h` exposes it.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import operators as ops
from .operators import DimensionError

Variant = Literal["JC", "AJC"]
Bound = Literal["ub", "lb"]

# Above this level the second-order expansion is no longer trusted.
MAX_TRUSTED_N = 10
DEFAULT_PADDING = 16


class UnsupportedSliceError(ValueError):
    """Sliced interaction requested for N < 2."""


class TruncationError(DimensionError):
    """Truncated Fock space too small for the requested interaction."""


def default_dim(N: int) -> int:
    return N + DEFAULT_PADDING


def _warn_large_n(N: int) -> None:
    if N > MAX_TRUSTED_N:
        warnings.warn(
            f"N={N} exceeds {MAX_TRUSTED_N}; the second-order Lamb-Dicke form "
            "is not expected to hold", stacklevel=3)


@dataclass(frozen=True)
class LaserConfig:
    """Single-tone drive on sideband ``k = (omega_0 - omega) / nu``."""

    k: int
    eta: float
    omega_rabi: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.eta**2 < 2:
            raise ValueError(f"need 0 <= eta**2 < 2, got eta={self.eta}")
        if self.omega_rabi <= 0:
            raise ValueError(f"Rabi frequency must be positive, got {self.omega_rabi}")


@dataclass(frozen=True)
class SlicedParams:
    """Drive parameters for the slice ``{|N>, |N+1>}``.

    Only ``N``, the free ratio ``omega_bar_3`` and the overall scale are
    stored; the Lamb-Dicke parameters and the remaining relative Rabi
    frequencies follow from them.
    """

    N: int
    omega_bar_3: float = 1.0
    omega_scale: float = 1.0

    def __post_init__(self):
        if self.N < 2:
            raise UnsupportedSliceError(f"sliced interaction needs N >= 2, got N={self.N}")
        if self.omega_bar_3 <= 0:
            raise ValueError("omega_bar_3 must be positive")
        if self.omega_scale <= 0:
            raise ValueError("omega_scale must be positive")
        _warn_large_n(self.N)

    @property
    def boundaries(self) -> tuple[int, int, int, int]:
        """``K_j`` with ``eta_j^2 = 2 / K_j``: the level where ``N_j`` vanishes."""
        N = self.N
        return N + 1, N, N - 1, N + 1

    @property
    def eta_sq(self) -> tuple[float, float, float, float]:
        return tuple(2 / K for K in self.boundaries)

    @property
    def etas(self) -> tuple[float, float, float, float]:
        return tuple(math.sqrt(e) for e in self.eta_sq)

    @property
    def omega_bars(self) -> tuple[float, float, float, float]:
        N = self.N
        return ((N + 1) * math.sqrt(N + 1) / (N - 1),
                N * math.sqrt(N + 1) / (N + 1),
                self.omega_bar_3,
                1 / self.omega_bar_3)


# Full Lamb-Dicke series ----------------------------------------------------

def lamb_dicke_series_h(cfg: LaserConfig, l_max: int, dim: int) -> np.ndarray:
    """Resolved-sideband coupling summed to order ``l_max`` in the series.

    For ``k >= 0`` the mode operator is
    ``sum_l (i eta)^(2l+k) / (l! (l+k)!) (a^dag)^l a^l a^k``.  Negative ``k``
    (blue sidebands) uses ``(a^dag)^|k|`` in place of ``a^k``, placed to the
    left, so that ``sigma_+`` raises the phonon number.

    Terms are generated with the ratio recurrence
    ``t_{l+1} = t_l * (-eta^2) (n - l) / ((l + 1)(l + |k| + 1))``
    so no factorial is ever formed.
    """
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    if dim < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    k = abs(cfg.k)
    eta = cfg.eta
    n = np.arange(dim, dtype=float)

    # (i eta)^k / k!
    lead = 1.0 + 0j
    for j in range(1, k + 1):
        lead *= 1j * eta / j
    term = np.full(dim, lead)
    diag = term.copy()
    for l in range(min(l_max, dim - 1)):
        term = term * (-eta**2) * (n - l) / ((l + 1) * (l + k + 1))
        diag += term

    mode = np.zeros((dim, dim), dtype=complex)
    for m in range(dim - k):
        # sqrt((m+k)!/m!) links |m> and |m+k>
        shift = math.prod(math.sqrt(m + j) for j in range(1, k + 1))
        if cfg.k >= 0:
            mode[m, m + k] = diag[m] * shift       # <m|(a^dag)^l a^l a^k|m+k>
        else:
            mode[m + k, m] = diag[m] * shift       # <m+k|(a^dag)^k (a^dag)^l a^l|m>
    pref = cfg.omega_rabi * np.exp(1j * cfg.phi - eta**2 / 2)
    h = pref * np.kron(ops.SIGMA_PLUS, mode)
    return ops._frozen(h + h.conj().T)


# Second-order sideband form ------------------------------------------------

def coupling_A(eta: float, dim: int) -> np.ndarray:
    """``A(eta) = (1 - eta^2 n/2) a``; the number operator acts after ``a``."""
    if not 0 <= eta**2 < 2:
        raise ValueError(f"need 0 <= eta**2 < 2, got eta={eta}")
    a = ops.annihilation(dim)
    return ops._frozen((np.eye(dim) - eta**2 * ops.number(dim) / 2) @ a)


def chi(eta: float, omega: float) -> float:
    return eta * (1 - eta**2 / 2) * omega


def chi_n(n, eta: float, omega: float):
    """Coupling between ``|n>`` and ``|n+1>``.  Accepts scalar or array ``n``."""
    return np.sqrt(np.asarray(n) + 1.0) * (1 - eta**2 * np.asarray(n) / 2) * chi(eta, omega)


def effective_sideband_h(eta: float, omega: float, k: int, dim: int) -> np.ndarray:
    """``chi(eta) [A sigma_pm + A^dag sigma_mp]`` for ``k = +1`` / ``k = -1``."""
    if k not in (1, -1):
        raise ValueError("second-order form exists for k = +1 or -1 only")
    A = coupling_A(eta, dim)
    sig = ops.SIGMA_PLUS if k == 1 else ops.SIGMA_MINUS
    h = chi(eta, omega) * np.kron(sig, A)
    return ops._frozen(h + h.conj().T)


def chi_n_at_boundary(n, N: int, omega: float):
    """``chi_n`` at ``eta^2 = 2/N``, written so that ``chi_N`` is exactly zero."""
    n = np.asarray(n)
    return np.sqrt(n + 1.0) * (N - n) / N * chi(math.sqrt(2 / N), omega)


def _ladder(N: int, omega: float, levels, dim: int) -> np.ndarray:
    """``sum_{n in levels} chi_n |n><n+1|`` at ``eta^2 = 2/N``."""
    out = np.zeros((dim, dim), dtype=complex)
    for n in levels:
        out[n, n + 1] = chi_n_at_boundary(n, N, omega)
    return out


def _levels(N: int, bound: Bound, dim: int):
    if bound == "ub":
        if dim < N + 2:
            raise TruncationError(f"ub interaction for N={N} needs dim >= {N + 2}, got {dim}")
        return range(0, N)
    if bound == "lb":
        if dim < N + 4:
            raise TruncationError(f"lb interaction for N={N} needs dim >= {N + 4}, got {dim}")
        # the infinite sum stops at dim-2: the top two levels are a truncation skirt
        return range(N + 1, dim - 1)
    raise ValueError(f"bound must be 'ub' or 'lb', got {bound!r}")


def _bounded(N, omega, variant, bound, dim):
    if N < 1:
        raise ValueError("N must be >= 1")
    _warn_large_n(N)
    dim = default_dim(N) if dim is None else dim
    ladder = _ladder(N, omega, _levels(N, bound, dim), dim)
    if variant == "JC":
        sig = ops.SIGMA_PLUS
    elif variant == "AJC":
        sig = ops.SIGMA_MINUS
    else:
        raise ValueError(f"variant must be 'JC' or 'AJC', got {variant!r}")
    h = np.kron(sig, ladder)
    return ops._frozen(h + h.conj().T)


def build_ub(N: int, omega: float, variant: Variant = "JC", dim: int | None = None) -> np.ndarray:
    """JC (``sigma_+``) or AJC (``sigma_-``) coupling confined to ``|0>..|N>``."""
    return _bounded(N, omega, variant, "ub", dim)


def build_lb(N: int, omega: float, variant: Variant = "JC", dim: int | None = None) -> np.ndarray:
    """JC or AJC coupling on ``|N+1>`` and above, truncated at ``dim - 2``."""
    return _bounded(N, omega, variant, "lb", dim)


def build_bichromatic(N: int, omega: float, bound: Bound = "ub", dim: int | None = None) -> np.ndarray:
    """Red plus blue sideband drive: the bounded ladder times ``sigma_x``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    _warn_large_n(N)
    dim = default_dim(N) if dim is None else dim
    ladder = _ladder(N, omega, _levels(N, bound, dim), dim)
    return ops._frozen(np.kron(ops.SIGMA_X, ladder + ladder.conj().T))


# Sliced interaction ---------------------------------------------------------

def build_sliced_B(p: SlicedParams, dim: int | None = None) -> np.ndarray:
    """Mode operator ``B`` whose null vector spans the protected superposition."""
    dim = default_dim(p.N) if dim is None else dim
    if dim < p.N + 4:
        raise TruncationError(f"sliced interaction for N={p.N} needs dim >= {p.N + 4}, got {dim}")
    a = ops.annihilation(dim)
    ad = ops.creation(dim)
    n = np.arange(dim)
    # N_j = 1 - eta_j^2 n / 2 = (K_j - n) / K_j, exact at the boundary level
    N1, N2, N3, N4 = (np.diag((K - n) / K) for K in p.boundaries)
    o1, o2, o3, o4 = p.omega_bars
    return ops._frozen(o1 * N1 + o2 * N2 + o3 * (N3 @ a) + o4 * (ad @ N4))


def build_sliced_h(p: SlicedParams, dim: int | None = None) -> np.ndarray:
    B = build_sliced_B(p, dim)
    h = p.omega_scale * np.kron(ops.SIGMA_PLUS, B)
    return ops._frozen(h + h.conj().T)


def dark_state(N: int, omega_bar_3: float, dim: int | None = None) -> np.ndarray:
    """Normalized ``c_N|N> + c_{N+1}|N+1>`` with ``c_N / c_{N+1} = omega_bar_3``.

    Both amplitudes are real and positive.
    """
    if N < 2:
        raise UnsupportedSliceError(f"sliced interaction needs N >= 2, got N={N}")
    if omega_bar_3 <= 0:
        raise ValueError("omega_bar_3 must be positive")
    dim = default_dim(N) if dim is None else dim
    if dim < N + 2:
        raise TruncationError(f"dim must be >= {N + 2}")
    psi = np.zeros(dim, dtype=complex)
    norm = math.hypot(omega_bar_3, 1.0)
    psi[N] = omega_bar_3 / norm
    psi[N + 1] = 1.0 / norm
    return ops._frozen(psi)


def slice_block(B: np.ndarray, N: int) -> np.ndarray:
    """2x2 restriction of a mode operator to ``{|N>, |N+1>}``."""
    return np.asarray(B)[N:N + 2, N:N + 2]

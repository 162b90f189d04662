"""Scalar diagnostics of a mode density matrix."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .operators import DimensionError

# Mandel Q of the vacuum is 0/0; records carry NaN so it can never be read as 0.
VACUUM_Q = math.nan
_VACUUM_MEAN = 1e-12


def populations(rho: np.ndarray) -> np.ndarray:
    return np.real(np.diagonal(rho))


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """``<psi|rho|psi>`` for a pure target ket ``psi``."""
    target = np.asarray(target)
    if target.ndim != 1:
        raise ValueError("only pure (ket) targets are supported")
    if target.size != rho.shape[0]:
        raise DimensionError(f"target dim {target.size} != state dim {rho.shape[0]}")
    return float(np.real(target.conj() @ rho @ target))


def mean_n(rho: np.ndarray) -> float:
    p = populations(rho)
    return float(p @ np.arange(p.size))


def variance_n(rho: np.ndarray) -> float:
    p = populations(rho)
    n = np.arange(p.size)
    m = p @ n
    return float(p @ (n - m) ** 2)


def mandel_q(rho: np.ndarray) -> float:
    """``Var(n)/<n> - 1``; NaN for (numerically) the vacuum."""
    m = mean_n(rho)
    if m < _VACUUM_MEAN:
        return VACUUM_Q
    return variance_n(rho) / m - 1


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.vdot(rho, rho)))


def leakage(rho: np.ndarray, lo: int, hi: int) -> float:
    """Population outside the Fock window ``lo..hi`` (inclusive)."""
    d = rho.shape[0]
    if not 0 <= lo <= hi < d:
        raise ValueError(f"window {lo}..{hi} invalid for dim {d}")
    return float(1 - populations(rho)[lo:hi + 1].sum())


def top_level_population(rho: np.ndarray, levels: int = 2) -> float:
    return float(populations(rho)[-levels:].sum())


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    diff = np.asarray(rho1) - np.asarray(rho2)
    diff = 0.5 * (diff + diff.conj().T)
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


@dataclass(frozen=True)
class ObservableRecord:
    tau: float
    fidelity: float
    mandel_q: float
    mean_n: float
    variance_n: float
    purity: float
    trace_error: float
    leakage: float
    top_level_population: float
    min_eigenvalue: float

    def as_dict(self) -> dict:
        return asdict(self)


def record(tau: float, rho: np.ndarray, target: np.ndarray, window: tuple[int, int],
           min_eigenvalue: float | None = None) -> ObservableRecord:
    if min_eigenvalue is None:
        min_eigenvalue = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min())
    return ObservableRecord(
        tau=float(tau),
        fidelity=fidelity(rho, target),
        mandel_q=mandel_q(rho),
        mean_n=mean_n(rho),
        variance_n=variance_n(rho),
        purity=purity(rho),
        trace_error=float(abs(np.trace(rho) - 1)),
        leakage=leakage(rho, *window),
        top_level_population=top_level_population(rho),
        min_eigenvalue=float(min_eigenvalue),
    )

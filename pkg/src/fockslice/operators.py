"""Dense operator algebra on a truncated Fock space and on qubit (x) mode.

Conventions
-----------
* Operators are plain ``numpy.ndarray`` objects of dtype ``complex128``.
  Builders return read-only arrays; copy before mutating.
* Qubit basis is ``(|g>, |e>)`` with indices ``(0, 1)``, so
  ``sigma_plus = |e><g|`` has its single nonzero entry at ``[1, 0]``.
* Composite spaces are ordered qubit first: ``|q> (x) |n>`` sits at index
  ``q * dim_mode + n``.  :func:`tensor_qubit_mode` and
  :func:`partial_trace_qubit` are the only places that encode this.
"""
from __future__ import annotations

import numpy as np

from .config import TOL


class DimensionError(ValueError):
    """Raised for invalid or incompatible operator dimensions."""


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    x.flags.writeable = False
    return x


def _check_square(x: np.ndarray, name: str = "operator") -> int:
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {x.shape}")
    return x.shape[0]


def annihilation(dim: int) -> np.ndarray:
    """Truncated lowering operator, ``<n-1|a|n> = sqrt(n)``."""
    if dim < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    return _frozen(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1))


def creation(dim: int) -> np.ndarray:
    return adjoint(annihilation(dim))


def number(dim: int) -> np.ndarray:
    if dim < 2:
        raise DimensionError(f"dim must be >= 2, got {dim}")
    return _frozen(np.diag(np.arange(dim, dtype=float)))


def identity(dim: int) -> np.ndarray:
    if dim < 1:
        raise DimensionError(f"dim must be >= 1, got {dim}")
    return _frozen(np.eye(dim))


def adjoint(x: np.ndarray) -> np.ndarray:
    return _frozen(np.conj(np.transpose(x)))


def mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.shape[-1] != y.shape[0]:
        raise DimensionError(f"cannot multiply {x.shape} by {y.shape}")
    return _frozen(x @ y)


def add(*ops: np.ndarray) -> np.ndarray:
    shapes = {op.shape for op in ops}
    if len(shapes) != 1:
        raise DimensionError(f"cannot add operators of shapes {sorted(shapes)}")
    return _frozen(sum(ops[1:], np.array(ops[0], dtype=complex)))


def scale(c: complex, x: np.ndarray) -> np.ndarray:
    return _frozen(c * np.asarray(x))


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return _frozen(x @ y - y @ x)


def basis(dim: int, n: int) -> np.ndarray:
    """Fock ket ``|n>`` as a 1-D array."""
    if not 0 <= n < dim:
        raise DimensionError(f"level {n} outside truncation 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return _frozen(v)


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return _frozen(np.outer(psi, psi.conj()))


def level_projector(dim: int, levels) -> np.ndarray:
    """Diagonal projector onto the given Fock levels."""
    p = np.zeros(dim)
    p[list(levels)] = 1.0
    return _frozen(np.diag(p))


# Qubit operators in the (|g>, |e>) basis.
SIGMA_PLUS = _frozen(np.array([[0, 0], [1, 0]]))
SIGMA_MINUS = adjoint(SIGMA_PLUS)
SIGMA_X = _frozen(np.array([[0, 1], [1, 0]]))
SIGMA_Z = _frozen(np.array([[-1, 0], [0, 1]]))
KET_G = _frozen(np.array([1, 0]))
KET_E = _frozen(np.array([0, 1]))


def tensor_qubit_mode(q: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Kronecker product with the qubit factor first.

    Works for operators and, when both arguments are 1-D, for kets.
    """
    q = np.asarray(q)
    if q.shape not in ((2, 2), (2,)):
        raise DimensionError(f"qubit factor must be 2x2 or length 2, got {q.shape}")
    return _frozen(np.kron(q, m))


def partial_trace_qubit(rho: np.ndarray) -> np.ndarray:
    """Trace out the qubit of a ``qubit (x) mode`` density matrix."""
    d = _check_square(rho, "rho")
    if d % 2:
        raise DimensionError(f"qubit (x) mode dimension must be even, got {d}")
    m = d // 2
    r = np.asarray(rho).reshape(2, m, 2, m)
    return _frozen(np.einsum("iaib->ab", r))


def partial_trace_mode(rho: np.ndarray) -> np.ndarray:
    """Reduced 2x2 qubit state of a ``qubit (x) mode`` density matrix."""
    d = _check_square(rho, "rho")
    if d % 2:
        raise DimensionError(f"qubit (x) mode dimension must be even, got {d}")
    m = d // 2
    r = np.asarray(rho).reshape(2, m, 2, m)
    return _frozen(np.einsum("iaja->ij", r))


# States -------------------------------------------------------------------

class InvalidStateError(ValueError):
    pass


def density_matrix(rho, tol=TOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return a read-only copy.

    A 1-D input is treated as a ket and must have unit norm.
    """
    rho = np.array(rho, dtype=complex)
    if rho.ndim == 1:
        norm = np.linalg.norm(rho)
        if abs(norm - 1) > tol.trace:
            raise InvalidStateError(f"ket norm {norm!r} is not 1")
        rho = np.outer(rho, rho.conj())
    _check_square(rho, "rho")
    if abs(np.trace(rho) - 1) > tol.trace:
        raise InvalidStateError(f"trace {np.trace(rho)!r} is not 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol.hermitian:
        raise InvalidStateError("rho is not Hermitian")
    lmin = np.linalg.eigvalsh(rho).min()
    if lmin < tol.min_eigenvalue:
        raise InvalidStateError(f"rho has negative eigenvalue {lmin:.3e}")
    return _frozen(rho)


def fock_dm(dim: int, n: int) -> np.ndarray:
    return projector(basis(dim, n))


def thermal_populations(nbar: float, dim: int) -> np.ndarray:
    """Bose-Einstein populations ``nbar**n / (1 + nbar)**(n + 1)``, untruncated."""
    n = np.arange(dim)
    if nbar == 0:
        return (n == 0).astype(float)
    return np.exp(n * np.log(nbar) - (n + 1) * np.log1p(nbar))


def thermal_dm(nbar: float, dim: int) -> np.ndarray:
    """Thermal state truncated to ``dim`` levels and renormalized."""
    p = thermal_populations(nbar, dim)
    return _frozen(np.diag(p / p.sum()))


def is_hermitian(h: np.ndarray, rel: float = TOL.hamiltonian_hermitian_rel) -> bool:
    scale_ = np.max(np.abs(h))
    if scale_ == 0:
        return True
    return np.max(np.abs(h - h.conj().T)) <= rel * scale_

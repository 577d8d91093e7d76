"""Symmetric eigensolvers for the small dense matrices of the dispersion problem.

The cyclic Jacobi kernel is compiled with Cython when the extension is
available; otherwise an equivalent numpy implementation is used.  Set
``MMWAVE_PURE_PYTHON=1`` to force the fallback.  ``BACKEND`` names the
kernel in use.

``cubic_roots_symmetric`` is an independent closed-form solver for 3x3
matrices, kept as a cross-check for the iterative kernel.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _jacobi_py

if os.environ.get("MMWAVE_PURE_PYTHON", "") not in ("", "0"):
    _kernel = _jacobi_py
    BACKEND = "python"
else:
    try:
        from . import _jacobi as _kernel

        BACKEND = "cython"
    except ImportError:  # extension not built
        _kernel = _jacobi_py
        BACKEND = "python"

MAX_SWEEPS = 50
OFF_TOL = 1e-14
SYM_TOL = 1e-12

__all__ = [
    "BACKEND",
    "Spectrum",
    "NotSymmetric",
    "NoConvergence",
    "jacobi_eig",
    "eigvalsh_batch",
    "cubic_roots_symmetric",
    "sorted_distance",
]


class NotSymmetric(ValueError):
    pass


class NoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual: float
    sweeps: int


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise NotSymmetric(f"expected square matrices, got shape {a.shape}")
    asym = np.sqrt(np.sum((a - np.swapaxes(a, -1, -2)) ** 2, axis=(-2, -1)))
    fro = np.sqrt(np.sum(a**2, axis=(-2, -1)))
    if np.any(asym > SYM_TOL * fro):
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative")


def _run(a: np.ndarray, want_vectors: bool):
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    sym = 0.5 * (a + np.swapaxes(a, -1, -2))
    w, v, sweeps = _kernel.jacobi_batch(np.ascontiguousarray(sym), want_vectors, MAX_SWEEPS, OFF_TOL)
    if np.any(sweeps < 0):
        raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    return w, v, sweeps


def jacobi_eig(A, vectors: bool = True) -> Spectrum:
    """Eigenvalues (ascending) and optionally eigenvectors of a real symmetric matrix.

    Raises
    ------
    NotSymmetric
        If ``A`` is not square or deviates from symmetry by more than 1e-12
        relative (Frobenius norm).
    NoConvergence
        If the off-diagonal mass has not dropped below 1e-14 ||A||_F after
        50 sweeps.
    """
    a = np.asarray(A, dtype=np.float64)
    _check_symmetric(a)
    w, v, sweeps = _run(a[None], vectors)
    w, sweeps = w[0], int(sweeps[0])
    if vectors:
        v = v[0]
        residual = float(np.max(np.linalg.norm(a @ v - v * w, axis=0))) if a.size else 0.0
        return Spectrum(w, v, residual, sweeps)
    return Spectrum(w, None, float("nan"), sweeps)


def eigvalsh_batch(A, check: bool = True) -> np.ndarray:
    """Ascending eigenvalues of a stack of symmetric matrices, shape (..., n, n) -> (..., n)."""
    a = np.asarray(A, dtype=np.float64)
    if check:
        _check_symmetric(a)
    shape = a.shape
    flat = a.reshape(-1, shape[-1], shape[-1])
    w, _, _ = _run(flat, False)
    return w.reshape(shape[:-1])


def cubic_roots_symmetric(A) -> np.ndarray:
    """Eigenvalues of a 3x3 symmetric matrix from the trigonometric cubic formula."""
    a = np.asarray(A, dtype=np.float64)
    if a.shape != (3, 3):
        raise NotSymmetric(f"expected a 3x3 matrix, got shape {a.shape}")
    _check_symmetric(a)
    a = 0.5 * (a + a.T)
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diag(a))
    q = np.trace(a) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = (
        b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
        - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
        + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0])
    ) / 2.0
    phi = math.acos(min(1.0, max(-1.0, r))) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    mid = 3.0 * q - hi - lo
    return np.sort(np.array([lo, mid, hi]))


def sorted_distance(a, b) -> float:
    """Max abs difference between two eigenvalue multisets (compared sorted)."""
    a = np.sort(np.ravel(a))
    b = np.sort(np.ravel(b))
    if a.shape != b.shape:
        raise ValueError("multisets differ in size")
    return float(np.max(np.abs(a - b))) if a.size else 0.0

"""Full 12x12 plane-wave system of the relaxed micromorphic model.

Unknowns are ordered ``(u1, u2, u3, P11, P12, P13, P21, P22, P23, P31, P32,
P33)``.  For direction ``xi`` and wavenumber ``k`` the equations of motion
reduce to ``omega**2 M x = K x`` with ``M = diag(rho I3, eta I9)`` and a
Hermitian stiffness ``K`` whose displacement/micro-distortion coupling is
``i k`` times a real matrix.  Multiplying the micro-distortion amplitudes by
``i`` makes ``K`` real symmetric; mass normalization then yields the
acoustic tensor whose eigenvalues are ``omega**2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import b1_stack, b2_stack, b4_stack
from .eig import eigvalsh_batch, sorted_distance
from .params import MaterialParams, check_density

UNIT_TOL = 1e-12


class NonUnitDirection(ValueError):
    pass


def _pidx(i: int, j: int) -> int:
    return 3 + 3 * i + j


def _check_unit(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise NonUnitDirection(f"direction must be a 3-vector, got shape {xi.shape}")
    if abs(np.linalg.norm(xi) - 1.0) > UNIT_TOL:
        raise NonUnitDirection(f"direction must have unit length, |xi| = {np.linalg.norm(xi)!r}")
    return xi


def _parts(p: MaterialParams, xi: np.ndarray, k: float):
    """Real pieces ``(K_uu, G, K_PP)`` with coupling ``K_uP = i k G``."""
    me, le, mm, lm, mc, Lc = p.mu_e, p.lambda_e, p.mu_micro, p.lambda_micro, p.mu_c, p.L_c
    d = np.eye(3)
    Kuu = k * k * ((me + mc) * d + (me - mc + le) * np.outer(xi, xi))
    G = np.zeros((3, 9))
    Kpp = np.zeros((9, 9))
    curv = me * Lc**2 * k * k
    for i in range(3):
        for j in range(3):
            c = 3 * i + j
            for a in range(3):
                G[a, c] = (me + mc) * d[a, i] * xi[j] + (me - mc) * d[a, j] * xi[i] + le * d[i, j] * xi[a]
            for m in range(3):
                for n in range(3):
                    Kpp[c, 3 * m + n] = (
                        curv * d[i, m] * (d[j, n] - xi[n] * xi[j])
                        + (me + mm) * (d[i, m] * d[j, n] + d[i, n] * d[j, m])
                        + mc * (d[i, m] * d[j, n] - d[i, n] * d[j, m])
                        + (le + lm) * d[i, j] * d[m, n]
                    )
    return Kuu, G, Kpp


def stiffness_complex(p: MaterialParams, xi, k: float) -> np.ndarray:
    """Hermitian stiffness ``K`` acting on ``(u, P)`` before the phase transform."""
    xi = _check_unit(xi)
    Kuu, G, Kpp = _parts(p, xi, float(k))
    K = np.zeros((12, 12), dtype=complex)
    K[:3, :3] = Kuu
    K[:3, 3:] = 1j * k * G
    K[3:, :3] = -1j * k * G.T
    K[3:, 3:] = Kpp
    return K


def system_matrix(p: MaterialParams, xi, omega: float, k: float) -> np.ndarray:
    """``A(xi, omega, k) = omega**2 M - K``; its null vectors are the wave amplitudes."""
    check_density(p.rho, p.eta)
    mass = np.diag([p.rho] * 3 + [p.eta] * 9)
    return omega**2 * mass - stiffness_complex(p, xi, k)


@dataclass(frozen=True)
class Acoustic12:
    xi: np.ndarray
    k: float
    K: np.ndarray
    B_tilde: np.ndarray

    ordering = ("u1", "u2", "u3", "P11", "P12", "P13", "P21", "P22", "P23", "P31", "P32", "P33")

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh_batch(self.B_tilde)


def _real_tensor(p: MaterialParams, xi: np.ndarray, k: float) -> np.ndarray:
    Kuu, G, Kpp = _parts(p, xi, k)
    Kr = np.empty((12, 12))
    Kr[:3, :3] = Kuu
    # P -> i P turns the i k coupling into the real -k G
    Kr[:3, 3:] = -k * G
    Kr[3:, :3] = -k * G.T
    Kr[3:, 3:] = Kpp
    s = np.array([p.rho] * 3 + [p.eta] * 9) ** -0.5
    return s[:, None] * Kr * s[None, :]


def assemble_12(p: MaterialParams, xi, k: float) -> Acoustic12:
    check_density(p.rho, p.eta)
    xi = _check_unit(xi)
    k = float(k)
    return Acoustic12(xi, k, stiffness_complex(p, xi, k), _real_tensor(p, xi, k))


def block_spectrum(p: MaterialParams, k: float) -> np.ndarray:
    """Multiset union of the B1, B2, B3 (= B2) and B4 spectra, sorted."""
    args = (p.mu_e, p.lambda_e, p.mu_micro, p.lambda_micro, p.mu_c, p.L_c, p.rho, p.eta, float(k))
    stack = np.stack([b1_stack(*args), b2_stack(*args), b2_stack(*args), b4_stack(*args)])
    return np.sort(eigvalsh_batch(stack).ravel())


def block_equivalence(p: MaterialParams, k: float) -> float:
    """Max deviation between the 12x12 spectrum along e1 and the block spectra."""
    a = assemble_12(p, (1.0, 0.0, 0.0), k)
    return sorted_distance(a.eigenvalues(), block_spectrum(p, k))


def random_directions(n: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def isotropy_check(p: MaterialParams, k: float, trials: int, seed=0) -> float:
    """Max sorted-eigenvalue distance between random directions and ``e1``."""
    if trials < 2:
        raise ValueError(f"isotropy_check needs at least 2 trials, got {trials}")
    check_density(p.rho, p.eta)
    ref = assemble_12(p, (1.0, 0.0, 0.0), k).eigenvalues()
    dirs = random_directions(trials, seed)
    # renormalize so the unit check holds to rounding
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    stack = np.stack([_real_tensor(p, d, float(k)) for d in dirs])
    w = eigvalsh_batch(stack)
    return float(np.max(np.abs(w - ref[None, :])))

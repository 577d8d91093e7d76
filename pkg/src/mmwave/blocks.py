"""Dispersion matrices of the relaxed micromorphic, Cosserat and Cauchy models.

For propagation along ``e1`` the relaxed model splits into a longitudinal
block (B1), two identical transverse blocks (B2 = B3) and a diagonal
uncoupled block (B4).  The Cosserat model splits into B6 (longitudinal) and
two copies of B7 (transverse).  Every ``B`` block is real symmetric and its
eigenvalues are the squared frequencies ``omega**2``.

The complex ``A`` matrices are the systems obtained directly from the
plane-wave ansatz; they are similar to ``B - omega**2 I`` through diagonal
phase/mass transforms and are kept for consistency checks only.

The ``*_stack`` helpers broadcast over numpy arrays of parameters and
wavenumbers and return arrays of shape ``(..., n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import CauchyParams, CosseratParams, MaterialParams, check_density, derive

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)
SQRT6 = np.sqrt(6.0)


class Model(str, Enum):
    RELAXED = "Relaxed"
    COSSERAT = "Cosserat"
    CAUCHY = "Cauchy"


class BlockId(str, Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"
    B6 = "B6"
    B7 = "B7"
    CAUCHY_D = "CauchyD"


_RELAXED_BLOCKS = {BlockId.B1, BlockId.B2, BlockId.B3, BlockId.B4}
_COSSERAT_BLOCKS = {BlockId.B6, BlockId.B7}


@dataclass(frozen=True)
class SpectralBlock:
    model: Model
    block_id: BlockId
    entries: np.ndarray
    k: float

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ComplexBlock:
    model: Model
    block_id: BlockId
    entries: np.ndarray
    omega: float
    k: float

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _sym3(d0, d1, d2, o01, o02, o12):
    shape = np.broadcast(d0, d1, d2, o01, o02, o12).shape
    out = np.empty(shape + (3, 3))
    out[..., 0, 0] = d0
    out[..., 1, 1] = d1
    out[..., 2, 2] = d2
    out[..., 0, 1] = out[..., 1, 0] = o01
    out[..., 0, 2] = out[..., 2, 0] = o02
    out[..., 1, 2] = out[..., 2, 1] = o12
    return out


def _sym2(d0, d1, o01):
    shape = np.broadcast(d0, d1, o01).shape
    out = np.empty(shape + (2, 2))
    out[..., 0, 0] = d0
    out[..., 1, 1] = d1
    out[..., 0, 1] = out[..., 1, 0] = o01
    return out


def b1_stack(mu_e, lambda_e, mu_micro, lambda_micro, mu_c, L_c, rho, eta, k):
    """Longitudinal block acting on (u1, P^D, P^S)."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    cm2 = mu_e * L_c**2 / eta
    cp2 = (2.0 * mu_e + lambda_e) / rho
    ws2 = 2.0 * (mu_e + mu_micro) / eta
    wp2 = ((2.0 * mu_e + 3.0 * lambda_e) + (2.0 * mu_micro + 3.0 * lambda_micro)) / eta
    sre = np.sqrt(rho * eta)
    return _sym3(
        cp2 * k2,
        k2 * cm2 / 3.0 + ws2,
        2.0 / 3.0 * k2 * cm2 + wp2,
        2.0 * SQRT6 / 3.0 * k * mu_e / sre,
        SQRT3 / 3.0 * k * (2.0 * mu_e + 3.0 * lambda_e) / sre,
        -SQRT2 / 3.0 * k2 * cm2,
    )


def b2_stack(mu_e, lambda_e, mu_micro, lambda_micro, mu_c, L_c, rho, eta, k):
    """Transverse block acting on (u_tau, P_(1 tau), P_[1 tau]); also B3."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    cm2 = mu_e * L_c**2 / eta
    cs2 = (mu_e + mu_c) / rho
    ws2 = 2.0 * (mu_e + mu_micro) / eta
    wr2 = 2.0 * mu_c / eta
    sre = np.sqrt(rho * eta)
    return _sym3(
        k2 * cs2,
        0.5 * cm2 * k2 + ws2,
        0.5 * cm2 * k2 + wr2,
        k * SQRT2 * mu_e / sre,
        -k * SQRT2 * mu_c / sre,
        0.5 * cm2 * k2,
    )


def b4_stack(mu_e, lambda_e, mu_micro, lambda_micro, mu_c, L_c, rho, eta, k):
    """Uncoupled block acting on (P_(23), P_[23], P^V)."""
    k = np.asarray(k, dtype=float)
    cm2k2 = mu_e * L_c**2 / eta * k * k
    ws2 = 2.0 * (mu_e + mu_micro) / eta
    wr2 = 2.0 * mu_c / eta
    z = np.zeros_like(cm2k2 + ws2 + wr2)
    return _sym3(cm2k2 + ws2, cm2k2 + wr2, cm2k2 + ws2, z, z, z)


def b6_stack(mu_macro, lambda_macro, mu_c, L_c, rho, eta, k):
    """Cosserat longitudinal block acting on (u1, a1)."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    # the rotational entry is divided by eta (not eta**2) so that it has units of omega**2
    return _sym2(
        k2 * (2.0 * mu_macro + lambda_macro) / rho,
        (2.0 * mu_macro * L_c**2 * k2 + 2.0 * mu_c) / eta,
        np.zeros_like(k2 * mu_c),
    )


def b7_stack(mu_macro, lambda_macro, mu_c, L_c, rho, eta, k):
    """Cosserat transverse block acting on (u2, -a3) or (u3, a2)."""
    k = np.asarray(k, dtype=float)
    k2 = k * k
    return _sym2(
        k2 * (mu_macro + mu_c) / rho,
        (k2 * mu_macro * L_c**2 + 4.0 * mu_c) / (2.0 * eta),
        SQRT2 * k * mu_c / np.sqrt(rho * eta),
    )


def cauchy_stack(mu_macro, lambda_macro, rho, k):
    """Cauchy acoustic matrix along e1, ``k**2/rho * diag(2mu+lambda, mu, mu)``."""
    k = np.asarray(k, dtype=float)
    k2 = k * k / rho
    z = np.zeros_like(k2 * mu_macro)
    return _sym3(k2 * (2.0 * mu_macro + lambda_macro), k2 * mu_macro, k2 * mu_macro, z, z, z)


RELAXED_STACKS = {
    BlockId.B1: b1_stack,
    BlockId.B2: b2_stack,
    BlockId.B3: b2_stack,
    BlockId.B4: b4_stack,
}
COSSERAT_STACKS = {BlockId.B6: b6_stack, BlockId.B7: b7_stack}


def _relaxed_args(p: MaterialParams):
    return (p.mu_e, p.lambda_e, p.mu_micro, p.lambda_micro, p.mu_c, p.L_c, p.rho, p.eta)


def _as_cosserat(p) -> CosseratParams:
    if isinstance(p, CosseratParams):
        return p
    if isinstance(p, MaterialParams):
        return p.cosserat()
    raise TypeError(f"Cosserat blocks need CosseratParams or MaterialParams, got {type(p).__name__}")


def _as_cauchy(p) -> CauchyParams:
    if isinstance(p, CauchyParams):
        return p
    if isinstance(p, CosseratParams):
        return CauchyParams(p.mu_macro, p.lambda_macro, p.rho)
    if isinstance(p, MaterialParams):
        return p.cauchy()
    raise TypeError(f"cannot reduce {type(p).__name__} to Cauchy parameters")


def _cosserat_args(c: CosseratParams):
    return (c.mu_macro, c.lambda_macro, c.mu_c, c.L_c, c.rho, c.eta)


def _check_dynamic(rho, eta=None):
    check_density(rho, eta)


def assemble_B(p, block_id, k: float) -> SpectralBlock:
    """Real symmetric block whose eigenvalues are omega**2 at wavenumber ``k``.

    ``p`` is a :class:`MaterialParams` for B1-B4; B6/B7 take
    :class:`CosseratParams` (a relaxed material is reduced through its macro
    moduli); ``CauchyD`` accepts any of the three parameter types.
    """
    bid = BlockId(block_id)
    k = float(k)
    if bid in _RELAXED_BLOCKS:
        if not isinstance(p, MaterialParams):
            raise TypeError(f"{bid.value} needs MaterialParams, got {type(p).__name__}")
        _check_dynamic(p.rho, p.eta)
        return SpectralBlock(Model.RELAXED, bid, RELAXED_STACKS[bid](*_relaxed_args(p), k), k)
    if bid in _COSSERAT_BLOCKS:
        c = _as_cosserat(p)
        _check_dynamic(c.rho, c.eta)
        return SpectralBlock(Model.COSSERAT, bid, COSSERAT_STACKS[bid](*_cosserat_args(c), k), k)
    c = _as_cauchy(p)
    _check_dynamic(c.rho)
    return SpectralBlock(Model.CAUCHY, bid, cauchy_stack(c.mu_macro, c.lambda_macro, c.rho, k), k)


def assemble_A(p, block_id, omega: float, k: float) -> ComplexBlock:
    """Complex plane-wave system matrix ``A(omega, k)`` before symmetrization.

    ``CauchyD`` returns the Cauchy system ``A5``; B6/B7 return ``A6``/``A7``.
    """
    bid = BlockId(block_id)
    w2 = float(omega) ** 2
    k = float(k)
    I = 1j
    if bid in _RELAXED_BLOCKS:
        if not isinstance(p, MaterialParams):
            raise TypeError(f"{bid.value} needs MaterialParams, got {type(p).__name__}")
        d = derive(p)
        me, le, rho, eta = p.mu_e, p.lambda_e, p.rho, p.eta
        k2 = k * k
        if bid is BlockId.B1:
            A = np.array(
                [
                    [-w2 + d.c_p2 * k2, I * k * 2 * me / rho, I * k * (2 * me + 3 * le) / rho],
                    [-I * k * 4.0 / 3.0 * me / eta, -w2 + k2 * d.c_m2 / 3.0 + d.omega_s2, -2.0 / 3.0 * k2 * d.c_m2],
                    [-I * k * (2 * me + 3 * le) / (3.0 * eta), -k2 * d.c_m2 / 3.0, -w2 + 2.0 / 3.0 * k2 * d.c_m2 + d.omega_p2],
                ]
            )
        elif bid in (BlockId.B2, BlockId.B3):
            A = np.array(
                [
                    [-w2 + k2 * d.c_s2, I * k * 2 * me / rho, -I * k * eta / rho * d.omega_r2],
                    [-I * k * me / eta, -w2 + 0.5 * d.c_m2 * k2 + d.omega_s2, 0.5 * d.c_m2 * k2],
                    [0.5 * I * d.omega_r2 * k, 0.5 * d.c_m2 * k2, -w2 + 0.5 * d.c_m2 * k2 + d.omega_r2],
                ]
            )
        else:
            base = d.c_m2 * k2
            A = np.diag([-w2 + base + d.omega_s2, -w2 + base + d.omega_r2, -w2 + base + d.omega_s2]).astype(complex)
        return ComplexBlock(Model.RELAXED, bid, A, float(omega), k)
    if bid in _COSSERAT_BLOCKS:
        c = _as_cosserat(p)
        mu, lam, muc, Lc, rho, eta = _cosserat_args(c)
        k2 = k * k
        if bid is BlockId.B6:
            A = np.array(
                [
                    [k2 * (2 * mu + lam) / rho - w2, 0.0],
                    [0.0, (2 * mu * Lc**2 * k2 + 2 * muc) / eta - w2],
                ],
                dtype=complex,
            )
        else:
            A = np.array(
                [
                    [k2 * (mu + muc) / rho - w2, -2 * I * k * muc / rho],
                    [I * k * muc / eta, (k2 * mu * Lc**2 + 4 * muc) / (2 * eta) - w2],
                ]
            )
        return ComplexBlock(Model.COSSERAT, bid, A, float(omega), k)
    c = _as_cauchy(p)
    A = cauchy_stack(c.mu_macro, c.lambda_macro, c.rho, k) - w2 * np.eye(3)
    return ComplexBlock(Model.CAUCHY, bid, A.astype(complex), float(omega), k)


def symmetrizer(p, block_id) -> np.ndarray:
    """Diagonal transform ``T`` with ``T A T^-1 = B - omega**2 I``."""
    bid = BlockId(block_id)
    if bid is BlockId.B1:
        return np.diag([np.sqrt(p.rho), 1j * np.sqrt(6 * p.eta) / 2, 1j * np.sqrt(3 * p.eta)])
    if bid in (BlockId.B2, BlockId.B3):
        s = 1j * np.sqrt(2 * p.eta)
        return np.diag([np.sqrt(p.rho), s, s])
    if bid is BlockId.B7:
        c = _as_cosserat(p)
        return np.diag([np.sqrt(c.rho), 1j * np.sqrt(2 * c.eta)])
    n = 2 if bid is BlockId.B6 else 3
    return np.eye(n, dtype=complex)


def sylvester_minors(block) -> np.ndarray:
    """Leading principal minors M1..Mn of a block (or plain matrix)."""
    m = np.asarray(block.entries if isinstance(block, SpectralBlock) else block, dtype=float)
    n = m.shape[0]
    out = np.empty(n)
    for j in range(1, n + 1):
        sub = m[:j, :j]
        if j == 1:
            out[0] = sub[0, 0]
        elif j == 2:
            out[1] = sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0]
        elif j == 3:
            out[2] = (
                sub[0, 0] * (sub[1, 1] * sub[2, 2] - sub[1, 2] * sub[2, 1])
                - sub[0, 1] * (sub[1, 0] * sub[2, 2] - sub[1, 2] * sub[2, 0])
                + sub[0, 2] * (sub[1, 0] * sub[2, 1] - sub[1, 1] * sub[2, 0])
            )
        else:
            out[j - 1] = np.linalg.det(sub)
    return out


def closed_form_minors(p, block_id, k: float, alternate: bool = False) -> np.ndarray:
    """Analytic leading minors of B1, B2 or B7.

    ``alternate=True`` evaluates the rewritten forms of the B1 minors in
    terms of macro and bulk moduli.
    """
    bid = BlockId(block_id)
    k2 = float(k) ** 2
    if bid is BlockId.B1:
        me, le, mm, lm, Lc, rho, eta = p.mu_e, p.lambda_e, p.mu_micro, p.lambda_micro, p.L_c, p.rho, p.eta
        ke, km = p.kappa_e, p.kappa_micro
        pe, pm = 2 * me + le, 2 * mm + lm
        m1 = k2 * pe / rho
        if not alternate:
            m2 = k2 / (3 * eta * rho) * (6 * pe * mm + 6 * me * ke + pe * me * Lc**2 * k2)
            m3 = k2 / (eta**2 * rho) * (6 * ke * km * (me + mm) + 8 * me * mm * (ke + km) + pe * pm * me * Lc**2 * k2)
        else:
            d = derive(p)
            pM = 2 * d.mu_macro + d.lambda_macro
            m2 = k2 / (3 * eta * rho) * (2 * (4 * d.mu_macro + 3 * ke) * (me + mm) + pe * me * Lc**2 * k2)
            m3 = k2 / (eta**2 * rho) * (6 * (ke + km) * (me + mm) * pM + pe * pm * me * Lc**2 * k2)
        return np.array([m1, m2, m3])
    if bid in (BlockId.B2, BlockId.B3):
        me, mm, mc, Lc, rho, eta = p.mu_e, p.mu_micro, p.mu_c, p.L_c, p.rho, p.eta
        m1 = k2 * (me + mc) / rho
        m2 = k2 / (2 * eta * rho) * (4 * (me * mc + mm * (me + mc)) + (me + mc) * me * Lc**2 * k2)
        m3 = k2 / (eta**2 * rho) * (4 * mm * mc * me + (me + mc) * mm * me * Lc**2 * k2)
        return np.array([m1, m2, m3])
    if bid is BlockId.B7:
        c = _as_cosserat(p)
        mu, mc, Lc, rho, eta = c.mu_macro, c.mu_c, c.L_c, c.rho, c.eta
        m1 = k2 * (mu + mc) / rho
        m2 = k2 / (2 * eta * rho) * (4 * mu * mc + k2 * mu * Lc**2 * (mu + mc))
        return np.array([m1, m2])
    raise ValueError(f"no closed-form minors for {bid.value}")


def cauchy_D(p, xi) -> SpectralBlock:
    """Cauchy matrix ``D(xi) = mu |xi|^2 I + (mu + lambda) xi xi^T``.

    ``xi`` is the propagation direction scaled by the wavenumber; the
    acoustic matrix for ``omega**2`` is ``D / rho``.
    """
    c = _as_cauchy(p)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise ValueError(f"xi must be a 3-vector, got shape {xi.shape}")
    D = c.mu_macro * (xi @ xi) * np.eye(3) + (c.mu_macro + c.lambda_macro) * np.outer(xi, xi)
    return SpectralBlock(Model.CAUCHY, BlockId.CAUCHY_D, D, float(np.linalg.norm(xi)))


def cauchy_elasticity_tensor(p) -> np.ndarray:
    """Isotropic fourth-order tensor ``C_ijkl`` with the macro Lamé pair."""
    c = _as_cauchy(p)
    d = np.eye(3)
    return (
        c.lambda_macro * np.einsum("ij,kl->ijkl", d, d)
        + c.mu_macro * (np.einsum("ik,jl->ijkl", d, d) + np.einsum("il,jk->ijkl", d, d))
    )


def cauchy_acoustic_tensor(p, xi) -> np.ndarray:
    """``B(xi)_ik = C_ijkl xi_j xi_l`` formed from the elasticity tensor."""
    xi = np.asarray(xi, dtype=float)
    return np.einsum("ijkl,j,l->ik", cauchy_elasticity_tensor(p), xi, xi)


def rank_one_energy(p, u, xi) -> float:
    """``2 mu |sym(u x xi)|^2 + lambda tr(u x xi)^2`` for the Cauchy model."""
    c = _as_cauchy(p)
    g = np.outer(np.asarray(u, dtype=float), np.asarray(xi, dtype=float))
    s = 0.5 * (g + g.T)
    return float(2 * c.mu_macro * np.sum(s * s) + c.lambda_macro * np.trace(g) ** 2)

"""Dispersion branches omega(k) for the relaxed micromorphic, Cosserat and Cauchy models.

Branches are obtained from the real symmetric blocks along ``e1``.  Within a
coupled block the branch values at each ``k`` are the sorted eigenvalues and
labels are fixed once at ``k = 0`` from the cutoff frequencies.  Diagonal
blocks (relaxed B4, Cosserat B6, Cauchy) keep their diagonal identity.

Squared frequencies in ``[-1e-12, 0]`` are clamped to zero; anything lower
is recorded as ``"imaginary"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import criteria
from .blocks import Model, b1_stack, b2_stack, b4_stack, b6_stack, b7_stack
from .eig import eigvalsh_batch
from .params import CauchyParams, CosseratParams, MaterialParams, check_density

CLAMP = 1e-12
IMAGINARY = "imaginary"
REAL = "real"
H_TANGENT = 1e-3


class InvalidGrid(ValueError):
    pass


class UndefinedTangent(ArithmeticError):
    pass


class OutOfRange(ValueError):
    pass


class Family(str, Enum):
    LONGITUDINAL = "Longitudinal"
    TRANSVERSE = "Transverse"
    UNCOUPLED = "Uncoupled"


class Label(str, Enum):
    LA = "LA"
    LO1 = "LO1"
    LO2 = "LO2"
    TA = "TA"
    TO1 = "TO1"
    TO2 = "TO2"
    TRO = "TRO"
    TSO = "TSO"
    TCVO = "TCVO"
    COSSERAT_ACOUSTIC_LONG = "CosseratAcousticLong"
    COSSERAT_OPTIC_LONG = "CosseratOpticLong"
    COSSERAT_ACOUSTIC_TRANS = "CosseratAcousticTrans"
    COSSERAT_OPTIC_TRANS = "CosseratOpticTrans"
    CAUCHY_P = "CauchyP"
    CAUCHY_S = "CauchyS"


ACOUSTIC = {
    Label.LA, Label.TA, Label.COSSERAT_ACOUSTIC_LONG, Label.COSSERAT_ACOUSTIC_TRANS,
    Label.CAUCHY_P, Label.CAUCHY_S,
}


@dataclass
class DispersionBranch:
    """One sampled curve ``omega(k)``.

    ``omega2`` keeps the raw squared frequencies; ``omega`` holds the clamped
    square roots with NaN where the sample is imaginary.  ``polarization``
    distinguishes the two identical relaxed transverse blocks (2 and 3).
    """

    model: Model
    family: Family
    label: Label
    k: np.ndarray
    omega2: np.ndarray
    polarization: int | None = None
    multiplicity: int = 1
    tangent_at_zero: float | None = None
    omega: np.ndarray = field(init=False, repr=False)
    status: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        self.omega2 = np.asarray(self.omega2, dtype=float)
        self.omega, self.status = to_omega(self.omega2)

    @property
    def name(self) -> str:
        """Label as written to CSV; doubled transverse blocks get a ``.2``/``.3`` suffix."""
        return self.label.value if self.polarization is None else f"{self.label.value}.{self.polarization}"

    @property
    def acoustic(self) -> bool:
        return self.label in ACOUSTIC

    @property
    def samples(self) -> list:
        return [
            (float(k), IMAGINARY if s == IMAGINARY else float(w))
            for k, w, s in zip(self.k, self.omega, self.status)
        ]

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.status == REAL))


def to_omega(omega2):
    """Clamp-and-root with the imaginary marker; returns (omega, status)."""
    w2 = np.asarray(omega2, dtype=float)
    real = w2 >= -CLAMP
    omega = np.where(real, np.sqrt(np.where(real, np.maximum(w2, 0.0), 0.0)), np.nan)
    status = np.where(real, REAL, IMAGINARY)
    return omega, status


def k_grid(k_max: float, n: int = 200) -> np.ndarray:
    """``0`` followed by log-spaced points up to 1 and linear points up to ``k_max``."""
    if not (isinstance(n, (int, np.integer)) and n >= 2):
        raise InvalidGrid(f"need at least 2 samples, got {n}")
    if not (math.isfinite(k_max) and k_max > 0):
        raise InvalidGrid(f"k_max must be positive and finite, got {k_max}")
    m = n - 1
    if m == 1:
        return np.array([0.0, float(k_max)])
    knee = min(1.0, float(k_max))
    if k_max <= 1.0:
        pos = np.logspace(math.log10(1e-3 * knee), math.log10(knee), m)
    else:
        n_log = m // 2
        n_lin = m - n_log
        pos = np.concatenate([
            np.logspace(-3.0, 0.0, n_log, endpoint=False) if n_log else np.empty(0),
            np.linspace(1.0, k_max, n_lin) if n_log else np.linspace(k_max / n_lin, k_max, n_lin),
        ])
    pos[-1] = k_max
    return np.concatenate([[0.0], pos])


def scale(L_c):
    """Wavenumber scale ``max(1, 1/L_c)`` so that ``k L_c`` spans the same range."""
    return np.maximum(1.0, 1.0 / np.asarray(L_c, dtype=float))


# ------------------------------------------------------------ model dispatch


def resolve_model(p, model=None) -> Model:
    if model is None:
        model = {MaterialParams: Model.RELAXED, CosseratParams: Model.COSSERAT, CauchyParams: Model.CAUCHY}[type(p)]
    if isinstance(model, str) and not isinstance(model, Model):
        model = model.capitalize()
    model = Model(model)
    ok = {
        Model.RELAXED: (MaterialParams,),
        Model.COSSERAT: (MaterialParams, CosseratParams),
        Model.CAUCHY: (MaterialParams, CosseratParams, CauchyParams),
    }[model]
    if not isinstance(p, ok):
        raise TypeError(f"{model.value} model cannot be evaluated from {type(p).__name__}")
    return model


def _cosserat(p) -> CosseratParams:
    return p if isinstance(p, CosseratParams) else p.cosserat()


def _cauchy(p) -> CauchyParams:
    if isinstance(p, CauchyParams):
        return p
    if isinstance(p, CosseratParams):
        return CauchyParams(p.mu_macro, p.lambda_macro, p.rho)
    return p.cauchy()


@dataclass(frozen=True)
class _Block:
    family: Family
    labels: tuple  # per branch, in output order
    omega2: np.ndarray  # (nk, nb)
    polarization: int | None = None
    multiplicity: int = 1


def _anchored(w0: np.ndarray, roles: tuple) -> tuple:
    """Labels for sorted positions from the k=0 diagonal; ties keep diagonal order."""
    order = sorted(range(len(w0)), key=lambda i: (w0[i], i))
    return tuple(roles[i] for i in order)


def _optic_roles(acoustic, optic_lo, optic_hi, w0):
    # the two optic cutoffs are numbered by size, ties by diagonal position
    roles = [acoustic, None, None]
    first, second = (1, 2) if (w0[1], 1) <= (w0[2], 2) else (2, 1)
    roles[first], roles[second] = optic_lo, optic_hi
    return tuple(roles)


def _blocks(p, model: Model, k: np.ndarray) -> list[_Block]:
    k = np.asarray(k, dtype=float)
    if model is Model.RELAXED:
        check_density(p.rho, p.eta)
        args = (p.mu_e, p.lambda_e, p.mu_micro, p.lambda_micro, p.mu_c, p.L_c, p.rho, p.eta)
        out = []
        B1 = b1_stack(*args, k)
        w0 = np.diag(b1_stack(*args, 0.0))
        out.append(_Block(Family.LONGITUDINAL, _anchored(w0, _optic_roles(Label.LA, Label.LO1, Label.LO2, w0)),
                          eigvalsh_batch(B1, check=False)))
        B2 = b2_stack(*args, k)
        w0 = np.diag(b2_stack(*args, 0.0))
        labels = _anchored(w0, _optic_roles(Label.TA, Label.TO1, Label.TO2, w0))
        w = eigvalsh_batch(B2, check=False)
        out.append(_Block(Family.TRANSVERSE, labels, w, polarization=2))
        out.append(_Block(Family.TRANSVERSE, labels, w.copy(), polarization=3))
        B4 = b4_stack(*args, k)
        out.append(_Block(Family.UNCOUPLED, (Label.TSO, Label.TRO, Label.TCVO), np.diagonal(B4, axis1=-2, axis2=-1).copy()))
        return out
    if model is Model.COSSERAT:
        c = _cosserat(p)
        check_density(c.rho, c.eta)
        args = (c.mu_macro, c.lambda_macro, c.mu_c, c.L_c, c.rho, c.eta)
        B6 = b6_stack(*args, k)
        B7 = b7_stack(*args, k)
        w0 = np.diag(b7_stack(*args, 0.0))
        labels = _anchored(w0, (Label.COSSERAT_ACOUSTIC_TRANS, Label.COSSERAT_OPTIC_TRANS))
        return [
            _Block(Family.LONGITUDINAL, (Label.COSSERAT_ACOUSTIC_LONG, Label.COSSERAT_OPTIC_LONG),
                   np.diagonal(B6, axis1=-2, axis2=-1).copy()),
            _Block(Family.TRANSVERSE, labels, eigvalsh_batch(B7, check=False), multiplicity=2),
        ]
    c = _cauchy(p)
    check_density(c.rho)
    k2 = k * k / c.rho
    return [
        _Block(Family.LONGITUDINAL, (Label.CAUCHY_P,), (k2 * (2 * c.mu_macro + c.lambda_macro))[:, None]),
        _Block(Family.TRANSVERSE, (Label.CAUCHY_S,), (k2 * c.mu_macro)[:, None], multiplicity=2),
    ]


def branch_omega2(p, model, label: Label, k) -> np.ndarray:
    """Squared frequency of one labelled branch on an arbitrary wavenumber array."""
    model = resolve_model(p, model)
    label = Label(label)
    k = np.atleast_1d(np.asarray(k, dtype=float))
    for b in _blocks(p, model, k):
        if label in b.labels:
            return b.omega2[:, b.labels.index(label)]
    raise KeyError(f"{label.value} is not a {model.value} branch")


# ------------------------------------------------------------------ tangents


def tangents_at_zero(p, model=None) -> tuple[float, float]:
    """Slopes ``(c_l, c_t)`` of the acoustic branches at ``k = 0``.

    Forward quotients ``omega(h)/h`` at ``h`` and ``h/2`` are combined by one
    Richardson step, with ``h = 1e-3 max(1, 1/L_c)``.

    Raises
    ------
    UndefinedTangent
        If an acoustic branch is imaginary at either step.
    """
    model = resolve_model(p, model)
    if model is Model.RELAXED:
        Lc = p.L_c
        names = (Label.LA, Label.TA)
    elif model is Model.COSSERAT:
        Lc = _cosserat(p).L_c
        names = (Label.COSSERAT_ACOUSTIC_LONG, Label.COSSERAT_ACOUSTIC_TRANS)
    else:
        Lc = 1.0
        names = (Label.CAUCHY_P, Label.CAUCHY_S)
    h = H_TANGENT * float(scale(Lc))
    steps = np.array([h, 0.5 * h])
    out = []
    for name in names:
        w, status = to_omega(branch_omega2(p, model, name, steps))
        if np.any(status == IMAGINARY):
            raise UndefinedTangent(f"{name.value} is imaginary near k = 0")
        d_h, d_h2 = w / steps
        out.append(float((4.0 * d_h2 - d_h) / 3.0))
    return out[0], out[1]


def closed_form_tangents(p, model=None) -> tuple[float | None, float | None]:
    """``sqrt((2mu_macro + lambda_macro)/rho)`` and ``sqrt(mu_macro/rho)``, None if imaginary."""
    model = resolve_model(p, model)
    c = _cauchy(p)
    pl = (2 * c.mu_macro + c.lambda_macro) / c.rho
    pt = c.mu_macro / c.rho
    return (math.sqrt(pl) if pl >= 0 else None, math.sqrt(pt) if pt >= 0 else None)


def macro_limit(p: MaterialParams, factor: float = 1e6):
    """Relaxed acoustic tangents with stiffened micro moduli, and their Cauchy limit.

    Scaling ``mu_micro`` and ``kappa_micro`` by ``factor`` drives the macro
    pair towards ``(mu_e, lambda_e)``; the second tuple holds the Cauchy
    tangents of that limiting pair.
    """
    stiff = p.scaled_micro(factor)
    limit = CauchyParams(p.mu_e, p.lambda_e, p.rho)
    return tangents_at_zero(stiff, Model.RELAXED), tangents_at_zero(limit, Model.CAUCHY)


def group_velocity(branch: DispersionBranch, k: float) -> float:
    """``d omega / d k`` from the branch samples by central differences.

    At a sample point the neighbours on either side are used; between
    samples the bracketing chord is returned.  At ``k = 0`` acoustic branches
    are continued as odd functions and optic branches as even ones.

    Raises
    ------
    OutOfRange
        If ``k`` lies outside the sampled range or the stencil touches an
        imaginary sample.
    """
    ks, w = branch.k, branch.omega
    k = float(k)
    if not (ks[0] <= k <= ks[-1]) or ks.size < 2:
        raise OutOfRange(f"k = {k} outside sampled range [{ks[0]}, {ks[-1]}]")
    i = int(np.searchsorted(ks, k))
    exact = i < ks.size and ks[i] == k
    if exact and i == 0 and ks[0] == 0.0:
        lo_k, hi_k = -ks[1], ks[1]
        hi_w = w[1]
        lo_w = -hi_w if branch.acoustic else hi_w
    elif exact and 0 < i < ks.size - 1:
        lo_k, hi_k, lo_w, hi_w = ks[i - 1], ks[i + 1], w[i - 1], w[i + 1]
    elif exact:
        j = i if i == 0 else i - 1
        lo_k, hi_k, lo_w, hi_w = ks[j], ks[j + 1], w[j], w[j + 1]
    else:
        lo_k, hi_k, lo_w, hi_w = ks[i - 1], ks[i], w[i - 1], w[i]
    if not (np.isfinite(lo_w) and np.isfinite(hi_w)):
        raise OutOfRange(f"imaginary sample in the stencil around k = {k}")
    return float((hi_w - lo_w) / (hi_k - lo_k))


# -------------------------------------------------------------------- sweeps


def sweep(p, model=None, k_max: float = 10.0, n: int = 200, k=None) -> list[DispersionBranch]:
    """Sample every branch of ``model`` on the default grid (or on ``k``).

    The relaxed model yields 12 branches: three longitudinal, three per
    transverse polarization and three uncoupled.  Cosserat yields four and
    Cauchy two; their transverse branches carry ``multiplicity = 2``.
    """
    model = resolve_model(p, model)
    grid = k_grid(k_max, n) if k is None else np.asarray(k, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise InvalidGrid("k grid must be 1-D, non-negative and strictly increasing")
    try:
        tangents = tangents_at_zero(p, model)
    except UndefinedTangent:
        tangents = (None, None)
    out = []
    for b in _blocks(p, model, grid):
        for j, label in enumerate(b.labels):
            t = None
            if label in ACOUSTIC:
                t = tangents[0] if b.family is Family.LONGITUDINAL else tangents[1]
            out.append(DispersionBranch(model, b.family, label, grid, b.omega2[:, j], b.polarization, b.multiplicity, t))
    return out


# -------------------------------------------------------- Cosserat closed form


@dataclass(frozen=True)
class CosseratBranches:
    """Closed-form Cosserat branch values at one wavenumber.

    ``*_2`` fields are squared frequencies; the plain fields are their roots
    or ``None`` when imaginary.  ``complex_pair`` flags a negative inner
    radicand.
    """

    acoustic_long_2: float
    optic_long_2: float
    acoustic_trans_2: float
    optic_trans_2: float
    complex_pair: bool

    @staticmethod
    def _root(x):
        return math.sqrt(max(x, 0.0)) if x >= -CLAMP else None

    @property
    def acoustic_long(self):
        return self._root(self.acoustic_long_2)

    @property
    def optic_long(self):
        return self._root(self.optic_long_2)

    @property
    def acoustic_trans(self):
        return None if self.complex_pair else self._root(self.acoustic_trans_2)

    @property
    def optic_trans(self):
        return None if self.complex_pair else self._root(self.optic_trans_2)


def cosserat_closed_form(p, k: float) -> CosseratBranches:
    """Explicit Cosserat branches.

    With ``a(k) = (4 mu_c + mu L_c^2 k^2)/eta + 2 (mu + mu_c) k^2 / rho`` and
    ``b^2 = 8 mu (4 mu_c + k^2 L_c^2 (mu + mu_c)) / (rho eta)`` the
    transverse pair is ``omega^2 = (a -+ sqrt(a^2 - b^2 k^2)) / 4``.  Whichever
    root would cancel (the lower one for ``a >= 0``, the upper one otherwise)
    is evaluated as ``b^2 k^2 / (4 (a +- sqrt(...)))``.
    """
    c = _cosserat(p)
    check_density(c.rho, c.eta)
    mu, lam, mc, Lc, rho, eta = c.mu_macro, c.lambda_macro, c.mu_c, c.L_c, c.rho, c.eta
    k = float(k)
    k2 = k * k
    a = (4 * mc + mu * Lc**2 * k2) / eta + 2 * (mu + mc) * k2 / rho
    b2 = 8 * mu * (4 * mc + k2 * Lc**2 * (mu + mc)) / (rho * eta)
    inner = a * a - b2 * k2
    along = k2 * (2 * mu + lam) / rho
    olong = (2 * mu * Lc**2 * k2 + 2 * mc) / eta
    if inner < 0:
        return CosseratBranches(along, olong, math.nan, math.nan, True)
    s = math.sqrt(inner)
    # the root that would cancel comes from the product b^2 k^2 / 16
    if a >= 0:
        hi = (a + s) / 4
        lo = b2 * k2 / (4 * (a + s)) if a + s > 0 else 0.0
    else:
        lo = (a - s) / 4
        hi = b2 * k2 / (4 * (a - s))
    return CosseratBranches(along, olong, lo, hi, False)


# ------------------------------------------------------ vectorized real check

SCAN_GRID = np.concatenate([[0.0], np.logspace(-4.0, 3.0, 400)])


def min_omega2(values: dict, k) -> np.ndarray:
    """Smallest eigenvalue over B1, B2 and B4 for parameter arrays of shape (N,).

    ``k`` has shape (nk,) or (N, nk); returns (N, nk).
    """
    args = tuple(np.asarray(values[f], dtype=float)[:, None] for f in MaterialParams.field_names())
    k = np.asarray(k, dtype=float)
    if k.ndim == 1:
        k = np.broadcast_to(k, (args[0].shape[0], k.size))
    m = np.full(k.shape, np.inf)
    for stack in (b1_stack, b2_stack, b4_stack):
        w = eigvalsh_batch(stack(*args, k), check=False)
        m = np.minimum(m, w[..., 0])
    return m


def scan_grid(L_c) -> np.ndarray:
    """Per-sample grid ``{0} U logspace(-4, 3, 400)`` times ``max(1, 1/L_c)``; shape (N, 401)."""
    return scale(np.atleast_1d(L_c))[:, None] * SCAN_GRID[None, :]


def spectrally_real(values: dict, k=None) -> np.ndarray:
    """True where no sampled squared frequency falls below ``-1e-12``."""
    k = scan_grid(values["L_c"]) if k is None else k
    return np.all(min_omega2(values, k) >= -CLAMP, axis=1)


@dataclass
class Agreement:
    trials: int
    agree: int
    false_pass: int  # criterion passes, spectrum has imaginary samples
    false_fail: int  # criterion fails, spectrum real on the grid

    @property
    def rate(self) -> float:
        return self.agree / self.trials


def _agreement_chunk(j, start, stop, seed):
    v = criteria.sample_relaxed(criteria._chunk_rng(seed, j, 0), stop - start)
    crit = criteria.evaluate(criteria.CS.PROPOSITION_REAL_WAVES, v)[1]
    spec = spectrally_real(v)
    return (
        int(np.count_nonzero(crit == spec)),
        int(np.count_nonzero(crit & ~spec)),
        int(np.count_nonzero(~crit & spec)),
    )


def spectral_agreement(trials: int, seed: int = 0, threads: int | None = None) -> Agreement:
    """Compare the real-wave criterion with brute-force spectra on random relaxed samples.

    Uses the same sample stream as :func:`criteria.implication_matrix`.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    parts = criteria.map_chunks(_agreement_chunk, trials, seed, threads)
    a, fp, ff = (sum(x) for x in zip(*parts))
    return Agreement(trials, a, fp, ff)

"""Material constants of the relaxed micromorphic, Cosserat and Cauchy models.

The relaxed model carries eight constants.  Its long-wave (``L_c -> 0``)
limit is a classical Cauchy medium whose Lamé pair follows from harmonic
means of the elastic and micro moduli; the Cosserat model shares that macro
pair and adds the couple modulus, a length scale and rotational inertia.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

__all__ = [
    "MaterialParams",
    "CosseratParams",
    "CauchyParams",
    "DerivedModuli",
    "ParamsError",
    "ZeroDenominator",
    "NonPositiveDensity",
    "PreconditionViolated",
    "bulk_modulus",
    "lame_from_bulk",
    "harmonic_mean",
    "derive",
    "invert_micro",
    "appendix_inequalities",
    "InequalityReport",
    "check_density",
]


class ParamsError(ValueError):
    """Base class for invalid parameter input."""


class ZeroDenominator(ParamsError):
    pass


class NonPositiveDensity(ParamsError):
    pass


class PreconditionViolated(ParamsError):
    pass


@dataclass(frozen=True)
class MaterialParams:
    """The eight constants of the isotropic relaxed micromorphic model (SI units)."""

    mu_e: float
    lambda_e: float
    mu_micro: float
    lambda_micro: float
    mu_c: float
    L_c: float
    rho: float
    eta: float

    @property
    def kappa_e(self) -> float:
        return bulk_modulus(self.mu_e, self.lambda_e)

    @property
    def kappa_micro(self) -> float:
        return bulk_modulus(self.mu_micro, self.lambda_micro)

    def cosserat(self) -> "CosseratParams":
        """Cosserat medium sharing this material's macro moduli."""
        d = derive(self)
        return CosseratParams(d.mu_macro, d.lambda_macro, self.mu_c, self.L_c, self.rho, self.eta)

    def cauchy(self) -> "CauchyParams":
        d = derive(self)
        return CauchyParams(d.mu_macro, d.lambda_macro, self.rho)

    def scaled_micro(self, factor: float) -> "MaterialParams":
        """Copy with ``mu_micro`` and ``kappa_micro`` multiplied by ``factor``."""
        kappa = self.kappa_micro * factor
        mu = self.mu_micro * factor
        return MaterialParams(
            self.mu_e, self.lambda_e, mu, lame_from_bulk(kappa, mu),
            self.mu_c, self.L_c, self.rho, self.eta,
        )

    @classmethod
    def from_bulk(cls, mu_e, kappa_e, mu_micro, kappa_micro, mu_c, L_c, rho, eta):
        return cls(
            mu_e, lame_from_bulk(kappa_e, mu_e), mu_micro,
            lame_from_bulk(kappa_micro, mu_micro), mu_c, L_c, rho, eta,
        )

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class CosseratParams:
    """Isotropic micropolar medium with uni-constant curvature."""

    mu_macro: float
    lambda_macro: float
    mu_c: float
    L_c: float
    rho: float
    eta: float

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass(frozen=True)
class CauchyParams:
    """Classical isotropic linear elastic medium."""

    mu_macro: float
    lambda_macro: float
    rho: float

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def bulk_modulus(mu: float, lam: float) -> float:
    return (2.0 * mu + 3.0 * lam) / 3.0


def lame_from_bulk(kappa: float, mu: float) -> float:
    return kappa - 2.0 * mu / 3.0


def harmonic_mean(a: float, b: float) -> float:
    """``a*b/(a+b)``: the series combination used for the macro moduli."""
    s = a + b
    if s == 0.0:
        raise ZeroDenominator(f"harmonic mean undefined: {a} + {b} == 0")
    return a * b / s


def _root(radicand: float) -> float | None:
    # negative radicand -> undefined rather than complex
    return math.sqrt(radicand) if radicand >= 0.0 else None


@dataclass(frozen=True)
class DerivedModuli:
    """Bulk moduli, macro Lamé pair, and characteristic speeds/frequencies.

    Speeds and frequencies are ``None`` when their radicand is negative.  The
    squared quantities (``c_m2``, ``omega_s2``...) are always defined and are
    what the spectral code uses.
    """

    kappa_e: float
    kappa_micro: float
    kappa_macro: float
    mu_macro: float
    c_m2: float
    c_s2: float
    c_p2: float
    omega_s2: float
    omega_p2: float
    omega_r2: float
    omega_l2: float
    omega_t2: float

    @property
    def lambda_macro(self) -> float:
        return lame_from_bulk(self.kappa_macro, self.mu_macro)

    @property
    def c_m(self):
        return _root(self.c_m2)

    @property
    def c_s(self):
        return _root(self.c_s2)

    @property
    def c_p(self):
        return _root(self.c_p2)

    @property
    def omega_s(self):
        return _root(self.omega_s2)

    @property
    def omega_p(self):
        return _root(self.omega_p2)

    @property
    def omega_r(self):
        return _root(self.omega_r2)

    @property
    def omega_l(self):
        return _root(self.omega_l2)

    @property
    def omega_t(self):
        return _root(self.omega_t2)

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["lambda_macro"] = self.lambda_macro
        for name in ("c_m", "c_s", "c_p", "omega_s", "omega_p", "omega_r", "omega_l", "omega_t"):
            out[name] = getattr(self, name)
        return out


def check_density(rho: float, eta: float | None = None) -> None:
    if not rho > 0.0:
        raise NonPositiveDensity(f"rho must be positive, got {rho}")
    if eta is not None and not eta > 0.0:
        raise NonPositiveDensity(f"eta must be positive, got {eta}")


def derive(p: MaterialParams) -> DerivedModuli:
    """Compute all derived moduli of a relaxed micromorphic material.

    Raises
    ------
    NonPositiveDensity
        If ``rho`` or ``eta`` is not strictly positive.
    ZeroDenominator
        If ``mu_e + mu_micro`` or ``kappa_e + kappa_micro`` vanishes.
    """
    check_density(p.rho, p.eta)
    kappa_e = p.kappa_e
    kappa_micro = p.kappa_micro
    mu_macro = harmonic_mean(p.mu_e, p.mu_micro)
    kappa_macro = harmonic_mean(kappa_e, kappa_micro)
    eta = p.eta
    return DerivedModuli(
        kappa_e=kappa_e,
        kappa_micro=kappa_micro,
        kappa_macro=kappa_macro,
        mu_macro=mu_macro,
        c_m2=p.mu_e * p.L_c**2 / eta,
        c_s2=(p.mu_e + p.mu_c) / p.rho,
        c_p2=(2.0 * p.mu_e + p.lambda_e) / p.rho,
        omega_s2=2.0 * (p.mu_e + p.mu_micro) / eta,
        omega_p2=((2.0 * p.mu_e + 3.0 * p.lambda_e) + (2.0 * p.mu_micro + 3.0 * p.lambda_micro)) / eta,
        omega_r2=2.0 * p.mu_c / eta,
        omega_l2=(2.0 * p.mu_micro + p.lambda_micro) / eta,
        omega_t2=p.mu_micro / eta,
    )


def invert_micro(
    mu_macro: float,
    kappa_macro: float,
    mu_known: float,
    kappa_known: float,
) -> tuple[float, float]:
    """Recover the missing (mu, kappa) pair from the macro pair and one known pair.

    The series formula is symmetric in its two arguments, so the same
    inversion returns ``(mu_e, kappa_e)`` when the micro pair is known and
    vice versa.
    """

    def _inv(known, macro, what):
        d = known - macro
        if d == 0.0:
            raise ZeroDenominator(f"{what}: known modulus equals macro modulus ({known})")
        return known * macro / d

    return _inv(mu_known, mu_macro, "mu"), _inv(kappa_known, kappa_macro, "kappa")


@dataclass(frozen=True)
class InequalityReport:
    """Slack ``lhs - rhs`` of each inequality ``lhs >= rhs``."""

    slacks: dict
    tolerance: float = 0.0

    @property
    def passed(self) -> bool:
        return all(s >= -self.tolerance for s in self.slacks.values())

    @property
    def violated(self) -> list[str]:
        return [k for k, s in self.slacks.items() if s < -self.tolerance]


def appendix_inequalities(p: MaterialParams, tolerance: float = 0.0) -> InequalityReport:
    """Evaluate the harmonic-mean ordering of macro vs. micro/elastic moduli.

    Requires only ``mu_e + mu_micro > 0`` and ``kappa_e + kappa_micro > 0``;
    individual moduli may be negative.
    """
    ke, km = p.kappa_e, p.kappa_micro
    if not (p.mu_e + p.mu_micro > 0.0 and ke + km > 0.0):
        raise PreconditionViolated(
            "requires mu_e + mu_micro > 0 and kappa_e + kappa_micro > 0, got "
            f"{p.mu_e + p.mu_micro} and {ke + km}"
        )
    mu_M = harmonic_mean(p.mu_e, p.mu_micro)
    k_M = harmonic_mean(ke, km)
    lam_M = lame_from_bulk(k_M, mu_M)
    p_wave_e = 2.0 * p.mu_e + p.lambda_e
    p_wave_micro = 2.0 * p.mu_micro + p.lambda_micro
    p_wave_M = 2.0 * mu_M + lam_M
    slacks = {
        "kappa_e >= kappa_macro": ke - k_M,
        "kappa_micro >= kappa_macro": km - k_M,
        "mu_e >= mu_macro": p.mu_e - mu_M,
        "mu_micro >= mu_macro": p.mu_micro - mu_M,
        "2mu_e+lambda_e >= 2mu_macro+lambda_macro": p_wave_e - p_wave_M,
        "2mu_micro+lambda_micro >= 2mu_macro+lambda_macro": p_wave_micro - p_wave_M,
        "3(2mu_e+lambda_e) >= 4mu_macro+3kappa_e": 3.0 * p_wave_e - (4.0 * mu_M + 3.0 * ke),
        "4mu_macro+3kappa_e >= 3(2mu_macro+lambda_macro)": (4.0 * mu_M + 3.0 * ke) - 3.0 * p_wave_M,
    }
    return InequalityReport(slacks, tolerance)

"""Named inequality sets on material constants and randomized implication scans.

Each condition set is an ordered list of inequalities ``value > 0`` (strict)
or ``value >= 0``.  Values are computed from a mapping of parameter arrays,
so the same definitions serve single reports and vectorized scans.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .params import CauchyParams, CosseratParams, MaterialParams, ZeroDenominator


class ConditionSet(str, Enum):
    POSITIVE_DEFINITE_RELAXED = "PositiveDefiniteRelaxed"
    PROPOSITION_REAL_WAVES = "PropositionRealWaves"
    REDUCED_REAL_WAVES = "ReducedRealWaves"
    MACRO_LIMIT = "MacroLimit"
    CAUCHY_POSITIVE_DEFINITE = "CauchyPositiveDefinite"
    CAUCHY_STRONG_ELLIPTICITY = "CauchyStrongEllipticity"
    COSSERAT_POSITIVE_DEFINITE = "CosseratPositiveDefinite"
    COSSERAT_REAL_WAVES = "CosseratRealWaves"
    MICROPOLAR_STRONG_ELLIPTICITY = "MicropolarStrongEllipticity"


CS = ConditionSet

CLI_NAMES = {
    "positive-definite": CS.POSITIVE_DEFINITE_RELAXED,
    "proposition": CS.PROPOSITION_REAL_WAVES,
    "reduced": CS.REDUCED_REAL_WAVES,
    "macro-limit": CS.MACRO_LIMIT,
    "cauchy-positive-definite": CS.CAUCHY_POSITIVE_DEFINITE,
    "cauchy-ellipticity": CS.CAUCHY_STRONG_ELLIPTICITY,
    "cosserat-positive-definite": CS.COSSERAT_POSITIVE_DEFINITE,
    "cosserat-real-waves": CS.COSSERAT_REAL_WAVES,
    "micropolar-ellipticity": CS.MICROPOLAR_STRONG_ELLIPTICITY,
}
CLI_LABEL = {v: k for k, v in CLI_NAMES.items()}

RELAXED_SETS = (
    CS.POSITIVE_DEFINITE_RELAXED,
    CS.PROPOSITION_REAL_WAVES,
    CS.REDUCED_REAL_WAVES,
    CS.MACRO_LIMIT,
)
COSSERAT_SETS = (
    CS.COSSERAT_POSITIVE_DEFINITE,
    CS.COSSERAT_REAL_WAVES,
    CS.MICROPOLAR_STRONG_ELLIPTICITY,
)
CAUCHY_SETS = (CS.CAUCHY_POSITIVE_DEFINITE, CS.CAUCHY_STRONG_ELLIPTICITY)

# implications proven analytically; a scan must find no counterexample
PROVEN_IMPLICATIONS = (
    (CS.POSITIVE_DEFINITE_RELAXED, CS.PROPOSITION_REAL_WAVES),
    (CS.REDUCED_REAL_WAVES, CS.PROPOSITION_REAL_WAVES),
    (CS.PROPOSITION_REAL_WAVES, CS.REDUCED_REAL_WAVES),
    (CS.PROPOSITION_REAL_WAVES, CS.MACRO_LIMIT),
    (CS.COSSERAT_POSITIVE_DEFINITE, CS.COSSERAT_REAL_WAVES),
    (CS.COSSERAT_REAL_WAVES, CS.MICROPOLAR_STRONG_ELLIPTICITY),
    (CS.COSSERAT_REAL_WAVES, CS.CAUCHY_STRONG_ELLIPTICITY),
    (CS.CAUCHY_POSITIVE_DEFINITE, CS.CAUCHY_STRONG_ELLIPTICITY),
)
# implications known to fail; a scan should exhibit counterexamples
REFUTED_IMPLICATIONS = (
    (CS.MICROPOLAR_STRONG_ELLIPTICITY, CS.COSSERAT_REAL_WAVES),
    (CS.PROPOSITION_REAL_WAVES, CS.POSITIVE_DEFINITE_RELAXED),
)


@dataclass(frozen=True)
class Inequality:
    label: str
    strict: bool
    redundant: bool = False


# (label, strict, redundant); values come from _values()
_DEFS = {
    CS.POSITIVE_DEFINITE_RELAXED: (
        ("mu_e", True),
        ("mu_c", True),
        ("2mu_e+3lambda_e", True),
        ("mu_micro", True),
        ("2mu_micro+3lambda_micro", True),
        ("L_c", True),
    ),
    CS.PROPOSITION_REAL_WAVES: (
        ("mu_c", False),
        ("mu_e", True),
        ("2mu_e+lambda_e", True),
        ("mu_micro", True),
        ("2mu_micro+lambda_micro", True),
        ("mu_macro", True, True),
        ("2mu_macro+lambda_macro", True),
        ("kappa_e+kappa_micro", True),
        ("4mu_macro+3kappa_e", True),
    ),
    CS.REDUCED_REAL_WAVES: (
        ("mu_e", True),
        ("mu_micro", True),
        ("mu_c", False),
        ("kappa_e+kappa_micro", True),
        ("2mu_macro+lambda_macro", True),
    ),
    CS.MACRO_LIMIT: (
        ("mu_macro", True),
        ("mu_c", False),
        ("2mu_macro+lambda_macro", True),
    ),
    CS.CAUCHY_POSITIVE_DEFINITE: (
        ("mu_macro", True),
        ("2mu_macro+3lambda_macro", True),
    ),
    CS.CAUCHY_STRONG_ELLIPTICITY: (
        ("mu_macro", True),
        ("2mu_macro+lambda_macro", True),
    ),
    CS.COSSERAT_POSITIVE_DEFINITE: (
        ("2mu_macro+3lambda_macro", True),
        ("mu_macro", True),
        ("mu_c", True),
        ("L_c", True),
    ),
    CS.COSSERAT_REAL_WAVES: (
        ("2mu_macro+lambda_macro", True),
        ("mu_macro", True),
        ("mu_c", False),
    ),
    CS.MICROPOLAR_STRONG_ELLIPTICITY: (
        ("2mu_macro+lambda_macro", True),
        ("mu_macro+mu_c", True),
    ),
}

INEQUALITIES = {
    name: tuple(Inequality(d[0], d[1], d[2] if len(d) > 2 else False) for d in defs)
    for name, defs in _DEFS.items()
}


def _macro(v: dict) -> dict:
    if "mu_macro" in v:
        return v
    me, mm = v["mu_e"], v["mu_micro"]
    ke = (2 * me + 3 * v["lambda_e"]) / 3
    km = (2 * mm + 3 * v["lambda_micro"]) / 3
    with np.errstate(divide="ignore", invalid="ignore"):
        mu_M = me * mm / (me + mm)
        k_M = ke * km / (ke + km)
        lam_M = k_M - 2 * mu_M / 3
    return {**v, "mu_macro": mu_M, "lambda_macro": lam_M, "_kappa_e": ke, "_kappa_micro": km}


def _values(v: dict) -> dict:
    """All inequality left-hand sides that can be formed from ``v``."""
    out = {}
    if "mu_e" in v:
        me, le, mm, lm = v["mu_e"], v["lambda_e"], v["mu_micro"], v["lambda_micro"]
        ke = (2 * me + 3 * le) / 3
        km = (2 * mm + 3 * lm) / 3
        out.update(
            {
                "mu_e": me,
                "mu_micro": mm,
                "2mu_e+3lambda_e": 2 * me + 3 * le,
                "2mu_micro+3lambda_micro": 2 * mm + 3 * lm,
                "2mu_e+lambda_e": 2 * me + le,
                "2mu_micro+lambda_micro": 2 * mm + lm,
                "kappa_e+kappa_micro": ke + km,
            }
        )
    if "mu_c" in v:
        out["mu_c"] = v["mu_c"]
    if "L_c" in v:
        out["L_c"] = v["L_c"]
    m = _macro(v) if ("mu_e" in v or "mu_macro" in v) else None
    if m is not None:
        mu_M, lam_M = m["mu_macro"], m["lambda_macro"]
        out["mu_macro"] = mu_M
        out["2mu_macro+lambda_macro"] = 2 * mu_M + lam_M
        out["2mu_macro+3lambda_macro"] = 2 * mu_M + 3 * lam_M
        if "mu_c" in v:
            out["mu_macro+mu_c"] = mu_M + v["mu_c"]
        if "mu_e" in v:
            out["4mu_macro+3kappa_e"] = 4 * mu_M + 3 * m["_kappa_e"]
    return out


def param_arrays(p) -> dict:
    """Parameter mapping for any of the three parameter types."""
    return {name: np.float64(getattr(p, name)) for name in p.field_names()}


def applicable_sets(p) -> tuple[ConditionSet, ...]:
    if isinstance(p, MaterialParams):
        return RELAXED_SETS + COSSERAT_SETS + CAUCHY_SETS
    if isinstance(p, CosseratParams):
        return COSSERAT_SETS + CAUCHY_SETS
    if isinstance(p, CauchyParams):
        return CAUCHY_SETS
    raise TypeError(f"unsupported parameter type {type(p).__name__}")


def _holds(value, strict: bool, tol: float):
    return value > -tol if strict else value >= -tol


def evaluate(name, values: dict, tol: float = 0.0):
    """Vectorized evaluation: returns (inequality values (m, ...), passed (...))."""
    name = ConditionSet(name)
    vals = _values(values)
    rows = []
    ok = True
    for ineq in INEQUALITIES[name]:
        if ineq.label not in vals:
            raise KeyError(f"{name.value} needs '{ineq.label}', not derivable from the given parameters")
        x = np.asarray(vals[ineq.label], dtype=float)
        rows.append(x)
        if not ineq.redundant:
            # NaN (undefined macro modulus) fails every comparison
            ok = ok & _holds(x, ineq.strict, tol)
    return np.array(rows), np.asarray(ok)


@dataclass(frozen=True)
class ConditionReport:
    set: ConditionSet
    passed: bool
    inequalities: tuple = field(default=())  # (Inequality, value, holds)
    violated: tuple = field(default=())  # (label, value)

    def lines(self) -> list[str]:
        out = []
        for ineq, value, holds in self.inequalities:
            rel = ">" if ineq.strict else ">="
            tag = "ok" if holds else "FAIL"
            if ineq.redundant:
                tag += " (redundant)"
            out.append(f"  {ineq.label} {rel} 0: {value:.12g}  {tag}")
        return out


def check(p, name, tol: float = 0.0) -> ConditionReport:
    """Evaluate one condition set on a parameter object.

    Cosserat and Cauchy sets accept a relaxed material, reduced through its
    macro moduli.
    """
    name = ConditionSet(name)
    if name not in applicable_sets(p):
        raise TypeError(f"{name.value} does not apply to {type(p).__name__}")
    v = param_arrays(p)
    if isinstance(p, MaterialParams):
        needs_macro = any(
            "macro" in i.label for i in INEQUALITIES[name]
        )
        if needs_macro:
            if p.mu_e + p.mu_micro == 0.0 or p.kappa_e + p.kappa_micro == 0.0:
                raise ZeroDenominator("macro moduli undefined: a harmonic-mean denominator vanishes")
    rows, _ = evaluate(name, v, tol)
    items = []
    violated = []
    passed = True
    for ineq, value in zip(INEQUALITIES[name], rows):
        value = float(value)
        holds = bool(_holds(value, ineq.strict, tol))
        items.append((ineq, value, holds))
        if not holds and not ineq.redundant:
            violated.append((ineq.label, value))
            passed = False
    return ConditionReport(name, passed, tuple(items), tuple(violated))


# ---------------------------------------------------------------- sampling

MODULUS_RANGE = (-2.0, 4.0)
LC_MAX = 2.0
CHUNK = 2048


def thread_count() -> int:
    """Worker count from ``MMWAVE_THREADS`` (0 or unset = one per CPU)."""
    raw = os.environ.get("MMWAVE_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("MMWAVE_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def _chunk_rng(seed: int, chunk: int, stream: int) -> np.random.Generator:
    # one independent stream per (chunk, purpose) so results do not depend on partitioning
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def _uniform_moduli(rng, n):
    lo, hi = MODULUS_RANGE
    return rng.uniform(lo, hi, n)


def sample_relaxed(rng: np.random.Generator, n: int) -> dict:
    """``n`` relaxed parameter sets: moduli U[-2, 4], L_c U(0, 2], rho = eta = 1.

    Draws with a vanishing harmonic-mean denominator are redrawn.
    """
    out = {k: np.empty(n) for k in MaterialParams.field_names()}
    todo = np.arange(n)
    while todo.size:
        m = todo.size
        me, le, mm, lm, mc = (_uniform_moduli(rng, m) for _ in range(5))
        Lc = LC_MAX * (1.0 - rng.random(m))
        ke = (2 * me + 3 * le) / 3
        km = (2 * mm + 3 * lm) / 3
        good = (me + mm != 0.0) & (ke + km != 0.0)
        idx = todo[good]
        for key, val in zip(("mu_e", "lambda_e", "mu_micro", "lambda_micro", "mu_c", "L_c"), (me, le, mm, lm, mc, Lc)):
            out[key][idx] = val[good]
        todo = todo[~good]
    out["rho"][:] = 1.0
    out["eta"][:] = 1.0
    return out


def sample_cosserat(rng: np.random.Generator, n: int) -> dict:
    """``n`` Cosserat parameter sets with the same distribution conventions."""
    return {
        "mu_macro": _uniform_moduli(rng, n),
        "lambda_macro": _uniform_moduli(rng, n),
        "mu_c": _uniform_moduli(rng, n),
        "L_c": LC_MAX * (1.0 - rng.random(n)),
        "rho": np.ones(n),
        "eta": np.ones(n),
    }


def row(values: dict, i: int, cls=MaterialParams):
    return cls(**{k: float(values[k][i]) for k in cls.field_names()})


def chunk_bounds(trials: int, chunk: int = CHUNK):
    return [(j, j * chunk, min(trials, (j + 1) * chunk)) for j in range((trials + chunk - 1) // chunk)]


def map_chunks(fn, trials: int, seed: int, threads: int | None = None):
    """Apply ``fn(chunk_index, start, stop, seed)`` over fixed chunks, in order."""
    bounds = chunk_bounds(trials)
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(bounds) <= 1:
        return [fn(j, a, b, seed) for j, a, b in bounds]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda t: fn(t[0], t[1], t[2], seed), bounds))


@dataclass
class ImplicationMatrix:
    trials: int
    seed: int
    sets: tuple
    pass_counts: dict
    counterexamples: dict  # (A, B) -> count of samples with A true and B false

    def count(self, a, b) -> int:
        return self.counterexamples[(ConditionSet(a), ConditionSet(b))]

    def proven_ok(self) -> bool:
        return all(self.count(a, b) == 0 for a, b in PROVEN_IMPLICATIONS)


_FAMILIES = (
    (RELAXED_SETS, sample_relaxed, 0),
    (COSSERAT_SETS + CAUCHY_SETS, sample_cosserat, 1),
)


def _implication_chunk(j, start, stop, seed):
    n = stop - start
    passes = {}
    counts = {}
    for sets, sampler, stream in _FAMILIES:
        v = sampler(_chunk_rng(seed, j, stream), n)
        ok = {s: evaluate(s, v)[1] for s in sets}
        for s in sets:
            passes[s] = int(np.count_nonzero(ok[s]))
        for a in sets:
            for b in sets:
                if a is not b:
                    counts[(a, b)] = int(np.count_nonzero(ok[a] & ~ok[b]))
    return passes, counts


def implication_matrix(trials: int, seed: int = 0, threads: int | None = None) -> ImplicationMatrix:
    """Tally counterexamples to ``A => B`` over random parameter sets.

    Relaxed sets are compared on relaxed samples; Cosserat and Cauchy sets
    on Cosserat samples.  The seed alone fixes the sample stream.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    parts = map_chunks(_implication_chunk, trials, seed, threads)
    passes: dict = {}
    counts: dict = {}
    for ps, cs in parts:
        for key, val in ps.items():
            passes[key] = passes.get(key, 0) + val
        for key, val in cs.items():
            counts[key] = counts.get(key, 0) + val
    sets = RELAXED_SETS + COSSERAT_SETS + CAUCHY_SETS
    return ImplicationMatrix(trials, seed, sets, passes, counts)


# Proposition entries that can fail while every other entry holds; the
# remaining three follow from the reduced set and never fail alone.
ISOLABLE = ("mu_c", "mu_e", "mu_micro", "2mu_macro+lambda_macro", "kappa_e+kappa_micro")


def sample_single_violations(seed: int, n: int, margin: float = 0.1):
    """Relaxed samples that break exactly one Proposition inequality by ``>= margin``.

    The broken inequality cycles through :data:`ISOLABLE`.  Returns the
    parameter mapping and the label of the broken inequality per sample.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(3,)))
    ineqs = [i for i in INEQUALITIES[CS.PROPOSITION_REAL_WAVES] if not i.redundant]
    pools = {label: [] for label in ISOLABLE}
    quota = {label: len(range(j, n, len(ISOLABLE))) for j, label in enumerate(ISOLABLE)}
    while any(len(pools[l]) < quota[l] for l in ISOLABLE):
        v = sample_relaxed(rng, 8192)
        rows, _ = evaluate(CS.PROPOSITION_REAL_WAVES, v)
        rows = rows[[i for i, q in enumerate(INEQUALITIES[CS.PROPOSITION_REAL_WAVES]) if not q.redundant]]
        holds = np.array([_holds(r, q.strict, 0.0) for r, q in zip(rows, ineqs)])
        for j, q in enumerate(ineqs):
            if q.label not in pools or len(pools[q.label]) >= quota[q.label]:
                continue
            sel = np.flatnonzero(np.delete(holds, j, axis=0).all(axis=0) & (rows[j] <= -margin))
            sel = sel[: quota[q.label] - len(pools[q.label])]
            pools[q.label].extend({f: v[f][i] for f in v} for i in sel)
    labels = [ISOLABLE[i % len(ISOLABLE)] for i in range(n)]
    taken = {l: iter(pools[l]) for l in ISOLABLE}
    rows = [next(taken[l]) for l in labels]
    out = {f: np.array([r[f] for r in rows]) for f in MaterialParams.field_names()}
    return out, labels

"""Acceptance criteria 1 to 11, each reporting one PASS/FAIL line."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from mmwave import acoustic12, criteria, dispersion
from mmwave.blocks import assemble_B, closed_form_minors, sylvester_minors
from mmwave.criteria import CS
from mmwave.eig import cubic_roots_symmetric, eigvalsh_batch, jacobi_eig, sorted_distance
from mmwave.params import CosseratParams

from .conftest import positive_material

SEED = 20240611


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {n:>2} {title}: {'PASS' if ok else 'FAIL'}{' (' + detail + ')' if detail else ''}")
        assert ok, detail

    return emit


def _passing_relaxed(n, rng):
    parts, have = [], 0
    while have < n:
        v = criteria.sample_relaxed(rng, 4 * n)
        keep = criteria.evaluate(CS.PROPOSITION_REAL_WAVES, v)[1]
        parts.append({f: x[keep] for f, x in v.items()})
        have += int(keep.sum())
    return {f: np.concatenate([p[f] for p in parts])[:n] for f in parts[0]}


def test_criterion_01_sufficiency(report):
    v = _passing_relaxed(10_000, np.random.default_rng(SEED))
    s = dispersion.scale(v["L_c"])[:, None]
    k = s * dispersion.k_grid(10.0, 200)[None, :]
    w = dispersion.min_omega2(v, k)
    bad_clamp = int(np.count_nonzero(w < -dispersion.CLAMP))
    bad_pos = int(np.count_nonzero(w[k >= 1e-3 * s] <= 0.0))
    report(1, "sufficiency", bad_clamp == 0 and bad_pos == 0,
           f"{v['L_c'].size} sets; {bad_clamp} below -1e-12, {bad_pos} non-positive for k >= 1e-3 scale")


def test_criterion_02_necessity(report):
    v, labels = criteria.sample_single_violations(SEED, 1000)
    k = np.logspace(-4.0, 3.0, 400)
    w = dispersion.min_omega2(v, k)
    missed = int(np.count_nonzero(w.min(axis=1) >= -1e-9))
    report(2, "necessity", missed == 0 and len(labels) == 1000,
           f"{len(labels)} single violations over {sorted(set(labels))}; {missed} missed")


def test_criterion_03_block_equivalence(report):
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for p in positive_material(rng, 100):
        for k in np.linspace(0.0, 10.0, 10):
            worst = max(worst, acoustic12.block_equivalence(p, k))
    report(3, "block equivalence", worst <= 1e-8, f"max dev {worst:.2e} over 100 x 10")


def test_criterion_04_isotropy(report):
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for i, p in enumerate(positive_material(rng, 5)):
        for k in (0.5, 1.0, 3.0):
            worst = max(worst, acoustic12.isotropy_check(p, k, 100, seed=i))
    report(4, "isotropy", worst <= 1e-8, f"max dev {worst:.2e} over 100 directions")


def test_criterion_05_minor_formulas(report):
    rng = np.random.default_rng(SEED + 5)
    v = criteria.sample_relaxed(rng, 1000)
    ks = rng.uniform(0.0, 10.0, 1000)
    worst = 0.0
    for i in range(1000):
        p = criteria.row(v, i)
        for bid in ("B1", "B2", "B7"):
            num = np.asarray(sylvester_minors(assemble_B(p, bid, ks[i])))
            ref = np.asarray(closed_form_minors(p, bid, ks[i]))
            nz = ref != 0.0
            worst = max(worst, float(np.max(np.abs(num - ref)[nz] / np.abs(ref[nz]), initial=0.0)))
            assert np.all(num[~nz] == 0.0)
    report(5, "minor formulas", worst <= 1e-10, f"max relative dev {worst:.2e}")


def test_criterion_06_cosserat_closed_form(report):
    rng = np.random.default_rng(SEED + 6)
    v = criteria.sample_cosserat(rng, 200)
    worst, compared, slope_dev = 0.0, 0, 0.0
    grid = dispersion.k_grid(10.0, 50)
    for i in range(200):
        p = criteria.row(v, i, CosseratParams)
        for k in grid:
            c = dispersion.cosserat_closed_form(p, k)
            b6 = np.diag(assemble_B(p, "B6", k).entries)
            w7 = jacobi_eig(assemble_B(p, "B7", k).entries, False).eigenvalues
            pairs = [(c.acoustic_long_2, b6[0]), (c.optic_long_2, b6[1])]
            if not c.complex_pair:
                pairs += [(c.acoustic_trans_2, w7[0]), (c.optic_trans_2, w7[1])]
            for cf, num in pairs:
                if num > 0.0 and cf > 0.0:
                    compared += 1
                    a, b = math.sqrt(cf), math.sqrt(num)
                    worst = max(worst, abs(a - b) / b)
        pl = (2 * p.mu_macro + p.lambda_macro) / p.rho
        if pl > 0:
            along = np.array([dispersion.cosserat_closed_form(p, k).acoustic_long for k in grid[1:]])
            slope_dev = max(slope_dev, float(np.max(np.abs(along / grid[1:] - math.sqrt(pl)) / math.sqrt(pl))))
    ok = worst <= 1e-10 and slope_dev <= 1e-12
    report(6, "Cosserat closed form", ok, f"{compared} real values, max rel dev {worst:.2e}; slope dev {slope_dev:.2e}")


def test_criterion_07_counterexample(report):
    p = CosseratParams(1.0, 0.0, -0.5, 1.0, 1.0, 1.0)
    se = criteria.check(p, CS.MICROPOLAR_STRONG_ELLIPTICITY).passed
    b7 = assemble_B(p, "B7", 1.0).entries
    det = float(np.linalg.det(b7))
    neg = int(np.count_nonzero(jacobi_eig(b7, False).eigenvalues < 0))
    ok = se and abs(det + 0.75) <= 1e-12 and neg == 1
    report(7, "ellipticity counterexample", ok, f"ellipticity {se}, det {det:.15g}, {neg} negative eigenvalue(s)")


def test_criterion_08_tangents(report):
    rng = np.random.default_rng(SEED + 8)
    worst = 0.0
    for p in positive_material(rng, 100):
        assert criteria.check(p, CS.POSITIVE_DEFINITE_RELAXED).passed
        t = np.array(dispersion.tangents_at_zero(p))
        ref = np.array(dispersion.closed_form_tangents(p))
        worst = max(worst, float(np.max(np.abs(t - ref) / ref)))
    report(8, "acoustic tangents", worst <= 1e-4, f"max relative dev {worst:.2e}")


def test_criterion_09_macro_limit(report):
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for p in positive_material(rng, 20):
        relaxed, cauchy = dispersion.macro_limit(p, 1e6)
        worst = max(worst, float(np.max(np.abs(np.subtract(relaxed, cauchy)) / np.array(cauchy))))
    report(9, "macro limit", worst <= 1e-3, f"max relative dev {worst:.2e}")


def test_criterion_10_eigensolver_oracle(report):
    rng = np.random.default_rng(SEED + 10)
    a = rng.uniform(-10.0, 10.0, (10_000, 3, 3))
    a = np.triu(a) + np.swapaxes(np.triu(a, 1), 1, 2)
    w = eigvalsh_batch(a)
    oracle = max(sorted_distance(cubic_roots_symmetric(m), wi) for m, wi in zip(a, w))
    resid = 0.0
    for m in a[:2000]:
        s = jacobi_eig(m)
        r = np.linalg.norm(m - (s.eigenvectors * s.eigenvalues) @ s.eigenvectors.T) / np.linalg.norm(m)
        resid = max(resid, float(r))
    report(10, "eigensolver oracle", oracle <= 1e-8 and resid <= 1e-9,
           f"oracle dev {oracle:.2e}, relative residual {resid:.2e}")


def _verify(threads):
    env = {**os.environ, "MMWAVE_THREADS": str(threads)}
    r = subprocess.run(
        [sys.executable, "-m", "mmwave.cli", "verify", "--trials", "10000", "--seed", "42"],
        capture_output=True, env=env,
    )
    return r.returncode, r.stdout


def test_criterion_11_determinism(report):
    code1, out1 = _verify(1)
    code4, out4 = _verify(4)
    ok = out1 == out4 and code1 == code4 == 0
    report(11, "determinism", ok, f"exit codes {code1}/{code4}, {len(out1)} bytes, identical={out1 == out4}")

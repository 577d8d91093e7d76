import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mmwave import _jacobi_py, eig
from mmwave.blocks import assemble_B
from mmwave.eig import (
    NoConvergence,
    NotSymmetric,
    cubic_roots_symmetric,
    eigvalsh_batch,
    jacobi_eig,
    sorted_distance,
)

from .conftest import UNIT

entries = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


def sym(n):
    return arrays(np.float64, (n, n), elements=entries).map(lambda a: np.triu(a) + np.triu(a, 1).T)


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def test_identity():
    s = jacobi_eig(np.eye(3))
    assert list(s.eigenvalues) == [1.0, 1.0, 1.0]
    assert s.sweeps == 0


def test_diagonal_input_sorted():
    assert list(jacobi_eig(np.diag([5.0, 3.0, 5.0])).eigenvalues) == [3.0, 5.0, 5.0]


def test_product_of_b1_eigenvalues():
    w = jacobi_eig(assemble_B(UNIT, "B1", 1.0).entries).eigenvalues
    assert np.prod(w) == pytest.approx(69.0, rel=1e-9)


def test_cubic_oracle_simple_cases():
    assert list(cubic_roots_symmetric(np.diag([2.0, -1.0, 7.0]))) == [-1.0, 2.0, 7.0]
    assert list(cubic_roots_symmetric(np.zeros((3, 3)))) == [0.0, 0.0, 0.0]
    b2 = assemble_B(UNIT, "B2", 1.0).entries
    assert sorted_distance(cubic_roots_symmetric(b2), jacobi_eig(b2).eigenvalues) <= 1e-8


def test_not_symmetric():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NotSymmetric):
        jacobi_eig(a)
    with pytest.raises(NotSymmetric):
        jacobi_eig(np.ones((2, 3)))
    with pytest.raises(NotSymmetric):
        cubic_roots_symmetric(np.eye(2))


def test_tiny_asymmetry_accepted():
    a = np.array([[2.0, 1.0], [1.0 + 1e-15, 3.0]])
    assert jacobi_eig(a).eigenvalues.shape == (2,)


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        jacobi_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_sweep_budget_exhausted(monkeypatch):
    monkeypatch.setattr(eig, "MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        jacobi_eig(np.array([[1.0, 1.0], [1.0, 2.0]]))


def test_oracle_agreement_ten_thousand(rng):
    a = rng.uniform(-10.0, 10.0, (10_000, 3, 3))
    a = np.triu(a) + np.swapaxes(np.triu(a, 1), 1, 2)
    w = eigvalsh_batch(a)
    worst = max(sorted_distance(cubic_roots_symmetric(m), wi) for m, wi in zip(a, w))
    assert worst <= 1e-8


@settings(max_examples=200)
@given(st.integers(1, 12).flatmap(sym))
def test_reconstruction_and_orthonormality(a):
    s = jacobi_eig(a)
    scale = max(1.0, np.linalg.norm(a))
    assert np.all(np.diff(s.eigenvalues) >= 0)
    v = s.eigenvectors
    assert np.linalg.norm(a - (v * s.eigenvalues) @ v.T) <= 1e-9 * scale
    assert np.abs(v.T @ v - np.eye(len(a))).max() <= 1e-10
    assert s.residual <= 1e-9 * scale


@settings(max_examples=100)
@given(st.integers(2, 12).flatmap(sym), st.integers(0, 2**32 - 1))
def test_orthogonal_conjugation_invariance(a, seed):
    q = random_orthogonal(np.random.default_rng(seed), len(a))
    b = q @ a @ q.T
    b = 0.5 * (b + b.T)
    assert sorted_distance(jacobi_eig(a, False).eigenvalues, jacobi_eig(b, False).eigenvalues) <= 1e-9


@settings(max_examples=100)
@given(st.integers(1, 12).flatmap(sym), st.floats(-1.0, 1.0))
def test_shift_moves_every_eigenvalue(a, eps):
    w0 = jacobi_eig(a, False).eigenvalues
    w1 = jacobi_eig(a + eps * np.eye(len(a)), False).eigenvalues
    assert np.max(np.abs(w1 - w0 - eps)) <= 1e-12 * max(1.0, np.linalg.norm(a))


@settings(max_examples=50)
@given(st.integers(1, 12).flatmap(sym))
def test_fallback_matches_active_backend(a):
    w_py, _, s_py = _jacobi_py.jacobi_batch(a[None], False, eig.MAX_SWEEPS, eig.OFF_TOL)
    w, _, s = eig._kernel.jacobi_batch(np.ascontiguousarray(a[None]), False, eig.MAX_SWEEPS, eig.OFF_TOL)
    assert np.max(np.abs(w - w_py)) <= 1e-12 * max(1.0, np.linalg.norm(a))
    assert s[0] == s_py[0]


def test_batch_shape_preserved(rng):
    a = rng.standard_normal((4, 5, 3, 3))
    a = a + np.swapaxes(a, -1, -2)
    assert eigvalsh_batch(a).shape == (4, 5, 3)


def test_sorted_distance_size_mismatch():
    with pytest.raises(ValueError):
        sorted_distance([1.0], [1.0, 2.0])

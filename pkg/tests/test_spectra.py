"""Implicit-spectrum solver against dense-diagonalization and FD oracles.

Two independent routes must agree: lambda-root bracketing on the scalar
family, and singular-value dips of the assembled matrix I(E).  The Coulomb
catalog entry is certified against a finite-difference radial problem, the
oscillator against the truncated Fock Hamiltonian built from p and q.
"""

import numpy as np
import pytest

from oracles import fock_ops, hydrogen_fd_levels

from cohspace.errors import ConfigError, ModelDegeneracyError, TruncationError
from cohspace.spectra import (
    ImplicitSpectralModel,
    assemble_from_algebra,
    coulomb_model,
    free_dispersion,
    free_particle_model,
    oscillator_model,
    solve_implicit_spectrum,
)


def truncated_oscillator(cutoff: int, omega: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    a, ad, _ = fock_ops(cutoff)
    q = np.sqrt(hbar / (2 * omega)) * (a + ad)
    p = 1j * np.sqrt(hbar * omega / 2) * (ad - a)
    return (p @ p + omega**2 * (q @ q)) / 2


def test_integer_branch_roots():
    model = ImplicitSpectralModel(m=lambda e: 1.0, k=lambda e: e,
                                  xi=lambda n, e: float(n), indices=range(11))
    res = solve_implicit_spectrum(model, (-0.5, 10.5), tol=1e-12)
    assert [r[0] for r in res.discrete] == list(range(11))
    np.testing.assert_allclose([r[1] for r in res.discrete], np.arange(11.0), atol=1e-12)
    assert all(r[2] <= 1e-12 for r in res.discrete)
    assert res.search_interval == (-0.5, 10.5)


def test_oscillator_matches_dense_diagonalization():
    omega, hbar = 1.0, 1.0
    res = solve_implicit_spectrum(oscillator_model(omega, hbar, n_max=32), (0.0, 32.0), tol=1e-12)
    roots = np.array([r[1] for r in res.discrete])
    # oracle: eigenvalues of the cutoff-128 Fock Hamiltonian built from p, q;
    # the lower half is truncation-clean
    eigs = np.sort(np.linalg.eigvalsh(truncated_oscillator(128, omega, hbar)))
    np.testing.assert_allclose(roots, eigs[: len(roots)], atol=1e-10)
    np.testing.assert_allclose(roots, hbar * omega * (np.arange(32) + 0.5), atol=1e-12)


def test_coulomb_levels_match_fd_oracle():
    res = solve_implicit_spectrum(coulomb_model(1.0, 1.0, 1.0, 5), (-0.6, -0.015), tol=1e-12)
    roots = np.array([r[1] for r in res.discrete])
    assert len(roots) == 5
    np.testing.assert_allclose(roots, [-0.5 / n**2 for n in range(1, 6)], atol=1e-12)
    fd = hydrogen_fd_levels(1.0, 1.0, 1.0, 5)
    assert np.max(np.abs((roots - fd) / fd)) <= 1e-3
    # 1/n^2 scaling law
    ns = np.array([r[0] for r in res.discrete], dtype=float)
    np.testing.assert_allclose(roots * ns**2, roots[0], rtol=1e-10)


def test_continuous_free_particle_interval():
    res = solve_implicit_spectrum(free_particle_model(4.0, 1.0, 3.0), (0.0, 10.0), tol=1e-10)
    assert res.discrete == []
    assert len(res.continuous) == 1
    lo, hi = res.continuous[0]
    assert lo == pytest.approx(free_dispersion(0.0, 4.0, 1.0), abs=1e-9)
    assert hi == pytest.approx(free_dispersion(3.0, 4.0, 1.0), abs=1e-9)


def test_free_dispersion_values():
    assert free_dispersion(0.0, 2.0, 1.0) == pytest.approx(2.0)
    assert free_dispersion(7.0, 0.0, 1.0) == pytest.approx(7.0)
    assert free_dispersion(3.0, 4.0, 1.0) == pytest.approx(5.0)
    with pytest.raises(ConfigError):
        free_dispersion(1.0, 1.0, 0.0)
    with pytest.raises(ConfigError):
        free_dispersion(-1.0, 1.0, 1.0)


def test_model_degeneracy_detected():
    model = ImplicitSpectralModel(m=lambda e: e, k=lambda e: e,
                                  xi=lambda n, e: 1.0, indices=[0])
    with pytest.raises(ModelDegeneracyError):
        solve_implicit_spectrum(model, (-1.0, 1.0), tol=1e-10, grid=10_001)


def test_tangency_warning():
    model = ImplicitSpectralModel(m=lambda e: 1.0, k=lambda e: -((e - 3.0) ** 2),
                                  xi=lambda n, e: 0.0, indices=[0])
    res = solve_implicit_spectrum(model, (0.0, 6.0), tol=1e-10)
    assert res.discrete == []
    assert len(res.warnings) == 1
    assert "tangency" in res.warnings[0]
    assert "refine" in res.warnings[0]


def test_duplicate_roots_collapsed():
    model = ImplicitSpectralModel(m=lambda e: 1.0, k=lambda e: 0.0,
                                  xi=lambda n, e: (n + 1.0) * (1.0 - e), indices=[0, 1])
    res = solve_implicit_spectrum(model, (0.0, 2.0), tol=1e-12)
    assert len(res.discrete) == 1
    assert res.discrete[0][1] == pytest.approx(1.0, abs=1e-12)


def test_root_count_stable_under_grid_doubling():
    osc = oscillator_model(1.0, 1.0, n_max=16)
    a = solve_implicit_spectrum(osc, (0.0, 10.0), tol=1e-10)
    b = solve_implicit_spectrum(osc, (0.0, 10.0), tol=1e-10, grid=20_000)
    assert len(a.discrete) == len(b.discrete) == 10
    cou = coulomb_model(1.0, 1.0, 1.0, 5)
    a = solve_implicit_spectrum(cou, (-0.6, -0.015), tol=1e-10)
    b = solve_implicit_spectrum(cou, (-0.6, -0.015), tol=1e-10, grid=20_000)
    assert len(a.discrete) == len(b.discrete) == 5


def test_assemble_identity_pencil():
    res = assemble_from_algebra(None, [np.eye(3), np.diag([1.0, 2.0, 3.0])],
                                lambda e: [e, -1.0], (0.0, 4.0), tol=1e-8)
    np.testing.assert_allclose([r[1] for r in res.discrete], [1.0, 2.0, 3.0], atol=1e-10)
    assert all(r[2] <= 1e-8 for r in res.discrete)


def test_assemble_linear_pencil():
    m = np.diag([1.0, 2.0])
    n = np.diag([2.0, 2.0])
    res = assemble_from_algebra(None, [m, n], lambda e: [e, -1.0], (0.0, 3.0), tol=1e-8)
    np.testing.assert_allclose([r[1] for r in res.discrete], [1.0, 2.0], atol=1e-10)


def test_assemble_oscillator_lower_half_and_route_agreement():
    h = truncated_oscillator(64)
    sv = assemble_from_algebra(None, [np.eye(64), h], lambda e: [-e, 1.0],
                               (0.0, 32.0), tol=1e-8)
    roots_sv = np.array([r[1] for r in sv.discrete])
    assert len(roots_sv) == 32
    lam = solve_implicit_spectrum(oscillator_model(1.0, 1.0, n_max=32), (0.0, 32.0), tol=1e-12)
    roots_lam = np.array([r[1] for r in lam.discrete])
    # the two routes agree on the truncation-clean lower half
    assert np.max(np.abs(roots_sv - roots_lam) / np.abs(roots_lam)) <= 1e-8


def test_assemble_truncation_guard():
    with pytest.raises(TruncationError):
        assemble_from_algebra(None, [np.eye(3), np.diag([1.0, 2.0, 3.0])],
                              lambda e: [e, -1.0], (0.0, 4.0), tol=1e-8, tail_bound=1.0)


def test_bad_model_configs():
    with pytest.raises(ConfigError):
        ImplicitSpectralModel(m=lambda e: 1.0, k=lambda e: e)
    with pytest.raises(ConfigError):
        ImplicitSpectralModel(m=lambda e: 1.0, k=lambda e: e,
                              xi=lambda n, e: 1.0, indices=[0],
                              xi_min=lambda e: 0.0, xi_max=lambda e: 1.0)
    with pytest.raises(ConfigError):
        solve_implicit_spectrum(oscillator_model(), (1.0, 1.0))
    with pytest.raises(ConfigError):
        assemble_from_algebra(None, [np.eye(2)], lambda e: [1.0, 2.0], (0.0, 1.0))

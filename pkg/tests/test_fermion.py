import math

import numpy as np
import pytest
from scipy import integrate

from conftest import ring
from xyentangle import oracle
from xyentangle.fermion import (BETA_MAX, Sector, build_hopping, diagonalize, ground_state,
                                ground_state_energy, ground_state_g_matrix, sector_spectra,
                                thermal_g_matrix, thermal_g_row, uniform_g_matrix, uniform_g_row)
from xyentangle.model import Boundary
from xyentangle.randfield import draw, zero_field


def test_hopping_uniform_ring():
    a = build_hopping(ring(3), np.zeros(3), Sector.EVEN).matrix
    assert np.allclose(np.diag(a), 0.0)
    assert a[0, 1] == a[1, 2] == -0.5
    # even parity closes with the opposite sign of the bulk bond (checked against exact diagonalization)
    assert a[0, 2] == a[2, 0] == 0.5
    assert build_hopping(ring(3), np.zeros(3), Sector.ODD).matrix[0, 2] == -0.5
    assert np.array_equal(a, a.T)


def test_hopping_diagonal():
    a = build_hopping(ring(3, h=2.0), np.array([0.1, -0.2, 0.3])).matrix
    assert np.allclose(np.diag(a), [-2.1, -1.8, -2.3])


@pytest.mark.parametrize("n", [2, 3, 7])
def test_open_chain_has_no_corner(n):
    a = build_hopping(ring(n, boundary=Boundary.OPEN), np.zeros(n), None).matrix
    if n > 2:
        assert a[0, n - 1] == 0.0
    assert np.count_nonzero(a) == 2 * (n - 1)


def test_field_shape_mismatch():
    with pytest.raises(ValueError, match="shape"):
        build_hopping(ring(4), np.zeros(5))


def test_two_site_open_spectrum():
    spec = diagonalize(build_hopping(ring(2, boundary=Boundary.OPEN), np.zeros(2), None))
    assert np.allclose(spec.energies, [-0.5, 0.5], atol=1e-14)


def test_strong_field_fills_every_level():
    spec = diagonalize(build_hopping(ring(20, h=5.0), draw(np.random.default_rng(0), 1, 0.5, 20)))
    assert np.all(spec.energies < 0)


def test_eigen_residual_and_orthonormality(rng):
    n = 60
    hop = build_hopping(ring(n, h=0.4), draw(rng, 1.35, 1.0, n), Sector.ODD)
    spec = diagonalize(hop)
    v, e = spec.modes, spec.energies
    assert np.max(np.abs(hop.matrix @ v - v * e)) < 1e-10
    assert np.max(np.abs(v.T @ v - np.eye(n))) < 1e-10


@pytest.mark.parametrize("h, expected", [(10.0, 1.0), (-10.0, -1.0)])
def test_saturated_g(h, expected, rng):
    field = draw(rng, 1.0, 1.0, 12)
    g = ground_state_g_matrix(ring(12, h=h), field)
    assert np.allclose(g, expected * np.eye(12), atol=1e-12)


def test_finite_chain_diagonal_approaches_closed_form():
    g = ground_state_g_matrix(ring(500, h=0.5), zero_field(500))
    assert g[250, 250] == pytest.approx(-1 + 2 / math.pi * math.acos(-0.5), abs=1e-2)


@pytest.mark.parametrize("n, tol", [(500, 2e-2), pytest.param(2000, 1e-3, marks=pytest.mark.slow)])
@pytest.mark.parametrize("h", [0.0, 0.3, 0.7])
def test_zero_disorder_collapse(n, tol, h):
    g = ground_state_g_matrix(ring(n, h=h), zero_field(n))
    mid = n // 2
    window = g[mid:mid + 6, mid:mid + 6]
    assert np.max(np.abs(window - uniform_g_matrix(h, 1.0, 5))) < tol


def test_closed_form_examples():
    row = uniform_g_row(0.0, 1.0, 2)
    assert row[0] == pytest.approx(0.0, abs=1e-15)
    assert row[1] == pytest.approx(2 / math.pi)
    assert row[2] == pytest.approx(0.0, abs=1e-15)
    assert np.array_equal(uniform_g_matrix(2.0, 1.0, 4), np.eye(5))
    assert uniform_g_row(0.5, 1.0, 0)[0] == pytest.approx(1 / 3)


def test_closed_form_is_continuous_at_critical_field():
    below = uniform_g_row(1.0 - 1e-10, 1.0, 5)
    assert np.allclose(below, uniform_g_row(1.0, 1.0, 5), atol=1e-4)


def test_closed_form_matches_momentum_integral():
    # independent check: G(n) = (1/pi) int_0^pi cos(n k) sign(h + cos k) dk
    for h in (-0.6, 0.2, 0.9):
        for n in range(4):
            val = integrate.quad(lambda k: math.cos(n * k) * np.sign(h + math.cos(k)) / math.pi,
                                 0, math.pi, points=[math.acos(-h)])[0]
            assert uniform_g_row(h, 1.0, 3)[n] == pytest.approx(val, abs=1e-10)


def test_thermal_infinite_temperature():
    row = thermal_g_row(0.7, 1.0, 1e9, 4)
    assert np.allclose(row, 0.0, atol=1e-8)


def test_thermal_low_temperature_limit():
    g = thermal_g_matrix(0.5, 1.0, 1e-4, 5)
    assert np.max(np.abs(g - uniform_g_matrix(0.5, 1.0, 5))) < 1e-4


@pytest.mark.parametrize("h", [-0.5, 0.0, 0.6, 1.2, 2.0])
def test_thermal_continuity_away_from_criticality(h):
    g = thermal_g_matrix(h, 1.0, 1e-4, 5)
    assert np.max(np.abs(g - uniform_g_matrix(h, 1.0, 5))) < 1e-3


def test_thermal_strong_field():
    assert thermal_g_row(3.0, 1.0, 0.05, 0)[0] == pytest.approx(1.0, abs=1e-6)


def test_thermal_beta_cap():
    with pytest.raises(ValueError, match="beta"):
        thermal_g_row(0.5, 1.0, 0.1 / BETA_MAX, 1)
    with pytest.raises(ValueError):
        thermal_g_row(0.5, 1.0, 0.0, 1)


def test_spectral_symmetry_pure_chain():
    for spec in sector_spectra(ring(30), zero_field(30)):
        e = np.sort(spec.energies)
        assert np.allclose(e, -e[::-1], atol=1e-10)


def test_selected_sector_is_parity_consistent(rng):
    for _ in range(50):
        n = int(rng.integers(4, 40))
        gs = ground_state(ring(n, h=float(rng.uniform(-1.5, 1.5))), draw(rng, 1.5, 0.6, n))
        assert gs.n_filled % 2 == gs.sector.parity
        # occupied levels lie below every empty one
        e = gs.spectrum.energies
        filled = np.sort(e)[: gs.n_filled]
        if gs.n_filled and gs.n_filled < n:
            assert filled.max() <= np.sort(e)[gs.n_filled]


@pytest.mark.parametrize("boundary", list(Boundary))
@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_ground_energy_matches_exact_diagonalization(n, boundary, rng):
    for _ in range(5):
        chain = ring(n, h=float(rng.uniform(-1, 1.5)), boundary=boundary)
        field = draw(rng, 2.0, 0.5, n)
        exact = np.linalg.eigvalsh(oracle.hamiltonian(chain, field))[0]
        assert ground_state_energy(chain, field) == pytest.approx(exact, abs=1e-9)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from xyentangle.correlators import PairArrays, TwoSiteState
from xyentangle.entangle import (assemble_rho, concurrence, concurrence_from_factor,
                                 concurrence_general, entanglement_of_formation, pair_concurrence, rho_entries,
                                 x_state_concurrence)


def state(sz_i=0.0, sz_j=0.0, sxsx=0.0, szsz=0.0):
    return TwoSiteState(0, 1, sz_i, sz_j, sxsx, szsz)


def random_x_states(rng, count):
    """Valid X-shaped pair states: diagonal populations and a coherence bounded by them."""
    p = rng.dirichlet(np.ones(4) * 0.5, count)
    bound = np.sqrt(p[:, 1] * p[:, 2])
    r23 = rng.uniform(-1, 1, count) * bound
    sz_i = p[:, 0] + p[:, 1] - p[:, 2] - p[:, 3]
    sz_j = p[:, 0] - p[:, 1] + p[:, 2] - p[:, 3]
    szsz = p[:, 0] - p[:, 1] - p[:, 2] + p[:, 3]
    return sz_i, sz_j, 2 * r23, szsz


def test_rho_examples():
    assert np.allclose(assemble_rho(state(1, 1, 0, 1)), np.diag([1, 0, 0, 0]))
    assert np.allclose(assemble_rho(state()), np.eye(4) / 4)
    for sign in (1, -1):
        rho = assemble_rho(state(0, 0, sign, -1))
        assert rho[1, 2] == rho[2, 1] == sign / 2
        assert np.allclose(rho @ rho, rho)


def test_assemble_rejects_unphysical():
    with pytest.raises(ValueError, match="positive semidefinite"):
        assemble_rho(state(0, 0, 1.0, 0.5))


@pytest.mark.parametrize("route", [concurrence, concurrence_general])
def test_concurrence_examples(route):
    assert route(assemble_rho(state(0, 0, 1, -1))) == pytest.approx(1.0)
    assert route(assemble_rho(state(1, 1, 0, 1))) == 0.0
    c = route(assemble_rho(state(0, 0, 2 / math.pi, -4 / math.pi**2)))
    assert c == pytest.approx(2 / math.pi - (1 - 4 / math.pi**2) / 2, abs=1e-12)
    assert c == pytest.approx(0.3393, abs=1e-4)


def test_general_route_on_non_x_states(rng):
    # Werner states: C = max(0, 2F - 1) for singlet fidelity F
    singlet = np.array([0, 1, -1, 0]) / math.sqrt(2)
    for f in rng.uniform(0, 1, 50):
        rho = f * np.outer(singlet, singlet) + (1 - f) / 3 * (np.eye(4) - np.outer(singlet, singlet))
        u = np.kron(*[np.linalg.qr(rng.normal(size=(2, 2)))[0]] * 2)
        rho = u @ rho @ u.T  # local real rotations keep the concurrence
        assert concurrence_general(rho) == pytest.approx(max(0, 2 * f - 1), abs=1e-10)


def test_routes_agree_on_random_states(rng):
    sz_i, sz_j, sxsx, szsz = random_x_states(rng, 10_000)
    fast = x_state_concurrence(sz_i, sz_j, sxsx, szsz)
    general = np.array([concurrence_general(assemble_rho(state(*v)))
                        for v in zip(sz_i, sz_j, sxsx, szsz)])
    assert np.max(np.abs(fast - general)) < 1e-10
    assert fast.min() >= 0 and fast.max() <= 1


def test_factor_route_matches_eigen_route(rng):
    for _ in range(200):
        f = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
        f /= np.linalg.norm(f)
        assert concurrence_from_factor(f) == pytest.approx(concurrence_general(f @ f.conj().T), abs=1e-12)


def test_factor_route_resolves_tiny_populations():
    # pure state a|01> + b|10> + eps|11>: C = 2|ab| exactly, however small eps is
    a, b, eps = 0.6, 0.8, 1e-15
    psi = np.array([0.0, a, b, eps]) / math.sqrt(1 + eps**2)
    assert concurrence_from_factor(psi[:, None]) == pytest.approx(2 * a * b / (1 + eps**2), abs=1e-14)


def test_pair_concurrence_uses_populations():
    r11, r22, r33, r44, r23 = rho_entries(0.1, 0.2, 0.3, -0.2)
    arrays = PairArrays(*(np.array([v]) for v in (0.1, 0.2, 0.3, -0.2, r11, r44)))
    assert pair_concurrence(arrays)[0] == pytest.approx(x_state_concurrence(0.1, 0.2, 0.3, -0.2))


def test_threshold_is_exact():
    # |sxsx|/2 == sqrt(rho11 rho44) exactly gives zero; a hair above gives a positive value
    sz, szsz = 0.0, 0.2
    r11 = (1 + szsz) / 4
    at = 4 * r11
    assert x_state_concurrence(sz, sz, at / 2, szsz) == 0.0
    assert x_state_concurrence(sz, sz, at / 2 * 0.999, szsz) == 0.0
    assert x_state_concurrence(sz, sz, at / 2 + 1e-6, szsz) > 0.0


def binary_entropy_mp(c):
    mpmath.mp.dps = 40
    x = (1 + mpmath.sqrt(1 - mpmath.mpf(c) ** 2)) / 2
    return float(-x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2))


def test_entanglement_of_formation_examples():
    assert entanglement_of_formation(0.0) == 0.0
    assert entanglement_of_formation(1.0) == pytest.approx(1.0, abs=1e-15)
    assert entanglement_of_formation(0.5) == pytest.approx(binary_entropy_mp(0.5), abs=1e-14)
    assert entanglement_of_formation(0.5) == pytest.approx(0.3546, abs=1e-4)


def test_entanglement_of_formation_vectorized():
    cs = np.linspace(0, 1, 11)
    e = entanglement_of_formation(cs)
    assert np.all(np.diff(e) > 0) and e[0] == 0 and e[-1] == pytest.approx(1.0)
    for c, v in zip(cs[1:-1], e[1:-1]):
        assert v == pytest.approx(binary_entropy_mp(c), abs=1e-13)


@given(st.floats(0, 1), st.floats(0, 1))
def test_entanglement_of_formation_convex(c1, c2):
    # E lies below its chords, so E(mean C) never exceeds the mean of E
    mid = entanglement_of_formation((c1 + c2) / 2)
    assert mid <= (entanglement_of_formation(c1) + entanglement_of_formation(c2)) / 2 + 1e-12
    assert 0.0 <= mid <= 1.0

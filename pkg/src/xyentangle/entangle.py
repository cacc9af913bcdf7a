"""Two-site density matrices, Wootters concurrence and entanglement of formation.

Basis order is the sigma^z product basis (up-up, up-down, down-up, down-down).
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .correlators import PairArrays, TwoSiteState

PSD_TOL = 1e-9

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SYSY = np.kron(_SY, _SY).real  # real: the product of two i's is -1


def rho_entries(sz_i, sz_j, sxsx, szsz):
    """Nonzero entries (rho11, rho22, rho33, rho44, rho23) of the X-shaped pair matrix."""
    sz_i, sz_j, sxsx, szsz = map(np.asarray, (sz_i, sz_j, sxsx, szsz))
    r11 = (1 + sz_i + sz_j + szsz) / 4
    r22 = (1 + sz_i - sz_j - szsz) / 4
    r33 = (1 - sz_i + sz_j - szsz) / 4
    r44 = (1 - sz_i - sz_j + szsz) / 4
    return r11, r22, r33, r44, sxsx / 2


def assemble_rho(state: TwoSiteState) -> np.ndarray:
    r11, r22, r33, r44, r23 = (float(x) for x in
                               rho_entries(state.sz_i, state.sz_j, state.sxsx, state.szsz))
    if state.up_up is not None:
        r11 = state.up_up
    if state.down_down is not None:
        r44 = state.down_down
    rho = np.diag([r11, r22, r33, r44])
    rho[1, 2] = rho[2, 1] = r23
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -PSD_TOL:
        raise ValueError(
            f"pair density matrix for sites ({state.site_i}, {state.site_j}) is not "
            f"positive semidefinite (min eigenvalue {lowest:.3e})"
        )
    return rho


def x_state_concurrence(sz_i, sz_j, sxsx, szsz):
    """Closed-form concurrence of the X-shaped pair state, vectorized over inputs."""
    r11, _, _, r44, r23 = rho_entries(sz_i, sz_j, sxsx, szsz)
    return 2.0 * np.maximum(0.0, np.abs(r23) - np.sqrt(np.clip(r11 * r44, 0.0, None)))


def pair_concurrence(pairs: PairArrays) -> np.ndarray:
    """Concurrence of every pair in ``pairs``; the production path of the sweeps."""
    product = np.clip(pairs.up_up * pairs.down_down, 0.0, None)
    return 2.0 * np.maximum(0.0, np.abs(pairs.sxsx) / 2 - np.sqrt(product))


def concurrence(rho: np.ndarray) -> float:
    """Concurrence of an X-shaped pair matrix (zero up-up/down-down coherence)."""
    return float(2.0 * max(0.0, abs(rho[1, 2]) - np.sqrt(max(rho[0, 0] * rho[3, 3], 0.0))))


def wootters_lambdas(rho: np.ndarray) -> np.ndarray:
    """Square roots of the spectrum of rho * rho_tilde, in non-ascending order.

    With rho = W W^+ (W = eigenvectors scaled by sqrt of the eigenvalues), these are
    the singular values of the symmetric matrix W^T (sigma^y x sigma^y) W.  Going
    through singular values keeps the small lambdas of nearly pure states accurate
    to rounding, where taking square roots of tiny eigenvalues would not.
    """
    w, v = np.linalg.eigh(np.asarray(rho))
    weighted = v * np.sqrt(np.clip(w, 0.0, None))
    tau = weighted.T @ _SYSY @ weighted
    return np.linalg.svd(tau, compute_uv=False)


def wootters_lambdas_from_factor(factor: np.ndarray) -> np.ndarray:
    """Wootters lambdas of rho = F F^+ for a 4 x m factor F, without forming rho.

    An LQ factorization F = L Q reduces the problem to the 4 x 4 matrix
    L^T (sigma^y x sigma^y) L.  Tiny populations then enter through L with
    absolute rounding error, instead of through square roots of eigenvalues
    that rounding has already blurred.
    """
    tri = np.linalg.qr(np.asarray(factor).conj().T, mode="r")
    lower = tri.conj().T  # 4 x min(m, 4)
    lam = np.linalg.svd(lower.T @ _SYSY @ lower, compute_uv=False)
    return np.pad(lam, (0, 4 - lam.size))


def _from_lambdas(lam: np.ndarray) -> float:
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_general(rho: np.ndarray) -> float:
    """Wootters concurrence for an arbitrary two-qubit density matrix."""
    return _from_lambdas(wootters_lambdas(rho))


def concurrence_from_factor(factor: np.ndarray) -> float:
    """Wootters concurrence of rho = F F^+; see :func:`wootters_lambdas_from_factor`."""
    return _from_lambdas(wootters_lambdas_from_factor(factor))


def entanglement_of_formation(c):
    """Entanglement of formation (in bits) as a function of the concurrence."""
    c = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
    x = (1.0 + np.sqrt(1.0 - c**2)) / 2.0
    e = (special.entr(x) + special.entr(1.0 - x)) / np.log(2.0)
    return float(e) if e.ndim == 0 else e

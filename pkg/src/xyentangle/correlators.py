"""One- and two-point spin correlators from the contraction matrix G.

Functions accept a single ``(N, N)`` matrix or a stack ``(..., N, N)``; stacked
inputs return stacked results, which is how Gaussian mixtures are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fermion import GaussianMixture, GroundState

# Magnitudes above 1 by less than this are rounding and get clamped.
CLAMP_TOL = 1e-9
# Two-site populations below this are recomputed from the modes (see refine_populations).
REFINE_BELOW = 1e-6


@dataclass(frozen=True)
class TwoSiteState:
    site_i: int
    site_j: int
    sz_i: float
    sz_j: float
    sxsx: float
    szsz: float
    # <n_i n_j> and <(1 - n_i)(1 - n_j)>; derived from the four correlators when None
    up_up: float | None = None
    down_down: float | None = None


@dataclass(frozen=True)
class PairArrays:
    """Correlators of the pairs (i, i + r), one entry per left site i."""

    sz_i: np.ndarray
    sz_j: np.ndarray
    sxsx: np.ndarray
    szsz: np.ndarray
    up_up: np.ndarray
    down_down: np.ndarray

    @property
    def n_pairs(self) -> int:
        return int(np.shape(self.sz_i)[-1])


def _check_sites(g: np.ndarray, *sites: int) -> None:
    n = g.shape[-1]
    for s in sites:
        if not 0 <= s < n:
            raise IndexError(f"site {s} out of range for a {n}-site G matrix")


def sigma_z(g: np.ndarray, i: int):
    _check_sites(g, i)
    return g[..., i, i]


def sigma_zz(g: np.ndarray, i: int, j: int):
    _check_sites(g, i, j)
    if i == j:
        raise ValueError("sigma_zz needs two distinct sites")
    return g[..., i, i] * g[..., j, j] - g[..., i, j] * g[..., j, i]


def _xx_block_index(starts: np.ndarray, r: int):
    """Row/column indices of the r x r blocks M[s, t] = G[i + s, i + t + 1]."""
    k = np.arange(r)
    rows = starts[:, None, None] + k[None, :, None]
    cols = starts[:, None, None] + k[None, None, :] + 1
    return rows, cols


def sigma_xx(g: np.ndarray, i: int, j: int):
    """<sigma^x_i sigma^x_j> for i < j as the (j - i) x (j - i) determinant of G entries.

    The Jordan-Wigner string runs over sites i..j-1, so on a ring the pair must not
    straddle the seam; indices of a finite chain are never wrapped here.
    """
    _check_sites(g, i, j)
    if not i < j:
        raise ValueError(f"sigma_xx needs i < j without wrapping, got i={i}, j={j}")
    rows, cols = _xx_block_index(np.array([i]), j - i)
    return np.linalg.det(g[..., rows[0], cols[0]])


def clamp_unit(x, name: str = "correlator"):
    x = np.asarray(x, dtype=float)
    worst = np.max(np.abs(x), initial=0.0)
    if worst > 1.0 + CLAMP_TOL:
        raise ValueError(f"{name} magnitude {worst!r} exceeds 1 beyond rounding")
    return np.clip(x, -1.0, 1.0)


def separation_correlators(g: np.ndarray, r: int, n_pairs: int | None = None):
    """Correlators of all pairs (i, i + r), i = 0..n_pairs-1, as arrays over i.

    Returns ``(sz_i, sz_j, sxsx, szsz)``.  The default ``n_pairs`` takes every
    pair that fits inside the matrix without wrapping.
    """
    n = g.shape[-1]
    if n_pairs is None:
        n_pairs = n - r
    if r < 1 or n_pairs < 0 or n_pairs + r > n:
        raise ValueError(f"separation {r} with {n_pairs} pairs does not fit in {n} sites")
    i = np.arange(n_pairs)
    diag = np.diagonal(g, axis1=-2, axis2=-1)
    sz_i = diag[..., i]
    sz_j = diag[..., i + r]
    g_ij = g[..., i, i + r]
    g_ji = g[..., i + r, i]
    szsz = sz_i * sz_j - g_ij * g_ji
    if r == 1:
        sxsx = g_ij
    else:
        rows, cols = _xx_block_index(i, r)
        sxsx = np.linalg.det(g[..., rows, cols])
    return sz_i, sz_j, sxsx, szsz


def _populations(sz_i, sz_j, szsz):
    return (1 + sz_i + sz_j + szsz) / 4, (1 - sz_i - sz_j + szsz) / 4


def gram_det2(rows: np.ndarray) -> np.ndarray:
    """det(U U^T) for stacked 2 x m blocks U, via QR so that rank deficiency gives ~0 exactly."""
    m = rows.shape[-1]
    if m < 2:
        return np.zeros(rows.shape[:-2])
    rr = np.linalg.qr(np.swapaxes(rows, -1, -2), mode="r")
    return (rr[..., 0, 0] * rr[..., 1, 1]) ** 2


def refine_populations(gs: GroundState, r: int, up_up: np.ndarray, down_down: np.ndarray):
    """Recompute small two-site populations of a Slater determinant as Gram determinants.

    <n_i n_j> is the Gram determinant of rows i, j of the filled modes and
    <(1 - n_i)(1 - n_j)> that of the empty modes.  Read off G they carry absolute
    rounding of order 1e-16, which the square root in the concurrence inflates to
    1e-8 when the true value is 0.
    """
    modes = gs.spectrum.modes
    up_up = np.array(up_up, dtype=float)
    down_down = np.array(down_down, dtype=float)
    for pops, block in ((up_up, modes[:, :gs.n_filled]), (down_down, modes[:, gs.n_filled:])):
        small = np.flatnonzero(pops < REFINE_BELOW)
        if small.size:
            rows = np.stack([block[small], block[small + r]], axis=1)
            pops[small] = gram_det2(rows)
    return up_up, down_down


def refine_mixture_populations(state: GaussianMixture, r: int, up_up: np.ndarray,
                               down_down: np.ndarray):
    """Small populations of a Gaussian mixture from two-mode joint occupations.

    Every group is diagonal in its mode occupations, so
    <n_i n_j> = sum_{k<l} P_kl (V_ik V_jl - V_il V_jk)^2 with P_kl >= 0, a sum
    without the cancellation that reading it off the G matrices suffers.
    """
    up_up = np.array(up_up, dtype=float)
    down_down = np.array(down_down, dtype=float)
    for pops, holes in ((up_up, False), (down_down, True)):
        small = np.flatnonzero(pops < REFINE_BELOW)
        if not small.size:
            continue
        joint = state.joint_occupations(holes)
        total = np.zeros(small.size)
        for s, modes in enumerate(state.modes):
            vi, vj = modes[small], modes[small + r]
            minors = vi[:, :, None] * vj[:, None, :] - vi[:, None, :] * vj[:, :, None]
            total += 0.5 * np.einsum("kl,pkl->p", joint[s], minors**2)
        pops[small] = total
    return up_up, down_down


def pair_arrays(state, r: int, n_pairs: int | None = None) -> PairArrays:
    """All pair correlators at separation ``r`` for a G matrix, ground state or mixture."""
    if isinstance(state, GaussianMixture):
        sz_i, sz_j, sxsx, szsz = mixture_correlators(state, r, n_pairs)
        up_up, down_down = refine_mixture_populations(state, r, *_populations(sz_i, sz_j, szsz))
    elif isinstance(state, GroundState):
        sz_i, sz_j, sxsx, szsz = separation_correlators(state.g, r, n_pairs)
        up_up, down_down = refine_populations(state, r, *_populations(sz_i, sz_j, szsz))
    else:
        sz_i, sz_j, sxsx, szsz = separation_correlators(state, r, n_pairs)
        up_up, down_down = _populations(sz_i, sz_j, szsz)
    return PairArrays(sz_i, sz_j, sxsx, szsz, up_up, down_down)


def mixture_correlators(state: GaussianMixture, r: int, n_pairs: int | None = None):
    """Pair correlators of a Gaussian mixture; each is linear in the state."""
    parts = separation_correlators(state.gs, r, n_pairs)
    return tuple(state.combine(p) for p in parts)


def two_site_state(state, i: int, j: int) -> TwoSiteState:
    """Correlators of one pair i < j from a G matrix, GroundState or GaussianMixture."""
    if isinstance(state, (GaussianMixture, GroundState)):
        if not 0 <= i < j:
            raise ValueError(f"need 0 <= i < j, got ({i}, {j})")
        p = pair_arrays(state, j - i, i + 1)
        vals = [p.sz_i[i], p.sz_j[i], p.sxsx[i], p.szsz[i]]
        pops = (float(p.up_up[i]), float(p.down_down[i]))
    else:
        vals = [sigma_z(state, i), sigma_z(state, j), sigma_xx(state, i, j), sigma_zz(state, i, j)]
        pops = (None, None)
    vals = clamp_unit(vals)
    return TwoSiteState(i, j, *map(float, vals), *pops)

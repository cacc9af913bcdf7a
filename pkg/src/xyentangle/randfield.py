"""Random on-site fields drawn from the q-Gaussian (Tsallis) family.

The unnormalized density is ``[a^2 + (q - 1) h^2] ** (-1 / (q - 1))``, which tends to
``exp(-h^2 / a^2)`` as q -> 1 and is a Lorentzian of half-width ``a`` at q = 2.
For 1 < q < 3 it is a Student-t with ``nu = (3 - q) / (q - 1)`` degrees of freedom,
rescaled by ``a / sqrt(3 - q)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DisorderSpec, SigmaConvention

# q values closer to 1 than this are treated as the Gaussian limit.
_GAUSSIAN_Q_TOL = 1e-12


@dataclass(frozen=True)
class FieldSample:
    values: np.ndarray
    sample_index: int
    seed: int


def dof(q: float) -> float:
    """Student-t degrees of freedom matching the q-Gaussian with index ``q``."""
    return (3.0 - q) / (q - 1.0)


def t_scale(q: float, a: float) -> float:
    """Factor mapping a standard Student-t(dof(q)) variate onto the field distribution."""
    return a / np.sqrt(3.0 - q)


def gaussian_sigma(a: float, convention: SigmaConvention = SigmaConvention.LITERAL) -> float:
    if SigmaConvention(convention) is SigmaConvention.PROSE:
        return float(a)
    return a / np.sqrt(2.0)


def density_unnormalized(h, q: float, a: float):
    """The field density up to normalization, written directly in terms of q and a."""
    h = np.asarray(h, dtype=float)
    if abs(q - 1.0) < _GAUSSIAN_Q_TOL:
        return np.exp(-(h**2) / a**2)
    return (a**2 - (1.0 - q) * h**2) ** (1.0 / (1.0 - q))


def distribution_variance(q: float, a: float,
                          convention: SigmaConvention = SigmaConvention.LITERAL) -> float:
    """Variance of the field distribution; ``inf`` once q >= 5/3."""
    if not 1.0 <= q < 3.0 or a < 0:
        raise ValueError(f"need 1 <= q < 3 and a >= 0, got q={q}, a={a}")
    if abs(q - 1.0) < _GAUSSIAN_Q_TOL:
        return gaussian_sigma(a, convention) ** 2
    if q >= 5.0 / 3.0 - 1e-12:
        return float("inf")
    return a**2 / (5.0 - 3.0 * q)


def sample_seed(master_seed: int, sample_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(sample_index),))


def draw(rng: np.random.Generator, q: float, a: float, size: int,
         convention: SigmaConvention = SigmaConvention.LITERAL) -> np.ndarray:
    """``size`` i.i.d. variates from the field distribution using generator ``rng``."""
    if a == 0:
        return np.zeros(size)
    if abs(q - 1.0) < _GAUSSIAN_Q_TOL:
        return gaussian_sigma(a, convention) * rng.standard_normal(size)
    return t_scale(q, a) * rng.standard_t(dof(q), size)


def sample_field(disorder: DisorderSpec, n_sites: int, sample_index: int) -> FieldSample:
    """Field configuration for one disorder realization.

    The stream depends only on ``(master_seed, sample_index)`` so realizations can be
    generated in any order or in parallel and still reproduce bit for bit.
    """
    if not 0 <= sample_index < disorder.n_samples:
        raise IndexError(f"sample_index {sample_index} outside [0, {disorder.n_samples})")
    rng = np.random.default_rng(sample_seed(disorder.master_seed, sample_index))
    values = draw(rng, disorder.q, disorder.scale_a, n_sites, disorder.sigma_convention)
    return FieldSample(values=values, sample_index=sample_index, seed=disorder.master_seed)


def zero_field(n_sites: int) -> FieldSample:
    return FieldSample(values=np.zeros(n_sites), sample_index=0, seed=0)

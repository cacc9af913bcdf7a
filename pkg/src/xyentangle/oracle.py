"""Brute-force exact diagonalization of small XY chains.

This is the reference the free-fermion pipeline is tested against: it builds the
full 2^N spin Hamiltonian, with no Jordan-Wigner mapping, and reads concurrences
off exact reduced density matrices.  Site 0 is the most significant bit of a
basis index and bit value 0 is spin up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entangle import concurrence_from_factor
from .model import ChainSpec
from .randfield import FieldSample

MAX_SITES = 12
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class DenseState:
    """Mixture sum_k p_k |v_k><v_k| over columns of ``vectors``; a pure state has one column."""

    n_sites: int
    probabilities: np.ndarray
    vectors: np.ndarray
    energies: np.ndarray
    degenerate: bool = False


def _check_size(n: int) -> None:
    if n > MAX_SITES:
        raise ValueError(f"exact diagonalization limited to {MAX_SITES} sites, got {n}")


def hamiltonian(chain: ChainSpec, field: FieldSample | np.ndarray) -> np.ndarray:
    n = chain.n_sites
    _check_size(n)
    h_j = np.asarray(getattr(field, "values", field), dtype=float)
    dim = 2**n
    states = np.arange(dim)
    bits = (states[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    spins = 1 - 2 * bits
    ham = np.zeros((dim, dim))
    ham[states, states] = -0.5 * spins @ (chain.uniform_field + h_j)
    bonds = [(k, (k + 1) % n) for k in range(n if chain.periodic else n - 1)]
    for k, l in bonds:
        # (XX + YY)/4 flips an antiparallel pair with amplitude 1/2
        flip = bits[:, k] != bits[:, l]
        src = states[flip]
        dst = src ^ (1 << (n - 1 - k)) ^ (1 << (n - 1 - l))
        ham[dst, src] += -chain.coupling / 2
    return ham


def exact_spectrum(chain: ChainSpec, field: FieldSample | np.ndarray):
    return np.linalg.eigh(hamiltonian(chain, field))


def exact_ground_state(chain: ChainSpec, field: FieldSample | np.ndarray) -> DenseState:
    energies, vectors = exact_spectrum(chain, field)
    degenerate = len(energies) > 1 and energies[1] - energies[0] < DEGENERACY_TOL
    return DenseState(chain.n_sites, np.ones(1), vectors[:, :1], energies[:1], degenerate)


def exact_thermal_state(chain: ChainSpec, field: FieldSample | np.ndarray,
                        kt: float | None = None) -> DenseState:
    kt = chain.temperature if kt is None else kt
    if not kt > 0:
        raise ValueError("exact_thermal_state needs kT > 0")
    energies, vectors = exact_spectrum(chain, field)
    logw = -(energies - energies[0]) / kt
    p = np.exp(logw)
    return DenseState(chain.n_sites, p / p.sum(), vectors, energies)


def pair_factor(state: DenseState, i: int, j: int) -> np.ndarray:
    """4 x m matrix F with F F^+ equal to the reduced density matrix of sites (i, j)."""
    n = state.n_sites
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"need two distinct sites in range, got ({i}, {j})")
    k = state.vectors.shape[1]
    psi = state.vectors.T.reshape((k,) + (2,) * n)
    psi = np.moveaxis(psi, (i + 1, j + 1), (1, 2)).reshape(k, 4, -1)
    psi = psi * np.sqrt(state.probabilities)[:, None, None]
    return psi.transpose(1, 0, 2).reshape(4, -1)


def pair_density_matrix(state: DenseState, i: int, j: int) -> np.ndarray:
    f = pair_factor(state, i, j)
    return f @ f.conj().T


def exact_pair_concurrence(state: DenseState, i: int, j: int) -> float:
    return concurrence_from_factor(pair_factor(state, i, j))


def exact_sigma_z(state: DenseState, i: int) -> float:
    rho = pair_density_matrix(state, i, (i + 1) % state.n_sites)
    return float(np.real(rho[0, 0] + rho[1, 1] - rho[2, 2] - rho[3, 3]))

"""Side-by-side comparison of the free-fermion pipeline with exact diagonalization."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import oracle
from .correlators import pair_arrays
from .entangle import pair_concurrence
from .fermion import ground_state, thermal_state
from .model import Boundary, ChainSpec
from .randfield import draw


@dataclass(frozen=True)
class Instance:
    chain: ChainSpec
    field: np.ndarray
    q: float
    a: float


def pipeline_concurrences(chain: ChainSpec, field: np.ndarray, r: int) -> np.ndarray:
    """C_{i,i+r} for i = 0..N-r-1 from the fermion pipeline."""
    state = thermal_state(chain, field) if chain.temperature > 0 else ground_state(chain, field)
    return pair_concurrence(pair_arrays(state, r))


def oracle_concurrences(state: oracle.DenseState, r: int) -> np.ndarray:
    return np.array([oracle.exact_pair_concurrence(state, i, i + r)
                     for i in range(state.n_sites - r)])


def exact_state(chain: ChainSpec, field: np.ndarray) -> oracle.DenseState:
    if chain.temperature > 0:
        return oracle.exact_thermal_state(chain, field)
    return oracle.exact_ground_state(chain, field)


def random_instances(count_per_combo: int = 1, seed: int = 12345,
                     sizes=(4, 6, 8, 10), temperatures=(0.0, 0.1, 0.5),
                     qs=(1.0, 2.0), widths=(0.0, 0.3, 1.0),
                     h_range=(-0.2, 1.5)):
    """Random chains covering every combination of size, boundary, kT, q and a.

    Ground states that come out degenerate are redrawn, since their pair density
    matrices depend on an arbitrary choice within the degenerate subspace.
    """
    rng = np.random.default_rng(seed)
    combos = product(sizes, (Boundary.PERIODIC, Boundary.OPEN), temperatures, qs, widths)
    for n, boundary, kt, q, a in combos:
        for _ in range(count_per_combo):
            while True:
                h = float(rng.uniform(*h_range))
                field = draw(rng, q, a, n)
                chain = ChainSpec(n, 1.0, h, kt, boundary)
                if kt > 0 or not oracle.exact_ground_state(chain, field).degenerate:
                    break
            yield Instance(chain, field, q, a)


def compare(instance: Instance) -> float:
    """Largest |pipeline - oracle| concurrence over non-wrapping pairs with r <= N/2 - 1."""
    chain = instance.chain
    state = exact_state(chain, instance.field)
    worst = 0.0
    for r in range(1, max(2, chain.n_sites // 2)):
        diff = pipeline_concurrences(chain, instance.field, r) - oracle_concurrences(state, r)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def oracle_check(count_per_combo: int = 1, seed: int = 12345, sizes=(4, 6, 8, 10)):
    """Run :func:`compare` over :func:`random_instances`; returns (n_instances, worst_diff)."""
    worst, count = 0.0, 0
    for inst in random_instances(count_per_combo, seed, sizes=sizes):
        worst = max(worst, compare(inst))
        count += 1
    return count, worst


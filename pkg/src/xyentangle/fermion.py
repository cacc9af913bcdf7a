"""Jordan-Wigner free-fermion solution of the isotropic XY chain.

The chain maps onto spinless fermions (a fermion is an up spin) hopping with
amplitude -J/2 in an on-site potential -h - h_j.  Everything downstream is
expressed through the contraction matrix

    G_ij = <(a_i^+ - a_i)(a_j^+ + a_j)> = 2 Re<a_i^+ a_j> - delta_ij,

whose diagonal is <sigma^z_i>.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, linalg, special

from .model import ChainSpec
from .randfield import FieldSample

# Modes with |energy| below this are left empty.
ZERO_MODE_TOL = 1e-12
# Largest inverse temperature the thermodynamic-limit quadrature accepts.
BETA_MAX = 1e6


class Sector(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def parity(self) -> int:
        return 0 if self is Sector.EVEN else 1


def corner_value(sector: Sector, coupling: float) -> float:
    """Boundary hopping element of a periodic ring in a fixed fermion-parity sector.

    Bulk hopping is -J/2.  Closing the ring drags a1 through the string
    exp(i pi N_F), which gives +J/2 (antiperiodic fermions) for an even fermion
    number and -J/2 (periodic fermions) for an odd one.
    """
    return coupling / 2 if sector is Sector.EVEN else -coupling / 2


@dataclass(frozen=True)
class HoppingMatrix:
    matrix: np.ndarray
    sector: Sector | None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class FermionSpectrum:
    energies: np.ndarray
    modes: np.ndarray
    sector: Sector | None


@dataclass(frozen=True)
class GroundState:
    g: np.ndarray
    n_filled: int
    sector: Sector | None
    band_energy: float
    parity_adjusted: bool
    spectrum: FermionSpectrum


@dataclass(frozen=True)
class GaussianMixture:
    """Signed mixture of Gaussian fermion states; correlators combine linearly.

    Needed for thermal states of finite periodic rings, where projecting onto each
    parity sector turns one Gibbs state into four Gaussian terms.  Component ``c``
    has contraction matrix ``gs[c]`` and mode occupations ``occupations[c]`` in the
    eigenbasis ``modes[group[c]]``.
    """

    weights: np.ndarray
    gs: np.ndarray
    occupations: np.ndarray
    group: np.ndarray
    modes: np.ndarray

    def combine(self, values: np.ndarray) -> np.ndarray:
        return np.tensordot(self.weights, values, axes=(0, 0))

    def joint_occupations(self, holes: bool = False) -> np.ndarray:
        """P[s, k, l]: probability that modes k and l of group s are both filled (or both empty)."""
        occ = 1.0 - self.occupations if holes else self.occupations
        out = np.zeros((len(self.modes),) + occ.shape[1:] * 2)
        for w, s, f in zip(self.weights, self.group, occ):
            out[s] += w * np.outer(f, f)
        return out


def build_hopping(chain: ChainSpec, field: FieldSample | np.ndarray,
                  sector: Sector | None = Sector.EVEN) -> HoppingMatrix:
    h_j = np.asarray(getattr(field, "values", field), dtype=float)
    n = chain.n_sites
    if h_j.shape != (n,):
        raise ValueError(f"field has shape {h_j.shape}, chain has {n} sites")
    J = chain.coupling
    a = np.diag(-chain.uniform_field - h_j)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = a[idx + 1, idx] = -J / 2
    if not chain.periodic:
        return HoppingMatrix(a, None)
    if n == 2:
        # the two bonds of a 2-site ring coincide; the boundary bond adds to the bulk one
        a[0, 1] = a[1, 0] = -J / 2 + corner_value(sector, J)
    else:
        a[0, n - 1] = a[n - 1, 0] = corner_value(sector, J)
    return HoppingMatrix(a, sector)


def diagonalize(hopping: HoppingMatrix) -> FermionSpectrum:
    try:
        energies, modes = linalg.eigh(hopping.matrix)
    except linalg.LinAlgError as exc:
        raise RuntimeError(
            f"eigensolver failed on {hopping.size}x{hopping.size} hopping matrix "
            f"(sector={hopping.sector})"
        ) from exc
    return FermionSpectrum(energies, modes, hopping.sector)


def sector_spectra(chain: ChainSpec, field: FieldSample | np.ndarray) -> list[FermionSpectrum]:
    """Single-particle spectra of every sector the boundary condition needs."""
    if not chain.periodic:
        return [diagonalize(build_hopping(chain, field, None))]
    return [diagonalize(build_hopping(chain, field, s)) for s in (Sector.EVEN, Sector.ODD)]


def g_from_modes(modes: np.ndarray, n_filled: int) -> np.ndarray:
    occ = modes[:, :n_filled]
    g = 2.0 * (occ @ occ.T)
    g[np.diag_indices_from(g)] -= 1.0
    return g


def _sector_candidate(energies: np.ndarray, sector: Sector | None):
    """Lowest filling of one sector: (energy, n_filled, adjusted)."""
    n = int(np.count_nonzero(energies < -ZERO_MODE_TOL))
    e = float(energies[:n].sum())
    if sector is None or n % 2 == sector.parity:
        return e, n, False
    # Filling every negative level gives the wrong parity; the lowest admissible
    # state adds the next empty level or removes the highest filled one.
    options = []
    if n < energies.size:
        options.append((e + energies[n], n + 1))
    if n > 0:
        options.append((e - energies[n - 1], n - 1))
    e_adj, n_adj = min(options)
    return float(e_adj), n_adj, True


def fill_ground_state(spectra: list[FermionSpectrum], shift: float = 0.0) -> GroundState:
    """Ground state given the sector spectra, with all energies lowered by ``shift``.

    ``shift`` is an extra uniform field: it moves every level down without changing
    the modes, so one diagonalization serves a whole field sweep.

    In each sector the levels below zero are filled; a sector is self-consistent
    when that count has the sector's parity.  The lowest-energy sector wins, and
    an inconsistent sector is repaired by moving one particle at the Fermi level.
    """
    best = None
    for order, spec in enumerate(spectra):
        e, n, adjusted = _sector_candidate(spec.energies - shift, spec.sector)
        key = (e, adjusted, order)
        if best is None or key < best[0]:
            best = (key, n, spec)
    (e, adjusted, _), n, spec = best
    return GroundState(
        g=g_from_modes(spec.modes, n),
        n_filled=n,
        sector=spec.sector,
        band_energy=e,
        parity_adjusted=adjusted,
        spectrum=spec,
    )


def ground_state(chain: ChainSpec, field: FieldSample | np.ndarray) -> GroundState:
    return fill_ground_state(sector_spectra(chain, field))


def ground_state_g_matrix(chain: ChainSpec, field: FieldSample | np.ndarray) -> np.ndarray:
    if chain.temperature != 0:
        raise ValueError("ground_state_g_matrix needs temperature = 0")
    return ground_state(chain, field).g


def ground_state_energy(chain: ChainSpec, field: FieldSample | np.ndarray) -> float:
    """Total energy of the spin Hamiltonian, restoring the constant dropped by the mapping.

    With sigma^z = 2 n - 1 the Zeeman term -(h + h_j) sigma^z / 2 becomes
    -(h + h_j) n + (h + h_j) / 2.
    """
    h_j = np.asarray(getattr(field, "values", field), dtype=float)
    gs = ground_state(chain, h_j)
    return gs.band_energy + 0.5 * float(np.sum(chain.uniform_field + h_j))


def _log_abs_one_minus_exp(t: np.ndarray) -> np.ndarray:
    """log|1 - exp(-t)| for t != 0."""
    out = np.empty_like(t)
    pos = t > 0
    out[pos] = np.log(-np.expm1(-t[pos]))
    out[~pos] = -t[~pos] + np.log(-np.expm1(t[~pos]))
    return out


def _gibbs_components(spec: FermionSpectrum, beta: float, twisted: bool):
    """Gaussian terms of Tr[P^k exp(-beta H) ...] for one sector (k = 1 if twisted).

    Returns (sign, log|weight|, mode occupations) triples.  Each mode carries
    weights (1, w) for (empty, filled) with w = exp(-beta eps), or -exp(-beta eps)
    when the parity operator is inserted; its occupation is w / (1 + w).  Near-zero
    twisted modes, where 1 + w vanishes, are split exactly into their empty and
    filled parts.
    """
    t = beta * spec.energies
    if not twisted:
        logz = float(np.sum(np.logaddexp(0.0, -t)))
        return [(1.0, logz, special.expit(-t))]
    soft = np.abs(t) < 0.5
    hard = ~soft
    sign = float(np.prod(np.where(t[hard] > 0, 1.0, -1.0)))
    logz = float(np.sum(_log_abs_one_minus_exp(t[hard])))
    base = np.empty_like(t)
    with np.errstate(over="ignore"):
        base[hard] = -1.0 / np.expm1(t[hard])
    comps = [(sign, logz, base)]
    for k in np.flatnonzero(soft):
        split = []
        for s, lz, f in comps:
            empty = f.copy()
            empty[k] = 0.0
            filled = f.copy()
            filled[k] = 1.0
            split.append((s, lz, empty))
            split.append((-s, lz - t[k], filled))
        comps = split
    return comps


def thermal_state(chain: ChainSpec, field: FieldSample | np.ndarray) -> GaussianMixture:
    """Gibbs state of a finite chain at ``chain.temperature`` > 0 as a Gaussian mixture.

    Open chains give a single Fermi-Dirac term.  For a ring the state is
    sum_s P_s exp(-beta H_s), with P_s = (1 +- (-1)^N_F) / 2 the parity projector
    of sector s; each projector splits into a plain and a parity-twisted Gaussian.
    """
    if not chain.temperature > 0:
        raise ValueError("thermal_state needs temperature > 0")
    beta = chain.beta
    terms = []
    spectra = sector_spectra(chain, field)
    for group, spec in enumerate(spectra):
        if spec.sector is None:
            terms.extend((1.0, s, lz, f, group)
                         for s, lz, f in _gibbs_components(spec, beta, False))
            continue
        proj_sign = 1.0 if spec.sector is Sector.EVEN else -1.0
        for twisted, coef in ((False, 0.5), (True, 0.5 * proj_sign)):
            terms.extend((coef, s, lz, f, group)
                         for s, lz, f in _gibbs_components(spec, beta, twisted))
    log_max = max(t[2] for t in terms)
    raw = np.array([coef * s * math.exp(lz - log_max) for coef, s, lz, _, _ in terms])
    total = raw.sum()
    if not total > 0:
        raise RuntimeError("partition function lost to cancellation")
    occupations = np.stack([f for *_, f, _ in terms])
    group = np.array([g for *_, g in terms])
    modes = np.stack([spec.modes for spec in spectra])
    gs = np.stack([(modes[g] * (2 * f - 1)) @ modes[g].T for f, g in zip(occupations, group)])
    return GaussianMixture(raw / total, gs, occupations, group, modes)


def _toeplitz(row: np.ndarray) -> np.ndarray:
    return linalg.toeplitz(row)


def uniform_g_row(h: float, coupling: float, n_max: int) -> np.ndarray:
    """Ground-state contractions G(n) = G_{i,i+n}, n = 0..n_max, of the infinite uniform chain."""
    ratio = h / coupling
    n = np.arange(n_max + 1)
    if ratio >= 1.0:
        return (n == 0).astype(float)
    if ratio <= -1.0:
        return -(n == 0).astype(float)
    k_f = math.acos(-ratio)
    row = np.empty(n_max + 1)
    row[0] = -1.0 + 2.0 * k_f / math.pi
    row[1:] = 2.0 / math.pi * np.sin(n[1:] * k_f) / n[1:]
    return row


def uniform_g_matrix(h: float, coupling: float, r_window: int) -> np.ndarray:
    """Translation-invariant (r_window + 1)-site block of G for the infinite chain at T = 0.

    At h = J both branches of the closed form meet at G = identity, so the
    critical point is returned as that limit.
    """
    return _toeplitz(uniform_g_row(h, coupling, r_window))


def _fermi_integral(n: int, h: float, coupling: float, beta: float) -> float:
    def integrand(phi):
        return math.cos(n * phi) * special.expit(beta * (coupling * math.cos(phi) + h))

    ratio = h / coupling
    points = [0.0, math.acos(-ratio), math.pi] if abs(ratio) < 1 else [0.0, math.pi]
    total = 0.0
    for lo, hi in zip(points, points[1:]):
        if hi <= lo:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(integrand, lo, hi, epsabs=1e-12, epsrel=0.0, limit=1000)
            except integrate.IntegrationWarning as exc:
                raise RuntimeError(
                    f"quadrature did not converge for n={n}, h={h}, beta={beta}: {exc}"
                ) from exc
        total += val
    return total


def thermal_g_row(h: float, coupling: float, kt: float, n_max: int) -> np.ndarray:
    """Thermal contractions G(n), n = 0..n_max, of the infinite uniform chain."""
    if not kt > 0:
        raise ValueError(f"kT must be > 0, got {kt}")
    beta = 1.0 / kt
    if beta > BETA_MAX:
        raise ValueError(f"beta = {beta:g} exceeds the supported maximum {BETA_MAX:g}")
    row = np.array([2.0 / math.pi * _fermi_integral(n, h, coupling, beta) for n in range(n_max + 1)])
    row[0] -= 1.0
    return row


def thermal_g_matrix(h: float, coupling: float, kt: float, r_window: int) -> np.ndarray:
    return _toeplitz(thermal_g_row(h, coupling, kt, r_window))

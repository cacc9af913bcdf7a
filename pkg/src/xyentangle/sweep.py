"""Field sweeps of the site- and disorder-averaged concurrence C(r).

Three regimes are covered: the uniform chain at T = 0 and at T > 0 (closed-form
and quadrature contractions of the infinite chain), and the random-field chain
at T = 0 (finite rings averaged over disorder realizations).
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy.linalg import toeplitz

from . import __version__
from .correlators import pair_arrays
from .entangle import pair_concurrence
from .fermion import (fill_ground_state, sector_spectra, thermal_g_row, thermal_state,
                      uniform_g_row)
from .model import (ChainSpec, DisorderSpec, Regime, SweepSpec, validate_chain,
                    validate_disorder, validate_sweep)
from .randfield import sample_field, zero_field

log = logging.getLogger(__name__)

COLUMNS = ("regime", "q", "a", "kt", "h", "r", "mean_concurrence", "std_error",
           "n_samples", "n_pairs")

DESK_PRESET = {"n_sites": 100, "n_samples": 1000}
PRODUCTION_PRESET = {"n_sites": 500, "n_samples": 10000}


@dataclass(frozen=True)
class SweepRow:
    regime: str
    q: float | None
    a: float | None
    kt: float
    h: float
    r: int
    mean_concurrence: float
    std_error: float
    n_samples: int
    n_pairs: int


@dataclass
class SweepResult:
    rows: list[SweepRow]
    n_sites: int | None = None
    master_seed: int | None = None
    version: str = __version__
    parity_adjustments: int = 0
    extra: dict = field(default_factory=dict)

    def h_grid(self) -> tuple[float, ...]:
        return tuple(sorted({row.h for row in self.rows}))

    def curve(self, r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(h, mean, std_error) arrays for separation ``r``, ordered by h."""
        rows = sorted((row for row in self.rows if row.r == r), key=lambda row: row.h)
        if not rows:
            raise KeyError(f"no rows with r={r}")
        return (np.array([row.h for row in rows]),
                np.array([row.mean_concurrence for row in rows]),
                np.array([row.std_error for row in rows]))

    def value(self, h: float, r: int) -> SweepRow:
        for row in self.rows:
            if row.r == r and math.isclose(row.h, h, abs_tol=1e-9):
                return row
        raise KeyError(f"no row with h={h}, r={r}")


def _check(chain: ChainSpec, sweep: SweepSpec, regime: Regime) -> None:
    validate_chain(chain)
    validate_sweep(sweep, chain.n_sites)
    if sweep.regime is not regime:
        raise ValueError(f"sweep regime is {sweep.regime.value}, expected {regime.value}")


def _window_curve(g_row: np.ndarray, r_max: int) -> np.ndarray:
    """C(1..r_max) from the contraction row G(0..r_max) of a translation-invariant chain."""
    g = toeplitz(g_row)
    return np.array([pair_concurrence(pair_arrays(g, r, 1))[0] for r in range(1, r_max + 1)])


def _deterministic_rows(regime: Regime, kt: float, h_grid: Sequence[float],
                        curves: np.ndarray, n_pairs: Callable[[int], int],
                        q: float | None = None, a: float | None = None) -> list[SweepRow]:
    rows = []
    for h, curve in zip(h_grid, curves):
        for r, c in enumerate(curve, start=1):
            rows.append(SweepRow(regime.value, q, a, kt, float(h), r, float(c), 0.0, 1, n_pairs(r)))
    return rows


def spatial_curves(spectra, h_grid: Sequence[float], r_max: int) -> tuple[np.ndarray, int]:
    """Spatially averaged ground-state C(r) of one finite chain at every h in the grid.

    ``spectra`` are the sector spectra at zero uniform field; each h only shifts
    the levels.  Averages run over the non-wrapping pairs (i, i + r),
    i = 0..N-r-1.  Returns the (len(h_grid), r_max) array and the number of
    ground states that needed a parity repair.
    """
    out = np.empty((len(h_grid), r_max))
    adjusted = 0
    for k, h in enumerate(h_grid):
        gs = fill_ground_state(spectra, shift=h)
        adjusted += gs.parity_adjusted
        for r in range(1, r_max + 1):
            out[k, r - 1] = pair_concurrence(pair_arrays(gs, r)).mean()
    return out, adjusted


def run_uniform_zero_t(chain: ChainSpec, sweep: SweepSpec, finite: bool = False) -> SweepResult:
    """Uniform chain at T = 0.

    By default the infinite chain is used through its closed-form contractions
    (one pair suffices by translation invariance).  ``finite=True`` evaluates the
    ``chain.n_sites`` ring itself, on exactly the code path of the random regime.
    """
    _check(chain, sweep, Regime.UNIFORM_ZERO_T)
    if finite:
        spectra = sector_spectra(chain.with_field(0.0), zero_field(chain.n_sites))
        curves, adjusted = spatial_curves(spectra, sweep.h_grid, sweep.r_max)
        rows = _deterministic_rows(Regime.UNIFORM_ZERO_T, 0.0, sweep.h_grid, curves,
                                   lambda r: chain.n_sites - r)
        return SweepResult(rows, n_sites=chain.n_sites, parity_adjustments=adjusted)
    curves = np.array([_window_curve(uniform_g_row(h, chain.coupling, sweep.r_max), sweep.r_max)
                       for h in sweep.h_grid])
    rows = _deterministic_rows(Regime.UNIFORM_ZERO_T, 0.0, sweep.h_grid, curves, lambda r: 1)
    return SweepResult(rows)


def run_uniform_finite_t(chain: ChainSpec, sweep: SweepSpec, finite: bool = False) -> SweepResult:
    """Uniform chain at ``chain.temperature`` > 0, infinite chain unless ``finite``."""
    _check(chain, sweep, Regime.UNIFORM_FINITE_T)
    kt = chain.temperature
    if not kt > 0:
        raise ValueError("run_uniform_finite_t needs temperature > 0")
    if finite:
        curves = []
        for h in sweep.h_grid:
            state = thermal_state(chain.with_field(h), zero_field(chain.n_sites))
            curves.append([pair_concurrence(pair_arrays(state, r)).mean()
                           for r in range(1, sweep.r_max + 1)])
        rows = _deterministic_rows(Regime.UNIFORM_FINITE_T, kt, sweep.h_grid, np.array(curves),
                                   lambda r: chain.n_sites - r)
        return SweepResult(rows, n_sites=chain.n_sites)
    curves = np.array([_window_curve(thermal_g_row(h, chain.coupling, kt, sweep.r_max), sweep.r_max)
                       for h in sweep.h_grid])
    rows = _deterministic_rows(Regime.UNIFORM_FINITE_T, kt, sweep.h_grid, curves, lambda r: 1)
    return SweepResult(rows)


def _sample_task(args):
    chain, disorder, h_grid, r_max, indices = args
    base = chain.with_field(0.0)
    out = np.empty((len(indices), len(h_grid), r_max))
    adjusted = 0
    for k, index in enumerate(indices):
        spectra = sector_spectra(base, sample_field(disorder, chain.n_sites, index))
        out[k], adj = spatial_curves(spectra, h_grid, r_max)
        adjusted += adj
    return indices, out, adjusted


def _chunks(n: int, size: int) -> Iterable[list[int]]:
    for start in range(0, n, size):
        yield list(range(start, min(n, start + size)))


def disorder_samples(chain: ChainSpec, disorder: DisorderSpec, h_grid: Sequence[float],
                     r_max: int, workers: int = 1,
                     progress: Callable[[int, int], None] | None = None) -> tuple[np.ndarray, int]:
    """Per-sample spatial means, shape (n_samples, len(h_grid), r_max), ordered by sample index.

    Samples are independent, so they are farmed out to ``workers`` processes;
    placing each result by its index keeps the output independent of scheduling.
    """
    n = disorder.n_samples
    values = np.empty((n, len(h_grid), r_max))
    adjusted = 0
    chunk = max(1, min(50, n // max(1, 4 * workers)))
    tasks = [(chain, disorder, tuple(h_grid), r_max, idx) for idx in _chunks(n, chunk)]
    done = 0
    if workers <= 1:
        results = map(_sample_task, tasks)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_sample_task, tasks)
    try:
        for indices, out, adj in results:
            values[indices] = out
            adjusted += adj
            done += len(indices)
            if progress is not None:
                progress(done, n)
    finally:
        if pool is not None:
            pool.shutdown()
    return values, adjusted


def run_random_zero_t(chain: ChainSpec, disorder: DisorderSpec, sweep: SweepSpec,
                      workers: int = 1,
                      progress: Callable[[int, int], None] | None = None) -> SweepResult:
    """Disorder-averaged C(r) of finite rings in random fields at T = 0.

    Each realization contributes its spatial mean; the reported error is the
    standard error of those per-sample means.
    """
    _check(chain, sweep, Regime.RANDOM_ZERO_T)
    validate_disorder(disorder)
    n = disorder.n_samples
    if disorder.scale_a == 0:
        # every realization is the clean chain
        one, adjusted = disorder_samples(chain, DisorderSpec(disorder.q, 0.0, 1, disorder.master_seed),
                                         sweep.h_grid, sweep.r_max)
        mean, err = one[0], np.zeros_like(one[0])
        adjusted *= n
    else:
        values, adjusted = disorder_samples(chain, disorder, sweep.h_grid, sweep.r_max,
                                            workers, progress)
        mean = values.mean(axis=0)
        err = values.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    if adjusted:
        log.info("%d ground states needed a parity repair", adjusted)
    rows = []
    for k, h in enumerate(sweep.h_grid):
        for r in range(1, sweep.r_max + 1):
            rows.append(SweepRow(Regime.RANDOM_ZERO_T.value, disorder.q, disorder.scale_a, 0.0,
                                 float(h), r, float(mean[k, r - 1]), float(err[k, r - 1]), n,
                                 chain.n_sites - r))
    return SweepResult(rows, n_sites=chain.n_sites, master_seed=disorder.master_seed,
                       parity_adjustments=adjusted)


def max_concurrence_trace(results: Sequence[SweepResult], control: str, r: int
                          ) -> list[tuple[float, float]]:
    """Grid maximum over h of C(r) for each result, keyed by its ``a`` or ``kt`` value."""
    if control not in ("a", "kt"):
        raise ValueError(f"control must be 'a' or 'kt', got {control!r}")
    if not results:
        return []
    grid = results[0].h_grid()
    trace = []
    for res in results:
        if res.h_grid() != grid:
            raise ValueError("results do not share a common h grid")
        rows = [row for row in res.rows if row.r == r]
        if not rows:
            raise ValueError(f"result has no rows with r={r}")
        value = getattr(rows[0], control)
        if any(getattr(row, control) != value for row in rows):
            raise ValueError(f"result mixes several {control} values")
        trace.append((0.0 if value is None else float(value),
                      max(row.mean_concurrence for row in rows)))
    return trace


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={_fmt(result.master_seed)}\n")
    buf.write(f"# n_sites={_fmt(result.n_sites) or 'inf'}\n")
    buf.write(f"# version={result.version}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in result.rows:
        writer.writerow([_fmt(getattr(row, col)) for col in COLUMNS])
    return buf.getvalue()


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path) as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.DictReader(lines))


PLOT_SCRIPT = '''"""Plot C(r) against h from a sweep CSV: python {name} sweep.csv [out.png]"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

path = sys.argv[1]
out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"
with open(path) as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
curves = {{}}
for row in rows:
    key = (row["regime"], row["q"], row["a"], row["kt"], int(row["r"]))
    curves.setdefault(key, []).append(
        (float(row["h"]), float(row["mean_concurrence"]), float(row["std_error"])))
fig, ax = plt.subplots(figsize=(6, 4))
for (regime, q, a, kt, r), pts in sorted(curves.items()):
    pts.sort()
    h, c, e = zip(*pts)
    label = f"C({{r}})" + (f" q={{q}} a={{a}}" if a else "") + (f" kT={{kt}}" if float(kt) else "")
    ax.errorbar(h, c, yerr=e, label=label, capsize=2)
ax.set_xlabel("h")
ax.set_ylabel("concurrence")
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig(out, dpi=150)
'''


def emit(result: SweepResult, path: str | Path, plot_script: bool = False) -> list[Path]:
    """Write the CSV (and optionally a standalone plotting script next to it)."""
    path = Path(path)
    path.write_text(to_csv(result))
    written = [path]
    if plot_script:
        script = path.with_name(path.stem + "_plot.py")
        script.write_text(PLOT_SCRIPT.format(name=script.name))
        written.append(script)
    return written


def dump_spectra(chain: ChainSpec, disorder: DisorderSpec, h_grid: Sequence[float],
                 out: TextIO) -> None:
    """Write sample index, h, sector, filling and single-particle energies, one line each."""
    base = chain.with_field(0.0)
    for index in range(disorder.n_samples):
        spectra = sector_spectra(base, sample_field(disorder, chain.n_sites, index))
        for h in h_grid:
            gs = fill_ground_state(spectra, shift=h)
            sector = gs.sector.value if gs.sector is not None else "open"
            energies = " ".join(f"{e:.12g}" for e in gs.spectrum.energies - h)
            out.write(f"{index} {h!r} {sector} {gs.n_filled} {energies}\n")

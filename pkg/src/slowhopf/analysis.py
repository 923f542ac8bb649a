"""Exit-time bookkeeping: measured profiles, winner maps, case labels.

The delay curves say when each piece of the linear solution stops being
exponentially small; the solver says what the full equation actually did.
This module closes the loop.  ``exit_times`` measures, per grid point,
when a trajectory strays from the quasi-steady state; ``predicted_exit``
assembles min(mu_stbc, mu_h) with the winning mechanism at every x;
``classify_case`` names the resulting delayed-Hopf scenario (1-4) and
locates the crossover points; ``compare_report`` lines prediction up
against measurement.  ``dispersion`` evaluates the plane-wave relations
used to diagnose the post-onset oscillations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import curve_h, curve_stbc
from .core import DomainError, Grid, PhysParams
from .qss import QssExpansion
from .solver import Trajectory

__all__ = [
    "CASE_DELTA",
    "ExitProfile",
    "PredictedExit",
    "CaseReport",
    "ComparisonTable",
    "exit_times",
    "predicted_exit",
    "classify_case",
    "dispersion",
    "compare_report",
    "write_comparison_csv",
    "write_comparison_json",
]

# Shallow initial times mu0 in (-omega0, -CASE_DELTA] are their own case: the
# homogeneous tip sits left of the buffer-curve tip no matter who wins where.
CASE_DELTA = 0.05


# --- result records ---------------------------------------------------------------


@dataclass
class ExitProfile:
    """Measured exit time per grid point; +inf marks never-exited points."""

    x: np.ndarray
    mu_exit: np.ndarray
    threshold: float

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.mu_exit = np.asarray(self.mu_exit, dtype=float)
        if self.x.shape != self.mu_exit.shape:
            raise ValueError("x and mu_exit must have matching shapes")
        if not self.threshold > 0:
            raise ValueError("exit threshold must be positive")
        defined = np.isfinite(self.mu_exit)
        if np.any(self.mu_exit[defined] <= 0.0):
            raise ValueError("exit times must be positive where defined")


@dataclass
class PredictedExit:
    """Pointwise minimum of the two delay curves, with per-x winner.

    Both parent curves ride along so crossovers can be located afterward
    without recomputing anything.  At points where one curve diverges to
    +inf (nodal lines), the finite mechanism wins outright.
    """

    x: np.ndarray
    mu: np.ndarray
    winner: np.ndarray  # "Stbc" | "Hom" per grid point
    mu_stbc: np.ndarray
    mu_h: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.mu = np.asarray(self.mu, dtype=float)
        self.winner = np.asarray(self.winner, dtype=object)
        self.mu_stbc = np.asarray(self.mu_stbc, dtype=float)
        self.mu_h = np.asarray(self.mu_h, dtype=float)
        for arr in (self.mu, self.winner, self.mu_stbc, self.mu_h):
            if arr.shape != self.x.shape:
                raise ValueError("all per-x arrays must share the grid shape")
        bad = set(self.winner) - {"Stbc", "Hom"}
        if bad:
            raise ValueError(f"unknown winner labels {sorted(bad)}")
        if not np.array_equal(self.mu, np.minimum(self.mu_stbc, self.mu_h)):
            raise ValueError("mu must equal min(mu_stbc, mu_h) pointwise")


@dataclass
class CaseReport:
    """Case label 1-4 plus the crossover points backing it up."""

    case: int
    crossovers: tuple
    winner: np.ndarray

    def __post_init__(self):
        if self.case not in (1, 2, 3, 4):
            raise ValueError(f"case must be 1-4, got {self.case}")
        self.crossovers = tuple(float(c) for c in self.crossovers)
        if list(self.crossovers) != sorted(self.crossovers):
            raise ValueError("crossovers must be sorted")
        self.winner = np.asarray(self.winner, dtype=object)
        stbc_everywhere = all(w == "Stbc" for w in self.winner)
        hom_everywhere = all(w == "Hom" for w in self.winner)
        if self.case == 1 and not stbc_everywhere:
            raise ValueError("case 1 means the buffer curve wins everywhere")
        if self.case == 3 and not hom_everywhere:
            raise ValueError("case 3 means the homogeneous curve wins everywhere")
        if self.case == 2 and (stbc_everywhere or hom_everywhere):
            raise ValueError("case 2 means a mixed winner pattern")


@dataclass
class ComparisonTable:
    """Per-x predicted/measured/diff rows plus a scalar summary block."""

    x: np.ndarray
    mu_pred: np.ndarray
    mu_meas: np.ndarray
    diff: np.ndarray
    winner: np.ndarray
    summary: dict

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        for name in ("mu_pred", "mu_meas", "diff"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))
        self.winner = np.asarray(self.winner, dtype=object)
        for arr in (self.mu_pred, self.mu_meas, self.diff, self.winner):
            if arr.shape != self.x.shape:
                raise ValueError("all table columns must share the grid shape")


# --- measured exits ---------------------------------------------------------------


def exit_times(traj: Trajectory, q: QssExpansion, threshold: float = 0.1) -> ExitProfile:
    """Earliest post-Hopf time each grid point strays from the expansion.

    Per x, finds the smallest recorded mu > 0 with |A - A_qss| >= threshold
    and sharpens it by linear interpolation against the previous snapshot.
    The interpolation never reaches left of the first post-Hopf snapshot:
    if that one is already past the threshold, its own mu is reported.
    Points that stay within the threshold for the whole recorded ramp get
    the +inf sentinel.
    """
    if not traj.snapshots:
        raise ValueError("trajectory has no snapshots")
    grid = traj.snapshots[0][1].grid
    x = grid.x
    post = [(mu, fld) for mu, fld in traj.snapshots if mu > 0.0]
    mu_exit = np.full(x.shape, math.inf)
    if not post:
        return ExitProfile(x, mu_exit, threshold)
    mus = np.array([mu for mu, _ in post])
    dev = np.empty((len(post), x.size))
    for i, (mu, fld) in enumerate(post):
        dev[i] = np.abs(fld.values - q.evaluate(x, mu))
    hit = dev >= threshold
    ever = hit.any(axis=0)
    first = hit.argmax(axis=0)
    for j in np.nonzero(ever)[0]:
        i = first[j]
        if i == 0:
            mu_exit[j] = mus[0]
        else:
            d_lo, d_hi = dev[i - 1, j], dev[i, j]
            mu_exit[j] = mus[i - 1] + (threshold - d_lo) * (mus[i] - mus[i - 1]) / (
                d_hi - d_lo
            )
    return ExitProfile(x, mu_exit, threshold)


# --- predicted exits and case classification ----------------------------------------


def predicted_exit(s, data, p: PhysParams, grid: Grid, threads: int = 1) -> PredictedExit:
    """min(mu_stbc, mu_h) on the grid, recording which curve came first.

    Ties go to "Stbc" (they also mark crossover points, which
    classify_case reports separately).
    """
    stbc = curve_stbc(s, grid, p, threads=threads)
    hom = curve_h(data, s, grid, p, threads=threads)
    mu = np.minimum(stbc.mu, hom.mu)
    winner = np.where(stbc.mu <= hom.mu, "Stbc", "Hom")
    return PredictedExit(grid.x, mu, winner, stbc.mu, hom.mu)


def classify_case(pred: PredictedExit, p: PhysParams, delta: float = CASE_DELTA) -> CaseReport:
    """Name the delayed-Hopf scenario behind a winner map.

    A shallow start, mu0 in (-omega0, -delta], is case 4 outright.  For
    deeper starts the winner pattern decides: buffer curve everywhere is
    case 1, homogeneous curve everywhere is case 3, mixed is case 2.
    Crossovers are the linearly interpolated zeros of mu_stbc - mu_h;
    pairs involving a diverged (+inf) curve value are skipped, since the
    winner cannot change across them through this mechanism.
    """
    if p.mu0 > -delta:
        raise DomainError(
            f"classification assumes mu0 <= -delta = {-delta:g}; got mu0 = {p.mu0:g}"
        )
    gap = np.full(pred.x.shape, np.nan)
    both = np.isfinite(pred.mu_stbc) & np.isfinite(pred.mu_h)
    gap[both] = pred.mu_stbc[both] - pred.mu_h[both]

    crossings = [float(xx) for xx, g in zip(pred.x, gap) if g == 0.0]
    for i in range(gap.size - 1):
        a, b = gap[i], gap[i + 1]
        if a * b < 0.0:  # nan products fail this, skipping diverged pairs
            t = a / (a - b)
            crossings.append(float(pred.x[i] + t * (pred.x[i + 1] - pred.x[i])))

    if -p.omega0 < p.mu0:
        case = 4
    elif all(w == "Stbc" for w in pred.winner):
        case = 1
    elif all(w == "Hom" for w in pred.winner):
        case = 3
    else:
        case = 2
    return CaseReport(case, tuple(sorted(crossings)), pred.winner)


# --- plane-wave diagnostics ---------------------------------------------------------


def dispersion(k: float, mu: float, p: PhysParams) -> dict:
    """Nonlinear plane-wave relations at wavenumber k and ramp value mu.

    Returns amplitude r, frequency omega, phase and group velocities, and
    whether the wave sits in the sideband-stable (Benjamin-Feir) band.
    c_p is NaN at k = 0, where a phase velocity is meaningless.
    """
    r_sq = mu - p.eps * p.d_R * k * k
    if r_sq < 0.0:
        raise DomainError(
            f"no plane wave at k = {k:g}, mu = {mu:g}: r^2 = {r_sq:.3g} < 0"
        )
    omega = -p.omega0 + p.alpha * mu - p.eps * (p.alpha * p.d_R - p.d_I) * k * k
    gate = 1.0 + p.alpha * p.d_I
    stable = bool(
        gate > 0.0 and k * k < mu * gate / (3.0 + p.alpha * p.d_I + 2.0 * p.alpha**2)
    )
    return {
        "r": math.sqrt(r_sq),
        "omega": omega,
        "c_p": omega / k if k != 0.0 else math.nan,
        "c_g": 2.0 * p.eps * (p.d_I - p.alpha * p.d_R) * k,
        "bf_stable": stable,
    }


# --- prediction vs measurement -------------------------------------------------------


def compare_report(
    pred: PredictedExit, measured: ExitProfile, tolerance: float = 0.05
) -> ComparisonTable:
    """Line up predicted and measured exit times on their shared grid.

    diff = measured - predicted where both are finite, NaN elsewhere.
    The summary reduces the comparable points to max |diff|, mean diff,
    and the fraction within the given tolerance.
    """
    if pred.x.shape != measured.x.shape or not np.array_equal(pred.x, measured.x):
        raise DomainError("prediction and measurement sample different grids")
    both = np.isfinite(pred.mu) & np.isfinite(measured.mu_exit)
    diff = np.full(pred.x.shape, np.nan)
    diff[both] = measured.mu_exit[both] - pred.mu[both]
    n = int(both.sum())
    if n:
        d = diff[both]
        summary = {
            "max_abs_diff": float(np.max(np.abs(d))),
            "mean_diff": float(np.mean(d)),
            "fraction_within_tolerance": float(np.mean(np.abs(d) <= tolerance)),
        }
    else:
        summary = {
            "max_abs_diff": math.nan,
            "mean_diff": math.nan,
            "fraction_within_tolerance": 0.0,
        }
    summary["tolerance"] = float(tolerance)
    summary["n_compared"] = n
    return ComparisonTable(
        pred.x, pred.mu, measured.mu_exit, diff, pred.winner, summary
    )


def write_comparison_csv(table: ComparisonTable, path) -> None:
    """Rows of `x,mu_pred,mu_meas,diff,winner`, 17 significant digits."""
    with open(path, "w") as f:
        f.write("x,mu_pred,mu_meas,diff,winner\n")
        for j in range(table.x.size):
            f.write(
                f"{table.x[j]:.17g},{table.mu_pred[j]:.17g},"
                f"{table.mu_meas[j]:.17g},{table.diff[j]:.17g},{table.winner[j]}\n"
            )


def write_comparison_json(table: ComparisonTable, path) -> None:
    """Summary block as JSON, with non-finite floats mapped to null."""
    clean = {
        k: (None if isinstance(v, float) and not math.isfinite(v) else v)
        for k, v in table.summary.items()
    }
    with open(path, "w") as f:
        json.dump(clean, f, indent=2, sort_keys=True)
        f.write("\n")

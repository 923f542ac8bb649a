"""Grids, fields, parameter records, and shared numerics.

Everything downstream (sources, quasi-steady-state expansions, delay
curves, contour quadrature, the PDE solver) builds on the small set of
types and helpers defined here.  Magnitudes of the form exp(omega0^2/2 eps)
overflow double precision long before eps reaches interesting values, so
this module also provides log-polar arithmetic -- (log-amplitude, phase)
pairs -- used wherever exponentially large or small complex numbers must
be added or compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "DivergenceError",
    "UnsupportedSourceError",
    "Grid",
    "PhysParams",
    "ComplexField",
    "ExperimentConfig",
    "laplacian_neumann",
    "second_difference",
    "mu_of_t",
    "trapezoid_weights",
    "logpolar",
    "from_logpolar",
    "logpolar_sum",
]


class DomainError(ValueError):
    """A closed-form expression was evaluated outside its branch domain."""


class ConvergenceError(RuntimeError):
    """An iterative scheme (root finder, fixed point, quadrature) failed to converge."""


class UnsupportedSourceError(ValueError):
    """The requested closed form exists only for specific source variants."""


class DivergenceError(RuntimeError):
    """The PDE solution blew up.  Carries the location and ramp value of first blow-up."""

    def __init__(self, message: str, x: float, mu: float):
        super().__init__(message)
        self.x = x
        self.mu = mu


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid on [-half_length, half_length], endpoints included."""

    half_length: float
    n_points: int

    def __post_init__(self):
        if self.half_length <= 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        if self.n_points < 3:
            raise ValueError(f"n_points must be at least 3, got {self.n_points}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / (self.n_points - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.half_length, self.half_length, self.n_points)


@dataclass(frozen=True)
class PhysParams:
    """Physical parameters of the slowly ramped cubic CGL equation.

    eps    -- ramp rate (mu_t = eps), 0 < eps small
    omega0 -- linear frequency at onset, > 0
    alpha  -- cubic phase/amplitude coupling
    d_R, d_I -- complex diffusivity d = d_R + i d_I (d_R >= 0; the PDE
               solver additionally requires d_R > 0 when diffusion is on)
    beta   -- source scaling exponent (source enters as eps**beta * I_a)
    gamma  -- diffusion scaling exponent (diffusion enters as eps**gamma * d)
    mu0    -- initial ramp value, usually well below -omega0 or at least < 0
    """

    eps: float
    omega0: float
    alpha: float
    d_R: float
    d_I: float = 0.0
    beta: float = 0.5
    gamma: float = 1.0
    mu0: float = -1.0

    def __post_init__(self):
        if not (self.eps > 0):
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (self.omega0 > 0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        # d_R == 0 is allowed at the type level so that diffusion-free ODE
        # reductions remain expressible; PDE configuration validation
        # rejects it separately.
        if self.d_R < 0:
            raise ValueError(f"d_R must be nonnegative, got {self.d_R}")

    @property
    def d(self) -> complex:
        return complex(self.d_R, self.d_I)


@dataclass
class ComplexField:
    """Complex amplitude A sampled on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.n_points,):
            raise ValueError(
                f"field has {self.values.shape} values for a grid of "
                f"{self.grid.n_points} points"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one ramped simulation.

    `source` and `initial_data` are the tagged records defined in the
    sources and solver modules; they are deliberately untyped here to
    keep core free of upward imports.
    """

    params: PhysParams
    grid: Grid
    source: object
    initial_data: object
    mu_end: float
    dt: Union[float, str] = "auto"
    record_every: float = 0.005  # cadence in mu units between stored snapshots
    exit_threshold: float = 0.1
    cubic: bool = True
    diffusion_method: str = "cn"  # "cn" (unconditional) or "rk4" (explicit)

    def __post_init__(self):
        if self.mu_end < self.params.mu0:
            raise ValueError(
                f"mu_end={self.mu_end} must not be below mu0={self.params.mu0}"
            )
        if isinstance(self.dt, str):
            if self.dt != "auto":
                raise ValueError(f'dt must be a positive number or "auto", got {self.dt!r}')
        elif not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.record_every <= 0:
            raise ValueError("record_every must be positive")
        if self.exit_threshold <= 0:
            raise ValueError("exit_threshold must be positive")
        if self.diffusion_method not in ("cn", "rk4"):
            raise ValueError(f"unknown diffusion method {self.diffusion_method!r}")


def second_difference(values: np.ndarray, dx: float) -> np.ndarray:
    """Second difference with zero-flux ghost reflection, on raw arrays.

    Interior: (f[j-1] - 2 f[j] + f[j+1]) / dx^2.  Boundaries reflect:
    f[-1] := f[1] and f[N] := f[N-2], which keeps the stencil second order
    for zero-flux data.
    """
    values = np.asarray(values)
    if values.shape[-1] < 3:
        raise ValueError("need at least 3 points for a second difference")
    out = np.empty_like(values, dtype=np.result_type(values.dtype, np.float64))
    out[..., 1:-1] = values[..., :-2] - 2.0 * values[..., 1:-1] + values[..., 2:]
    out[..., 0] = 2.0 * (values[..., 1] - values[..., 0])
    out[..., -1] = 2.0 * (values[..., -2] - values[..., -1])
    out /= dx * dx
    return out


def laplacian_neumann(f: ComplexField) -> ComplexField:
    """Discrete Laplacian with zero-flux (Neumann) boundary conditions."""
    return ComplexField(f.grid, second_difference(f.values, f.grid.dx))


def mu_of_t(t: float, p: PhysParams) -> float:
    """Ramp value at time t: mu(t) = mu0 + eps * t."""
    return p.mu0 + p.eps * t


def trapezoid_weights(n_points: int, dx: float) -> np.ndarray:
    """Quadrature weights dx*[1/2, 1, ..., 1, 1/2].

    This is the natural discrete integral for the zero-flux Laplacian:
    with these weights the discrete conservation law
    sum(w * second_difference(f)) == 0 holds exactly (the interior sum
    telescopes and the half-weighted ghost rows cancel the remainder).
    """
    if n_points < 2:
        raise ValueError("need at least 2 points")
    w = np.full(n_points, dx)
    w[0] = w[-1] = 0.5 * dx
    return w


# ---------------------------------------------------------------------------
# log-polar arithmetic
#
# A nonzero complex z is represented as (log|z|, arg z).  Sums are taken by
# factoring out the largest magnitude, so quantities like
# exp((omega0^2 - mu^2)/2 eps) never materialize as floats.


def logpolar(z: complex) -> tuple[float, float]:
    """(log|z|, arg z) of a complex number; log|0| maps to -inf."""
    a = abs(z)
    if a == 0.0:
        return (-math.inf, 0.0)
    return (math.log(a), math.atan2(z.imag, z.real))


def from_logpolar(log_amp: float, phase: float) -> complex:
    """Inverse of :func:`logpolar`; overflows to inf for log_amp > ~709."""
    if log_amp == -math.inf:
        return 0.0 + 0.0j
    return cmath_exp(log_amp, phase)


def cmath_exp(log_amp: float, phase: float) -> complex:
    m = math.exp(log_amp)
    return complex(m * math.cos(phase), m * math.sin(phase))


def logpolar_sum(terms: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Sum of complex numbers given in log-polar form, result in log-polar form.

    Factoring out the largest log-amplitude keeps the arithmetic finite even
    when individual terms are far outside double range, provided the terms
    are within ~700 e-foldings of each other (those further below the
    maximum underflow harmlessly to zero).
    """
    terms = [t for t in terms if t[0] != -math.inf]
    if not terms:
        return (-math.inf, 0.0)
    m = max(t[0] for t in terms)
    acc = 0.0 + 0.0j
    for log_amp, phase in terms:
        acc += cmath_exp(log_amp - m, phase)
    if acc == 0:
        return (-math.inf, 0.0)
    return (m + math.log(abs(acc)), math.atan2(acc.imag, acc.real))

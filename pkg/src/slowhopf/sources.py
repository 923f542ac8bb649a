"""Source terms I_a(x) and their heat-semigroup kernels g(x, tau).

The linear particular solution of the ramped equation is an integral of
g(x, mu - mu~) against a complex Gaussian in mu~, where

    g(x, tau) = (4 pi d tau)^(-1/2) * int e^{-(x-y)^2/(4 d tau)} I_a(y) dy

is the heat evolution of the source continued to complex time d*tau.
Every catalog source below carries a closed form for g on the principal
branch; ``kernel_g_numeric`` integrates the definition directly and is
the oracle the closed forms are tested against.  g(x, tau) -> I_a(x) as
tau -> 0+, and g satisfies g_tau = d g_xx wherever it is analytic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf as _real_erf

from .core import ConvergenceError, DomainError

__all__ = [
    "Gaussian",
    "SmoothStep",
    "Periodic",
    "SignChanging",
    "Algebraic",
    "Constant",
    "eval_source",
    "eval_source_xx",
    "kernel_g",
    "kernel_g_numeric",
    "source_config",
    "source_from_config",
]


@dataclass(frozen=True)
class Gaussian:
    """I(x) = amplitude * exp(-x^2 / 4 sigma)."""

    sigma: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class SmoothStep:
    """I(x) = i_ave + i_e * erf(x), a smoothed jump between two positive levels."""

    i_ave: float
    i_e: float

    def __post_init__(self):
        if not (self.i_ave > self.i_e > 0):
            raise ValueError(
                f"need i_ave > i_e > 0 (positivity), got {self.i_ave}, {self.i_e}"
            )


@dataclass(frozen=True)
class Periodic:
    """I(x) = p1 + p2 * cos(x), strictly positive."""

    p1: float
    p2: float

    def __post_init__(self):
        if not (self.p1 > self.p2 > 0):
            raise ValueError(f"need p1 > p2 > 0, got {self.p1}, {self.p2}")


@dataclass(frozen=True)
class SignChanging:
    """I(x) = cos(x); vanishes on the lines x = pi/2 + k pi."""


@dataclass(frozen=True)
class Algebraic:
    """I(x) = x^2; unbounded, vanishing to second order at the origin."""


@dataclass(frozen=True)
class Constant:
    """I(x) = c, spatially uniform; c = 0 switches the source off."""

    c: float


def eval_source(s, x):
    """Pointwise source value I_a(x); accepts scalars or numpy arrays."""
    if isinstance(s, Gaussian):
        return s.amplitude * np.exp(-np.asarray(x) ** 2 / (4.0 * s.sigma))
    if isinstance(s, SmoothStep):
        return s.i_ave + s.i_e * _real_erf(x)
    if isinstance(s, Periodic):
        return s.p1 + s.p2 * np.cos(x)
    if isinstance(s, SignChanging):
        return np.cos(x)
    if isinstance(s, Algebraic):
        return np.asarray(x) ** 2
    if isinstance(s, Constant):
        return s.c * np.ones_like(np.asarray(x, dtype=float))
    raise TypeError(f"unknown source variant {type(s).__name__}")


def eval_source_xx(s, x):
    """Second spatial derivative I_a''(x), in closed form per variant."""
    x = np.asarray(x, dtype=float)
    if isinstance(s, Gaussian):
        return (x**2 / (4 * s.sigma**2) - 1 / (2 * s.sigma)) * eval_source(s, x)
    if isinstance(s, SmoothStep):
        return s.i_e * (2 / math.sqrt(math.pi)) * (-2 * x) * np.exp(-(x**2))
    if isinstance(s, Periodic):
        return -s.p2 * np.cos(x)
    if isinstance(s, SignChanging):
        return -np.cos(x)
    if isinstance(s, Algebraic):
        return 2.0 * np.ones_like(x)
    if isinstance(s, Constant):
        return np.zeros_like(x)
    raise TypeError(f"unknown source variant {type(s).__name__}")


def _as_complex(z):
    return np.asarray(z, dtype=np.complex128)


def kernel_g(s, x, tau, d):
    """Closed-form heat kernel g(x, tau) for complex diffusion time d*tau.

    Principal branch throughout.  Branch preconditions (a domain error
    names the violated one):

    * Gaussian: Re(d*tau) + sigma > 0 (keeps d*tau + sigma off the cut);
    * SmoothStep: sqrt(1 + 4 d tau) off the cut, and the erf argument
      w = x / sqrt(1 + 4 d tau) inside the sector |Im w| < |Re w| (either
      half; erf is odd) unless x = 0;
    * Algebraic: d*tau not on the negative real axis when x != 0.

    x and tau broadcast together; d is a scalar.
    """
    x = np.asarray(x)
    tau = _as_complex(tau)
    d = complex(d)
    dtau = d * tau
    scalar = x.ndim == 0 and tau.ndim == 0

    if isinstance(s, Gaussian):
        w = dtau + s.sigma
        if np.any(w.real <= 0):
            raise DomainError(
                f"gaussian kernel branch: Re(d*tau) + sigma must be positive, "
                f"got Re(d*tau)={np.min(dtau.real):.6g} with sigma={s.sigma}"
            )
        out = s.amplitude * np.sqrt(s.sigma / w) * np.exp(-(x**2) / (4.0 * w))
    elif isinstance(s, SmoothStep):
        u = 1.0 + 4.0 * dtau
        if np.any((u.imag == 0) & (u.real <= 0)):
            raise DomainError("smooth-step kernel branch: 1 + 4 d tau lies on the sqrt cut")
        from .asymptotics import cerf  # deferred: cerf is an asymptotics-module operation

        w = x / np.sqrt(u)
        bad = (np.asarray(x) != 0) & ~(np.abs(w.imag) < np.abs(w.real))
        if np.any(bad):
            raise DomainError(
                "smooth-step kernel: erf argument x/sqrt(1+4 d tau) leaves the "
                "sector |Im w| < |Re w| where the closed form is valid"
            )
        out = s.i_ave + s.i_e * cerf(w)
    elif isinstance(s, Periodic):
        out = s.p1 + s.p2 * np.exp(-dtau) * np.cos(x)
    elif isinstance(s, SignChanging):
        out = np.exp(-dtau) * np.cos(x)
    elif isinstance(s, Algebraic):
        bad = (np.asarray(x) != 0) & (dtau.imag == 0) & (dtau.real < 0)
        if np.any(bad):
            raise DomainError(
                "algebraic kernel: d*tau on the negative real axis puts the "
                "convolution argument on its branch cut"
            )
        out = x**2 + 2.0 * dtau + 0j
    elif isinstance(s, Constant):
        out = s.c * np.ones(np.broadcast(x, tau).shape, dtype=np.complex128)
    else:
        raise TypeError(f"unknown source variant {type(s).__name__}")

    out = _as_complex(out)
    return complex(out) if scalar else out


def kernel_g_numeric(s, x, tau, d):
    """Direct quadrature of the defining convolution; oracle for kernel_g.

    Requires Re(d*tau) > 0 so the Gaussian factor decays.  The window
    half-width W is chosen so exp(-W^2 Re(1/(4 d tau))) < 1e-20; bounded
    (or polynomially bounded) sources make the discarded tail negligible.
    """
    x = float(x)
    dtau = complex(d) * complex(tau)
    if not dtau.real > 0:
        raise DomainError(f"kernel_g_numeric needs Re(d*tau) > 0, got {dtau.real:.6g}")
    decay = dtau.real / (4.0 * abs(dtau) ** 2)  # = Re(1/(4 d tau))
    W = math.sqrt(20.0 * math.log(10.0) / decay)
    pref = 1.0 / np.sqrt(4.0 * np.pi * dtau)  # principal branch, Re(dtau) > 0

    def integrand(y):
        return np.exp(-((x - y) ** 2) / (4.0 * dtau)) * eval_source(s, y)

    val, err = quad(integrand, x - W, x + W, complex_func=True, epsabs=1e-13, epsrel=1e-11, limit=400)
    result = complex(pref * val)
    tol = 1e-9 * (1.0 + abs(result))
    err = abs(complex(err).real) + abs(complex(err).imag)  # per-part estimates
    if err > 10 * tol:
        raise ConvergenceError(
            f"heat-kernel quadrature achieved {err:.2e}, needed {tol:.2e}"
        )
    return result


# --- config (de)serialization ----------------------------------------------

_VARIANTS = {
    "gaussian": Gaussian,
    "smooth_step": SmoothStep,
    "periodic": Periodic,
    "sign_changing": SignChanging,
    "algebraic": Algebraic,
    "constant": Constant,
}
_TAGS = {cls: tag for tag, cls in _VARIANTS.items()}


def source_from_config(mapping) -> object:
    """Build a source from a {type, params...} mapping (config-file form)."""
    m = dict(mapping)
    try:
        tag = m.pop("type")
    except KeyError:
        raise ValueError("source spec needs a 'type' key") from None
    try:
        cls = _VARIANTS[tag]
    except KeyError:
        raise ValueError(
            f"unknown source type {tag!r}; known: {', '.join(sorted(_VARIANTS))}"
        ) from None
    try:
        return cls(**m)
    except TypeError as e:
        raise ValueError(f"bad parameters for source {tag!r}: {e}") from None


def source_config(s) -> dict:
    """Inverse of source_from_config."""
    d = {"type": _TAGS[type(s)]}
    for name in getattr(s, "__dataclass_fields__", {}):
        d[name] = getattr(s, name)
    return d

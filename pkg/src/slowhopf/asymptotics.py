"""Delay-curve asymptotics: buffer, exit-time, and Hopf curves.

This module turns the closed-form kernels of :mod:`slowhopf.sources`
into the three predictive curves:

* mu_stbc(x) -- the space-time buffer curve, where the Stokes-line part
  of the particular solution first reaches the onset level;
* mu_h(x)   -- the homogeneous exit-time curve, where the ramped-up
  memory of the initial data regrows to order one;
* mu_Hopf(x) -- the delayed Hopf curve, where local oscillation first
  outgrows the quasi-steady state;

together with exact log-polar evaluations of the linear particular
solution (for the entire kernels), the homogeneous solution for catalog
initial data, and the Fresnel-type transition function c(mu) that
governs the passage across mu = 0.  Everything that can be
exponentially large or small is carried as (log-amplitude, phase) pairs;
the onset condition |A| = level becomes log|A| = log(level), which keeps
every comparison finite for arbitrarily small eps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _scipy_erf
from scipy.special import wofz as _wofz

from .core import (
    ConvergenceError,
    DomainError,
    Grid,
    PhysParams,
    UnsupportedSourceError,
    logpolar_sum,
)
from .qss import _o1_values
from .sources import Gaussian, Periodic, SignChanging, Algebraic, eval_source, kernel_g

__all__ = [
    "CurveSample",
    "QssMultiple",
    "Cosine",
    "GaussianData",
    "Tabulated",
    "NoExitError",
    "cerf",
    "mu_stbc",
    "mu_h",
    "mu_hopf",
    "a_p_exact",
    "a_h_closed",
    "c_transition",
    "curve_stbc",
    "curve_h",
    "curve_hopf",
    "stbc_onset_level",
    "data_from_config",
    "data_config",
]

CERF_STRIP = 30.0  # |Im z| working strip for cerf


# --- types -------------------------------------------------------------------


@dataclass
class CurveSample:
    """A delay curve sampled on grid x values; +inf marks divergence points."""

    x: np.ndarray
    mu: np.ndarray
    kind: str  # "Stbc" | "HomExit" | "Hopf"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.mu = np.asarray(self.mu, dtype=float)
        if self.x.shape != self.mu.shape:
            raise ValueError("x and mu must have matching shapes")
        if self.kind not in ("Stbc", "HomExit", "Hopf"):
            raise ValueError(f"unknown curve kind {self.kind!r}")


@dataclass(frozen=True)
class QssMultiple:
    """A0(x) = factor * sqrt(eps) I_a(x) / (mu0 + i omega0).

    factor = -1 starts the run exactly on the attracting quasi-steady
    state; other factors start at a multiple of it.
    """

    factor: complex = -1.0


@dataclass(frozen=True)
class Cosine:
    """A0(x) = amplitude * cos(n pi x / ell); ell is the domain half-length."""

    n: int
    amplitude: float
    ell: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("mode number n must be nonnegative")
        if self.ell <= 0:
            raise ValueError("ell must be positive")

    @property
    def k(self) -> float:
        return self.n * math.pi / self.ell


@dataclass(frozen=True)
class GaussianData:
    """A0(x) = amplitude * exp(-x^2 / (4 width))."""

    amplitude: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("width must be positive")


@dataclass(frozen=True)
class Tabulated:
    """Custom initial data given directly on the grid (solver only)."""

    values: tuple

    def __init__(self, values):
        def as_complex(v):
            if isinstance(v, (list, tuple)):  # serialized [re, im] pair
                return complex(v[0], v[1])
            return complex(v)

        object.__setattr__(self, "values", tuple(as_complex(v) for v in values))


class NoExitError(RuntimeError):
    """|A_h| never regrows to the onset level inside the search bracket."""


# --- complex error function ----------------------------------------------------


def _erf_quadrant_overflow(zq: complex) -> complex:
    """First-quadrant erf where |erf| exceeds double range.

    erf(z) = 1 - exp(-z^2) w(iz); when exp(y^2 - x^2) overflows, return
    the correctly signed infinities from the phase of the diverging term
    (exactly i*inf on the imaginary axis, where erf is purely imaginary).
    """
    if zq.real == 0.0:
        return complex(0.0, math.inf)
    w = complex(_wofz(1j * zq))
    theta = -2.0 * zq.real * zq.imag + cmath.phase(w)
    c, s = math.cos(theta), math.sin(theta)
    re = 1.0 + (math.inf if c < 0 else (-math.inf if c > 0 else 0.0))
    im = math.inf if s < 0 else (-math.inf if s > 0 else 0.0)
    return complex(re, im)


def cerf(z):
    """Error function of a complex argument, principal values.

    Wraps the Faddeeva-based scipy implementation and enforces the exact
    symmetries erf(-z) = -erf(z) and erf(conj z) = conj(erf(z)) by
    evaluating in the closed first quadrant and mapping back, so the two
    identities hold to the last bit by construction.  Valid on the strip
    |Im z| <= 30; outside it the strip is enforced with an error.  Deep
    inside the strip at small |Re z| the value itself can exceed double
    range (|erf| grows like exp(y^2 - x^2)); such points return signed
    infinities.  Callers needing those regimes at full precision work
    with scaled quantities instead (see a_p_exact).
    """
    z = np.asarray(z, dtype=np.complex128)
    scalar = z.ndim == 0
    if np.any(np.abs(z.imag) > CERF_STRIP):
        raise DomainError(f"cerf argument outside working strip |Im z| <= {CERF_STRIP}")
    zq = np.abs(z.real) + 1j * np.abs(z.imag)
    w = np.atleast_1d(_scipy_erf(zq))
    bad = ~np.isfinite(w)
    if np.any(bad):
        zq_flat = np.atleast_1d(zq)
        for idx in np.flatnonzero(bad):
            w[idx] = _erf_quadrant_overflow(complex(zq_flat[idx]))
    w = w.reshape(zq.shape)
    # map back from the first quadrant componentwise: complex products
    # with infinities would produce 0*inf = nan cross terms
    sign = np.where(z.real >= 0, 1.0, -1.0)
    conj = np.where((z.real >= 0) == (z.imag >= 0), 1.0, -1.0)
    out = np.empty(np.shape(z), dtype=np.complex128)
    out.real = sign * w.real
    out.imag = sign * conj * w.imag
    return complex(out) if scalar else out


def _erf_diagonal(t: float) -> complex:
    """erf(t e^{i pi/4}) for t >= 0, any size.

    On the 45-degree ray |exp(-z^2)| = 1, so the value stays bounded far
    outside the cerf working strip; the guarded wrapper is bypassed.
    """
    return complex(_scipy_erf(t * cmath.exp(0.25j * math.pi)))


# --- scaled erf differences ------------------------------------------------------
#
# a_p_exact needs [erf(z(mu)) - erf(z(mu0))] * exp(z(mu)^2) where z carries
# omega0/sqrt(2 eps) in its imaginary part, far past the overflow line of a
# direct erf call.  Using erf(z) = 1 - exp(-z^2) w(iz) (Re z >= 0, w = wofz,
# bounded in the upper half-plane) each term splits into a unit part and a
# Faddeeva part whose exponents are handled in log-polar form.


def _fad_term(zc: complex, s: float, flip: float, za2: complex):
    """Log-polar term -s*flip * w(i*flip*zc) * exp(za2 - zc^2)."""
    zcf = flip * zc
    w = complex(_wofz(1j * zcf))  # upper half-plane: |w| <= 1, never 0
    coeff = -s * flip
    expo = za2 - zcf * zcf
    return (
        math.log(abs(w)) + expo.real,
        cmath.phase(w) + expo.imag + (0.0 if coeff > 0 else math.pi),
    )


def _scaled_erf_diff(za: complex, zb: complex):
    """Log-polar (log_amp, phase) of [erf(za) - erf(zb)] * exp(za^2).

    With flips s_a, s_b = sign(Re z), erf(z) = s (1 - w(i s z) e^{-z^2}),
    so the unit parts contribute (s_a - s_b) in {0, +-2}: they cancel
    *analytically* when both endpoints lie on one side of the imaginary
    axis -- cancelling them in float under exp(za^2) would wreck every
    digit whenever that factor is large.
    """
    if za == zb:
        return (-math.inf, 0.0)
    za2 = za * za
    flip_a = 1.0 if za.real >= 0 else -1.0
    flip_b = 1.0 if zb.real >= 0 else -1.0
    terms = [_fad_term(za, +1.0, flip_a, za2), _fad_term(zb, -1.0, flip_b, za2)]
    if flip_a != flip_b:
        unit = flip_a - flip_b  # +2 when za is right of the axis, else -2
        terms.append(
            (math.log(2.0) + za2.real, za2.imag + (0.0 if unit > 0 else math.pi))
        )
    return logpolar_sum(terms)


def _wrap_phase(ph: float) -> float:
    if not math.isfinite(ph):
        return 0.0
    return math.remainder(ph, 2.0 * math.pi)


# --- space-time buffer curve -----------------------------------------------------


def stbc_onset_level(s, p: PhysParams) -> float:
    """Default onset level |A_p| for the buffer criterion: sqrt(eps) for the
    periodic source (its Stokes prefactor is O(1) in eps), 1 otherwise."""
    return math.sqrt(p.eps) if isinstance(s, Periodic) else 1.0


def _stbc_defect(s, x, mu, p: PhysParams, regime: str, level: float):
    """F(mu) = mu^2 - RHS(mu); the buffer curve is its zero."""
    if regime == "base":
        g = kernel_g(s, x, mu + 1j * p.omega0, p.d)
        log_pref = math.log(2.0 * math.pi)
    elif regime == "o1":
        # with gamma = 0 the effective heat time is d/eps; the extra 1/eps
        # inside the log is the regime's larger Stokes prefactor
        g = kernel_g(s, x, mu + 1j * p.omega0, p.d / p.eps)
        log_pref = math.log(2.0 * math.pi / p.eps)
    else:
        raise ValueError(f"unknown buffer-curve regime {regime!r}")
    ag = abs(g)
    log_g = math.log(ag) if ag > 0 else -math.inf
    rhs = p.omega0**2 - p.eps * log_pref - 2 * p.eps * log_g + 2 * p.eps * math.log(level)
    return mu * mu - rhs, ag


def mu_stbc(s, x, p: PhysParams, regime: str = "base", level: float = 1.0):
    """Space-time buffer curve: solves mu^2 = w0^2 - eps ln(2 pi) - 2 eps ln|g|.

    Fixed-point iteration seeded at omega0 (the eps-terms make the map a
    small perturbation of the identity), with bisection on
    [omega0/2, 5 omega0] as fallback.  Returns +inf in two situations:
    on nodal lines of the sign-changing source, where g vanishes for
    every mu (cos x is a heat eigenmode, so its zero lines persist) and
    the curve genuinely diverges; and when the defect stays negative up
    to 5 omega0, i.e. the onset falls past the search window.  A tiny
    |g| alone is *not* divergence: far out on a localized source's tail
    |g| drops below any fixed floor while -2 eps ln|g| still balances
    mu^2 at a finite onset, so tail points keep their finite root.
    `level` moves the onset criterion from |A_p| = 1 to |A_p| = level.
    """
    g_floor = 1e-12
    lo, hi = 0.5 * p.omega0, 5.0 * p.omega0

    # persistent nodal lines exist only for the sign-changing source; there
    # |g| < floor across the whole bracket marks a node (up to float fuzz in
    # cos) and no onset happens through this mechanism at any mu
    if isinstance(s, SignChanging):
        g_max = max(
            _stbc_defect(s, x, m, p, regime, level)[1]
            for m in np.linspace(lo, hi, 64)
        )
        if g_max < g_floor:
            return math.inf

    mu = p.omega0
    for _ in range(100):
        f, _ = _stbc_defect(s, x, mu, p, regime, level)
        arg = mu * mu - f
        if not (arg > 0):
            break
        nxt = math.sqrt(arg)
        if not (lo <= nxt <= hi):
            break
        if abs(nxt - mu) <= 1e-14 * (1 + abs(nxt)):
            mu = nxt
            f_check, _ = _stbc_defect(s, x, mu, p, regime, level)
            if abs(f_check) <= 1e-9:
                return mu
            break
        mu = nxt

    # bisection fallback
    f_lo, g_lo = _stbc_defect(s, x, lo, p, regime, level)
    f_hi, g_hi = _stbc_defect(s, x, hi, p, regime, level)
    if f_lo < 0 and f_hi < 0:
        return math.inf  # onset past the search window (or never: nodal line)
    if not (f_lo < 0 < f_hi or f_hi < 0 < f_lo):
        raise ConvergenceError(
            f"buffer-curve defect has no sign change on [{lo:.3g}, {hi:.3g}] at "
            f"x={x:.6g}: F({lo:.3g})={f_lo:.3g}, F({hi:.3g})={f_hi:.3g}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid, _ = _stbc_defect(s, x, mid, p, regime, level)
        if f_mid == 0.0 or hi - lo < 1e-15 * (1 + mid):
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --- homogeneous solution and exit curve ------------------------------------------


def _quadratic_phase(mu: float, p: PhysParams):
    """((mu+i w0)^2 - (mu0+i w0)^2) / (2 eps) as (real part, imag part)."""
    re = (mu * mu - p.mu0 * p.mu0) / (2 * p.eps)
    im = p.omega0 * (mu - p.mu0) / p.eps
    return re, im


def a_h_closed(data, s, x: float, mu: float, p: PhysParams):
    """Homogeneous solution in log-polar form for catalog initial data.

    A_h is the heat evolution of A0 (diffusivity eps^(gamma-1) d in the
    ramp variable) times the exponential of the quadratic phase; the
    phase contributes (mu^2 - mu0^2)/(2 eps) to the log-amplitude, which
    is the whole way-in/way-out story: deeply negative at mu = 0 and back
    to zero at mu = -mu0.
    """
    if mu <= p.mu0:
        raise DomainError(f"a_h_closed needs mu > mu0, got mu={mu}, mu0={p.mu0}")
    tau = mu - p.mu0
    d_eff = p.d * p.eps ** (p.gamma - 1.0)
    qre, qim = _quadratic_phase(mu, p)

    if isinstance(data, QssMultiple):
        z = data.factor * math.sqrt(p.eps) / (p.mu0 + 1j * p.omega0)
        g = kernel_g(s, x, tau, d_eff)
        val = z * g
        if val == 0:
            return (-math.inf, 0.0)
        return (qre + math.log(abs(val)), _wrap_phase(qim + cmath.phase(val)))
    if isinstance(data, Cosine):
        k = data.k
        decay = -d_eff * k * k * tau  # complex: Re decays, Im advects phase
        amp = math.sqrt(2.0) * data.amplitude * math.cos(k * x)
        if amp == 0:
            return (-math.inf, 0.0)
        return (
            qre + decay.real + math.log(abs(amp)),
            _wrap_phase(qim + decay.imag + (0.0 if amp > 0 else math.pi)),
        )
    if isinstance(data, GaussianData):
        w = d_eff * tau + data.width
        val = data.amplitude * np.sqrt(data.width / w) * np.exp(-(x**2) / (4 * w))
        val = complex(val)
        if val == 0:
            return (-math.inf, 0.0)
        return (qre + math.log(abs(val)), _wrap_phase(qim + cmath.phase(val)))
    raise UnsupportedSourceError(
        f"no closed-form homogeneous solution for {type(data).__name__} data; "
        "use the PDE solver"
    )


def mu_h(data, s, x: float, p: PhysParams) -> float:
    """Homogeneous exit-time curve: smallest mu > 0 with log|A_h(x, mu)| = 0.

    To leading order this is -mu0 (the way-in/way-out symmetry of the
    quadratic phase); solving the exact log-amplitude keeps the O(eps)
    and O(eps log eps) corrections the implicit exit-time relation drops.
    Raises NoExitError when |A_h| never regrows inside [0, 3|mu0|+3 w0]
    (e.g. on nodal lines of cosine data); callers map that to +inf.
    """
    if p.mu0 >= 0:
        raise DomainError(f"exit-time curve needs mu0 < 0, got {p.mu0}")
    hi = 3 * abs(p.mu0) + 3 * p.omega0
    n_scan = 600
    mus = np.linspace(0.0, hi, n_scan + 1)
    f_prev = a_h_closed(data, s, x, mus[0], p)[0]
    bracket = None
    for m in mus[1:]:
        f_here = a_h_closed(data, s, x, float(m), p)[0]
        if f_prev < 0 <= f_here:
            bracket = (float(m) - hi / n_scan, float(m), f_prev, f_here)
            break
        f_prev = f_here
    if bracket is None:
        raise NoExitError(
            f"log|A_h(x={x:.6g}, mu)| stays below 0 on [0, {hi:.3g}]"
        )
    lo, hi_b, f_lo, _ = bracket
    for _ in range(200):
        mid = 0.5 * (lo + hi_b)
        f_mid = a_h_closed(data, s, x, mid, p)[0]
        if f_mid == 0.0 or hi_b - lo < 1e-14 * (1 + mid):
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi_b = mid
    return 0.5 * (lo + hi_b)


# --- Hopf curves ---------------------------------------------------------------------


def mu_hopf(s, x: float, p: PhysParams, regime: str = "base") -> float:
    """Delayed Hopf curve: where oscillation first outgrows the QSS.

    base:      mu_Hopf = 2 eps I_a(x)^2 / w0^2;
    large_amp: mu_Hopf = eps^(-1/3) 2 I(x)^(2/3)/(1+alpha^2)^(1/3);
    o1:        fixed point of mu = 2 |A_QSS(x, mu)|^2 with the
               O(1)-diffusivity QSS (gaussian source only).

    In the large-amplitude regime the observed delay trails this curve by
    about omega0 (an empirical diagnostic; the repelling-side analysis
    has two competing saddles and no buffer-curve recipe, so none is
    invented here).
    """
    if regime == "base":
        i_a = float(eval_source(s, x))
        return 2 * p.eps * i_a * i_a / p.omega0**2
    if regime == "large_amp":
        i_a = float(eval_source(s, x))
        return p.eps ** (-1 / 3) * 2.0 * np.cbrt(i_a * i_a) / np.cbrt(1 + p.alpha**2)
    if regime == "o1":
        if not isinstance(s, Gaussian):
            raise UnsupportedSourceError(
                "O(1)-diffusivity Hopf curve needs the gaussian source"
            )
        mu = 2 * abs(_o1_values(x, 0.1, p.d, s.sigma, p, amplitude=s.amplitude)) ** 2
        for _ in range(200):
            nxt = 2 * abs(_o1_values(x, mu, p.d, s.sigma, p, amplitude=s.amplitude)) ** 2
            if abs(nxt - mu) <= 1e-8 * (1 + abs(nxt)):
                return nxt
            mu = nxt
        raise ConvergenceError(
            f"O(1)-diffusivity Hopf fixed point did not settle at x={x:.6g}; "
            f"last iterates {mu:.6g} -> {nxt:.6g}"
        )
    raise ValueError(f"unknown Hopf regime {regime!r}")


# --- exact particular solution (entire kernels) ------------------------------------


def a_p_exact(s, x: float, mu: float, p: PhysParams):
    """Exact linear particular solution in log-polar form.

    Available for the kernels entire in tau (Periodic, SignChanging,
    Algebraic), where the defining integral evaluates through erf in
    closed form.  The exponentially large factor exp((mu+i w0)^2 / 2 eps)
    multiplying the erf difference is never materialized: each term is
    assembled from Faddeeva-function pieces in log-polar arithmetic.
    The buffer curve is the zero level set of the returned log-amplitude.
    """
    if mu == p.mu0:
        return (-math.inf, 0.0)  # the particular solution starts from zero
    se = math.sqrt(2 * p.eps)

    def z_plain(nu):
        return (nu + 1j * p.omega0) / se

    def z_shift(nu):
        return (nu + 1j * p.omega0 - p.eps * p.d) / se

    pref = math.sqrt(math.pi / 2)
    if isinstance(s, Periodic):
        la1, ph1 = _scaled_erf_diff(z_plain(mu), z_plain(p.mu0))
        la2, ph2 = _scaled_erf_diff(z_shift(mu), z_shift(p.mu0))
        c = math.cos(x)
        terms = [(la1 + math.log(pref * s.p1), ph1)]
        if c != 0:
            terms.append(
                (la2 + math.log(pref * s.p2 * abs(c)), ph2 + (0.0 if c > 0 else math.pi))
            )
        la, ph = logpolar_sum(terms)
        return (la, _wrap_phase(ph))
    if isinstance(s, SignChanging):
        c = math.cos(x)
        if c == 0:
            return (-math.inf, 0.0)
        la2, ph2 = _scaled_erf_diff(z_shift(mu), z_shift(p.mu0))
        return (
            la2 + math.log(pref * abs(c)),
            _wrap_phase(ph2 + (0.0 if c > 0 else math.pi)),
        )
    if isinstance(s, Algebraic):
        lam = mu + 1j * p.omega0
        coef = x * x + 2 * p.d * lam
        la1, ph1 = _scaled_erf_diff(z_plain(mu), z_plain(p.mu0))
        terms = []
        if coef != 0:
            terms.append((la1 + math.log(pref * abs(coef)), ph1 + cmath.phase(coef)))
        # boundary terms: 2 d sqrt(eps) (1 - exp((lam^2 - lam0^2)/2 eps))
        b = 2 * p.d * math.sqrt(p.eps)
        qre, qim = _quadratic_phase(mu, p)
        terms.append((math.log(abs(b)), cmath.phase(b)))
        terms.append((math.log(abs(b)) + qre, cmath.phase(-b) + qim))
        la, ph = logpolar_sum(terms)
        return (la, _wrap_phase(ph))
    raise UnsupportedSourceError(
        f"no closed-form particular solution for {type(s).__name__}; "
        "use contour.quad_Bp instead"
    )


# --- transition function -------------------------------------------------------------


def c_transition(mu: float, p: PhysParams) -> complex:
    """Fresnel-type transition factor c(mu) = (1+i) int_0^T e^{-i s^2} ds.

    T = sqrt(w0 mu / eps).  Along the rotated ray the integral is an erf
    on the diagonal, where |erf| stays bounded for every T:
    c = sqrt(pi/2) erf(T e^{i pi/4}).  |c| rises from 0 at mu = 0 toward
    sqrt(pi/2), with the Cornu-spiral ringing of size ~1/(T sqrt(pi))
    about the asymptote.
    """
    if mu < 0:
        raise DomainError(f"transition function defined for mu >= 0, got {mu}")
    t = math.sqrt(p.omega0 * mu / p.eps)
    return math.sqrt(math.pi / 2) * _erf_diagonal(t)


# --- curve assembly -------------------------------------------------------------------


def _curve_over_grid(fn, grid: Grid, threads: int = 1):
    xs = grid.x
    if threads and threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as ex:
            mu = np.array(list(ex.map(fn, xs)))
    else:
        mu = np.array([fn(float(x)) for x in xs])
    return xs, mu


def curve_stbc(s, grid: Grid, p: PhysParams, regime: str = "base", level=None, threads: int = 1) -> CurveSample:
    """mu_stbc sampled on the grid; level defaults per source (see stbc_onset_level)."""
    lvl = stbc_onset_level(s, p) if level is None else level
    xs, mu = _curve_over_grid(lambda x: mu_stbc(s, x, p, regime, lvl), grid, threads)
    return CurveSample(xs, mu, "Stbc")


def curve_h(data, s, grid: Grid, p: PhysParams, threads: int = 1) -> CurveSample:
    """mu_h sampled on the grid; points with no exit become +inf."""

    def one(x):
        try:
            return mu_h(data, s, x, p)
        except NoExitError:
            return math.inf

    xs, mu = _curve_over_grid(one, grid, threads)
    return CurveSample(xs, mu, "HomExit")


def curve_hopf(s, grid: Grid, p: PhysParams, regime: str = "base", threads: int = 1) -> CurveSample:
    xs, mu = _curve_over_grid(lambda x: mu_hopf(s, x, p, regime), grid, threads)
    return CurveSample(xs, mu, "Hopf")


# --- initial-data config --------------------------------------------------------------

_DATA_VARIANTS = {
    "qss_multiple": QssMultiple,
    "cosine": Cosine,
    "gaussian_data": GaussianData,
    "tabulated": Tabulated,
}
_DATA_TAGS = {cls: tag for tag, cls in _DATA_VARIANTS.items()}


def data_from_config(mapping) -> object:
    """Build initial data from a {type, params...} mapping."""
    m = dict(mapping)
    try:
        tag = m.pop("type")
    except KeyError:
        raise ValueError("initial-data spec needs a 'type' key") from None
    try:
        cls = _DATA_VARIANTS[tag]
    except KeyError:
        raise ValueError(
            f"unknown initial-data type {tag!r}; known: {', '.join(sorted(_DATA_VARIANTS))}"
        ) from None
    if cls is QssMultiple and "factor" in m and isinstance(m["factor"], (list, tuple)):
        m["factor"] = complex(m["factor"][0], m["factor"][1])
    if cls is Tabulated:
        return Tabulated(m.get("values", ()))
    try:
        return cls(**m)
    except TypeError as e:
        raise ValueError(f"bad parameters for initial data {tag!r}: {e}") from None


def data_config(data) -> dict:
    d = {"type": _DATA_TAGS[type(data)]}
    if isinstance(data, QssMultiple):
        f = complex(data.factor)
        d["factor"] = f.real if f.imag == 0 else [f.real, f.imag]
    elif isinstance(data, Cosine):
        d.update(n=data.n, amplitude=data.amplitude, ell=data.ell)
    elif isinstance(data, GaussianData):
        d.update(amplitude=data.amplitude, width=data.width)
    elif isinstance(data, Tabulated):
        d["values"] = [[v.real, v.imag] for v in data.values]
    return d

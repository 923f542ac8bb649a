"""Quasi-steady-state expansions for the four scaling regimes.

Away from onset the solution hugs a quasi-steady state obtained by
balancing the instantaneous right-hand side.  One analytic expression
covers both the attracting (mu < 0) and repelling (mu > 0) sides; which
of the two the PDE solution actually follows is a separate question the
delay curves answer.  Each regime below corresponds to one choice of
source/diffusion scaling exponents (beta, gamma):

* base case        beta = 1/2, gamma = 1   -- O(sqrt(eps)) response;
* large amplitude  beta = -1/2             -- O(eps^(-1/6)) response
                   set by the cubic term;
* algebraic source I(x) = x^2 with beta = 1/2 -- inner/outer branches
                   meeting at |x| ~ eps^(-1/4);
* O(1) diffusivity beta = gamma = 0        -- diffusion acts at leading
                   order and the response is non-local.

``qss_residual`` substitutes any of these into the full PDE and reports
the sup-norm defect; its eps-scan slope certifies the truncation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError, Grid, PhysParams, UnsupportedSourceError, second_difference
from .sources import Gaussian, eval_source, eval_source_xx

__all__ = [
    "QssExpansion",
    "qss_base",
    "qss_large_amp",
    "qss_algebraic",
    "qss_O1_diffusivity",
    "qss_residual",
    "base_expansion",
    "large_amp_expansion",
    "algebraic_expansion",
    "o1_expansion",
]

DELTA_DEFAULT = 0.05  # regime cutoff: expansions are ordered for |mu| >= delta


@dataclass(frozen=True)
class QssExpansion:
    """A regime tag, truncation order, and (x, mu) -> complex evaluator.

    The evaluator applies the regime formula verbatim with no |mu| guard,
    so exit-time bookkeeping can reference it across mu = 0; the guarded
    entry points are the qss_* operations.
    """

    regime: str
    order: int
    evaluate: Callable


def _require_regime(mu: float, delta: float):
    if abs(mu) < delta:
        raise DomainError(
            f"out of regime: |mu|={abs(mu):.4g} < delta={delta} (expansion unordered near onset)"
        )


# --- base case ---------------------------------------------------------------


def _base_values(s, x, mu, p: PhysParams, order: int):
    lam = mu + 1j * p.omega0
    i_a = eval_source(s, x)
    a1 = -i_a / lam
    val = math.sqrt(p.eps) * a1
    if order >= 2:
        i_xx = eval_source_xx(s, x)
        tail = (i_a + p.d * lam * i_xx) / lam**3
        cubic = (1 + 1j * p.alpha) * i_a**3 / (lam**2 * (mu**2 + p.omega0**2))
        val = val + p.eps**1.5 * (tail - cubic)
    return val


def qss_base(s, x, mu, p: PhysParams, order: int = 2, delta: float = DELTA_DEFAULT):
    """Base-case QSS: -sqrt(eps) I_a/(mu + i w0) plus both eps^(3/2) corrections.

    Order 1 keeps the sqrt(eps) term; order 2 adds the linear tail
    (I_a + d (mu+i w0) I_a'') / (mu+i w0)^3 and the cubic-induced term
    -(1+i alpha) I_a^3 / ((mu+i w0)^2 (mu^2+w0^2)), leaving an O(eps^(5/2))
    PDE residual.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    _require_regime(mu, delta)
    return _base_values(s, x, mu, p, order)


def base_expansion(s, p: PhysParams, order: int = 2) -> QssExpansion:
    return QssExpansion("base_case", order, lambda x, mu: _base_values(s, x, mu, p, order))


# --- large-amplitude source ---------------------------------------------------


def _large_amp_values(s, x, mu, p: PhysParams, order: int):
    i_a = eval_source(s, x)
    one = (1 - 1j * p.alpha) * np.cbrt(i_a) / (1 + p.alpha**2) ** (2 / 3)
    val = p.eps ** (-1 / 6) * one
    if order >= 1:
        # first correction; mu_R = mu, mu_I = 0 on the real ramp
        mu_r, mu_i = mu, 0.0
        w = p.omega0 + mu_i
        num = (mu_r - 3 * p.alpha**2 * mu_r + 4 * p.alpha * w) + 1j * (
            3 * w - p.alpha**2 * w - 4 * p.alpha * mu_r
        )
        corr = num / (3 * (1 + p.alpha**2) ** (4 / 3) * np.cbrt(i_a))
        val = val + p.eps ** (1 / 6) * corr
    return val


def qss_large_amp(s, x, mu, p: PhysParams, order: int = 1):
    """Large-amplitude QSS set by the cubic balance, O(eps^(-1/6)).

    Order 0 is the cubic-balance root (1 - i alpha) I^(1/3) / (1+alpha^2)^(2/3);
    order 1 adds the eps^(1/3)-relative correction.  The correction carries
    I^(-1/3), so order 1 demands the source stay away from zero.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    if order >= 1:
        floor = 1e-8
        if np.any(np.abs(eval_source(s, x)) < floor):
            raise DomainError(
                f"degenerate source: |I_a| < {floor:g} where the order-1 "
                "correction needs I_a^(-1/3)"
            )
    return _large_amp_values(s, x, mu, p, order)


def large_amp_expansion(s, p: PhysParams, order: int = 1) -> QssExpansion:
    return QssExpansion(
        "large_amplitude", order, lambda x, mu: _large_amp_values(s, x, mu, p, order)
    )


# --- algebraic source I(x) = x^2 ---------------------------------------------


def _algebraic_values(x, mu, p: PhysParams):
    x = np.asarray(x, dtype=float)
    lam = mu + 1j * p.omega0
    inner = -math.sqrt(p.eps) * x**2 / lam
    ax = np.abs(x)
    # outer branch: local cubic balance with I = x^2, plus its first correction
    x23 = np.where(ax > 0, np.cbrt(ax**2), 1.0)  # placeholder 1 where x=0; masked below
    lead = p.eps ** (1 / 6) * x23 * (1 - 1j * p.alpha) / (1 + p.alpha**2) ** (2 / 3)
    corr = (
        p.eps ** (-1 / 6)
        / (3 * (1 + p.alpha**2) ** (4 / 3) * x23)
        * ((3 - p.alpha**2 - 4j * p.alpha) * lam - 2 * mu * (1 + p.alpha**2))
    )
    outer = lead + corr
    x_c = p.eps ** (-0.25)
    w = np.clip((ax - 0.8 * x_c) / (0.4 * x_c), 0.0, 1.0)
    out = (1 - w) * inner + w * outer
    return out if out.ndim else complex(out)


def qss_algebraic(x, mu, p: PhysParams):
    """Two-branch QSS for the algebraic source I(x) = x^2.

    Inner branch -sqrt(eps) x^2/(mu+i w0) for |x| well below eps^(-1/4);
    outer branch is the large-amplitude balance with I = x^2.  The two are
    blended linearly over [0.8, 1.2] eps^(-1/4) to keep the evaluator
    continuous; the blend window is a plotting convenience, not a claim
    about the matching region.
    """
    return _algebraic_values(x, mu, p)


def algebraic_expansion(p: PhysParams) -> QssExpansion:
    return QssExpansion("algebraic", 1, lambda x, mu: _algebraic_values(x, mu, p))


# --- O(1) diffusivity ----------------------------------------------------------


def _o1_values(x, mu, d_hat, sigma, p: PhysParams, amplitude=1.0):
    lam_sq = -(mu + 1j * p.omega0) / d_hat
    lam = np.sqrt(lam_sq)  # principal; Re lam >= 0 for mu < 0
    from .asymptotics import cerf

    pref = 0.5 * amplitude * np.sqrt(np.pi * sigma / (-d_hat * (mu + 1j * p.omega0)))
    pref = pref * np.exp(-sigma * (mu + 1j * p.omega0) / d_hat)
    rt = math.sqrt(sigma) * lam
    x = np.asarray(x, dtype=float)
    c1 = pref * (1 + cerf(x / (2 * math.sqrt(sigma)) - rt))
    c2 = pref * (1 - cerf(x / (2 * math.sqrt(sigma)) + rt))
    out = c1 * np.exp(-lam * x) + c2 * np.exp(lam * x)
    return out if out.ndim else complex(out)


def qss_O1_diffusivity(x, mu, d_hat, sigma, p: PhysParams, delta: float = DELTA_DEFAULT):
    """QSS when diffusion acts at leading order (beta = gamma = 0), Gaussian source.

    Solves d_hat A_xx + (mu + i w0) A = -I_G(x) in closed form:
    c1(x) e^{-lam x} + c2(x) e^{+lam x} with lam = sqrt(-(mu+i w0)/d_hat)
    and erf-type coefficients; c1 -> 0 as x -> -inf and c2 -> 0 as
    x -> +inf, so the response decays in both directions.
    """
    _require_regime(mu, delta)
    return _o1_values(x, mu, d_hat, sigma, p)


def o1_expansion(s, d_hat, p: PhysParams) -> QssExpansion:
    """O(1)-diffusivity expansion; closed form exists for the Gaussian source only."""
    if not isinstance(s, Gaussian):
        raise UnsupportedSourceError(
            f"O(1)-diffusivity QSS has a closed form only for the gaussian "
            f"source, not {type(s).__name__}"
        )
    return QssExpansion(
        "o1_diffusivity",
        0,
        lambda x, mu: _o1_values(x, mu, d_hat, s.sigma, p, amplitude=s.amplitude),
    )


# --- residual certification -----------------------------------------------------


def qss_residual(q: QssExpansion, s, p: PhysParams, mu: float, grid: Grid, h_mu: float = 1e-4):
    """Sup-norm PDE defect of a QSS expansion at ramp value mu.

    Substitutes the evaluator into
        eps A_mu - (mu+i w0) A + (1+i alpha)|A|^2 A - eps^beta I_a - eps^gamma d A_xx
    with a centered finite difference in mu (step h_mu) and the discrete
    zero-flux Laplacian in x, and returns the largest magnitude over the
    grid.  The finite differences keep this check independent of any
    analytic derivatives of the expansion itself.
    """
    x = grid.x
    a0 = np.asarray(q.evaluate(x, mu), dtype=complex)
    a_plus = np.asarray(q.evaluate(x, mu + h_mu), dtype=complex)
    a_minus = np.asarray(q.evaluate(x, mu - h_mu), dtype=complex)
    a_mu = (a_plus - a_minus) / (2 * h_mu)
    lam = mu + 1j * p.omega0
    res = (
        p.eps * a_mu
        - lam * a0
        + (1 + 1j * p.alpha) * np.abs(a0) ** 2 * a0
        - p.eps**p.beta * eval_source(s, x)
        - p.eps**p.gamma * p.d * second_difference(a0, grid.dx)
    )
    return float(np.max(np.abs(res)))

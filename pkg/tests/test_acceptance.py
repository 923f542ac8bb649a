"""Acceptance sweep: twelve numbered end-to-end checks.

Each criterion is one test; conftest.py echoes a `criterion N:
PASS/FAIL` line per test after the run.  The three long PDE ramps live
in module fixtures so the file costs one run each no matter how the
tests are selected.

Expected values come from three places: closed forms evaluated in
place, the independent oracles already frozen in the unit suites
(adaptive quadrature, erf closed forms, the reaction-only onset), and
reference runs of these exact configurations whose numbers are pinned
here as literals.  Criteria with a stated seconds budget assert wall
time too; the budgets hold with >=5x headroom on an ordinary machine.
"""

import cmath
import math
import time
import warnings

import numpy as np
import pytest

from slowhopf.analysis import classify_case, compare_report, exit_times, predicted_exit
from slowhopf.asymptotics import (
    Cosine,
    QssMultiple,
    a_h_closed,
    a_p_exact,
    c_transition,
    curve_stbc,
    mu_hopf,
    mu_stbc,
    stbc_onset_level,
)
from slowhopf.contour import build_contour, integrate_segments, quad_Bp, straight_contour
from slowhopf.core import ExperimentConfig, Grid, PhysParams, from_logpolar, logpolar_sum
from slowhopf.qss import base_expansion, qss_residual
from slowhopf.solver import run
from slowhopf.sources import (
    Algebraic,
    Gaussian,
    Periodic,
    SignChanging,
    SmoothStep,
    eval_source,
    kernel_g,
)

GAUSS = Gaussian(sigma=0.25)
ON_QSS = QssMultiple(factor=-1.0)


def params(**kw):
    base = dict(eps=0.01, omega0=0.5, alpha=0.6, d_R=1.0, mu0=-1.0)
    base.update(kw)
    return PhysParams(**base)


def saddle_kernel(s, x, mu, p):
    return complex(np.asarray(kernel_g(s, x, mu + 1j * p.omega0, p.d)))


# --- 1: the buffer curve solves its own equation -----------------------------------


def test_criterion_01_buffer_curve_satisfies_the_implicit_relation():
    p = params()
    grid = Grid(5.0, 201)
    t0 = time.perf_counter()
    worst = 0.0
    for s in (GAUSS, SmoothStep(i_ave=0.5, i_e=0.125), Periodic(p1=1 / 3, p2=1 / 4)):
        curve = curve_stbc(s, grid, p)
        # the curve marks where the response reaches the source's onset
        # level (sqrt(eps) for the non-localized Periodic, 1 otherwise)
        level = stbc_onset_level(s, p)
        for x, mu in zip(grid.x, curve.mu):
            if not math.isfinite(mu):
                continue
            g = abs(saddle_kernel(s, float(x), mu, p))
            resid = (
                mu * mu
                - p.omega0**2
                + p.eps * math.log(2 * math.pi)
                + 2 * p.eps * (math.log(g) - math.log(level))
            )
            worst = max(worst, abs(resid))
    elapsed = time.perf_counter() - t0
    assert worst <= 1e-8, worst
    assert elapsed < 1.0, elapsed


# --- 2: vanishing diffusion recovers the reaction-only onset -----------------------


def test_criterion_02_small_diffusion_collapses_to_the_reaction_onset():
    p0 = params()
    xs = Grid(2.0, 41).x
    # I_a = exp(-x^2) for sigma = 1/4, so the d -> 0 onset is explicit
    target = np.sqrt(p0.omega0**2 - p0.eps * math.log(2 * math.pi) + 2 * p0.eps * xs**2)
    t0 = time.perf_counter()
    errs = []
    for d in (1e-2, 1e-4, 1e-6):
        p = params(d_R=d)
        errs.append(max(abs(mu_stbc(GAUSS, float(x), p) - t) for x, t in zip(xs, target)))
    elapsed = time.perf_counter() - t0
    assert errs[0] > errs[1] > errs[2], errs
    assert errs[2] <= 1e-6, errs
    assert elapsed < 1.0, elapsed


# --- 3: the Stokes prefactor converges like sqrt(eps) ------------------------------


def test_criterion_03_stokes_prefactor_error_halves_as_eps_quarters():
    x = 0.4
    t0 = time.perf_counter()
    for mu in (0.3, 0.5):  # interior target and the saddle-height endpoint mu = w0
        errs = []
        for eps in (0.04, 0.01, 0.0025):
            p = params(eps=eps)
            parts = integrate_segments(build_contour("Cr", p.mu0, mu, p), GAUSS, x, p)
            # everything short of the trailing ascent arc is the prefactor;
            # at mu = w0 the arc has zero length and is absent entirely
            kept = [
                (q["log_amp"], q["phase"]) for q in parts if q["kind"] != "SteepestAscent"
            ]
            la, ph = logpolar_sum(kept)
            g = saddle_kernel(GAUSS, x, mu, p)
            err = abs(cmath.rect(math.exp(la), ph) - math.sqrt(2 * math.pi) * g)
            errs.append(err / abs(g))
        for coarse, fine in zip(errs, errs[1:]):
            assert 1.7 <= coarse / fine <= 2.3, (mu, errs)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, elapsed


# --- 4: each Stokes half carries half the saddle lobe ------------------------------


def test_criterion_04_stokes_halves_each_carry_the_half_gaussian_weight():
    x, mu = 2.0, 0.3
    half = math.sqrt(math.pi / 2)
    t0 = time.perf_counter()
    for eps, envelope in ((0.01, 0.15), (0.0025, 0.08)):
        p = params(eps=eps)
        parts = integrate_segments(build_contour("Cr", p.mu0, mu, p), GAUSS, x, p)
        g = abs(saddle_kernel(GAUSS, x, mu, p))
        ratios = [
            math.exp(q["log_amp"]) / g for q in parts if q["kind"].startswith("Stokes")
        ]
        assert len(ratios) == 2
        for ratio in ratios:
            assert abs(ratio - half) / half <= envelope, (eps, ratios)
    elapsed = time.perf_counter() - t0
    assert elapsed < 10.0, elapsed


# --- 5: quadrature equals the closed forms for entire kernels ----------------------


def test_criterion_05_quadrature_reproduces_the_entire_kernel_closed_forms():
    p = params()
    stops = [(-0.5, None), (-0.2, None), (0.1, "Cr"), (0.3, "Cr"), (0.6, "C")]
    t0 = time.perf_counter()
    for s, x in (
        (Periodic(p1=1 / 3, p2=1 / 4), 0.7),
        (SignChanging(), 0.3),
        (Algebraic(), 1.3),
    ):
        for mu, kind in stops:
            path = (
                straight_contour(p.mu0, mu)
                if kind is None
                else build_contour(kind, p.mu0, mu, p)
            )
            la, _ = quad_Bp(path, s, x, p)
            la_ref, _ = a_p_exact(s, x, mu, p)
            assert abs(la - la_ref) <= 1e-6 * max(1.0, abs(la_ref)), (
                type(s).__name__,
                mu,
                la,
                la_ref,
            )
    elapsed = time.perf_counter() - t0
    assert elapsed < 20.0, elapsed


# --- 6: the expansion residual gains an eps per order ------------------------------


def test_criterion_06_expansion_residual_slopes_match_their_orders():
    grid = Grid(5.0, 1601)
    eps_list = [0.01 * 0.5**k for k in range(5)]
    t0 = time.perf_counter()
    for order, expected in ((1, 1.5), (2, 2.5)):
        res = []
        for eps in eps_list:
            p = params(eps=eps)
            q = base_expansion(GAUSS, p, order=order)
            res.append(qss_residual(q, GAUSS, p, -1.0, grid))
        slope = np.polyfit(np.log(eps_list), np.log(res), 1)[0]
        assert abs(slope - expected) <= 0.15, (order, slope, res)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, elapsed


# --- 7: strong-forcing onset shift ------------------------------------------------


def test_criterion_07_strong_forcing_shift_coefficients_and_decay_rates():
    cases = [
        (0.2, 0.25, 0.6, 2.8655, 2 / 3),
        (0.5, 4.0, math.sqrt(7.0), 2.9240, 1 / 24),
        (1.0, 0.25, 0.6, 8.3788, 2 / 3),
    ]
    t0 = time.perf_counter()
    for amp, sigma, alpha, coef, decay in cases:
        p = params(alpha=alpha, beta=-0.5)
        s = Gaussian(sigma=sigma, amplitude=amp)
        at_center = mu_hopf(s, 0.0, p, "large_amp")
        assert abs(at_center - coef) <= 1e-4, (amp, at_center)
        x = 1.3
        ratio = mu_hopf(s, x, p, "large_amp") / at_center
        assert ratio == pytest.approx(math.exp(-decay * x * x), rel=1e-10)
    elapsed = time.perf_counter() - t0
    assert elapsed < 0.1, elapsed


# --- 8: deep-start ramp follows the buffer curve -----------------------------------


@pytest.fixture(scope="module")
def deep_ramp():
    """Deep start on the expansion, sharp source, complex diffusion."""
    p = PhysParams(eps=0.01, omega0=0.5, alpha=0.0, d_R=3.0, d_I=1.0, mu0=-1.5)
    grid = Grid(30.0, 601)
    cfg = ExperimentConfig(p, grid, GAUSS, ON_QSS, mu_end=0.9, dt=0.01, record_every=0.005)
    traj = run(cfg)
    measured = exit_times(traj, base_expansion(GAUSS, p), threshold=0.1)
    pred = predicted_exit(GAUSS, ON_QSS, p, grid)
    return compare_report(pred, measured, tolerance=0.05)


def test_criterion_08_deep_start_measured_exits_track_the_buffer_curve(deep_ramp):
    table = deep_ramp
    assert all(w == "Stbc" for w in table.winner)
    window = np.abs(table.x) <= 20.0
    assert np.all(np.isfinite(table.diff[window]))
    assert np.max(np.abs(table.diff[window])) <= 0.05, table.summary
    # both curves bottom out at the source peak.  The prediction does so
    # exactly; the measured dip is widened sideways by the growth-rate
    # deficit the expansion amplitude imposes, so its argmin is pinned
    # near the peak with the center value within a hair of the minimum.
    assert abs(table.x[int(np.argmin(table.mu_pred))]) <= 1e-9
    meas = np.where(np.isfinite(table.mu_meas), table.mu_meas, np.inf)
    assert abs(table.x[int(np.argmin(meas))]) <= 5.0
    center = int(np.argmin(np.abs(table.x)))
    assert table.mu_meas[center] - meas.min() <= 0.04


# --- 9: mixed case — central buffer region, flat outer exits -----------------------


@pytest.fixture(scope="module")
def cosine_ramp():
    """Order-one cosine data riding over a sharp Gaussian source."""
    p = PhysParams(eps=0.01, omega0=0.5, alpha=0.6, d_R=3.0, d_I=1.0, mu0=-1.2)
    grid = Grid(50.0, 1001)
    data = Cosine(n=10, amplitude=1.0, ell=50.0)
    cfg = ExperimentConfig(p, grid, GAUSS, data, mu_end=1.4, dt=0.01, record_every=0.005)
    measured = exit_times(run(cfg), base_expansion(GAUSS, p), threshold=0.1)
    report = classify_case(predicted_exit(GAUSS, data, p, Grid(50.0, 251)), p)
    return grid, measured, report


def test_criterion_09_crossover_location_and_outer_exit_plateau(cosine_ramp):
    grid, measured, report = cosine_ramp
    assert report.case == 2
    assert len(report.crossovers) == 2
    for c in report.crossovers:
        assert abs(abs(c) - 37.1) <= 1.0, report.crossovers
    band = (np.abs(grid.x) >= 40.0) & (np.abs(grid.x) <= 48.0)
    seed = np.abs(np.cos(np.pi * grid.x[band] / 5.0))
    # where the cosine data carries weight the exits lock to -mu0
    live = measured.mu_exit[band][seed >= 0.3]
    assert live.size > 0 and np.all(np.isfinite(live))
    assert np.all(np.abs(live - 1.2) <= 0.05), (live.min(), live.max())
    # on its nodal lines nothing survives the dive and the exit is pushed
    # past the end of the ramp
    assert np.all(measured.mu_exit[band][seed < 0.05] > 1.25)


# --- 10: shallow starts split by what survives the dive ----------------------------


@pytest.fixture(scope="module")
def shallow_cosine_ramp():
    """Shallow start with order-one data that survives to the far side."""
    p = PhysParams(eps=0.01, omega0=0.5, alpha=0.6, d_R=1.0, mu0=-0.2)
    grid = Grid(12.5, 251)
    data = Cosine(n=1, amplitude=1.0, ell=12.5)
    cfg = ExperimentConfig(p, grid, GAUSS, data, mu_end=0.3, dt=0.005, record_every=0.005)
    measured = exit_times(run(cfg), base_expansion(GAUSS, p), threshold=0.05)
    return grid, measured


@pytest.fixture(scope="module")
def shallow_qss_ramp():
    """Shallow start sitting on the expansion itself, at omega0 = 1."""
    p = PhysParams(eps=0.01, omega0=1.0, alpha=0.6, d_R=1.0, mu0=-0.2)
    grid = Grid(50.0, 1001)
    cfg = ExperimentConfig(p, grid, GAUSS, ON_QSS, mu_end=2.25, dt=0.004, record_every=0.005)
    with warnings.catch_warnings():
        # omega0 = 1 sits on the edge of the stepper's comfort note; this
        # dt reproduces a dt=0.002, n=2001 reference run to three digits
        warnings.simplefilter("ignore", UserWarning)
        traj = run(cfg)
    measured = exit_times(traj, base_expansion(GAUSS, p), threshold=0.1)
    return grid, p, measured


def test_criterion_10_shallow_start_exits_depend_on_the_initial_data(
    shallow_cosine_ramp, shallow_qss_ramp
):
    # surviving order-one data: symmetric exit at -mu0 over the center
    grid_a, measured_a = shallow_cosine_ramp
    center_a = int(np.argmin(np.abs(grid_a.x)))
    assert abs(measured_a.mu_exit[center_a] - 0.2) <= 0.03, measured_a.mu_exit[center_a]
    # starting on the expansion leaves nothing to re-emerge, so the
    # symmetric exit never happens; the outer wings lock to the buffer
    # curve instead
    grid_b, p_b, measured_b = shallow_qss_ramp
    center_b = int(np.argmin(np.abs(grid_b.x)))
    assert abs(measured_b.mu_exit[center_b] - 0.2) > 0.03, measured_b.mu_exit[center_b]
    band = (np.abs(grid_b.x) >= 38.0) & (np.abs(grid_b.x) <= 48.0)
    stbc = np.array([mu_stbc(GAUSS, float(x), p_b) for x in grid_b.x[band]])
    rel = measured_b.mu_exit[band] / stbc - 1.0
    assert np.all(np.isfinite(rel))
    assert np.max(np.abs(rel)) <= 0.10, (rel.min(), rel.max())


# --- 11: transition constant and the mu = 0 response -------------------------------


def test_criterion_11_transition_constant_rise_and_small_mu_response():
    p = params(omega0=1.0)
    target = math.sqrt(math.pi / 2)
    t0 = time.perf_counter()
    mods = np.array([abs(c_transition(t * t * p.eps, p)) for t in np.arange(0.0, 12.0, 0.01)])
    first = int(np.argmax(mods >= target))
    assert first > 0  # the asymptote is actually attained...
    assert np.all(np.diff(mods[: first + 1]) > -1e-6)  # ...by a monotone climb
    # at mu = 0 the response reduces to sqrt(eps) i I_a / w0 to relative O(eps)
    x = 1.0
    rels = []
    for eps in (0.01, 0.0025):
        pq = params(eps=eps)
        la, ph = quad_Bp(build_contour("AppendixB", pq.mu0, 0.0, pq), GAUSS, x, pq)
        val = cmath.rect(math.exp(la), ph)
        lead = math.sqrt(eps) * 1j * eval_source(GAUSS, x) / pq.omega0
        rels.append(abs(val - lead) / abs(lead))
        assert rels[-1] <= 10.0 * eps, rels
    assert rels[0] / rels[1] >= 3.0, rels  # shrinks linearly, not as sqrt(eps)
    elapsed = time.perf_counter() - t0
    assert elapsed < 5.0, elapsed


# --- 12: the time stepper is second order on the linear ramp -----------------------


def test_criterion_12_dt_halving_cuts_the_linear_ramp_error_fourfold():
    p = params(omega0=0.75, alpha=0.3)
    s = Periodic(p1=1 / 3, p2=1 / 4)
    grid = Grid(math.pi, 1021)
    mu_end = -0.7
    t0 = time.perf_counter()
    ref = np.array(
        [
            from_logpolar(*a_h_closed(ON_QSS, s, x, mu_end, p))
            + from_logpolar(*a_p_exact(s, x, mu_end, p))
            for x in grid.x
        ]
    )
    errs = []
    for dt in (0.08, 0.04, 0.02):
        cfg = ExperimentConfig(p, grid, s, ON_QSS, mu_end=mu_end, dt=dt, cubic=False)
        errs.append(np.max(np.abs(run(cfg).snapshots[-1][1].values - ref)))
    slopes = np.log2(np.asarray(errs[:-1]) / np.asarray(errs[1:]))
    elapsed = time.perf_counter() - t0
    assert np.all(np.abs(slopes - 2.0) <= 0.2), (errs, slopes)
    assert elapsed < 60.0, elapsed

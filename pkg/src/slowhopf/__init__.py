"""Slow passage through a Hopf bifurcation in the cubic CGL equation.

The package simulates the slowly ramped complex Ginzburg-Landau equation

    A_t = (mu + i omega0) A - (1 + i alpha) |A|^2 A
          + eps**beta * I_a(x) + eps**gamma * d * A_xx,      mu_t = eps,

and computes, independently of the simulation, the asymptotic curves that
predict where and when the solution leaves the quasi-steady state: the
space-time buffer curve mu_stbc(x), the homogeneous exit-time curve
mu_h(x), and the Hopf curve mu_Hopf(x).  Contour quadrature of the exact
linear particular solution provides a third, independent cross-check.
"""

from .core import (
    ComplexField,
    ConvergenceError,
    DivergenceError,
    DomainError,
    ExperimentConfig,
    Grid,
    PhysParams,
    UnsupportedSourceError,
    laplacian_neumann,
    mu_of_t,
)
from .sources import (
    Algebraic,
    Constant,
    Gaussian,
    Periodic,
    SignChanging,
    SmoothStep,
    eval_source,
    kernel_g,
    source_from_config,
)
from .qss import (
    QssExpansion,
    base_expansion,
    large_amp_expansion,
    algebraic_expansion,
    o1_expansion,
    qss_residual,
)
from .asymptotics import (
    Cosine,
    CurveSample,
    GaussianData,
    NoExitError,
    QssMultiple,
    Tabulated,
    a_h_closed,
    a_p_exact,
    c_transition,
    cerf,
    curve_h,
    curve_hopf,
    curve_stbc,
    data_from_config,
    mu_h,
    mu_hopf,
    mu_stbc,
)
from .contour import (
    ContourPath,
    Segment,
    build_contour,
    quad_Bp,
    straight_contour,
)
from .solver import (
    Trajectory,
    initial_values,
    read_snapshots,
    run,
    step_strang,
    write_snapshots,
    write_trajectory_csv,
)
from .analysis import (
    CaseReport,
    ComparisonTable,
    ExitProfile,
    PredictedExit,
    classify_case,
    compare_report,
    dispersion,
    exit_times,
    predicted_exit,
)

__version__ = "0.1.0"

"""End-to-end checks of the command-line front end.

Everything here drives `main(argv)` in-process and inspects exit codes,
stderr, and the artifact files.  Numeric spot values are frozen from the
library operations, which carry their own oracle tests; what this module
guards is the plumbing: config resolution, echo round-trips, determinism
across runs and thread counts, and the exit-code contract (0 success,
2 bad config/flags, 3 numerical failure, 64 unknown command).
"""

import csv
import json
import math
import subprocess
import sys

import pytest

from slowhopf.cli import load_spec, main, preset_names
from slowhopf.solver import read_snapshots

BROAD_GAUSSIAN = """\
[params]
eps = 0.01
omega0 = 0.5
alpha = 0.0
d_R = 1.0
mu0 = -1.0

[source]
type = "gaussian"
sigma = 1.0

[initial_data]
type = "qss_multiple"
factor = -1.0

[sim]
half_length = 30.0
n_points = 61
mu_end = 1.0
"""

# Small deep-start domain that a simulate/report pair can finish in ~1 s.
TINY_SHARP = """\
[params]
eps = 0.01
omega0 = 0.5
alpha = 0.0
d_R = 3.0
d_I = 1.0
mu0 = -1.5

[source]
type = "gaussian"
sigma = 0.25

[initial_data]
type = "qss_multiple"
factor = -1.0

[sim]
half_length = 6.0
n_points = 61
mu_end = 0.62
dt = 0.01
"""


def write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_curve(path):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    return {float(r["x"]): (float(r["mu"]), r["kind"]) for r in rows}


# --- dispatch and exit codes -------------------------------------------------------


def test_help_goes_to_stdout_and_succeeds(capsys):
    assert main(["--help"]) == 0
    captured = capsys.readouterr()
    assert "usage: slowhopf" in captured.out
    assert captured.err == ""


def test_unknown_command_prints_usage_and_exits_64(capsys):
    assert main(["transmogrify"]) == 64
    captured = capsys.readouterr()
    assert "unknown command 'transmogrify'" in captured.err
    assert "usage: slowhopf" in captured.err


def test_bare_invocation_is_a_usage_error(capsys):
    assert main([]) == 64
    assert "usage: slowhopf" in capsys.readouterr().err


def test_flag_errors_exit_2(tmp_path):
    cfg = write(tmp_path, BROAD_GAUSSIAN)
    # argparse rejects: missing config source, conflicting sources, bad int
    assert main(["curves"]) == 2
    assert main(["curves", "--config", cfg, "--preset", "x"]) == 2
    assert main(["curves", "--config", cfg, "--threads", "zero"]) == 2
    assert main(["curves", "--config", cfg, "--threads", "0"]) == 2


def test_console_script_is_wired_up():
    proc = subprocess.run(
        [sys.executable, "-m", "slowhopf.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "commands:" in proc.stdout


BAD_CONFIGS = [
    ("missing params", "[source]\ntype = 'gaussian'\nsigma = 1.0\n"),
    ("unknown section", BROAD_GAUSSIAN + "\n[extras]\nknob = 1\n"),
    ("unknown sim key", BROAD_GAUSSIAN.replace("mu_end = 1.0", "mu_end = 1.0\nstep = 3")),
    ("unknown source type", BROAD_GAUSSIAN.replace('"gaussian"', '"vortex"')),
    ("unknown data type", BROAD_GAUSSIAN.replace('"qss_multiple"', '"ramp"')),
    ("negative dt", BROAD_GAUSSIAN.replace("mu_end = 1.0", "mu_end = 1.0\ndt = -0.1")),
    ("float n_points", BROAD_GAUSSIAN.replace("n_points = 61", "n_points = 61.0")),
    ("eps as string", BROAD_GAUSSIAN.replace("eps = 0.01", "eps = 'small'")),
    ("broken toml", "[params\neps = 0.01\n"),
]


@pytest.mark.parametrize("label,text", BAD_CONFIGS, ids=[b[0] for b in BAD_CONFIGS])
def test_invalid_configs_exit_2(tmp_path, capsys, label, text):
    cfg = write(tmp_path, text)
    assert main(["curves", "--config", cfg]) == 2
    assert capsys.readouterr().err.startswith("slowhopf curves:")


def test_unreadable_config_exits_2(tmp_path, capsys):
    assert main(["curves", "--config", str(tmp_path / "nope.toml")]) == 2
    assert "nope.toml" in capsys.readouterr().err


def test_unknown_preset_lists_the_known_ones(capsys):
    assert main(["curves", "--preset", "case9-imaginary"]) == 2
    err = capsys.readouterr().err
    assert "case9-imaginary" in err
    assert "case1-gaussian-broad" in err


def test_simulate_requires_mu_end(tmp_path, capsys):
    text = BROAD_GAUSSIAN.replace("mu_end = 1.0\n", "")
    cfg = write(tmp_path, text)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "mu_end" in capsys.readouterr().err


def test_simulate_rejects_zero_diffusivity(tmp_path, capsys):
    cfg = write(tmp_path, BROAD_GAUSSIAN.replace("d_R = 1.0", "d_R = 0.0"))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "d_R" in capsys.readouterr().err


def test_blowup_exits_3(tmp_path, capsys):
    text = TINY_SHARP.replace("mu_end = 0.62", "mu_end = 2.0\ncubic = false")
    text = text.replace("n_points = 61", "n_points = 31").replace("half_length = 6.0", "half_length = 5.0")
    cfg = write(tmp_path, text)
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
    assert "numerical failure" in capsys.readouterr().err


# --- curves ------------------------------------------------------------------------


@pytest.fixture()
def curve_dir(tmp_path):
    cfg = write(tmp_path, BROAD_GAUSSIAN)
    out = tmp_path / "out"
    assert main(["curves", "--config", cfg, "--out", str(out)]) == 0
    return cfg, out


def test_curves_writes_all_three_samplings(curve_dir):
    _, out = curve_dir
    stbc = read_curve(out / "curve_stbc.csv")
    hom = read_curve(out / "curve_h.csv")
    hopf = read_curve(out / "curve_hopf.csv")
    assert len(stbc) == len(hom) == len(hopf) == 61
    assert {k for _, k in stbc.values()} == {"Stbc"}
    assert {k for _, k in hom.values()} == {"HomExit"}
    assert {k for _, k in hopf.values()} == {"Hopf"}


def test_curves_center_value_and_shape(curve_dir):
    # Frozen from the buffer-curve operation, which test_asymptotics holds
    # to its defining implicit relation at 1e-8.
    _, out = curve_dir
    stbc = read_curve(out / "curve_stbc.csv")
    assert abs(stbc[0.0][0] - 0.48591962523780152) < 1e-12
    assert 0.48 <= stbc[0.0][0] <= 0.50
    xs = sorted(stbc)
    mus = [stbc[x][0] for x in xs]
    center = xs.index(0.0)
    assert all(a > b for a, b in zip(mus[:center], mus[1:center + 1]))
    assert all(b > a for a, b in zip(mus[center:], mus[center + 1:]))


def test_curves_use_17_digit_floats(curve_dir):
    _, out = curve_dir
    body = (out / "curve_stbc.csv").read_text()
    assert "0.48591962523780152" in body


def test_identical_runs_and_thread_counts_are_byte_identical(curve_dir, tmp_path):
    cfg, out = curve_dir
    again = tmp_path / "again"
    assert main(["curves", "--config", cfg, "--out", str(again), "--threads", "3"]) == 0
    for name in ("curve_stbc.csv", "curve_h.csv", "curve_hopf.csv", "effective_config.toml"):
        assert (out / name).read_bytes() == (again / name).read_bytes()


def test_effective_config_reproduces_itself_and_the_outputs(curve_dir, tmp_path):
    _, out = curve_dir
    echo = out / "effective_config.toml"
    redo = tmp_path / "redo"
    assert main(["curves", "--config", str(echo), "--out", str(redo)]) == 0
    assert (redo / "effective_config.toml").read_bytes() == echo.read_bytes()
    assert (redo / "curve_stbc.csv").read_bytes() == (out / "curve_stbc.csv").read_bytes()


# --- simulate and report ------------------------------------------------------------


def test_degenerate_ramp_records_the_initialesnapshot_only(tmp_path):
    text = TINY_SHARP.replace("mu_end = 0.62", "mu_end = -1.5")
    cfg = write(tmp_path, text)
    out = tmp_path / "o"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    _, grid, snaps = read_snapshots(out / "snapshots.dhb")
    assert len(snaps) == 1
    assert snaps[0][0] == -1.5
    with open(out / "trajectory.csv") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == grid.n_points
    assert {r["mu"] for r in rows} == {"-1.5"}


@pytest.fixture(scope="module")
def sim_artifacts(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("simrep")
    cfg = write(tmp, TINY_SHARP)
    out = tmp / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    return cfg, out


def test_simulate_writes_both_artifact_forms(sim_artifacts):
    _, out = sim_artifacts
    p, grid, snaps = read_snapshots(out / "snapshots.dhb")
    assert p.mu0 == -1.5 and grid.n_points == 61
    assert snaps[-1][0] == pytest.approx(0.62)
    assert (out / "trajectory.csv").read_text().startswith("mu,x,re_A,im_A\n")


def test_report_reuses_existing_snapshots(sim_artifacts):
    cfg, out = sim_artifacts
    marker = out / "trajectory.csv"
    marker.unlink()  # reuse goes through snapshots.dhb; no re-simulation
    assert main(["report", "--config", cfg, "--out", str(out)]) == 0
    assert not marker.exists()
    summary = json.loads((out / "report.json").read_text())
    assert summary["n_compared"] == 61
    assert summary["max_abs_diff"] <= 0.08
    assert summary["fraction_within_tolerance"] >= 0.8
    with open(out / "report.csv") as f:
        header = f.readline().strip()
    assert header == "x,mu_pred,mu_meas,diff,winner"


def test_report_from_scratch_matches_the_composed_path(sim_artifacts, tmp_path):
    cfg, out = sim_artifacts
    solo = tmp_path / "solo"
    assert main(["report", "--config", cfg, "--out", str(solo)]) == 0
    assert (solo / "report.csv").read_bytes() == (out / "report.csv").read_bytes()
    assert (solo / "trajectory.csv").exists()  # scratch path re-simulates


def test_report_refuses_foreign_artifacts(sim_artifacts, tmp_path, capsys):
    _, out = sim_artifacts
    other = write(tmp_path, TINY_SHARP.replace("mu0 = -1.5", "mu0 = -1.4"), "other.toml")
    assert main(["report", "--config", other, "--out", str(out)]) == 2
    assert "different configuration" in capsys.readouterr().err


# --- verification suites -------------------------------------------------------------


def test_verify_qss_scan_slopes_match_the_truncation_orders(tmp_path):
    cfg = write(tmp_path, TINY_SHARP)
    out = tmp_path / "vq"
    assert main(["verify-qss", "--config", cfg, "--out", str(out)]) == 0
    scans = json.loads((out / "qss_scan.json").read_text())["scans"]
    by_label = {s["label"]: s for s in scans}
    assert set(by_label) == {"base-order-1", "base-order-2"}
    assert by_label["base-order-1"]["slope"] == pytest.approx(1.5, abs=0.2)
    assert by_label["base-order-2"]["slope"] == pytest.approx(2.5, abs=0.2)
    for s in scans:
        assert len(s["pairs"]) == 5
        errs = [q["error"] for q in s["pairs"]]
        assert errs == sorted(errs, reverse=True)  # smaller eps, smaller residual


def test_verify_contour_report_and_scan(tmp_path):
    cfg = write(tmp_path, BROAD_GAUSSIAN)
    out = tmp_path / "vc"
    assert main(["verify-contour", "--config", cfg, "--out", str(out)]) == 0
    rows = json.loads((out / "contour_report.json").read_text())
    assert len(rows) == 4
    for row in rows[1:3]:  # the two saddle halves carry the sqrt(pi/2) g value
        assert row["rel_error"] < 0.5
    assert rows[3]["rel_error"] is None
    scan = json.loads((out / "contour_scan.json").read_text())["scans"][0]
    assert 0.35 <= scan["slope"] <= 0.65  # prefactor error shrinks like sqrt(eps)
    errs = [q["error"] for q in scan["pairs"]]
    assert errs == sorted(errs, reverse=True)


def test_verify_contour_respects_branch_preconditions(tmp_path, capsys):
    # Strongly complex diffusivity drags the path into the kernel's cut.
    cfg = write(tmp_path, TINY_SHARP)
    out = tmp_path / "vc2"
    assert main(["verify-contour", "--config", cfg, "--out", str(out)]) == 2
    assert "branch" in capsys.readouterr().err


# --- classify ------------------------------------------------------------------------


def test_classify_buffer_dominated_configuration(tmp_path):
    cfg = write(tmp_path, BROAD_GAUSSIAN)
    out = tmp_path / "cl"
    assert main(["classify", "--config", cfg, "--out", str(out)]) == 0
    payload = json.loads((out / "classification.json").read_text())
    assert payload["case"] == 1
    assert payload["crossovers"] == []
    assert payload["winner_counts"] == {"Stbc": 61}


def test_classify_shallow_start(tmp_path):
    text = """\
[params]
eps = 0.01
omega0 = 0.5
alpha = 0.6
d_R = 1.0
mu0 = -0.2

[source]
type = "gaussian"
sigma = 0.25

[initial_data]
type = "cosine"
n = 1
amplitude = 1.0
ell = 12.5

[sim]
half_length = 12.5
n_points = 41
"""
    cfg = write(tmp_path, text)
    out = tmp_path / "cl4"
    assert main(["classify", "--config", cfg, "--out", str(out)]) == 0
    assert json.loads((out / "classification.json").read_text())["case"] == 4


# --- presets -------------------------------------------------------------------------


def test_all_presets_resolve_and_can_run(tmp_path):
    names = preset_names()
    assert len(names) == 8
    for name in names:
        spec = load_spec(preset=name)
        assert spec.mu_end is not None and spec.mu_end > 0
        assert spec.params.d_R > 0


def test_preset_spot_values():
    shallow = load_spec(preset="case4-shallow-start")
    assert shallow.params.omega0 == 1.0
    assert shallow.params.mu0 == -0.2
    assert shallow.grid.half_length == 50.0
    waves = load_spec(preset="periodic-hopf-curve")
    assert waves.params.omega0 == pytest.approx(2.0 / 3.0)
    assert math.isclose(waves.grid.half_length, 10.0 * math.pi)
    pulse = load_spec(preset="case3-gaussian-pulse")
    assert pulse.params.eps == 0.02
    assert pulse.data.amplitude == -20.0

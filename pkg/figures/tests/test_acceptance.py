"""Figure-regeneration acceptance: render all three kinds from real experiment
CSVs produced by the scanfdr CLI, with the coincidence check done numerically
before rendering.

Requires the scanfdr package (the primary component) to be installed; it is
driven purely through its command-line interface and CSV files.
"""

import csv
import math
import shutil
import subprocess
import sys

import pytest

from figures.render import FigureSpec, read_summary, render

MASTER_SEED = 20240801

SCANFDR = shutil.which("scanfdr") or [sys.executable, "-m", "scanfdr.cli"]


def run_scanfdr(*args):
    cmd = ([SCANFDR] if isinstance(SCANFDR, str) else list(SCANFDR)) + list(args)
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, f"scanfdr failed: {proc.stderr}"


@pytest.fixture(scope="module")
def experiment_csvs(tmp_path_factory):
    """Criterion-7 (normal, n=2000) and criterion-5 (Cauchy, n=4000) runs plus
    the Cauchy G-curve, generated through the primary CLI."""
    root = tmp_path_factory.mktemp("csvs")
    run_scanfdr(
        "experiment", "--model", "normal", "--mu", "4", "--eps", "0.05",
        "--alpha", "0.1", "--n-grid", "2000", "--reps", "100",
        "--seed", str(MASTER_SEED), "--workers", "2", "--output", str(root / "normal"),
    )
    run_scanfdr(
        "experiment", "--model", "cauchy", "--mu", "37", "--eps", "0.1",
        "--alpha", "0.1", "--n-grid", "4000", "--reps", "100",
        "--seed", str(MASTER_SEED), "--workers", "2", "--output", str(root / "cauchy"),
    )
    run_scanfdr(
        "gcurve", "--model", "cauchy", "--mu", "37", "--eps", "0.1",
        "--alpha", "0.1", "--points", "1001", "--output", str(root / "gcurve.csv"),
    )
    return root


def test_criterion_11_figure_regeneration(experiment_csvs, tmp_path):
    root = experiment_csvs

    # numeric coincidence check on the normal model, before any rendering:
    # per point, the BH and scan series differ by less than twice the combined SE
    data = read_summary(root / "normal" / "summary.csv")
    by_method = {
        m: i for i, m in enumerate(data["method"])
    }
    assert set(by_method) == {"bh", "scan"}
    max_gap_ok = True
    for prefix in ("fdp", "fnp"):
        for n in sorted(set(data["n"])):
            rows = {
                data["method"][i]: (data[f"mean_{prefix}"][i], data[f"se_{prefix}"][i])
                for i in range(len(data["method"]))
                if data["n"][i] == n
            }
            gap = abs(rows["bh"][0] - rows["scan"][0])
            combined_se = math.hypot(rows["bh"][1], rows["scan"][1])
            if not gap < 2.0 * combined_se:
                max_gap_ok = False

    rendered = []
    for kind, source in [
        ("gcurve", root / "gcurve.csv"),
        ("fdp_vs_n", root / "cauchy" / "summary.csv"),
        ("fnp_vs_n", root / "cauchy" / "summary.csv"),
        ("fdp_vs_n", root / "normal" / "summary.csv"),
        ("fnp_vs_n", root / "normal" / "summary.csv"),
    ]:
        out = tmp_path / f"{source.parent.name}_{kind}.png"
        render(FigureSpec(kind=kind, input_csv=source, output_image=out))
        rendered.append(out.exists() and out.stat().st_size > 0)

    ok = max_gap_ok and all(rendered)
    print(
        f"[criterion 11] {'PASS' if ok else 'FAIL'} - rendered {sum(rendered)}/5 figures; "
        f"normal-model BH/scan series gap < 2*SE per point: {max_gap_ok}"
    )
    assert ok

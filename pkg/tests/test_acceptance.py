"""End-to-end reproduction checks.

Each criterion prints one ``[PASS]``/``[FAIL]`` line straight to the terminal
(even under output capture) and then asserts.  The last test drives the
installed command line, which reruns criteria 1 to 9 in a fresh process.
"""
import subprocess
import sys
import time

import pytest

from akgeo import acceptance
from akgeo.acceptance import CRITERIA, format_result


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print("\n" + format_result(result))
    assert result.passed, result.detail


def test_criterion_10_command_exits_zero(capsys):
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "akgeo.cli", "paper-check"], capture_output=True, text=True, timeout=300
    )
    elapsed = time.perf_counter() - start
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("[")]
    ok = proc.returncode == 0 and len(lines) == 9 and all(ln.startswith("[PASS]") for ln in lines)
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\n[{status}] criterion 10: command runs criteria 1-9 and exits 0: "
              f"exit {proc.returncode}, {len(lines)} lines, {elapsed:.1f} s")
    assert ok, proc.stdout + proc.stderr


def test_random_points_cover_both_phases():
    pts = acceptance.random_points()
    assert len(pts) == 20
    on_axis = sum(t[3] == 0.0 for t in pts)
    assert 0 < on_axis < 20

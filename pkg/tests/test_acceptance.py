"""The advertised acceptance criteria, one test each, at their stated
tolerances and runtime budgets.  Each test prints the same pass/fail line
that the `verify` subcommand reports (visible under pytest -s)."""

import time

import pytest

from dirac_spectra import acceptance, cli

# seconds; criterion 6 covers eight full-window scans plus refinements
BUDGETS = {1: 1.0, 2: 5.0, 3: 5.0, 4: 30.0, 5: 120.0,
           6: 900.0, 7: 120.0, 8: 1.0, 9: 60.0, 10: 1.0}


@pytest.mark.parametrize("fn", acceptance.CRITERIA,
                         ids=[f.__name__ for f in acceptance.CRITERIA])
def test_criterion(fn):
    t0 = time.perf_counter()
    r = fn()
    elapsed = time.perf_counter() - t0
    print(acceptance.format_line(r))
    assert r.passed, r.detail
    assert elapsed < BUDGETS[r.index], \
        f"criterion {r.index} took {elapsed:.1f}s (budget {BUDGETS[r.index]}s)"


def test_criterion_11_verify_reports_are_byte_identical(tmp_path, monkeypatch,
                                                        capsys):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    first = tmp_path / "report-1.txt"
    second = tmp_path / "report-2.txt"
    assert cli.main(["verify", "--out", str(first)]) == 0
    assert cli.main(["verify", "--out", str(second)]) == 0
    identical = first.read_bytes() == second.read_bytes()
    mark = "PASS" if identical else "FAIL"
    print(f"11  {mark}  determinism: repeated verify reports byte-identical")
    assert identical
    capsys.readouterr()

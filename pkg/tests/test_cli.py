"""End-to-end checks of the command-line surface: exit codes, file formats,
byte-identical reruns, and the result cache."""

import json

import numpy as np

from dirac_spectra import __version__, cli

OUT_COLUMNS = "x,v,u,X,Y,Z,residual_h"


def _lines(path):
    return path.read_text().splitlines()


def test_soliton_writes_header_block_and_columns(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    out = tmp_path / "s.csv"
    code = cli.main(["soliton", "--omega", "0.5", "--R", "8", "--h", "0.05",
                     "--out", str(out)])
    assert code == 0
    lines = _lines(out)
    assert lines[0] == f"# dirac-spectra {__version__} soliton"
    config = [ln for ln in lines if ln.startswith("# ") and "=" in ln]
    assert "# omega=0.5" in config and "# model=gross-neveu" in config
    head = next(ln for ln in lines if not ln.startswith("#"))
    assert head == OUT_COLUMNS
    # one data row per grid point, 17-significant-digit plain decimals
    n_rows = sum(not ln.startswith("#") for ln in lines) - 1
    assert n_rows == 2 * round(8 / 0.05) + 1
    row = dict(zip(head.split(","), lines[-1].split(",")))
    assert abs(float(row["v"])) > 0 and "e" not in row["x"].lower()


def test_rerun_is_byte_identical_without_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert cli.main(["soliton", "--omega", "0.3", "--R", "6",
                         "--h", "0.05", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    # the only artifacts are the two outputs: atomic writes leave no debris
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv", "b.csv"]


def test_domain_error_exits_1_with_message(tmp_path, capsys):
    out = tmp_path / "bad.csv"
    code = cli.main(["soliton", "--omega", "1.5", "--out", str(out)])
    assert code == 1
    assert "omega outside (0, m)" in capsys.readouterr().err
    assert not out.exists()


def test_usage_errors_exit_2(tmp_path, capsys):
    assert cli.main(["soliton", "--omega", "0.5"]) == 2          # no --out
    assert cli.main(["no-such-subcommand"]) == 2
    assert cli.main(["spectrum-info", "--omega", "0.5",
                     "--lambda", "oops"]) == 2
    assert cli.main(["h-spectrum", "--kind", "h?", "--omega-range",
                     "0.3,0.5,0.1", "--out", str(tmp_path / "x.csv")]) == 2
    assert cli.main(["resonance", "--tag", "hp-mminus"]) == 2    # no mode
    capsys.readouterr()


def test_bad_sweep_step_exits_1(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    code = cli.main(["h-spectrum", "--kind", "h-", "--omega-range",
                     "0.3,0.5,0", "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "step must be positive" in capsys.readouterr().err


def test_spectrum_info_prints_json(capsys):
    assert cli.main(["spectrum-info", "--omega", "0.5",
                     "--lambda", "0,1.6"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda"] == {"re": 0.0, "im": 1.6}
    # lambda = 1.6 i lies on the L bands (|Im| >= m - omega), off the 2x2
    # ones; there the wavenumbers are real and nothing decays
    assert doc["continuous_spectrum"]["L"]["contains_lambda"] is True
    assert doc["continuous_spectrum"]["Hminus"]["contains_lambda"] is False
    for fam in doc["xi_families"].values():
        assert all(x["im"] == 0.0 for x in fam["xi"])

    assert cli.main(["spectrum-info", "--omega", "0.5",
                     "--lambda", "0.2,0.3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["continuous_spectrum"]["L"]["contains_lambda"] is False
    for fam in doc["xi_families"].values():
        assert fam["decay_xi"]["im"] > 0.0
        assert len(fam["decay_vector"]) == 4


def test_evans_scan_emits_grid_and_zero_sidecar(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", str(tmp_path / "cache"))
    out = tmp_path / "scan.csv"
    argv = ["evans-scan", "--omega", "0.5", "--re", "-0.04,0.04",
            "--im", "0.9,1.05", "--grid", "5x6", "--R", "12",
            "--out", str(out)]
    assert cli.main(argv) == 0
    lines = [ln for ln in _lines(out) if not ln.startswith("#")]
    assert lines[0] == "re_lambda,im_lambda,reEm,imEm,reEp,imEp,scale"
    assert len(lines) - 1 == 5 * 6
    sidecar = json.loads((tmp_path / "scan.zeros.json").read_text())
    hits = [z for z in sidecar["zeros"] if z["converged"]]
    assert hits, "expected the eigenvalue at 2 i omega inside the window"
    best = min(hits, key=lambda z: abs(complex(z["lambda"]["re"],
                                               z["lambda"]["im"]) - 1j))
    assert abs(complex(best["lambda"]["re"], best["lambda"]["im"]) - 1j) < 1e-6

    # replay from cache into another path: byte-identical pair of files
    out2 = tmp_path / "again.csv"
    assert cli.main(argv[:-1] + [str(out2)]) == 0
    assert out2.read_bytes() == out.read_bytes()
    assert (tmp_path / "again.zeros.json").read_bytes() \
        == (tmp_path / "scan.zeros.json").read_bytes()
    assert any((tmp_path / "cache").iterdir())


def test_h_spectrum_lists_gap_eigenvalues(tmp_path, monkeypatch):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    out = tmp_path / "hm.csv"
    assert cli.main(["h-spectrum", "--kind", "h-", "--omega-range",
                     "0.5,0.5,0.1", "--out", str(out)]) == 0
    lines = [ln for ln in _lines(out) if not ln.startswith("#")]
    assert lines[0] == "omega,eigenvalue"
    vals = sorted(float(ln.split(",")[1]) for ln in lines[1:])
    assert np.allclose(vals, [-1.0, 0.0], atol=1e-6)


def test_resonance_sweep_and_crossing(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DIRAC_SPECTRA_CACHE", "")
    out = tmp_path / "res.csv"
    assert cli.main(["resonance", "--tag", "hp-mminus", "--omega-range",
                     "0.36,0.38,0.02", "--out", str(out)]) == 0
    lines = [ln for ln in _lines(out) if not ln.startswith("#")]
    assert lines[0] == "omega,exact_phase,wkb_phase,n_nearest"
    assert len(lines) - 1 == 2
    capsys.readouterr()

    assert cli.main(["resonance", "--tag", "hp-mminus", "--find-crossing",
                     "3", "--bracket", "0.3,0.45"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n"] == 3
    assert abs(doc["omega"] - 0.3667) < 5e-3

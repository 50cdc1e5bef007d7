"""Command-line front end.

Subcommands map onto the library layers: soliton (profiles), spectrum-info
(asymptotic data at one lambda), evans-scan (determinant grids plus refined
zeros), h-spectrum (gap eigenvalues of the 2x2 operators), resonance
(threshold phases and crossings), verify (the acceptance suite).

Output files are written atomically and byte-identical across reruns of the
same configuration; finished results replay from a content-keyed cache
(DIRAC_SPECTRA_CACHE overrides the location, empty string disables).
Exit codes: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance, evans, linops, model, resonance, \
    runio, soliton
from .errors import DiracSpectraError, DomainError


def _pair(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected A,B, got {text!r}")
    return float(parts[0]), float(parts[1])


def _range(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected A,B,STEP, got {text!r}")
    return float(parts[0]), float(parts[1]), float(parts[2])


def _grid(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}")
    return int(parts[0]), int(parts[1])


def _steps(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0.0:
        raise DomainError("step must be positive")
    return np.arange(lo, hi + 0.5 * step, step)


def _build_profile(name: str, omega: float, R: float = 20.0, h: float = 0.01):
    if name == "gross-neveu":
        return soliton.closed_form_profile(omega, R=R, h=h)
    try:
        coeffs = tuple(float(c) for c in name.split(","))
    except ValueError:
        raise DomainError(f"unknown model {name!r}") from None
    return soliton.quadrature_profile(model.polynomial(coeffs), omega,
                                      R=R, h=h)


def _cached(subcommand: str, config: dict, names, compute) -> dict:
    key = runio.config_hash(subcommand, config)
    files = runio.cache_load(key)
    if files is None or not all(n in files for n in names):
        files = compute()
        runio.cache_store(key, files)
    return files


def _cjson(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_soliton(args) -> int:
    config = {"model": args.model, "omega": args.omega,
              "R": args.R, "h": args.h}

    def compute():
        profile = _build_profile(args.model, args.omega, args.R, args.h)
        _, _, res_h = soliton.stationary_residuals(profile)
        rows = np.column_stack([profile.x, profile.v, profile.u, profile.X,
                                profile.Y, profile.Z, res_h])
        data = runio.render_csv(
            "soliton", config,
            ["x", "v", "u", "X", "Y", "Z", "residual_h"], rows)
        return {"out.csv": data}

    files = _cached("soliton", config, ["out.csv"], compute)
    runio.write_atomic(Path(args.out), files["out.csv"])
    return 0


def _in_bands(bands, lam: complex) -> bool:
    t, off = (lam.real, lam.imag) if bands.axis == "real" \
        else (lam.imag, lam.real)
    if off != 0.0:
        return False
    return any(lo <= t <= hi for lo, hi in bands.rays)


def _ray_json(ray) -> list:
    return [r if math.isfinite(r) else None for r in ray]


def _cmd_spectrum_info(args) -> int:
    p = model.model_params(model.gross_neveu(), args.omega)
    lam = complex(args.lam[0], args.lam[1])
    br = linops.xi_branches(p, lam)
    families = {}
    for col, name in enumerate(("plus", "minus")):
        families[name] = {
            "xi": [_cjson(br.xi[0, col]), _cjson(br.xi[1, col])],
            "on_cut": bool(br.cut[col]),
            "decay_xi": _cjson(br.decay_xi[col]),
            "decay_vector": [_cjson(z) for z in br.decay_vec[col]],
        }
    spectrum = {}
    for kind in linops.KINDS:
        b = linops.continuous_spectrum(kind, p)
        spectrum[kind] = {
            "axis": b.axis,
            "rays": [_ray_json(r) for r in b.rays],
            "contains_lambda": _in_bands(b, lam),
        }
    doc = {
        "tool": "dirac-spectra",
        "version": __version__,
        "omega": args.omega,
        "lambda": _cjson(lam),
        "xi_families": families,
        "continuous_spectrum": spectrum,
    }
    sys.stdout.write(runio.render_json(doc).decode())
    return 0


def _cmd_evans_scan(args) -> int:
    config = {"model": "gross-neveu", "omega": args.omega,
              "re_min": args.re[0], "re_max": args.re[1],
              "im_min": args.im[0], "im_max": args.im[1],
              "grid_re": args.grid[0], "grid_im": args.grid[1],
              "R": args.R, "h": args.h}

    def compute():
        profile = soliton.closed_form_profile(args.omega, R=args.R)
        scan = evans.scan_region(profile, args.re, args.im,
                                 grid=args.grid, R=args.R, h=args.h)
        rows = [(scan.re[j], scan.im[i],
                 scan.Eminus[i, j].real, scan.Eminus[i, j].imag,
                 scan.Eplus[i, j].real, scan.Eplus[i, j].imag,
                 scan.scale[i, j])
                for i in range(scan.im.size) for j in range(scan.re.size)]
        data = runio.render_csv(
            "evans-scan", config,
            ["re_lambda", "im_lambda", "reEm", "imEm", "reEp", "imEp",
             "scale"], rows)
        zeros = [{
            "which": z.candidate.which,
            "cell_center": _cjson(z.candidate.center),
            "converged": z.converged,
            "lambda": None if z.lam is None else _cjson(z.lam),
            "evans_abs": z.evans_abs,
            "inside_cell": z.inside_cell,
        } for z in evans.refine_candidates(profile, scan)]
        sidecar = {"tool": "dirac-spectra", "version": __version__,
                   "subcommand": "evans-scan", "config": config,
                   "zeros": zeros}
        return {"out.csv": data, "zeros.json": runio.render_json(sidecar)}

    files = _cached("evans-scan", config, ["out.csv", "zeros.json"], compute)
    out = Path(args.out)
    runio.write_atomic(out, files["out.csv"])
    runio.write_atomic(out.with_suffix(".zeros.json"), files["zeros.json"])
    return 0


def _cmd_h_spectrum(args) -> int:
    kind = {"h-": "Hminus", "h+": "Hplus"}[args.kind]
    lo, hi, step = args.omega_range
    config = {"model": "gross-neveu", "kind": args.kind,
              "omega_min": lo, "omega_max": hi, "omega_step": step}

    def compute():
        rows = []
        for w in _steps(lo, hi, step):
            profile = soliton.closed_form_profile(float(w))
            for ev in evans.h_spectrum_scan(kind, profile):
                rows.append((w, ev))
        data = runio.render_csv("h-spectrum", config,
                                ["omega", "eigenvalue"], rows)
        return {"out.csv": data}

    files = _cached("h-spectrum", config, ["out.csv"], compute)
    runio.write_atomic(Path(args.out), files["out.csv"])
    return 0


def _cmd_resonance(args) -> int:
    if args.find_crossing is not None:
        if args.bracket is None:
            args.parser.error("--find-crossing requires --bracket")
        w = resonance.resonance_crossings(args.tag, args.find_crossing,
                                          args.bracket)
        doc = {"tool": "dirac-spectra", "version": __version__,
               "tag": args.tag, "n": args.find_crossing,
               "bracket": list(args.bracket), "omega": w}
        sys.stdout.write(runio.render_json(doc).decode())
        return 0
    if args.omega_range is None or args.out is None:
        args.parser.error(
            "either --find-crossing with --bracket, or --omega-range with"
            " --out")
    lo, hi, step = args.omega_range
    config = {"model": "gross-neveu", "tag": args.tag,
              "omega_min": lo, "omega_max": hi, "omega_step": step}

    def compute():
        rows = []
        for w in _steps(lo, hi, step):
            ph = resonance.resonance_phase(args.tag, float(w))
            rows.append((w, ph.exact_phase, ph.wkb_phase, ph.n_nearest))
        data = runio.render_csv(
            "resonance", config,
            ["omega", "exact_phase", "wkb_phase", "n_nearest"], rows)
        return {"out.csv": data}

    files = _cached("resonance", config, ["out.csv"], compute)
    runio.write_atomic(Path(args.out), files["out.csv"])
    return 0


def _cmd_verify(args) -> int:
    # progress goes to stderr so the report itself stays deterministic
    results = acceptance.run_all(
        progress=lambda line: print(line, file=sys.stderr, flush=True))
    text = acceptance.report(results)
    sys.stdout.write(text)
    if args.out is not None:
        runio.write_atomic(Path(args.out), text.encode())
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirac-spectra",
        description="Solitary waves of the 1D nonlinear Dirac equation and"
                    " their linearization spectra.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                metavar="SUBCOMMAND")

    sp = sub.add_parser("soliton", help="write a solitary-wave profile CSV")
    sp.add_argument("--omega", type=float, required=True,
                    help="frequency, inside (0, m)")
    sp.add_argument("--R", type=float, default=20.0,
                    help="grid half-width (default 20)")
    sp.add_argument("--h", type=float, default=0.01,
                    help="grid spacing (default 0.01)")
    sp.add_argument("--model", default="gross-neveu",
                    help="'gross-neveu' or polynomial coefficients c1,c2,...")
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.set_defaults(func=_cmd_soliton, parser=sp)

    sp = sub.add_parser("spectrum-info",
                        help="asymptotic data at one lambda, as JSON")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--lambda", dest="lam", type=_pair, required=True,
                    metavar="RE,IM", help="spectral parameter")
    sp.set_defaults(func=_cmd_spectrum_info, parser=sp)

    sp = sub.add_parser("evans-scan",
                        help="Evans determinants over a rectangle, plus"
                             " refined zeros")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--re", type=_pair, required=True, metavar="A,B",
                    help="real-part range")
    sp.add_argument("--im", type=_pair, required=True, metavar="C,D",
                    help="imaginary-part range")
    sp.add_argument("--grid", type=_grid, default=(41, 59), metavar="NxM",
                    help="grid points along re x im (default 41x59)")
    sp.add_argument("--R", type=float, default=20.0,
                    help="matching half-width (default 20)")
    sp.add_argument("--h", type=float, default=0.01,
                    help="propagation step (default 0.01)")
    sp.add_argument("--out", required=True,
                    help="output CSV path; zeros go to a .zeros.json sidecar")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker bound (accepted for compatibility;"
                         " evaluation is serial)")
    sp.set_defaults(func=_cmd_evans_scan, parser=sp)

    sp = sub.add_parser("h-spectrum",
                        help="gap eigenvalues of a 2x2 operator over an"
                             " omega sweep")
    sp.add_argument("--kind", choices=("h+", "h-"), required=True)
    sp.add_argument("--omega-range", type=_range, required=True,
                    metavar="A,B,STEP")
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker bound (accepted for compatibility;"
                         " evaluation is serial)")
    sp.set_defaults(func=_cmd_h_spectrum, parser=sp)

    sp = sub.add_parser("resonance",
                        help="threshold phases over an omega sweep, or one"
                             " crossing")
    sp.add_argument("--tag", choices=resonance.TAGS, default="hp-mminus")
    sp.add_argument("--omega-range", type=_range, metavar="A,B,STEP")
    sp.add_argument("--out", help="output CSV path (sweep mode)")
    sp.add_argument("--find-crossing", type=int, metavar="N",
                    help="locate omega where the exact phase equals N pi")
    sp.add_argument("--bracket", type=_pair, metavar="A,B",
                    help="search bracket for --find-crossing")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker bound (accepted for compatibility;"
                         " evaluation is serial)")
    sp.set_defaults(func=_cmd_resonance, parser=sp)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--out", help="also write the report to this path")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker bound (accepted for compatibility;"
                         " evaluation is serial)")
    sp.set_defaults(func=_cmd_verify, parser=sp)

    return parser


# flags whose values can start with '-' (negative ranges); argparse would
# read such a value as an option string unless folded into --flag=value form
_VALUE_FLAGS = ("--re", "--im", "--lambda", "--bracket", "--omega-range")


def _fold_values(argv) -> list:
    out = []
    i = 0
    while i < len(argv):
        if argv[i] in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_fold_values(argv))
        return args.func(args)
    except SystemExit as exc:
        # argparse exits on usage errors and --version/--help
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    except DiracSpectraError as exc:
        print(exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end: result files, config merging, parameter sweeps.

Every subcommand resolves its configuration in three layers (built-in
defaults, then an optional flat JSON ``--config`` file, then explicit
flags), runs one of the library pipelines and writes a ``results.json``
with per-value units and method provenance, plus CSV series where the
command produces one.  Output is byte-deterministic for a fixed resolved
config: no timestamps, no machine identifiers, sorted keys.

Exit codes: 0 on success, 2 for configuration or validation problems
(including semantic ones such as a washboard tilted past its critical
current), 1 for solver failures deeper in the stack.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import (
    __version__,
    determinants,
    gl_junction,
    oracle,
    potentials,
    spectra,
    trajectory,
    wkb,
)
from .errors import (
    BoxError,
    ConfigurationError,
    CutoffError,
    DomainError,
    InstantonError,
    NoExitError,
    NoWellError,
    ResonanceError,
    SemanticsError,
    ValidationError,
)

_FORMATS = ("json", "csv")

# Errors that mean "the request was bad", as opposed to "the solver broke".
_USER_ERRORS = (
    BoxError,
    ConfigurationError,
    CutoffError,
    DomainError,
    NoExitError,
    NoWellError,
    ResonanceError,
    SemanticsError,
    ValidationError,
)

_DEFAULTS = {
    "double-well": {"hbar": 1.0, "g": None, "big_n": 2, "temp_k": None},
    "washboard": {
        "ej": 1.0,
        "ec": 0.02,
        "ie": 0.9,
        "ic": 1.0,
        "with_gl_correction": False,
        "l_over_zeta": 0.8,
    },
    "charge": {"ej": 50.0, "ec": 1.0},
    "flux": {"ej": 1.0, "el": 0.5, "ec": 0.005, "phi_e": math.pi},
    "gl-cpr": {"l_over_zeta": 0.8},
    "wkb": {"hbar": 0.02, "n_max": 0},
    "oracle": {"family": "quartic-double-well", "hbar": 0.1, "levels": 6},
}

_SWEEPABLE = {"double-well": ("hbar",)}


# ----------------------------------------------------------------- helpers


def _num(value, units, method):
    return {"value": float(value), "units": units, "method": method}


def _require_positive(cfg, *keys):
    for key in keys:
        val = float(cfg[key])
        if not (math.isfinite(val) and val > 0.0):
            raise ConfigurationError(f"{key} must be positive and finite, got {val!r}")


def _parse_formats(raw):
    parts = tuple(p.strip() for p in str(raw).split(",") if p.strip())
    bad = sorted(set(parts) - set(_FORMATS))
    if bad or not parts:
        raise ConfigurationError(
            f"--format takes a comma list drawn from {', '.join(_FORMATS)}"
        )
    return parts


def _resolve(command, args):
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    cfg = dict(_DEFAULTS[command])
    path = getattr(args, "config", None)
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must hold a flat JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise ConfigurationError(
                f"unknown config key(s) for {command}: {', '.join(unknown)}"
            )
        cfg.update(loaded)
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _write_json(out_dir, command, cfg, results):
    payload = {
        "schema_version": 1,
        "tool": {"name": "instanton", "version": __version__},
        "command": command,
        "config": cfg,
        "results": results,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    (out_dir / "results.json").write_text(text)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(cell)) for cell in row])


def _report_error(command, exc):
    report = {
        "command": command,
        "error": type(exc).__name__,
        "message": str(exc),
    }
    print(json.dumps(report, sort_keys=True), file=sys.stderr)


def _grid_gap(model, hbar):
    """Two lowest grid-oracle levels on a box wide enough for this hbar."""
    half = max(1.4, 1.2 + 4.0 * float(hbar))
    spec = oracle.grid_spectrum(model, domain=(-half, half), points=4096, hbar=hbar)
    return spec, float(spec.energies[1] - spec.energies[0])


# ------------------------------------------------------------ subcommands


def _run_double_well(cfg):
    hbar = float(cfg["hbar"])
    if not (math.isfinite(hbar) and hbar > 0.0):
        raise ConfigurationError(f"hbar must be positive and finite, got {hbar!r}")
    if cfg["g"] is not None:
        return _run_poly_bounce(cfg, hbar)

    model = potentials.QuarticDoubleWell()
    path = trajectory.solve_path(model, (-0.5, 0.5))
    ratio = determinants.zero_mode_removed_ratio(path)
    split = spectra.double_well_splitting(
        path.S0, path.A, path.omega, hbar=hbar, ratio_prime=ratio.ratio_prime
    )
    _, gap = _grid_gap(model, hbar)

    # Phase-integral quantization drops out once the barrier holds no
    # doublet; report null rather than refusing the whole run.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        doublets = wkb.quantize(model, hbar=hbar, n_max=0)
    wkb_split = float(doublets[0].parity_split) if doublets else None

    results = {
        "s0": _num(path.S0, "action", "shooting integration"),
        "a_coeff": _num(path.A, "sqrt(energy)", "zero-mode tail fit"),
        "omega": _num(path.omega, "frequency", "well curvature"),
        "k_coeff": _num(split.k_coeff, "1/sqrt(action)", "removed-mode determinant"),
        "delta_e_instanton": _num(split.delta_e, "energy", "one-loop dilute gas"),
        "delta_e_oracle": _num(gap, "energy", "grid diagonalization"),
        "delta_e_wkb": {
            "value": wkb_split,
            "units": "energy",
            "method": "parity phase quantization",
        },
        "e_plus": _num(split.e_plus, "energy", "one-loop dilute gas"),
        "e_minus": _num(split.e_minus, "energy", "one-loop dilute gas"),
    }
    if cfg.get("temp_k") is not None:
        diag = spectra.diagnostics(
            k_coeff=split.k_coeff,
            s0=path.S0,
            hbar=hbar,
            delta_e=split.delta_e,
            temperature=float(cfg["temp_k"]),
        )
        results["thermal_ratio"] = _num(
            diag.thermal_ratio, "dimensionless", "splitting over temperature"
        )
        results["diluteness"] = _num(
            diag.diluteness, "dimensionless", "tunneling events per period"
        )
        results["dilute_gas_violated"] = {
            "value": bool(diag.dilute_gas_violated),
            "units": "flag",
            "method": "diluteness threshold",
        }
    return results, {}


def _run_poly_bounce(cfg, hbar):
    g = float(cfg["g"])
    big_n = int(cfg["big_n"])
    model = potentials.PolyBounce(big_n=big_n, g=g)
    sigma = potentials.exit_point(model, 0.0)
    path = trajectory.solve_path(model, (0.0, sigma))
    ratio = determinants.zero_mode_removed_ratio(path)
    decay = spectra.decay_rate(
        path.S0,
        path.A,
        path.omega,
        hbar,
        family="poly_bounce",
        ratio_prime=ratio.ratio_prime,
    )
    results = {
        "s0": _num(path.S0, "action", "shooting integration"),
        "a_coeff": _num(path.A, "sqrt(energy)", "zero-mode tail fit"),
        "omega": _num(path.omega, "frequency", "well curvature"),
        "k_coeff": _num(decay.k_coeff, "1/sqrt(action)", "removed-mode determinant"),
        "im_e0": _num(decay.im_e0, "energy", "one-loop dilute gas"),
        "gamma": _num(decay.gamma, "energy", "one-loop dilute gas"),
        "lifetime": _num(decay.lifetime, "time", "one-loop dilute gas"),
    }
    return results, {}


def _run_washboard(cfg):
    _require_positive(cfg, "ej", "ec", "ic")
    ej = float(cfg["ej"])
    ec = float(cfg["ec"])
    correction = None
    if cfg["with_gl_correction"]:
        grid = np.linspace(0.0, 2.0 * np.pi, 65)
        cpr = gl_junction.nonlinear_cpr(float(cfg["l_over_zeta"]), grid)
        shift = gl_junction.washboard_correction(cpr, e_j=1.0)
        correction = potentials.SampledCorrection(grid, shift.value(grid))
    # Work in units of the coupling energy; only the ratio ec/ej enters
    # the reduced dynamics, and energies scale back up by ej.
    model = potentials.Washboard(
        e_j=1.0,
        e_c=ec / ej,
        i_e=float(cfg["ie"]),
        i_c=float(cfg["ic"]),
        correction=correction,
    )
    res = spectra.washboard_analysis(model)
    results = {
        "s0": _num(res.s0, "action (reduced)", "shooting integration"),
        "omega": _num(res.omega, "frequency (reduced)", "well curvature"),
        "hbar_effective": _num(res.hbar, "dimensionless", "charging over coupling"),
        "k_coeff": _num(res.k_coeff, "1/sqrt(action)", "removed-mode determinant"),
        "negative_mode": _num(res.negative_mode, "dimensionless", "bounce fluctuation"),
        "im_e0": _num(ej * res.im_e0, "energy", "one-loop dilute gas"),
        "gamma": _num(ej * res.gamma, "energy", "one-loop dilute gas"),
        "lifetime": _num(res.lifetime / ej, "time", "one-loop dilute gas"),
        "well": _num(res.well, "phase", "stationary-point search"),
        "exit": _num(res.exit, "phase", "stationary-point search"),
    }
    times, probs = spectra.survival_curve(res)
    tables = {"survival.csv": (("time", "probability"), zip(times, probs))}
    return results, tables


def _run_charge(cfg):
    _require_positive(cfg, "ej", "ec")
    ej = float(cfg["ej"])
    ec = float(cfg["ec"])
    scaled = potentials.PeriodicCosine(e_j=1.0, e_c=ec / ej)
    hbar_eff = scaled.hbar_effective()
    path = trajectory.solve_path(scaled, (0.0, 2.0 * np.pi))
    ratio = determinants.zero_mode_removed_ratio(path)
    split = spectra.double_well_splitting(
        path.S0, path.A, path.omega, hbar=hbar_eff, ratio_prime=ratio.ratio_prime
    )
    # The bandwidth is twice the two-well splitting.  Assemble it from
    # delta_e directly: adding the exponentially small splitting to the
    # zero-point energy first would drown it in float64 rounding.
    width_inst = ej * 2.0 * split.delta_e
    width_oracle = float(oracle.bloch_bandwidth(e_c=ec, e_j=ej))
    thetas, band = oracle.band_trace(e_c=ec, e_j=ej, points=33)
    offsets = ej * split.delta_e * np.cos(thetas)
    results = {
        "s0": _num(path.S0, "action (reduced)", "shooting integration"),
        "omega": _num(path.omega, "frequency (reduced)", "well curvature"),
        "hbar_effective": _num(hbar_eff, "dimensionless", "charging over coupling"),
        "bandwidth_instanton": _num(width_inst, "energy", "one-loop dilute gas"),
        "bandwidth_oracle": _num(width_oracle, "energy", "charge-basis bisection"),
    }
    tables = {
        "band.csv": (
            ("theta", "band_oracle", "band_instanton_offset"),
            zip(thetas, band, offsets),
        )
    }
    return results, tables


def _run_flux(cfg):
    _require_positive(cfg, "ej", "ec", "el")
    ej = float(cfg["ej"])
    ec = float(cfg["ec"])
    scaled = potentials.Flux(
        e_j=1.0,
        e_l=float(cfg["el"]) / ej,
        e_c=ec / ej,
        phi_e=float(cfg["phi_e"]),
    )
    points = potentials.stationary_points(scaled, (0.0, 2.0 * np.pi))
    wells = [p.x for p in points if p.kind == "min"]
    if len(wells) < 2:
        raise SemanticsError(
            "flux potential has a single well at this bias; nothing to split"
        )
    path = trajectory.solve_path(scaled, (wells[0], wells[1]))
    ratio = determinants.zero_mode_removed_ratio(path)
    hbar_eff = math.sqrt(2.0 * ec / ej)
    split = spectra.double_well_splitting(
        path.S0, path.A, path.omega, hbar=hbar_eff, ratio_prime=ratio.ratio_prime
    )
    ground = spectra.flux_ground_energy(path.S0, path.A, hbar_eff)
    results = {
        "s0": _num(path.S0, "action (reduced)", "shooting integration"),
        "omega": _num(path.omega, "frequency (reduced)", "well curvature"),
        "hbar_effective": _num(hbar_eff, "dimensionless", "charging over coupling"),
        "delta_e_instanton": _num(ej * split.delta_e, "energy", "one-loop dilute gas"),
        "e_ground": _num(ej * ground, "energy", "one-loop dilute gas"),
    }
    return results, {}


def _run_gl_cpr(cfg):
    lam = float(cfg["l_over_zeta"])
    deltas = np.linspace(0.0, 2.0 * np.pi, 64)
    cpr = gl_junction.nonlinear_cpr(lam, deltas)
    results = {
        "l_over_zeta": _num(lam, "dimensionless", "input"),
        "j_c": _num(cpr.j_c, "current", cpr.method),
        "max_deviation": _num(
            np.max(np.abs(cpr.deviation)), "dimensionless", cpr.method
        ),
    }
    tables = {
        "cpr.csv": (
            ("delta", "current", "deviation"),
            zip(deltas, cpr.current, cpr.deviation),
        )
    }
    return results, tables


def _run_wkb(cfg):
    hbar = float(cfg["hbar"])
    n_max = int(cfg["n_max"])
    model = potentials.QuarticDoubleWell()
    doublets = wkb.quantize(model, hbar=hbar, n_max=n_max)
    if not doublets:
        raise SemanticsError(
            f"no parity doublet fits below the barrier crest at hbar={hbar}"
        )
    results = {}
    for i, doublet in enumerate(doublets):
        results[f"e_plus_{i}"] = _num(
            doublet.e_plus, "energy", "parity phase quantization"
        )
        results[f"e_minus_{i}"] = _num(
            doublet.e_minus, "energy", "parity phase quantization"
        )
        results[f"parity_split_{i}"] = _num(
            doublet.parity_split, "energy", "parity phase quantization"
        )
    return results, {}


_ORACLE_FAMILIES = {"quartic-double-well": potentials.QuarticDoubleWell}


def _run_oracle(cfg):
    family = str(cfg["family"])
    maker = _ORACLE_FAMILIES.get(family)
    if maker is None:
        raise ConfigurationError(
            f"unknown family {family!r}; choose from "
            f"{', '.join(sorted(_ORACLE_FAMILIES))}"
        )
    hbar = float(cfg["hbar"])
    levels = int(cfg["levels"])
    if levels < 2:
        raise ConfigurationError("need at least two levels to report a gap")
    model = maker()
    half = max(1.4, 1.2 + 4.0 * hbar)
    spec = oracle.grid_spectrum(
        model, domain=(-half, half), points=4096, hbar=hbar, levels=levels
    )
    energies = [float(e) for e in spec.energies]
    results = {
        "energies": {
            "value": energies,
            "units": "energy",
            "method": "grid diagonalization",
        },
        "gap_01": _num(energies[1] - energies[0], "energy", "grid diagonalization"),
    }
    rows = zip(range(levels), energies)
    return results, {"levels.csv": (("index", "energy"), rows)}


_RUNNERS = {
    "double-well": _run_double_well,
    "washboard": _run_washboard,
    "charge": _run_charge,
    "flux": _run_flux,
    "gl-cpr": _run_gl_cpr,
    "wkb": _run_wkb,
    "oracle": _run_oracle,
}

_SWEEP_COLUMNS = ("s0", "delta_e_instanton", "delta_e_oracle")


def _run_sweep(args):
    target = args.target
    if target not in _SWEEPABLE:
        raise ConfigurationError(
            f"sweep target must be one of: {', '.join(sorted(_SWEEPABLE))}"
        )
    parameter = args.parameter
    if parameter not in _SWEEPABLE[target]:
        raise ConfigurationError(
            f"sweep over {target} supports parameter(s): "
            f"{', '.join(_SWEEPABLE[target])}"
        )
    steps = int(args.steps)
    if steps < 1:
        raise ConfigurationError("sweep needs at least one step")
    start, stop = float(args.start), float(args.stop)
    if not (math.isfinite(start) and math.isfinite(stop)):
        raise ConfigurationError("sweep endpoints must be finite")
    formats = _parse_formats(args.format)
    base = _resolve(target, args)
    values = np.linspace(start, stop, steps)
    runner = _RUNNERS[target]

    def point(value):
        cfg = dict(base)
        cfg[parameter] = float(value)
        results, _ = runner(cfg)
        return [float(value)] + [results[c]["value"] for c in _SWEEP_COLUMNS]

    # Points are independent; map() preserves input order, so the worker
    # count never changes the output.
    workers = min(steps, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(point, values))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if "csv" in formats:
        _write_csv(out / "sweep.csv", (parameter,) + _SWEEP_COLUMNS, rows)
    if "json" in formats:
        summary = {
            "parameter": {"value": parameter, "units": "name", "method": "input"},
            "grid": {
                "value": [float(v) for v in values],
                "units": "mixed",
                "method": "linear spacing",
            },
            "columns": {
                "value": list((parameter,) + _SWEEP_COLUMNS),
                "units": "names",
                "method": "input",
            },
        }
        cfg = dict(base)
        cfg.update({"parameter": parameter, "start": start, "stop": stop, "steps": steps})
        _write_json(out, "sweep", cfg, summary)
    return 0


# ------------------------------------------------------------------ parser


def _add_io_flags(parser):
    parser.add_argument(
        "--config", type=Path, default=None, help="flat JSON file of settings; flags win"
    )
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument(
        "--format",
        default="json,csv",
        help="comma list of outputs to write (json,csv)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="instanton",
        description="Semiclassical tunneling pipelines with exact cross-checks.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    dw = sub.add_parser(
        "double-well",
        help="quartic well pair splitting, or polynomial-escape decay with --g",
    )
    _add_io_flags(dw)
    dw.add_argument("--hbar", type=float, help="dimensionless tunneling parameter")
    dw.add_argument("--g", type=float, help="negative quartic tilt; switches to decay mode")
    dw.add_argument("--bigN", dest="big_n", type=int, help="escape polynomial half-degree")
    dw.add_argument("--temp-k", dest="temp_k", type=float, help="temperature for diagnostics")

    wb = sub.add_parser("washboard", help="tilted-cosine metastable decay")
    _add_io_flags(wb)
    wb.add_argument("--ej", type=float, help="coupling energy scale")
    wb.add_argument("--ec", type=float, help="charging energy scale")
    wb.add_argument("--ie", type=float, help="bias current")
    wb.add_argument("--ic", type=float, help="critical current")
    wb.add_argument(
        "--with-gl-correction",
        dest="with_gl_correction",
        action="store_const",
        const=True,
        help="tilt the washboard with the bridge current-phase correction",
    )
    wb.add_argument("--l-over-zeta", dest="l_over_zeta", type=float,
                    help="bridge length over coherence length")

    ch = sub.add_parser("charge", help="periodic-cosine lowest Bloch band")
    _add_io_flags(ch)
    ch.add_argument("--ej", type=float, help="coupling energy scale")
    ch.add_argument("--ec", type=float, help="charging energy scale")

    fx = sub.add_parser("flux", help="double-well phase qubit splitting")
    _add_io_flags(fx)
    fx.add_argument("--ej", type=float, help="coupling energy scale")
    fx.add_argument("--el", type=float, help="inductive energy scale")
    fx.add_argument("--ec", type=float, help="charging energy scale")
    fx.add_argument("--phi-e", dest="phi_e", type=float, help="external flux phase")

    gl = sub.add_parser("gl-cpr", help="bridge current-phase relation")
    _add_io_flags(gl)
    gl.add_argument("--l-over-zeta", dest="l_over_zeta", type=float,
                    help="bridge length over coherence length")

    wk = sub.add_parser("wkb", help="phase-integral parity doublets")
    _add_io_flags(wk)
    wk.add_argument("--hbar", type=float, help="dimensionless tunneling parameter")
    wk.add_argument("--n-max", dest="n_max", type=int, help="highest doublet index")

    orc = sub.add_parser("oracle", help="grid-diagonalization reference spectrum")
    _add_io_flags(orc)
    orc.add_argument("--family", type=str, help="potential family name")
    orc.add_argument("--hbar", type=float, help="dimensionless tunneling parameter")
    orc.add_argument("--levels", type=int, help="number of levels to report")

    sw = sub.add_parser("sweep", help="rerun a command over a parameter grid")
    sw.add_argument("target", help="command to sweep (double-well)")
    sw.add_argument("--parameter", required=True, help="config key to vary")
    sw.add_argument("--start", type=float, required=True)
    sw.add_argument("--stop", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    _add_io_flags(sw)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    command = getattr(args, "command", None)
    try:
        if command == "sweep":
            return _run_sweep(args)
        cfg = _resolve(command, args)
        formats = _parse_formats(args.format)
        results, tables = _RUNNERS[command](cfg)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if "json" in formats:
            _write_json(out, command, cfg, results)
        if "csv" in formats:
            for name, (header, rows) in tables.items():
                _write_csv(out / name, header, rows)
        return 0
    except _USER_ERRORS as exc:
        _report_error(command, exc)
        return 2
    except InstantonError as exc:
        _report_error(command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())

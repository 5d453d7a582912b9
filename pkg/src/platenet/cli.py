"""Command-line entry point: ``platenet <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analyticity import witness_sequence
from .modal import batch_eigenvalues, spectral_abscissa
from .parameters import (
    PHYSICAL_KEYS,
    SYSTEM_KEYS,
    ParameterError,
    PhysicalParameters,
    SystemParameters,
    derive_parameters,
    validate,
)
from .resolvent import TruncationWarning, geometric_grid, sweep, truncation_check
from .simulation import PRESETS, initial_data, simulate
from .spectrum import Spectrum, explicit_spectrum, interval_spectrum, rectangle_spectrum

SCHEMA_VERSION = 1
ABSCISSA_TOL = 1e-6
GEOMETRY_KEYS = ("geometry", "length", "lx", "ly", "modes", "sigmas")
KNOWN_KEYS = SYSTEM_KEYS + PHYSICAL_KEYS + GEOMETRY_KEYS
DEFAULTS = {
    **SystemParameters().as_dict(),
    "geometry": "interval",
    "length": math.pi,
    "lx": math.pi,
    "ly": math.pi,
    "modes": 128,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: SystemParameters
    spectrum: Spectrum
    values: dict = field(default_factory=dict)  # merged raw key -> value map
    output_format: str = "csv"
    out_dir: Path | None = None
    threads: int = 1


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r} (line {lineno})")
        out[key] = value
    return out


def _coerce(key, value):
    if key == "geometry":
        value = str(value).strip()
        if value not in ("interval", "rectangle", "explicit"):
            raise ConfigError(f"invalid value for 'geometry': {value!r}")
        return value
    try:
        if key == "sigmas":
            if isinstance(value, str):
                return [float(x) for x in value.replace(";", ",").split(",") if x.strip()]
            return [float(x) for x in value]
        if key == "modes":
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value for {key!r}: {value!r}") from None


def _build_spectrum(values):
    geometry = values["geometry"]
    n = values["modes"]
    try:
        if geometry == "interval":
            return interval_spectrum(values["length"], n)
        if geometry == "rectangle":
            return rectangle_spectrum(values["lx"], values["ly"], n)
        if "sigmas" not in values:
            raise ConfigError("explicit geometry needs 'sigmas'")
        return explicit_spectrum(values["sigmas"])
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"spectrum: {exc}") from None


def _build_params(values, explicit_keys):
    physical = [k for k in PHYSICAL_KEYS if k in explicit_keys]
    if physical:
        missing = [k for k in PHYSICAL_KEYS if k not in explicit_keys]
        if missing:
            raise ConfigError(f"physical parameters incomplete; missing {', '.join(missing)}")
        clash = [k for k in ("alpha", "beta", "gamma", "delta") if k in explicit_keys]
        if clash:
            raise ConfigError(f"cannot combine physical keys with {', '.join(clash)}")
        try:
            phys = PhysicalParameters(**{k: values[k] for k in PHYSICAL_KEYS})
            return derive_parameters(phys, values["theta"])
        except ParameterError as exc:
            raise ConfigError(str(exc)) from None
    params = SystemParameters(**{k: values[k] for k in SYSTEM_KEYS})
    try:
        return validate(params)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, overrides=None, output_format="csv", out_dir=None, threads=1) -> RunConfig:
    """Merge defaults, then the config file, then ``overrides`` (highest precedence)."""
    raw = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        raw.update(parse_config_text(path.read_text()))
    for key, value in (overrides or {}).items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if value is not None:
            raw[key] = value
    values = dict(DEFAULTS)
    values.update({k: _coerce(k, v) for k, v in raw.items()})
    if "sigmas" in raw and "geometry" not in raw:
        values["geometry"] = "explicit"
    params = _build_params(values, set(raw))
    spectrum = _build_spectrum(values)
    return RunConfig(params, spectrum, values, output_format, out_dir, threads)


# ---------------------------------------------------------------- output


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


class Emitter:
    """Routes tables and summaries to stdout/stderr or files under ``--out``."""

    def __init__(self, cfg: RunConfig, stdout=None, stderr=None):
        self.cfg = cfg
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr
        if cfg.out_dir is not None:
            Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)

    def table(self, name, header, rows):
        rows = list(rows)
        if self.cfg.output_format == "json":
            text = to_json([dict(zip(header, r)) for r in rows])
            suffix = ".json"
        else:
            text = to_csv(header, rows)
            suffix = ".csv"
        self._write(name + suffix, text, self.stdout)

    def summary(self, name, obj, primary=False):
        self._write(name + ".json", to_json(obj), self.stdout if primary else self.stderr)

    def _write(self, filename, text, stream):
        if self.cfg.out_dir is not None:
            (Path(self.cfg.out_dir) / filename).write_text(text)
        else:
            stream.write(text)


# ---------------------------------------------------------------- commands


def cmd_params(cfg, args, emit):
    rows = [(k, v) for k, v in cfg.params.as_dict().items()]
    if all(k in cfg.values for k in PHYSICAL_KEYS):
        phys = PhysicalParameters(**{k: cfg.values[k] for k in PHYSICAL_KEYS})
        rows.append(("omega", phys.characteristic_pulsation()))
    emit.table("params", ["key", "value"], rows)
    return 0


def cmd_spectrum(cfg, args, emit):
    emit.table("spectrum", ["index", "sigma"], ((i + 1, s) for i, s in enumerate(cfg.spectrum.sigmas)))
    return 0


def cmd_eigs(cfg, args, emit):
    eigs = batch_eigenvalues(cfg.params, cfg.spectrum.sigmas)
    header = ["mode", "sigma"] + [f"{p}{k}" for k in range(1, 5) for p in ("re", "im")]
    rows = []
    for i, (sigma, ev) in enumerate(zip(cfg.spectrum.sigmas, eigs)):
        row = [i + 1, sigma]
        for z in ev:
            row += [z.real, z.imag]
        rows.append(row)
    emit.table("eigs", header, rows)
    return 0


def cmd_abscissa(cfg, args, emit):
    thetas = args.thetas if args.thetas else [cfg.params.theta]
    rows = []
    for th in thetas:
        a, mode = spectral_abscissa(cfg.params.replace(theta=th), cfg.spectrum)
        rows.append((th, len(cfg.spectrum), a, mode))
    emit.table("abscissa", ["theta", "N", "abscissa", "mode"], rows)
    return 0


def cmd_resolvent(cfg, args, emit):
    grid = geometric_grid(args.lmin, args.lmax, args.points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        samples = sweep(cfg.params, cfg.spectrum, grid, workers=cfg.threads)
    emit.table(
        "resolvent",
        ["lambda", "global_norm", "lambda_times_norm", "attaining_mode"],
        ((s.lam, s.global_norm, s.lam * s.global_norm, s.attaining_mode) for s in samples),
    )
    if args.per_mode:
        rows = (
            (s.lam, i + 1, sigma, norm)
            for s in samples
            for i, (sigma, norm) in enumerate(zip(cfg.spectrum.sigmas, s.per_mode_norms))
        )
        emit.table("resolvent_modes", ["lambda", "mode", "sigma", "norm"], rows)
    failed = [s for s in samples if s.error]
    for s in failed:
        emit.stderr.write(f"lambda={s.lam:g}: {s.error}\n")
    suspect = sum(s.truncation_suspect for s in samples)
    if suspect:
        emit.stderr.write(f"warning: truncation suspect at {suspect} of {len(samples)} points\n")
    return 1 if failed else 0


def cmd_simulate(cfg, args, emit):
    init = initial_data(args.init, cfg.params, cfg.spectrum, seed=args.seed)
    traj = simulate(cfg.params, cfg.spectrum, init, args.tend, args.samples)
    emit.table("simulate", ["t", "energy"], zip(traj.times, traj.energies))
    abscissa, mode = spectral_abscissa(cfg.params, cfg.spectrum)
    rate = traj.decay_fit[0] if traj.decay_fit else None
    emit.summary("simulate_summary", {
        "schema": SCHEMA_VERSION,
        "theta": cfg.params.theta,
        "modes": len(cfg.spectrum),
        "init": args.init,
        "seed": args.seed,
        "fitted_rate": rate,
        "fit_r_squared": traj.decay_fit[1] if traj.decay_fit else None,
        "abscissa": abscissa,
        "abscissa_mode": mode,
        "predicted_rate": 2 * abscissa,
        "rate_ratio": rate / (2 * abscissa) if rate is not None else None,
        "max_relative_increase": traj.max_relative_increase(),
    })
    return 0


def cmd_probe(cfg, args, emit):
    report = witness_sequence(cfg.params, cfg.spectrum, fit_decades=args.fit_decades)
    emit.table(
        "probe",
        ["n", "sigma", "lambda", "abs_coeff", "solution_norm", "forcing_norm", "amplified"],
        (
            (p.mode, p.sigma, p.lam, abs(p.coefficient), p.solution_norm, p.forcing_norm, p.amplified)
            for p in report.points
        ),
    )
    emit.summary("probe_summary", {"schema": SCHEMA_VERSION, **report.summary()})
    return 0


def certify(cfg: RunConfig, lmin=1.0, lmax=1e3, points=61, probe_modes=2048, fit_decades=2.0):
    """Run the three checks and return ``(exit_code, report)``.

    Exit 0 when every check passes, 1 when a check fails, 2 when a stage
    raises.
    """
    params, spectrum = cfg.params, cfg.spectrum
    theta = params.theta
    report = {
        "schema": SCHEMA_VERSION,
        "params": params.as_dict(),
        "spectrum": {"source": spectrum.source, "dims": list(spectrum.dims), "modes": len(spectrum)},
    }
    stage = "abscissa"
    try:
        a, mode = spectral_abscissa(params, spectrum)
        report["stability"] = {
            "abscissa": a,
            "mode": mode,
            "tolerance": ABSCISSA_TOL,
            "marginal": a > -ABSCISSA_TOL,
            "passed": a <= -ABSCISSA_TOL,
        }

        stage = "resolvent"
        grid = geometric_grid(lmin, lmax, points)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            check, coarse, fine = truncation_check(params, spectrum, grid, workers=cfg.threads)
        failed = [s.lam for s in coarse + fine if s.error]
        report["resolvent"] = {
            "lambda_min": lmin,
            "lambda_max": lmax,
            "points": points,
            "sweep_max": check.sweep_max,
            "sweep_max_doubled": check.sweep_max_doubled,
            "sup_rel_diff": check.sup_rel_diff,
            "rtol": check.rtol,
            "truncation_stable": check.sup_stable,
            "pointwise_compared": check.compared,
            "pointwise_max_rel_diff": check.max_rel_diff,
            "pointwise_stable": check.passed,
            "tail_suspect_points": sum(s.tail_norm > s.global_norm for s in coarse),
            "uncovered_resonance_points": check.uncovered,
            "failed_points": failed,
            "passed": check.sup_stable and not failed,
        }

        stage = "probe"
        probe_spec = spectrum if spectrum.source == "explicit" else spectrum.resized(probe_modes)
        probe = witness_sequence(params, probe_spec, fit_decades=fit_decades)
        summary = probe.summary()
        if theta < 1:
            expected, band = 1.0 - theta, 0.1
            measured = probe.amplified_fit.exponent
            quantity = "amplified"
        else:
            expected, band = 0.0, 0.05
            measured = probe.coefficient_fit.exponent
            quantity = "abs_coeff"
        report["analyticity"] = {
            **summary,
            "probe_modes": len(probe_spec),
            "growth_exponent": probe.amplified_fit.exponent,
            "readings": {
                "norm_ratio": probe.amplified_fit.exponent,
                "unit_forcing": probe.unit_forcing_fit.exponent,
            },
            "checked_quantity": quantity,
            "expected_exponent": expected,
            "band": band,
            "passed": abs(measured - expected) <= band,
        }
    except Exception as exc:  # noqa: BLE001  (reported with the stage name)
        report["error"] = {"stage": stage, "message": f"{type(exc).__name__}: {exc}"}
        report["passed"] = False
        return 2, report

    report["passed"] = all(report[k]["passed"] for k in ("stability", "resolvent", "analyticity"))
    return (0 if report["passed"] else 1), report


def cmd_certify(cfg, args, emit):
    code, report = certify(
        cfg, args.lmin, args.lmax, args.points, args.probe_modes, args.fit_decades
    )
    emit.summary("certify", report, primary=True)
    if code == 2:
        emit.stderr.write(f"certify failed at stage {report['error']['stage']!r}: {report['error']['message']}\n")
    return code


# ---------------------------------------------------------------- parser


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_global(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--config", default=d, metavar="PATH", help="key=value parameter file")
    p.add_argument("--out", default=d, metavar="DIR", help="write outputs to files in DIR")
    p.add_argument("--format", default=d, choices=("csv", "json"))
    p.add_argument("--threads", default=d, type=int, metavar="K", help="worker threads (0 = auto)")


def _common_parent():
    p = argparse.ArgumentParser(add_help=False)
    _add_global(p, suppress=True)
    g = p.add_argument_group("model")
    for key in SYSTEM_KEYS:
        g.add_argument(f"--{key}", type=float, default=argparse.SUPPRESS)
    g.add_argument("--modes", type=int, default=argparse.SUPPRESS, metavar="N")
    g.add_argument("--geometry", choices=("interval", "rectangle", "explicit"), default=argparse.SUPPRESS)
    g.add_argument("--length", type=float, default=argparse.SUPPRESS)
    g.add_argument("--lx", type=float, default=argparse.SUPPRESS)
    g.add_argument("--ly", type=float, default=argparse.SUPPRESS)
    g.add_argument("--sigmas", default=argparse.SUPPRESS, help="comma-separated eigenvalues")
    g.add_argument("--set", action="append", default=argparse.SUPPRESS, metavar="KEY=VALUE",
                   help="override any config key (repeatable)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platenet",
        description="Spectral analysis of the damped plate / electric-network system.",
    )
    _add_global(parser, suppress=False)
    parent = _common_parent()
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("params", parents=[parent], help="print resolved parameters")
    sub.add_parser("spectrum", parents=[parent], help="Laplacian eigenvalues")
    sub.add_parser("eigs", parents=[parent], help="modal generator eigenvalues")

    p = sub.add_parser("abscissa", parents=[parent], help="spectral abscissa")
    p.add_argument("--thetas", type=_float_list, default=None, help="comma-separated theta values")

    p = sub.add_parser("resolvent", parents=[parent], help="resolvent norm sweep")
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=1e3)
    p.add_argument("--points", type=int, default=61)
    p.add_argument("--per-mode", action="store_true", help="also dump per-mode norms")

    p = sub.add_parser("simulate", parents=[parent], help="energy trajectory")
    p.add_argument("--init", choices=PRESETS, default="random-unit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tend", type=float, default=200.0)
    p.add_argument("--samples", type=int, default=401)

    p = sub.add_parser("probe", parents=[parent], help="analyticity witness sequence")
    p.add_argument("--fit-decades", type=float, default=2.0)

    p = sub.add_parser("certify", parents=[parent], help="combined stability / analyticity report")
    p.add_argument("--lmin", type=float, default=1.0)
    p.add_argument("--lmax", type=float, default=1e3)
    p.add_argument("--points", type=int, default=61)
    p.add_argument("--probe-modes", type=int, default=2048)
    p.add_argument("--fit-decades", type=float, default=2.0)
    return parser


COMMANDS = {
    "params": cmd_params,
    "spectrum": cmd_spectrum,
    "eigs": cmd_eigs,
    "abscissa": cmd_abscissa,
    "resolvent": cmd_resolvent,
    "simulate": cmd_simulate,
    "probe": cmd_probe,
    "certify": cmd_certify,
}


def _resolve_threads(value):
    if value is None:
        env = os.environ.get("PLATENET_THREADS")
        if env is None or env == "":
            return 1
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"PLATENET_THREADS must be an integer, got {env!r}") from None
    if value < 0:
        raise ConfigError("--threads must be >= 0")
    return value or (os.cpu_count() or 1)


def config_from_args(args) -> RunConfig:
    overrides = {}
    for key in SYSTEM_KEYS + ("modes", "geometry", "length", "lx", "ly", "sigmas"):
        if key in args:
            overrides[key] = getattr(args, key)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        overrides[key] = value
    return load_config(
        getattr(args, "config", None),
        overrides,
        output_format=getattr(args, "format", None) or "csv",
        out_dir=Path(args.out) if getattr(args, "out", None) else None,
        threads=_resolve_threads(getattr(args, "threads", None)),
    )


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        stderr.write(f"platenet: config error: {exc}\n")
        return 2
    emit = Emitter(cfg, stdout=stdout, stderr=stderr)
    return COMMANDS[args.command](cfg, args, emit)


if __name__ == "__main__":
    sys.exit(main())

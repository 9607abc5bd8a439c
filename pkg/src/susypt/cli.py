"""Command-line front end: ``susypt {potential,spectrum,wavefunction,bifurcation,verify}``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 domain or runtime error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complex_special import Grid
from .errors import SusyptError
from .pt_analysis import classify_branch
from .shape_invariance import (
    analytic_eigenfunction,
    closed_form_spectrum,
    descriptor,
    ladder_state,
)
from .spectral_solver import bound_spectrum, match_spectra
from .superpotential import Family, make_params, potential

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

CONFIG_KEYS = {"family", "params", "sign", "grid", "levels", "n", "tolerances", "sweep", "output", "format"}
GRID_KEYS = {"x_min", "x_max", "n_points"}
SWEEP_KEYS = {"param", "from", "to", "steps"}
TOLERANCE_DEFAULTS = {"match": 1e-2, "amplitude": 1e-4}
PARAM_NAMES = ("A", "B", "C_pt", "alpha", "alpha_c", "beta")


class ConfigError(SusyptError, ValueError):
    """The run configuration is malformed or inconsistent."""


@dataclass
class Sweep:
    param: str
    start: float
    stop: float
    steps: int

    def values(self) -> list:
        if self.start == self.stop or self.steps == 1:
            return [float(self.start)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


@dataclass
class RunConfig:
    family: Family
    params: dict
    sign: int = 1
    grid: Grid | None = None
    levels: int | None = None
    n: int = 0
    tolerances: dict = field(default_factory=lambda: dict(TOLERANCE_DEFAULTS))
    sweep: Sweep | None = None
    output: str | None = None
    format: str = "csv"

    @property
    def param_set(self):
        return make_params(self.family, **self.params)

    def resolved_grid(self) -> Grid:
        if self.grid is not None:
            return self.grid
        if self.family is Family.COULOMB_COMPLEX:
            return Grid(0.01, 60.0, 1500)
        if self.family.half_line:
            return Grid(0.01, 20.0, 1000)
        return Grid.symmetric(14.0, 701)


def _reject_unknown(section: str, got: dict, allowed: set):
    extra = set(got) - allowed
    if extra:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(sorted(extra))}")


def _number(where, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return value


def _parse_sign(value) -> int:
    if value in ("plus", "+", 1):
        return 1
    if value in ("minus", "-", -1):
        return -1
    raise ConfigError(f"sign must be 'plus' or 'minus', got {value!r}")


def parse_config(doc) -> RunConfig:
    """Build a :class:`RunConfig` from a decoded JSON object and revalidate parameters."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown("config", doc, CONFIG_KEYS)
    if "family" not in doc:
        raise ConfigError("config needs a 'family'")
    try:
        family = Family.parse(doc["family"])
    except SusyptError as exc:
        raise ConfigError(str(exc)) from None
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    _reject_unknown("params", params, set(PARAM_NAMES))
    params = {k: _number(f"params.{k}", v) for k, v in params.items()}

    grid = None
    if "grid" in doc:
        g = doc["grid"]
        if not isinstance(g, dict):
            raise ConfigError("'grid' must be an object")
        _reject_unknown("grid", g, GRID_KEYS)
        missing = GRID_KEYS - set(g)
        if missing:
            raise ConfigError(f"grid is missing {', '.join(sorted(missing))}")
        n_points = _number("grid.n_points", g["n_points"])
        if int(n_points) != n_points:
            raise ConfigError("grid.n_points must be an integer")
        try:
            grid = Grid(float(_number("grid.x_min", g["x_min"])), float(_number("grid.x_max", g["x_max"])),
                        int(n_points))
        except SusyptError as exc:
            raise ConfigError(str(exc)) from None

    def _count(key, minimum):
        if key not in doc or doc[key] is None:
            return None
        v = doc[key]
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            raise ConfigError(f"'{key}' must be an integer >= {minimum}, got {v!r}")
        return v

    levels = _count("levels", 1)
    n = _count("n", 0) or 0

    tolerances = dict(TOLERANCE_DEFAULTS)
    if "tolerances" in doc:
        tol = doc["tolerances"]
        if not isinstance(tol, dict):
            raise ConfigError("'tolerances' must be an object")
        _reject_unknown("tolerances", tol, set(TOLERANCE_DEFAULTS))
        for k, v in tol.items():
            if not _number(f"tolerances.{k}", v) > 0:
                raise ConfigError(f"tolerances.{k} must be positive")
            tolerances[k] = float(v)

    sweep = None
    if doc.get("sweep") is not None:
        s = doc["sweep"]
        if not isinstance(s, dict):
            raise ConfigError("'sweep' must be an object")
        _reject_unknown("sweep", s, SWEEP_KEYS)
        if set(s) != SWEEP_KEYS:
            raise ConfigError(f"sweep needs keys {', '.join(sorted(SWEEP_KEYS))}")
        if s["param"] not in PARAM_NAMES:
            raise ConfigError(f"sweep.param must be one of {', '.join(PARAM_NAMES)}")
        steps = s["steps"]
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
            raise ConfigError("sweep.steps must be an integer >= 1")
        sweep = Sweep(s["param"], float(_number("sweep.from", s["from"])),
                      float(_number("sweep.to", s["to"])), steps)

    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("'output' must be a path string")

    cfg = RunConfig(family, params, _parse_sign(doc.get("sign", "plus")), grid, levels, n,
                    tolerances, sweep, output, fmt)
    try:
        cfg.param_set
        if sweep is not None:
            for value in (sweep.start, sweep.stop):
                make_params(family, **_swept_params(cfg, value))
    except SusyptError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from None
    return parse_config(doc)


def _swept_params(cfg: RunConfig, value: float) -> dict:
    params = dict(cfg.params)
    params[cfg.sweep.param] = value
    if cfg.family is Family.SCARF2_BROKEN and cfg.sweep.param != "B":
        params.pop("B", None)  # re-derived so the point stays on A = B - alpha/2
    return params


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def fmt_number(x) -> str:
    """Shortest string that round-trips the double; ``-0.0`` is written as ``0.0``."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x == 0.0:
        x = 0.0
    return repr(x)


def write_table(columns, rows, cfg: RunConfig, override: str | None):
    path = override or cfg.output
    if cfg.format == "json":
        records = [
            {c: (v if isinstance(v, str) else (int(v) if isinstance(v, (int, np.integer)) else
                                               (None if math.isnan(float(v)) else float(v) + 0.0)))
             for c, v in zip(columns, row)}
            for row in rows
        ]
        text = json.dumps({"columns": list(columns), "rows": records}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(v if isinstance(v, str) else fmt_number(v) for v in row) + "\n")
        text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_potential(cfg: RunConfig, args) -> int:
    p = cfg.param_set
    grid = cfg.resolved_grid()
    sign = +1 if args.plus else -1
    v = potential(cfg.family, p, sign, grid, cfg.sign)
    rows = [(x, z.real, z.imag) for x, z in zip(grid.nodes, v.values)]
    write_table(("x", "re_V", "im_V"), rows, cfg, args.output)
    return EXIT_OK


def _default_levels(cfg: RunConfig, p) -> int:
    n_max = descriptor(cfg.family, cfg.sign).n_max_rule(p)
    return max(n_max + 1, 1)


def cmd_spectrum(cfg: RunConfig, args) -> int:
    p = cfg.param_set
    grid = cfg.resolved_grid()
    levels = cfg.levels or _default_levels(cfg, p)
    analytic = closed_form_spectrum(cfg.family, p, cfg.sign, levels, bound_only=True)
    v = potential(cfg.family, p, -1, grid, cfg.sign)
    numeric = bound_spectrum(v, amplitude_tol=cfg.tolerances["amplitude"]).eigenvalues
    # numeric values sit in the asymptotic convention; move them to E0 = 0
    report = match_spectra(numeric - analytic.offset, analytic, cfg.tolerances["match"])
    found = {n: (num, err) for n, _, num, err in report.matched + report.unmatched_analytic}
    rows = []
    for n, e in enumerate(analytic.energies):
        num, err = found[n]
        num = complex("nan") if num is None else num
        rows.append((n, e.real, e.imag, num.real, num.imag, err))
    write_table(("n", "re_E_analytic", "im_E_analytic", "re_E_numeric", "im_E_numeric", "abs_err"),
                rows, cfg, args.output)
    label = analytic.branch.value if cfg.family.is_scarf else classify_branch(p).value
    print(f"branch: {label}", file=sys.stderr)
    if not report.all_matched:
        print(f"unmatched levels: {[u[0] for u in report.unmatched_analytic]} "
              f"(tolerance {cfg.tolerances['match']:g})", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_wavefunction(cfg: RunConfig, args) -> int:
    p = cfg.param_set
    grid = cfg.resolved_grid()
    if args.ladder:
        psi = ladder_state(descriptor(cfg.family, cfg.sign), p, cfg.n, grid)
        if cfg.family.is_scarf:
            ref = analytic_eigenfunction(cfg.family, p, cfg.sign, cfg.n, grid).values
            overlap = abs(np.vdot(ref, psi.values)) / (np.linalg.norm(ref) * np.linalg.norm(psi.values))
            print(f"overlap with closed form: {overlap:.12f}", file=sys.stderr)
    else:
        psi = analytic_eigenfunction(cfg.family, p, cfg.sign, cfg.n, grid)
    rows = [(x, z.real, z.imag, abs(z)) for x, z in zip(grid.nodes, psi.values)]
    write_table(("x", "re_psi", "im_psi", "abs_psi"), rows, cfg, args.output)
    return EXIT_OK


def _sweep_point(cfg: RunConfig, grid: Grid, value: float):
    p = make_params(cfg.family, **_swept_params(cfg, value))
    label = classify_branch(p).value if cfg.family.is_scarf else "NonPT"
    if cfg.family is Family.SCARF2_REAL:
        label = "RealSpectrum"
    v = potential(cfg.family, p, -1, grid, cfg.sign)
    levels = bound_spectrum(v, amplitude_tol=cfg.tolerances["amplitude"]).eigenvalues
    return [(value, n, e.real, e.imag, label) for n, e in enumerate(levels)]


def sweep_threads() -> int:
    raw = os.environ.get("SUSYPT_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SUSYPT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"SUSYPT_THREADS must be a positive integer, got {raw!r}")
    return n


def cmd_bifurcation(cfg: RunConfig, args) -> int:
    if cfg.sweep is None:
        raise ConfigError("bifurcation needs a 'sweep' section")
    grid = cfg.resolved_grid()
    values = cfg.sweep.values()
    workers = min(sweep_threads(), len(values))
    if workers == 1:
        chunks = [_sweep_point(cfg, grid, v) for v in values]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda v: _sweep_point(cfg, grid, v), values))
    rows = [row for chunk in chunks for row in chunk]
    write_table(("param", "n", "re_E", "im_E", "branch"), rows, cfg, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_verify

    width = 46

    def show(result):
        mark = "PASS" if result.passed else "FAIL"
        print(f"{mark}  {result.name:<{width}} {result.detail}  [{result.seconds:.1f}s]", flush=True)

    report = run_verify(fault=args.inject_fault, progress=show)
    print(f"CC-branch n^2 sign: {report.n2_sign} (numeric arbitration)")
    for finding in report.findings:
        print(f"finding: {finding}")
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_VERIFY
    print(f"all {len(report.checks)} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="susypt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--output", help="output path (default: config 'output' or stdout)")
        sp.add_argument("--sign", choices=("plus", "minus"), help="superpotential branch (overrides config)")
        return sp

    sp = with_config("potential", "sample V- (or V+ with --plus)")
    sp.add_argument("--plus", action="store_true", help="emit the partner V+ instead of V-")
    with_config("spectrum", "closed-form vs numeric bound spectrum")
    sp = with_config("wavefunction", "closed-form eigenfunction (or ladder construction)")
    sp.add_argument("--ladder", action="store_true", help="build the state with raising operators")
    with_config("bifurcation", "numeric spectra along a parameter sweep")
    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--inject-fault", choices=("param_step",), default=None, help=argparse.SUPPRESS)
    return parser


COMMANDS = {
    "potential": cmd_potential,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "bifurcation": cmd_bifurcation,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "verify":
        return cmd_verify(args)
    try:
        cfg = load_config(args.config)
        if args.sign:
            cfg.sign = _parse_sign(args.sign)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SusyptError, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``qr universal|gauge|reflect|fit-b|check``.

Every CSV starts with ``#`` comment lines recording the package version,
the fully resolved configuration and the units. Numbers are written in
shortest round-trip form so that identical configurations give
byte-identical files. Exit codes: 0 success, 1 numeric failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, gauge, scatter
from .errors import ConfigurationError, DomainError, NumericError
from .potentials import (
    C3C4,
    PRESET_ELL,
    SILICA_LIKE_C3,
    PureC4,
    ScatteringProblem,
    Tabulated,
    c4_from_ell,
)
from .units import HYDROGEN_MASS, Particle, parse_energy

UNITS_LINE = "# units: length a0, energy hartree, kappa a0^-1 (atomic units, hbar = m_e = 1)"

# key -> (type, default); shared by flags and config files
KEYS = {
    "potential": (str, "c4"),
    "ell": (float, None),
    "lambda3": (float, None),
    "c3": (float, None),
    "c4": (float, None),
    "table": (str, None),
    "preset": (int, None),
    "mass": (float, HYDROGEN_MASS),
    "energy": (str, None),
    "kappa_ell": (str, None),
    "kappa_grid": (str, None),
    "kappa_ell_grid": (str, None),
    "b": (float, None),
    "fit_b": (bool, False),
    "out": (str, None),
    "rel_tol": (float, scatter.SolverConfig.rel_tol),
    "badlands_threshold": (float, scatter.SolverConfig.badlands_threshold),
    "threads": (int, 1),
    "u_min": (float, -5.0),
    "u_max": (float, 5.0),
    "n": (int, None),
    "span": (float, 3.0),
}


def fmt(x):
    """Shortest round-trip representation of a float."""
    return repr(float(x))


def _read_config(path):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    try:
        parser.read_string("[qr]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from None
    out = {}
    for key, raw in parser["qr"].items():
        key = key.replace("-", "_")
        if key not in KEYS:
            raise ConfigurationError(f"unknown config key {key!r} in {path}")
        out[key] = raw.strip()
    return out


def _convert(key, raw):
    typ = KEYS[key][0]
    if typ is bool:
        if isinstance(raw, bool):
            return raw
        return raw.lower() in ("1", "true", "yes", "on")
    try:
        return typ(raw)
    except ValueError:
        raise ConfigurationError(f"bad value for {key}: {raw!r}") from None


@dataclass
class RunConfig:
    """Resolved settings: flags override config-file keys override defaults."""

    command: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def header(self):
        items = "; ".join(f"{k}={self.values[k]}" for k in sorted(self.values)
                          if self.values[k] is not None)
        return [f"# qrefl {__version__}", f"# command: {self.command}",
                f"# config: {items}", UNITS_LINE]


def resolve(args):
    file_values = _read_config(args.config) if args.config else {}
    values = {}
    for key, (_, default) in KEYS.items():
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            values[key] = _convert(key, flag)
        elif key in file_values:
            values[key] = _convert(key, file_values[key])
        else:
            values[key] = default
    return RunConfig(args.command, values)


def _list(text):
    return [s.strip() for s in text.split(",") if s.strip()]


def build_particle(cfg):
    return Particle(cfg.mass, "H" if cfg.mass == HYDROGEN_MASS else "custom")


def build_potential(cfg, particle):
    sources = [k for k in ("ell", "preset", "c4") if cfg.values[k] is not None]
    kind = cfg.potential
    if kind not in ("c4", "c3c4", "table"):
        raise ConfigurationError(f"unknown potential model {kind!r}")
    if len(sources) > 1:
        raise ConfigurationError(f"give exactly one of --ell, --preset, --c4 (got {sources})")
    if not sources:
        raise ConfigurationError("potential needs one of --ell, --preset or --c4")
    if cfg.preset is not None:
        if cfg.preset not in PRESET_ELL:
            raise ConfigurationError(
                f"unknown porosity preset {cfg.preset}; choose from {sorted(PRESET_ELL)}")
        c4 = c4_from_ell(PRESET_ELL[cfg.preset], particle)
        label = f"eta={cfg.preset}%"
    elif cfg.ell is not None:
        c4 = c4_from_ell(cfg.ell, particle)
        label = f"ell={cfg.ell}"
    else:
        c4 = cfg.c4
        label = f"C4={cfg.c4}"
    if kind == "c4":
        if cfg.lambda3 is not None or cfg.c3 is not None:
            raise ConfigurationError("the c4 model takes no cliff-side parameter")
        return PureC4(c4, label)
    if kind == "c3c4":
        if cfg.lambda3 is not None and cfg.c3 is not None:
            raise ConfigurationError("give at most one of --lambda3, --c3")
        c3 = cfg.c3 if cfg.c3 is not None else (
            c4 / cfg.lambda3 if cfg.lambda3 is not None else SILICA_LIKE_C3)
        return C3C4(c3, c4, label)
    if cfg.table is None or cfg.c3 is None:
        raise ConfigurationError("the table model needs --table and --c3")
    return Tabulated.from_csv(cfg.table, cfg.c3, c4)


def parse_grid(text):
    parts = _list(text)
    if len(parts) != 4 or parts[3] not in ("log", "lin"):
        raise ConfigurationError(f"grid {text!r} must read min,max,n,log|lin")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigurationError(f"grid {text!r} must read min,max,n,log|lin") from None
    if n < 1 or not (0 < lo <= hi) or (n > 1 and lo == hi):
        raise ConfigurationError(f"invalid grid {text!r}")
    if n == 1:
        return np.array([lo])
    return np.logspace(math.log10(lo), math.log10(hi), n) if parts[3] == "log" else np.linspace(lo, hi, n)


def _problems(cfg, potential, particle):
    """One ScatteringProblem per requested energy or kappa*ell value."""
    out = []
    if cfg.energy is not None:
        for text in _list(cfg.energy):
            e = parse_energy(text)
            if not e > 0:
                raise ConfigurationError(f"energy must be positive, got {text}")
            out.append((text.replace(" ", ""), ScatteringProblem(potential, particle, e)))
    if cfg.kappa_ell is not None:
        for text in _list(cfg.kappa_ell):
            try:
                kl = float(text)
            except ValueError:
                raise ConfigurationError(f"bad kappa*ell value {text!r}") from None
            if not kl > 0:
                raise ConfigurationError(f"kappa*ell must be positive, got {text}")
            out.append((f"kl{text}", ScatteringProblem.from_kappa_ell(potential, kl, particle)))
    if not out:
        raise ConfigurationError("give --energy or --kappa-ell")
    return out


def _solver_config(cfg):
    return scatter.SolverConfig(rel_tol=cfg.rel_tol, badlands_threshold=cfg.badlands_threshold)


def _write(path, lines):
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {path}: {exc}") from None


# --- subcommands ------------------------------------------------------------

def cmd_universal(cfg):
    n = cfg.n if cfg.n is not None else 1001
    if n < 2:
        raise ConfigurationError("universal needs n >= 2")
    if not cfg.u_min <= cfg.u_max:
        raise ConfigurationError("need u_min <= u_max")
    curve = gauge.universal_curve(np.linspace(cfg.u_min, cfg.u_max, n))
    lines = cfg.header() + [f"# z0_bold = {fmt(gauge.Z0_BOLD)}", "u,z_bold,V_bold"]
    lines += [f"{fmt(u)},{fmt(z)},{fmt(v)}" for u, z, v in zip(curve.u, curve.z_bold, curve.v_bold)]
    _write(cfg.out, lines)
    return 0


def _gauge_path(out, label, many):
    if out is None or not many:
        return out
    p = Path(out)
    return str(p.with_name(f"{p.stem}_{label}{p.suffix or '.csv'}"))


def cmd_gauge(cfg):
    particle = build_particle(cfg)
    potential = build_potential(cfg, particle)
    problems = _problems(cfg, potential, particle)
    n = cfg.n if cfg.n is not None else 601
    if n < 2:
        raise ConfigurationError("gauge needs n >= 2")
    for label, problem in problems:
        zs = problem.z_scale
        grid = zs * np.logspace(-cfg.span, cfg.span, n)
        prof = gauge.wkb_gauge(problem, grid)
        lines = cfg.header() + [
            f"# energy_hartree = {fmt(problem.energy)}",
            f"# E_bold = {fmt(prof.e_bold)}",
            f"# kappa_ell = {fmt(prof.kappa_ell)}",
            f"# V_bold_ends = {fmt(prof.v_bold[0])},{fmt(prof.v_bold[-1])}",
            "z_a0,z_bold,V_bold",
        ]
        lines += [f"{fmt(a)},{fmt(b)},{fmt(c)}" for a, b, c in prof]
        _write(_gauge_path(cfg.out, label, len(problems) > 1), lines)
    return 0


def _kappas(cfg, problem):
    if cfg.kappa_grid is not None and cfg.kappa_ell_grid is not None:
        raise ConfigurationError("give only one of --kappa-grid, --kappa-ell-grid")
    if cfg.kappa_grid is not None:
        return parse_grid(cfg.kappa_grid)
    if cfg.kappa_ell_grid is not None:
        return parse_grid(cfg.kappa_ell_grid) / problem.ell
    return None


def cmd_reflect(cfg):
    particle = build_particle(cfg)
    potential = build_potential(cfg, particle)
    template = ScatteringProblem.from_kappa_ell(potential, 1.0, particle)
    kappas = _kappas(cfg, template)
    if kappas is None:
        raise ConfigurationError("reflect needs --kappa-grid or --kappa-ell-grid")
    solver = _solver_config(cfg)
    scan = scatter.reflection_scan(template, kappas, solver, workers=cfg.threads)
    b = cfg.b
    extra = []
    status = 1 if scan.failures else 0
    if b is None and cfg.fit_b:
        try:
            fit = scatter.extract_b(scan)
        except NumericError as exc:
            extra.append(f"# b fit failed: {exc}")
            print(f"qr: numeric failure: {exc}", file=sys.stderr)
            status = 1
        else:
            b = fit.b
            extra.append(f"# fitted b = {fmt(b)} (residual {fmt(fit.residual)}, {fit.points} points)")
    cols = ["kappa_inv_a0"] + (["kappa_b"] if b is not None else []) + ["R", "T", "unitarity_defect"]
    lines = cfg.header() + [f"# ell = {fmt(template.ell)}"] + extra
    body = []
    for row in scan.rows:
        vals = [row.kappa] + ([row.kappa * b] if b is not None else []) + [row.R, row.T, row.defect]
        body.append(",".join(fmt(v) for v in vals))
        if not row.ok:
            lines.append(f"# failed: kappa={fmt(row.kappa)}: {row.error}")
    lines.append(f"# monotone_decreasing = {scan.monotone_decreasing}")
    lines += [",".join(cols)] + body
    _write(cfg.out, lines)
    return status


def cmd_fit_b(cfg):
    particle = build_particle(cfg)
    potential = build_potential(cfg, particle)
    template = ScatteringProblem.from_kappa_ell(potential, 1.0, particle)
    kappas = _kappas(cfg, template)
    if kappas is None:
        kappas = np.logspace(-4, math.log10(5e-3), 8) / template.ell
    scan = scatter.reflection_scan(template, kappas, _solver_config(cfg), workers=cfg.threads)
    fit = scatter.extract_b(scan)
    report = [
        f"model = {potential.label} ({type(potential).__name__})",
        f"ell_a0 = {fmt(template.ell)}",
        f"b_a0 = {fmt(fit.b)}",
        f"b_over_ell = {fmt(fit.b / template.ell)}",
        f"slope_a0^2 = {fmt(fit.slope)}",
        f"residual = {fmt(fit.residual)}",
        f"points = {fit.points}",
        f"kappa_window_inv_a0 = {fmt(fit.fit_window[0])},{fmt(fit.fit_window[1])}",
    ]
    _write(cfg.out, report)
    return 0


def cmd_check(cfg):
    particle = build_particle(cfg)
    potential = build_potential(cfg, particle)
    problems = _problems(cfg, potential, particle)
    if len(problems) != 1:
        raise ConfigurationError("check takes a single energy or kappa*ell")
    problem = problems[0][1]
    res = scatter.check_gauge_invariance(problem, gauge.wkb_gauge_map(problem), _solver_config(cfg))
    o, t = res.original, res.transformed
    report = [
        f"map = {res.map_name}",
        f"kappa_ell = {fmt(problem.kappa_ell)}",
        f"r = {o.r!r}",
        f"r_tilde = {t.r!r}",
        f"t = {o.t!r}",
        f"t_tilde = {t.t!r}",
        f"abs_r_minus_r_tilde = {fmt(res.dr)}",
        f"abs_t_minus_t_tilde = {fmt(res.dt)}",
        f"R = {fmt(o.R)}",
        f"unitarity_defect = {fmt(o.unitarity_defect)}",
        f"unitarity_defect_tilde = {fmt(t.unitarity_defect)}",
        f"wronskian_drift = {fmt(o.wronskian_drift)}",
        f"wronskian_drift_tilde = {fmt(t.wronskian_drift)}",
    ]
    _write(cfg.out, report)
    return 0


COMMANDS = {
    "universal": cmd_universal,
    "gauge": cmd_gauge,
    "reflect": cmd_reflect,
    "fit-b": cmd_fit_b,
    "check": cmd_check,
}


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out", help="output path (stdout when omitted)")
    pot = argparse.ArgumentParser(add_help=False)
    pot.add_argument("--potential", choices=["c4", "c3c4", "table"])
    pot.add_argument("--ell", type=float, help="far-end length sqrt(2 m C4) in a0")
    pot.add_argument("--preset", type=int, help="porosity preset in %% (sets ell)")
    pot.add_argument("--c4", type=float, help="C4 in hartree a0^4")
    pot.add_argument("--c3", type=float, help="C3 in hartree a0^3")
    pot.add_argument("--lambda3", type=float, help="C4/C3 in a0")
    pot.add_argument("--table", help="CSV file with header z_a0,V_hartree")
    pot.add_argument("--mass", type=float, help="particle mass in electron masses")
    pot.add_argument("--rel-tol", dest="rel_tol", type=float)
    pot.add_argument("--badlands-threshold", dest="badlands_threshold", type=float)
    pot.add_argument("--threads", type=int, help="worker processes for scans")
    energy = argparse.ArgumentParser(add_help=False)
    energy.add_argument("--energy", help="comma-separated energies, e.g. 0.001neV,0.1neV")
    energy.add_argument("--kappa-ell", dest="kappa_ell", help="comma-separated kappa*ell values")
    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--kappa-grid", dest="kappa_grid", help="min,max,n,log|lin in a0^-1")
    grid.add_argument("--kappa-ell-grid", dest="kappa_ell_grid", help="min,max,n,log|lin in kappa*ell")

    parser = argparse.ArgumentParser(prog="qr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qrefl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("universal", parents=[common], help="universal C4 wall table")
    p.add_argument("--u-min", dest="u_min", type=float)
    p.add_argument("--u-max", dest="u_max", type=float)
    p.add_argument("-n", type=int)
    p = sub.add_parser("gauge", parents=[common, pot, energy], help="WKB-gauge wall profiles")
    p.add_argument("-n", type=int, help="grid points")
    p.add_argument("--span", type=float, help="decades either side of sqrt(ell/kappa)")
    p = sub.add_parser("reflect", parents=[common, pot, grid], help="reflection scan")
    p.add_argument("--b", type=float, help="b in a0 for the kappa_b column")
    p.add_argument("--fit-b", dest="fit_b", action="store_true", help="fit b from the scan")
    sub.add_parser("fit-b", parents=[common, pot, grid], help="low-energy parameter b")
    sub.add_parser("check", parents=[common, pot, energy], help="gauge invariance check")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qr: error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"qr: numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

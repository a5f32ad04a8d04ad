"""Command-line front end.

Settings come from defaults, then an optional ``key = value`` config file,
then the ``GALILEO_LAWS_OUT`` environment variable (output directory only),
then command-line flags.  Exit codes: 0 pass, 1 check failure, 2 usage or
configuration error, 3 runtime abort.
"""
import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import solver, thermo
from .errors import (ConfigError, DomainError, GalileoError, HyperbolicityError,
                     NoSolutionError, SolverAbort)
from .group import apply, boost
from .output import (write_convergence, write_convergence_script, write_profiles_script,
                     write_snapshot)
from .systems import FIXTURES, REGISTERED, make_system
from .verifier import SampleSpec, run_suite

OUT_ENV = "GALILEO_LAWS_OUT"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3

DEFAULTS = {
    "system": "eulergas",
    "a": None,
    "b": None,
    "gamma": 1.4,
    "closure": None,
    "out": "galileo_out",
    "seed": None,
    "all": False,
    "samples": 500,
    "hessian_samples": 10000,
    "workers": 1,
    "state": None,
    "ic": "riemann",
    "left": None,
    "right": None,
    "interface": 0.5,
    "table": None,
    "v0": 0.0,
    "cells": 400,
    "x_min": 0.0,
    "x_max": 1.0,
    "boundary": None,
    "tend": 0.2,
    "cfl": 0.45,
    "snapshots": 0,
    "v": 0.5,
    "grids": "200,400,800",
    "point": None,
    "slopes": None,
}

FLOAT_KEYS = {"a", "b", "gamma", "interface", "v0", "x_min", "x_max", "tend", "cfl", "v"}
INT_KEYS = {"seed", "samples", "hessian_samples", "workers", "cells", "snapshots"}
BOOL_KEYS = {"all"}
VECTOR_KEYS = {"state", "left", "right", "point", "slopes"}


@dataclass
class RunConfig:
    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def system(self):
        kw = {"gamma": self.gamma}
        for k in ("a", "b", "closure"):
            if self.values.get(k) is not None:
                kw[k] = self.values[k]
        try:
            return make_system(self.values["system"], **kw)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None


def _convert(key, raw, where):
    if raw is None:
        return None
    try:
        if key in FLOAT_KEYS:
            x = float(raw)
            if not np.isfinite(x):
                raise ValueError
            return x
        if key in INT_KEYS:
            return int(raw)
        if key in BOOL_KEYS:
            if isinstance(raw, bool):
                return raw
            low = str(raw).strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError
            return low in ("true", "1", "yes")
        if key in VECTOR_KEYS:
            if isinstance(raw, (list, tuple, np.ndarray)):
                v = np.asarray(raw, dtype=float)
            else:
                v = np.array([float(t) for t in str(raw).split(",")])
            if not np.all(np.isfinite(v)):
                raise ValueError
            return v
    except ValueError:
        raise ConfigError(f"{where}: invalid value {raw!r} for {key}") from None
    return raw


def parse_config_file(path):
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key = value")
        key, val = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{no}: unknown field {key!r}")
        out[key] = _convert(key, val, f"{path}:{no}")
    return out


def build_config(args):
    values = dict(DEFAULTS)
    if args.config:
        values.update(parse_config_file(args.config))
    if os.environ.get(OUT_ENV):
        values["out"] = os.environ[OUT_ENV]
    for key, val in vars(args).items():
        if key in DEFAULTS and val is not None:
            values[key] = _convert(key, val, f"--{key.replace('_', '-')}")
    return RunConfig(values)


# --- initial data ---------------------------------------------------------------

def default_riemann(system):
    if system.rep.kind == "nilpotent":
        return solver.sod(system)
    if system.family == "Cemracs":
        return solver.RiemannIC((1.0, 0.0, 1.0), (0.5, 0.0, 0.5), 0.5)
    if system.m == 2:
        return solver.RiemannIC((1.0, 0.0), (0.5, 0.0), 0.5)
    return solver.RiemannIC((1.0, 0.0, 0.5), (0.5, 0.0, -0.5), 0.5)


def smooth_sine(system, v0=0.0, amplitude=0.2):
    """Rest density modulated by a sine, boosted by ``v0``; periodic on [0, 1]."""
    ref = default_riemann(system).left
    Y = boost(system.rep, v0)

    def ic(x):
        theta = ref[0] * (1.0 + amplitude * np.sin(2.0 * np.pi * x))
        rest = system.rest_state(theta, ref[2]) if system.m == 3 else system.rest_state(theta)
        return apply(Y, rest)

    return ic


def table_ic(path, m):
    data = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if data.shape[1] != m + 1:
        raise ConfigError(f"{path}: table needs columns x and {m} state components")
    data = data[np.argsort(data[:, 0], kind="stable")]

    def ic(x):
        k = np.clip(np.searchsorted(data[:, 0], x, side="right") - 1, 0, len(data) - 1)
        return data[k, 1:].T

    return ic


def make_ic(cfg, system):
    kind = cfg.ic
    if kind in ("riemann", "sod"):
        if kind == "sod" and system.rep.kind != "nilpotent":
            raise ConfigError("the sod data needs a nilpotent system (nil3 or eulergas)")
        base = default_riemann(system)
        left = base.left if cfg.left is None else tuple(cfg.left)
        right = base.right if cfg.right is None else tuple(cfg.right)
        for name, st in (("left", left), ("right", right)):
            if len(st) != system.m:
                raise ConfigError(f"{name} state needs {system.m} components")
        return solver.RiemannIC(left, right, cfg.interface)
    if kind == "smooth-sine":
        return smooth_sine(system, cfg.v0)
    if kind == "table":
        if not cfg.table:
            raise ConfigError("ic = table needs a table file")
        return table_ic(cfg.table, system.m)
    raise ConfigError(f"unknown ic {kind!r}; choose riemann, sod, smooth-sine or table")


def make_grid(cfg, n_cells=None):
    boundary = cfg.boundary or ("periodic" if cfg.ic == "smooth-sine" else "transmissive")
    try:
        return solver.Grid1D(n_cells or cfg.cells, cfg.x_min, cfg.x_max, boundary)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _outdir(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


# --- commands -------------------------------------------------------------------------

def cmd_check(cfg, stdout=sys.stdout):
    if cfg.seed is None:
        raise ConfigError("check needs a seed (--seed or seed = ... in the config)")
    if cfg.all:
        names = list(REGISTERED)
    else:
        names = [cfg.values["system"]]
    systems = [RunConfig({**cfg.values, "system": n}).system() for n in names]
    spec = SampleSpec(n=cfg.samples, n_hessian=cfg.hessian_samples)
    report = run_suite(systems, cfg.seed, spec, workers=cfg.workers)
    out = _outdir(cfg)
    text = report.to_text()
    with open(os.path.join(out, "report.txt"), "w") as fh:
        fh.write(text)
    with open(os.path.join(out, "report.csv"), "w") as fh:
        fh.write(report.to_csv())
    stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_eigen(cfg, stdout=sys.stdout):
    system = cfg.system()
    if cfg.state is None:
        raise ConfigError("eigen needs --state")
    W = np.asarray(cfg.state, dtype=float)
    if W.shape != (system.m,):
        raise ConfigError(f"{system.name} states have {system.m} components")
    bad = system.cone_violation(W)
    if bad is not None:
        raise ConfigError(f"state {W.tolist()} is outside the {system.name} cone: requires {bad}")
    numeric = system.char_speeds(W, numeric=True)
    stdout.write(f"system {system.name} state {', '.join(repr(float(w)) for w in W)}\n")
    stdout.write("index  speed\n")
    if system.analytic_speeds:
        analytic = system.char_speeds(W)
        for i, lam in enumerate(analytic):
            stdout.write(f"{i:5d}  {lam: .9f}\n")
        stdout.write(f"numeric  {' '.join(f'{x: .9f}' for x in numeric)}\n")
        stdout.write(f"residual {float(np.max(np.abs(analytic - numeric))):.3e}\n")
    else:
        for i, lam in enumerate(numeric):
            stdout.write(f"{i:5d}  {lam: .9f}\n")
        stdout.write("no closed form; speeds are eigenvalues of the finite-difference Jacobian\n")
    return EXIT_OK


def cmd_evolve(cfg, stdout=sys.stdout):
    system = cfg.system()
    grid = make_grid(cfg)
    ic = make_ic(cfg, system)
    history = solver.evolve(system, ic, grid, cfg.tend, cfg.cfl,
                            snapshot_every=cfg.snapshots, workers=cfg.workers)
    out = _outdir(cfg)
    files = [write_snapshot(os.path.join(out, f"snapshot_{k:04d}.csv"), system, f)
             for k, f in enumerate(history)]
    write_profiles_script(os.path.join(out, "profiles.gp"), files, system)
    last = history[-1]
    stdout.write(f"{system.name}: {last.steps} steps to t = {last.time!r}, "
                 f"{len(files)} snapshot(s) in {out}\n")
    stdout.write(f"total entropy {history[0].entropy_total!r} -> {last.entropy_total!r}\n")
    return EXIT_OK


def cmd_frameshift(cfg, stdout=sys.stdout):
    system = cfg.system()
    try:
        cells = [int(t) for t in str(cfg.grids).split(",")]
    except ValueError:
        raise ConfigError(f"--grids: invalid list {cfg.grids!r}") from None
    grids = [make_grid(cfg, n) for n in cells]
    ic = make_ic(cfg, system)
    try:
        rows = solver.frame_shift_experiment(system, ic, grids, cfg.v, cfg.tend, cfg.cfl,
                                             workers=cfg.workers)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    out = _outdir(cfg)
    write_convergence(os.path.join(out, "convergence.csv"), rows)
    write_convergence_script(os.path.join(out, "convergence.gp"))
    stdout.write(f"frame shift {system.name} v = {cfg.v!r} t = {cfg.tend!r}\n")
    stdout.write("n_cells          dx            L1   order\n")
    for r in rows:
        stdout.write(f"{r.n_cells:7d}  {r.dx:.4e}  {r.l1:.6e}   {r.order:.3f}\n")
    decreasing = all(b.l1 < a.l1 for a, b in zip(rows, rows[1:]))
    if len(rows) > 1:
        stdout.write(f"fitted order {solver.fitted_order(rows):.3f}\n")
    return EXIT_OK if decreasing else EXIT_FAIL


def cmd_conjugate(cfg, stdout=sys.stdout):
    params = {}
    name = cfg.closure or "gas"
    if name in ("gas", "cemracs"):
        params["gamma"] = cfg.gamma
    try:
        clo = thermo.builtin_closure(name, **params)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if (cfg.point is None) == (cfg.slopes is None):
        raise ConfigError("conjugate needs exactly one of --point or --slopes")
    if cfg.point is not None:
        try:
            dual = thermo.conjugate_at_gradient(clo, cfg.point)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
    else:
        dual = thermo.conjugate_general(clo, cfg.slopes)
    fmt = ", ".join
    stdout.write(f"closure {clo.name}\n")
    stdout.write(f"point  {fmt(repr(float(x)) for x in np.atleast_1d(dual.point))}\n")
    stdout.write(f"slopes {fmt(repr(float(x)) for x in np.atleast_1d(dual.slopes))}\n")
    stdout.write(f"value  {float(dual.value)!r}\n")
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "eigen": cmd_eigen,
    "evolve": cmd_evolve,
    "frameshift": cmd_frameshift,
    "conjugate": cmd_conjugate,
}


def _system_flags(p):
    p.add_argument("--system", help=f"one of {', '.join(REGISTERED + FIXTURES)}")
    p.add_argument("--a", "--alpha", dest="a", help="first group parameter")
    p.add_argument("--b", "--beta", dest="b", help="second group parameter")
    p.add_argument("--gamma", help="adiabatic exponent for gas and cemracs closures")
    p.add_argument("--closure", help=f"closure name: {', '.join(thermo.CLOSURES)}")


def _run_flags(p):
    p.add_argument("--ic", help="riemann, sod, smooth-sine or table")
    p.add_argument("--left", help="left state, comma separated")
    p.add_argument("--right", help="right state, comma separated")
    p.add_argument("--interface")
    p.add_argument("--table", help="CSV with columns x and the state components")
    p.add_argument("--v0", help="boost applied to smooth-sine data")
    p.add_argument("--cells")
    p.add_argument("--x-min", dest="x_min")
    p.add_argument("--x-max", dest="x_max")
    p.add_argument("--boundary", choices=solver.BOUNDARIES)
    p.add_argument("--tend")
    p.add_argument("--cfl")
    p.add_argument("--workers")


def build_parser():
    parser = argparse.ArgumentParser(prog="galileo-laws", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--out", help=f"output directory (env {OUT_ENV} overrides the config)")

    p = sub.add_parser("check", parents=[common], help="run the verification suite")
    _system_flags(p)
    p.add_argument("--all", action="store_const", const=True, help="all registered systems")
    p.add_argument("--seed")
    p.add_argument("--samples")
    p.add_argument("--hessian-samples", dest="hessian_samples")
    p.add_argument("--workers")

    p = sub.add_parser("eigen", parents=[common], help="characteristic speeds at a state")
    _system_flags(p)
    p.add_argument("--state", help="comma-separated conserved components")

    p = sub.add_parser("evolve", parents=[common], help="run the finite-volume solver")
    _system_flags(p)
    _run_flags(p)
    p.add_argument("--snapshots", help="write every k-th step (0: endpoints only)")

    p = sub.add_parser("frameshift", parents=[common], help="Galilean frame-shift experiment")
    _system_flags(p)
    _run_flags(p)
    p.add_argument("--v", help="boost velocity")
    p.add_argument("--grids", help="comma-separated cell counts")

    p = sub.add_parser("conjugate", parents=[common], help="Legendre conjugate of a closure")
    p.add_argument("--closure")
    p.add_argument("--gamma")
    p.add_argument("--point", help="evaluate at the gradient of this point")
    p.add_argument("--slopes", help="solve d sigma(x) = slopes")
    return parser


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, stdout)
    except ConfigError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (SolverAbort, HyperbolicityError, NoSolutionError) as exc:
        stderr.write(f"aborted: {exc}\n")
        return EXIT_ABORT
    except DomainError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except GalileoError as exc:
        stderr.write(f"aborted: {exc}\n")
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())

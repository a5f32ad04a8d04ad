"""Randomized certification of the structural identities of a system.

Every check is a vectorized residual function of ``(system, states, aux)``
where ``aux`` carries the per-sample direction or boost velocity.  Reports
keep the worst sample so that it can be replayed in isolation.
"""
import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .group import apply, boost_many
from .systems import FD_STEP
from .thermo import THETA_BOX

HESS_STEP = np.finfo(float).eps ** 0.25
ELLIPTIC_SAMPLE_MARGIN = 0.05


@dataclass(frozen=True)
class SampleSpec:
    n: int = 500
    n_hessian: int = 10_000
    n_rest: int = 100
    theta_range: tuple = THETA_BOX
    vmax: float = 2.0
    v_grid: tuple = tuple(np.linspace(-2.0, 2.0, 9))


@dataclass(frozen=True)
class CheckReport:
    check: str
    name: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool
    worst_state: tuple
    worst_aux: tuple = ()
    excluded: int = 0
    resampled: int = 0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f" excluded={self.excluded}" if self.excluded else ""
        extra += f" resampled={self.resampled}" if self.resampled else ""
        return (f"{status} {self.name:<18} {self.check:<22} samples={self.samples:<6d} "
                f"max_residual={self.max_residual:.6e} tolerance={self.tolerance:.1e}{extra}")


def _report(check, system, res, tol, W, aux, excluded=0, resampled=0):
    res = np.asarray(res, dtype=float)
    if res.size == 0:
        return CheckReport(check, system.name, 0, 0.0, tol, True, (), (), excluded, resampled)
    bad = ~np.isfinite(res)
    k = int(np.argmax(bad)) if bad.any() else int(np.argmax(res))
    worst = float(res[k])
    aux_k = tuple(float(t) for t in np.atleast_1d(aux[..., k])) if aux is not None else ()
    return CheckReport(check, system.name, int(res.size), worst, tol,
                       bool(np.isfinite(worst) and worst <= tol),
                       tuple(float(t) for t in W[:, k]), aux_k, excluded, resampled)


# --- sampling ----------------------------------------------------------------

def _base(system):
    return getattr(system, "base", system)


def sample_rest(system, rng, n, spec=SampleSpec()):
    """Rest states: ``theta0`` uniform in its range, internal argument uniform in the closure box."""
    base = _base(system)
    theta0 = rng.uniform(*spec.theta_range, n)
    if base.m == 2:
        return base.rest_state(theta0)
    return base.rest_state(theta0, rng.uniform(*base.closure.box, n))


def velocity_bound(system, vmax):
    base = _base(system)
    if base.rep.kind == "elliptic":
        return min(vmax, (np.pi / 2 - ELLIPTIC_SAMPLE_MARGIN) / np.sqrt(base.a * base.b))
    return vmax


def sample_states(system, rng, n, spec=SampleSpec()):
    """Cone states: rest states boosted by a uniform velocity."""
    W0 = sample_rest(system, rng, n, spec)
    vb = velocity_bound(system, spec.vmax)
    v = rng.uniform(-vb, vb, n)
    return apply(boost_many(_base(system).rep, v), W0)


def _directions(rng, m, n):
    r = rng.standard_normal((m, n))
    return r / np.linalg.norm(r, axis=0)


def _step(W):
    return FD_STEP * np.maximum(1.0, np.max(np.abs(W), axis=0))


def _draw(system, rng, n, spec, stencil_ok, with_dirs):
    """Draw ``n`` states (and directions) whose stencil stays in the cone."""
    Ws, As, rejected = [], [], 0
    have = 0
    while have < n:
        W = sample_states(system, rng, n, spec)
        r = _directions(rng, system.m, n) if with_dirs else np.zeros((0, n))
        ok = stencil_ok(system, W, r)
        rejected += int(np.sum(~ok))
        Ws.append(W[:, ok])
        As.append(r[:, ok])
        have += int(np.sum(ok))
    return np.concatenate(Ws, axis=1)[:, :n], np.concatenate(As, axis=1)[:, :n], rejected


def _line_stencil_ok(system, W, r):
    h = _step(W)
    return system.cone_contains(W + h * r) & system.cone_contains(W - h * r)


def _axis_stencil_ok(system, W, _r, step=None):
    h = (step if step is not None else FD_STEP) * np.maximum(1.0, np.abs(W))
    ok = system.cone_contains(W)
    for i in range(system.m):
        for j in range(system.m):
            for si in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    Wp = W.copy()
                    Wp[i] += si * h[i]
                    Wp[j] += sj * h[j]
                    ok &= system.cone_contains(Wp)
    return ok


def _hess_stencil_ok(system, W, r):
    return _axis_stencil_ok(system, W, r, HESS_STEP)


# --- residual functions -------------------------------------------------------

def _ddir(fun, W, r):
    h = _step(W)
    return (fun(W + h * r) - fun(W - h * r)) / (2.0 * h)


def res_compatibility(system, W, r):
    phi = system.entropy_variables(W)
    dual = system.entropy_dual(W)
    djr = _ddir(system.thermo_flux, W, r)
    dur = _ddir(system.velocity, W, r)
    t1 = np.sum(phi * djr, axis=0)
    t2 = dual * dur
    scale = np.linalg.norm(phi, axis=0) * np.linalg.norm(djr, axis=0) + np.abs(t2)
    return np.abs(t1 + t2) / scale


def res_entropy_pair(system, W, r):
    phi = system.entropy_variables(W)
    dq = _ddir(system.entropy_flux, W, r)
    dfr = _ddir(system.flux, W, r)
    t = np.sum(phi * dfr, axis=0)
    scale = np.abs(dq) + np.linalg.norm(phi, axis=0) * np.linalg.norm(dfr, axis=0)
    return np.abs(dq - t) / scale


def _boosted(system, W, v):
    return apply(boost_many(system.rep, v), W)


def res_velocity_boost(system, W, v):
    v = v[0]
    return np.abs(system.velocity(_boosted(system, W, v)) - (system.velocity(W) - v))


def res_velocity_reflection(system, W, _aux=None):
    return np.abs(system.velocity(system.reflect(W)) + system.velocity(W))


def res_flux_boost(system, W, v):
    v = v[0]
    Y = boost_many(system.rep, v)
    ref = apply(Y, system.thermo_flux(W))
    d = system.thermo_flux(apply(Y, W)) - ref
    return np.max(np.abs(d), axis=0) / np.maximum(1.0, np.max(np.abs(ref), axis=0))


def res_flux_reflection(system, W, _aux=None):
    j = system.thermo_flux(W)
    d = system.thermo_flux(system.reflect(W)) + apply(system.rep.reflection, j)
    return np.max(np.abs(d), axis=0) / np.maximum(1.0, np.max(np.abs(j), axis=0))


def res_entropy_invariance(system, W, v):
    eta = system.entropy(W)
    d1 = np.abs(system.entropy(_boosted(system, W, v[0])) - eta)
    d2 = np.abs(system.entropy(system.reflect(W)) - eta)
    return np.maximum(d1, d2) / np.maximum(1.0, np.abs(eta))


def fd_hessian(fun, W, step=HESS_STEP):
    """Central second differences, shape ``(n, m, m)``."""
    m, n = W.shape
    h = step * np.maximum(1.0, np.abs(W))
    f0 = fun(W)
    H = np.empty((n, m, m))

    def at(i, si, j, sj):
        Wp = W.copy()
        Wp[i] += si * h[i]
        Wp[j] += sj * h[j]
        return fun(Wp)

    for i in range(m):
        Wp, Wm = W.copy(), W.copy()
        Wp[i] += h[i]
        Wm[i] -= h[i]
        H[:, i, i] = (fun(Wp) - 2.0 * f0 + fun(Wm)) / h[i] ** 2
        for j in range(i):
            v = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4.0 * h[i] * h[j])
            H[:, i, j] = H[:, j, i] = v
    return H


def fd_gradient_hessian(system, W):
    """Symmetrized central differences of the closed-form entropy variables."""
    m, n = W.shape
    H = np.empty((n, m, m))
    for k in range(m):
        h = FD_STEP * np.maximum(1.0, np.abs(W[k]))
        Wp, Wm = W.copy(), W.copy()
        Wp[k] += h
        Wm[k] -= h
        H[:, :, k] = ((system.entropy_variables(Wp) - system.entropy_variables(Wm)) / (Wp[k] - Wm[k])).T
    return 0.5 * (H + np.transpose(H, (0, 2, 1)))


def res_hessian_spd(system, W, _aux=None):
    lam = np.linalg.eigvalsh(fd_hessian(system.entropy, W))
    return -lam[:, 0] / np.max(np.abs(lam), axis=1)


def res_hessian_det(system, W, _aux=None):
    # second differences of eta lose the small eigenvalue on strongly boosted
    # states, so the determinant uses first differences of phi instead
    d_fd = np.linalg.det(fd_gradient_hessian(system, W))
    d_cf = system.hessian_det(W)
    return np.abs(d_fd - d_cf) / np.abs(d_cf)


def res_rest_parity(system, W, _aux=None):
    R = system.rep.reflection
    even = np.diag(R) > 0
    r1 = np.max(np.abs(apply(R, W) - W), axis=0)
    r2 = np.max(np.abs(system.thermo_flux(W)[even]), axis=0)
    return np.maximum(r1, r2)


def res_velocity_differential(system, W, _aux=None):
    m = system.m
    du = system.velocity_gradient(W)
    fd = np.empty_like(W)
    for k in range(m):
        h = FD_STEP * np.maximum(1.0, np.abs(W[k]))
        Wp, Wm = W.copy(), W.copy()
        Wp[k] += h
        Wm[k] -= h
        fd[k] = (system.velocity(Wp) - system.velocity(Wm)) / (Wp[k] - Wm[k])
    r1 = np.max(np.abs(fd - du), axis=0) / np.maximum(1.0, np.max(np.abs(du), axis=0))
    r2 = np.abs(np.sum(du * apply(system.rep.generator, W), axis=0) + 1.0)
    return np.maximum(r1, r2)


# name -> (residual, tolerance)
RESIDUALS = {
    "compatibility": (res_compatibility, 1e-6),
    "entropy_pair": (res_entropy_pair, 1e-6),
    "velocity_boost": (res_velocity_boost, 1e-10),
    "velocity_reflection": (res_velocity_reflection, 1e-14),
    "flux_boost": (res_flux_boost, 1e-9),
    "flux_reflection": (res_flux_reflection, 1e-12),
    "entropy_invariance": (res_entropy_invariance, 1e-10),
    "hessian_spd": (res_hessian_spd, -1e-12),
    "hessian_det": (res_hessian_det, 1e-5),
    "rest_parity": (res_rest_parity, 1e-14),
    "velocity_differential": (res_velocity_differential, 1e-6),
}


def _run(check, system, W, aux, **kw):
    fun, tol = RESIDUALS[check]
    return _report(check, system, fun(system, W, aux), tol, W, aux, **kw)


def recheck(system, report):
    """Recompute a report's residual at its worst state alone."""
    fun, _ = RESIDUALS[report.check]
    W = np.array(report.worst_state)[:, None]
    aux = np.array(report.worst_aux)[:, None] if report.worst_aux else None
    return float(fun(system, W, aux)[0])


# --- public checks --------------------------------------------------------------

def verify_compatibility(system, spec=SampleSpec(), rng=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    W, r, rej = _draw(system, rng, spec.n, spec, _line_stencil_ok, True)
    return _run("compatibility", system, W, r, resampled=rej)


def verify_entropy_pair(system, spec=SampleSpec(), rng=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    W, r, rej = _draw(system, rng, spec.n, spec, _line_stencil_ok, True)
    return _run("entropy_pair", system, W, r, resampled=rej)


def verify_transformations(system, spec=SampleSpec(), rng=None, v_grid=None):
    """Velocity, flux and entropy transformation laws; one report each."""
    rng = rng if rng is not None else np.random.default_rng(0)
    v_grid = np.asarray(spec.v_grid if v_grid is None else v_grid, dtype=float)
    W = sample_states(system, rng, spec.n, spec)
    Wp = np.repeat(W, v_grid.size, axis=1)
    v = np.tile(v_grid, spec.n)
    ok = _base(system).branch_ok(Wp, v)
    excluded = int(np.sum(~ok))
    Wb, vb = Wp[:, ok], v[ok][None]
    return [
        _run("velocity_boost", system, Wb, vb, excluded=excluded),
        _run("velocity_reflection", system, W, None),
        _run("flux_boost", system, Wb, vb, excluded=excluded),
        _run("flux_reflection", system, W, None),
        _run("entropy_invariance", system, Wb, vb, excluded=excluded),
    ]


def verify_hessians(system, spec=SampleSpec(), rng=None):
    """Positive definiteness of the entropy Hessian and its closed-form determinant.

    Definiteness uses second differences of ``eta``; its residual is
    ``-lambda_min / |lambda|_max``, which must stay below ``-1e-12``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    W, _, rej = _draw(system, rng, spec.n_hessian, spec, _hess_stencil_ok, False)
    return [_run("hessian_spd", system, W, None, resampled=rej),
            _run("hessian_det", system, W, None, resampled=rej)]


def verify_rest_parity(system, spec=SampleSpec(), rng=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    return _run("rest_parity", system, sample_rest(system, rng, spec.n_rest, spec), None)


def verify_velocity_differential(system, spec=SampleSpec(), rng=None):
    rng = rng if rng is not None else np.random.default_rng(0)
    W, _, rej = _draw(system, rng, spec.n, spec, _axis_stencil_ok, False)
    return _run("velocity_differential", system, W, None, resampled=rej)


CHECKS = (
    verify_compatibility,
    verify_entropy_pair,
    verify_transformations,
    verify_hessians,
    verify_rest_parity,
    verify_velocity_differential,
)


@dataclass
class SuiteReport:
    seed: int
    reports: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def failures(self):
        return [r for r in self.reports if not r.passed]

    def to_text(self):
        lines = [f"suite seed={self.seed} checks={len(self.reports)} "
                 f"failed={len(self.failures())}"]
        lines += [r.line() for r in self.reports]
        lines.append("ALL PASS" if self.passed else
                     "FAILED: " + ", ".join(sorted({f"{r.name}:{r.check}" for r in self.failures()})))
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "name", "samples", "max_residual", "tolerance", "pass"])
        for r in self.reports:
            w.writerow([r.check, r.name, r.samples, repr(r.max_residual), repr(r.tolerance),
                        "true" if r.passed else "false"])
        return buf.getvalue()


def run_suite(systems, seed, spec=SampleSpec(), workers=1):
    """Run every check on every system.

    Each (system, check) pair draws from its own generator seeded by
    ``(seed, system index, check index)``, so the report does not depend on
    scheduling or on the worker count.
    """
    tasks = [(i, k, s, chk) for i, s in enumerate(systems) for k, chk in enumerate(CHECKS)]

    def work(task):
        i, k, s, chk = task
        out = chk(s, spec, np.random.default_rng([seed, i, k]))
        return out if isinstance(out, list) else [out]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    return SuiteReport(seed, [r for group in results for r in group])

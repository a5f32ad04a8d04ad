"""First-order finite-volume solver with entropy and frame-shift diagnostics.

Cell averages are advanced with the Rusanov (local Lax-Friedrichs) flux.
Each step also records the discrete entropy production per cell,

    P_i = (eta(W_i^{n+1}) - eta(W_i^n)) / dt + (G_{i+1/2} - G_{i-1/2}) / dx,

with the matching numerical entropy flux
``G = (q_L + q_R)/2 - s (eta_R - eta_L)/2`` and ``q = eta u``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BranchError, DomainError, SolverAbort
from .group import apply, boost

BOUNDARIES = ("transmissive", "periodic")


@dataclass(frozen=True)
class Grid1D:
    n_cells: int
    x_min: float = 0.0
    x_max: float = 1.0
    boundary: str = "transmissive"

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise DomainError("a grid needs at least 4 cells")
        if not self.x_max > self.x_min:
            raise DomainError("x_max must exceed x_min")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self):
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def lookup(self, x):
        """Index of the cell holding ``x`` (clamped or wrapped per boundary)."""
        k = np.floor((np.asarray(x, dtype=float) - self.x_min) / self.dx).astype(int)
        if self.boundary == "periodic":
            return np.mod(k, self.n_cells)
        return np.clip(k, 0, self.n_cells - 1)


@dataclass(frozen=True)
class RiemannIC:
    left: tuple
    right: tuple
    interface: float = 0.5

    def __call__(self, x):
        L = np.asarray(self.left, dtype=float)[:, None]
        R = np.asarray(self.right, dtype=float)[:, None]
        return np.where(np.asarray(x)[None, :] < self.interface, L, R)


@dataclass(frozen=True, eq=False)
class SolutionField:
    grid: Grid1D
    time: float
    states: np.ndarray
    entropy_total: float
    entropy_production: np.ndarray = field(default=None)
    steps: int = 0


def initial_field(system, ic, grid):
    """Sample ``ic`` (a callable of the cell centers or an ``(m, n)`` array) on the grid."""
    W = ic(grid.centers) if callable(ic) else np.asarray(ic, dtype=float)
    W = np.array(W, dtype=float)
    if W.shape != (system.m, grid.n_cells):
        raise DomainError(f"initial data must have shape {(system.m, grid.n_cells)}, got {W.shape}")
    _check_cone(system, W, 0)
    return SolutionField(grid, 0.0, W, float(np.sum(system.entropy(W)) * grid.dx),
                         np.zeros(grid.n_cells), 0)


def _check_cone(system, W, step):
    ok = system.cone_contains(W)
    if not np.all(ok):
        i = int(np.argmin(ok))
        what = system.cone_violation(W[:, i])
        raise SolverAbort(f"cone exit in cell {i} at step {step}: state {W[:, i].tolist()} "
                          f"violates {what}", cell=i, step=step, component=what)


def _pad(grid, W):
    if grid.boundary == "periodic":
        return np.concatenate([W[:, -1:], W, W[:, :1]], axis=1)
    return np.concatenate([W[:, :1], W, W[:, -1:]], axis=1)


def _rusanov(fL, fR, WL, WR, s):
    return 0.5 * (fL + fR) - 0.5 * s * (WR - WL)


def numerical_flux(system, WL, WR):
    """Rusanov flux between ``WL`` and ``WR`` (single states or columns)."""
    WL = np.asarray(WL, dtype=float)
    WR = np.asarray(WR, dtype=float)
    s = np.maximum(system.spectral_radius(WL), system.spectral_radius(WR))
    return _rusanov(system.flux(WL), system.flux(WR), WL, WR, s)


def _chunks(n, workers):
    edges = np.linspace(0, n, max(1, workers) + 1).astype(int)
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _cell_data(system, Wg, workers):
    """Flux, spectral radius, entropy and entropy flux on the padded cells."""
    n = Wg.shape[1]
    f = np.empty_like(Wg)
    s = np.empty(n)
    eta = np.empty(n)
    q = np.empty(n)

    def work(sl):
        W = Wg[:, sl]
        f[:, sl] = system.flux(W)
        s[sl] = system.spectral_radius(W)
        eta[sl] = system.entropy(W)
        q[sl] = eta[sl] * system.velocity(W)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(work, _chunks(n, workers)))
    else:
        work(slice(0, n))
    return f, s, eta, q


def step(system, field, cfl=0.45, dt_max=None, workers=1):
    """One explicit Rusanov step; returns a new field (the input is untouched)."""
    if not 0 < cfl <= 0.9:
        raise DomainError("cfl must lie in (0, 0.9]")
    grid = field.grid
    Wg = _pad(grid, field.states)
    f, s, eta, q = _cell_data(system, Wg, workers)
    smax = float(np.max(s))
    if not np.isfinite(smax) or smax <= 0:
        raise SolverAbort(f"invalid wave-speed bound {smax} at step {field.steps}", step=field.steps)
    dt = cfl * grid.dx / smax
    if dt_max is not None:
        dt = min(dt, dt_max)
    if not dt > 1e-300:
        raise SolverAbort(f"time step underflow at step {field.steps}", step=field.steps)

    si = np.maximum(s[:-1], s[1:])
    F = _rusanov(f[:, :-1], f[:, 1:], Wg[:, :-1], Wg[:, 1:], si)
    G = 0.5 * (q[:-1] + q[1:]) - 0.5 * si * (eta[1:] - eta[:-1])
    r = dt / grid.dx
    W_new = field.states - r * (F[:, 1:] - F[:, :-1])
    _check_cone(system, W_new, field.steps + 1)
    eta_new = system.entropy(W_new)
    prod = (eta_new - eta[1:-1]) / dt + (G[1:] - G[:-1]) / grid.dx
    return SolutionField(grid, field.time + dt, W_new, float(np.sum(eta_new) * grid.dx),
                         prod, field.steps + 1)


def evolve(system, ic, grid, t_end, cfl=0.45, snapshot_every=None, workers=1):
    """Advance to ``t_end``; returns the list of recorded fields.

    The first and last fields are always recorded.  ``snapshot_every=None``
    keeps every step, ``0`` keeps only the endpoints.
    """
    if not t_end >= 0:
        raise DomainError("t_end must be non-negative")
    field = ic if isinstance(ic, SolutionField) else initial_field(system, ic, grid)
    history = [field]
    while field.time < t_end:
        field = step(system, field, cfl, dt_max=t_end - field.time, workers=workers)
        if t_end - field.time <= 1e-14 * max(1.0, t_end):
            field = replace(field, time=float(t_end))
        if field.time >= t_end or snapshot_every is None or (
                snapshot_every and field.steps % snapshot_every == 0):
            history.append(field)
    return history


def entropy_budget(history):
    """Total entropy against time, shape ``(len(history), 2)``."""
    return np.array([[h.time, h.entropy_total] for h in history])


@dataclass(frozen=True)
class FrameShiftRow:
    n_cells: int
    dx: float
    l1: float
    order: float


def boosted_reconstruction(system, field, v):
    """Boosted-frame image of ``field``: ``(Y(v) W)(t, x + v t)`` by piecewise-constant lookup."""
    grid = field.grid
    idx = grid.lookup(grid.centers + v * field.time)
    return apply(boost(system.rep, v), field.states[:, idx])


def frame_shift_experiment(system, ic, grids, v, t_end, cfl=0.45, workers=1):
    """Compare the boosted solution with the solution of the boosted data.

    Returns one row per grid with the L1 distance (summed over components)
    and the empirical order against the previous row.
    """
    Y = boost(system.rep, v)
    rows = []
    for grid in grids:
        f0 = initial_field(system, ic, grid)
        if not np.all(system.branch_ok(f0.states, v)):
            raise BranchError(f"v = {v} leaves the principal velocity branch of {system.name}")
        plain = evolve(system, f0, grid, t_end, cfl, snapshot_every=0, workers=workers)[-1]
        shifted = evolve(system, apply(Y, f0.states), grid, t_end, cfl,
                         snapshot_every=0, workers=workers)[-1]
        rec = boosted_reconstruction(system, plain, v)
        l1 = float(np.sum(np.abs(rec - shifted.states)) * grid.dx)
        order = float("nan")
        if rows and rows[-1].l1 > 0 and l1 > 0:
            order = float(np.log(rows[-1].l1 / l1) / np.log(rows[-1].dx / grid.dx))
        rows.append(FrameShiftRow(grid.n_cells, grid.dx, l1, order))
    return rows


def fitted_order(rows):
    """Least-squares slope of log L1 against log dx."""
    dx = np.log([r.dx for r in rows])
    l1 = np.log([r.l1 for r in rows])
    return float(np.polyfit(dx, l1, 1)[0])


def sod(system):
    """Standard shock-tube data for a nilpotent system (rest states on both sides)."""
    g = system.closure.params.get("gamma", 1.4)
    return RiemannIC(tuple(system.rest_state(1.0, 1.0 / (g - 1.0))),
                     tuple(system.rest_state(0.125, 0.1 / (g - 1.0))), 0.5)

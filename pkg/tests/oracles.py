"""Independent reference computations used by the tests.

Nothing here imports the closed forms under test: boosts come from a power
series, conjugates from a brute-force grid supremum, Euler quantities from
primitive variables.
"""
import numpy as np


def series_exp(G, v, n_terms=60):
    term = np.eye(G.shape[0])
    total = term.copy()
    for k in range(1, n_terms):
        term = term @ (v * G) / k
        total = total + term
    return total


def grid_sup(fun, slopes, box, n=801, rounds=4):
    """sup_x (slopes . x - fun(x)) by repeated zooming grids over ``box``."""
    slopes = np.atleast_1d(np.asarray(slopes, dtype=float))
    box = [tuple(b) for b in box]
    best = None
    for _ in range(rounds):
        axes = [np.linspace(lo, hi, n if len(box) == 1 else 201) for lo, hi in box]
        mesh = np.meshgrid(*axes, indexing="ij")
        X = np.array([m.ravel() for m in mesh])
        val = np.sum(slopes[:, None] * X, axis=0) - fun(X)
        k = int(np.argmax(val))
        best = (float(val[k]), X[:, k])
        width = [(hi - lo) / 20.0 for lo, hi in box]
        box = [(c - w, c + w) for c, w in zip(best[1], width)]
    return best


def euler_primitive(rho, u, p, gamma=1.4):
    """Conserved state, flux, sound speed and physical entropy from primitives."""
    eps = p / (gamma - 1.0) + 0.5 * rho * u * u
    W = np.array([rho, rho * u, eps])
    f = np.array([rho * u, rho * u * u + p, u * (eps + p)])
    c = np.sqrt(gamma * p / rho)
    eta = -rho * np.log(p / rho ** gamma)
    return W, f, c, eta


def fd_grad(fun, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h * max(1.0, abs(x[k]))
        g[k] = (fun(x + e) - fun(x - e)) / (2.0 * e[k])
    return g


def fd_jac(fun, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h * max(1.0, abs(x[k]))
        cols.append((fun(x + e) - fun(x - e)) / (2.0 * e[k]))
    return np.array(cols).T

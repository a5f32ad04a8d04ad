"""Rest-frame entropy closures and their convex conjugates.

A closure is a strictly convex function ``sigma`` of one argument (2x2
systems) or two arguments (3x3 systems).  Points are passed as arrays whose
leading axis holds the arguments, so ``x`` has shape ``(k,)`` or ``(k, n)``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClosureError, DomainError, NoSolutionError

THETA_BOX = (0.5, 5.0)

# argument index and required sign of d(sigma)/d(arg) per family
FAMILY_SIGN = {
    "Hyp2": (0, -1),
    "Ell2": (0, +1),
    "Hyp3": (0, -1),
    "Ell3": (0, +1),
    "Nil3": (1, -1),
    "EulerGas": (1, -1),
    "Cemracs": (0, +1),
}


class EntropyClosure:
    """A rest-frame entropy ``sigma`` with derivatives and a domain.

    ``signs`` maps an argument index to the sign the closure guarantees for
    that partial derivative on its domain.  ``box`` is the sampling box for
    the internal argument of two-argument closures.
    """

    def __init__(self, name, arity, value, grad, hess, domain, signs=None,
                 box=None, params=None, guess=None):
        self.name = name
        self.arity = arity
        self._value = value
        self._grad = grad
        self._hess = hess
        self._domain = domain
        self.signs = dict(signs or {})
        self.box = box
        self.params = dict(params or {})
        self.guess = np.asarray(guess if guess is not None else [1.0] * arity, dtype=float)

    def __repr__(self):
        extra = "".join(f", {k}={v!r}" for k, v in self.params.items())
        return f"EntropyClosure({self.name!r}{extra})"

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(self._domain(x)) & np.all(np.isfinite(x), axis=0)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.arity:
            raise DomainError(f"{self.name} takes {self.arity} argument(s), got {x.shape[0]}")
        if not np.all(self.contains(x)):
            raise DomainError(f"point outside the domain of closure {self.name}")
        return x

    def value(self, x):
        return self._value(self._check(x))

    def grad(self, x):
        return self._grad(self._check(x))

    def hess(self, x):
        return self._hess(self._check(x))

    def validation_points(self, n_side=12):
        a = np.linspace(*THETA_BOX, n_side)
        if self.arity == 1:
            return a[None, :]
        b = np.linspace(*self.box, n_side)
        A, B = np.meshgrid(a, b, indexing="ij")
        return np.array([A.ravel(), B.ravel()])

    def validate(self, x=None):
        """Assert convexity and the declared sign profile at ``x``.

        Defaults to a tensor grid over the sampling box.  Raises
        :class:`DomainError` naming the first failure.
        """
        x = self.validation_points() if x is None else np.asarray(x, dtype=float)
        g = self.grad(x)
        for idx, sgn in self.signs.items():
            if not np.all(sgn * g[idx] > 0):
                raise DomainError(f"{self.name}: sign of d sigma / d x{idx} violated")
        H = np.moveaxis(self.hess(x).reshape(self.arity, self.arity, -1), -1, 0)
        if not np.all(np.linalg.eigvalsh(H)[:, 0] > 0):
            raise DomainError(f"{self.name}: Hessian not positive definite")
        return True


def _stack(*rows):
    return np.array(rows)


def half_square():
    return EntropyClosure(
        "half-square", 1,
        lambda x: 0.5 * x[0] ** 2,
        lambda x: _stack(x[0]),
        lambda x: np.ones((1, 1) + x.shape[1:]),
        lambda x: x[0] > 0,
        signs={0: +1},
    )


def square():
    return EntropyClosure(
        "square", 1,
        lambda x: x[0] ** 2,
        lambda x: _stack(2.0 * x[0]),
        lambda x: np.full((1, 1) + x.shape[1:], 2.0),
        lambda x: x[0] > 0,
        signs={0: +1},
    )


def inverse():
    return EntropyClosure(
        "inverse", 1,
        lambda x: 1.0 / x[0],
        lambda x: _stack(-1.0 / x[0] ** 2),
        lambda x: (2.0 / x[0] ** 3).reshape((1, 1) + x.shape[1:]),
        lambda x: x[0] > 0,
        signs={0: -1},
    )


def inverse_plus_square():
    """sigma(alpha, beta) = 1/alpha + beta^2."""
    def hess(x):
        z = np.zeros_like(x[0])
        return np.array([[2.0 / x[0] ** 3, z], [z, 2.0 + z]])

    return EntropyClosure(
        "inverse-plus-square", 2,
        lambda x: 1.0 / x[0] + x[1] ** 2,
        lambda x: _stack(-1.0 / x[0] ** 2, 2.0 * x[1]),
        hess,
        lambda x: x[0] > 0,
        signs={0: -1},
        box=(-2.0, 2.0),
        guess=[1.0, 0.0],
    )


def sum_of_squares():
    """sigma(alpha, beta) = alpha^2 + beta^2 on alpha > 0."""
    def hess(x):
        z = np.zeros_like(x[0])
        return np.array([[2.0 + z, z], [z, 2.0 + z]])

    return EntropyClosure(
        "sum-of-squares", 2,
        lambda x: x[0] ** 2 + x[1] ** 2,
        lambda x: _stack(2.0 * x[0], 2.0 * x[1]),
        hess,
        lambda x: x[0] > 0,
        signs={0: +1},
        box=(-2.0, 2.0),
        guess=[1.0, 0.0],
    )


def _log_closure(name, gamma, domain, signs, box):
    g = float(gamma)
    if not g > 1.0:
        raise DomainError("gamma must exceed 1")

    def value(x):
        a, b = x
        return -a * np.log((g - 1.0) * b / a ** g)

    def grad(x):
        a, b = x
        return _stack(g - np.log((g - 1.0) * b / a ** g), -a / b)

    def hess(x):
        a, b = x
        return np.array([[g / a, -1.0 / b], [-1.0 / b, a / b ** 2]])

    return EntropyClosure(name, 2, value, grad, hess, domain, signs=signs, box=box,
                          params={"gamma": g}, guess=[1.0, 1.0])


def gas(gamma=1.4):
    """Polytropic gas: sigma(rho, rho e) = -rho log[(gamma - 1) rho e / rho^gamma]."""
    return _log_closure("gas", gamma, lambda x: (x[0] > 0) & (x[1] > 0),
                        {1: -1}, (0.5, 5.0))


def cemracs(gamma=1.4):
    """Same formula as :func:`gas`, restricted to d sigma / d alpha > 0."""
    g = float(gamma)

    def domain(x):
        a, b = x
        ok = (a > 0) & (b > 0)
        with np.errstate(all="ignore"):
            return ok & (g - np.log((g - 1.0) * b / a ** g) > 0)

    top = THETA_BOX[0] ** g * np.exp(g) / (g - 1.0)
    return _log_closure("cemracs", g, domain, {0: +1, 1: -1}, (0.05 * top, 0.9 * top))


CLOSURES = {
    "half-square": half_square,
    "square": square,
    "inverse": inverse,
    "inverse-plus-square": inverse_plus_square,
    "sum-of-squares": sum_of_squares,
    "gas": gas,
    "cemracs": cemracs,
}


def builtin_closure(name, **params):
    try:
        factory = CLOSURES[name]
    except KeyError:
        raise DomainError(f"unknown closure {name!r}; available: {', '.join(CLOSURES)}") from None
    return factory(**params)


@dataclass(frozen=True, eq=False)
class DualPoint:
    slopes: np.ndarray
    value: object
    point: object = None


def conjugate_at_gradient(closure, x):
    """Legendre transform at a gradient point: sigma*(d sigma(x)) = x . d sigma(x) - sigma(x)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    g = closure.grad(x)
    return DualPoint(g, np.sum(x * g, axis=0) - closure.value(x), x)


def _polish(closure, resid, x, r, steps=4):
    # a few undamped steps down to the rounding floor
    for _ in range(steps):
        try:
            y = x - np.linalg.solve(closure.hess(x), r)
        except np.linalg.LinAlgError:
            break
        if not np.all(closure.contains(y)):
            break
        ry = resid(y)
        if not np.linalg.norm(ry) < np.linalg.norm(r):
            break
        x, r = y, ry
    return x


def _solve_newton(closure, s, x, tol, max_iter):
    def resid(y):
        return closure.grad(y) - s

    r = resid(x)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < tol:
            return _polish(closure, resid, x, r), True
        H = closure.hess(x)
        try:
            dx = np.linalg.solve(H, r)
        except np.linalg.LinAlgError:
            raise DomainError("singular closure Hessian in conjugate solve") from None
        t = 1.0
        nr = np.linalg.norm(r)
        for _ in range(60):
            y = x - t * dx
            if np.all(closure.contains(y)):
                ry = resid(y)
                if np.linalg.norm(ry) < nr:
                    x, r = y, ry
                    break
            t *= 0.5
        else:
            return x, np.max(np.abs(r)) < tol
    return x, np.max(np.abs(r)) < tol


def _solve_bisect(closure, s, x0, tol):
    # grad is increasing for a convex closure of one variable
    def f(y):
        return closure.grad(np.array([y]))[0] - s[0]

    lo = hi = float(x0[0])
    for _ in range(200):
        if closure.contains(np.array([lo / 2.0])) and f(lo) > 0:
            lo /= 2.0
        elif closure.contains(np.array([hi * 2.0])) and f(hi) < 0:
            hi *= 2.0
        else:
            break
    if not (f(lo) <= 0 <= f(hi)):
        return None
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < tol or mid in (lo, hi):
            return np.array([mid])
        if fm < 0:
            lo = mid
        else:
            hi = mid
    return np.array([0.5 * (lo + hi)])


def conjugate_general(closure, slopes, x0=None, tol=1e-12, max_iter=100):
    """Conjugate at arbitrary slopes by solving d sigma(x) = slopes.

    Damped Newton with step halving; single-argument closures fall back to
    bisection.  The solved point is kept in ``.point``.  The gradient residual is measured relative to ``max(1, |slopes|)``.
    """
    s = np.atleast_1d(np.asarray(slopes, dtype=float))
    if s.shape != (closure.arity,) or not np.all(np.isfinite(s)):
        raise DomainError("slopes must be a finite vector matching the closure arity")
    x = closure.guess.copy() if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    closure._check(x)
    tol_abs = tol * max(1.0, float(np.max(np.abs(s))))
    x, ok = _solve_newton(closure, s, x, tol_abs, max_iter)
    if not ok and closure.arity == 1:
        y = _solve_bisect(closure, s, x, tol_abs)
        if y is not None:
            x, ok = y, True
    if not ok:
        raise NoSolutionError(f"slopes {s.tolist()} not reached by d sigma of {closure.name}")
    return conjugate_at_gradient(closure, x)


def mech_pressure(family, closure, rest, b=1.0):
    """Mechanical pressure from the conjugate of the rest-frame entropy.

    ``rest`` holds the rest-frame arguments of ``sigma``: the rest radius for
    2x2 families, ``(radius, psi)`` for the hyperbolic and elliptic 3x3
    families and ``(theta, internal)`` for the nilpotent ones.
    """
    rest = np.asarray(rest, dtype=float)
    if family == "Cemracs":
        g = closure.params["gamma"]
        closure._check(rest)
        t, p = rest
        den = g - np.log((g - 1.0) * p / t ** g)
        if np.any(den == 0):
            raise DegenerateClosureError("vanishing log term in Cemracs pressure")
        return (g - 1.0) * t / den
    dual = conjugate_at_gradient(closure, rest)
    if family in ("Nil3", "EulerGas"):
        sign, den = -1.0, dual.slopes[1]
    elif family in ("Hyp2", "Hyp3"):
        sign, den = -1.0, dual.slopes[0]
    elif family in ("Ell2", "Ell3"):
        sign, den = 1.0, dual.slopes[0]
    else:
        raise DomainError(f"unknown family {family!r}")
    if np.any(den == 0):
        raise DegenerateClosureError(f"vanishing slope in {family} pressure")
    return sign * dual.value / (b * den)


def entropy(system, W):
    return system.entropy(W)


def entropy_variables(system, W):
    return system.entropy_variables(W)


def entropy_dual(system, W):
    return system.entropy_dual(W)


def gas_thermo_map(T, p, mu):
    """Slopes ``(mu/T, -1/T)`` of the gas entropy and its conjugate value ``p/T``."""
    T, p, mu = float(T), float(p), float(mu)
    if not (T > 0 and p > 0 and np.isfinite(mu)):
        raise DomainError("gas thermodynamics needs T > 0, p > 0 and finite mu")
    return DualPoint(np.array([mu / T, -1.0 / T]), p / T)


def gas_sigma(dual, rho, psi):
    """Value of sigma at ``(rho, psi)`` from its tangent plane."""
    A, B = dual.slopes
    return A * rho + B * psi - dual.value


def gas_thermo_inverse(dual):
    """Recover ``(T, p, mu)`` from the slopes and conjugate value."""
    A, B = dual.slopes
    if not B < 0:
        raise DomainError("d sigma / d psi must be negative for a positive temperature")
    T = -1.0 / B
    return T, dual.value * T, A * T


def gas_state_thermo(closure, rho, psi):
    return gas_thermo_inverse(conjugate_at_gradient(closure, [rho, psi]))

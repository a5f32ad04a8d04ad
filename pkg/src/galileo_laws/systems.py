"""Galilean invariant systems of conservation laws ``W_t + f(W)_x = 0``.

The flux splits as ``f(W) = u(W) W + j(W)`` with an advective part and a
thermodynamic part.  States are arrays with the conserved components on the
leading axis: ``(m,)`` for one state or ``(m, n)`` for ``n`` states.
"""
from dataclasses import dataclass

import numpy as np

from . import thermo
from .errors import BranchError, ConeError, DomainError, HyperbolicityError
from .group import DIM, FAMILIES, apply, boost_many, group_rep

FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)
BRANCH_MARGIN = 1e-3
IMAG_TOL = 1e-8


def _states(W):
    W = np.asarray(W, dtype=float)
    if W.ndim not in (1, 2):
        raise DomainError("states must have shape (m,) or (m, n)")
    return W


class GalileanSystem:
    """Base class; concrete families fill in the rest-frame reduction."""

    components = ("theta", "zeta", "psi")
    analytic_speeds = False

    def __init__(self, family, closure, a=1.0, b=1.0, name=None):
        self.rep = group_rep(family, a, b)
        self.family = family
        self.m = self.rep.m
        self.a, self.b = self.rep.params
        if closure.arity != self.m - 1:
            raise DomainError(f"{family} needs a closure of arity {self.m - 1}, "
                              f"got {closure.name} of arity {closure.arity}")
        self.closure = closure
        self.name = name or family.lower()
        self.components = self.components[: self.m]

    def __repr__(self):
        return f"{type(self).__name__}({self.family!r}, a={self.a}, b={self.b}, closure={self.closure!r})"

    # --- cone ----------------------------------------------------------------
    def _violations(self, W):
        """List of (description, ok-mask) pairs; subclasses extend."""
        with np.errstate(all="ignore"):
            return [("theta > 0", W[0] > 0)]

    def cone_contains(self, W):
        W = _states(W)
        ok = np.all(np.isfinite(W), axis=0)
        for _, mask in self._violations(W):
            ok = ok & mask
        return ok

    def cone_violation(self, W):
        """First violated inequality for a single state, or None."""
        W = _states(W)
        if not np.all(np.isfinite(W)):
            return "finite components"
        for desc, mask in self._violations(W):
            if not np.all(mask):
                return desc
        return None

    def _require(self, W):
        W = _states(W)
        if W.shape[0] != self.m:
            raise DomainError(f"{self.name} states have {self.m} components, got {W.shape[0]}")
        ok = self.cone_contains(W)
        if not np.all(ok):
            bad = W if W.ndim == 1 else W[:, np.argmin(ok)]
            raise ConeError(f"state {bad.tolist()} outside the {self.name} cone: "
                            f"violates {self.cone_violation(bad)}")
        return W

    def _closure_ok(self, W):
        with np.errstate(all="ignore"):
            rest = self._rest_args(W)
            return self.closure.contains(rest)

    # --- fields -------------------------------------------------------------
    def rest_args(self, W):
        return self._rest_args(self._require(W))

    def pressure(self, W):
        """Mechanical pressure at the rest invariants of ``W``."""
        return thermo.mech_pressure(self.family, self.closure, self.rest_args(W), self.b)

    def flux(self, W):
        W = self._require(W)
        return self.velocity(W) * W + self.thermo_flux(W)

    def entropy(self, W):
        return self.closure.value(self.rest_args(W))

    def entropy_dual(self, W):
        W = self._require(W)
        return np.sum(self.entropy_variables(W) * W, axis=0) - self.entropy(W)

    def entropy_flux(self, W):
        return self.entropy(W) * self.velocity(W)

    # --- group action -------------------------------------------------------
    def branch_ok(self, W, v):
        """True where a boost by ``v`` keeps the velocity on its principal branch."""
        return np.ones(np.broadcast_shapes(np.shape(self.velocity(W)), np.shape(v)), dtype=bool)

    def boost_state(self, W, v):
        """Return ``(Y(v) W, branch_ok)``; the flag is never silently dropped."""
        W = _states(W)
        return apply(boost_many(self.rep, v), W), self.branch_ok(W, v)

    def reflect(self, W):
        return apply(self.rep.reflection, _states(W))

    def rest_projection(self, W):
        W = self._require(W)
        return apply(boost_many(self.rep, self.velocity(W)), W)

    def rest_state(self, theta0, internal=None):
        theta0 = np.asarray(theta0, dtype=float)
        z = np.zeros_like(theta0)
        if self.m == 2:
            return np.array([theta0, z])
        return np.array([theta0, z, np.asarray(internal, dtype=float) + z])

    # --- linearization ------------------------------------------------------
    def jacobian(self, W, fun=None):
        """Central finite-difference Jacobian of the flux, ``(m, m)`` or ``(n, m, m)``."""
        fun = fun or self.flux
        W = self._require(W)
        single = W.ndim == 1
        Wn = W.reshape(self.m, -1)
        J = np.empty((Wn.shape[1], self.m, self.m))
        for k in range(self.m):
            h = FD_STEP * np.maximum(1.0, np.abs(Wn[k]))
            for _ in range(3):
                Wp, Wm = Wn.copy(), Wn.copy()
                Wp[k] += h
                Wm[k] -= h
                ok = self.cone_contains(Wp) & self.cone_contains(Wm)
                if np.all(ok):
                    break
                h = np.where(ok, h, 0.5 * h)
            else:
                raise ConeError("finite-difference stencil leaves the cone")
            J[:, :, k] = ((fun(Wp) - fun(Wm)) / (Wp[k] - Wm[k])).T
        return J[0] if single else J

    def _speeds(self, W):
        return None

    def numeric_speeds(self, W):
        J = self.jacobian(W)
        lam = np.linalg.eigvals(J)
        bad = np.abs(lam.imag) >= IMAG_TOL * np.maximum(1.0, np.abs(lam))
        if np.any(bad):
            raise HyperbolicityError(f"{self.name}: complex characteristic speeds {lam[bad].tolist()}")
        return np.sort(lam.real, axis=-1)

    def char_speeds(self, W, numeric=False):
        """Sorted characteristic speeds; last axis indexes the speeds."""
        W = self._require(W)
        if self.analytic_speeds and not numeric:
            return np.sort(np.moveaxis(self._speeds(W), 0, -1), axis=-1)
        return self.numeric_speeds(W)

    def spectral_radius(self, W):
        """Wave-speed bound: analytic when known, else 1.1 times the numeric radius."""
        lam = np.abs(self.char_speeds(W))
        r = np.max(lam, axis=-1)
        return r if self.analytic_speeds else 1.1 * r


class RadialSystem(GalileanSystem):
    """Hyperbolic (``eps = -1``) or elliptic (``eps = +1``) families.

    The rest radius is ``xi = sqrt(theta^2 + eps (b/a) zeta^2)``.
    """

    def __init__(self, family, closure, a=1.0, b=1.0, name=None):
        super().__init__(family, closure, a, b, name)
        self.eps = -1.0 if self.rep.kind == "hyperbolic" else 1.0

    def radius(self, W):
        return np.sqrt(W[0] ** 2 + self.eps * (self.b / self.a) * W[1] ** 2)

    def _rest_args(self, W):
        xi = self.radius(W)
        return xi[None] if self.m == 2 else np.array([xi, W[2]])

    def _violations(self, W):
        out = super()._violations(W)
        if self.eps < 0:
            name = "alpha/beta" if self.m == 2 else "a/b"
            with np.errstate(all="ignore"):
                out.append((f"|zeta| < sqrt({name}) theta",
                            np.abs(W[1]) < np.sqrt(self.a / self.b) * W[0]))
        out.append((f"rest arguments in the domain of closure {self.closure.name}",
                    self._closure_ok(W)))
        return out

    def velocity(self, W):
        W = self._require(W)
        t = np.sqrt(self.b / self.a) * W[1] / W[0]
        f = np.arctanh if self.eps < 0 else np.arctan
        return f(t) / np.sqrt(self.a * self.b)

    def thermo_flux(self, W):
        W = self._require(W)
        xi = self.radius(W)
        c = self.pressure(W) / xi
        rows = [-self.eps * (self.b / self.a) * W[1] * c, W[0] * c]
        if self.m == 3:
            rows.append(np.zeros_like(c))
        return np.array(rows)

    def entropy_variables(self, W):
        W = self._require(W)
        xi = self.radius(W)
        g = self.closure.grad(self._rest_args(W))
        rows = [W[0] / xi * g[0], self.eps * (self.b / self.a) * W[1] / xi * g[0]]
        if self.m == 3:
            rows.append(g[1])
        return np.array(rows)

    def velocity_gradient(self, W):
        W = self._require(W)
        den = self.a * self.radius(W) ** 2
        rows = [-W[1] / den, W[0] / den]
        if self.m == 3:
            rows.append(np.zeros_like(den))
        return np.array(rows)

    def hessian_det(self, W):
        """Closed-form determinant of the Hessian of the entropy."""
        W = self._require(W)
        x = self._rest_args(W)
        g, H = self.closure.grad(x), self.closure.hess(x)
        xi = x[0]
        if self.m == 2:
            return self.eps * (self.b / self.a) * g[0] * H[0, 0] / xi
        det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
        return self.eps * self.b / (self.a * xi) * g[0] * det

    def branch_ok(self, W, v):
        if self.eps < 0:
            return super().branch_ok(W, v)
        u = self.velocity(W)
        return np.sqrt(self.a * self.b) * (np.abs(u) + np.abs(v)) < np.pi / 2 - BRANCH_MARGIN


class NilpotentSystem(GalileanSystem):
    analytic_speeds = True

    def internal(self, W):
        return W[2] - 0.5 * (self.b / self.a) * W[1] ** 2 / W[0]

    def _rest_args(self, W):
        return np.array([W[0], self.internal(W)])

    def _violations(self, W):
        out = super()._violations(W)
        out.append((f"rest arguments in the domain of closure {self.closure.name}",
                    self._closure_ok(W)))
        return out

    def velocity(self, W):
        W = self._require(W)
        return W[1] / (self.a * W[0])

    def thermo_flux(self, W):
        W = self._require(W)
        P = self.pressure(W)
        return np.array([np.zeros_like(P), P, (self.b / self.a) * W[1] / W[0] * P])

    def entropy_variables(self, W):
        W = self._require(W)
        g = self.closure.grad(self._rest_args(W))
        r = W[1] / W[0]
        return np.array([g[0] + 0.5 * (self.b / self.a) * r ** 2 * g[1],
                         -(self.b / self.a) * r * g[1],
                         g[1]])

    def velocity_gradient(self, W):
        W = self._require(W)
        t = self.a * W[0]
        return np.array([-W[1] / (t * W[0]), 1.0 / t, np.zeros_like(t)])

    def hessian_det(self, W):
        W = self._require(W)
        x = self._rest_args(W)
        g, H = self.closure.grad(x), self.closure.hess(x)
        det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
        return -(self.b / (self.a * W[0])) * g[1] * det

    def sound_speed(self, W):
        """Rest-frame sound speed from the closure's first and second derivatives."""
        W = self._require(W)
        x = self._rest_args(W)
        g, H = self.closure.grad(x), self.closure.hess(x)
        dual = np.sum(x * g, axis=0) - self.closure.value(x)
        d_dual = (x[0] * H[0, 0] + x[1] * H[0, 1], x[0] * H[0, 1] + x[1] * H[1, 1])
        B = g[1]
        P = -dual / (self.b * B)
        Pa = -(d_dual[0] * B - dual * H[0, 1]) / (self.b * B ** 2)
        Pb = -(d_dual[1] * B - dual * H[1, 1]) / (self.b * B ** 2)
        c2 = (x[0] * Pa + (x[1] + self.b * P) * Pb) / (self.a * x[0])
        if np.any(c2 < 0):
            raise HyperbolicityError(f"{self.name}: negative squared sound speed")
        return np.sqrt(c2)

    def _speeds(self, W):
        u, c = self.velocity(W), self.sound_speed(W)
        return np.array([u - c, u, u + c])


class EulerGas(NilpotentSystem):
    """Polytropic gas dynamics in conserved variables ``(rho, q, eps)``.

    Every field is evaluated from the classical primitive formulas, which
    keeps it independent of the generic nilpotent path it must agree with.
    """

    components = ("rho", "q", "eps")

    def __init__(self, gamma=1.4, name=None):
        super().__init__("EulerGas", thermo.gas(gamma), 1.0, 1.0, name)
        self.gamma = self.closure.params["gamma"]

    def _violations(self, W):
        with np.errstate(all="ignore"):
            return [("rho > 0", W[0] > 0),
                    ("eps > q^2/(2 rho)", W[2] > 0.5 * W[1] ** 2 / W[0])]

    def velocity(self, W):
        W = self._require(W)
        return W[1] / W[0]

    def pressure(self, W):
        W = self._require(W)
        return (self.gamma - 1.0) * (W[2] - 0.5 * W[1] ** 2 / W[0])

    def thermo_flux(self, W):
        p, u = self.pressure(W), self.velocity(W)
        return np.array([np.zeros_like(p), p, p * u])

    def flux(self, W):
        W = self._require(W)
        rho, q, e = W
        u, p = q / rho, self.pressure(W)
        return np.array([q, q * u + p, u * (e + p)])

    def specific_entropy(self, W):
        W = self._require(W)
        return np.log(self.pressure(W) / W[0] ** self.gamma)

    def temperature(self, W):
        return self.pressure(W) / ((self.gamma - 1.0) * _states(W)[0])

    def entropy(self, W):
        W = self._require(W)
        return -W[0] * self.specific_entropy(W)

    def entropy_variables(self, W):
        W = self._require(W)
        T, u = self.temperature(W), self.velocity(W)
        mu = T * (self.gamma - self.specific_entropy(W))
        return np.array([(mu - 0.5 * u ** 2) / T, u / T, -1.0 / T])

    def entropy_dual_closed(self, W):
        """Conjugate entropy as ``p / T``."""
        return self.pressure(W) / self.temperature(W)

    def sound_speed(self, W):
        W = self._require(W)
        return np.sqrt(self.gamma * self.pressure(W) / W[0])


@dataclass(frozen=True)
class QuasilinearState:
    theta: object
    xi_hat: object
    phi_hat: object

    @property
    def y(self):
        return self.phi_hat / self.theta


def cemracs_quasilinear(V, gamma):
    """Matrix ``B(V)`` of the Cemracs system in ``(theta, xi_hat, phi_hat)`` form."""
    t, x, y = np.asarray(V.theta, float), np.asarray(V.xi_hat, float), np.asarray(V.y, float)
    if np.any(t <= 0) or np.any(y <= 0):
        raise DomainError("Cemracs quasilinear form needs theta > 0 and y > 0")
    k = gamma / (gamma - 1.0)
    s = 1.0 + x ** 2
    z = np.zeros_like(t * x * y)
    return np.array([
        [z, t / s - V.phi_hat + z, -x + z],
        [z, x * y + z, s / t + z],
        [z, t / s * (y - (2.0 + x ** 2) * y ** 2 + k * y ** 3) + z, -x * y + z],
    ])


class Cemracs(RadialSystem):
    analytic_speeds = True

    def __init__(self, gamma=1.4, name=None):
        super().__init__("Cemracs", thermo.cemracs(gamma), 1.0, 1.0, name)
        self.gamma = self.closure.params["gamma"]

    def _violations(self, W):
        out = GalileanSystem._violations(self, W)
        with np.errstate(all="ignore"):
            out.append(("psi > 0", W[2] > 0))
            out.append(("Pi > 0", self._closure_ok(W)))
        return out

    def quasilinear_state(self, W):
        W = self._require(W)
        x = W[1] / W[0]
        return QuasilinearState(W[0], x, self.pressure(W) / np.sqrt(1.0 + x ** 2))

    def _speeds(self, W):
        u = self.velocity(W)
        y = self.quasilinear_state(W).y
        c = np.sqrt(y - 2.0 * y ** 2 + self.gamma / (self.gamma - 1.0) * y ** 3)
        return np.array([u - c, u, u + c])


class CorruptedSystem:
    """A system with a deliberately perturbed pressure or velocity.

    Used as a mutation fixture: every structural check should flag it.
    """

    def __init__(self, base, pressure_scale=1.01, velocity_scale=1.0, name="corrupted-fixture"):
        self.base = base
        self.pressure_scale = pressure_scale
        self.velocity_scale = velocity_scale
        self.name = name

    def __getattr__(self, attr):
        return getattr(self.base, attr)

    def velocity(self, W):
        return self.velocity_scale * self.base.velocity(W)

    def pressure(self, W):
        return self.pressure_scale * self.base.pressure(W)

    def thermo_flux(self, W):
        return self.pressure_scale * self.base.thermo_flux(W)

    def flux(self, W):
        W = self.base._require(W)
        return self.velocity(W) * W + self.thermo_flux(W)

    def entropy_flux(self, W):
        return self.base.entropy(W) * self.velocity(W)

    def jacobian(self, W, fun=None):
        return self.base.jacobian(W, fun or self.flux)

    def char_speeds(self, W, numeric=True):
        J = self.jacobian(W)
        return np.sort(np.linalg.eigvals(J).real, axis=-1)

    def spectral_radius(self, W):
        return 1.1 * np.max(np.abs(self.char_speeds(W)), axis=-1)


DEFAULT_CLOSURE = {
    "Hyp2": "inverse",
    "Ell2": "square",
    "Hyp3": "inverse-plus-square",
    "Ell3": "sum-of-squares",
    "Nil3": "gas",
}

REGISTERED = ("hyp2", "ell2", "hyp3", "ell3", "nil3", "eulergas", "cemracs")
FIXTURES = ("corrupted-fixture",)


def families_for_dimension(m):
    if m == 1:
        raise DomainError("no scalar Galilean invariant law with a strictly convex entropy: m = 1 is rejected")
    fams = [f for f in FAMILIES if DIM[f] == m]
    if not fams:
        raise DomainError(f"no families of dimension {m}")
    return fams


def make_system(name, a=None, b=None, gamma=1.4, closure=None, **closure_params):
    """Build a registered system by (case-insensitive) name.

    ``a, b`` default to one; ``alpha``/``beta`` are accepted as aliases for
    the 2x2 families.  ``closure`` overrides the built-in closure by name.
    """
    key = str(name).lower()
    a = closure_params.pop("alpha", a)
    b = closure_params.pop("beta", b)
    a = 1.0 if a is None else float(a)
    b = 1.0 if b is None else float(b)
    if key == "eulergas":
        _fixed(key, a, b, closure)
        return EulerGas(gamma)
    if key == "cemracs":
        _fixed(key, a, b, closure)
        return Cemracs(gamma)
    if key == "corrupted-fixture":
        return CorruptedSystem(EulerGas(gamma))
    family = {f.lower(): f for f in FAMILIES}.get(key)
    if family is None:
        raise DomainError(f"unknown system {name!r}; available: {', '.join(REGISTERED + FIXTURES)}")
    cname = closure or DEFAULT_CLOSURE[family]
    params = dict(closure_params)
    if cname in ("gas", "cemracs"):
        params.setdefault("gamma", gamma)
    clo = thermo.builtin_closure(cname, **params)
    if family == "Nil3":
        return NilpotentSystem(family, clo, a, b)
    return RadialSystem(family, clo, a, b)


def _fixed(key, a, b, closure):
    if (a, b) != (1.0, 1.0) or closure is not None:
        raise DomainError(f"{key} fixes a = b = 1 and its closure")


def registered_systems(**kw):
    return [make_system(n, **kw) for n in REGISTERED]


def require_branch(system, W, v):
    if not np.all(system.branch_ok(W, v)):
        raise BranchError(f"boost by {v} leaves the principal velocity branch of {system.name}")

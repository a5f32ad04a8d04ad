"""Matrix representations of the one-dimensional Galileo group.

Each family acts on its state space through boosts ``Y(v) = exp(v G)`` and a
space reflection ``R``.  The basis is the adapted one: component 1 is even
under ``R``, component 2 is odd and component 3 (when present) is even.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

FAMILIES = ("Hyp2", "Ell2", "Hyp3", "Ell3", "Nil3", "EulerGas", "Cemracs")

KIND = {
    "Hyp2": "hyperbolic",
    "Ell2": "elliptic",
    "Hyp3": "hyperbolic",
    "Ell3": "elliptic",
    "Nil3": "nilpotent",
    "EulerGas": "nilpotent",
    "Cemracs": "elliptic",
}

DIM = {"Hyp2": 2, "Ell2": 2, "Hyp3": 3, "Ell3": 3, "Nil3": 3, "EulerGas": 3, "Cemracs": 3}

FIXED_UNIT = ("EulerGas", "Cemracs")


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GroupRep:
    family: str
    params: tuple
    m: int
    generator: np.ndarray
    reflection: np.ndarray

    @property
    def kind(self):
        return KIND[self.family]

    @property
    def a(self):
        return self.params[0]

    @property
    def b(self):
        return self.params[1]


def generator_matrix(family, a, b):
    kind = KIND[family]
    if kind == "hyperbolic":
        g = [[0.0, -b], [-a, 0.0]]
    elif kind == "elliptic":
        g = [[0.0, b], [-a, 0.0]]
    else:
        return np.array([[0.0, 0.0, 0.0], [-a, 0.0, 0.0], [0.0, -b, 0.0]])
    if DIM[family] == 3:
        g = [g[0] + [0.0], g[1] + [0.0], [0.0, 0.0, 0.0]]
    return np.array(g)


def group_rep(family, a=1.0, b=1.0):
    """Build the representation of ``family`` with parameters ``(a, b)``.

    For the 2x2 families ``a, b`` play the role of ``alpha, beta``.  Euler gas
    dynamics and the Cemracs system pin both to one.
    """
    if family not in KIND:
        raise DomainError(f"unknown family {family!r}; available: {', '.join(FAMILIES)}")
    a, b = float(a), float(b)
    if family in FIXED_UNIT and (a, b) != (1.0, 1.0):
        raise DomainError(f"{family} fixes a = b = 1")
    if not (np.isfinite(a) and np.isfinite(b) and a > 0 and b > 0):
        raise DomainError("group parameters must be finite and positive")
    m = DIM[family]
    refl = np.diag([1.0, -1.0, 1.0][:m])
    return GroupRep(family, (a, b), m, _frozen(generator_matrix(family, a, b)), _frozen(refl))


def boost(rep, v):
    """Closed-form boost matrix ``Y(v)``."""
    v = float(v)
    if not np.isfinite(v):
        raise DomainError("boost velocity must be finite")
    return boost_many(rep, np.array([v]))[:, :, 0]


def boost_many(rep, v):
    """Stack of boosts, shape ``(m, m, n)`` for an array of ``n`` velocities."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("boost velocity must be finite")
    a, b = rep.params
    m = rep.m
    out = np.zeros((m, m) + v.shape)
    if rep.kind == "nilpotent":
        out[0, 0] = out[1, 1] = out[2, 2] = 1.0
        out[1, 0] = -a * v
        out[2, 1] = -b * v
        out[2, 0] = a * b * v * v / 2.0
        return out
    s = v * np.sqrt(a * b)
    r = np.sqrt(b / a)
    if rep.kind == "hyperbolic":
        c, sn = np.cosh(s), np.sinh(s)
        out[0, 1] = -r * sn
    else:
        c, sn = np.cos(s), np.sin(s)
        out[0, 1] = r * sn
    out[0, 0] = out[1, 1] = c
    out[1, 0] = -sn / r
    if m == 3:
        out[2, 2] = 1.0
    return out


def apply(matrix, w):
    """Matrix-vector product, also for stacks.

    ``matrix`` is ``(m, m)`` or ``(m, m, n)``; ``w`` is ``(m,)`` or ``(m, n)``.
    Sums run in a fixed order so results do not depend on batch size.
    """
    M = np.asarray(matrix, dtype=float)
    w = np.asarray(w, dtype=float)
    m = M.shape[0]
    if M.shape[1] != m or w.shape[0] != m:
        raise DomainError(f"dimension mismatch: matrix {M.shape[:2]} vs state {w.shape}")
    if M.ndim == 2:
        M = M.reshape(M.shape + (1,) * (w.ndim - 1))
    out = M[:, 0] * w[0]
    for j in range(1, m):
        out = out + M[:, j] * w[j]
    return out


def check_group_axioms(rep, v, w):
    """Residuals of Y(v)Y(w) = Y(v+w), R^2 = I and Y(v) R Y(v) = R."""
    Yv, Yw, Yvw = boost(rep, v), boost(rep, w), boost(rep, v + w)
    R = rep.reflection
    r1 = np.max(np.abs(Yv @ Yw - Yvw))
    r2 = np.max(np.abs(R @ R - np.eye(rep.m)))
    r3 = np.max(np.abs(Yv @ R @ Yv - R))
    return float(r1), float(r2), float(r3)


def generator_exp_check(rep, v, n_terms=30):
    """Compare a truncated exponential series of ``v G`` with the closed form."""
    if n_terms < 20:
        raise DomainError("n_terms must be at least 20")
    G = rep.generator * float(v)
    term = np.eye(rep.m)
    total = term.copy()
    for k in range(1, n_terms):
        term = term @ G / k
        total = total + term
    return float(np.max(np.abs(total - boost(rep, v))))

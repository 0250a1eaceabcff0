"""Retraction and discretization maps, flat and left-trivialized.

A retraction sends (x, v) in TM to a nearby point with R(x, 0) = x and
d/dt|_0 R(x, tv) = v.  A discretization map produces an ordered pair

    D(x, v) = (R(x, -theta v), R(x, (1-theta) v)),   theta in [0, 1],

so that D(x, 0) = (x, x) and the first-order difference of the two legs
recovers v.  On a Lie group the same construction runs through a local
diffeomorphism tau from the algebra to the group,

    D^L(g, xi) = (g tau(-s xi), g tau((1-s) xi)),    s in [0, 1].

Two tau's are provided: the matrix exponential, and the scaled Cayley
transform tau(xi) = cay_so3(xi/2).  The half argument makes the Cayley
retraction first-order tangent (cay_so3 itself rotates by 2*atan|v|, so the
unscaled map would double every velocity at the origin and the induced
integrators would run at 4x speed).  Its inverse is 2*cay_inv_so3.

The module also houses the local-coordinate second-order maps: the canonical
flip (q, qdot, dq, dqdot) -> (q, dq, qdot, dqdot) on TTQ and the bundle
isomorphisms alpha: TT*Q -> T*TQ and beta: TT*Q -> T*T*Q, whose coordinate
forms are pure (signed) permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import so3
from .errors import DimMismatch, GeomintError, OutOfChart
from .so3 import Mat3, Rotation, Vec3

EXP_TAG = "exp"
CAYLEY_TAG = "cayley"


# --- retractions -------------------------------------------------------------

@dataclass(frozen=True)
class FlatRetraction:
    """R(x, v) = x + v on R^n."""

    dimension: int

    def retract(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if x.shape != (self.dimension,) or v.shape != (self.dimension,):
            raise DimMismatch(f"expected vectors of dimension {self.dimension}")
        return x + v


@dataclass(frozen=True)
class TrivializedRetraction:
    """Local diffeomorphism tau: R^3 -> SO(3) with its inverse and a tag.

    tau(0) = I and tau is first-order tangent, so left translation
    R^L(g, xi) = g tau(xi) is a left-trivialized retraction.  ``tag`` selects
    the matching logarithmic-derivative matrices for the momentum relations.
    """

    tau: Callable[[Vec3], Rotation]
    tau_inv: Callable[[Rotation], Vec3]
    tag: str

    def dual_matrix(self, xi: Vec3) -> Mat3:
        """Matrix of the dual of the left logarithmic derivative at xi."""
        if self.tag == EXP_TAG:
            return so3.dexp_dual_matrix(xi)
        half = so3.vec_scale(xi, 0.5)
        mat, s = so3.dcay_dual_matrix(half)
        # dual of tau(xi) = cay(xi/2) picks up the chain-rule factor 1/2
        return so3.mat_scale(mat, 0.5 / s)

    def dlog_matrix(self, xi: Vec3) -> Mat3:
        """Matrix of the left logarithmic derivative itself at xi."""
        if self.tag == EXP_TAG:
            return so3.dexp_left_matrix(xi)
        # normalized Cayley: (I - hat(xi/2)) / (1 + |xi|^2/4)
        x, y, z = xi
        c = 1.0 / (1.0 + 0.25 * (x * x + y * y + z * z))
        h = 0.5 * c
        return (
            (c, h * z, -h * y),
            (-h * z, c, h * x),
            (h * y, -h * x, c),
        )


def exp_retraction() -> TrivializedRetraction:
    return TrivializedRetraction(tau=so3.exp_so3, tau_inv=so3.log_so3, tag=EXP_TAG)


def cayley_retraction() -> TrivializedRetraction:
    def tau(v: Vec3) -> Rotation:
        return so3.cay_so3(so3.vec_scale(v, 0.5))

    def tau_inv(r: Rotation) -> Vec3:
        return so3.vec_scale(so3.cay_inv_so3(r), 2.0)

    return TrivializedRetraction(tau=tau, tau_inv=tau_inv, tag=CAYLEY_TAG)


@dataclass(frozen=True)
class DiscretizationParams:
    """Family parameters: theta for the flat family, s for the trivialized one."""

    theta: float = 0.5
    s: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta {self.theta} outside [0, 1]")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s {self.s} outside [0, 1]")


# --- flat discretization maps -------------------------------------------------

def flat_discretize(x, v, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """D(x, v) = (x - theta v, x + (1 - theta) v)."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise DimMismatch(f"shapes {x.shape} and {v.shape} differ")
    return x - theta * v, x + (1.0 - theta) * v


def flat_discretize_inverse(a, b, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form inverse: v = b - a and x = (1 - theta) a + theta b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes {a.shape} and {b.shape} differ")
    return (1.0 - theta) * a + theta * b, b - a


# --- trivialized discretization maps ------------------------------------------

def triv_discretize(
    g: Rotation, xi: Vec3, s: float, ret: TrivializedRetraction
) -> tuple[Rotation, Rotation]:
    """D^L(g, xi) = (g tau(-s xi), g tau((1-s) xi))."""
    first = g.multiply(ret.tau(so3.vec_scale(xi, -s)))
    second = g.multiply(ret.tau(so3.vec_scale(xi, 1.0 - s)))
    return first, second


def triv_discretize_inverse(
    g1: Rotation,
    g2: Rotation,
    s: float,
    ret: TrivializedRetraction,
    tol: float = 1e-12,
    max_iter: int = 50,
) -> tuple[Rotation, Vec3]:
    """Recover (g, xi) from the pair (g tau(-s xi), g tau((1-s) xi)).

    For s = 0 this is tau_inv of the relative rotation; otherwise xi solves
    tau((1-s) xi) = tau(-s xi) M with M = g1^-1 g2, by Newton on the residual
    tau_inv(tau(-s xi) M) - (1-s) xi.  Raises OutOfChart when the relative
    rotation leaves the injectivity domain or the iteration stalls.
    """
    m_rel = Rotation(so3.mat_mul(so3.mat_transpose(g1.m), g2.m))
    try:
        xi = ret.tau_inv(m_rel)
    except GeomintError as exc:
        raise OutOfChart(str(exc)) from exc
    if s == 0.0:
        return g1, xi

    def residual(x: Vec3) -> Vec3:
        head = ret.tau(so3.vec_scale(x, -s))
        try:
            y = ret.tau_inv(Rotation(so3.mat_mul(head.m, m_rel.m)))
        except GeomintError as exc:
            raise OutOfChart(str(exc)) from exc
        return so3.vec_sub(y, so3.vec_scale(x, 1.0 - s))

    h = 1e-7
    for iteration in range(max_iter):
        r0 = residual(xi)
        if max(abs(c) for c in r0) <= tol:
            break
        cols = []
        for i in range(3):
            e = [0.0, 0.0, 0.0]
            e[i] = h
            rp = residual(so3.vec_add(xi, tuple(e)))  # type: ignore[arg-type]
            rm = residual(so3.vec_sub(xi, tuple(e)))  # type: ignore[arg-type]
            cols.append(so3.vec_scale(so3.vec_sub(rp, rm), 0.5 / h))
        jac: Mat3 = tuple(
            (cols[0][i], cols[1][i], cols[2][i]) for i in range(3)
        )  # type: ignore[assignment]
        step = so3.solve3(jac, r0)
        xi = so3.vec_sub(xi, step)
    else:
        raise OutOfChart("discretization inverse did not converge")
    # g = D1 tau(-s xi)^-1, and tau(-v)^-1 = tau(v) for these retractions
    g = g1.multiply(ret.tau(so3.vec_scale(xi, s)))
    return g, xi


def triv_disc_inverse_left(
    g_k: Rotation,
    mu_k: Vec3,
    g_k1: Rotation,
    mu_k1: Vec3,
    ret: TrivializedRetraction,
) -> tuple[tuple[Rotation, Vec3], tuple[Vec3, Vec3]]:
    """Inverse of the left cotangent-lifted discretization (s = 0 family).

    Returns ((g_k, nu), (xi, dmu)) where xi = tau_inv(g_k^-1 g_{k+1}),
    nu is the dual logarithmic-derivative transport of mu_{k+1}, and
    dmu = Ad*_{(g_k^-1 g_{k+1})^-1}(mu_{k+1}) - mu_k.
    """
    w = so3.mat_mul(so3.mat_transpose(g_k.m), g_k1.m)
    try:
        xi = ret.tau_inv(Rotation(w))
    except GeomintError as exc:
        raise OutOfChart(str(exc)) from exc
    nu = so3.mat_vec(ret.dual_matrix(xi), mu_k1)
    # Ad*_{W^-1}(mu') = (W^-1)^T mu' = W mu'
    dmu = so3.vec_sub(so3.mat_vec(w, mu_k1), mu_k)
    return (g_k, nu), (xi, dmu)


def triv_disc_inverse_right(
    g_k: Rotation,
    mu_k: Vec3,
    g_k1: Rotation,
    mu_k1: Vec3,
    ret: TrivializedRetraction,
) -> tuple[tuple[Rotation, Vec3], tuple[Vec3, Vec3]]:
    """Inverse of the right cotangent-lifted discretization (s = 0 family).

    The momentum difference is plain mu_{k+1} - mu_k and the transported
    covector is the dual derivative applied to Ad*_{g_{k+1}}(mu_{k+1}).
    """
    w = so3.mat_mul(so3.mat_transpose(g_k.m), g_k1.m)
    try:
        xi = ret.tau_inv(Rotation(w))
    except GeomintError as exc:
        raise OutOfChart(str(exc)) from exc
    nu = so3.mat_vec(ret.dual_matrix(xi), g_k1.apply_transpose(mu_k1))
    dmu = so3.vec_sub(mu_k1, mu_k)
    return (g_k, nu), (xi, dmu)


# --- local second-order maps ---------------------------------------------------

@dataclass(frozen=True)
class LocalSecondOrderPoint:
    """Coordinate tuple on an iterated (co)tangent bundle.

    Slots read (q, p_or_v, qdot, pdot_or_vdot); all four share one dimension.
    """

    q: np.ndarray
    p_or_v: np.ndarray
    qdot: np.ndarray
    pdot_or_vdot: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.q, self.p_or_v, self.qdot, self.pdot_or_vdot)]
        n = arrays[0].shape
        if any(a.shape != n for a in arrays):
            raise DimMismatch("all four slots must share one dimension")
        object.__setattr__(self, "q", arrays[0])
        object.__setattr__(self, "p_or_v", arrays[1])
        object.__setattr__(self, "qdot", arrays[2])
        object.__setattr__(self, "pdot_or_vdot", arrays[3])

    def as_tuple(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.q, self.p_or_v, self.qdot, self.pdot_or_vdot


def canonical_flip(p: LocalSecondOrderPoint) -> LocalSecondOrderPoint:
    """(q, qdot, dq, dqdot) -> (q, dq, qdot, dqdot); an involution on TTQ."""
    return LocalSecondOrderPoint(p.q, p.qdot, p.p_or_v, p.pdot_or_vdot)


def alpha_local(p: LocalSecondOrderPoint) -> LocalSecondOrderPoint:
    """(q, p, qdot, pdot) -> (q, qdot, pdot, p), the TT*Q -> T*TQ isomorphism."""
    return LocalSecondOrderPoint(p.q, p.qdot, p.pdot_or_vdot, p.p_or_v)


def alpha_local_inverse(p: LocalSecondOrderPoint) -> LocalSecondOrderPoint:
    return LocalSecondOrderPoint(p.q, p.pdot_or_vdot, p.p_or_v, p.qdot)


def beta_local(p: LocalSecondOrderPoint) -> LocalSecondOrderPoint:
    """(q, p, qdot, pdot) -> (q, p, pdot, -qdot), the TT*Q -> T*T*Q map.

    Applied to a differential tuple (q, p, dH/dq, dH/dp) the last two slots
    become (dH/dp, -dH/dq): the canonical equations' right-hand side.
    """
    return LocalSecondOrderPoint(p.q, p.p_or_v, p.pdot_or_vdot, -p.qdot)


def beta_local_inverse(p: LocalSecondOrderPoint) -> LocalSecondOrderPoint:
    return LocalSecondOrderPoint(p.q, p.p_or_v, -p.pdot_or_vdot, p.qdot)

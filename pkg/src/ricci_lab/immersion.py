"""Rotational realization of the a = 4 family in the 3-sphere of curvature c.

The profile curve alpha(s) = (r cos(theta), r sin(theta), f, 0) with
r = sqrt(1/c - f^2) lives in the upper hemisphere of a totally geodesic
2-sphere; theta advances at rate

    theta'(s) = sqrt(c) sqrt(m + (1 - 2 ell) f^2) / (f (1 - c f^2)),

which is bounded away from 0 and infinity precisely on the admissible set
(m < 1/c and sqrt(cm) < ell < (cm + 1)/2).  The curve closes iff the
per-period advance Theta = theta(pi/sqrt(c)) is a rational multiple of
2 pi, and the swept torus is embedded when Theta = 2 pi / n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import spherical_family as sf
from .errors import (
    DomainError,
    NoBracket,
    NotImmersible,
    PoleSingularity,
    RangeError,
    ResolutionWarning,
)
from .phase_portrait import _quad_checked
from .spherical_family import Classification, SphericalParams

__all__ = [
    "ThetaProfile",
    "ClosureResult",
    "ProfileCurve",
    "SolveResult",
    "theta_rate",
    "theta",
    "theta_grid",
    "big_theta",
    "make_theta_profile",
    "theta_limits",
    "detect_closure",
    "solve_for_ell",
    "mean_curvature",
    "profile_point",
    "surface_point",
    "stereographic",
    "profile_simple_check",
]

_IMMERSIBLE = (Classification.INTERIOR_LAMBDA_PRIME,
               Classification.BOUNDARY_CONSTANT)


def _require_immersible(params: SphericalParams) -> Classification:
    cls = params.classification
    if cls not in _IMMERSIBLE:
        raise NotImmersible(
            f"(c={params.c}, m={params.m}, ell={params.ell}) classifies as "
            f"{cls.value}; rotational realization needs InteriorLambdaPrime "
            "or BoundaryConstant"
        )
    return cls


def _rate_of_fsq(params: SphericalParams, g):
    c, m, ell = params.c, params.m, params.ell
    return (math.sqrt(c) * np.sqrt(m + (1.0 - 2.0 * ell) * g)
            / (np.sqrt(g) * (1.0 - c * g)))


def theta_rate(params: SphericalParams, s) -> float:
    """theta'(s); positive and finite on the admissible set."""
    _require_immersible(params)
    f, _, _ = sf.f_closed(params, s)
    return _rate_of_fsq(params, f * f)


@lru_cache(maxsize=512)
def big_theta(params: SphericalParams) -> float:
    """Rotation advance over one fundamental period: Theta = theta(pi/sqrt(c))."""
    cls = _require_immersible(params)
    T = params.period
    if cls is Classification.BOUNDARY_CONSTANT:
        return float(theta_rate(params, 0.0)) * T
    return _quad_checked(lambda s: theta_rate(params, s), 0.0, T,
                         points=(0.25 * T, 0.75 * T))


def theta(params: SphericalParams, s: float) -> float:
    """theta(s) by adaptive quadrature of theta', folded by quasi-periodicity."""
    _require_immersible(params)
    T = params.period
    n = math.floor(s / T)
    r = s - n * T
    base = n * big_theta(params) if n else 0.0
    if r == 0.0:
        return base
    return base + _quad_checked(lambda u: theta_rate(params, u), 0.0, r,
                                points=(0.25 * T, 0.75 * T))


def theta_grid(params: SphericalParams, s_values) -> np.ndarray:
    """theta at an increasing grid of s >= 0, by cumulative quadrature."""
    _require_immersible(params)
    s = np.asarray(s_values, dtype=float)
    if s.size and (s[0] < 0 or np.any(np.diff(s) <= 0)):
        raise DomainError("theta_grid expects an increasing grid of s >= 0")
    out = np.empty_like(s)
    acc = 0.0
    prev = 0.0
    for i, si in enumerate(s):
        if si > prev:
            acc += _quad_checked(lambda u: theta_rate(params, u), prev, si)
            prev = si
        out[i] = acc
    return out


@dataclass(frozen=True)
class ThetaProfile:
    """theta together with its per-period advance and rate bounds S1 <= theta' <= S2."""

    params: SphericalParams
    theta: Callable[[float], float]
    Theta: float
    S1: float
    S2: float


def make_theta_profile(params: SphericalParams) -> ThetaProfile:
    cls = _require_immersible(params)
    if cls is Classification.BOUNDARY_CONSTANT:
        rate = float(theta_rate(params, 0.0))
        s1 = s2 = rate
    else:
        g_lo, g_hi = params.f_sq_min, params.f_sq_max

        def rate_g(g):
            return float(_rate_of_fsq(params, g))

        lo = minimize_scalar(rate_g, bounds=(g_lo, g_hi), method="bounded",
                             options={"xatol": 1e-14})
        hi = minimize_scalar(lambda g: -rate_g(g), bounds=(g_lo, g_hi),
                             method="bounded", options={"xatol": 1e-14})
        # endpoints are candidates too: the extremum may sit on the boundary
        cands = [rate_g(g_lo), rate_g(g_hi), lo.fun, -hi.fun]
        s1 = min(cands) * (1.0 - 1e-12)
        s2 = max(cands) * (1.0 + 1e-12)
    return ThetaProfile(params=params, theta=lambda s: theta(params, s),
                        Theta=big_theta(params), S1=s1, S2=s2)


def theta_limits(c: float, which: str, m: Optional[float] = None,
                 ell: Optional[float] = None) -> float:
    """Closed-form boundary values of Theta.

    which:
      "m_to_boundary"  -- m -> ell^2/c at fixed ell in (0,1): pi/sqrt(1-ell)
      "m_to_zero"      -- m -> 0 at fixed ell in (0,1/2]:      pi
      "ell_to_lower"   -- ell -> sqrt(cm) at fixed cm in (0,1): pi/sqrt(1-sqrt(cm))
      "ell_to_upper"   -- ell -> (cm+1)/2:                      +inf
    General c reduces to c = 1 through the scaling map m -> c m.
    """
    if c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    if which == "m_to_boundary":
        if ell is None or not 0.0 < ell < 1.0:
            raise RangeError(f"m_to_boundary needs ell in (0, 1), got {ell}")
        return math.pi / math.sqrt(1.0 - ell)
    if which == "m_to_zero":
        if ell is None or not 0.0 < ell <= 0.5:
            raise RangeError(f"m_to_zero needs ell in (0, 1/2], got {ell}")
        return math.pi
    if which == "ell_to_lower":
        if m is None or not 0.0 < c * m < 1.0:
            raise RangeError(f"ell_to_lower needs c*m in (0, 1), got m={m}")
        return math.pi / math.sqrt(1.0 - math.sqrt(c * m))
    if which == "ell_to_upper":
        if m is None or not 0.0 < c * m < 1.0:
            raise RangeError(f"ell_to_upper needs c*m in (0, 1), got m={m}")
        return math.inf
    raise RangeError(f"unknown limit selector {which!r}")


@dataclass(frozen=True)
class ClosureResult:
    """Rational closure Theta ~ 2 pi p / q; the profile closes after q periods."""

    p: int
    q: int
    embedded: bool

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise DomainError("closure requires positive integers p, q")
        if math.gcd(self.p, self.q) != 1:
            raise DomainError(f"p={self.p}, q={self.q} must be coprime")


def detect_closure(theta_total: float, q_max: int = 50,
                   tol: float = 1e-8) -> Optional[ClosureResult]:
    """First continued-fraction convergent p/q of Theta/(2 pi) with q <= q_max
    and |q Theta - 2 pi p| <= tol; None when no convergent qualifies."""
    if theta_total <= 0 or q_max < 1:
        raise DomainError("detect_closure needs Theta > 0 and q_max >= 1")
    x = theta_total / (2.0 * math.pi)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    frac = x
    for _ in range(64):
        a0 = math.floor(frac)
        h_prev, h = h, a0 * h + h_prev
        k_prev, k = k, a0 * k + k_prev
        if k > q_max:
            return None
        if h >= 1 and abs(k * theta_total - 2.0 * math.pi * h) <= tol:
            return ClosureResult(p=h, q=k, embedded=(h == 1))
        rem = frac - a0
        if rem <= 1e-16:
            return None
        frac = 1.0 / rem
    return None


@dataclass(frozen=True)
class SolveResult:
    ell: float
    theta_total: float
    closure: ClosureResult
    brackets: tuple


def solve_for_ell(c: float, m: float, target_p: int = 1, target_q: int = 1,
                  n_scan: int = 64, tol: float = 1e-10) -> SolveResult:
    """Find ell with Theta(m, ell) = 2 pi p / q by scan-then-bracket.

    Theta is not assumed monotone in ell: all sign-change brackets at the
    scan resolution are collected and the smallest root is refined by a
    bisection-safeguarded secant iteration.
    """
    if not 0.0 < c * m < 1.0:
        raise NotImmersible(f"solve_for_ell needs 0 < c*m < 1, got c*m={c * m}")
    if target_p < 1 or target_q < 1:
        raise DomainError("target p, q must be positive integers")
    g = math.gcd(target_p, target_q)
    p, q = target_p // g, target_q // g
    target = 2.0 * math.pi * p / q

    delta = 1e-9 * (1.0 + c * m)
    lo = math.sqrt(c * m) + delta
    hi = (c * m + 1.0) / 2.0 - delta
    ells = np.linspace(lo, hi, n_scan)

    def h_of(ell):
        return big_theta(SphericalParams(c=c, m=m, ell=float(ell))) - target

    values = [h_of(e) for e in ells]
    brackets = [
        (float(ells[i]), float(ells[i + 1]))
        for i in range(n_scan - 1)
        if values[i] == 0.0 or values[i] * values[i + 1] < 0.0
    ]
    if not brackets:
        raise NoBracket(
            f"Theta - {target} has no sign change over ({lo}, {hi}) at "
            f"{n_scan} samples; Theta spans [{target + min(values)}, "
            f"{target + max(values)}]"
        )

    a_, b_ = brackets[0]
    fa, fb = h_of(a_), h_of(b_)
    root, froot = (a_, fa) if abs(fa) < abs(fb) else (b_, fb)
    for _ in range(200):
        if abs(froot) <= tol:
            break
        if fb != fa:
            cand = b_ - fb * (b_ - a_) / (fb - fa)
        else:
            cand = 0.5 * (a_ + b_)
        if not (min(a_, b_) < cand < max(a_, b_)):
            cand = 0.5 * (a_ + b_)
        fc = h_of(cand)
        root, froot = cand, fc
        if fa * fc <= 0.0:
            b_, fb = cand, fc
        else:
            a_, fa = cand, fc
    if abs(froot) > tol:
        raise NoBracket(f"secant refinement stalled at |Theta - target| = {abs(froot)}")

    return SolveResult(ell=float(root), theta_total=target + froot,
                       closure=ClosureResult(p=p, q=q, embedded=(p == 1)),
                       brackets=tuple(brackets))


def mean_curvature(params: SphericalParams, s) -> float:
    """Mean curvature of the swept surface.

    Evaluates the raw second-order formula and its algebraic simplification
    H = (2 ell - 1) / (2 sqrt(m + (1 - 2 ell) f^2)) and insists they agree.
    """
    _require_immersible(params)
    c, m, ell = params.c, params.m, params.ell
    f, f1, f2 = sf.f_closed(params, s)
    g = f * f
    simplified = (2.0 * ell - 1.0) / (2.0 * math.sqrt(m + (1.0 - 2.0 * ell) * g))
    raw = ((f * f2 + f1 * f1 + 2.0 * c * g - 1.0)
           / (2.0 * f * math.sqrt(1.0 - c * g - f1 * f1)))
    if abs(raw - simplified) > 1e-11 * max(1.0, abs(simplified)):
        raise DomainError(
            f"mean-curvature forms disagree at s={s}: {raw} vs {simplified}"
        )
    return simplified


def profile_point(params: SphericalParams, s: float,
                  theta_value: Optional[float] = None) -> np.ndarray:
    """Profile-curve point alpha(s) in R^4 (fourth coordinate 0)."""
    _require_immersible(params)
    f, _, _ = sf.f_closed(params, s)
    th = theta(params, s) if theta_value is None else theta_value
    r = math.sqrt(max(1.0 / params.c - f * f, 0.0))
    return np.array([r * math.cos(th), r * math.sin(th), float(f), 0.0])


def surface_point(params: SphericalParams, s: float, t: float,
                  theta_value: Optional[float] = None) -> np.ndarray:
    """X(s, t): rotate alpha(s) by angle t in the (z, w)-plane."""
    x, y, z, _ = profile_point(params, s, theta_value=theta_value)
    return np.array([x, y, z * math.cos(t), z * math.sin(t)])


def stereographic(point, c: float) -> np.ndarray:
    """Project a point of the c-sphere (radius 1/sqrt(c)) from the pole
    (0, 0, 0, -1/sqrt(c)) onto R^3, after scaling to the unit sphere."""
    p = np.asarray(point, dtype=float) * math.sqrt(c)
    denom = 1.0 + p[3]
    if abs(denom) < 1e-12:
        raise PoleSingularity("stereographic projection at the pole")
    return p[:3] / denom


def _segments_intersect(p, q):
    """Boolean matrix of proper/improper crossings between segment sets.

    p, q: arrays (n, 2, 2) of segment endpoints; entry [i, j] is True when
    segment i of p meets segment j of q.
    """

    def orient(a, b, c):
        return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
                - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))

    a = p[:, None, 0]
    b = p[:, None, 1]
    c = q[None, :, 0]
    d = q[None, :, 1]
    d1 = orient(c, d, a)
    d2 = orient(c, d, b)
    d3 = orient(a, b, c)
    d4 = orient(a, b, d)
    return (((d1 > 0) != (d2 > 0)) & ((d3 > 0) != (d4 > 0))
            | (d1 == 0) & (d2 == 0) & (d3 == 0) & (d4 == 0)
            & _collinear_overlap(a, b, c, d))


def _collinear_overlap(a, b, c, d):
    lo1 = np.minimum(a, b)
    hi1 = np.maximum(a, b)
    lo2 = np.minimum(c, d)
    hi2 = np.maximum(c, d)
    return np.all((lo1 <= hi2) & (lo2 <= hi1), axis=-1)


def profile_simple_check(params: SphericalParams,
                         closure: Optional[ClosureResult],
                         n_samples: int = 1024) -> bool:
    """True when the closed planar projection (x, y) of the profile curve has
    no self-intersection over one circuit of q fundamental periods."""
    if closure is None:
        raise DomainError("profile_simple_check needs a closure result")
    _require_immersible(params)
    q = closure.q
    s_total = q * params.period
    s = np.linspace(0.0, s_total, n_samples, endpoint=False)
    thetas = theta_grid(params, s)
    f = sf.f_closed(params, s)[0]
    r = np.sqrt(np.maximum(1.0 / params.c - f * f, 0.0))
    pts = np.stack([r * np.cos(thetas), r * np.sin(thetas)], axis=1)

    nxt = np.roll(np.arange(n_samples), -1)
    segs = np.stack([pts, pts[nxt]], axis=1)
    idx = np.arange(n_samples)
    gap = np.minimum(np.abs(idx[:, None] - idx[None, :]),
                     n_samples - np.abs(idx[:, None] - idx[None, :]))

    hits = _segments_intersect(segs, segs)
    simple = not bool(np.any(hits & (gap > 1)))

    if simple:
        # feature size: closest approach between strands that are far apart
        # along the curve; near-in-arclength pairs are trivially close
        seg_len = np.linalg.norm(pts[nxt] - pts, axis=1)
        max_seg = float(np.max(seg_len))
        min_seg = float(np.min(seg_len[seg_len > 0], initial=max_seg))
        cutoff = max(2, math.ceil(4.0 * max_seg / max(min_seg, 1e-300)))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        far = np.where(gap <= cutoff, np.inf, dist)
        if float(np.min(far)) < 4.0 * max_seg:
            warnings.warn(
                "profile features smaller than 4 sample spacings; increase "
                "n_samples for a trustworthy simplicity verdict",
                ResolutionWarning,
            )
    return simple


@dataclass(frozen=True)
class ProfileCurve:
    """Discretized profile curve with closure metadata."""

    s: np.ndarray
    theta: np.ndarray
    points: np.ndarray  # (n, 4)
    closure: Optional[ClosureResult]
    winding: dict

"""Piecewise complex paths and adaptive quadrature along them.

Paths are built from four segment kinds: finite lines, circular arcs,
the unit spiral ``p = theta * exp(2 pi i theta)`` and rays to infinity.
Finite pieces are integrated with adaptive Gauss-Kronrod (7/15); a piece
flagged ``singular_start`` is integrated with a tanh-sinh rule so that an
integrable endpoint singularity costs only a few extra levels.  Rays are
cut into geometrically growing pieces and truncated once a tail bound
drops below a tenth of the tolerance.

Integrands are called with numpy arrays of complex points and must
return an array of the same shape (a scalar is broadcast).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationFailure, NonConvergence

TWO_PI = 2.0 * math.pi
_EPS = np.finfo(float).eps

# Kronrod 15-point abscissae (descending, last is the centre) and weights,
# with the embedded 7-point Gauss weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_X15 = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_W15 = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_W7 = np.zeros(15)
_W7[[1, 3, 5, 7, 9, 11, 13]] = [_WG[0], _WG[1], _WG[2], _WG[3], _WG[2], _WG[1], _WG[0]]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    nodes_used: int
    truncation_radius: Optional[float] = None

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ValueError("error estimate must be nonnegative")
        if self.nodes_used < 1:
            raise ValueError("at least one node must be used")

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        radii = [r for r in (self.truncation_radius, other.truncation_radius) if r is not None]
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.nodes_used + other.nodes_used,
            max(radii) if radii else None,
        )

    def scaled(self, factor: complex) -> "QuadratureResult":
        return QuadratureResult(
            self.value * factor,
            self.abs_error_estimate * abs(factor),
            self.nodes_used,
            self.truncation_radius,
        )


@dataclass(frozen=True)
class PathSegment:
    """One oriented piece of an integration path.

    Rays start at ``start`` and run along the unit vector ``direction``;
    ``inward=True`` reverses the orientation (from infinity back to
    ``start``).  Arcs run over ``angle_from -> angle_to`` (clockwise when
    the angle decreases).  The spiral covers ``theta_from -> theta_to`` of
    ``p = theta * exp(2 pi i theta)``.
    """

    kind: str
    start: complex
    end: Optional[complex] = None
    direction: complex = 1.0
    inward: bool = False
    center: complex = 0.0
    radius: float = 0.0
    angle_from: float = 0.0
    angle_to: float = 0.0
    theta_from: float = 0.0
    theta_to: float = 1.0
    singular_start: bool = False
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("ray", "line", "arc", "spiral"):
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.kind == "ray" and abs(abs(self.direction) - 1.0) > 1e-12:
            raise ValueError("ray direction must be a unit complex number")
        if self.kind == "arc" and not self.radius > 0:
            raise ValueError("arc radius must be positive")
        if self.kind == "line" and self.end is None:
            raise ValueError("line needs an end point")

    # parameterisation -------------------------------------------------
    def param_range(self) -> tuple[float, float]:
        if self.kind == "line":
            return 0.0, 1.0
        if self.kind == "ray":
            return 0.0, math.inf
        if self.kind == "arc":
            return self.angle_from, self.angle_to
        return self.theta_from, self.theta_to

    def point(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return self.start + t * (self.end - self.start)
        if self.kind == "ray":
            return self.start + t * self.direction
        if self.kind == "arc":
            return self.center + self.radius * np.exp(1j * t)
        return t * np.exp(2j * np.pi * t)

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "line":
            return np.full(t.shape, self.end - self.start, dtype=complex)
        if self.kind == "ray":
            return np.full(t.shape, self.direction, dtype=complex)
        if self.kind == "arc":
            return 1j * self.radius * np.exp(1j * t)
        return np.exp(2j * np.pi * t) * (1.0 + 2j * np.pi * t)

    @property
    def orientation(self) -> int:
        return -1 if (self.kind == "ray" and self.inward) else 1

    def endpoint(self) -> Optional[complex]:
        """Terminal point in traversal order (None for an outgoing ray)."""
        if self.kind == "ray":
            return self.start if self.inward else None
        return complex(self.point(self.param_range()[1]))

    def initial_point(self) -> Optional[complex]:
        if self.kind == "ray":
            return None if self.inward else self.start
        return complex(self.point(self.param_range()[0]))

    def split(self, t: float) -> tuple["PathSegment", "PathSegment"]:
        """Cut at parameter ``t``; the two pieces are returned in traversal order."""
        lo, hi = self.param_range()
        if not (min(lo, hi) < t < max(lo, hi)):
            raise ValueError("split parameter must be interior")
        mid = complex(self.point(t))
        if self.kind == "line":
            return (line(self.start, mid, singular_start=self.singular_start), line(mid, self.end))
        if self.kind == "arc":
            a = arc(self.center, self.radius, self.angle_from, t)
            b = arc(self.center, self.radius, t, self.angle_to)
            return a, b
        if self.kind == "spiral":
            return (
                spiral(self.theta_from, t, singular_start=self.singular_start),
                spiral(t, self.theta_to),
            )
        near = line(self.start, mid, singular_start=self.singular_start and not self.inward)
        far = ray(mid, self.direction, inward=self.inward, scale=self.scale)
        return (far, _reverse_line(near)) if self.inward else (near, far)


def _reverse_line(seg: PathSegment) -> PathSegment:
    return line(seg.end, seg.start)


def line(start: complex, end: complex, singular_start: bool = False) -> PathSegment:
    return PathSegment("line", complex(start), complex(end), singular_start=singular_start)


def ray(start: complex, direction: complex = 1.0, inward: bool = False,
        singular_start: bool = False, scale: float = 1.0) -> PathSegment:
    d = complex(direction)
    if d == 0:
        raise ValueError("ray direction must be nonzero")
    return PathSegment("ray", complex(start), direction=d / abs(d), inward=inward,
                       singular_start=singular_start, scale=scale)


def arc(center: complex, radius: float, angle_from: float, angle_to: float) -> PathSegment:
    return PathSegment("arc", complex(center + radius * np.exp(1j * angle_from)),
                       complex(center + radius * np.exp(1j * angle_to)), center=complex(center),
                       radius=float(radius), angle_from=float(angle_from), angle_to=float(angle_to))


def spiral(theta_from: float = 0.0, theta_to: float = 1.0, singular_start: bool = False) -> PathSegment:
    """Piece of the spiral ``theta * exp(2 pi i theta)``."""
    return PathSegment("spiral", complex(theta_from * np.exp(2j * np.pi * theta_from)),
                       complex(theta_to * np.exp(2j * np.pi * theta_to)),
                       theta_from=float(theta_from), theta_to=float(theta_to),
                       singular_start=singular_start)


@dataclass(frozen=True)
class HankelContour:
    """Contour hugging [0, inf): lower ray leftward, left semicircle clockwise,
    upper ray rightward, all at distance ``epsilon`` from the half line."""

    epsilon: float = 0.25

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    def segments(self) -> list[PathSegment]:
        e = self.epsilon
        return [
            ray(-1j * e, 1.0, inward=True),
            arc(0.0, e, -0.5 * math.pi, -1.5 * math.pi),
            ray(1j * e, 1.0),
        ]


def c1_contour() -> list[PathSegment]:
    """The spiral from 0 to 1 followed by the ray [1, inf)."""
    return [spiral(0.0, 1.0, singular_start=True), ray(1.0, 1.0)]


# branch helpers ----------------------------------------------------------

def cut_log(s):
    """Logarithm with its cut on [0, inf) and imaginary part in (-2 pi, 0].

    Above the positive axis the value is ``ln|s| - 2 pi i``; below (and on)
    it is ``ln|s|``.
    """
    out = np.log(np.asarray(s, dtype=complex))
    return out - TWO_PI * 1j * (out.imag > 0)


def cut_power(s, exponent):
    return np.exp(exponent * cut_log(s))


def c1_log(p):
    """Logarithm continued along the C1 spiral.

    Its argument runs from -2 pi at the origin to 0 at p = 1 along the spiral
    and is 0 on [1, inf).  The cut follows the parallel spiral rotated by pi,
    which never meets C1.
    """
    p = np.asarray(p, dtype=complex)
    r = np.abs(p)
    centre = TWO_PI * (np.minimum(r, 1.0) - 1.0)
    ang = np.angle(p)
    ang = ang + TWO_PI * np.round((centre - ang) / TWO_PI)
    return np.log(r) + 1j * ang


# rules -------------------------------------------------------------------

def _as_array_fn(f: Callable) -> Callable:
    """Wrap ``f`` so it maps an array of points to a same-shape complex array."""

    def wrapped(z):
        try:
            out = f(z)
        except (TypeError, ValueError):
            out = np.vectorize(f, otypes=[complex])(z)
        out = np.asarray(out, dtype=complex)
        if out.shape != np.shape(z):
            out = np.broadcast_to(out, np.shape(z)).astype(complex)
        return out

    return wrapped


def _checked(values, where):
    if not np.all(np.isfinite(values)):
        bad = np.asarray(where).ravel()[~np.isfinite(np.asarray(values).ravel())][:3]
        raise EvaluationFailure(f"integrand not finite at {bad}")
    return values


def gauss_kronrod(g: Callable, a: float, b: float, tol: float,
                  max_nodes: int = 300_000) -> tuple[complex, float, int]:
    """Globally adaptive 7/15 Gauss-Kronrod on the real interval [a, b].

    Stops once the summed Kronrod-Gauss differences are below ``tol``.
    Otherwise the intervals carrying more than an even share of ``tol``
    (at least the worst tenth) are bisected.  Intervals whose difference
    is at the rounding level of their absolute integral are frozen.
    """
    if a == b:
        return 0j, 0.0, 1
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    done_value = 0j
    done_error = 0.0
    nodes = 0
    act_k = np.zeros(0, dtype=complex)
    act_err = np.zeros(0)
    act_lo = np.zeros(0)
    act_hi = np.zeros(0)
    while True:
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        x = c[:, None] + h[:, None] * _X15[None, :]
        y = np.asarray(g(x.ravel()), dtype=complex).reshape(x.shape)
        nodes += x.size
        k = h * (y @ _W15)
        err = np.abs(k - h * (y @ _W7))
        resabs = np.abs(h) * (np.abs(y) @ _W15)
        floor = err <= 50 * _EPS * resabs
        done_value += k[floor].sum()
        done_error += err[floor].sum()
        act_k = np.concatenate([act_k, k[~floor]])
        act_err = np.concatenate([act_err, err[~floor]])
        act_lo = np.concatenate([act_lo, lo[~floor]])
        act_hi = np.concatenate([act_hi, hi[~floor]])
        total_err = done_error + act_err.sum()
        if total_err <= tol or act_err.size == 0:
            return complex(done_value + act_k.sum()), float(total_err), nodes
        if nodes > max_nodes:
            raise NonConvergence(f"Gauss-Kronrod budget exhausted on [{a}, {b}]",
                                 value=complex(done_value + act_k.sum()), error=float(total_err))
        share = max(tol - done_error, 0.0) / act_err.size
        pick = act_err > share
        cutoff = np.quantile(act_err, 0.9)
        pick |= act_err >= cutoff
        mid = 0.5 * (act_lo[pick] + act_hi[pick])
        lo = np.concatenate([act_lo[pick], mid])
        hi = np.concatenate([mid, act_hi[pick]])
        keep = ~pick
        act_k, act_err, act_lo, act_hi = act_k[keep], act_err[keep], act_lo[keep], act_hi[keep]


def tanh_sinh(g: Callable, a: float, b: float, tol: float, max_level: int = 9,
              tmax: float = 6.0) -> tuple[complex, float, int]:
    """Tanh-sinh rule on [a, b] with step halving until successive levels agree.

    Nodes are placed by their distance to the nearer endpoint so that
    singular endpoints are approached without cancellation.
    """
    length = b - a
    if length == 0:
        return 0j, 0.0, 1

    def contribution(t):
        u = 0.5 * math.pi * np.sinh(t)
        left = length / (1.0 + np.exp(-2.0 * u))
        right = length / (1.0 + np.exp(2.0 * u))
        x = np.where(t < 0, a + left, b - right)
        w = 0.5 * length * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        keep = (x != a) & (x != b) & (w > 0)
        if not keep.any():
            return 0j, 0.0, 0
        y = np.asarray(g(x[keep]), dtype=complex)
        return complex(np.dot(w[keep], y)), float(np.dot(np.abs(w[keep]), np.abs(y))), int(keep.sum())

    h = 0.5
    n = int(tmax / h)
    total, total_abs, nodes = contribution(h * np.arange(-n, n + 1))
    estimate = h * total
    previous = None
    for level in range(1, max_level + 1):
        h *= 0.5
        n = int(tmax / h)
        new, new_abs, count = contribution(h * np.arange(-n + 1, n, 2))
        nodes += count
        total += new
        total_abs += new_abs
        previous, estimate = estimate, h * total
        diff = abs(estimate - previous)
        if level >= 3 and (diff <= tol or diff <= 64 * _EPS * h * total_abs):
            return estimate, float(diff), max(nodes, 1)
    raise NonConvergence(f"tanh-sinh did not converge on [{a}, {b}]",
                         value=estimate, error=abs(estimate - previous))


# segment integration -----------------------------------------------------

def _pullback(f: Callable, seg: PathSegment) -> Callable:
    fa = _as_array_fn(f)

    def g(t):
        z = seg.point(t)
        return _checked(fa(z) * seg.tangent(t), z)

    return g


def _tail_bound(g, radius, decay) -> float:
    if decay is not None:
        c, alpha, k = decay
        if k > 0:
            return c * radius ** alpha * math.exp(-k * radius) / k * (1.0 + max(alpha, 0.0) / (k * radius))
        if alpha >= -1:
            return math.inf
        return c * radius ** (alpha + 1) / (-alpha - 1)
    samples = np.abs(g(radius * np.array([1.0, 1.25, 1.5, 2.0])))
    return float(samples.max() * radius)


def _integrate_ray(g, seg: PathSegment, tol: float, decay, max_pieces: int = 160) -> QuadratureResult:
    value = 0j
    error = 0.0
    nodes = 0
    lo, hi = 0.0, seg.scale
    for m in range(max_pieces):
        piece_tol = max(tol / 2.0 ** (m + 2), tol * 1e-6)
        if m == 0 and seg.singular_start:
            v, e, n = tanh_sinh(g, lo, hi, piece_tol)
        else:
            v, e, n = gauss_kronrod(g, lo, hi, piece_tol)
        value += v
        error += e
        nodes += n
        if m >= 1:
            tail = _tail_bound(g, hi, decay)
            if tail < 0.1 * tol and abs(v) < 0.1 * tol:
                return QuadratureResult(value, error + tail, nodes, hi)
        lo, hi = hi, 2.0 * hi
    raise NonConvergence("ray integrand does not decay within the truncation budget",
                         value=value, error=error)


def integrate_segment(f: Callable, seg: PathSegment, tol: float = 1e-10,
                      decay: Optional[tuple[float, float, float]] = None) -> QuadratureResult:
    """Integrate ``f`` along one segment.

    ``decay = (C, alpha, k)`` declares ``|f| <= C R^alpha exp(-k R)`` far
    along a ray and replaces the sampled tail estimate.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = _pullback(f, seg)
    if seg.kind == "ray":
        res = _integrate_ray(g, seg, tol, decay)
        return res.scaled(seg.orientation)
    lo, hi = seg.param_range()
    rule = tanh_sinh if seg.singular_start else gauss_kronrod
    v, e, n = rule(g, lo, hi, tol)
    return QuadratureResult(v, e, n)


def integrate_custom(f: Callable, contour: Sequence[PathSegment], tol: float = 1e-10,
                     decay: Optional[tuple[float, float, float]] = None) -> QuadratureResult:
    """Sum of segment integrals; the tolerance is split evenly."""
    segments = list(contour)
    if not segments:
        raise ValueError("empty contour")
    share = tol / len(segments)
    total = None
    for seg in segments:
        r = integrate_segment(f, seg, share, decay if seg.kind == "ray" else None)
        total = r if total is None else total + r
    return total


def oint(f: Callable, epsilon: float = 0.25, tol: float = 1e-10,
         decay: Optional[tuple[float, float, float]] = None) -> QuadratureResult:
    """Integral over the Hankel contour around [0, inf) at offset ``epsilon``."""
    return integrate_custom(f, HankelContour(epsilon).segments(), tol, decay)

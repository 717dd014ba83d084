"""Global evaluation of functions whose Taylor coefficients come from a model.

With ``c_k = sum_j a_j^-k int_C e^{-kp} F_j(p) dp`` the series sums under
the integral:

    f(z) = f(0) + sum_j int_C z F_j(p) / (a_j e^p - z) dp          (finite radius)
    f(z) = sum_j int_C expm1(z e^-p / a_j) F_j(p) dp                (c_k / k!)
    B(x) = f(0)/x + sum_j int_C F_j(p) psi(-a_j e^p x) / x dp      (Borel, c_k k!)

with ``psi(w) = w e^w E1(w) - 1``.  Integrals are taken in ``p``; the
substitution ``p = ln(1 + s)`` gives the ``s``-plane form, available through
``variable="s"`` as an independent route.

Near a cut the kernel pole ``p* = Log(z / a_j)`` approaches the contour.  A
Hankel contour is pulled in to half the pole distance, or, when the pole is
very close, left in place and the residue ``2 pi i F(p*)`` added back.  A ray
is bent around the pole by a rectangular detour on the side away from it.
"""
from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import contour as ct
from .errors import (DecayViolation, DomainError, EvaluationFailure, NonConvergence,
                     OnCutError, PoleOnContour)
from .model import CoefficientModel, Density, Term, density_exp_sqrt, density_stirling_f3
from .specfun import scaled_e1

TWO_PI_I = 2j * math.pi
GLOBAL_KINDS = ("finite_radius", "entire", "borel")
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class GlobalFunction:
    model: CoefficientModel
    f0: complex = 0.0
    kind: str = "finite_radius"

    def __post_init__(self):
        if self.kind not in GLOBAL_KINDS:
            raise DomainError(f"kind must be one of {GLOBAL_KINDS}")

    def __call__(self, z, tol: float = DEFAULT_TOL):
        if self.kind == "entire":
            return eval_entire(self, z, tol)
        if self.kind == "borel":
            return borel_sum(self, z, tol)
        return eval_finite_radius(self, z, tol)


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A black-box analytic ``f`` with its singular ray directions ``a_j``."""

    eval: Callable
    ray_directions: tuple
    singular_radii: Optional[tuple] = None
    decay_check_radius: float = 1e3
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        dirs = tuple(complex(a) for a in self.ray_directions)
        if not dirs or any(a == 0 for a in dirs):
            raise DomainError("need at least one nonzero ray direction")
        object.__setattr__(self, "ray_directions", dirs)

    def values(self, z: np.ndarray) -> np.ndarray:
        """``eval`` on an array with memoization of repeated nodes."""
        flat = np.asarray(z, dtype=complex).ravel()
        out = np.empty_like(flat)
        todo = []
        with self._lock:
            for i, v in enumerate(flat):
                hit = self._cache.get(v)
                if hit is None:
                    todo.append(i)
                else:
                    out[i] = hit
        if todo:
            idx = np.array(todo)
            fresh = ct._as_array_fn(self.eval)(flat[idx])
            out[idx] = fresh
            with self._lock:
                for v, g in zip(flat[idx], fresh):
                    self._cache[v] = g
        return out.reshape(np.shape(z))


# path construction -----------------------------------------------------

def _detour(x0: float, pstar: complex, height: float, singular_start: bool) -> list:
    """Real axis from ``x0`` with a rectangular bend around ``pstar``."""
    xp = pstar.real
    xl = x0 + 0.5 * (xp - x0) if xp - x0 < 2.0 else xp - 1.0
    xr = xp + 1.0
    off = -math.copysign(height, pstar.imag) if pstar.imag != 0 else -height
    return [
        ct.line(x0, xl, singular_start=singular_start),
        ct.line(xl, xl + 1j * off),
        ct.line(xl + 1j * off, xr + 1j * off),
        ct.line(xr + 1j * off, xr),
        ct.ray(xr, 1.0, scale=1.0),
    ]


def _hankel_distance(p: complex) -> float:
    return abs(p.imag) if p.real >= 0 else abs(p)


def _on_cut(w: complex) -> bool:
    return w.real >= 1.0 and abs(w.imag) <= 1e-12 * abs(w)


def _pole_plan(dens: Density, pstar: complex):
    """Contour and additive residue term for a kernel pole at ``pstar``.

    Returns ``(segments, extra)`` with ``extra`` the amount to add to the
    contour integral.
    """
    if dens.kind == "hankel":
        eps = dens.epsilon
        d = _hankel_distance(pstar)
        if d > 1.5 * eps:
            return dens.contour(eps), 0j
        if d >= dens.delta / 40.0:
            return dens.contour(0.5 * d), 0j
        return dens.contour(eps), TWO_PI_I * complex(dens(np.array([pstar]))[0])

    height = min(dens.delta, 0.5)
    if dens.kind == "ray":
        if pstar.real > 0 and abs(pstar.imag) < height:
            return _detour(0.0, pstar, height, dens.singular_origin), 0j
        return dens.contour(), 0j

    # spiral C1 then [1, inf); tanh-sinh only on a short first piece so
    # that a pole near the spiral is resolved by adaptive bisection
    r = abs(pstar)
    theta0 = min(0.25, 0.5 * r)
    segs = [ct.spiral(0.0, theta0, singular_start=True), ct.spiral(theta0, 1.0), ct.ray(1.0, 1.0)]
    extra = 0j
    if r < 1.0:
        ang = cmath.phase(pstar) % (2 * math.pi)
        spiral_ang = 2 * math.pi * r
        if r * abs(ang - spiral_ang) < 1e-10 or abs(pstar - 1.0) < 1e-10:
            raise PoleOnContour(f"kernel pole {pstar} lies on the spiral")
        if ang > spiral_ang:
            # pole inside the region wound by the spiral: subtract its residue
            extra = -TWO_PI_I * complex(dens.eval_cut(np.array([pstar]))[0])
    if pstar.real > 1.0 and abs(pstar.imag) < height:
        segs = segs[:2] + _detour(1.0, pstar, height, False)
    return segs, extra


# finite radius ---------------------------------------------------------

def _finite_term(term: Term, z: complex, tol: float) -> ct.QuadratureResult:
    a, dens = term.a, term.density
    w = z / a
    if _on_cut(w):
        raise OnCutError(f"z = {z} lies on the cut a_j [1, inf); use analysis.jump_check")
    pstar = cmath.log(w)
    segs, extra = _pole_plan(dens, pstar)

    # a e^p - z written so that it keeps full precision for z near a, p near 0
    shift = z - a

    def g(p):
        p = np.asarray(p, dtype=complex)
        with np.errstate(over="ignore"):
            return z * dens(p) / (a * np.expm1(p) - shift)

    res = ct.integrate_custom(g, segs, tol)
    return ct.QuadratureResult(res.value + extra, res.abs_error_estimate, res.nodes_used,
                               res.truncation_radius)


def _finite_term_s(term: Term, z: complex, tol: float) -> ct.QuadratureResult:
    """Same integral in ``s = e^p - 1``; no pole handling."""
    a, dens = term.a, term.density
    if dens.kind == "c1_spiral":
        raise NotImplementedError("the s-variable route covers ray and Hankel densities")
    w = z / a
    if _on_cut(w):
        raise OnCutError(f"z = {z} lies on the cut a_j [1, inf)")
    sstar = w - 1.0
    eps = dens.epsilon
    if _hankel_distance(sstar) <= 1.5 * eps and not (dens.kind == "ray" and sstar.real < 0):
        raise DomainError("the s-variable route needs the pole away from the contour")

    def g(s):
        s = np.asarray(s, dtype=complex)
        one = 1.0 + s
        return z * dens(np.log1p(s)) / (one * (one * a - z))

    segs = ([ct.ray(0.0, 1.0, singular_start=dens.singular_origin)] if dens.kind == "ray"
            else ct.HankelContour(eps).segments())
    return ct.integrate_custom(g, segs, tol)


def _batch(fn, z):
    arr = np.asarray(z)
    if arr.ndim == 0:
        return fn(complex(arr))
    flat = [fn(complex(v)) for v in arr.ravel()]
    if flat and isinstance(flat[0], ct.QuadratureResult):
        return np.array(flat, dtype=object).reshape(arr.shape)
    return np.array(flat, dtype=complex).reshape(arr.shape)


def _check_tol(tol):
    if not tol > 0:
        raise DomainError("tol must be positive")


def eval_finite_radius(g: GlobalFunction, z, tol: float = DEFAULT_TOL, variable: str = "p",
                       full_output: bool = False):
    """Analytic continuation of ``f0 + sum c_k z^k`` off the cuts ``a_j [1, inf)``.

    ``z`` may be an array; each point is evaluated independently.  With
    ``full_output`` a QuadratureResult is returned per point.
    """
    _check_tol(tol)
    if variable not in ("p", "s"):
        raise DomainError("variable must be 'p' or 's'")
    term_fn = _finite_term if variable == "p" else _finite_term_s
    share = tol / g.model.n_terms

    def one(zz):
        if not cmath.isfinite(zz):
            raise DomainError("z must be finite")
        if zz == 0:
            res = ct.QuadratureResult(complex(g.f0), 0.0, 1)
        else:
            res = None
            for t in g.model.terms:
                r = term_fn(t, zz, share)
                res = r if res is None else res + r
            res = ct.QuadratureResult(res.value + g.f0, res.abs_error_estimate, res.nodes_used,
                                      res.truncation_radius)
        return res if full_output else res.value

    return _batch(one, z)


# entire ----------------------------------------------------------------

def eval_entire(g: GlobalFunction, z, tol: float = DEFAULT_TOL, variable: str = "p",
                full_output: bool = False):
    """``f0 + sum c_k z^k / k!`` for any complex ``z``."""
    _check_tol(tol)
    if variable not in ("p", "s"):
        raise DomainError("variable must be 'p' or 's'")
    share = tol / g.model.n_terms

    def term_value(t: Term, zz: complex) -> ct.QuadratureResult:
        a, dens = t.a, t.density
        if variable == "p":
            def f(p):
                p = np.asarray(p, dtype=complex)
                return np.expm1(zz * np.exp(-p) / a) * dens(p)

            return ct.integrate_custom(f, dens.contour(), share)
        if dens.kind == "c1_spiral":
            raise NotImplementedError("the s-variable route covers ray and Hankel densities")

        def f(s):
            s = np.asarray(s, dtype=complex)
            one = 1.0 + s
            return np.expm1(zz / (a * one)) * dens(np.log1p(s)) / one

        segs = ([ct.ray(0.0, 1.0, singular_start=dens.singular_origin)] if dens.kind == "ray"
                else ct.HankelContour(dens.epsilon).segments())
        return ct.integrate_custom(f, segs, share)

    def one(zz):
        if not cmath.isfinite(zz):
            raise DomainError("z must be finite")
        if zz == 0:
            res = ct.QuadratureResult(complex(g.f0), 0.0, 1)
        else:
            res = None
            for t in g.model.terms:
                r = term_value(t, zz)
                res = r if res is None else res + r
            res = ct.QuadratureResult(res.value + g.f0, res.abs_error_estimate, res.nodes_used)
        return res if full_output else res.value

    return _batch(one, z)


def eval_f3(z, tol: float = DEFAULT_TOL):
    """``f3(z) = sum_{k>=1} z^k / k^{k+1}`` through the Stirling density."""
    return eval_entire(GlobalFunction(density_stirling_f3(), 0.0, "entire"), z, tol)


def eval_f4(z, tol: float = DEFAULT_TOL):
    """Continuation of ``sum_{k>=1} e^{sqrt k} z^k`` to the plane cut along [1, inf)."""
    return eval_finite_radius(GlobalFunction(density_exp_sqrt(-1.0)), z, tol)


# Borel -------------------------------------------------------------------

def _psi(w):
    return w * scaled_e1(w) - 1.0


def borel_sum(g: GlobalFunction, x: float, tol: float = DEFAULT_TOL, form: str = "ei"):
    """Borel sum of ``f0 / x + sum_{k>=1} c_k k! x^{-k-1}``.

    ``form="ei"`` uses the exponential-integral kernel; ``form="laplace"``
    integrates ``e^{-qx} (f(q) - f0)`` over ``q > 0`` with the
    finite-radius reconstruction of the Borel transform ``f``.
    Only models with no ``a_j`` on the positive axis are accepted.
    """
    _check_tol(tol)
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError("x must be a positive real number")
    if form not in ("ei", "laplace"):
        raise DomainError("form must be 'ei' or 'laplace'")
    for t in g.model.terms:
        margin = abs(cmath.phase(t.a))
        if margin < 1e-12:
            raise NotImplementedError(
                "a_j on the positive axis needs a lateral or median Borel prescription")
    share = tol / g.model.n_terms
    total = complex(g.f0) / x
    if form == "laplace":
        fg = GlobalFunction(g.model, 0.0, "finite_radius")
        inner = min(1e-12, tol * 1e-2)

        def lap(q):
            q = np.real(np.asarray(q))
            vals = np.array([eval_finite_radius(fg, complex(v), inner) for v in q.ravel()])
            return np.exp(-x * q) * vals.reshape(q.shape)

        return total + ct.integrate_segment(lap, ct.ray(0.0, 1.0, scale=max(1.0, 4.0 / x)),
                                            tol).value
    for t in g.model.terms:
        a, dens = t.a, t.density
        if dens.kind == "c1_spiral":
            raise NotImplementedError("the spiral contour meets the positive Borel axis; "
                                      "use form='laplace'")
        if dens.kind == "hankel" and abs(cmath.phase(t.a)) <= 1.5 * dens.epsilon:
            raise NotImplementedError("a_j too close to the positive axis for the Hankel contour")

        def f(p, a=a, dens=dens):
            p = np.asarray(p, dtype=complex)
            return dens(p) * _psi(-a * np.exp(p) * x) / x

        total += ct.integrate_custom(f, dens.contour(), share).value
    return total


# inverse direction -------------------------------------------------------

def _ray_separation(dirs: Sequence[complex]) -> float:
    if len(dirs) == 1:
        return 2 * math.pi
    args = sorted(cmath.phase(a) % (2 * math.pi) for a in dirs)
    gaps = [b - a for a, b in zip(args, args[1:])] + [2 * math.pi - args[-1] + args[0]]
    return min(gaps)


def _decay_screen(spec: FunctionSpec):
    r = spec.decay_check_radius
    sep = _ray_separation(spec.ray_directions)
    for a in spec.ray_directions:
        z = r * cmath.exp(1j * (cmath.phase(a) + 0.5 * sep))
        val = complex(spec.values(np.array([z]))[0])
        if not cmath.isfinite(val) or abs(val / z) >= 0.1:
            raise DecayViolation(f"|f(z)/z| = {abs(val / z):.3g} at |z| = {r}; f is not o(z)")


def coefficients_from_function(spec: FunctionSpec, k: int, tol: float = 1e-10,
                               epsilon: Optional[float] = None) -> complex:
    """``c_k = (1/2 pi i) sum_j a_j^-k oint e^{-ks} f(a_j e^s) ds``."""
    _check_tol(tol)
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    k = int(k)
    _decay_screen(spec)
    sep = _ray_separation(spec.ray_directions)
    eps = min(0.25, 0.4 * sep) if epsilon is None else float(epsilon)
    share = tol / len(spec.ray_directions)
    total = 0j
    for a in spec.ray_directions:
        def g(s, a=a):
            s = np.asarray(s, dtype=complex)
            with np.errstate(over="raise"):
                try:
                    z = a * np.exp(s)
                except FloatingPointError as exc:
                    raise EvaluationFailure("a e^s overflowed") from exc
            return np.exp(-k * s) * spec.values(z)

        scale = a ** (-k)
        try:
            # overflow in f is reported as non-finite values and turned into DecayViolation
            with np.errstate(over="ignore", invalid="ignore"):
                res = ct.oint(g, eps, share * 2 * math.pi / max(abs(scale), 1.0))
        except (NonConvergence, EvaluationFailure) as exc:
            raise DecayViolation(f"e^(-ks) f(a e^s) does not decay along the ray {a}: {exc}") from exc
        total += scale * res.value
    return total / TWO_PI_I


# closed-form corpus -----------------------------------------------------

_BERNOULLI_H = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
                -3617.0 / 510, 43867.0 / 798)


def _lngamma_density(p):
    """``(1 - p/2 - (p/2 + 1) e^-p) / (p^2 (e^-p - 1))``; Bernoulli series near 0."""
    p = np.asarray(p, dtype=complex)
    out = np.empty_like(p)
    small = np.abs(p) < 0.2
    if small.any():
        ps = p[small]
        acc = np.zeros_like(ps)
        power = np.ones_like(ps)
        fact = 2.0
        for n, b in enumerate(_BERNOULLI_H, start=1):
            acc += b / fact * power
            power = power * ps * ps
            fact *= (2 * n + 1) * (2 * n + 2)
        out[small] = acc
    if (~small).any():
        pl = p[~small]
        em = np.exp(-pl)
        out[~small] = (1.0 - 0.5 * pl - (0.5 * pl + 1.0) * em) / (pl * pl * (em - 1.0))
    return out


def lngamma_via_sum(n: float, tol: float = 1e-13) -> float:
    """``ln Gamma(n) = n(ln n - 1) - ln(n)/2 + ln(2 pi)/2 + int_0^inf h(p) e^{-np} dp``."""
    _check_tol(tol)
    n = float(n)
    if not n > 0 or not math.isfinite(n):
        raise DomainError("n must be a positive real number")

    def g(p):
        p = np.asarray(p, dtype=complex)
        return _lngamma_density(p) * np.exp(-n * p)

    tail = ct.integrate_segment(g, ct.ray(0.0, 1.0, scale=4.0 / n), tol).value.real
    return math.fsum([n * (math.log(n) - 1.0), -0.5 * math.log(n), 0.5 * math.log(2 * math.pi), tail])


def laplace_of_entire(model: CoefficientModel, x: float, tol: float = DEFAULT_TOL) -> complex:
    """``int_0^inf e^{-xz} f(z) dz`` for ``f = sum c_k z^k / k!``.

    Term by term this is ``sum c_k x^{-k-1} = f_fin(1/x) / x``, where
    ``f_fin`` is the finite-radius function of the same model.
    """
    _check_tol(tol)
    x = float(x)
    abscissa = max(1.0 / abs(t.a) for t in model.terms)
    if not x > abscissa:
        raise DomainError(f"the Laplace integral converges only for x > {abscissa:.6g}")
    return eval_finite_radius(GlobalFunction(model), 1.0 / x, tol * x) / x

"""Coefficient models ``c_k = sum_j a_j^-k * int_C e^{-kp} F_j(p) dp``.

A model is a list of terms ``(a_j, F_j)``.  Each density knows the path
it is integrated over:

* ``"ray"``: the plain half line [0, inf).  Used when ``F`` is analytic
  near (0, inf) and integrable at 0; this is the collapsed form of the
  Hankel integral of ``-F(p) ln p / (2 pi i)``.
* ``"hankel"``: the contour around [0, inf) at offset ``epsilon``.
* ``"c1_spiral"``: the spiral ``theta exp(2 pi i theta)`` from 0 to 1,
  then [1, inf).

Densities also carry the closed form of their moments ``int e^{-kp} F``
so that every builtin has a machine-checkable oracle.
"""
from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import contour as ct
from .errors import DenominatorZero, DomainError
from .specfun import stirling_density

KINDS = ("ray", "hankel", "c1_spiral")
BUILTINS = ("hurwitz", "logmix", "stirling_f3", "exp_sqrt")


@dataclass(frozen=True, eq=False)
class Density:
    """A density ``F(p)`` together with its contour metadata.

    ``eval`` maps an array of complex ``p`` to an array.  ``jump`` gives
    the cut discontinuity that shows up in the reconstructed function at
    ``p > 0`` (``F`` itself for ray and spiral kinds).  ``eval_cut`` is
    the continuation of ``F`` with the ``(-2 pi, 0]`` logarithm, needed by
    spiral densities when a kernel pole enters the region the spiral
    winds around.  ``growth`` is the exponential rate of ``F`` along the
    positive axis: moments exist for ``k > growth``.
    """

    eval: Callable
    kind: str
    name: str = "custom"
    params: dict = field(default_factory=dict)
    delta: float = 0.5
    algebraic_bound_exponent: float = 0.0
    origin_exponent: float = 0.0
    growth: float = 0.0
    singular_origin: bool = False
    moment: Optional[Callable[[int], complex]] = None
    jump: Optional[Callable] = None
    eval_cut: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown contour kind {self.kind!r}")
        if not self.delta > 0:
            raise DomainError("delta must be positive")

    def __call__(self, p):
        return self.eval(p)

    @property
    def epsilon(self) -> float:
        return 0.5 * self.delta

    def contour(self, epsilon: Optional[float] = None) -> list[ct.PathSegment]:
        if self.kind == "ray":
            return [ct.ray(0.0, 1.0, singular_start=self.singular_origin)]
        if self.kind == "hankel":
            return ct.HankelContour(self.epsilon if epsilon is None else epsilon).segments()
        return ct.c1_contour()

    def discontinuity(self, p):
        """``F(p + i0) - F(p - i0)`` style jump at real ``p > 0``."""
        p = np.asarray(p, dtype=float)
        if self.jump is not None:
            return np.asarray(self.jump(p), dtype=complex)
        if self.kind == "hankel":
            return (np.asarray(self.eval(p + 0j + 1e-300j), dtype=complex)
                    - np.asarray(self.eval(p - 1e-300j), dtype=complex))
        return np.asarray(self.eval(p + 0j), dtype=complex)

    def hankel_form(self, p):
        """The density as it would appear under a Hankel integral."""
        if self.kind == "hankel":
            return np.asarray(self.eval(p), dtype=complex)
        if self.kind == "ray":
            return -np.asarray(self.eval(p), dtype=complex) * ct.cut_log(p) / (2j * math.pi)
        raise NotImplementedError("no Hankel form for spiral densities")

    def to_dict(self) -> dict:
        if self.name not in BUILTINS:
            raise DomainError("only builtin densities serialize to JSON")
        return {"builtin": self.name, "params": dict(self.params)}


@dataclass(frozen=True)
class Term:
    a: complex
    density: Density

    def __post_init__(self):
        if self.a == 0 or not cmath.isfinite(self.a):
            raise DomainError("a_j must be a finite nonzero complex number")


@dataclass(frozen=True)
class CoefficientModel:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise DomainError("a model needs at least one term")
        args = [cmath.phase(t.a) for t in terms]
        for i in range(len(args)):
            for j in range(i):
                gap = abs((args[i] - args[j] + math.pi) % (2 * math.pi) - math.pi)
                if gap < 1e-12:
                    raise DomainError("the a_j must have pairwise distinct arguments")

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def scaled(self, factor: complex) -> "CoefficientModel":
        """Model for ``z -> z / factor``: each ``a_j`` becomes ``factor * a_j``."""
        return CoefficientModel(tuple(Term(factor * t.a, t.density) for t in self.terms))

    def closed_form(self, k: int) -> complex:
        """Registered oracle for ``c_k``; None when some density has none."""
        total = 0j
        for t in self.terms:
            if t.density.moment is None:
                return None
            total += t.a ** (-k) * t.density.moment(k)
        return total

    def to_dict(self) -> dict:
        return {"terms": [{"a": [float(t.a.real), float(t.a.imag)],
                           "density": t.density.to_dict(),
                           "contour": t.density.kind} for t in self.terms]}

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientModel":
        if not isinstance(data, dict) or not isinstance(data.get("terms"), list) or not data["terms"]:
            raise DomainError("model JSON needs a nonempty 'terms' list")
        terms = []
        for i, entry in enumerate(data["terms"]):
            if not isinstance(entry, dict):
                raise DomainError(f"term {i} is not an object")
            a = entry.get("a")
            if (not isinstance(a, list) or len(a) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in a)):
                raise DomainError(f"term {i}: 'a' must be [re, im]")
            dens = entry.get("density")
            if not isinstance(dens, dict) or "builtin" not in dens:
                raise DomainError(f"term {i}: 'density' must name a builtin")
            params = dens.get("params", {})
            if not isinstance(params, dict):
                raise DomainError(f"term {i}: 'params' must be an object")
            density = builtin_density(dens["builtin"], **params)
            kind = entry.get("contour", density.kind)
            if kind != density.kind:
                raise DomainError(f"term {i}: density {dens['builtin']} uses contour "
                                  f"{density.kind!r}, not {kind!r}")
            terms.append(Term(complex(a[0], a[1]), density))
        return cls(tuple(terms))


# hurwitz ---------------------------------------------------------------

def _hurwitz_density(a: float, b: float) -> Density:
    a = float(a)
    b = float(b)
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("hurwitz needs a > 0 and b > 0")
    params = {"a": a, "b": b}
    inv_gamma = 1.0 / math.gamma(b)

    def moment(k):
        return (k + a) ** (-b)

    def jump(p):
        return inv_gamma * np.asarray(p, dtype=float) ** (b - 1.0) * np.exp(-a * np.asarray(p))

    if b >= 1.0:
        def f(p):
            p = np.asarray(p, dtype=complex)
            return inv_gamma * p ** (b - 1.0) * np.exp(-a * p)

        return Density(f, "ray", "hurwitz", params, origin_exponent=b - 1.0,
                       growth=-a, singular_origin=not float(b).is_integer(),
                       moment=moment, jump=jump)

    norm = inv_gamma / (cmath.exp(-2j * math.pi * b) - 1.0)

    def f(p):
        p = np.asarray(p, dtype=complex)
        return norm * ct.cut_power(p, b - 1.0) * np.exp(-a * p)

    return Density(f, "hankel", "hurwitz", params, origin_exponent=b - 1.0,
                   growth=-a, moment=moment, jump=jump)


def density_hurwitz(a: float, b: float) -> CoefficientModel:
    """``c_k = (k + a)^-b``."""
    return CoefficientModel((Term(1.0 + 0j, _hurwitz_density(a, b)),))


# logmix ----------------------------------------------------------------

def _logmix_roots(b: float):
    """Zeros of ``s^b + ln s`` off the cut (-inf, 0], principal branches.

    Newton from a polar grid of seeds; the count is confirmed by the
    argument principle on an annular keyhole that contains every zero.
    """
    def d(s):
        return s ** b + np.log(s)

    def dd(s):
        return b * s ** (b - 1.0) + 1.0 / s

    # zeros satisfy |s| >= 1/e and |s|^b <= ln|s| + pi
    r_in = 0.3
    r_out = 2.0
    while r_out ** b <= math.log(r_out) + math.pi + 1.0:
        r_out *= 2.0
    radii = np.geomspace(r_in, r_out, 40)
    angles = np.linspace(-math.pi, math.pi, 41)[1:-1]
    s = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()
    with np.errstate(all="ignore"):
        for _ in range(100):
            step = d(s) / dd(s)
            s = s - step
            s = np.where(np.abs(np.angle(s)) >= math.pi, np.nan, s)
    roots: list[complex] = []
    with np.errstate(all="ignore"):
        good = np.isfinite(s) & (np.abs(d(s)) < 1e-12 * np.maximum(1.0, np.abs(s) ** b))
    for r in s[good]:
        if r_in / 2 < abs(r) < 2 * r_out and not any(abs(r - q) < 1e-8 * max(1.0, abs(q)) for q in roots):
            roots.append(complex(r))
    # polish
    roots = [complex(_newton_polish(r, b)) for r in roots]
    roots.sort(key=lambda r: (round(r.real, 12), r.imag))

    # argument principle around the keyhole r_in < |s| < r_out, |arg s| < pi
    n = 20000
    th = np.linspace(-math.pi, math.pi, n)
    xs = np.geomspace(r_in, r_out, n)
    edge_up = xs[::-1] ** b * cmath.exp(1j * math.pi * b) + np.log(xs[::-1]) + 1j * math.pi
    edge_lo = xs ** b * cmath.exp(-1j * math.pi * b) + np.log(xs) - 1j * math.pi
    path = np.concatenate([
        d(r_out * np.exp(1j * th)),
        edge_up,
        d(r_in * np.exp(1j * th[::-1])),
        edge_lo,
    ])
    cut_min = min(np.abs(edge_up).min(), np.abs(edge_lo).min())
    if cut_min < 1e-6:
        raise DenominatorZero(f"s^b + ln s nearly vanishes on the cut for b = {b}")
    winding = np.sum(np.diff(np.unwrap(np.angle(path)))) / (2 * math.pi)
    # closing jump from the end of the lower edge back to the start of the outer circle
    count = int(round(winding + (np.angle(path[0]) - np.angle(path[-1])) / (2 * math.pi)))
    if count != len(roots):
        raise DenominatorZero(f"root search found {len(roots)} zeros, argument principle {count}")
    return roots, cut_min


def _newton_polish(s, b):
    for _ in range(50):
        step = (s ** b + cmath.log(s)) / (b * s ** (b - 1.0) + 1.0 / s)
        s -= step
        if abs(step) < 1e-16 * abs(s):
            break
    return s


class LogmixKernel:
    """Inverse Laplace transform ``G`` of ``1 / (x^b + ln x)``.

    ``G = G_cut + sum over zeros s_r of e^{s_r p} / (b s_r^{b-1} + 1/s_r)``
    where ``G_cut(p) = int_0^inf e^{-xp} rho(x) dx`` collects the cut on
    the negative axis, ``rho = -Im[1/(x^b e^{i pi b} + ln x + i pi)] / pi``.
    ``G_cut`` is computed by the trapezoid rule in ``u = ln x`` (exponentially
    convergent here) with a step-halving check; values are memoized.
    Valid for ``Re p > 0``.
    """

    def __init__(self, b: float, step: float = 0.02):
        self.b = float(b)
        self.roots, self.cut_min = _logmix_roots(self.b)
        self.residues = [1.0 / (self.b * r ** (self.b - 1.0) + 1.0 / r) for r in self.roots]
        self.growth = max([r.real for r in self.roots], default=0.0)
        self.step = step
        self._phase = cmath.exp(1j * math.pi * self.b)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def rho(self, x):
        x = np.asarray(x, dtype=float)
        den = x ** self.b * self._phase + np.log(x) + 1j * math.pi
        return -(1.0 / den).imag / math.pi

    def _cut_part(self, p, h):
        re = p.real
        u_hi = np.log(45.0 / re.min())
        u_lo = -45.0
        u = np.arange(u_lo, u_hi + h, h)
        x = np.exp(u)
        w = self.rho(x) * x * h
        return np.exp(-np.outer(p, x)) @ w

    def cut_part(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        if np.any(p.real <= 0):
            raise DomainError("the logmix kernel is only available for Re p > 0")
        out = np.empty_like(p)
        # group by scale so each trapezoid range stays short
        order = np.argsort(p.real)
        for chunk in np.array_split(order, max(1, len(order) // 64)):
            if chunk.size == 0:
                continue
            v1 = self._cut_part(p[chunk], self.step)
            v2 = self._cut_part(p[chunk], 2 * self.step)
            if np.max(np.abs(v1 - v2)) > 1e-9 * max(1.0, np.max(np.abs(v1))):
                v1 = self._cut_part(p[chunk], self.step / 2)
            out[chunk] = v1
        return out

    def __call__(self, p):
        arr = np.asarray(p, dtype=complex)
        flat = arr.ravel()
        out = np.empty_like(flat)
        missing = []
        with self._lock:
            for i, v in enumerate(flat):
                hit = self._cache.get(v)
                if hit is None:
                    missing.append(i)
                else:
                    out[i] = hit
        if missing:
            idx = np.array(missing)
            pv = flat[idx]
            tiny = np.abs(pv) < 1e-10
            vals = np.empty_like(pv)
            if tiny.any():
                vals[tiny] = self._origin_series(pv[tiny])
            if (~tiny).any():
                q = pv[~tiny]
                vals[~tiny] = self.cut_part(q) + sum(
                    c * np.exp(r * q) for r, c in zip(self.roots, self.residues))
            out[idx] = vals
            with self._lock:
                for v, g in zip(pv, vals):
                    self._cache[v] = g
        return out.reshape(arr.shape)

    def _origin_series(self, p):
        # 1/(x^b + ln x) = x^-b - x^-2b ln x + ..., inverted term by term
        b = self.b
        psi = _digamma(2 * b)
        return (p ** (b - 1.0) / math.gamma(b)
                - p ** (2 * b - 1.0) * (psi - np.log(p)) / math.gamma(2 * b))


def _digamma(x: float) -> float:
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv = 1.0 / (x * x)
    series = inv * (1 / 12 - inv * (1 / 120 - inv * (1 / 252 - inv * (1 / 240 - inv / 132))))
    return shift + math.log(x) - 0.5 / x - series


_LOGMIX_CACHE: dict = {}
_LOGMIX_LOCK = threading.Lock()


def logmix_kernel(b: float) -> LogmixKernel:
    with _LOGMIX_LOCK:
        kern = _LOGMIX_CACHE.get(float(b))
        if kern is None:
            kern = LogmixKernel(b)
            _LOGMIX_CACHE[float(b)] = kern
        return kern


def _logmix_density(b: float) -> Density:
    b = float(b)
    if not b > 0 or not math.isfinite(b):
        raise DomainError("logmix needs b > 0")
    kern = logmix_kernel(b)

    def moment(k):
        return 1.0 / (k ** b + math.log(k))

    return Density(kern, "ray", "logmix", {"b": b}, origin_exponent=b - 1.0,
                   growth=kern.growth, singular_origin=True, moment=moment)


def density_logmix(b: float) -> CoefficientModel:
    """``c_k = 1 / (k^b + ln k)``."""
    return CoefficientModel((Term(1.0 + 0j, _logmix_density(b)),))


# stirling --------------------------------------------------------------

def _stirling_density() -> Density:
    def moment(k):
        return math.exp(math.lgamma(k + 1) - (k + 1) * math.log(k) + k)

    return Density(stirling_density, "ray", "stirling_f3", {}, origin_exponent=-0.5,
                   growth=0.0, singular_origin=True, moment=moment)


def density_stirling_f3() -> CoefficientModel:
    """``a = e`` and ``F = G``, so ``c_k = k! / k^{k+1}``."""
    return CoefficientModel((Term(complex(math.e), _stirling_density()),))


# exp sqrt --------------------------------------------------------------

_INV_2SQRTPI = 0.5 / math.sqrt(math.pi)


def _vanish_at_origin(p, fn):
    """``fn(p)`` with the limit value 0 at ``p = 0`` (approached inside the
    sector where ``Re(1/p) > 0``)."""
    zero = p == 0
    if not zero.any():
        return fn(p)
    out = np.zeros_like(p)
    out[~zero] = fn(p[~zero])
    return out


def _exp_sqrt_density(gamma) -> Density:
    g = complex(gamma)
    if g.imag == 0 and g.real > 0:
        gam = g.real
        coef = gam * _INV_2SQRTPI
        quarter = 0.25 * gam * gam

        def f(p):
            p = np.asarray(p, dtype=complex)
            return _vanish_at_origin(p, lambda q: coef * np.exp(-1.5 * np.log(q) - quarter / q))

        def moment(k):
            return math.exp(-gam * math.sqrt(k))

        return Density(f, "ray", "exp_sqrt", {"gamma": gam}, origin_exponent=-1.5,
                       singular_origin=True, moment=moment)
    if g == -1:
        def f(p):
            p = np.asarray(p, dtype=complex)
            return _vanish_at_origin(p, lambda q: -_INV_2SQRTPI * np.exp(-1.5 * ct.c1_log(q) - 0.25 / q))

        def f_cut(p):
            p = np.asarray(p, dtype=complex)
            return _vanish_at_origin(p, lambda q: -_INV_2SQRTPI * np.exp(-1.5 * ct.cut_log(q) - 0.25 / q))

        def jump(p):
            p = np.asarray(p, dtype=float)
            return -_INV_2SQRTPI * np.exp(-1.5 * np.log(p) - 0.25 / p)

        def moment(k):
            return math.exp(math.sqrt(k))

        return Density(f, "c1_spiral", "exp_sqrt", {"gamma": -1.0}, origin_exponent=-1.5,
                       singular_origin=True, moment=moment, jump=jump, eval_cut=f_cut)
    raise DomainError("exp_sqrt is implemented for real gamma > 0 and gamma = -1 only")


def density_exp_sqrt(gamma=1.0) -> CoefficientModel:
    """``c_k = exp(-gamma sqrt(k))``; ``gamma = -1`` gives ``exp(+sqrt(k))``."""
    return CoefficientModel((Term(1.0 + 0j, _exp_sqrt_density(gamma)),))


# registry --------------------------------------------------------------

def builtin_density(name: str, **params) -> Density:
    allowed = {"hurwitz": {"a", "b"}, "logmix": {"b"}, "stirling_f3": set(), "exp_sqrt": {"gamma"}}
    if name not in allowed:
        raise DomainError(f"unknown builtin density {name!r}; choose from {', '.join(BUILTINS)}")
    extra = set(params) - allowed[name]
    if extra:
        raise DomainError(f"unexpected parameters for {name}: {sorted(extra)}")
    for key, value in params.items():
        if isinstance(value, bool) or not isinstance(value, (int, float, complex)):
            raise DomainError(f"parameter {key} of {name} must be a number")
    if name == "hurwitz":
        return _hurwitz_density(params.get("a", 1.0), params.get("b", 1.0))
    if name == "logmix":
        return _logmix_density(params.get("b", 2.0))
    if name == "stirling_f3":
        return _stirling_density()
    return _exp_sqrt_density(params.get("gamma", 1.0))


def builtin_model(name: str, **params) -> CoefficientModel:
    """The corpus model for a builtin name, with its default ``a_1``."""
    density = builtin_density(name, **params)
    a = complex(math.e) if name == "stirling_f3" else 1.0 + 0j
    return CoefficientModel((Term(a, density),))


# coefficients ----------------------------------------------------------

def coefficients_from_model(m: CoefficientModel, k: int, tol: float = 1e-12) -> complex:
    """``c_k = sum_j a_j^-k int_C e^{-kp} F_j(p) dp`` by quadrature."""
    return coefficient_quadrature(m, k, tol).value


def coefficient_quadrature(m: CoefficientModel, k: int, tol: float = 1e-12) -> ct.QuadratureResult:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    k = int(k)
    total = None
    share = tol / m.n_terms
    for t in m.terms:
        dens = t.density
        if k <= dens.growth:
            raise DomainError(f"moment k = {k} diverges for a density growing like e^{dens.growth:.3g} p")

        def g(p, dens=dens):
            p = np.asarray(p, dtype=complex)
            return np.exp(-k * p) * dens(p)

        scale = t.a ** (-k)
        r = ct.integrate_custom(g, dens.contour(), share / max(abs(scale), 1e-300)
                                if abs(scale) > 1 else share).scaled(scale)
        total = r if total is None else total + r
    return total

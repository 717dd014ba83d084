"""Special functions used by the reconstruction formulas.

* the two real branches ``s1 <= 1 <= s2`` of ``s - ln s = t``,
* the Stirling density ``G(p) = s2'(1+p) - s1'(1+p)``,
* the exponential integral ``Ei`` (and a scaled complex ``E1``),
* a log-gamma used as an independent oracle.

The branches are computed in the shifted variable ``w = s - 1`` where
``s - ln s - 1 = w - log1p(w)``; near the double root at ``w = 0`` this
keeps full relative accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchConfluence, DomainError

EULER_GAMMA = 0.57721566490153286060651209008240243
# positive zero of Ei
_EI_ROOT = 0.37250741078136663446199186658011914


@dataclass(frozen=True)
class BranchPair:
    s1: float
    s2: float
    t: float


# coefficients of w = sum c_n sigma^n inverting w - log1p(w) = sigma^2 / 2
_INVERSION = (1.0, 1.0 / 3.0, 1.0 / 36.0, -1.0 / 270.0, 1.0 / 4320.0, 1.0 / 17010.0,
              -139.0 / 5443200.0)


def _w_minus_log1p(w):
    """``w - log1p(w)`` without cancellation for small ``w``."""
    w = np.asarray(w, dtype=complex)
    out = w - np.log1p(w)
    small = np.abs(w) < 0.1
    if small.any():
        ws = w[small]
        acc = np.zeros_like(ws)
        term = ws * ws
        for n in range(2, 30):
            acc += (term / n) * (1 if n % 2 == 0 else -1)
            term = term * ws
        out[small] = acc
    return out


def _series_seed(sigma):
    acc = np.zeros_like(sigma)
    power = np.ones_like(sigma)
    for c in _INVERSION:
        power = power * sigma
        acc = acc + c * power
    return acc


def _newton_w(w, p, iterations=60):
    """Newton on ``w - log1p(w) = p``; derivative is ``w / (1 + w)``."""
    for _ in range(iterations):
        step = (_w_minus_log1p(w) - p) * (1.0 + w) / w
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * np.abs(w)):
            break
    return w


def _upper_w(p):
    """``s2 - 1`` for ``s2 - ln s2 = 1 + p``."""
    p = np.asarray(p, dtype=complex)
    small = np.abs(p) < 1.0
    seed = np.where(small, _series_seed(np.sqrt(2.0 * p)),
                    (1.0 + p) + np.log(1.0 + p) - 1.0)
    return _newton_w(seed, p)


def _lower_w(p):
    """``(s1 - 1, s1)`` for the branch ``s1 <= 1``.

    For larger ``p`` the branch is solved as ``s1 = exp(-v)`` with
    ``v + exp(-v) = 1 + p``, which stays accurate when ``s1`` underflows
    towards 0.
    """
    p = np.asarray(p, dtype=complex)
    small = np.abs(p) < 1.0
    out = np.empty_like(p)
    s1 = np.empty_like(p)
    if small.any():
        ps = p[small]
        out[small] = _newton_w(_series_seed(-np.sqrt(2.0 * ps)), ps)
        s1[small] = 1.0 + out[small]
    if (~small).any():
        t = 1.0 + p[~small]
        v = t.copy()
        for _ in range(60):
            e = np.exp(-v)
            step = (v + e - t) / (1.0 - e)
            v = v - step
            if np.all(np.abs(step) <= 4e-16 * np.abs(v)):
                break
        out[~small] = np.expm1(-v)
        s1[~small] = np.exp(-v)
    return out, s1


def lambert_branches(t: float) -> BranchPair:
    """Both real solutions of ``s - ln s = t`` for ``t >= 1``."""
    t = float(t)
    if not t >= 1.0:
        raise DomainError("s - ln s = t has real solutions only for t >= 1")
    p = np.array([t - 1.0])
    if t == 1.0:
        return BranchPair(1.0, 1.0, t)
    w2 = float(_upper_w(p)[0].real)
    s1 = float(_lower_w(p)[1][0].real)
    return BranchPair(s1, 1.0 + w2, t)


def stirling_density(p):
    """``G(p) = s2'(1+p) - s1'(1+p)`` using ``s' = s / (s - 1)``.

    Accepts scalars or arrays, real or complex (continued off the positive
    axis along the principal square root near ``p = 0``).
    """
    arr = np.asarray(p, dtype=complex)
    if np.any(arr == 0):
        raise BranchConfluence("G has a square-root singularity at p = 0")
    flat = arr.ravel()
    # s/(s-1) = 1 + 1/w for each branch
    g = 1.0 / _upper_w(flat) - 1.0 / _lower_w(flat)[0]
    g = g.reshape(arr.shape)
    if np.isscalar(p) or np.ndim(p) == 0:
        g = g[()]
        return float(g.real) if np.isrealobj(p) and float(p) > 0 else complex(g)
    return g.real if np.isrealobj(p) and np.all(arr.real > 0) else g


# exponential integrals ---------------------------------------------------

def _e1_series(x: float) -> float:
    total = 0.0
    term = 1.0
    for k in range(1, 200):
        term *= -x / k
        add = term / k
        total += add
        if abs(add) < 1e-17 * abs(total):
            break
    return -EULER_GAMMA - math.log(x) - total


def _e1_cf(x: float) -> float:
    # modified Lentz on the continued fraction of exp(x) E1(x)
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


def _ei_taylor_at_root(x: float) -> float:
    """Taylor series of Ei about its positive zero (Ei' = e^x / x)."""
    x0 = _EI_ROOT
    dx = x - x0
    # n-th derivative of e^x / x at x0: e^x0 * sum_j C(n,j) (-1)^j j! / x0^(j+1)
    total = 0.0
    power = 1.0
    fact = 1.0
    for n in range(0, 30):
        deriv = math.exp(x0) * sum(
            math.comb(n, j) * (-1) ** j * math.factorial(j) / x0 ** (j + 1) for j in range(n + 1))
        power *= dx
        fact *= n + 1
        add = deriv * power / fact
        total += add
        if abs(add) < 1e-18 * abs(total):
            break
    return total


def exp_integral_ei(x: float) -> float:
    """Exponential integral Ei(x) for real ``x != 0`` (principal value for x > 0)."""
    x = float(x)
    if x == 0.0:
        raise DomainError("Ei is singular at 0")
    if x < 0.0:
        y = -x
        return -(_e1_series(y) if y <= 1.0 else _e1_cf(y))
    if abs(x - _EI_ROOT) < 0.1:
        return _ei_taylor_at_root(x)
    if x <= 40.0:
        total = 0.0
        term = 1.0
        for k in range(1, 400):
            term *= x / k
            add = term / k
            total += add
            if add < 1e-17 * total:
                break
        return EULER_GAMMA + math.log(x) + total
    # asymptotic series, truncated at its smallest term
    total = 1.0
    term = 1.0
    for k in range(1, int(x)):
        new = term * k / x
        if new > term:
            break
        term = new
        total += term
        if term < 1e-17:
            break
    return math.exp(x) / x * total


def _e1_power(ws, terms):
    acc = np.zeros_like(ws)
    term = np.ones_like(ws)
    for k in range(1, terms):
        term = term * (-ws) / k
        acc += term / k
    return np.exp(ws) * (-EULER_GAMMA - np.log(ws) - acc)


def scaled_e1(w):
    """``exp(w) * E1(w)`` for complex ``w`` off the negative real axis.

    Power series for ``|w| < 1.5`` and, near the negative axis where its
    terms do not cancel, up to ``|w| = 40``; asymptotic series beyond that
    near the negative axis; continued fraction elsewhere.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    aw = np.abs(w)
    near_neg = (w.real < 0) & (np.abs(np.angle(-w)) < 0.5)
    small = aw < 1.5
    series = ~small & near_neg & (aw <= 40.0)
    asym = ~small & near_neg & (aw > 40.0)
    cf = ~(small | series | asym)
    if small.any():
        out[small] = _e1_power(w[small], 60)
    if series.any():
        out[series] = _e1_power(w[series], 200)
    if asym.any():
        x = w[asym]
        acc = np.ones_like(x)
        term = np.ones_like(x)
        for k in range(1, 40):
            term = term * (-k) / x
            acc += term
        out[asym] = acc / x
    if cf.any():
        x = w[cf]
        tiny = 1e-300
        b = x + 1.0
        c = np.full_like(x, 1.0 / tiny)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, 4000):
            a = -float(i * i)
            b = b + 2.0
            d = 1.0 / (a * d + b)
            c = b + a / c
            delta = c * d
            h = h * delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
        out[cf] = h
    return out


def ei_complex(z):
    """Continuation of the real Ei from the negative axis: ``-E1(-z)``.

    Analytic off [0, inf); equals the real Ei for z < 0.
    """
    z = np.asarray(z, dtype=complex)
    return -np.exp(z) * scaled_e1(-z)


# log-gamma ---------------------------------------------------------------

_BERNOULLI = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
              -3617.0 / 510)


def reference_lngamma(x: float) -> float:
    """ln Gamma(x) for x > 0 by upward shift and the Stirling series."""
    x = float(x)
    if not x > 0:
        raise DomainError("reference_lngamma needs x > 0")
    shift = 0
    logs = []
    while x + shift < 15.0:
        logs.append(math.log(x + shift))
        shift += 1
    y = x + shift
    series = 0.0
    for k, b in enumerate(_BERNOULLI, start=1):
        series += b / (2 * k * (2 * k - 1) * y ** (2 * k - 1))
    head = (y - 0.5) * math.log(y) - y + 0.5 * math.log(2 * math.pi)
    return math.fsum([head, series] + [-v for v in logs])

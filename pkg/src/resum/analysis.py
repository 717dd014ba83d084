"""Probes of the global structure of reconstructed functions.

* ``jump_check``: side limits across a cut against ``2 pi i`` times the
  density jump at ``ln t``.
* ``singularity_type``: ``f(a_j (1 + z)) - 2 pi i F_j(ln(1 + z))`` for small
  ``z``; it stays bounded when the density captures the singularity.
* ``decay_scan``: ``|f(z) / z|`` along rays, for the ``o(z)`` property.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, ExtrapolationFailure, NoSingularity
from .model import CoefficientModel
from .reconstruct import GlobalFunction, eval_entire, eval_finite_radius

TWO_PI_I = 2j * math.pi
BOUNDED_RATIO = 10.0


@dataclass(frozen=True)
class JumpReport:
    """Side limits at ``z_on_cut``.

    ``side_plus`` is the limit from the counterclockwise side of the ray
    (``a_j t (1 + i h)``, h -> 0+), ``side_minus`` from the clockwise side.
    ``residual = |side_plus - side_minus - predicted_jump|``.
    """

    z_on_cut: complex
    side_plus: complex
    side_minus: complex
    predicted_jump: complex
    residual: float
    offsets: tuple


@dataclass(frozen=True)
class SingularityProbe:
    j: int
    offsets: tuple
    remainder_values: tuple
    function_values: tuple
    boundedness_flag: bool

    @property
    def remainder_ratio(self) -> float:
        mags = np.abs(self.remainder_values)
        return float(mags.max() / mags.min()) if mags.min() > 0 else math.inf

    @property
    def function_ratio(self) -> float:
        mags = np.abs(self.function_values)
        return float(mags.max() / mags.min()) if mags.min() > 0 else math.inf


@dataclass(frozen=True)
class DecayScan:
    """Rows ``(R, theta, |f(R e^{i theta}) / (R e^{i theta})|)``."""

    rows: tuple
    decreasing: dict

    @property
    def all_decreasing(self) -> bool:
        return all(self.decreasing.values())


def _as_global(m: Union[CoefficientModel, GlobalFunction]) -> GlobalFunction:
    return m if isinstance(m, GlobalFunction) else GlobalFunction(m)


def _richardson(hs: Sequence[float], values: Sequence[complex]) -> tuple[complex, complex]:
    """Value at h = 0 of the quadratic through three points, and of the line
    through the two smallest; their gap measures stabilisation."""
    h1, h2, h3 = hs
    v1, v2, v3 = values
    quad = (v1 * h2 * h3 / ((h1 - h2) * (h1 - h3))
            + v2 * h1 * h3 / ((h2 - h1) * (h2 - h3))
            + v3 * h1 * h2 / ((h3 - h1) * (h3 - h2)))
    lin = (v3 * h2 - v2 * h3) / (h2 - h3)
    return quad, lin


def jump_check(m, j: int, t: float, h: float = 1e-2, tol: float = 1e-12) -> JumpReport:
    """Compare the jump of ``f`` across the ``j``-th cut at ``a_j t``.

    Side values are taken at ``a_j t (1 +/- i h')`` with
    ``h' in {h, h/10, h/100}`` and extrapolated to ``h' = 0``.
    """
    g = _as_global(m)
    if g.kind != "finite_radius":
        raise NoSingularity("only finite-radius functions have cuts")
    terms = g.model.terms
    if not 0 <= j < len(terms):
        raise DomainError(f"term index {j} out of range")
    t = float(t)
    if not t > 1.0 + h:
        raise DomainError("t must exceed 1 + h so the probe stays off the branch point")
    a = terms[j].a
    z0 = a * t
    hs = (h, h / 10.0, h / 100.0)
    sides = []
    for sign in (1.0, -1.0):
        vals = [complex(eval_finite_radius(g, z0 * (1.0 + sign * 1j * hh), tol)) for hh in hs]
        quad, lin = _richardson(hs, vals)
        if abs(quad - lin) > 1e-5 * max(1.0, abs(quad)):
            raise ExtrapolationFailure(f"side limit at {z0} did not stabilise: {quad} vs {lin}")
        sides.append(quad)
    plus, minus = sides
    predicted = TWO_PI_I * complex(terms[j].density.discontinuity(np.array([math.log(t)]))[0])
    residual = abs(plus - minus - predicted)
    return JumpReport(complex(z0), plus, minus, predicted, float(residual), hs)


def singularity_type(m, j: int = 0, radius_sequence: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4),
                     tol: float = 1e-12, angle: float = 0.75 * math.pi) -> SingularityProbe:
    """Remainder ``f(a_j (1 + z)) - 2 pi i F_j(ln(1 + z))`` at ``z = r e^{i angle}``.

    ``F_j`` is taken in its Hankel form; a ray density ``F`` corresponds to
    ``-F ln p / (2 pi i)``.  The verdict is bounded when the remainder
    magnitudes stay within a factor 10 of each other.
    """
    g = _as_global(m)
    if g.kind == "entire":
        raise NoSingularity("entire functions have no cut to probe")
    if g.kind != "finite_radius":
        raise DomainError("singularity probes apply to finite-radius functions")
    terms = g.model.terms
    if not 0 <= j < len(terms):
        raise DomainError(f"term index {j} out of range")
    dens = terms[j].density
    if dens.name == "logmix":
        raise NotImplementedError("the logmix kernel is only available for Re p > 0")
    offsets = tuple(complex(r * cmath.exp(1j * angle)) for r in radius_sequence)
    if any(o.imag == 0 and o.real >= 0 for o in offsets):
        raise DomainError("offsets must avoid [0, inf)")
    a = terms[j].a
    fvals = []
    rems = []
    for o in offsets:
        f = complex(eval_finite_radius(g, a * (1.0 + o), tol))
        p = np.array([np.log1p(o)])
        with np.errstate(over="ignore", invalid="ignore"):
            rems.append(f - TWO_PI_I * complex(dens.hankel_form(p)[0]))
        fvals.append(f)
    mags = np.abs(rems)
    bounded = bool(mags.min() > 0 and mags.max() / mags.min() <= BOUNDED_RATIO)
    return SingularityProbe(j, offsets, tuple(rems), tuple(fvals), bounded)


def decay_scan(g: GlobalFunction, radii: Sequence[float], directions: Sequence[float],
               tol: float = 1e-10) -> DecayScan:
    """Table of ``|f(z)/z|`` on rays ``arg z = theta`` at the given radii."""
    radii = [float(r) for r in radii]
    if not radii or any(not r > 0 for r in radii):
        raise DomainError("radii must be positive")
    if g.kind == "finite_radius":
        for theta in directions:
            for t in g.model.terms:
                gap = abs((theta - cmath.phase(t.a) + math.pi) % (2 * math.pi) - math.pi)
                if gap < 0.1:
                    raise DomainError(f"direction {theta} is within 0.1 rad of a cut")
    evaluate = eval_entire if g.kind == "entire" else eval_finite_radius
    rows = []
    decreasing = {}
    for theta in directions:
        mags = []
        for r in radii:
            z = r * cmath.exp(1j * theta)
            val = abs(complex(evaluate(g, z, tol)) / z)
            rows.append((r, float(theta), val))
            mags.append(val)
        decreasing[float(theta)] = all(b < a for a, b in zip(mags, mags[1:]))
    return DecayScan(tuple(rows), decreasing)

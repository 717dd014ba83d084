"""Independent reference values, computed with mpmath or elementary sums."""
import math

import mpmath as mp


def series(coeff, z, kmax=4000, f0=0.0):
    """Partial sums of sum_{k>=1} coeff(k) z^k, stopped when the terms are negligible."""
    total = complex(f0)
    for k in range(1, kmax + 1):
        term = coeff(k) * z ** k
        total += term
        if abs(term) < 1e-22 * max(1.0, abs(total)) and k > 10:
            return total
    raise RuntimeError("series did not converge")


def f3_series(z):
    """sum z^k / k^{k+1} in extended precision (the terms overshoot before they decay)."""
    mp.mp.dps = 40
    z = mp.mpc(z)
    total = mp.mpf(0)
    k = 1
    while True:
        term = z ** k / mp.mpf(k) ** (k + 1)
        total += term
        if k > 5 and abs(term) < mp.mpf(10) ** -30:
            return complex(total)
        k += 1


def f4_minus1(n_terms=400, dps=60):
    """Euler transform of sum_{k>=1} (-1)^k e^{sqrt k}: a generalised sum at z = -1.

    With a_j = e^{sqrt(j+1)} the sum is -sum_j (-1)^j a_j, and the Euler
    transform sum_n (-1)^n Delta^n a_0 / 2^{n+1} of the alternating part has
    geometrically decaying terms.
    """
    mp.mp.dps = dps
    a = [mp.e ** mp.sqrt(k + 1) for k in range(n_terms + 1)]
    total = mp.mpf(0)
    row = a
    for n in range(n_terms):
        total += (-1) ** n * row[0] / mp.mpf(2) ** (n + 1)
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    return float(-total)


def lerch(z, b, a):
    """sum_{k>=1} z^k / (k + a)^b continued by mpmath (principal branch)."""
    mp.mp.dps = 30
    return complex(mp.lerchphi(z, b, a) - mp.mpf(a) ** -b)


def classical_borel_alternating(x):
    mp.mp.dps = 30
    return float(mp.quad(lambda p: mp.e ** (-x * p) * mp.log1p(p) / p, [0, 1, mp.inf]))


def lngamma(x):
    mp.mp.dps = 30
    return float(mp.loggamma(x))


def stirling_moment(n):
    return math.exp(math.lgamma(n + 1) - (n + 1) * math.log(n) + n)

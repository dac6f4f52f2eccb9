"""Closed-form side of the rank limit.

For average degree ``d``, with ``phi(d, a) = exp(d*(a-1))`` the Poisson(d)
probability generating function:

* ``R(d, a) = 2 - phi(d, 1 - phi(d, a)) - (1 + d*(1-a)) * phi(d, a)`` is the
  rank functional; its minimum over ``[0, 1]`` is the limiting normalized
  rank of the sparse symmetric model.
* ``G(d, a) = a + phi(d, 1 - phi(d, a)) - 1`` vanishes exactly at the
  stationary points of ``R``:  ``R' = d^2 * phi(d, a) * G(d, a)``.
* ``Xi(d, a) = a + phi(d, a) - 1`` is strictly increasing with a unique
  zero ``alpha_zero``, always also a zero of ``G``.
* ``h(t, a) = a + 1 - phi(t, a)`` is the expected one-step rank increase;
  its integral over ``t in [0, d]`` along the largest zero of ``G`` equals
  ``d * R(d, alpha_star_hi(d))``.

For ``d <= e`` the function ``G(d, .)`` is strictly increasing with the
single zero ``alpha_zero``; for ``d > e`` it has exactly three zeroes
``alpha_star_lo < alpha_zero < alpha_star_hi``, bracketed here by the two
zeroes of ``G'`` (``G'`` is strictly decreasing then increasing with
interior minimum ``1 - d/e`` at ``1 - ln(d)/d``, and positive at both
endpoints).  This bracketing stays well conditioned arbitrarily close to
the triple-root degeneracy at ``d = e``; inside ``|d - e| <= 1e-6`` the
three zeroes are returned as three copies of the ``Xi`` zero.

The leaf-removal constants are the smallest root ``gamma_lo`` of
``x = d*exp(-d*exp(-x))`` and ``gamma_hi = d*exp(-gamma_lo)``; they are
computed independently of the alpha side (same derivative-bracketing
applied to that equation), and satisfy ``gamma_lo = d*(1 - alpha_star_hi)``
and ``gamma_hi = d*(1 - alpha_star_lo)``.

All computation is double precision; the acceptance tolerances (1e-6 to
1e-9) sit far above rounding noise for these well-scaled functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from scipy.integrate import quad
from scipy.optimize import brentq

E = math.e

# Within this distance of d = e the triple root is resolved via Xi.
DEGENERATE_WINDOW = 1e-6

_BRENT_XTOL = 1e-15
_QUAD_EPSABS = 1e-8


def phi(d: float, alpha: float) -> float:
    """Poisson(d) probability generating function, exp(d*(alpha-1))."""
    return math.exp(d * (alpha - 1.0))


def R(d: float, alpha: float) -> float:
    """Rank functional whose minimum over [0,1] is the limiting rank/n."""
    return 2.0 - phi(d, 1.0 - phi(d, alpha)) - (1.0 + d * (1.0 - alpha)) * phi(d, alpha)


def G(d: float, alpha: float) -> float:
    """Stationarity function of R: zero exactly where R'(alpha) = 0."""
    return alpha + phi(d, 1.0 - phi(d, alpha)) - 1.0


def Xi(d: float, alpha: float) -> float:
    """Strictly increasing companion; its unique zero is alpha_zero."""
    return alpha + phi(d, alpha) - 1.0


def h(t: float, alpha: float) -> float:
    """Expected one-step rank increase, alpha + 1 - phi(t, alpha)."""
    return alpha + 1.0 - phi(t, alpha)


def G_prime(d: float, alpha: float) -> float:
    return 1.0 - d * d * phi(d, alpha) * phi(d, 1.0 - phi(d, alpha))


@dataclass(frozen=True)
class AnalyticPoint:
    """All limit quantities at one average degree ``d``."""

    d: float
    alpha_star_lo: float
    alpha_zero: float
    alpha_star_hi: float
    min_R: float
    gamma_lo: float
    gamma_hi: float


def _validate_d(d: float) -> float:
    d = float(d)
    if not math.isfinite(d) or d < 0.0:
        raise ValueError(f"average degree must be a finite nonnegative real, got {d!r}")
    return d


@lru_cache(maxsize=None)
def _alpha_zero(d: float) -> float:
    if d == 0.0:
        return 0.0
    return brentq(lambda a: Xi(d, a), 0.0, 1.0, xtol=_BRENT_XTOL)


@lru_cache(maxsize=None)
def _alpha_roots(d: float) -> tuple[float, float, float]:
    """(alpha_star_lo, alpha_zero, alpha_star_hi), ordered."""
    if d == 0.0:
        return (0.0, 0.0, 0.0)
    a0 = _alpha_zero(d)
    if d <= E + DEGENERATE_WINDOW:
        # G is strictly increasing up to d = e (and numerically degenerate
        # just beyond): single zero, shared with Xi.
        return (a0, a0, a0)
    # three distinct zeroes, bracketed by the two zeroes of G'
    a_mid = 1.0 - math.log(d) / d
    g1 = brentq(lambda a: G_prime(d, a), 0.0, a_mid, xtol=_BRENT_XTOL)
    g2 = brentq(lambda a: G_prime(d, a), a_mid, 1.0, xtol=_BRENT_XTOL)
    if not (G(d, 0.0) < 0.0 < G(d, g1) and G(d, g2) < 0.0 < G(d, 1.0)):
        raise RuntimeError(f"root bracketing failed at d={d}")  # pragma: no cover
    lo = brentq(lambda a: G(d, a), 0.0, g1, xtol=_BRENT_XTOL)
    hi = brentq(lambda a: G(d, a), g2, 1.0, xtol=_BRENT_XTOL)
    if not lo < a0 < hi:
        raise RuntimeError(f"zero ordering failed at d={d}")  # pragma: no cover
    return (lo, a0, hi)


def alpha_star_hi(d: float) -> float:
    """Largest zero of G(d, .) in [0, 1]."""
    return _alpha_roots(_validate_d(d))[2]


def alpha_star_lo(d: float) -> float:
    """Smallest zero of G(d, .) in [0, 1]."""
    return _alpha_roots(_validate_d(d))[0]


@lru_cache(maxsize=None)
def ks_fixed_point(d: float) -> tuple[float, float]:
    """Leaf-removal constants ``(gamma_lo, gamma_hi)``.

    ``gamma_lo`` is the smallest root of ``x = d*exp(-d*exp(-x))`` on
    ``[0, d]``, found by bracketing with the zeroes of the equation's own
    derivative; ``gamma_hi = d*exp(-gamma_lo)``.  ``d = 0`` returns
    ``(0, 0)`` by continuity.  Inside the degenerate window around
    ``d = e`` the root is triple and taken as ``d*(1 - alpha_zero)``.
    """
    d = _validate_d(d)
    if d == 0.0:
        return (0.0, 0.0)

    def mp(x: float) -> float:  # fixed-point map
        return d * math.exp(-d * math.exp(-x))

    def g(x: float) -> float:
        return x - mp(x)

    def g_prime(x: float) -> float:
        return 1.0 - mp(x) * d * math.exp(-x)

    if abs(d - E) <= DEGENERATE_WINDOW:
        gamma = d * (1.0 - _alpha_zero(d))
    elif d < E:
        # g' has minimum 1 - d/e > 0 at x = ln d: strictly increasing g
        gamma = brentq(g, 0.0, d, xtol=_BRENT_XTOL)
    else:
        x1 = brentq(g_prime, 0.0, math.log(d), xtol=_BRENT_XTOL)
        gamma = brentq(g, 0.0, x1, xtol=_BRENT_XTOL)
    return (gamma, d * math.exp(-gamma))


def solve_point(d: float) -> AnalyticPoint:
    """Zeroes of G, the rank-functional minimum, and leaf-removal constants."""
    d = _validate_d(d)
    lo, zero, hi = _alpha_roots(d)
    gamma_lo, gamma_hi = ks_fixed_point(d)
    return AnalyticPoint(
        d=d,
        alpha_star_lo=lo,
        alpha_zero=zero,
        alpha_star_hi=hi,
        min_R=R(d, hi) if d > 0.0 else 0.0,
        gamma_lo=gamma_lo,
        gamma_hi=gamma_hi,
    )


def min_R(d: float) -> float:
    """Minimum of R(d, .) over [0, 1], attained at the outer zeroes of G."""
    return solve_point(d).min_R


def integral_identity_residual(d: float) -> float:
    """|quadrature of h_t(alpha_star_hi(t)) over [0, d]  -  d*R(d, alpha_star_hi(d))|.

    Adaptive Gauss-Kronrod quadrature with absolute target 1e-8; the
    integration range is split at t = e, where the largest zero has a
    derivative kink.
    """
    d = _validate_d(d)
    if d == 0.0:
        return 0.0

    def integrand(t: float) -> float:
        return h(t, alpha_star_hi(t)) if t > 0.0 else 0.0

    if d > E:
        total = (
            quad(integrand, 0.0, E, epsabs=_QUAD_EPSABS, limit=200)[0]
            + quad(integrand, E, d, epsabs=_QUAD_EPSABS, limit=200)[0]
        )
    else:
        total = quad(integrand, 0.0, d, epsabs=_QUAD_EPSABS, limit=200)[0]
    return abs(total - d * R(d, alpha_star_hi(d)))


def type_functions(zeta, g) -> tuple[float, float, float]:
    """The three type maps evaluated at proportions ``zeta`` and pgf ``g``.

    ``zeta`` is ``(x, y, z, u, v)`` on the 4-simplex (a TypeProfile works);
    ``g`` is a nondecreasing map [0,1] -> [0,1], typically ``phi(t, .)``.
    Returns ``(Y, U, V)`` where ``Y = 1 - g(x+y+u) - g(x+y+v) + g(x+y)``,
    ``U = g(x+y+u) - g(x+y)`` and ``V = g(x+y+v) - g(x+y)``.
    """
    if hasattr(zeta, "zeta"):
        zeta = zeta.zeta()
    x, y, z, u, v = (float(c) for c in zeta)
    coords = (x, y, z, u, v)
    if any(c < -1e-12 for c in coords):
        raise ValueError("type proportions must be nonnegative")
    if abs(sum(coords) - 1.0) > 1e-9:
        raise ValueError("type proportions must sum to one")
    gxy = g(x + y)
    gxyu = g(x + y + u)
    gxyv = g(x + y + v)
    return (1.0 - gxyu - gxyv + gxy, gxyu - gxy, gxyv - gxy)

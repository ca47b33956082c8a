"""Special functions and adaptive quadrature used by every engine.

Bessel evaluations are delegated to scipy.special, which meets the accuracy
contract (relative error well below 1e-12 over the working range).  The
modified Bessel functions are only ever exposed in exponentially scaled form
e^{-x} I_n(x), so optical depths up to 1e6 never overflow.

Semi-infinite integrals are mapped onto the unit interval with the rational
substitution

    x = lo + t / (1 - t),    dx = dt / (1 - t)^2,    t in [0, 1),

and doubly infinite integrals are split at zero into two such half-lines.
The transformed finite integrals are then handled by adaptive Gauss-Kronrod
quadrature (scipy.integrate.quad).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy import special


class QuadratureConvergenceError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best available estimate so callers can degrade gracefully.
    """

    def __init__(self, message: str, best: "QuadratureResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")
        if self.evaluations < 1:
            raise ValueError("evaluations must be at least 1")


def _check_finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


def bessel_j0(x: float) -> float:
    """Bessel function of the first kind J0(x)."""
    return float(special.j0(_check_finite(x, "x")))


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind J1(x)."""
    return float(special.j1(_check_finite(x, "x")))


def bessel_i0e(x: float) -> float:
    """Exponentially scaled modified Bessel function e^{-x} I0(x), x >= 0."""
    x = _check_finite(x, "x")
    if x < 0:
        raise ValueError(f"bessel_i0e requires x >= 0, got {x}")
    return float(special.i0e(x))


def bessel_i1e(x: float) -> float:
    """Exponentially scaled modified Bessel function e^{-x} I1(x), x >= 0."""
    x = _check_finite(x, "x")
    if x < 0:
        raise ValueError(f"bessel_i1e requires x >= 0, got {x}")
    return float(special.i1e(x))


def integrate_adaptive(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    limit: int = 500,
) -> QuadratureResult:
    """Adaptive quadrature of ``f`` over [lo, hi]; either end may be infinite.

    Parameters
    ----------
    f : callable
        Integrand; must be integrable on the interval.
    lo, hi : float
        Interval ends; ``-inf``/``+inf`` are allowed.
    tol : float
        Absolute tolerance target.  The returned ``error_estimate`` is the
        quadrature routine's own bound; the contract is
        |value - integral| <= max(tol, error_estimate) for smooth integrands.
    limit : int
        Subdivision budget before giving up.

    Raises
    ------
    QuadratureConvergenceError
        When the subdivision budget is exhausted before reaching ``tol``.
        The exception carries the best estimate obtained.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lo = float(lo)
    hi = float(hi)
    if math.isnan(lo) or math.isnan(hi):
        raise ValueError("integration limits must not be NaN")
    if lo > hi:
        raise ValueError(f"lo={lo} exceeds hi={hi}")

    lo_inf = math.isinf(lo)
    hi_inf = math.isinf(hi)

    if lo_inf and hi_inf:
        left = integrate_adaptive(lambda x: f(-x), 0.0, math.inf, tol=tol / 2, limit=limit)
        right = integrate_adaptive(f, 0.0, math.inf, tol=tol / 2, limit=limit)
        return QuadratureResult(
            value=left.value + right.value,
            error_estimate=left.error_estimate + right.error_estimate,
            evaluations=left.evaluations + right.evaluations,
        )
    if lo_inf:
        return integrate_adaptive(lambda x: f(-x), -hi, math.inf, tol=tol, limit=limit)
    if hi_inf:
        def g(t: float) -> float:
            u = 1.0 - t
            return f(lo + t / u) / (u * u)
        return _quad_finite(g, 0.0, 1.0, tol=tol, limit=limit)
    return _quad_finite(f, lo, hi, tol=tol, limit=limit)


def _quad_finite(f, lo, hi, tol, limit) -> QuadratureResult:
    value, abserr, info, *rest = integrate.quad(
        f, lo, hi, epsabs=tol, epsrel=1e-12, limit=limit, full_output=1
    )
    result = QuadratureResult(value=value, error_estimate=abserr, evaluations=int(info["neval"]))
    if rest:  # quad appends a message when ier != 0
        # Roundoff-limited results that still satisfy the absolute target are
        # accepted; genuine failures propagate with the best estimate attached.
        if not (np.isfinite(value) and abserr <= max(tol, 1e-8 * max(1.0, abs(value)))):
            raise QuadratureConvergenceError(
                f"quadrature did not converge on [{lo}, {hi}]: {rest[0]}", result
            )
    return result

"""Steady-state noise engines: closed form, spectral transfer, efficiency curves.

All spectral quantities are dimensionless.  Detunings enter as x = Delta/Gamma
and squeezing bandwidths as b = Gamma_q/Gamma, so the dephasing rate Gamma
only ever appears through these ratios.

Closed form
-----------
With optical depth alpha, the collective-spin quadrature variance in units of
the atomic shot noise nL is

    variance = A(alpha) + X0^2 (1 - A(alpha)),     A = e^{-alpha}(I0 + I1),

evaluated through the scaled Bessel functions so arbitrarily large depths are
safe.  The mapping efficiency is eta = (1 - variance) / (1 - X0^2), undefined
for vacuum input (0/0).

Spectral route
--------------
The same variance follows from integrating the collective-spin spectral
density over the dimensionless detuning.  With the complex single-pass
attenuation exponent kappa L = alpha / (1 - i x), the density used here is

    rho(x) = [ (1 - e^{-2 alpha/(1+x^2)})  +  S0(x) |1 - e^{-alpha/(1-ix)}|^2 ]
             / (2 pi alpha),

whose first (Langevin) term integrates to A(alpha) and whose second term
carries the input light.  The 1/(2 pi alpha) measure constant is fixed once
by the vacuum-passthrough identity  integral rho dx = 1  for S0 = 1, which
holds for every alpha, and is frozen here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_i0e, bessel_i1e, integrate_adaptive

DEFAULT_SPECTRAL_TOL = 1e-9
DEFAULT_ALPHA_GRID = np.geomspace(1e-2, 1e3, 200)


@dataclass(frozen=True)
class SqueezingModel:
    """Second-order statistics of the input light quadrature.

    kind : "flat" or "lorentzian"
    x0_sq : flat spectral level (vacuum = 1); flat kind only
    gamma_q : squeezing bandwidth [1/s]; lorentzian kind only
    s : squeezing degree in [0, 1]; s = 1 is ideal squeezing, s = 0 vacuum

    The lorentzian spectral density is 1 - s Gq^2/(Gq^2 + Delta^2): ideally
    squeezed at line center, vacuum far outside the band.
    """

    kind: str
    x0_sq: float = 1.0
    gamma_q: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        if self.kind not in ("flat", "lorentzian"):
            raise ValueError(f"unknown squeezing kind {self.kind!r}")
        if self.x0_sq < 0:
            raise ValueError("x0_sq must be nonnegative")
        if self.kind == "lorentzian":
            if self.gamma_q <= 0:
                raise ValueError("lorentzian squeezing requires gamma_q > 0")
            if not 0.0 <= self.s <= 1.0:
                raise ValueError("squeezing degree s must lie in [0, 1]")

    @classmethod
    def flat(cls, x0_sq: float) -> "SqueezingModel":
        return cls(kind="flat", x0_sq=x0_sq)

    @classmethod
    def lorentzian(cls, gamma_q: float, s: float = 1.0) -> "SqueezingModel":
        return cls(kind="lorentzian", gamma_q=gamma_q, s=s)

    def bandwidth_ratio(self, gamma: float) -> float:
        """b = Gamma_q / Gamma."""
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        return self.gamma_q / gamma

    def spectral_density(self, x: float, gamma: float = 1.0) -> float:
        """Input noise spectral density S0 at dimensionless detuning x."""
        if self.kind == "flat":
            return self.x0_sq
        b = self.bandwidth_ratio(gamma)
        return 1.0 - self.s * b * b / (b * b + x * x)

    @property
    def noise_floor(self) -> float:
        """Reference input level used in the efficiency denominator.

        Flat inputs use X0^2 itself, lorentzian inputs the line-center level
        1 - s, so eta = (1 - variance)/s reduces to 1 - variance for ideal
        squeezing.
        """
        if self.kind == "flat":
            return self.x0_sq
        return 1.0 - self.s


@dataclass(frozen=True)
class NoiseReport:
    """Collective-spin variance in nL units and its decomposition.

    atom_langevin_part collects the atom-side noise (Langevin restoration
    plus, in transient contexts, the decayed initial coherence); light_part
    is the contribution transferred from the input field.  eta is NaN when
    the input sits exactly at the vacuum level (0/0 in its definition).
    """

    variance_norm: float
    eta: float
    atom_langevin_part: float
    light_part: float

    def __post_init__(self):
        if not math.isclose(
            self.variance_norm, self.atom_langevin_part + self.light_part,
            rel_tol=1e-9, abs_tol=1e-12,
        ):
            raise ValueError("variance_norm must equal atom_langevin_part + light_part")

    @property
    def eta_defined(self) -> bool:
        return not math.isnan(self.eta)


def eta_from_variance(variance_norm: float, noise_floor: float) -> float:
    if noise_floor == 1.0:
        return math.nan
    return (1.0 - variance_norm) / (1.0 - noise_floor)


def atomic_vacuum_fraction(alpha: float) -> float:
    """A(alpha) = e^{-alpha}(I0(alpha) + I1(alpha)), the unmapped noise share."""
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    return bessel_i0e(alpha) + bessel_i1e(alpha)


def eta_closed(alpha: float) -> float:
    """Closed-form mapping efficiency 1 - e^{-alpha}(I0 + I1)."""
    return 1.0 - atomic_vacuum_fraction(alpha)


def variance_closed(alpha: float, x0_sq: float) -> NoiseReport:
    """Steady-state variance for flat (white) input at level X0^2."""
    if x0_sq < 0:
        raise ValueError(f"x0_sq must be nonnegative, got {x0_sq}")
    atom = atomic_vacuum_fraction(alpha)
    light = x0_sq * (1.0 - atom)
    return NoiseReport(
        variance_norm=atom + light,
        eta=eta_from_variance(atom + light, x0_sq),
        atom_langevin_part=atom,
        light_part=light,
    )


def transmitted_spectrum(alpha: float, x: float, s0: float) -> float:
    """Noise spectrum of the transmitted light, S0 T + (1 - T), T = e^{-alpha/(1+x^2)}.

    A convex combination of the input level and vacuum: absorbed frequencies
    exit at the vacuum level, untouched ones pass through.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    t = math.exp(-alpha / (1.0 + x * x))
    return s0 * t + (1.0 - t)


def _langevin_density(alpha: float, x: float) -> float:
    # removable alpha -> 0 limit: a unit-normalized Lorentzian (1/pi)/(1+x^2)
    q = 1.0 + x * x
    if alpha == 0.0:
        return 1.0 / (math.pi * q)
    return -math.expm1(-2.0 * alpha / q) / (2.0 * math.pi * alpha)


def _light_weight(alpha: float, x: float) -> float:
    # |1 - e^{-alpha/(1-ix)}|^2 / (2 pi alpha); -> 0 as alpha -> 0
    if alpha == 0.0:
        return 0.0
    q = 1.0 + x * x
    a_re = alpha / q
    a_im = alpha * x / q
    e = math.exp(-a_re)
    mod_sq = 1.0 - 2.0 * e * math.cos(a_im) + e * e
    return mod_sq / (2.0 * math.pi * alpha)


def atomic_spectral_density(alpha: float, x: float, s0: float, gamma: float = 1.0) -> float:
    """Spectral density of the collective-spin quadrature at detuning x = Delta/Gamma.

    Normalized so that its integral over x equals the variance in nL units;
    gamma is accepted for interface symmetry but enters only through ratios
    already folded into x.
    """
    del gamma
    if s0 < 0:
        raise ValueError(f"s0 must be nonnegative, got {s0}")
    return _langevin_density(alpha, x) + s0 * _light_weight(alpha, x)


def variance_spectral(
    alpha: float,
    model: SqueezingModel,
    gamma: float = 1.0,
    tol: float = DEFAULT_SPECTRAL_TOL,
) -> NoiseReport:
    """Frequency-integrated variance; agrees with the closed form for flat input.

    Both density pieces are even in x, so the integration runs over [0, inf)
    and is doubled.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    if alpha == 0.0:
        # no light absorbed; pure atomic vacuum for any input statistics
        return NoiseReport(
            variance_norm=1.0,
            eta=eta_from_variance(1.0, model.noise_floor),
            atom_langevin_part=1.0,
            light_part=0.0,
        )
    atom = 2.0 * integrate_adaptive(
        lambda x: _langevin_density(alpha, x), 0.0, math.inf, tol=tol / 2
    ).value
    light = 2.0 * integrate_adaptive(
        lambda x: model.spectral_density(x, gamma) * _light_weight(alpha, x),
        0.0, math.inf, tol=tol / 2,
    ).value
    return NoiseReport(
        variance_norm=atom + light,
        eta=eta_from_variance(atom + light, model.noise_floor),
        atom_langevin_part=atom,
        light_part=light,
    )


def efficiency_curve(
    alpha_grid,
    model: SqueezingModel,
    gamma: float = 1.0,
    tol: float = DEFAULT_SPECTRAL_TOL,
) -> list[tuple[float, float]]:
    """Tabulate (alpha, eta) over a sorted nonnegative grid.

    Flat inputs use the closed form; lorentzian inputs run the spectral
    engine point by point.  Evaluation is independent per grid point, so the
    output never depends on evaluation order.
    """
    grid = [float(a) for a in alpha_grid]
    if any(a < 0 for a in grid):
        raise ValueError("alpha grid must be nonnegative")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be sorted ascending")

    out = []
    for a in grid:
        if model.kind == "flat":
            eta = eta_closed(a) if model.x0_sq != 1.0 else math.nan
        else:
            eta = variance_spectral(a, model, gamma, tol).eta
        out.append((a, eta))
    return out

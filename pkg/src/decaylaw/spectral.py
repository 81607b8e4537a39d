"""Spectral densities and the closed-form Breit-Wigner amplitude.

Units: hbar = 1, energies in units of the width Gamma_0, energies measured
from the threshold (E_min = 0), time as x = t / tau_0.  The Breit-Wigner
model is then fixed by the single ratio s_R = E_R / Gamma_0.

The closed forms are evaluated through g(z) = exp(z) E1(z).  With
z1 = (1/2 - i s_R) x and z2 = (-1/2 - i s_R) x the amplitude becomes

    a(x) = N [ exp(z2) - (i / 2 pi) (g(z1) - g(z2)) ]

so only the decaying pole term exp(z2) appears explicitly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, RangeExceeded
from .special_functions import e1_scaled

__all__ = [
    "BreitWigner",
    "GeneralDensity",
    "MixtureDensity",
    "bw_normalization",
    "omega_bw",
    "omega_general",
    "amplitude_closed_form",
    "zeta_closed_form",
    "dzeta_dx_closed_form",
]

POLE_REGION_HALF_WIDTHS = 50.0
DEFAULT_TAIL_SPAN = 1.0e4

_LOG_MAX = math.log(np.finfo(float).max)


def bw_normalization(s_R: float) -> float:
    """N such that the Breit-Wigner density truncated at E = 0 integrates to one."""
    return 1.0 / (0.5 + math.atan(2.0 * s_R) / math.pi)


@dataclass(frozen=True)
class BreitWigner:
    """Breit-Wigner density with peak at ``s_R`` and unit width, zero below threshold.

    ``normalized=False`` replaces N by 1; the CLI uses it as a negative control.
    """

    s_R: float
    normalized: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.s_R) and self.s_R > 0):
            raise DomainError(f"s_R must be positive and finite, got {self.s_R!r}")

    @property
    def N(self) -> float:
        return bw_normalization(self.s_R) if self.normalized else 1.0

    @property
    def pole(self) -> complex:
        return complex(self.s_R, -0.5)

    threshold_exponent = 0.0

    @property
    def pole_region(self) -> tuple[float, float]:
        hw = 0.5 * POLE_REGION_HALF_WIDTHS
        return max(0.0, self.s_R - hw), self.s_R + hw

    @property
    def default_cutoff(self) -> float:
        return self.s_R + DEFAULT_TAIL_SPAN

    def tail_mass(self, cutoff: float) -> float:
        """Integral of the density over [cutoff, inf)."""
        return self.N * (0.5 - math.atan(2.0 * (cutoff - self.s_R)) / math.pi)

    def __call__(self, E):
        return omega_bw(E, self)

    def amplitude(self, x):
        return amplitude_closed_form(x, self)

    def amplitude_derivative(self, x):
        """da/dx = (-1/2 - i s_R) a - (i N / 2 pi) g((1/2 - i s_R) x)."""
        x = np.asarray(x, dtype=float)
        a = amplitude_closed_form(x, self)
        g1 = e1_scaled((0.5 - 1j * self.s_R) * np.where(x > 0, x, 1.0))
        return np.where(x > 0, (-1j * self.s_R - 0.5) * a - 1j * self.N / (2 * np.pi) * g1, np.nan)

    def zeta(self, x):
        return zeta_closed_form(x, self)

    def dzeta_dx(self, x):
        return dzeta_dx_closed_form(x, self)


def omega_bw(E, params: BreitWigner):
    """Breit-Wigner density (N / 2 pi) Theta(E) / ((E - s_R)^2 + 1/4)."""
    E = np.asarray(E, dtype=float)
    val = params.N / (2 * np.pi) / ((E - params.s_R) ** 2 + 0.25)
    out = np.where(E >= 0, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _value_at_zero(params: BreitWigner) -> float:
    # the two E1 terms diverge like -ln z but their difference tends to
    # ln z2 - ln z1 = i (2 arctan(2 s_R) - pi), which makes the bracket 1/N
    if params.normalized:
        return 1.0
    return 0.5 + math.atan(2 * params.s_R) / math.pi


def _pole_arguments(x: np.ndarray, s_R: float):
    return (0.5 - 1j * s_R) * x, (-0.5 - 1j * s_R) * x


def _as_grid(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("time must be finite and non-negative")
    return x


def amplitude_closed_form(x, params: BreitWigner):
    """Survival amplitude a(x) of the Breit-Wigner model in closed form.

    a(0) = 1 exactly (for the normalized model); for x > 0 the scaled E1
    representation keeps every intermediate bounded, so large x is safe.
    """
    x = _as_grid(x)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    out = np.empty(xs.shape, dtype=complex)
    zero = xs == 0
    out[zero] = _value_at_zero(params)
    pos = ~zero
    if pos.any():
        z1, z2 = _pole_arguments(xs[pos], params.s_R)
        cut = e1_scaled(z1) - e1_scaled(z2)
        out[pos] = params.N * (np.exp(z2) - 0.5j / np.pi * cut)
    return complex(out[0]) if scalar else out


def _grow(x: np.ndarray, s_R: float, w: np.ndarray) -> np.ndarray:
    """exp(x/2 + i s_R x) * w without intermediate overflow."""
    with np.errstate(divide="ignore"):
        log_w = np.log(w)
    expo = 0.5 * x + log_w.real
    if np.any(expo > _LOG_MAX - 1.0):
        raise RangeExceeded(
            f"zeta grows like exp(x/2)/x and leaves double range beyond x ~ {2 * _LOG_MAX:.0f}"
        )
    return np.exp(expo + 1j * (s_R * x + log_w.imag))


def zeta_closed_form(x, params: BreitWigner):
    """zeta(x) = a(x) / a_c(x) for the Breit-Wigner model.

    Raises RangeExceeded once |zeta| (which grows like exp(x/2)/x) leaves the
    double-precision range.
    """
    x = _as_grid(x)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    out = np.empty(xs.shape, dtype=complex)
    zero = xs == 0
    out[zero] = _value_at_zero(params)
    pos = ~zero
    if pos.any():
        xp = xs[pos]
        z1, z2 = _pole_arguments(xp, params.s_R)
        cut = _grow(xp, params.s_R, e1_scaled(z1) - e1_scaled(z2))
        out[pos] = params.N * (1.0 - 0.5j / np.pi * cut)
    return complex(out[0]) if scalar else out


def dzeta_dx_closed_form(x, params: BreitWigner):
    """Time derivative of zeta: -(i N / 2 pi) exp(x) E1((1/2 - i s_R) x).

    The sign is the one obtained by differentiating ``zeta_closed_form``;
    only the E1 term survives because the derivatives of the two E1 terms
    cancel against each other.
    """
    x = _as_grid(x)
    if np.any(x == 0):
        raise DomainError("d zeta / dx has a logarithmic singularity at x = 0")
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    z1, _ = _pole_arguments(xs, params.s_R)
    out = -0.5j * params.N / np.pi * _grow(xs, params.s_R, e1_scaled(z1))
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# general threshold / pole / form-factor densities


def _quad_piece(fun, lo, hi, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        val, err = integrate.quad(fun, lo, hi, points=points, epsabs=1e-14, epsrel=1e-12, limit=500)
    return val, err


@dataclass(frozen=True)
class GeneralDensity:
    """omega(E) = N Theta(E) E**(alpha + l) P(E) F(E).

    ``pole`` is E_0 - i Gamma/2 of the pole function
    P(E) = (Gamma / 2 pi) / ((E - E_0)^2 + Gamma^2 / 4); ``pole=None`` means
    P = 1.  ``form_factor`` must be a non-negative function of a float
    array that is safe to call from several threads at once.  N is fixed
    numerically at construction; a density that is not integrable raises
    ``DomainError`` here.
    """

    alpha: float = 0.0
    l: int = 0
    pole: Optional[complex] = None
    form_factor: Optional[Callable[[np.ndarray], np.ndarray]] = None
    tail_cutoff: Optional[float] = None
    N: float = field(init=False, default=1.0)

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise DomainError("alpha must lie in [0, 1)")
        if int(self.l) != self.l or self.l < 0:
            raise DomainError("l must be a non-negative integer")
        if self.pole is not None and complex(self.pole).imag >= 0:
            raise DomainError("pole must lie in the lower half-plane (Gamma > 0)")
        object.__setattr__(self, "N", 1.0)
        total = self._integrate_raw()
        if not (math.isfinite(total) and total > 0):
            raise DomainError("density is not normalizable")
        object.__setattr__(self, "N", 1.0 / total)

    @property
    def threshold_exponent(self) -> float:
        return self.alpha + self.l

    @property
    def gamma(self) -> Optional[float]:
        return None if self.pole is None else -2.0 * complex(self.pole).imag

    @property
    def pole_region(self) -> tuple[float, float]:
        if self.pole is None:
            return 0.0, 0.0
        e0, hw = complex(self.pole).real, 0.5 * self.gamma * POLE_REGION_HALF_WIDTHS
        return max(0.0, e0 - hw), max(0.0, e0 + hw)

    @property
    def default_cutoff(self) -> float:
        if self.tail_cutoff is not None:
            return float(self.tail_cutoff)
        if self.pole is None:
            return DEFAULT_TAIL_SPAN
        return max(complex(self.pole).real, 0.0) + DEFAULT_TAIL_SPAN * self.gamma

    def __call__(self, E):
        return omega_general(E, self)

    def _integrate_raw(self) -> float:
        lo, hi = self.pole_region
        f = lambda e: float(omega_general(e, self))  # noqa: E731
        edges = sorted({0.0, lo, hi, self.default_cutoff})
        total = 0.0
        try:
            for a, b in zip(edges[:-1], edges[1:]):
                if b > a:
                    total += _quad_piece(f, a, b)[0]
            total += _quad_piece(f, edges[-1], np.inf)[0]
        except integrate.IntegrationWarning as exc:
            raise DomainError(f"normalization quadrature did not converge: {exc}") from exc
        return total


def omega_general(E, params: GeneralDensity):
    """Threshold x pole x form-factor density, zero at and below E = 0."""
    E = np.asarray(E, dtype=float)
    above = E > 0
    Ep = np.where(above, E, 1.0)
    val = Ep ** params.threshold_exponent
    if params.pole is not None:
        p = complex(params.pole)
        g = -2.0 * p.imag
        val = val * (g / (2 * np.pi)) / ((Ep - p.real) ** 2 + 0.25 * g * g)
    if params.form_factor is not None:
        val = val * np.asarray(params.form_factor(Ep), dtype=float)
    out = np.where(above, params.N * val, 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MixtureDensity:
    """Positive combination of normalized densities, renormalized to unit mass."""

    components: Sequence
    weights: Sequence[float]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(w) != len(self.components) or np.any(w <= 0):
            raise DomainError("mixture needs one positive weight per component")
        object.__setattr__(self, "weights", tuple(w / w.sum()))

    @property
    def threshold_exponent(self) -> float:
        return min(c.threshold_exponent for c in self.components)

    @property
    def pole_region(self) -> tuple[float, float]:
        regions = [c.pole_region for c in self.components if c.pole_region[1] > c.pole_region[0]]
        if not regions:
            return 0.0, 0.0
        return min(r[0] for r in regions), max(r[1] for r in regions)

    @property
    def default_cutoff(self) -> float:
        return max(c.default_cutoff for c in self.components)

    def __call__(self, E):
        return sum(w * np.asarray(c(E)) for w, c in zip(self.weights, self.components))

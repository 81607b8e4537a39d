"""Diagnostics of the decay law against the canonical exponential.

Everything here works in the dimensionless units of :mod:`decaylaw.spectral`:
time x = t / tau_0 and energies in units of Gamma_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    GridTooCoarse,
    InsufficientPoints,
    NonPositiveProbability,
    RangeExceeded,
    StepTooCoarse,
)
from .quadrature import QuadratureConfig, amplitudes_by_quadrature
from .spectral import BreitWigner

__all__ = [
    "TimeGrid",
    "DecayCurve",
    "TailFit",
    "EffectiveHamiltonianPoint",
    "IsolatedZeroReport",
    "Canonical",
    "canonical_amplitude",
    "zeta",
    "closed_form_curve",
    "decay_law_by_quadrature",
    "effective_hamiltonian",
    "effective_hamiltonian_sampled",
    "fit_power_law",
    "fit_tail_exponent",
    "dominant_oscillation_frequency",
    "extremum_frequency",
    "count_sign_changes",
    "window_maxima",
    "envelope_trend",
    "isolated_zero_check",
]

AMPLITUDE_FLOOR = 1e-300


@dataclass(frozen=True)
class TimeGrid:
    points: np.ndarray
    spacing: str = "lin"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("time grid must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(pts)) or np.any(pts < 0):
            raise DomainError("time grid points must be finite and non-negative")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("time grid must be strictly increasing")
        if self.spacing not in ("lin", "log"):
            raise DomainError(f"unknown spacing {self.spacing!r}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linear(cls, x_min: float, x_max: float, count: int) -> "TimeGrid":
        if count < 1:
            raise DomainError("grid needs at least one point")
        if count == 1:
            return cls(np.array([float(x_min)]), "lin")
        return cls(np.linspace(x_min, x_max, count), "lin")

    @classmethod
    def logarithmic(cls, x_min: float, x_max: float, count: int) -> "TimeGrid":
        if x_min <= 0:
            raise DomainError("logarithmic grid needs x_min > 0")
        if count < 1:
            raise DomainError("grid needs at least one point")
        if count == 1:
            return cls(np.array([float(x_min)]), "log")
        return cls(np.geomspace(x_min, x_max, count), "log")

    def __len__(self):
        return self.points.size


@dataclass
class DecayCurve:
    """Sampled amplitude and deviation diagnostics on a time grid.

    ``a_c``, ``P_c``, ``zeta`` and ``f`` are None when the density has no
    reference pole or when the deviation was not requested.  ``error`` holds
    the certified amplitude error per point (None for closed-form curves)
    and ``failed`` marks points whose quadrature did not converge.
    """

    x: np.ndarray
    a: np.ndarray
    a_c: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None
    error: Optional[np.ndarray] = None
    failed: Optional[np.ndarray] = None

    @property
    def P(self) -> np.ndarray:
        return np.abs(self.a) ** 2

    @property
    def P_c(self) -> Optional[np.ndarray]:
        return None if self.a_c is None else np.abs(self.a_c) ** 2

    @property
    def f(self) -> Optional[np.ndarray]:
        if self.zeta is None:
            return None
        with np.errstate(over="raise"):
            try:
                return np.abs(self.zeta) ** 2 - 1.0
            except FloatingPointError:
                raise RangeExceeded("|zeta|^2 overflows on this grid") from None

    @property
    def P_error(self) -> Optional[np.ndarray]:
        """Bound on |dP| propagated from the amplitude error."""
        if self.error is None:
            return None
        return 2 * np.abs(self.a) * self.error + self.error**2


@dataclass(frozen=True)
class TailFit:
    exponent: float
    intercept: float
    fit_window: tuple
    residual_rms: float
    n_points: int


@dataclass(frozen=True)
class EffectiveHamiltonianPoint:
    x: float
    h: complex
    error_estimate: float = 0.0

    @property
    def instantaneous_energy(self) -> float:
        return self.h.real

    @property
    def instantaneous_rate(self) -> float:
        return -2.0 * self.h.imag


@dataclass(frozen=True)
class IsolatedZeroReport:
    max_run_length: int
    epsilon: float
    floor: float
    windows_checked: int
    windows_without_signal: int
    max_run_allowed: int

    @property
    def passed(self) -> bool:
        return self.max_run_length <= self.max_run_allowed and self.windows_without_signal == 0

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def canonical_amplitude(x, s_R: float):
    """exp(-i s_R x - x/2); |a_c|^2 = exp(-x)."""
    x = np.asarray(x, dtype=float)
    out = np.exp((-0.5 - 1j * s_R) * x)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Canonical:
    """The purely exponential amplitude as an amplitude source."""

    s_R: float

    def amplitude(self, x):
        return canonical_amplitude(x, self.s_R)

    def amplitude_derivative(self, x):
        return (-0.5 - 1j * self.s_R) * canonical_amplitude(x, self.s_R)


def zeta(a, a_c):
    """Ratio a / a_c; raises DomainError where the canonical amplitude underflowed."""
    a = np.asarray(a, dtype=complex)
    a_c = np.asarray(a_c, dtype=complex)
    if np.any(np.abs(a_c) < AMPLITUDE_FLOOR):
        raise DomainError("canonical amplitude underflows; use the closed-form zeta instead")
    out = a / a_c
    return complex(out) if out.ndim == 0 else out


def _points(grid) -> np.ndarray:
    return grid.points if isinstance(grid, TimeGrid) else TimeGrid(np.atleast_1d(grid)).points


def closed_form_curve(grid, model: BreitWigner, with_deviation: bool = True) -> DecayCurve:
    """Decay curve of the Breit-Wigner model from the closed forms.

    zeta comes from its own closed form rather than a / a_c, so it stays
    available after exp(-x) underflows.  Pass ``with_deviation=False`` for
    late-time grids where zeta itself leaves the double range.
    """
    x = _points(grid)
    a = model.amplitude(x)
    a_c = canonical_amplitude(x, model.s_R)
    z = model.zeta(x) if with_deviation else None
    return DecayCurve(x=x, a=a, a_c=a_c, zeta=z)


def decay_law_by_quadrature(grid, density, cfg: Optional[QuadratureConfig] = None, workers: int = 1) -> DecayCurve:
    """Decay curve from direct Fourier quadrature of ``density``.

    Points where the quadrature failed keep the best value reached and are
    flagged in ``failed``.
    """
    x = _points(grid)
    results = amplitudes_by_quadrature(x, density, cfg, workers=workers)
    a = np.array([r.value if r.value is not None else np.nan for r in results], dtype=complex)
    err = np.array([r.error_estimate if r.error_estimate is not None else np.inf for r in results])
    failed = np.array([isinstance(r, Exception) for r in results])
    pole = getattr(density, "pole", None)
    a_c = z = None
    if pole is not None:
        a_c = np.exp(-1j * complex(pole) * x)
        if np.all(np.abs(a_c) >= AMPLITUDE_FLOOR):
            z = a / a_c
    return DecayCurve(x=x, a=a, a_c=a_c, zeta=z, error=err, failed=failed)


def effective_hamiltonian(source, x: float, step: Optional[float] = None) -> EffectiveHamiltonianPoint:
    """h(x) = i a'(x) / a(x) in units of Gamma_0.

    ``source`` is an object with ``amplitude`` and ``amplitude_derivative``
    (``BreitWigner``, ``Canonical``) or a plain callable a(x), which is
    differentiated numerically with the given ``step``.
    """
    x = float(x)
    if not x > 0:
        raise DomainError("effective Hamiltonian is evaluated at x > 0")
    if hasattr(source, "amplitude_derivative"):
        if isinstance(source, BreitWigner):
            return _bw_hamiltonian(source, x)
        a = complex(source.amplitude(x))
        if abs(a) < AMPLITUDE_FLOOR:
            raise DomainError("amplitude underflows; h is undefined")
        return EffectiveHamiltonianPoint(x, 1j * complex(source.amplitude_derivative(x)) / a)
    if not callable(source):
        raise TypeError("source must provide amplitude_derivative or be callable")
    if step is None or step <= 0:
        raise DomainError("a positive step is needed to differentiate a sampled amplitude")
    if x - 2 * step < 0:
        raise DomainError("step too large for a centered stencil at this x")
    xs = x + step * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    vals = np.asarray([complex(source(v)) for v in xs])
    h = _richardson_h(vals, step)
    return EffectiveHamiltonianPoint(x, h[0], h[1])


def _bw_hamiltonian(model: BreitWigner, x: float) -> EffectiveHamiltonianPoint:
    # h = s_R - i/2 + i zeta'/zeta, rewritten in scaled form as
    # h = s_R - i/2 + (N / 2 pi) g((1/2 - i s_R) x) / a(x)
    from .special_functions import e1_scaled

    a = complex(model.amplitude(x))
    if abs(a) < AMPLITUDE_FLOOR:
        raise DomainError("amplitude underflows; h is undefined")
    g1 = e1_scaled((0.5 - 1j * model.s_R) * x)
    h = complex(model.s_R, -0.5) + model.N / (2 * math.pi) * g1 / a
    return EffectiveHamiltonianPoint(x, h)


def _richardson_h(vals: np.ndarray, step: float):
    """h at the centre of a 5-point stencil with one Richardson level."""
    a = vals[2]
    if abs(a) < AMPLITUDE_FLOOR:
        raise DomainError("amplitude underflows; h is undefined")
    d1 = (vals[3] - vals[1]) / (2 * step)
    d2 = (vals[4] - vals[0]) / (4 * step)
    d = (4 * d1 - d2) / 3
    h = 1j * d / a
    err = abs(1j * (d - d1) / a)
    if err > 0.01 * abs(h):
        raise StepTooCoarse(f"finite-difference error {err:.3g} exceeds 1% of |h| = {abs(h):.3g}")
    return h, err


def effective_hamiltonian_sampled(x, a) -> list:
    """h on the interior of a uniform sampled curve (two points lost at each end)."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=complex)
    if x.size < 5:
        raise InsufficientPoints("need at least 5 samples")
    dx = np.diff(x)
    step = dx[0]
    if not np.allclose(dx, step, rtol=1e-9, atol=0):
        raise DomainError("sampled effective Hamiltonian needs a uniform grid")
    out = []
    for i in range(2, x.size - 2):
        h, err = _richardson_h(a[i - 2 : i + 3], step)
        out.append(EffectiveHamiltonianPoint(float(x[i]), complex(h), float(err)))
    return out


def fit_power_law(x, P, window: tuple) -> TailFit:
    """Least-squares slope of log P against log x inside ``window``."""
    x = np.asarray(x, dtype=float)
    P = np.asarray(P, dtype=float)
    lo, hi = window
    sel = (x >= lo) & (x <= hi)
    if sel.sum() < 20:
        raise InsufficientPoints(f"window {window} holds {int(sel.sum())} points, need 20")
    xs, ps = x[sel], P[sel]
    if np.any(ps <= 0) or np.any(xs <= 0):
        raise NonPositiveProbability("non-positive probability or time inside the fit window")
    lx, lp = np.log(xs), np.log(ps)
    slope, intercept = np.polyfit(lx, lp, 1)
    resid = lp - (slope * lx + intercept)
    return TailFit(float(slope), float(intercept), (float(lo), float(hi)), float(np.sqrt(np.mean(resid**2))), int(sel.sum()))


def fit_tail_exponent(curve: DecayCurve, window: tuple = (100.0, 1000.0)) -> TailFit:
    return fit_power_law(curve.x, curve.P, window)


def _uniform_step(x: np.ndarray) -> float:
    dx = np.diff(x)
    step = float(np.mean(dx))
    if not np.allclose(dx, step, rtol=1e-6, atol=0):
        raise DomainError("a uniform grid is required")
    return step


def dominant_oscillation_frequency(x, f, expected: Optional[float] = None) -> float:
    """Frequency (cycles per lifetime) of the strongest non-zero spectral peak of f.

    The spectrum is that of f - mean(f) with a rectangular window; the peak
    position is refined by a parabola through the three bins around it.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.size < 256:
        raise InsufficientPoints("need at least 256 uniform samples")
    step = _uniform_step(x)
    nyquist = 0.5 / step
    if expected is not None and (nyquist < expected or 1.0 / (step * expected) < 8):
        raise GridTooCoarse(f"grid resolves up to {nyquist:.4g} cycles per lifetime, too coarse for {expected:.4g}")
    amp = np.abs(np.fft.rfft(f - f.mean()))
    freqs = np.fft.rfftfreq(f.size, step)
    # local maxima only, so the monotone leakage of a growing trend near zero is skipped
    inner = np.arange(1, amp.size - 1)
    peaks = inner[(amp[inner] > amp[inner - 1]) & (amp[inner] >= amp[inner + 1])]
    if peaks.size == 0:
        k = int(np.argmax(amp[1:]) + 1)
        return float(freqs[k])
    k = int(peaks[np.argmax(amp[peaks])])
    ym, y0, yp = amp[k - 1], amp[k], amp[k + 1]
    denom = ym - 2 * y0 + yp
    shift = 0.5 * (ym - yp) / denom if denom != 0 else 0.0
    return float((k + shift) * (freqs[1] - freqs[0]))


def count_sign_changes(values) -> int:
    """Strict sign alternations between consecutive samples (zeros skipped)."""
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def extremum_frequency(x, f) -> float:
    """Oscillation frequency from the number of local extrema (two per cycle)."""
    x = np.asarray(x, dtype=float)
    n = count_sign_changes(np.diff(np.asarray(f, dtype=float)))
    return n / (2.0 * (x[-1] - x[0]))


def window_maxima(x, values, start: float, stop: float, width: float = 1.0) -> np.ndarray:
    """max |values| over consecutive windows [start + k w, start + (k+1) w)."""
    x = np.asarray(x, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    n = int(round((stop - start) / width))
    out = []
    for k in range(n):
        lo = start + k * width
        sel = (x >= lo) & (x < lo + width)
        if not sel.any():
            raise InsufficientPoints(f"no samples in window [{lo}, {lo + width})")
        out.append(v[sel].max())
    return np.array(out)


def envelope_trend(maxima: Sequence[float], ratio: float = 0.9) -> str:
    """'nondecreasing' when every window maximum is at least ``ratio`` times the previous one."""
    m = np.asarray(maxima, dtype=float)
    if m.size < 2:
        return "undetermined"
    return "nondecreasing" if np.all(m[1:] >= ratio * m[:-1]) else "not monotone"


def isolated_zero_check(
    x,
    dzeta_abs,
    epsilon: Optional[float] = None,
    window: float = 0.5,
    max_run_allowed: int = 2,
    floor_ratio: float = 1e-12,
) -> IsolatedZeroReport:
    """Look for stretches where |d zeta / dx| stays at zero.

    A run is a maximal stretch of consecutive samples with |d zeta/dx| <=
    ``epsilon`` (default ``floor_ratio`` times the grid maximum).  The check
    passes when no run is longer than ``max_run_allowed`` samples and every
    window of the given width holds a sample above the floor.
    """
    x = np.asarray(x, dtype=float)
    d = np.abs(np.asarray(dzeta_abs, dtype=float))
    if x.size != d.size or x.size == 0:
        raise DomainError("x and |d zeta/dx| must be non-empty and of equal length")
    floor = floor_ratio * float(d.max())
    eps = floor if epsilon is None else float(epsilon)
    low = d <= eps
    max_run = run = 0
    for flag in low:
        run = run + 1 if flag else 0
        max_run = max(max_run, run)
    n_win = max(1, int(math.floor((x[-1] - x[0]) / window)))
    empty = 0
    for k in range(n_win):
        lo = x[0] + k * window
        hi = x[-1] + 1 if k == n_win - 1 else lo + window
        sel = (x >= lo) & (x < hi)
        if not np.any(d[sel] > floor):
            empty += 1
    return IsolatedZeroReport(max_run, eps, floor, n_win, empty, max_run_allowed)

"""Exponential integral E1 for complex arguments.

E1(z) = int_z^inf exp(-u)/u du on the principal branch, with the cut along
the closed negative real axis.  Evaluation switches between three methods:

* power series  E1(z) = -gamma - ln z - sum_k (-z)^k / (k k!)
  for |z| <= 4 (|z| <= 2 in the right half-plane, where the alternating
  terms cancel harder), and for 4 < |z| <= 40 close to the cut where the
  continued fraction converges too slowly;
* the continued fraction for exp(z) E1(z) (modified Lentz) for
  |arg z| <= 2.5 and |z| > 4;
* the asymptotic series exp(z) E1(z) ~ (1/z) sum_k (-1)^k k!/z^k,
  truncated at its smallest term, near the cut for |z| > 40.

All functions accept a scalar or an array and return the same shape.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, RangeExceeded

__all__ = ["EULER_GAMMA", "e1", "e1_scaled"]

EULER_GAMMA = 0.57721566490153286061

_SERIES_RADIUS = 4.0
_SERIES_RADIUS_RIGHT = 2.0
_CF_MAX_ARG = 2.5
_NEAR_CUT_SERIES_RADIUS = 40.0
_TOL = 1e-16
_MAX_ITER = 500
_TINY = 1e-300


def _check_domain(z: np.ndarray) -> None:
    bad = (z.imag == 0) & (z.real <= 0)
    if np.any(bad):
        raise DomainError(f"E1 is undefined at z = {complex(z[bad][0])} (origin or branch cut)")
    if not np.all(np.isfinite(z)):
        raise DomainError("E1 requires finite arguments")


def _series(z: np.ndarray) -> np.ndarray:
    """E1(z) by the convergent power series."""
    term = np.ones_like(z)
    acc = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _MAX_ITER + 1):
        term = term * (-z / k)
        contrib = term / k
        acc = np.where(active, acc + contrib, acc)
        active &= np.abs(contrib) >= _TOL * np.abs(acc)
        if not active.any():
            break
    else:
        raise RuntimeError("E1 power series did not converge within the iteration cap")
    return -EULER_GAMMA - np.log(z) - acc


def _continued_fraction(z: np.ndarray) -> np.ndarray:
    """exp(z) E1(z) by the modified Lentz method."""
    b = z + 1.0
    c = np.full(z.shape, 1.0 / _TINY, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, _MAX_ITER + 1):
        an = -float(i * i)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _TOL
        if not active.any():
            break
    else:
        raise RuntimeError("E1 continued fraction did not converge within the iteration cap")
    return h


def _asymptotic(z: np.ndarray) -> np.ndarray:
    """exp(z) E1(z) by the asymptotic series, truncated at the smallest term."""
    term = np.ones_like(z)
    acc = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, _MAX_ITER + 1):
        nxt = term * (-k / z)
        # stop before the terms start to grow; the last kept term bounds the error
        active &= np.abs(nxt) < np.abs(term)
        term = np.where(active, nxt, term)
        acc = np.where(active, acc + nxt, acc)
        active &= np.abs(nxt) >= _TOL * np.abs(acc)
        if not active.any():
            break
    bound = np.abs(term) / np.abs(acc)
    if np.any(bound > 1e-14):
        raise RuntimeError("asymptotic E1 expansion used outside its accuracy range")
    return acc / z


def _scaled_and_plain(z, want_scaled: bool):
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    zz = np.atleast_1d(arr)
    _check_domain(zz)

    r = np.abs(zz)
    phase = np.abs(np.angle(zz))
    radius = np.where(zz.real > 0, _SERIES_RADIUS_RIGHT, _SERIES_RADIUS)
    use_series = (r <= radius) | ((phase > _CF_MAX_ARG) & (r <= _NEAR_CUT_SERIES_RADIUS))
    use_cf = ~use_series & (phase <= _CF_MAX_ARG)
    use_asym = ~use_series & ~use_cf

    out = np.empty_like(zz)
    with np.errstate(over="ignore", invalid="ignore"):
        if use_series.any():
            zs = zz[use_series]
            val = _series(zs)
            out[use_series] = np.exp(zs) * val if want_scaled else val
        for mask, method in ((use_cf, _continued_fraction), (use_asym, _asymptotic)):
            if mask.any():
                zs = zz[mask]
                g = method(zs)
                out[mask] = g if want_scaled else np.exp(-zs) * g
    if not np.all(np.isfinite(out)):
        raise RangeExceeded("E1 value overflows double precision")
    return complex(out[0]) if scalar else out


def e1(z):
    """Exponential integral E1(z), principal branch.

    Raises
    ------
    DomainError
        For z = 0 or z on the negative real axis.
    RangeExceeded
        When |E1(z)| exceeds the double-precision range (Re z < about -700).
    """
    return _scaled_and_plain(z, want_scaled=False)


def e1_scaled(z):
    """exp(z) * E1(z), representable where exp(z) or E1(z) alone is not.

    Behaves like 1/z - 1/z**2 + ... for large |z|.
    """
    return _scaled_and_plain(z, want_scaled=True)

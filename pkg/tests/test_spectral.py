import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from decaylaw import (
    BreitWigner,
    DomainError,
    GeneralDensity,
    MixtureDensity,
    RangeExceeded,
    amplitude_closed_form,
    canonical_amplitude,
    omega_bw,
)
from decaylaw.spectral import bw_normalization

# a(x) for s_R = 10 from scipy's QAWF Fourier integrator on the density, frozen
FROZEN_A = [
    (0.5, 0.22353083254737946 + 0.7561430274684758j),
    (3.0, 0.03493901941561001 + 0.22348785457186432j),
    (25.0, 3.977425018603374e-07 - 6.0847958422679384e-05j),
]


@pytest.mark.parametrize("x,expected", FROZEN_A)
def test_amplitude_frozen(x, expected):
    assert abs(complex(BreitWigner(10.0).amplitude(x)) - expected) < 1e-13


def test_normalization_constant():
    assert bw_normalization(10.0) == pytest.approx(1.0161592192203215, rel=1e-15)
    # N -> 1 deep above threshold
    assert abs(bw_normalization(1e6) - 1) < 1e-6


@pytest.mark.parametrize("s_R", [0.3, 2.0, 10.0])
def test_density_integrates_to_one(s_R):
    m = BreitWigner(s_R)
    core = integrate.quad(m, 0, s_R + 200, points=[s_R], limit=500, epsabs=1e-14)[0]
    tail = integrate.quad(m, s_R + 200, np.inf, epsabs=1e-14)[0]
    assert abs(core + tail - 1) < 1e-10
    assert m.tail_mass(s_R + 200) == pytest.approx(tail, rel=1e-8)


def test_density_support():
    m = BreitWigner(5.0)
    assert omega_bw(-1e-12, m) == 0.0
    assert omega_bw(0.0, m) > 0
    assert omega_bw(np.array([-1.0, 5.0]), m).shape == (2,)


def test_initial_value_exact():
    for s_R in (0.5, 10.0, 1000.0):
        m = BreitWigner(s_R)
        assert complex(m.amplitude(0.0)) == 1.0
        assert complex(m.zeta(0.0)) == 1.0
    raw = BreitWigner(10.0, normalized=False)
    assert complex(raw.amplitude(0.0)).real == pytest.approx(1 / bw_normalization(10.0), rel=1e-15)


def test_continuity_at_origin():
    m = BreitWigner(10.0)
    a = m.amplitude(np.array([1e-12, 1e-9, 1e-6]))
    assert np.all(np.abs(a - 1) < 1e-4)
    assert abs(a[0] - 1) < 1e-9


@settings(max_examples=60, deadline=None)
@given(s_R=st.floats(0.5, 1000.0), x=st.floats(0.01, 60.0))
def test_modulus_bounded(s_R, x):
    assert abs(complex(BreitWigner(s_R).amplitude(x))) <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(s_R=st.floats(1.0, 1000.0), x=st.floats(0.01, 30.0))
def test_zeta_times_canonical(s_R, x):
    m = BreitWigner(s_R)
    a = complex(m.amplitude(x))
    prod = complex(m.zeta(x)) * canonical_amplitude(x, s_R)
    assert abs(prod - a) <= 1e-11 * max(abs(a), 1e-8) + 1e-15


@pytest.mark.parametrize("s_R,x", [(10.0, 0.3), (10.0, 7.0), (100.0, 2.5), (3.0, 40.0)])
def test_dzeta_matches_finite_difference(s_R, x):
    m = BreitWigner(s_R)
    h = min(1e-5 * x, 1e-3 / s_R)
    fd = (complex(m.zeta(x + h)) - complex(m.zeta(x - h))) / (2 * h)
    assert abs(fd - complex(m.dzeta_dx(x))) < 1e-6 * abs(complex(m.dzeta_dx(x)))


@pytest.mark.parametrize("s_R,x", [(10.0, 0.3), (10.0, 7.0), (100.0, 2.5)])
def test_amplitude_derivative(s_R, x):
    m = BreitWigner(s_R)
    h = min(1e-6 * x, 1e-4 / s_R)
    fd = (complex(m.amplitude(x + h)) - complex(m.amplitude(x - h))) / (2 * h)
    assert abs(fd - complex(m.amplitude_derivative(x))) < 1e-6 * abs(fd)


def test_dzeta_at_origin_is_domain_error():
    with pytest.raises(DomainError):
        BreitWigner(10.0).dzeta_dx(0.0)


def test_zeta_overflow_is_reported():
    m = BreitWigner(10.0)
    assert np.isfinite(complex(m.zeta(1000.0)))
    with pytest.raises(RangeExceeded):
        m.zeta(3000.0)


def test_late_amplitude_stays_finite():
    # exp(-x/2) underflows long before the algebraic tail does
    a = complex(BreitWigner(10.0).amplitude(1e5))
    assert a != 0 and math.isfinite(abs(a))


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_invalid_s_r(bad):
    with pytest.raises(DomainError):
        BreitWigner(bad)


def test_negative_x_rejected():
    with pytest.raises(DomainError):
        amplitude_closed_form(-1.0, BreitWigner(10.0))


def test_general_density_reduces_to_bw():
    g = GeneralDensity(alpha=0.0, l=0, pole=complex(10.0, -0.5))
    m = BreitWigner(10.0)
    E = np.array([0.0, 0.5, 9.5, 10.0, 37.0])
    assert np.allclose(g(E[1:]), m(E[1:]), rtol=1e-8, atol=0)
    assert g.N == pytest.approx(m.N, rel=1e-8)


def test_general_density_threshold_power():
    g = GeneralDensity(alpha=0.5, l=1, pole=complex(5.0, -0.5), form_factor=lambda e: np.exp(-e / 20.0))
    e = np.array([1e-6, 2e-6])
    ratio = g(e[1]) / g(e[0])
    assert ratio == pytest.approx(2**1.5, rel=1e-4)
    assert g(0.0) == 0.0


def test_general_density_not_normalizable():
    with pytest.raises(DomainError):
        GeneralDensity(alpha=0.5, l=0)
    # E^1.5 times a Lorentzian decays only like E^-0.5
    with pytest.raises(DomainError):
        GeneralDensity(alpha=0.5, l=1, pole=complex(5.0, -0.5))


def test_general_density_bad_parameters():
    with pytest.raises(DomainError):
        GeneralDensity(alpha=1.0, pole=complex(5, -0.5))
    with pytest.raises(DomainError):
        GeneralDensity(l=-1, pole=complex(5, -0.5))
    with pytest.raises(DomainError):
        GeneralDensity(pole=complex(5, 0.5))


def test_mixture_weights_renormalized():
    mix = MixtureDensity([BreitWigner(10.0), BreitWigner(20.0)], [2.0, 6.0])
    assert mix.weights == (0.25, 0.75)
    with pytest.raises(DomainError):
        MixtureDensity([BreitWigner(10.0)], [0.0])

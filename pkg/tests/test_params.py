import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swellfront.errors import ParameterError
from swellfront.params import PhysicalParams, SwellingLaw, nondimensionalize, to_physical

# hand arithmetic on the calibration inputs
BI_REF = 0.564 * 10.0 / 3.66e-4  # 15409.836...
A0_REF = (10.0 / 3.66e-4) * 0.1 * 500.0  # 1366120.2...


def test_calibration_groups():
    d = nondimensionalize(PhysicalParams())
    assert d.Bi == pytest.approx(1.5410e4, rel=1e-4)
    assert d.A0 == pytest.approx(1.3661e6, rel=1e-4)
    assert d.Bi == pytest.approx(BI_REF, rel=1e-15)
    assert d.A0 == pytest.approx(A0_REF, rel=1e-15)


def test_scaled_initial_front_and_horizon():
    d = nondimensionalize(PhysicalParams())
    assert d.h0 == pytest.approx(1.0e-3, rel=1e-15)
    assert d.T_star == pytest.approx(1.464e-4, rel=1e-14)
    assert d.ell_star == 2.0
    assert d.u0 == pytest.approx(1.0)


def test_no_inflow_gives_zero_biot():
    assert nondimensionalize(PhysicalParams(beta=0.0)).Bi == 0.0


@pytest.mark.parametrize(
    "field, value",
    [("D", 0.0), ("D", -1.0), ("x_ref", 0.0), ("m_ref", 0.0), ("a0", 0.0), ("H", 0.0),
     ("beta", -0.1), ("s0", 0.0), ("s0", 25.0), ("sigma_coeff", 0.0), ("sigma_coeff", -10.0)],
)
def test_invalid_inputs_rejected(field, value):
    with pytest.raises(ParameterError):
        PhysicalParams(**{field: value})


def test_initial_front_must_scale_below_one():
    with pytest.raises(ParameterError):
        nondimensionalize(PhysicalParams(s0=15.0, ell=30.0))


def test_swelling_law():
    law = SwellingLaw(10.0)
    assert law(0.0) == 0.0
    assert law(2.0) == pytest.approx(0.2)
    off = SwellingLaw(math.inf)
    assert off(5.0) == 0.0
    d = nondimensionalize(PhysicalParams(sigma_coeff=math.inf))
    assert d.sigma_slope == 0.0
    assert d.equilibrium()[1] == math.inf


@given(st.floats(0.0, 1e3), st.floats(0.0, 1e3), st.floats(1e-3, 1e3))
def test_swelling_law_monotone(s1, s2, c):
    law = SwellingLaw(c)
    lo, hi = sorted((s1, s2))
    assert law(lo) <= law(hi)


@given(st.floats(0.0, 10.0))
def test_sigma_star_is_ten_h_for_calibration(h):
    d = nondimensionalize(PhysicalParams())
    assert d.sigma_star(h) == 10.0 * h


def test_reservoir_series():
    p = PhysicalParams(b=[(0.0, 1.0), (100.0, 2.0)])
    d = nondimensionalize(p)
    assert d.b_star(0.0) == pytest.approx(10.0)
    tau_mid = 50.0 / p.t_ref
    assert d.b_star(tau_mid) == pytest.approx(15.0)
    assert d.b_star(1.0) == pytest.approx(20.0)
    with pytest.raises(ParameterError):
        PhysicalParams(b=[(0.0, 1.0), (0.0, 2.0)])


def test_to_physical_examples():
    p = PhysicalParams()
    d = nondimensionalize(p)
    snap = to_physical(0.0, np.ones(5), d.h0, p)
    assert snap.t == 0.0
    assert snap.s == pytest.approx(p.s0, rel=1e-15)
    np.testing.assert_allclose(snap.m, 0.1)
    assert to_physical(0.0, np.ones(3), 0.2, p).s == pytest.approx(2.0)
    with pytest.raises(ValueError):
        to_physical(0.0, np.ones(3), 0.0, p)


def test_profile_interpolation():
    p = PhysicalParams()
    snap = to_physical(1e-4, np.array([4.0, 2.0, 0.0]), 0.1, p)
    assert snap.profile(0.5) == pytest.approx(0.2)
    with pytest.raises(ValueError):
        snap.profile(1.5)


@settings(max_examples=200)
@given(st.floats(1e-3, 1e3), st.floats(1e-6, 1e-1), st.floats(0.0, 10.0), st.floats(1.0, 1e4))
def test_round_trip_of_initial_data(x_ref, m_ref, m0, s0_frac):
    s0 = x_ref * min(s0_frac / 1e4, 0.999)
    p = PhysicalParams(x_ref=x_ref, m_ref=m_ref, m0=m0, s0=s0, ell=max(20.0, 2 * s0))
    d = nondimensionalize(p)
    snap = to_physical(0.0, np.full(4, d.u0), d.h0, p)
    assert snap.t == 0.0
    assert snap.s == pytest.approx(s0, rel=1e-15)
    np.testing.assert_allclose(snap.m, m0, rtol=1e-15)


@settings(max_examples=200)
@given(st.floats(1e-3, 1e3))
def test_time_unit_rescaling_invariance(kappa):
    base = PhysicalParams()
    p = PhysicalParams(D=kappa * base.D, beta=kappa * base.beta, a0=kappa * base.a0, T=base.T / kappa)
    d0, d1 = nondimensionalize(base), nondimensionalize(p)
    assert d1.Bi == pytest.approx(d0.Bi, rel=1e-13)
    assert d1.A0 == pytest.approx(d0.A0, rel=1e-13)
    assert d1.T_star == pytest.approx(d0.T_star, rel=1e-13)

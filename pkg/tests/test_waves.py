import math

import numpy as np
import pytest
from scipy.integrate import quad

from rarelab.errors import DomainError, OrderingError
from rarelab.waves import (PressureLaw, centered_fan, char_speeds, complete_end_states, fan_state,
                           riemann_invariants, solve_fan_newton)


@pytest.mark.parametrize("gamma", [1.0, 1.4, 5.0 / 3.0, 3.0])
def test_invariant_integral_matches_quadrature(gamma):
    law = PressureLaw(gamma)
    for rho in (0.3, 1.0, 2.5, 7.0):
        ref, _ = quad(lambda s: math.sqrt(gamma * s ** (gamma - 1.0)) / s, 1.0, rho,
                      epsabs=1e-13, epsrel=1e-13)
        assert law.invariant_integral(rho) == pytest.approx(ref, rel=1e-10, abs=1e-12)


def test_char_speeds_and_invariants():
    law = PressureLaw(1.4)
    l1, l2 = char_speeds(2.0, 0.5, law)
    c = math.sqrt(1.4 * 2.0 ** 0.4)
    assert (l1, l2) == pytest.approx((0.5 - c, 0.5 + c), rel=1e-15)
    z1, z2 = riemann_invariants(2.0, 0.5, law)
    assert z1 - z2 == pytest.approx(2 * law.invariant_integral(2.0), rel=1e-15)


@pytest.mark.parametrize("gamma", [1.0, 1.4, 2.0])
def test_end_states_share_z2_and_order_speeds(gamma):
    law = PressureLaw(gamma)
    st = complete_end_states(1.0, -0.3, 2.5, law)
    assert st.z2_plus == pytest.approx(st.z2_minus, abs=1e-14)
    assert st.lambda2_minus < st.lambda2_plus
    assert st.u1_plus > st.u1_minus


def test_bad_end_states():
    law = PressureLaw(1.4)
    with pytest.raises(OrderingError):
        complete_end_states(2.0, 0.0, 1.0, law)
    with pytest.raises(DomainError):
        complete_end_states(0.0, 0.0, 1.0, law)
    with pytest.raises(DomainError):
        PressureLaw(0.5)


@pytest.mark.parametrize("gamma", [1.0, 1.4, 3.0])
def test_fan_matches_newton_and_is_monotone(gamma):
    st = complete_end_states(1.0, 0.2, 3.0, PressureLaw(gamma))
    xi = np.linspace(st.lambda2_minus, st.lambda2_plus, 41)
    rho, u = fan_state(xi, st)
    for x, r in zip(xi, rho):
        r_newton, _ = solve_fan_newton(x, st)
        assert r == pytest.approx(r_newton, rel=1e-12)
    assert np.all(np.diff(rho) > 0) and np.all(np.diff(u) > 0)
    # u is affine in lambda_2 with slope 2/(gamma+1)
    assert np.allclose(np.diff(u) / np.diff(xi), 2.0 / (gamma + 1.0), rtol=1e-10)


def test_centered_fan_end_states_and_self_similarity():
    st = complete_end_states(1.0, 0.0, 2.0, PressureLaw(1.4))
    x = np.array([-100.0, st.lambda2_minus * 3.0, st.lambda2_plus * 3.0, 100.0])
    f = centered_fan(x, 3.0, st)
    assert f.rho[0] == st.rho_minus and f.rho[-1] == st.rho_plus
    assert f.u1[0] == st.u1_minus and f.u1[-1] == st.u1_plus
    assert f.rho[1] == pytest.approx(st.rho_minus, rel=1e-15)
    g = centered_fan(2 * x, 6.0, st)
    assert np.array_equal(f.rho, g.rho)
    with pytest.raises(DomainError):
        centered_fan(x, 0.0, st)

"""Exact hyperbolic objects of the 1-d isentropic Euler system.

Pressure law p(rho) = rho**gamma, characteristic speeds, Riemann invariants,
completion of 2-rarefaction end states and the centered fan.  Everything here
is closed form; gamma == 1 is its own logarithmic branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, OrderingError

DENSITY_FLOOR = 1e-12


def _check_density(rho):
    rho = np.asarray(rho, dtype=float)
    if not np.all(rho > DENSITY_FLOOR):
        raise DomainError(f"density must exceed {DENSITY_FLOOR:g}, got min {np.min(rho)!r}")
    return rho


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class PressureLaw:
    """Barotropic closure p(rho) = rho**gamma with gamma >= 1."""

    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma >= 1.0:
            raise DomainError(f"gamma must be >= 1, got {self.gamma}")

    @property
    def isothermal(self) -> bool:
        return self.gamma == 1.0

    def p(self, rho):
        return np.power(rho, self.gamma)

    def dp(self, rho):
        return self.gamma * np.power(rho, self.gamma - 1.0)

    def d2p(self, rho):
        return self.gamma * (self.gamma - 1.0) * np.power(rho, self.gamma - 2.0)

    def sound_speed(self, rho):
        return math.sqrt(self.gamma) * np.power(rho, 0.5 * (self.gamma - 1.0))

    def invariant_integral(self, rho):
        """A(rho) = int_1^rho sqrt(p'(s))/s ds in closed form."""
        rho = _check_density(rho)
        if self.isothermal:
            return _scalar(np.log(rho))
        g = self.gamma
        return _scalar(2.0 * math.sqrt(g) / (g - 1.0) * np.expm1(0.5 * (g - 1.0) * np.log(rho)))

    def invariant_difference(self, rho_a, rho_b):
        """A(rho_b) - A(rho_a) without cancellation when rho_b is close to rho_a."""
        rho_a = _check_density(rho_a)
        rho_b = _check_density(rho_b)
        if self.isothermal:
            return _scalar(np.log(rho_b / rho_a))
        g = self.gamma
        k = 2.0 * math.sqrt(g) / (g - 1.0)
        return _scalar(k * np.power(rho_a, 0.5 * (g - 1.0)) * np.expm1(0.5 * (g - 1.0) * np.log(rho_b / rho_a)))

    # lambda_2 - Z_2 = c(rho) + A(rho) is strictly increasing in rho; these
    # helpers invert it.  For gamma > 1 the map is affine in s = rho**((g-1)/2).
    def speed_sum(self, rho):
        """c(rho) + A(rho)."""
        return self.sound_speed(rho) + self.invariant_integral(rho)

    def invert_speed_sum(self, value):
        """Density rho with c(rho) + A(rho) = value, closed form."""
        value = np.asarray(value, dtype=float)
        g = self.gamma
        if self.isothermal:
            return _scalar(np.exp(value - 1.0))
        sg = math.sqrt(g)
        s = ((g - 1.0) * value + 2.0 * sg) / (sg * (g + 1.0))
        if np.any(s <= 0.0):
            raise DomainError("speed sum below the vacuum value; no admissible density")
        return _scalar(np.power(s, 2.0 / (g - 1.0)))

    def speed_sum_slope(self) -> float:
        """d u / d lambda_2 along a 2-wave (Z_2 fixed): 2/(gamma+1)."""
        return 2.0 / (self.gamma + 1.0)


@dataclass(frozen=True)
class WaveEndStates:
    """Far-field constants of a 2-rarefaction, with derived speeds and invariants."""

    rho_minus: float
    u1_minus: float
    rho_plus: float
    u1_plus: float
    law: PressureLaw

    @property
    def delta(self) -> float:
        return abs(self.rho_plus - self.rho_minus)

    @property
    def lambda2_minus(self) -> float:
        return self.u1_minus + float(self.law.sound_speed(self.rho_minus))

    @property
    def lambda2_plus(self) -> float:
        return self.u1_plus + float(self.law.sound_speed(self.rho_plus))

    @property
    def z2_minus(self) -> float:
        return riemann_invariants(self.rho_minus, self.u1_minus, self.law)[1]

    @property
    def z2_plus(self) -> float:
        return riemann_invariants(self.rho_plus, self.u1_plus, self.law)[1]


@dataclass(frozen=True)
class FanPoint:
    rho: np.ndarray | float
    u1: np.ndarray | float
    xi: np.ndarray | float


def char_speeds(rho, u1, law: PressureLaw):
    """Return (lambda_1, lambda_2) = u1 -/+ sqrt(p'(rho))."""
    rho = _check_density(rho)
    c = law.sound_speed(rho)
    return _scalar(u1 - c), _scalar(u1 + c)


def riemann_invariants(rho, u1, law: PressureLaw):
    """Return (Z_1, Z_2) = u1 +/- A(rho)."""
    a = law.invariant_integral(rho)
    return _scalar(np.add(u1, a)), _scalar(np.subtract(u1, a))


def complete_end_states(rho_minus: float, u1_minus: float, rho_plus: float,
                        law: PressureLaw) -> WaveEndStates:
    """Right velocity making (rho_minus, u1_minus) -> (rho_plus, .) a 2-rarefaction."""
    _check_density(rho_minus)
    if not rho_plus > rho_minus:
        raise OrderingError(f"need rho_minus < rho_plus, got {rho_minus} >= {rho_plus}")
    u1_plus = u1_minus + float(law.invariant_difference(rho_minus, rho_plus))
    return WaveEndStates(float(rho_minus), float(u1_minus), float(rho_plus), u1_plus, law)


def fan_state(lam, states: WaveEndStates):
    """(rho, u1) on the 2-wave curve through the left state with lambda_2 = lam.

    ``lam`` must lie in [lambda2_minus, lambda2_plus]; endpoints map to the
    stored end states exactly.
    """
    lam = np.asarray(lam, dtype=float)
    dm = lam - states.lambda2_minus
    dp = states.lambda2_plus - lam
    rho, u = fan_state_offsets(dm, dp, states)
    return rho, u


def fan_state_offsets(dm, dp, states: WaveEndStates):
    """Fan state from the offsets dm = lam - lambda2^-, dp = lambda2^+ - lam.

    Evaluated relative to the nearer end state so the end states and the
    differences rho - rho_bar are reproduced without cancellation.
    """
    law = states.law
    dm = np.asarray(dm, dtype=float)
    dp = np.asarray(dp, dtype=float)
    rho_gap_m, rho_gap_p = density_offsets(dm, dp, states)
    near_left = dm <= dp
    rho = np.where(near_left, states.rho_minus + rho_gap_m, states.rho_plus - rho_gap_p)
    slope = law.speed_sum_slope()
    u = np.where(near_left, states.u1_minus + slope * dm, states.u1_plus - slope * dp)
    return _scalar(rho), _scalar(u)


def density_offsets(dm, dp, states: WaveEndStates):
    """(rho - rho^-, rho^+ - rho) along the fan, both computed with expm1/log1p."""
    law = states.law
    g = law.gamma
    if law.isothermal:
        gap_m = states.rho_minus * np.expm1(dm)
        gap_p = -states.rho_plus * np.expm1(-dp)
        return gap_m, gap_p
    sg = math.sqrt(g)
    k = (g - 1.0) / (sg * (g + 1.0))
    beta = 2.0 / (g - 1.0)
    s_m = states.rho_minus ** (0.5 * (g - 1.0))
    s_p = states.rho_plus ** (0.5 * (g - 1.0))
    gap_m = states.rho_minus * np.expm1(beta * np.log1p(k * dm / s_m))
    gap_p = -states.rho_plus * np.expm1(beta * np.log1p(-k * dp / s_p))
    return gap_m, gap_p


def centered_fan(x1, t, states: WaveEndStates) -> FanPoint:
    """Self-similar 2-rarefaction (rho^r, u1^r)(x1, t)."""
    if not t > 0:
        raise DomainError("the centered fan is singular at t <= 0")
    xi = np.asarray(x1, dtype=float) / t
    lo, hi = states.lambda2_minus, states.lambda2_plus
    dm = np.clip(xi - lo, 0.0, hi - lo)
    dp = np.clip(hi - xi, 0.0, hi - lo)
    rho, u = fan_state_offsets(dm, dp, states)
    return FanPoint(rho=rho, u1=u, xi=_scalar(xi))


def solve_fan_newton(xi, states: WaveEndStates, tol=1e-14, max_iter=100):
    """Guarded Newton solve of lambda_2(rho, Z2^- + A(rho)) = xi for scalar xi.

    Independent of the closed-form inversion; kept as a cross-check only.
    """
    law = states.law
    lo, hi = states.lambda2_minus, states.lambda2_plus
    xi = min(max(float(xi), lo), hi)
    z2 = states.z2_minus
    a, b = states.rho_minus, states.rho_plus

    def f(r):
        return z2 + float(law.invariant_integral(r)) + float(law.sound_speed(r)) - xi

    def df(r):
        c = float(law.sound_speed(r))
        return c / r + 0.5 * (law.gamma - 1.0) * c / r

    r = 0.5 * (a + b)
    res = f(r)
    for _ in range(max_iter):
        if res > 0:
            b = r
        else:
            a = r
        step = res / df(r)
        r_new = r - step
        if not a < r_new < b:
            r_new = 0.5 * (a + b)
        r = r_new
        res = f(r)
        if abs(res) <= tol * max(1.0, abs(xi)):
            return r, z2 + float(law.invariant_integral(r))
        if b - a <= 4 * np.finfo(float).eps * b:
            return r, z2 + float(law.invariant_integral(r))
    raise ConvergenceError("fan Newton did not converge", abs(res))

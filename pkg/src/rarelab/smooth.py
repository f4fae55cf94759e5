"""Smooth 2-rarefaction built from the Burgers solution with tanh data.

omega(x1, t) solves w_t + w w_x = 0 with w(x, 0) = a + b tanh(x), where
a, b are the midpoint and half-width of [lambda2^-, lambda2^+].  Mapping
omega back through lambda_2 = omega, Z_2 = Z_2^- gives (rho_r, u1_r), and
the normalized profiles sigma, eta.  Derivatives come from differentiating
the characteristic map x1 = x0 + w0(x0) t, never from finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit, log_expit

from .errors import ConvergenceError, DomainError
from .fnorms import DecaySeries, fit_rate, gauss_kronrod
from .waves import PressureLaw, WaveEndStates, complete_end_states, density_offsets


@dataclass(frozen=True)
class SmoothWaveParams:
    states: WaveEndStates
    newton_tol: float = 1e-10
    newton_max_iter: int = 200

    def __post_init__(self):
        if not 0 < self.newton_tol <= 1e-8:
            raise DomainError("newton_tol must lie in (0, 1e-8]")
        if not self.states.lambda2_minus < self.states.lambda2_plus:
            raise DomainError("need lambda2^- < lambda2^+")

    @classmethod
    def from_densities(cls, rho_minus, rho_plus, u1_minus=0.0, gamma=1.4, **kw):
        law = PressureLaw(gamma)
        return cls(complete_end_states(rho_minus, u1_minus, rho_plus, law), **kw)

    @property
    def law(self) -> PressureLaw:
        return self.states.law

    @property
    def mid(self) -> float:
        return 0.5 * (self.states.lambda2_minus + self.states.lambda2_plus)

    @property
    def half(self) -> float:
        return 0.5 * (self.states.lambda2_plus - self.states.lambda2_minus)

    def with_delta(self, delta: float) -> "SmoothWaveParams":
        s = self.states
        st = complete_end_states(s.rho_minus, s.u1_minus, s.rho_minus + delta, s.law)
        return SmoothWaveParams(st, self.newton_tol, self.newton_max_iter)


@dataclass
class SmoothWaveSample:
    omega: np.ndarray
    rho_r: np.ndarray
    u1_r: np.ndarray
    sigma: np.ndarray
    eta: np.ndarray


def _foot(x1, t, params: SmoothWaveParams):
    """Foot x0 of the characteristic through (x1, t): x1 = x0 + w0(x0) t."""
    x1 = np.asarray(x1, dtype=float)
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return x1.copy()
    a, b = params.mid, params.half
    s = params.states
    lo = x1 - s.lambda2_plus * t
    hi = x1 - s.lambda2_minus * t
    x0 = np.clip(x1 - a * t, lo, hi)
    scale = 1.0 + np.abs(x1)
    w1 = w2 = np.full(x1.shape, np.inf)
    for _ in range(params.newton_max_iter):
        th = np.tanh(x0)
        F = x0 + (a + b * th) * t - x1
        lo = np.where(F < 0, x0, lo)
        hi = np.where(F > 0, x0, hi)
        width = hi - lo
        dF = 1.0 + b * t * (1.0 - th * th)
        x_new = x0 - F / dF
        # bisect when Newton leaves the bracket or the bracket has not
        # halved over the last two iterations (Newton cycling across the
        # inflection of tanh)
        bad = (x_new <= lo) | (x_new >= hi) | (width > 0.5 * w2)
        bad &= F != 0
        w2, w1 = w1, width
        x_new = np.where(bad, 0.5 * (lo + hi), x_new)
        step = np.abs(x_new - x0)
        x0 = x_new
        if np.all(step <= 4e-16 * (1.0 + np.abs(x0))):
            break
    F = x0 + (a + b * np.tanh(x0)) * t - x1
    worst = float(np.max(np.abs(F) / scale)) if F.size else 0.0
    if worst > params.newton_tol:
        raise ConvergenceError("characteristic foot solve exceeded the iteration cap", worst)
    return x0


def _omega_offsets(x0, params):
    """(omega - lambda2^-, lambda2^+ - omega) at foot x0, free of cancellation."""
    b = params.half
    return 2.0 * b * expit(2.0 * x0), 2.0 * b * expit(-2.0 * x0)


def burgers_smooth(x1, t, params: SmoothWaveParams):
    """omega(x1, t), the smooth solution of Burgers' equation with tanh data."""
    x0 = _foot(x1, t, params)
    dm, dp = _omega_offsets(x0, params)
    s = params.states
    w = np.where(dm <= dp, s.lambda2_minus + dm, s.lambda2_plus - dp)
    return float(w) if np.ndim(w) == 0 else w


def sample_smooth_wave(x1, t, params: SmoothWaveParams) -> SmoothWaveSample:
    """(omega, rho_r, u1_r, sigma, eta) at (x1, t)."""
    x0 = _foot(x1, t, params)
    s = params.states
    dm, dp = _omega_offsets(x0, params)
    near_left = dm <= dp
    omega = np.where(near_left, s.lambda2_minus + dm, s.lambda2_plus - dp)
    gap_m, gap_p = density_offsets(dm, dp, s)
    rho = np.where(near_left, s.rho_minus + gap_m, s.rho_plus - gap_p)
    slope = s.law.speed_sum_slope()
    u = np.where(near_left, s.u1_minus + slope * dm, s.u1_plus - slope * dp)
    drho = s.rho_plus - s.rho_minus
    du = s.u1_plus - s.u1_minus
    sigma = np.where(near_left, gap_m / drho, 1.0 - gap_p / drho)
    eta = np.where(near_left, slope * dm / du, 1.0 - slope * dp / du)
    return SmoothWaveSample(omega, rho, u, sigma, eta)


# -- derivatives through the characteristic map --------------------------------

def _omega_derivatives(x0, t, params):
    """Derivatives of omega keyed by (n_t, n_x), total order <= 3."""
    b = params.half
    th = np.tanh(x0)
    sech2 = 4.0 * expit(2.0 * x0) * expit(-2.0 * x0)
    g = b * sech2
    g1 = -2.0 * b * sech2 * th
    g2 = -2.0 * b * sech2 * (sech2 - 2.0 * th * th)
    J = 1.0 + g * t
    dm, dp = _omega_offsets(x0, params)
    s = params.states
    w = np.where(dm <= dp, s.lambda2_minus + dm, s.lambda2_plus - dp)
    wx = g / J
    wxx = g1 / J ** 3
    wxxx = g2 / J ** 4 - 3.0 * t * g1 * g1 / J ** 5
    wt = -w * wx
    wtx = -(wx * wx + w * wxx)
    wtxx = -(3.0 * wx * wxx + w * wxxx)
    wtt = -(wt * wx + w * wtx)
    wttx = -(wtx * wx + wt * wxx + wx * wtx + w * wtxx)
    wttt = -(wtt * wx + 2.0 * wt * wtx + w * wttx)
    return {
        (0, 0): w, (0, 1): wx, (1, 0): wt,
        (0, 2): wxx, (1, 1): wtx, (2, 0): wtt,
        (0, 3): wxxx, (1, 2): wtxx, (2, 1): wttx, (3, 0): wttt,
    }


def _density_map_derivatives(rho, law: PressureLaw):
    """F', F'', F''' of rho = F(omega) along the wave curve, expressed via rho."""
    g = law.gamma
    if law.isothermal:
        return rho, rho, rho
    k = (g - 1.0) / (math.sqrt(g) * (g + 1.0))
    beta = 2.0 / (g - 1.0)
    s = np.power(rho, 0.5 * (g - 1.0))
    f1 = beta * k * np.power(s, beta - 1.0)
    f2 = beta * (beta - 1.0) * k ** 2 * np.power(s, beta - 2.0)
    f3 = beta * (beta - 1.0) * (beta - 2.0) * k ** 3 * np.power(s, beta - 3.0)
    return f1, f2, f3


_KEYS = [(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (0, 3), (1, 2), (2, 1), (3, 0)]


def _split(key):
    """Expand (n_t, n_x) into an ordered tuple of single-variable labels."""
    return ("t",) * key[0] + ("x",) * key[1]


def _key(labels):
    return (labels.count("t"), labels.count("x"))


def wave_derivatives(x1, t, params: SmoothWaveParams, order: int = 3):
    """Derivatives of (rho_r, u1_r) up to total (t, x1) order ``order``.

    Returns ``{"omega": {...}, "rho": {...}, "u1": {...}}`` keyed by
    (n_t, n_x); the (0, 0) entries hold the values.
    """
    if order not in (1, 2, 3):
        raise DomainError("order must be 1, 2 or 3")
    x0 = _foot(x1, t, params)
    w = _omega_derivatives(x0, t, params)
    smp = sample_smooth_wave(x1, t, params)
    f1, f2, f3 = _density_map_derivatives(smp.rho_r, params.law)
    g1 = params.law.speed_sum_slope()
    rho = {(0, 0): smp.rho_r}
    u = {(0, 0): smp.u1_r}
    om = {(0, 0): w[(0, 0)]}
    for key in _KEYS:
        n = key[0] + key[1]
        if n > order:
            continue
        om[key] = w[key]
        u[key] = g1 * w[key]
        lab = _split(key)
        if n == 1:
            rho[key] = f1 * w[key]
        elif n == 2:
            a, b = _key(lab[:1]), _key(lab[1:])
            rho[key] = f2 * w[a] * w[b] + f1 * w[key]
        else:
            a, b, c = (_key(lab[i:i + 1]) for i in range(3))
            ab, ac, bc = _key(lab[:2]), _key(lab[0:1] + lab[2:3]), _key(lab[1:3])
            rho[key] = (f3 * w[a] * w[b] * w[c]
                        + f2 * (w[ab] * w[c] + w[ac] * w[b] + w[bc] * w[a])
                        + f1 * w[key])
    return {"omega": om, "rho": rho, "u1": u}


def log_gradients(x1, t, params: SmoothWaveParams):
    """(log d1 rho_r, log d1 u1_r), evaluated without underflow.

    Far in the tails d1 omega = b sech^2(x0) / (1 + b sech^2(x0) t) drops
    below the smallest double; in log form it stays finite, so finiteness
    of both outputs is a floating-point-safe proof of strict monotonicity.
    """
    if t < 0:
        raise DomainError("t must be >= 0")
    x0 = _foot(x1, t, params)
    b = params.half
    log_sech2 = math.log(4.0) + log_expit(2.0 * x0) + log_expit(-2.0 * x0)
    log_wx = math.log(b) + log_sech2 - np.log1p(b * t * np.exp(log_sech2))
    rho = sample_smooth_wave(x1, t, params).rho_r
    f1 = _density_map_derivatives(rho, params.law)[0]
    return np.log(f1) + log_wx, math.log(params.law.speed_sum_slope()) + log_wx


def euler_residuals(x1, t, params: SmoothWaveParams):
    """Pointwise residuals of the 1-d isentropic Euler system (primitive form)."""
    dv = wave_derivatives(x1, t, params, order=1)
    r, u = dv["rho"], dv["u1"]
    law = params.law
    mass = r[(1, 0)] + u[(0, 0)] * r[(0, 1)] + r[(0, 0)] * u[(0, 1)]
    mom = r[(0, 0)] * (u[(1, 0)] + u[(0, 0)] * u[(0, 1)]) + law.dp(r[(0, 0)]) * r[(0, 1)]
    return mass, mom


def burgers_residual(x1, t, params: SmoothWaveParams):
    dv = wave_derivatives(x1, t, params, order=1)["omega"]
    return dv[(1, 0)] + dv[(0, 0)] * dv[(0, 1)]


# -- decay reports -----------------------------------------------------------

def support_window(t, params: SmoothWaveParams, margin: float = 40.0):
    s = params.states
    X = max(abs(s.lambda2_minus), abs(s.lambda2_plus)) * t + margin
    return -X, X


def _fan_breaks(t, params):
    s = params.states
    return (s.lambda2_minus * t, params.mid * t, s.lambda2_plus * t)


def _sup(fn, t, params, n_dense=20001):
    lo, hi = support_window(t, params)
    xs = np.linspace(lo, hi, n_dense)
    vals = fn(xs)
    i = int(np.argmax(vals))
    a, c = xs[max(i - 1, 0)], xs[min(i + 1, n_dense - 1)]
    if a == xs[i] or c == xs[i]:
        return float(vals[i])
    res = minimize_scalar(lambda z: -float(fn(np.array([z]))[0]), bracket=(a, xs[i], c),
                          method="golden", tol=1e-10)
    return max(float(vals[i]), -float(res.fun))


def lp_on_line(fn, p, t, params, rtol=1e-11):
    """||fn(., t)||_{L^p(R)} over the saturation window [-X(t), X(t)]."""
    if p == math.inf:
        return _sup(lambda xs: np.abs(fn(xs)), t, params)
    lo, hi = support_window(t, params)
    val, _err = gauss_kronrod(lambda xs: np.abs(fn(xs)) ** p, lo, hi,
                              points=_fan_breaks(t, params), rtol=rtol)
    return val ** (1.0 / p)


def gradient_norm(p, t, params: SmoothWaveParams) -> float:
    """||d1 rho_r||_p + ||d1 u1_r||_p at time t."""
    def drho(xs):
        return wave_derivatives(xs, t, params, 1)["rho"][(0, 1)]

    def du(xs):
        return wave_derivatives(xs, t, params, 1)["u1"][(0, 1)]

    return lp_on_line(drho, p, t, params) + lp_on_line(du, p, t, params)


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.size < 10 or np.any(np.diff(times) <= 0):
        raise DomainError("need >= 10 strictly increasing sample times")
    pos = times[times > 0]
    if pos.size == 0 or pos[-1] / pos[0] < 100.0 * (1 - 1e-12):
        raise DomainError("sample times must span at least two decades")
    return times


def wave_decay_report(p, times, params: SmoothWaveParams, t_fit_min: float = 10.0) -> DecaySeries:
    """Fit ||d1 (rho_r, u1_r)||_{L^p} ~ (1+t)^beta over t >= t_fit_min."""
    times = _check_times(times)
    vals = np.array([gradient_norm(p, float(t), params) for t in times])
    ser = DecaySeries(times, vals, "power", label=f"grad_L{p}")
    return fit_rate(ser, t_min=t_fit_min)


def weight_norms(p, t, params: SmoothWaveParams):
    """(||sigma(1-sigma)||_p, ||sigma - eta||_p) at time t."""
    def ss(xs):
        s = sample_smooth_wave(xs, t, params)
        return s.sigma * (1.0 - s.sigma)

    def se(xs):
        s = sample_smooth_wave(xs, t, params)
        return s.sigma - s.eta

    return lp_on_line(ss, p, t, params), lp_on_line(se, p, t, params)


def weight_decay_report(p, times, params: SmoothWaveParams, t_fit_min: float = 10.0):
    """Growth fits of ||sigma(1-sigma)||_p and ||sigma-eta||_p against (1+t)."""
    times = _check_times(times)
    a, b = zip(*(weight_norms(p, float(t), params) for t in times))
    out = {}
    for name, vals in (("sigma_one_minus_sigma", a), ("sigma_minus_eta", b)):
        ser = DecaySeries(times, np.array(vals), "power", label=name)
        out[name] = fit_rate(ser, t_min=t_fit_min)
    return out


def delta_halving_ratio(times, params: SmoothWaveParams, p: float = 1.0) -> float:
    """sup_t ||sigma-eta||_p/(1+t)^(1/p) at delta over the same at delta/2."""
    times = np.asarray(times, dtype=float)
    half = params.with_delta(0.5 * params.states.delta)
    w = (1.0 + times) ** (0.0 if p == math.inf else 1.0 / p)

    def sup(prm):
        return max(weight_norms(p, float(t), prm)[1] / wi for t, wi in zip(times, w))

    return sup(params) / sup(half)

"""Grid norms, the transverse-averaging decomposition on R x T^(d-1), and
rate fitting.

Reductions go through :func:`fixed_sum`, which always reduces a contiguous
float64 copy in C order; numpy's pairwise summation is then a fixed tree for
a given shape, so norms are bit-reproducible run to run.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, FitQualityError
from .grids import StripGrid, derivative, multi_indices

MODELS = ("power", "exponential")


def fixed_sum(a) -> float:
    return float(np.sum(np.ascontiguousarray(a, dtype=float)))


def _weights(grid, trim):
    if isinstance(grid, StripGrid):
        return grid.weights(trim)
    return grid.weights()


def _trim(f, grid, trim, lead=0):
    if isinstance(grid, StripGrid) and trim:
        idx = [slice(None)] * f.ndim
        idx[lead] = slice(trim, f.shape[lead] - trim)
        return f[tuple(idx)]
    return f


def lp_norm(f, p, grid, trim: int = 0, lead: int = 0) -> float:
    """L^p norm of a (possibly vector) field; vector components sum as p-th powers."""
    f = _trim(np.asarray(f, dtype=float), grid, trim, lead)
    if p == math.inf:
        return float(np.max(np.abs(f))) if f.size else 0.0
    w = _weights(grid, trim)
    a = np.abs(f) ** p * w
    return fixed_sum(a) ** (1.0 / p)


def grid_norm(f, k: int, p: float, grid, lead: int = 0, trim: int | None = None) -> float:
    """Discrete W^{k,p} norm with the solver's stencils.

    On a strip, rows within ``k`` cells of x1 = +-L (where the stencils
    reach past the boundary) are excluded; ``trim`` can widen that margin.
    """
    if k < 0 or k > 3:
        raise DomainError("derivative order must be in 0..3")
    f = np.asarray(f, dtype=float)
    strip = isinstance(grid, StripGrid)
    cut = max(k, trim or 0) if strip else 0
    if strip and f.shape[lead] - 2 * cut < 2:
        raise DomainError("field too short for the requested derivative order")
    parts = []
    for order in range(k + 1):
        for alpha in multi_indices(grid.d, order):
            df = derivative(f, alpha, grid.spacing, lead) if order else f
            parts.append(lp_norm(df, p, grid, cut, lead))
    if p == math.inf:
        return max(parts)
    return float(sum(x ** p for x in parts) ** (1.0 / p))


def sobolev_h(f, l: int, grid, lead: int = 0) -> float:
    return grid_norm(f, l, 2.0, grid, lead)


def grad_magnitude(f, m: int, grid):
    """Pointwise Euclidean size of all m-th order partials (ordered tuples)."""
    if m == 0:
        return np.abs(f)
    acc = np.zeros_like(f, dtype=float)
    for alpha in multi_indices(grid.d, m):
        mult = math.factorial(m)
        for c in alpha:
            mult //= math.factorial(c)
        acc += mult * derivative(f, alpha, grid.spacing) ** 2
    return np.sqrt(acc)


# -- decomposition on R x T^(d-1) -------------------------------------------

@dataclass
class GNDecomposition:
    u1_part: np.ndarray
    u2_part: np.ndarray
    u3_part: np.ndarray

    @property
    def parts(self):
        return (self.u1_part, self.u2_part, self.u3_part)

    def reconstruct(self):
        return self.u1_part + self.u2_part + self.u3_part


def gn_decompose(u) -> GNDecomposition:
    """Successive transverse averaging.

    u1 = mean over (x2, x3); u2 = mean over x3 minus u1; u3 = the rest.
    Works for d = 1, 2, 3 (missing transverse axes give zero parts).
    """
    u = np.asarray(u, dtype=float)
    d = u.ndim
    if d == 1:
        return GNDecomposition(u.copy(), np.zeros_like(u), np.zeros_like(u))
    mean_all = u.mean(axis=tuple(range(1, d)), keepdims=True)
    u1 = np.broadcast_to(mean_all, u.shape).copy()
    if d == 2:
        return GNDecomposition(u1, u - u1, np.zeros_like(u))
    mean_3 = u.mean(axis=2, keepdims=True)
    u2 = np.broadcast_to(mean_3, u.shape) - u1
    u3 = u - np.broadcast_to(mean_3, u.shape)
    return GNDecomposition(u1, u2, u3)


@dataclass(frozen=True)
class GNTuple:
    """Exponent data for one G-N type bound: ||grad^j u||_p <= C sum_k ||grad^{m_k} u||_{r_k}^theta_k ||u||_q^(1-theta_k)."""

    name: str
    j: int
    p: float
    q: float
    m: tuple
    r: tuple


def solve_theta(j, m, p, q, r, k) -> float:
    """theta_k from 1/p = j/k + (1/r - m/k) theta + (1/q)(1 - theta)."""
    ip = 0.0 if p == math.inf else 1.0 / p
    iq = 0.0 if q == math.inf else 1.0 / q
    ir = 0.0 if r == math.inf else 1.0 / r
    den = ir - m / k - iq
    if abs(den) < 1e-15:
        raise DomainError(f"exponent relation degenerate for k={k}")
    theta = (ip - j / k - iq) / den
    if not (j / m - 1e-12 <= theta <= 1.0 + 1e-12):
        raise DomainError(f"infeasible exponents: theta_{k} = {theta:.4f} outside [{j/m:.4f}, 1]")
    return min(max(theta, j / m), 1.0)


def _per_k(x):
    return tuple(x) if isinstance(x, (tuple, list)) else (x, x, x)


def gn_inequality_check(u, j, m, p, q, r, grid: StripGrid):
    """Ratio ||grad^j u||_p / sum_k ||grad^{m_k} u||_{r_k}^theta_k ||u||_q^(1-theta_k).

    ``m`` and ``r`` may be scalars or per-k triples (the bounds used in the
    energy estimates mix derivative orders across k).  Returns
    ``(ratio, thetas)``.
    """
    ms, rs = _per_k(m), _per_k(r)
    thetas = tuple(solve_theta(j, ms[k - 1], p, q, rs[k - 1], k) for k in (1, 2, 3))
    top = max(ms)
    trim = top + 1
    lhs = lp_norm(grad_magnitude(u, j, grid), p, grid, trim)
    u_q = lp_norm(u, q, grid, trim)
    rhs = 0.0
    for k in (1, 2, 3):
        gm = lp_norm(grad_magnitude(u, ms[k - 1], grid), rs[k - 1], grid, trim)
        th = thetas[k - 1]
        rhs += gm ** th * u_q ** (1.0 - th)
    if rhs == 0.0:
        return (0.0 if lhs == 0.0 else math.inf), thetas
    return lhs / rhs, thetas


GN_TUPLES = (
    GNTuple("linf", j=0, p=math.inf, q=2.0, m=(1, 1, 2), r=(2.0, 2.0, 2.0)),
    GNTuple("l4", j=0, p=4.0, q=2.0, m=(1, 1, 1), r=(2.0, 2.0, 2.0)),
    GNTuple("l6", j=0, p=6.0, q=2.0, m=(1, 1, 1), r=(2.0, 2.0, 2.0)),
)


def band_limited_corpus(grid: StripGrid, count: int, seed: int, kmax: int = 3):
    """Seeded random smooth fields on the strip, integrable in x1.

    Each field is a sum of Gaussian-envelope x1 profiles times transverse
    Fourier modes with |k| <= kmax, including a purely x1-dependent part.
    """
    rng = np.random.default_rng(seed)
    x = grid.mesh()
    x1 = x[0]
    fields = []
    for _ in range(count):
        u = np.zeros(grid.shape)
        for _term in range(rng.integers(2, 6)):
            c = rng.normal()
            center = rng.uniform(-0.3, 0.3) * grid.L
            width = rng.uniform(0.5, 4.0)
            env = np.exp(-0.5 * ((x1 - center) / width) ** 2)
            env = env * np.cos(rng.uniform(0, 2.0) * x1 + rng.uniform(0, 2 * np.pi))
            phase = np.zeros(grid.shape)
            if grid.d > 1 and rng.random() < 0.75:
                for ax in range(1, grid.d):
                    kk = rng.integers(0, kmax + 1)
                    phase = phase + 2 * np.pi * kk * x[ax]
                trans = np.cos(phase + rng.uniform(0, 2 * np.pi))
            else:
                trans = 1.0
            u += c * env * trans
        fields.append(u)
    return fields


# -- rate fitting -------------------------------------------------------------

@dataclass
class DecaySeries:
    """Time-stamped norm samples and a log-space least-squares fit.

    ``fitted_param`` is the exponent beta of (1+t)^beta for the power model
    and the rate r of e^{-rt} for the exponential model.
    """

    t: np.ndarray
    values: np.ndarray
    model: str
    fitted_param: float = float("nan")
    intercept: float = float("nan")
    residual: float = float("nan")
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.model not in MODELS:
            raise DomainError(f"model must be one of {MODELS}")
        if self.t.shape != self.values.shape:
            raise DomainError("times and values differ in length")
        if self.t.size > 1 and not np.all(np.diff(self.t) > 0):
            raise DomainError("sample times must be strictly increasing")

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.values.tolist()))

    def predict(self, t):
        t = np.asarray(t, dtype=float)
        if self.model == "power":
            return np.exp(self.intercept + self.fitted_param * np.log1p(t))
        return np.exp(self.intercept - self.fitted_param * t)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "norm", "model", "fitted_exponent", "fit_residual"])
        for ti, vi in zip(self.t, self.values):
            w.writerow([repr(float(ti)), repr(float(vi)), self.model,
                        repr(float(self.fitted_param)), repr(float(self.residual))])
        return buf.getvalue()


def fit_rate(series, model: str | None = None, t_min: float | None = None,
             t_max: float | None = None, min_samples: int = 8) -> DecaySeries:
    """Least squares of log(value) against log(1+t) (power) or t (exponential).

    ``series`` is a DecaySeries or a (t, values) pair.  Returns a new
    DecaySeries carrying all samples and the fit over the selected window.
    """
    if isinstance(series, DecaySeries):
        t, v, model = series.t, series.values, model or series.model
        label, meta = series.label, dict(series.meta)
    else:
        t, v = (np.asarray(a, dtype=float) for a in series)
        label, meta = "", {}
    if model not in MODELS:
        raise DomainError(f"model must be one of {MODELS}")
    sel = np.ones(t.shape, dtype=bool)
    if t_min is not None:
        sel &= t >= t_min
    if t_max is not None:
        sel &= t <= t_max
    ts, vs = t[sel], v[sel]
    if ts.size < min_samples:
        raise FitQualityError(f"need >= {min_samples} samples in the fit window, got {ts.size}")
    if not np.all(vs > 0) or not np.all(np.isfinite(vs)):
        raise FitQualityError("rate fitting needs strictly positive finite values")
    x = np.log1p(ts) if model == "power" else ts
    y = np.log(vs)
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, icpt]) - y) ** 2)))
    param = float(slope) if model == "power" else float(-slope)
    meta.update(window=(float(ts[0]), float(ts[-1])), n_fit=int(ts.size))
    return DecaySeries(t, v, model, param, float(icpt), resid, label, meta)


# -- adaptive quadrature ------------------------------------------------------

_GK_X = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_GK_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_GK_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327])
_NODES = np.concatenate([-_GK_X[:-1], _GK_X[::-1]])
_WK = np.concatenate([_GK_WK[:-1], _GK_WK[::-1]])
_WG = np.zeros(15)
_WG[[1, 3, 5, 13, 11, 9]] = np.concatenate([_GK_WG[:3], _GK_WG[:3]])
_WG[7] = _GK_WG[3]


def gauss_kronrod(f, a: float, b: float, points: Sequence[float] = (),
                  rtol: float = 1e-11, atol: float = 1e-14, max_intervals: int = 4000):
    """Adaptive Gauss-Kronrod (7/15) quadrature with a vectorized integrand.

    Every pass evaluates all active intervals in one call of ``f``; the
    interval list is processed in a fixed order so results are reproducible.
    Returns ``(value, error_estimate)``.
    """
    from .errors import ConvergenceError

    brk = sorted({a, b, *[x for x in points if a < x < b]})
    lo = np.array(brk[:-1], dtype=float)
    hi = np.array(brk[1:], dtype=float)
    done_val = 0.0
    done_err = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        xs = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(f(xs.ravel()), dtype=float).reshape(xs.shape)
        kron = half * (fx @ _WK)
        gauss = half * (fx @ _WG)
        err = np.abs(kron - gauss)
        total = done_val + fixed_sum(kron)
        tol_each = max(atol, rtol * abs(total)) * (hi - lo) / (b - a)
        ok = err <= tol_each
        done_val += fixed_sum(kron[ok])
        done_err += fixed_sum(err[ok])
        if np.all(ok):
            return done_val, done_err
        lo, hi, mid = lo[~ok], hi[~ok], mid[~ok]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        if lo.size > max_intervals:
            break
    raise ConvergenceError("adaptive quadrature did not converge", float(np.max(err)))

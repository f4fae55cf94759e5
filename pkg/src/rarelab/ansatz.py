"""Composite ansatz on the strip, its error terms and their R-decomposition.

Every field is carried as a :class:`Jet` (value, time derivative, gradient,
spatial Hessian).  Leaf fields (the periodic states and the smooth wave)
get their derivatives from the centered stencils and centered differences of
three stored time levels; composite fields get theirs from the product and
chain rules.  Discrete derivatives then obey the product rule exactly, so
the direct error terms and the R-decomposition agree to round-off.

The decomposition carries the discrete residual brackets of the periodic
solutions and of the smooth wave explicitly: on a grid they are truncation
sized, not zero.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fnorms import grid_norm
from .grids import StripGrid, TorusGrid, d1, d2, extend_to_strip
from .smooth import SmoothWaveParams, sample_smooth_wave
from .torus import FlowState, ViscousParams, stable_dt, step_torus
from .waves import PressureLaw


# -- jets -----------------------------------------------------------------------

class Jet:
    """Value with first time derivative and first/second spatial derivatives.

    Derivative slots may be python floats (0.0) for fields that do not
    depend on a variable; numpy broadcasting does the rest.
    """

    __slots__ = ("val", "t", "g", "h")

    def __init__(self, val, t, g, h):
        self.val = val
        self.t = t
        self.g = tuple(g)
        self.h = tuple(tuple(r) for r in h)

    @property
    def d(self) -> int:
        return len(self.g)

    @classmethod
    def const(cls, c, d: int) -> "Jet":
        z = (0.0,) * d
        return cls(c, 0.0, z, (z,) * d)

    def _wrap(self, other):
        return other if isinstance(other, Jet) else Jet.const(other, self.d)

    def __add__(self, other):
        o = self._wrap(other)
        d = self.d
        return Jet(self.val + o.val, self.t + o.t,
                   [self.g[i] + o.g[i] for i in range(d)],
                   [[self.h[i][j] + o.h[i][j] for j in range(d)] for i in range(d)])

    __radd__ = __add__

    def __neg__(self):
        d = self.d
        return Jet(-self.val, -self.t, [-x for x in self.g],
                   [[-self.h[i][j] for j in range(d)] for i in range(d)])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            d = self.d
            return Jet(self.val * other, self.t * other, [x * other for x in self.g],
                       [[self.h[i][j] * other for j in range(d)] for i in range(d)])
        a, b, d = self, other, self.d
        g = [a.g[i] * b.val + a.val * b.g[i] for i in range(d)]
        h = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                h[i][j] = (a.h[i][j] * b.val + a.g[i] * b.g[j] + a.g[j] * b.g[i]
                           + a.val * b.h[i][j])
                h[j][i] = h[i][j]
        return Jet(a.val * b.val, a.t * b.val + a.val * b.t, g, h)

    __rmul__ = __mul__

    def compose(self, f0, f1, f2) -> "Jet":
        """Chain rule for F(self) given F, F', F'' evaluated at self.val."""
        d = self.d
        h = [[None] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                h[i][j] = f2 * self.g[i] * self.g[j] + f1 * self.h[i][j]
                h[j][i] = h[i][j]
        return Jet(f0, f1 * self.t, [f1 * x for x in self.g], h)

    def recip(self) -> "Jet":
        v = self.val
        return self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def laplacian(self):
        return sum(self.h[i][i] for i in range(self.d))


def leaf_jet(prev, now, nxt, tau, spacing, axes) -> Jet:
    """Leaf jet: stencil derivatives along ``axes`` (others zero), centered in time."""
    d = len(spacing)
    g = [0.0] * d
    h = [[0.0] * d for _ in range(d)]
    first = {}
    for i in axes:
        first[i] = d1(now, i, spacing[i])
        g[i] = first[i]
    for i in axes:
        for j in axes:
            if j < i:
                continue
            if i == j:
                h[i][i] = d2(now, i, spacing[i])
            else:
                h[i][j] = h[j][i] = d1(first[i], j, spacing[j])
    return Jet(now, (nxt - prev) / (2.0 * tau), g, h)


def vec_dot_grad(a, b):
    """(a . grad) b for jet vectors a, b: returns plain arrays per component."""
    d = len(a)
    return [sum(a[j].val * b[i].g[j] for j in range(d)) for i in range(d)]


def div_val(v):
    """Value of div v for a jet vector."""
    return sum(v[j].g[j] for j in range(len(v)))


def grad_div(v):
    """grad(div v) for a jet vector: component i is sum_j d_i d_j v_j."""
    d = len(v)
    return [sum(v[j].h[i][j] for j in range(d)) for i in range(d)]


# -- periodic histories ----------------------------------------------------------

@dataclass
class Triplet:
    """States at t - tau, t, t + tau."""

    t: float
    tau: float
    prev: FlowState
    now: FlowState
    nxt: FlowState


def _advance(state, target, grid, params, law, cfl):
    while state.t < target - 1e-13 * max(1.0, abs(target)):
        dt = min(stable_dt(state.rho, state.mom, grid.spacing, params, law, cfl), target - state.t)
        state = step_torus(state, params, law, dt, grid.spacing)
    state.t = float(target)
    return state


def torus_triplets(state: FlowState, grid: TorusGrid, params: ViscousParams, law: PressureLaw,
                   times, tau: float, cfl: float = 0.4):
    """Periodic states bracketing each requested time by +-tau."""
    out = []
    for t in times:
        if t - tau < state.t - 1e-13:
            raise DomainError("sample times must be increasing and at least tau past the start")
        a = _advance(state, t - tau, grid, params, law, cfl).copy()
        b = _advance(a.copy(), t, grid, params, law, cfl).copy()
        c = _advance(b.copy(), t + tau, grid, params, law, cfl)
        out.append(Triplet(float(t), tau, a, b, c.copy()))
        state = c
    return out


# -- ansatz ------------------------------------------------------------------------

@dataclass
class AnsatzField:
    rho_tilde: np.ndarray
    u_tilde: np.ndarray
    t: float
    rho_tilde_alt: np.ndarray | None = None  # second algebraic form
    u_tilde_alt: np.ndarray | None = None


def _strip_fields(strip: StripGrid, state: FlowState):
    """Periodic state extended onto the strip: (rho, u) with u shape (d, ...)."""
    rho = extend_to_strip(state.rho, strip)
    u = extend_to_strip(state.mom / state.rho, strip, lead=1)
    return rho, u


def build_ansatz(strip: StripGrid, wave: SmoothWaveParams, minus: FlowState, plus: FlowState,
                 t: float) -> AnsatzField:
    """Blend the periodic states across the smooth wave; both algebraic forms."""
    if abs(minus.t - t) > 1e-12 or abs(plus.t - t) > 1e-12:
        raise DomainError(f"periodic states at t={minus.t}, {plus.t} do not match t={t}")
    st = wave.states
    smp = sample_smooth_wave(strip.x1(), t, wave)
    col = strip.column
    sig, eta = col(smp.sigma), col(smp.eta)
    rm, um = _strip_fields(strip, minus)
    rp, up = _strip_fields(strip, plus)
    rho_t = rm * (1.0 - sig) + rp * sig
    rho_alt = col(smp.rho_r) + (rm - st.rho_minus) * (1.0 - sig) + (rp - st.rho_plus) * sig
    u_t = um * (1.0 - eta) + up * eta
    zm, zp = um.copy(), up.copy()
    zm[0] -= st.u1_minus
    zp[0] -= st.u1_plus
    u_alt = zm * (1.0 - eta) + zp * eta
    u_alt[0] += col(smp.u1_r)
    return AnsatzField(rho_t, u_t, t, rho_alt, u_alt)


@dataclass
class AnsatzJets:
    """Leaf and composite jets of the ansatz at one time level."""

    strip: StripGrid
    wave: SmoothWaveParams
    t: float
    rho_m: Jet
    rho_p: Jet
    u_m: list
    u_p: list
    rho_r: Jet
    u_r: Jet
    sigma: Jet
    eta: Jet
    rho: Jet = None
    u: list = None

    def __post_init__(self):
        self.rho = self.rho_m * (1.0 - self.sigma) + self.rho_p * self.sigma
        self.u = [self.u_m[i] * (1.0 - self.eta) + self.u_p[i] * self.eta for i in range(self.d)]

    @property
    def d(self) -> int:
        return self.strip.d

    @property
    def states(self):
        return self.wave.states

    def z(self, side: str):
        st = self.states
        if side == "-":
            return [self.u_m[0] - st.u1_minus] + list(self.u_m[1:])
        return [self.u_p[0] - st.u1_plus] + list(self.u_p[1:])

    def u_field(self):
        return np.stack([np.broadcast_to(c.val, self.strip.shape) for c in self.u])


def _torus_leaves(tri_state, strip, grid: TorusGrid, tau):
    """Jets of (rho, u components) of a periodic state, derived on the torus."""
    prev, now, nxt = tri_state
    axes = range(grid.d)
    jr = leaf_jet(prev.rho, now.rho, nxt.rho, tau, grid.spacing, axes)
    ju = []
    for i in range(grid.d):
        ju.append(leaf_jet(prev.mom[i] / prev.rho, now.mom[i] / now.rho, nxt.mom[i] / nxt.rho,
                           tau, grid.spacing, axes))

    def ext(j: Jet) -> Jet:
        e = lambda a: extend_to_strip(a, strip) if isinstance(a, np.ndarray) else a
        return Jet(e(j.val), e(j.t), [e(x) for x in j.g], [[e(x) for x in r] for r in j.h])

    return ext(jr), [ext(j) for j in ju]


def _wave_leaves(strip: StripGrid, wave: SmoothWaveParams, t, tau):
    """Jets of rho_r, u1_r, sigma, eta from stencils on an x1 line padded by one node."""
    x = np.concatenate([[strip.x1()[0] - strip.dx1], strip.x1(), [strip.x1()[-1] + strip.dx1]])
    samples = [sample_smooth_wave(x, tt, wave) for tt in (t - tau, t, t + tau)]
    d, h = strip.d, strip.dx1
    col = lambda a: strip.column(a[1:-1])
    st = wave.states

    def line(vals):
        p, n, q = vals
        g = [0.0] * d
        hh = [[0.0] * d for _ in range(d)]
        g[0] = col(d1(n, 0, h))
        hh[0][0] = col(d2(n, 0, h))
        return Jet(col(n), col((q - p) / (2.0 * tau)), g, hh)

    rr = line([s.rho_r for s in samples])
    ur = line([s.u1_r for s in samples])
    # sigma, eta are affine in the leaves; values from the cancellation-free samples
    sg = rr * (1.0 / (st.rho_plus - st.rho_minus))
    sg.val = col(samples[1].sigma)
    et = ur * (1.0 / (st.u1_plus - st.u1_minus))
    et.val = col(samples[1].eta)
    return rr, ur, sg, et


def ansatz_jets(strip: StripGrid, wave: SmoothWaveParams, grid: TorusGrid,
                minus: Triplet, plus: Triplet) -> AnsatzJets:
    if abs(minus.t - plus.t) > 1e-12 or abs(minus.tau - plus.tau) > 1e-15:
        raise DomainError("periodic triplets are not aligned in time")
    if grid.n != strip.n or grid.d != strip.d:
        raise DomainError("torus and strip grids are not compatible")
    t, tau = minus.t, minus.tau
    rm, um = _torus_leaves((minus.prev, minus.now, minus.nxt), strip, grid, tau)
    rp, up = _torus_leaves((plus.prev, plus.now, plus.nxt), strip, grid, tau)
    rr, ur, sg, et = _wave_leaves(strip, wave, t, tau)
    return AnsatzJets(strip, wave, t, rm, rp, um, up, rr, ur, sg, et)


# -- error terms --------------------------------------------------------------------

def _a(law: PressureLaw, u, v):
    """a(u, v) = int_0^1 p''(u + s (v - u)) ds = (p'(v) - p'(u)) / (v - u)."""
    u, v = np.broadcast_arrays(u, v)
    dv = v - u
    same = dv == 0
    safe = np.where(same, 1.0, dv)
    return np.where(same, law.d2p(u), (law.dp(v) - law.dp(u)) / safe)


def _pressure_grad(law, rho: Jet):
    f1 = law.dp(rho.val)
    return [f1 * rho.g[i] for i in range(rho.d)]


def _momentum_primitive(rho: Jet, u: list, law: PressureLaw, visc: ViscousParams):
    """rho d_t u + rho (u . grad) u + grad p(rho) - mu lap u - (mu + lam) grad div u."""
    d = len(u)
    adv = vec_dot_grad(u, u)
    gp = _pressure_grad(law, rho)
    gd = grad_div(u)
    return [rho.val * (u[i].t + adv[i]) + gp[i] - visc.mu * u[i].laplacian()
            - (visc.mu + visc.lam) * gd[i] for i in range(d)]


def _mass_conservative(rho: Jet, u: list):
    return rho.t + sum((rho * u[j]).g[j] for j in range(len(u)))


@dataclass
class ErrorFields:
    t: float
    h0: np.ndarray
    h: np.ndarray  # (d, ...)
    f: np.ndarray
    g: np.ndarray
    h_shift: np.ndarray  # h + (2 mu + lam) d1^2 u1_r e1
    wave_mass: np.ndarray  # smooth-wave brackets: the eps-independent truncation part
    wave_mom: np.ndarray
    rho_tilde: np.ndarray
    u_tilde: np.ndarray


def _full(a, shape):
    return np.broadcast_to(np.asarray(a, dtype=float), shape).copy()


def error_terms(J: AnsatzJets, visc: ViscousParams, law: PressureLaw) -> ErrorFields:
    """h0 and h from their conservative definitions; f and g from h0, h."""
    d, shape = J.d, J.strip.shape
    rho, u = J.rho, J.u
    h0 = _full(_mass_conservative(rho, u), shape)
    mom = [rho * u[i] for i in range(d)]
    gp = _pressure_grad(law, rho)
    gd = grad_div(u)
    h = np.empty((d,) + shape)
    for i in range(d):
        conv = sum((mom[i] * u[j]).g[j] for j in range(d))
        h[i] = mom[i].t + conv + gp[i] - visc.mu * u[i].laplacian() - (visc.mu + visc.lam) * gd[i]
    shift = visc.nu * J.u_r.h[0][0]
    h_shift = h.copy()
    h_shift[0] += shift
    uf = J.u_field()
    f = h0 * uf - h_shift
    visc_u = np.stack([_full(visc.mu * u[i].laplacian() + (visc.mu + visc.lam) * gd[i], shape)
                       for i in range(d)])
    g = (visc_u + h - h0 * uf) / rho.val
    wm, wu = _wave_brackets(J, law)
    return ErrorFields(J.t, h0, h, f, g, h_shift, _full(wm, shape), _full(wu, shape),
                       _full(rho.val, shape), uf)


def _wave_brackets(J: AnsatzJets, law: PressureLaw):
    rr, ur = J.rho_r, J.u_r
    mass = rr.t + (rr * ur).g[0]
    mom = rr.val * (ur.t + ur.val * ur.g[0]) + law.dp(rr.val) * rr.g[0]
    return mass, mom


@dataclass
class Decomposition:
    terms: dict
    brackets: dict
    h0_sum: np.ndarray
    h_sum: np.ndarray


def appendix_decomposition(J: AnsatzJets, visc: ViscousParams, law: PressureLaw) -> Decomposition:
    """Independent assembly of h0 and h from the remainders R1..R10.

    h0 = (1-s) E0- + s E0+ + Er0 + R1 + R2 + R3 and
    h  = (1-s) E- + s E+ + Er e1 + h0 u~ + R4 + ... + R8 - mu R9 - (mu+lam) R10
         - (2 mu + lam) d1^2 u1_r e1,
    where E0+-, E+- are the discrete mass / momentum residuals of the periodic
    states and Er0, Er those of the smooth wave (zero for exact solutions).
    """
    d, shape = J.d, J.strip.shape
    st = J.states
    sg, et = J.sigma, J.eta
    s, e = sg.val, et.val
    rm, rp, rr, ur = J.rho_m, J.rho_p, J.rho_r, J.u_r
    um, up = J.u_m, J.u_p
    zm, zp = J.z("-"), J.z("+")
    rho, u = J.rho, J.u
    vm, vp = rm - st.rho_minus, rp - st.rho_plus
    dz = [zp[i] - zm[i] for i in range(d)]
    dv = vp - vm

    E0m = _mass_conservative(rm, um)
    E0p = _mass_conservative(rp, up)
    Er0, Er = _wave_brackets(J, law)

    R1 = dv.val * sg.t
    R2 = (sum((rm * up[j]).g[j] for j in range(d)) * (1 - s) * e
          + sum((rp * um[j]).g[j] for j in range(d)) * s * (1 - e)
          + (rho.val - rr.val) * ur.g[0] + (u[0].val - ur.val) * rr.g[0]
          + rho.val * dz[0].val * et.g[0] + u[0].val * dv.val * sg.g[0])
    R3 = (-sum((rm * um[j]).g[j] for j in range(d)) * (1 - s) * e
          - sum((rp * up[j]).g[j] for j in range(d)) * s * (1 - e))
    h0_sum = _full((1 - s) * E0m + s * E0p + Er0 + R1 + R2 + R3, shape)

    Em = _momentum_primitive(rm, um, law, visc)
    Ep = _momentum_primitive(rp, up, law, visc)
    ugm, ugp = vec_dot_grad(um, um), vec_dot_grad(up, up)
    rho_u = [rho.val * u[i].val for i in range(d)]
    A_m = [rho_u[i] - rm.val * um[i].val * (1 - s) * (1 - e) for i in range(d)]
    A_p = [rho_u[i] - rp.val * up[i].val * s * e for i in range(d)]
    Am_grad = [sum(A_m[j] * um[i].g[j] for j in range(d)) for i in range(d)]
    Ap_grad = [sum(A_p[j] * up[i].g[j] for j in range(d)) for i in range(d)]
    a_m = _a(law, rm.val, rho.val)
    a_p = _a(law, rp.val, rho.val)
    a_r = _a(law, rr.val, rho.val)
    drho_bar = rp.val - rm.val
    # (z+ - z-)(eta - sigma) and its second derivatives
    w = [dz[i] * (et - sg) for i in range(d)]
    gd_w = grad_div(w)
    s1, s11 = sg.g[0], sg.h[0][0]
    R = {k: [None] * d for k in ("R4", "R5", "R6", "R7", "R8", "R9", "R10")}
    for i in range(d):
        e1 = 1.0 if i == 0 else 0.0
        R["R4"][i] = (rm.val * up[i].t * (1 - s) * e + rp.val * um[i].t * s * (1 - e)
                      + rho.val * dz[i].val * et.t)
        R["R5"][i] = (-rm.val * um[i].t * (1 - s) * e - rp.val * up[i].t * s * (1 - e)
                      + e1 * (rho.val - rr.val) * ur.t)
        R["R6"][i] = (Am_grad[i] * (1 - e) + Ap_grad[i] * e
                      + rho.val * u[0].val * et.g[0] * dz[i].val)
        R["R7"][i] = (rm.val * ugm[i] * (1 - s) * e * (e - 2) + rp.val * ugp[i] * s * (e * e - 1)
                      + e1 * (rho.val * u[0].val - rr.val * ur.val) * ur.g[0])
        R["R8"][i] = (drho_bar * (a_m * rm.g[i] - a_p * rp.g[i]) * s * (1 - s)
                      + e1 * (a_r * (rho.val - rr.val) * rr.g[0]
                              + law.dp(rho.val) * dv.val * s1))
        R["R9"][i] = w[i].laplacian() + dz[i].val * s11 + 2.0 * dz[i].g[0] * s1
        # grad[(z1+ - z1-) d1 sigma]: d1 sigma depends on x1 only
        grad_term = dz[0].g[i] * s1 + (dz[0].val * s11 if i == 0 else 0.0)
        R["R10"][i] = gd_w[i] + grad_term + e1 * (div_val(up) - div_val(um)) * s1
    uf = J.u_field()
    h_sum = np.empty((d,) + shape)
    for i in range(d):
        e1 = 1.0 if i == 0 else 0.0
        acc = (1 - s) * Em[i] + s * Ep[i] + e1 * Er + h0_sum * uf[i]
        acc = acc + R["R4"][i] + R["R5"][i] + R["R6"][i] + R["R7"][i] + R["R8"][i]
        acc = acc - visc.mu * R["R9"][i] - (visc.mu + visc.lam) * R["R10"][i]
        acc = acc - e1 * visc.nu * ur.h[0][0]
        h_sum[i] = _full(acc, shape)
    terms = {"R1": _full(R1, shape), "R2": _full(R2, shape), "R3": _full(R3, shape)}
    for k, comps in R.items():
        terms[k] = np.stack([_full(c, shape) for c in comps])
    brackets = {"E0-": _full(E0m, shape), "E0+": _full(E0p, shape), "Er0": _full(Er0, shape),
                "E-": np.stack([_full(c, shape) for c in Em]),
                "E+": np.stack([_full(c, shape) for c in Ep]),
                "Er": _full(Er, shape)}
    return Decomposition(terms, brackets, h0_sum, h_sum)


# -- error-norm series ------------------------------------------------------------

def remove_wave_truncation(E: ErrorFields):
    """(h0, h_shift, f, g) minus what they reduce to at eps = 0.

    At eps = 0 the ansatz is the smooth wave and the error terms collapse to
    its discrete brackets: h0 = Er0, h_shift = (Er + Er0 u1_r) e1,
    f = -Er e1, g = Er / rho_r e1.  Those parts are truncation error of the
    smooth wave, independent of eps; what remains is proportional to eps.
    """
    h0 = E.h0 - E.wave_mass
    hs = E.h_shift.copy()
    hs[0] -= E.wave_mom + E.wave_mass * E.u_tilde[0]
    f = E.f.copy()
    f[0] += E.wave_mom
    g = E.g.copy()
    g[0] -= E.wave_mom / E.rho_tilde
    return h0, hs, f, g


def error_norms(E: ErrorFields, strip: StripGrid, p: float, remove_wave: bool = True):
    """(||h0||_W2p, ||h_shift||_W1p, ||f||_W1p, ||g||_W1inf)."""
    h0, hs, f, g = remove_wave_truncation(E) if remove_wave else (E.h0, E.h_shift, E.f, E.g)
    return (grid_norm(h0, 2, p, strip), grid_norm(hs, 1, p, strip, lead=1),
            grid_norm(f, 1, p, strip, lead=1), grid_norm(g, 1, math.inf, strip, lead=1))


ERROR_CSV_COLUMNS = ("t", "p", "h0_W2p", "h_shift_W1p", "f_W1p", "g_W1inf")


def error_norms_csv(rows) -> str:
    """rows: iterables (t, p, h0, h_shift, f, g)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ERROR_CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(float(x)) for x in r])
    return buf.getvalue()


# -- driver ---------------------------------------------------------------------------

@dataclass
class ErrorSeries:
    times: np.ndarray
    norms: dict  # name -> array over times
    identity_h0: float  # max |direct h0 - decomposed h0| over all times
    identity_h: float
    torus_norms: dict


def error_series(wave: SmoothWaveParams, visc: ViscousParams, law: PressureLaw, d: int, n: int,
                 spec, times, tau: float | None = None, half_length: float | None = None,
                 p_list=(1.0,), cfl: float = 0.4, remove_wave: bool = True) -> ErrorSeries:
    """Run both periodic companions and evaluate the error terms at ``times``.

    The strip covers [-L, L] with L = lambda2^+ t_max + 40 unless given.
    """
    from .torus import init_periodic, perturbation_norms

    st = wave.states
    times = np.asarray(times, dtype=float)
    grid = TorusGrid(d, n)
    if half_length is None:
        half_length = max(abs(st.lambda2_plus), abs(st.lambda2_minus)) * times[-1] + 40.0
    strip = StripGrid.covering(d, n, half_length)
    if tau is None:
        tau = 0.5 / n
    bm, bp = (st.rho_minus, st.u1_minus), (st.rho_plus, st.u1_plus)
    tm = torus_triplets(init_periodic(grid, bm, spec), grid, visc, law, times, tau, cfl)
    tp = torus_triplets(init_periodic(grid, bp, spec), grid, visc, law, times, tau, cfl)
    names = ["vz_minus_L2", "vz_plus_L2"]
    for p in p_list:
        names += [f"h0_W2_{p}", f"h0_W1_{p}", f"h_shift_W1_{p}", f"h_shift_L_{p}", f"f_W1_{p}"]
    names += ["g_W1inf"] + [f"R{i}_L1" for i in range(1, 11)]
    out = {k: [] for k in names}
    id0 = id1 = 0.0
    for a, b in zip(tm, tp):
        J = ansatz_jets(strip, wave, grid, a, b)
        E = error_terms(J, visc, law)
        D = appendix_decomposition(J, visc, law)
        id0 = max(id0, float(np.max(np.abs(E.h0 - D.h0_sum))))
        id1 = max(id1, float(np.max(np.abs(E.h - D.h_sum))))
        h0, hs, f, g = remove_wave_truncation(E) if remove_wave else (E.h0, E.h_shift, E.f, E.g)
        out["vz_minus_L2"].append(perturbation_norms(a.now, bm, grid)["L2"])
        out["vz_plus_L2"].append(perturbation_norms(b.now, bp, grid)["L2"])
        for p in p_list:
            out[f"h0_W2_{p}"].append(grid_norm(h0, 2, p, strip))
            out[f"h0_W1_{p}"].append(grid_norm(h0, 1, p, strip))
            out[f"h_shift_W1_{p}"].append(grid_norm(hs, 1, p, strip, lead=1))
            out[f"h_shift_L_{p}"].append(grid_norm(hs, 0, p, strip, lead=1))
            out[f"f_W1_{p}"].append(grid_norm(f, 1, p, strip, lead=1))
        out["g_W1inf"].append(grid_norm(g, 1, math.inf, strip, lead=1))
        for i in range(1, 11):
            r = D.terms[f"R{i}"]
            out[f"R{i}_L1"].append(grid_norm(r, 0, 1.0, strip, lead=0 if r.ndim == d else 1))
    return ErrorSeries(times, {k: np.array(v) for k, v in out.items()}, id0, id1,
                       {"minus": np.array(out["vz_minus_L2"]), "plus": np.array(out["vz_plus_L2"])})

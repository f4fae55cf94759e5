"""CNS on the truncated strip [-L, L] x T^(d-1) with the rarefaction data.

The interior scheme is the torus scheme.  The first and last x1 rows are
Dirichlet rows held at the ansatz trace; the two periodic companions that
define that trace are advanced in lock-step with the strip (same dt, same
Runge-Kutta stages), so every stage sees a consistent boundary value.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ansatz import (Triplet, _momentum_primitive, ansatz_jets, build_ansatz, error_terms,
                     grad_div, leaf_jet, vec_dot_grad)
from .errors import DomainError, VacuumError
from .fnorms import grid_norm, lp_norm
from .grids import StripGrid, TorusGrid, extend_to_strip
from .smooth import SmoothWaveParams, sample_smooth_wave
from .torus import (SSP_RK3, FlowState, Mode, PerturbationSpec, ViscousParams, _check, init_periodic,
                    rhs, rk_combine, stable_dt, write_snapshot)
from .waves import DENSITY_FLOOR, PressureLaw, centered_fan


def init_strip(strip: StripGrid, wave: SmoothWaveParams, spec: PerturbationSpec) -> FlowState:
    """(rho, m)(x, 0) = (rho_r, rho_r u1_r e1)(x1, 0) + (v0, w0)(x), periodic extension."""
    grid = TorusGrid(strip.d, strip.n)
    v0, w0 = spec.fields(grid)
    smp = sample_smooth_wave(strip.x1(), 0.0, wave)
    col = strip.column
    rho = col(smp.rho_r) + extend_to_strip(v0, strip)
    if not np.min(rho) > DENSITY_FLOOR:
        raise DomainError("initial density reaches vacuum")
    mom = extend_to_strip(w0, strip, lead=1)
    mom[0] += col(smp.rho_r * smp.u1_r)
    return FlowState(rho, mom, 0.0)


def psi0_closed_form(strip: StripGrid, wave: SmoothWaveParams, spec: PerturbationSpec):
    """psi(x, 0) = q1 w0 - q2 v0 e1.

    q1 = drho/(rho_r + v0) [eta (1-sigma)/(rho+ + v0) - sigma (1-eta)/(rho- + v0)]
    q2 = drho/(rho_r + v0) [u+ eta (1-sigma)/(rho+ + v0) - u- sigma (1-eta)/(rho- + v0)]
    """
    st = wave.states
    grid = TorusGrid(strip.d, strip.n)
    v0, w0 = spec.fields(grid)
    v = extend_to_strip(v0, strip)
    w = extend_to_strip(w0, strip, lead=1)
    smp = sample_smooth_wave(strip.x1(), 0.0, wave)
    col = strip.column
    sig, eta, rr = col(smp.sigma), col(smp.eta), col(smp.rho_r)
    pre = (st.rho_plus - st.rho_minus) / (rr + v)
    a = eta * (1.0 - sig) / (st.rho_plus + v)
    b = sig * (1.0 - eta) / (st.rho_minus + v)
    q1 = pre * (a - b)
    q2 = pre * (st.u1_plus * a - st.u1_minus * b)
    psi = q1 * w
    psi[0] -= q2 * v
    return psi


def periodic_companions(strip: StripGrid, wave: SmoothWaveParams, spec: PerturbationSpec):
    grid = TorusGrid(strip.d, strip.n)
    st = wave.states
    return (grid, init_periodic(grid, (st.rho_minus, st.u1_minus), spec),
            init_periodic(grid, (st.rho_plus, st.u1_plus), spec))


# -- lock-step time stepping -------------------------------------------------

@dataclass
class AnsatzBoundary:
    """Periodic companions driving the Dirichlet rows at x1 = -L and x1 = +L."""

    strip: StripGrid
    wave: SmoothWaveParams
    minus: FlowState
    plus: FlowState

    def __post_init__(self):
        idx = self.strip.torus_index()
        self._rows = (int(idx[0]), int(idx[-1]))
        self._x = np.array([self.strip.x1()[0], self.strip.x1()[-1]])

    def trace(self, rm, mm, rp, mp, t):
        """Ansatz (rho~, rho~ u~) on the two boundary rows at time t."""
        smp = sample_smooth_wave(self._x, t, self.wave)
        out_r, out_m = [], []
        for k, row in enumerate(self._rows):
            s, e = smp.sigma[k], smp.eta[k]
            r_m, r_p = rm[row], rp[row]
            u_m, u_p = mm[:, row] / r_m, mp[:, row] / r_p
            rt = r_m * (1.0 - s) + r_p * s
            ut = u_m * (1.0 - e) + u_p * e
            out_r.append(rt)
            out_m.append(rt * ut)
        return out_r, out_m


def step_strip(state: FlowState, boundary: AnsatzBoundary, params: ViscousParams,
               law: PressureLaw, dt: float) -> FlowState:
    """One SSP-RK3 step of the strip and its two periodic companions.

    Advances ``boundary.minus`` / ``boundary.plus`` in place (same dt and
    stages) and returns the new strip state.
    """
    strip = boundary.strip
    hs = strip.spacing
    ht = (1.0 / strip.n,) * strip.d
    t = state.t
    U0 = [(state.rho, state.mom), (boundary.minus.rho, boundary.minus.mom),
          (boundary.plus.rho, boundary.plus.mom)]
    U = list(U0)
    for a, b, den, c in SSP_RK3:
        new = []
        for k, ((r, m), (r0, m0)) in enumerate(zip(U, U0)):
            _check(r, m, t)
            dr, dm = rhs(r, m, hs if k == 0 else ht, params, law)
            new.append((rk_combine(r0, r, dr, dt, a, b, den), rk_combine(m0, m, dm, dt, a, b, den)))
        (r, m), (rm, mm), (rp, mp) = new
        (rl, rr_), (ml, mr) = boundary.trace(rm, mm, rp, mp, t + c * dt)
        r[0], r[-1] = rl, rr_
        m[:, 0], m[:, -1] = ml, mr
        U = new
    (r, m), (rm, mm), (rp, mp) = U
    _check(r, m, t + dt)
    boundary.minus = FlowState(rm, mm, t + dt)
    boundary.plus = FlowState(rp, mp, t + dt)
    return FlowState(r, m, t + dt)


class StripRun:
    """A strip simulation together with its periodic companions."""

    def __init__(self, strip: StripGrid, wave: SmoothWaveParams, spec: PerturbationSpec,
                 params: ViscousParams, law: PressureLaw, cfl: float = 0.4):
        self.strip, self.wave, self.spec = strip, wave, spec
        self.params, self.law, self.cfl = params, law, cfl
        self.grid, m, p = periodic_companions(strip, wave, spec)
        self.boundary = AnsatzBoundary(strip, wave, m, p)
        self.state = init_strip(strip, wave, spec)
        self.rho_min = float(np.min(self.state.rho))
        self.rho_max = float(np.max(self.state.rho))
        self.steps = 0

    @property
    def t(self) -> float:
        return self.state.t

    def _dt(self):
        b = self.boundary
        return min(stable_dt(s.rho, s.mom, sp, self.params, self.law, self.cfl)
                   for s, sp in ((self.state, self.strip.spacing), (b.minus, self.grid.spacing),
                                 (b.plus, self.grid.spacing)))

    def advance_to(self, target: float, box=None):
        """Step until t == target; ``box`` = (lo, hi) aborts if rho leaves it."""
        while self.state.t < target - 1e-13 * max(1.0, abs(target)):
            dt = min(self._dt(), target - self.state.t)
            self.state = step_strip(self.state, self.boundary, self.params, self.law, dt)
            self.steps += 1
            lo, hi = float(np.min(self.state.rho)), float(np.max(self.state.rho))
            self.rho_min, self.rho_max = min(self.rho_min, lo), max(self.rho_max, hi)
            if box is not None and not (box[0] <= lo and hi <= box[1]):
                raise VacuumError(f"density left the a priori box {box}: [{lo:.4g}, {hi:.4g}]")
        self.state.t = float(target)
        self.boundary.minus.t = self.boundary.plus.t = float(target)

    def snapshot(self):
        b = self.boundary
        return self.state.copy(), b.minus.copy(), b.plus.copy()

    def ansatz(self):
        b = self.boundary
        return build_ansatz(self.strip, self.wave, b.minus, b.plus, self.state.t)

    def triplet(self, tau: float):
        """Strip and companion states at t - tau, t, t + tau (t = current + tau)."""
        t0 = self.state.t
        a = self.snapshot()
        self.advance_to(t0 + tau)
        b = self.snapshot()
        self.advance_to(t0 + 2 * tau)
        c = self.snapshot()
        return StripTriplet(t0 + tau, tau, a, b, c)


@dataclass
class StripTriplet:
    t: float
    tau: float
    prev: tuple  # (strip, minus, plus)
    now: tuple
    nxt: tuple

    def companions(self):
        mk = lambda k: Triplet(self.t, self.tau, self.prev[k], self.now[k], self.nxt[k])
        return mk(1), mk(2)


# -- diagnostics ------------------------------------------------------------------

def relative_entropy_density(rho, rho_t, law: PressureLaw):
    """rho * Phi(rho, rho~) = [p(rho) - p(rho~) - p'(rho~)(rho - rho~)] / (gamma - 1).

    Phi is the integral of (p(s) - p(rho~)) / s^2 from rho~ to rho; for
    gamma = 1 this gives rho ln(rho/rho~) - (rho - rho~).  With
    x = (rho - rho~)/rho~ the bracket is rho~^gamma c(x), evaluated by a
    power series for small |x| to avoid cancellation.
    """
    g = law.gamma
    rho, rho_t = np.broadcast_arrays(np.asarray(rho, float), np.asarray(rho_t, float))
    x = (rho - rho_t) / rho_t
    small = np.abs(x) < 1e-2
    xs = np.where(small, x, 0.0)
    # c_k = binom(g, k) / (g - 1) = g (g-2)(g-3)...(g-k+1) / k!, finite at g = 1
    series = np.zeros_like(x)
    ck = g / 2.0
    for k in range(2, 10):
        series += ck * xs ** k
        ck *= (g - k) / (k + 1)
    xl = np.where(small, 0.0, x)
    if law.isothermal:
        big = (1.0 + xl) * np.log1p(xl) - xl
    else:
        big = (np.expm1(g * np.log1p(xl)) - g * xl) / (g - 1.0)
    return np.power(rho_t, g) * np.where(small, series, big)


def entropy_bounds(rho_lo: float, rho_hi: float, law: PressureLaw):
    """(c, C) with c phi^2 <= rho Phi <= C phi^2 for densities in [rho_lo, rho_hi]."""
    g = law.gamma
    vals = [0.5 * g * s ** (g - 2.0) for s in (rho_lo, rho_hi)]
    return min(vals), max(vals)


@dataclass
class PerturbationDiagnostics:
    t: float
    phi_L2: float
    psi_L2: float
    phi_H2: float
    psi_H2: float
    Phi_integral: float
    N_t: float
    supnorm_to_fan: float
    grad_phi_H1: float = 0.0
    grad_psi_H2: float = 0.0
    entropy_ratio: float = float("nan")  # Phi_integral / ||phi||^2


class DiagnosticsTracker:
    """Accumulates N(t)^2 = sup ||phi, psi||_2^2 + int (||grad phi||_1^2 + ||grad psi||_2^2)."""

    def __init__(self):
        self.sup = 0.0
        self.integral = 0.0
        self._last = None
        self.history: list[PerturbationDiagnostics] = []

    def update(self, diag: PerturbationDiagnostics):
        self.sup = max(self.sup, diag.phi_H2 ** 2 + diag.psi_H2 ** 2)
        dens = diag.grad_phi_H1 ** 2 + diag.grad_psi_H2 ** 2
        if self._last is not None:
            t0, d0 = self._last
            self.integral += 0.5 * (diag.t - t0) * (dens + d0)
        self._last = (diag.t, dens)
        diag.N_t = math.sqrt(self.sup + self.integral)
        self.history.append(diag)
        return diag


def _grad_norm(f, k, strip, lead=0):
    """||grad f||_{H^k}: H^(k+1) norm without the zeroth-order part."""
    full = grid_norm(f, k + 1, 2.0, strip, lead=lead)
    base = grid_norm(f, 0, 2.0, strip, lead=lead, trim=k + 1)
    return math.sqrt(max(full ** 2 - base ** 2, 0.0))


def diagnostics(state: FlowState, ansatz, wave: SmoothWaveParams, strip: StripGrid,
                law: PressureLaw, fan_shift: float = 1.0) -> PerturbationDiagnostics:
    """phi = rho - rho~, psi = u - u~ and the functionals built from them."""
    if abs(state.t - ansatz.t) > 1e-12:
        raise DomainError("state and ansatz are at different times")
    phi = state.rho - ansatz.rho_tilde
    u = state.velocity()
    psi = u - ansatz.u_tilde
    ent = relative_entropy_density(state.rho, ansatz.rho_tilde, law)
    Phi_int = lp_norm(ent, 1.0, strip)
    phi2 = lp_norm(phi, 2.0, strip) ** 2
    fan = centered_fan(strip.x1(), state.t + fan_shift, wave.states)
    col = strip.column
    dev = [np.abs(state.rho - col(fan.rho)), np.abs(u[0] - col(fan.u1))]
    dev += [np.abs(u[i]) for i in range(1, strip.d)]
    sup = max(float(np.max(x)) for x in dev)
    return PerturbationDiagnostics(
        t=state.t,
        phi_L2=math.sqrt(phi2),
        psi_L2=lp_norm(psi, 2.0, strip, lead=1),
        phi_H2=grid_norm(phi, 2, 2.0, strip),
        psi_H2=grid_norm(psi, 2, 2.0, strip, lead=1),
        Phi_integral=Phi_int,
        N_t=float("nan"),
        supnorm_to_fan=sup,
        grad_phi_H1=_grad_norm(phi, 1, strip),
        grad_psi_H2=_grad_norm(psi, 2, strip, lead=1),
        entropy_ratio=Phi_int / phi2 if phi2 > 0 else float("nan"),
    )


DIAG_COLUMNS = ("t", "phi_L2", "psi_L2", "phi_H2", "psi_H2", "Phi_integral", "N_t",
                "supnorm_to_fan")


def diagnostics_csv(history) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DIAG_COLUMNS)
    for d in history:
        w.writerow([repr(float(getattr(d, c))) for c in DIAG_COLUMNS])
    return buf.getvalue()


# -- perturbation equations --------------------------------------------------

@dataclass
class PerturbationResiduals:
    res1: float  # max |eq-1 residual| over the interior
    res2: float
    identity1: float  # max |eq-1 residual - primitive continuity residual|
    identity2: float


def _solution_jets(tri: StripTriplet, strip: StripGrid):
    prev, now, nxt = tri.prev[0], tri.now[0], tri.nxt[0]
    axes = range(strip.d)
    jr = leaf_jet(prev.rho, now.rho, nxt.rho, tri.tau, strip.spacing, axes)
    ju = [leaf_jet(prev.mom[i] / prev.rho, now.mom[i] / now.rho, nxt.mom[i] / nxt.rho,
                   tri.tau, strip.spacing, axes) for i in range(strip.d)]
    return jr, ju


def perturbation_residuals(tri: StripTriplet, strip: StripGrid, wave: SmoothWaveParams,
                           params: ViscousParams, law: PressureLaw,
                           trim: int = 2) -> PerturbationResiduals:
    """Plug phi, psi, h0, f, g into both perturbation equations.

    Returns max-norm residuals over rows [trim, n1 - trim) together with the
    distance to the primitive continuity / momentum residuals of (rho, u),
    which they equal identically.
    """
    d = strip.d
    grid = TorusGrid(d, strip.n)
    cm, cp = tri.companions()
    J = ansatz_jets(strip, wave, grid, cm, cp)
    E = error_terms(J, params, law)
    rho, u = _solution_jets(tri, strip)
    rt, ut = J.rho, J.u
    phi = rho - rt
    psi = [u[i] - ut[i] for i in range(d)]
    div_psi = sum(psi[j].g[j] for j in range(d))
    div_ut = sum(ut[j].g[j] for j in range(d))
    eq1 = (phi.t + rho.val * div_psi + sum(u[j].val * phi.g[j] for j in range(d))
           + phi.val * div_ut + sum(rt.g[j] * psi[j].val for j in range(d)) + E.h0)
    prim1 = rho.t + rho.val * sum(u[j].g[j] for j in range(d)) + sum(u[j].val * rho.g[j] for j in range(d))
    adv_psi = vec_dot_grad(u, psi)
    psi_ut = vec_dot_grad(psi, ut)
    gd_psi = grad_div(psi)
    dp, dpt = law.dp(rho.val), law.dp(rt.val)
    prim2 = _momentum_primitive(rho, u, law, params)
    r1 = _interior(np.broadcast_to(eq1, strip.shape), trim)
    i1 = _interior(np.broadcast_to(eq1 - prim1, strip.shape), trim)
    r2 = i2 = 0.0
    for i in range(d):
        e1 = 1.0 if i == 0 else 0.0
        lhs = (rho.val * (psi[i].t + adv_psi[i] + psi_ut[i]) + dp * phi.g[i]
               + (dp - rho.val / rt.val * dpt) * rt.g[i]
               - params.mu * psi[i].laplacian() - (params.mu + params.lam) * gd_psi[i])
        rhs_ = E.f[i] - phi.val * E.g[i] + e1 * params.nu * J.u_r.h[0][0]
        res = np.broadcast_to(lhs - rhs_, strip.shape)
        r2 = max(r2, float(np.max(np.abs(_interior(res, trim)))))
        i2 = max(i2, float(np.max(np.abs(_interior(res - prim2[i], trim)))))
    return PerturbationResiduals(float(np.max(np.abs(r1))), r2,
                                 float(np.max(np.abs(i1))), i2)


def _interior(a, trim):
    return a[trim:a.shape[0] - trim]


# -- flagship run ------------------------------------------------------------

def strip_spec(eps: float, d: int = 2) -> PerturbationSpec:
    """Default zero-average perturbation for strip runs in dimension d."""
    modes = (
        Mode((1,), 1.0, (0.5, 0.3, -0.2), 0.3),
        Mode((2,), -0.3, (0.2, -0.4, 0.1), 1.7),
        Mode((0, 1), 0.4, (-0.3, 0.6, 0.1), 1.1),
        Mode((1, 1), 0.2, (0.1, -0.2, 0.3), 0.5),
        Mode((1, 0, 1), -0.25, (0.2, -0.1, 0.4), 2.0),
    )
    return PerturbationSpec(eps, tuple(m for m in modes if not any(m.k[d:])))


@dataclass
class FlagshipResult:
    history: list
    theta: float
    t_transient: float
    sup_transient: float
    sup_final: float
    rho_range: tuple
    sandwich_ok: bool
    steps: int
    strip: StripGrid

    @property
    def decreased(self) -> bool:
        return self.sup_final < self.sup_transient

    @property
    def below_theta(self) -> bool:
        return self.sup_final < self.theta


def _sandwich_ok(diag, rho_lo, rho_hi, law, slack=1e-9):
    if not diag.phi_L2 > 0:
        return diag.Phi_integral <= slack
    c, C = entropy_bounds(rho_lo, rho_hi, law)
    r = diag.entropy_ratio
    return c * (1 - slack) <= r <= C * (1 + slack)


def run_flagship(cfg, out_dir=None, t_transient: float = 5.0, stride: float = 1.0,
                 spec: PerturbationSpec | None = None, on_sample=None) -> FlagshipResult:
    """Strip run to cfg.t_final with diagnostics every ``stride`` time units.

    With ``out_dir`` writes diagnostics.csv, initial/final snapshots and
    plot_decay.py there.
    """
    wave, law, visc = cfg.wave(), PressureLaw(cfg.gamma), cfg.viscous()
    strip = StripGrid.covering(cfg.d, cfg.n_transverse, cfg.half_length)
    spec = spec or strip_spec(cfg.epsilon, cfg.d)
    run = StripRun(strip, wave, spec, visc, law, cfg.cfl)
    st = wave.states
    box = (0.5 * st.rho_minus, 2.0 * st.rho_plus)
    times = sorted(set(np.round(np.arange(0.0, cfg.t_final, stride), 12).tolist())
                   | {float(t_transient), float(cfg.t_final)})
    times = [t for t in times if t <= cfg.t_final]
    tracker = DiagnosticsTracker()
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_snapshot(out / "strip_t0.bin", run.state)
    sandwich = True
    lo_hi = [math.inf, -math.inf]
    for t in times:
        run.advance_to(t, box=box)
        A = run.ansatz()
        lo_hi[0] = min(lo_hi[0], run.rho_min, float(np.min(A.rho_tilde)))
        lo_hi[1] = max(lo_hi[1], run.rho_max, float(np.max(A.rho_tilde)))
        d = tracker.update(diagnostics(run.state, A, wave, strip, law))
        sandwich &= _sandwich_ok(d, *lo_hi, law)
        if on_sample is not None:
            on_sample(d)
    by_t = {d.t: d for d in tracker.history}
    res = FlagshipResult(tracker.history, cfg.theta, t_transient,
                         by_t[float(t_transient)].supnorm_to_fan,
                         tracker.history[-1].supnorm_to_fan, tuple(lo_hi), sandwich,
                         run.steps, strip)
    if out is not None:
        write_snapshot(out / "strip_final.bin", run.state)
        (out / "diagnostics.csv").write_text(diagnostics_csv(tracker.history))
        (out / "plot_decay.py").write_text(plot_script(["diagnostics.csv"], res.theta))
    return res


def plot_script(csv_names, theta=None) -> str:
    lines = ["import csv", "import matplotlib.pyplot as plt", "",
             "fig, ax = plt.subplots(1, 2, figsize=(10, 4))"]
    for name in csv_names:
        lines += [f"rows = list(csv.DictReader(open({name!r})))",
                  "t = [float(r['t']) for r in rows]",
                  "for col in ('phi_L2', 'psi_L2', 'phi_H2', 'psi_H2'):",
                  "    ax[0].semilogy(t, [float(r[col]) for r in rows], label=col)",
                  "ax[1].loglog(t[1:], [float(r['supnorm_to_fan']) for r in rows][1:], label='supnorm_to_fan')"]
    if theta is not None:
        lines.append(f"ax[1].axhline({theta!r}, ls='--', c='k', label='theta')")
    lines += ["for a in ax:", "    a.set_xlabel('t')", "    a.legend()",
              "fig.tight_layout()", "fig.savefig('decay.png', dpi=120)", ""]
    return "\n".join(lines)


def residual_refinement(cfg, t_eval: float = 0.5, ns=(16, 32),
                        spec: PerturbationSpec | None = None):
    """Perturbation-equation residuals at t_eval for each n (tau = 0.5/n).

    Returns a list of (n, PerturbationResiduals); successive ratios should
    be near 4 for a second-order scheme.
    """
    wave, law, visc = cfg.wave(), PressureLaw(cfg.gamma), cfg.viscous()
    spec = spec or strip_spec(cfg.epsilon, cfg.d)
    out = []
    for n in ns:
        tau = 0.5 / n
        L = wave.states.lambda2_plus * (t_eval + tau) + 40.0
        strip = StripGrid.covering(cfg.d, n, L)
        run = StripRun(strip, wave, spec, visc, law, cfg.cfl)
        run.advance_to(t_eval - tau)
        tri = run.triplet(tau)
        out.append((n, perturbation_residuals(tri, strip, wave, visc, law)))
    return out


def domain_doubling(cfg, t_check: float = 3.0, spec: PerturbationSpec | None = None,
                    half_length: float | None = None):
    """Relative change of interior phi/psi L2 norms when L doubles.

    The interior is |x1| <= L/2 of the smaller strip (default
    L = lambda2^+ t_check + 40).  Returns {name: relative change}.
    """
    wave, law, visc = cfg.wave(), PressureLaw(cfg.gamma), cfg.viscous()
    spec = spec or strip_spec(cfg.epsilon, cfg.d)
    L = half_length if half_length is not None else wave.states.lambda2_plus * t_check + 40.0
    norms = []
    for scale in (1, 2):
        strip = StripGrid.covering(cfg.d, cfg.n_transverse, scale * L)
        run = StripRun(strip, wave, spec, visc, law, cfg.cfl)
        run.advance_to(t_check)
        A = run.ansatz()
        keep = np.abs(strip.x1()) <= 0.5 * L + 1e-12
        phi = (run.state.rho - A.rho_tilde)[keep]
        psi = (run.state.velocity() - A.u_tilde)[:, keep]
        w = strip.weights()[keep]
        norms.append({"phi_L2": math.sqrt(float(np.sum(w * phi ** 2))),
                      "psi_L2": math.sqrt(float(np.sum(w * np.sum(psi ** 2, axis=0))))})
    return {k: abs(norms[1][k] - norms[0][k]) / norms[0][k] for k in norms[0]}
